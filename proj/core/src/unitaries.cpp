#include "focklab/unitaries.hpp"

#include <cmath>
#include <numbers>

namespace focklab {

namespace {

constexpr double kPi = std::numbers::pi;

Complex ipow(Complex base, int exponent) {
  Complex acc(1.0, 0.0);
  for (int i = 0; i < exponent; ++i) acc *= base;
  return acc;
}

double binomial(int n, int k) {
  double acc = 1.0;
  for (int i = 1; i <= k; ++i) acc *= double(n - k + i) / double(i);
  return acc;
}

}  // namespace

Complex ModeMixParams::tau() const {
  if (std::abs(std::cos(r)) < 1e-12) {
    throw std::domain_error("ModeMixParams: r = pi/2 + k*pi makes tan(r) diverge");
  }
  return std::tan(r) * std::exp(Complex(0.0, -theta));
}

Complex ModeMixParams::xi() const { return r * std::exp(Complex(0.0, -theta)); }

// Pade(13,13) scaling-and-squaring. The coefficients and the 1-norm threshold
// theta_13 follow the standard double-precision tuning of the method.
OperatorMatrix expm(const OperatorMatrix& generator, const ExpmOptions& opts) {
  if (opts.tolerance < std::numeric_limits<double>::epsilon() / 2) {
    throw std::invalid_argument("expm: tolerance below machine epsilon");
  }
  if (opts.max_scaling < 0) {
    throw std::invalid_argument("expm: negative max_scaling");
  }

  static const double b[14] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,           960960.0,            16380.0,
                               182.0,                1.0};
  constexpr double theta13 = 5.371920351148152;

  const int dim = generator.cutoff().dim();
  const CMatrix& g = generator.entries();
  const double norm1 = g.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return OperatorMatrix::identity(generator.cutoff());

  int scaling = 0;
  if (norm1 > theta13) {
    scaling = int(std::ceil(std::log2(norm1 / theta13)));
    if (scaling > opts.max_scaling) {
      throw NumericError("expm: generator 1-norm " + std::to_string(norm1) +
                         " needs scaling depth " + std::to_string(scaling) +
                         " > max_scaling " + std::to_string(opts.max_scaling));
    }
  }

  const CMatrix a = g / std::pow(2.0, scaling);
  const CMatrix id = CMatrix::Identity(dim, dim);
  const CMatrix a2 = a * a;
  const CMatrix a4 = a2 * a2;
  const CMatrix a6 = a2 * a4;

  const CMatrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                         b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  const CMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                    b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  CMatrix result = (v - u).partialPivLu().solve(v + u);
  for (int i = 0; i < scaling; ++i) result = result * result;
  return OperatorMatrix(generator.cutoff(), std::move(result));
}

OperatorMatrix mode_mix_op(const ModeMixParams& params, CutoffSpec cutoff,
                           const ExpmOptions& opts) {
  const Complex xi = params.xi();
  const OperatorMatrix bdc = creator(Mode::b, cutoff) * annihilator(Mode::c, cutoff);
  const OperatorMatrix bcd = annihilator(Mode::b, cutoff) * creator(Mode::c, cutoff);
  return expm(xi * bdc - std::conj(xi) * bcd, opts);
}

StateVector mixed_fock_state(int n, const ModeMixParams& params, CutoffSpec cutoff) {
  if (n < 0 || n > std::min(cutoff.n_b_max, cutoff.n_c_max)) {
    throw std::invalid_argument("mixed_fock_state: n = " + std::to_string(n) +
                                " not representable at cutoff");
  }
  const Complex tau = params.tau();
  const double scale = std::pow(1.0 + std::norm(tau), -0.5 * n);
  StateVector state(cutoff);
  for (int k = 0; k <= n; ++k) {
    state.set({n - k, k}, std::sqrt(binomial(n, k)) * ipow(tau, n - k) * scale);
  }
  return state;
}

StateVector dark_fock_state(int n, const ModeMixParams& params, CutoffSpec cutoff) {
  if (n < 0 || n > std::min(cutoff.n_b_max, cutoff.n_c_max)) {
    throw std::invalid_argument("dark_fock_state: n = " + std::to_string(n) +
                                " not representable at cutoff");
  }
  const Complex tau = params.tau();
  const double scale = std::pow(1.0 + std::norm(tau), -0.5 * n);
  StateVector state(cutoff);
  for (int k = 0; k <= n; ++k) {
    state.set({n - k, k}, std::sqrt(binomial(n, k)) * ipow(-std::conj(tau), k) * scale);
  }
  return state;
}

BasisFamily mixed_family(int count, const ModeMixParams& params, CutoffSpec cutoff) {
  std::vector<StateVector> members;
  members.reserve(count);
  for (int m = 0; m < count; ++m) members.push_back(mixed_fock_state(m, params, cutoff));
  return BasisFamily(std::move(members));
}

BasisFamily dark_family(int count, const ModeMixParams& params, CutoffSpec cutoff) {
  std::vector<StateVector> members;
  members.reserve(count);
  for (int m = 0; m < count; ++m) members.push_back(dark_fock_state(m, params, cutoff));
  return BasisFamily(std::move(members));
}

OperatorMatrix displacement_c(const DisplacementParams& d, CutoffSpec cutoff,
                              const ExpmOptions& opts) {
  const OperatorMatrix c = annihilator(Mode::c, cutoff);
  return expm(-d.alpha * adjoint(c) + std::conj(d.alpha) * c, opts);
}

std::pair<OperatorMatrix, OperatorMatrix> collective_mode_ops(const ModeMixParams& params,
                                                              CutoffSpec cutoff) {
  const Complex tau = params.tau();
  const double scale = 1.0 / std::sqrt(1.0 + std::norm(tau));
  const OperatorMatrix a = scale * (std::conj(tau) * annihilator(Mode::b, cutoff) +
                                    Complex(1.0) * annihilator(Mode::c, cutoff));
  return {a, adjoint(a)};
}

std::pair<OperatorMatrix, OperatorMatrix> quadratures(const ModeMixParams& params,
                                                      CutoffSpec cutoff) {
  const auto [a, a_dag] = collective_mode_ops(params, cutoff);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const OperatorMatrix q = Complex(inv_sqrt2) * (a_dag + a);
  const OperatorMatrix p = Complex(0.0, inv_sqrt2) * (a_dag - a);
  return {q, p};
}

OperatorMatrix quantum_time_reversal(CutoffSpec cutoff, const ExpmOptions& opts) {
  const OperatorMatrix bdc = creator(Mode::b, cutoff) * annihilator(Mode::c, cutoff);
  const OperatorMatrix bcd = annihilator(Mode::b, cutoff) * creator(Mode::c, cutoff);
  return expm(Complex(kPi / 2.0) * (bdc - bcd), opts);
}

StateVector conjugate_amplitudes(const StateVector& x) {
  return StateVector(x.cutoff(), x.amplitudes().conjugate());
}

StateVector time_reverse(const StateVector& x, const ExpmOptions& opts) {
  return apply(quantum_time_reversal(x.cutoff(), opts), conjugate_amplitudes(x));
}

OperatorMatrix collective_displacement(const DisplacementParams& d,
                                       const ModeMixParams& params, CutoffSpec cutoff,
                                       const ExpmOptions& opts) {
  const auto [a, a_dag] = collective_mode_ops(params, cutoff);
  return expm(d.alpha * a_dag - std::conj(d.alpha) * a, opts);
}

OperatorMatrix parity_c(CutoffSpec cutoff) {
  OperatorMatrix op(cutoff);
  auto& m = op.entries();
  for (int b = 0; b <= cutoff.n_b_max; ++b) {
    for (int c = 0; c <= cutoff.n_c_max; ++c) {
      const int k = index_of({b, c}, cutoff);
      m(k, k) = (c % 2 == 0) ? 1.0 : -1.0;
    }
  }
  return op;
}

int displacement_adequate_cutoff(int n_max_used, Complex alpha) {
  return n_max_used + int(std::ceil(16.0 * std::norm(alpha))) + 8;
}

double unitarity_defect(const OperatorMatrix& v, const OperatorMatrix& projector) {
  return projected_max_abs(adjoint(v) * v - OperatorMatrix::identity(v.cutoff()), projector);
}

double global_phase_distance(const StateVector& x, const StateVector& y) {
  const double scale = x.norm() * y.norm();
  if (scale == 0.0) return 0.0;
  return 1.0 - std::abs(inner(x, y)) / scale;
}

}  // namespace focklab
