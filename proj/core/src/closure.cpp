#include "focklab/closure.hpp"

#include <cmath>

namespace focklab {

namespace {

double factorial(int n) {
  double acc = 1.0;
  for (int i = 2; i <= n; ++i) acc *= double(i);
  return acc;
}

Complex ipow(Complex base, int exponent) {
  Complex acc(1.0, 0.0);
  for (int i = 0; i < exponent; ++i) acc *= base;
  return acc;
}

}  // namespace

double closure_s_parameter(Complex tau) {
  return 2.0 * tau.real() / (1.0 + std::norm(tau));
}

StateVector closure_probe(int n, const ModeMixParams& params, CutoffSpec cutoff) {
  const StateVector base = mixed_fock_state(n, params, cutoff);
  const OperatorMatrix mixer = creator(Mode::b, cutoff) * annihilator(Mode::c, cutoff) +
                               annihilator(Mode::b, cutoff) * creator(Mode::c, cutoff);
  return apply(mixer, base);
}

ClosureMixResult closure_mix_test(int n, const ModeMixParams& params, int family_size,
                                  CutoffSpec cutoff) {
  if (n < 0) throw std::invalid_argument("closure_mix_test: negative n");
  if (family_size < n + 2) {
    throw std::invalid_argument("closure_mix_test: family_size must be at least n + 2");
  }
  if (family_size - 1 > std::min(cutoff.n_b_max, cutoff.n_c_max)) {
    throw std::invalid_argument("closure_mix_test: cutoff too small for the family");
  }

  ClosureMixResult result;
  result.n = n;
  result.tau = params.tau();
  result.family_size = family_size;
  result.cutoff = cutoff;

  const double s = closure_s_parameter(result.tau);
  result.lhs = double(n) * double(n) * s * s;
  result.rhs = double(n) + double(n) * double(n - 1) * s * s;

  const StateVector probe = closure_probe(n, params, cutoff);
  const BasisFamily family = mixed_family(family_size, params, cutoff);

  double captured = 0.0;
  double tail = 0.0;
  for (int m = 0; m < family_size; ++m) {
    const double contribution = std::norm(inner(family.member(m), probe));
    captured += contribution;
    if (m >= family_size - 2) tail += contribution;
  }
  result.lhs_numeric = captured;
  result.rhs_numeric = std::real(inner(probe, probe));

  // The probe lives in one total-excitation shell, so the captured sum must
  // have saturated well before the last two members.
  if (tail > 1e-12 * std::max(1.0, result.rhs_numeric)) {
    throw NumericError("closure_mix_test: family sum still shrinking at size " +
                       std::to_string(family_size) + " (tail " + std::to_string(tail) + ")");
  }
  return result;
}

ClosureMixResult closure_mix_test(int n, const ModeMixParams& params, CutoffSpec cutoff) {
  return closure_mix_test(n, params, n + 4, cutoff);
}

double ParityBlock::hermiticity_defect() const {
  if (entries.size() == 0) return 0.0;
  return (entries - entries.adjoint()).cwiseAbs().maxCoeff();
}

ParityBlock parity_block(const DisplacementParams& d, int size, ParityRoute route,
                         CutoffSpec cutoff, bool enforce_adequacy) {
  if (size < 1) throw std::invalid_argument("parity_block: size must be positive");

  ParityBlock block;
  block.alpha = d.alpha;
  block.size = size;
  block.route = route;
  block.entries = CMatrix(size, size);

  if (route == ParityRoute::closed_form) {
    const double envelope = std::exp(-2.0 * std::norm(d.alpha));
    const Complex two_a = 2.0 * d.alpha;
    const Complex two_a_conj = 2.0 * std::conj(d.alpha);
    for (int j = 0; j < size; ++j) {
      for (int n = 0; n < size; ++n) {
        Complex sum(0.0, 0.0);
        for (int s = 0; s <= std::min(j, n); ++s) {
          const double sign = (s % 2 == 0) ? 1.0 : -1.0;
          sum += sign * std::sqrt(factorial(j) * factorial(n)) * ipow(two_a, j - s) *
                 ipow(two_a_conj, n - s) /
                 (factorial(j - s) * factorial(n - s) * factorial(s));
        }
        block.entries(j, n) = envelope * sum;
      }
    }
    return block;
  }

  const int needed = displacement_adequate_cutoff(size - 1, d.alpha);
  if (enforce_adequacy && cutoff.n_c_max < needed) {
    throw NumericError("parity_block: numeric route needs n_c_max >= " +
                       std::to_string(needed) + ", got " + std::to_string(cutoff.n_c_max));
  }
  if (cutoff.n_c_max + 1 < size) {
    throw NumericError("parity_block: cutoff cannot hold " + std::to_string(size) +
                       " displaced states");
  }
  const OperatorMatrix displacement = displacement_c(d, cutoff);
  const OperatorMatrix parity = parity_c(cutoff);
  std::vector<StateVector> displaced;
  displaced.reserve(size);
  for (int n = 0; n < size; ++n) {
    displaced.push_back(apply(displacement, StateVector::basis_state({0, n}, cutoff)));
  }
  for (int j = 0; j < size; ++j) {
    for (int n = 0; n < size; ++n) {
      block.entries(j, n) = inner(displaced[j], apply(parity, displaced[n]));
    }
  }
  return block;
}

DeterminantResult parity_closure_determinant(const DisplacementParams& d, int size,
                                             ParityRoute route, CutoffSpec cutoff,
                                             bool enforce_adequacy) {
  const ParityBlock block = parity_block(d, size, route, cutoff, enforce_adequacy);

  // Eq.-literal product matrix sum_n B_jn B_nk, then pivoted LU.
  const CMatrix product = block.entries * block.entries;
  Eigen::PartialPivLU<CMatrix> lu(product);

  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double pivot_max = pivots.maxCoeff();
  const double pivot_min = pivots.minCoeff();
  if (pivot_max == 0.0 ||
      pivot_min < pivot_max * double(size) * std::numeric_limits<double>::epsilon()) {
    throw NumericError("parity_closure_determinant: factorization singular to working "
                       "precision (pivot ratio " +
                       std::to_string(pivot_max == 0.0 ? 0.0 : pivot_min / pivot_max) + ")");
  }

  DeterminantResult result;
  result.alpha = d.alpha;
  result.size = size;
  result.det_value = lu.determinant();
  result.expected = std::exp(-4.0 * std::norm(d.alpha) * double(size));
  result.rel_error = std::abs(result.det_value - result.expected) / result.expected;
  return result;
}

ExpansionResidual expansion_residual(const ModeMixParams& params, int n, CutoffSpec cutoff) {
  const int family_size = n + 4;
  if (family_size - 1 > std::min(cutoff.n_b_max, cutoff.n_c_max)) {
    throw std::invalid_argument("expansion_residual: cutoff too small for the family");
  }

  const StateVector probe = closure_probe(n, params, cutoff);
  const BasisFamily family = mixed_family(family_size, params, cutoff);

  CVector remainder = probe.amplitudes();
  for (const auto& member : family.members()) {
    remainder -= inner(member, probe) * member.amplitudes();
  }

  ExpansionResidual report;
  report.n = n;
  report.tau = params.tau();
  report.family_size = family_size;
  report.cutoff = cutoff;
  report.residual_norm = remainder.norm();
  const double s = closure_s_parameter(report.tau);
  report.predicted_norm = std::sqrt(std::max(0.0, double(n) * (1.0 - s * s)));
  return report;
}

}  // namespace focklab
