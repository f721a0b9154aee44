#include "focklab/observables.hpp"

#include <cmath>
#include <cstdio>

namespace focklab {

namespace {

Complex ipow(Complex base, int exponent) {
  Complex acc(1.0, 0.0);
  for (int i = 0; i < exponent; ++i) acc *= base;
  return acc;
}

/// reference scalar for a possibly-complex expected value.
double real_reference(Complex expected) {
  if (std::abs(expected.imag()) <= 1e-14 * std::max(1.0, std::abs(expected))) {
    return expected.real();
  }
  return std::abs(expected);
}

/// powers[j][m] = op^j |x_m>, j = 0..max_power.
std::vector<std::vector<StateVector>> power_chain(const OperatorMatrix& op,
                                                  const std::vector<StateVector>& members,
                                                  int max_power) {
  std::vector<std::vector<StateVector>> powers;
  powers.reserve(max_power + 1);
  powers.push_back(members);
  for (int j = 1; j <= max_power; ++j) {
    std::vector<StateVector> next;
    next.reserve(members.size());
    for (const auto& x : powers.back()) next.push_back(apply(op, x));
    powers.push_back(std::move(next));
  }
  return powers;
}

CMatrix gram(const std::vector<StateVector>& bras, const std::vector<StateVector>& kets) {
  CMatrix g(bras.size(), kets.size());
  for (size_t m = 0; m < bras.size(); ++m) {
    for (size_t k = 0; k < kets.size(); ++k) {
      g(m, k) = inner(bras[m], kets[k]);
    }
  }
  return g;
}

/// max over (m,k) of |G(m,k) - diag_expected(k) delta_mk|.
double diag_deviation(const CMatrix& g, const std::vector<Complex>& diag_expected) {
  double worst = 0.0;
  for (Eigen::Index m = 0; m < g.rows(); ++m) {
    for (Eigen::Index k = 0; k < g.cols(); ++k) {
      const Complex expected = (m == k) ? diag_expected[size_t(k)] : Complex(0.0);
      worst = std::max(worst, std::abs(g(m, k) - expected));
    }
  }
  return worst;
}

std::string family_label(const char* kind, int n, const ModeMixParams& p) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s n=%d r=%.6g theta=%.6g", kind, n, p.r, p.theta);
  return buf;
}

}  // namespace

const char* axis_name(Axis axis) {
  switch (axis) {
    case Axis::x: return "x";
    case Axis::y: return "y";
    case Axis::z: return "z";
  }
  return "?";
}

std::array<OperatorMatrix, 3> schwinger_J(CutoffSpec cutoff) {
  const OperatorMatrix bdc = creator(Mode::b, cutoff) * annihilator(Mode::c, cutoff);
  const OperatorMatrix bcd = annihilator(Mode::b, cutoff) * creator(Mode::c, cutoff);
  const OperatorMatrix jx = Complex(0.5) * (bdc + bcd);
  const OperatorMatrix jy = Complex(0.0, -0.5) * (bdc - bcd);
  const OperatorMatrix jz =
      Complex(0.5) * (number_op(Mode::b, cutoff) - number_op(Mode::c, cutoff));
  return {jx, jy, jz};
}

double SpectralScalars::sphere_radius_sq() const {
  return j1[0] * j1[0] + j1[1] * j1[1] + j1[2] * j1[2];
}

SpectralScalars spectral_scalars(int n, const ModeMixParams& params) {
  if (n < 0) throw std::invalid_argument("spectral_scalars: negative n");
  SpectralScalars scalars;
  scalars.n = n;
  scalars.tau = params.tau();
  if (n == 0) return scalars;  // vacuum: everything vanishes

  const Complex tau = scalars.tau;
  const double denom = 1.0 + std::norm(tau);
  scalars.j1[0] = 0.5 * n * (2.0 * tau.real()) / denom;
  scalars.j1[1] = -double(n) * tau.imag() / denom;
  scalars.j1[2] = 0.5 * n * (std::norm(tau) - 1.0) / denom;
  for (int mu = 0; mu < 3; ++mu) {
    scalars.j2[mu] = 0.25 * n + (double(n - 1) / double(n)) * scalars.j1[mu] * scalars.j1[mu];
  }
  return scalars;
}

Complex cross_moment_closed(int n, const ModeMixParams& params, Axis first, Axis second) {
  if (first == second) {
    throw std::invalid_argument("cross_moment_closed: axes must differ");
  }
  if (n == 0) return Complex(0.0, 0.0);
  const SpectralScalars scalars = spectral_scalars(n, params);
  const int a = int(first), b = int(second);
  const int c = 3 - a - b;  // the remaining axis
  // +i/2 j_c for cyclic order (xy, yz, zx), -i/2 for anticyclic.
  const bool cyclic = (b - a + 3) % 3 == 1;
  const double sign = cyclic ? 1.0 : -1.0;
  return Complex((double(n - 1) / double(n)) * scalars.j1[a] * scalars.j1[b], 0.0) +
         Complex(0.0, 0.5 * sign) * Complex(scalars.j1[c]);
}

CMatrix family_matrix_elements(const OperatorMatrix& op, const BasisFamily& family) {
  if (!(op.cutoff() == family.cutoff())) {
    throw std::invalid_argument("family_matrix_elements: cutoff mismatch");
  }
  CMatrix g(family.size(), family.size());
  for (int k = 0; k < family.size(); ++k) {
    const StateVector column = apply(op, family.member(k));
    for (int m = 0; m < family.size(); ++m) {
      g(m, k) = inner(family.member(m), column);
    }
  }
  return g;
}

double offdiag_max_abs(const CMatrix& elements) {
  double worst = 0.0;
  for (Eigen::Index m = 0; m < elements.rows(); ++m) {
    for (Eigen::Index k = 0; k < elements.cols(); ++k) {
      if (m != k) worst = std::max(worst, std::abs(elements(m, k)));
    }
  }
  return worst;
}

std::vector<UncertaintyRecord> robertson_products(int n, const ModeMixParams& params) {
  if (n < 1) throw std::invalid_argument("robertson_products: requires n >= 1");
  const SpectralScalars s = spectral_scalars(n, params);
  const std::string label = family_label("mixed", n, params);

  auto record = [&](Axis a, Axis b, Axis c, const char* pair) {
    const double ja = s.first(a), jb = s.first(b), jc = s.first(c);
    UncertaintyRecord rec;
    rec.pair = pair;
    rec.product = std::sqrt((ja * jb / n) * (ja * jb / n) + 0.25 * jc * jc);
    rec.bound = 0.5 * std::abs(jc);
    rec.state_label = label;
    return rec;
  };

  return {record(Axis::x, Axis::y, Axis::z, "JxJy"),
          record(Axis::y, Axis::z, Axis::x, "JyJz"),
          record(Axis::z, Axis::x, Axis::y, "JzJx")};
}

MomentTable moment_table(double center, int max_order) {
  if (max_order < 0 || max_order > 12) {
    throw std::invalid_argument("moment_table: order must be in [0, 12]");
  }
  MomentTable table;
  table.center = center;
  table.values.resize(max_order + 1);
  table.values[0] = 1.0;
  if (max_order >= 1) table.values[1] = center;
  for (int k = 1; k < max_order; ++k) {
    table.values[k + 1] = center * table.values[k] + 0.5 * k * table.values[k - 1];
  }
  return table;
}

std::vector<CheckReport> dark_state_suite(int n, const ModeMixParams& params,
                                          CutoffSpec cutoff) {
  if (n < 0) throw std::invalid_argument("dark_state_suite: negative n");
  if (std::min(cutoff.n_b_max, cutoff.n_c_max) < n + 2) {
    throw std::invalid_argument("dark_state_suite: cutoff must reach n + 2");
  }

  const std::vector<std::pair<std::string, double>> params_list = {
      {"n", double(n)}, {"r", params.r}, {"theta", params.theta},
      {"cutoff_b", double(cutoff.n_b_max)}, {"cutoff_c", double(cutoff.n_c_max)}};

  const BasisFamily dark = dark_family(n + 1, params, cutoff);
  const BasisFamily mixed = mixed_family(n + 1, params, cutoff);
  const auto& members = dark.members();

  const auto [a, a_dag] = collective_mode_ops(params, cutoff);
  const auto [q, p] = quadratures(params, cutoff);
  const auto j_ops = schwinger_J(cutoff);

  std::vector<CheckReport> reports;
  const std::vector<Complex> zeros(members.size(), Complex(0.0));
  Stopwatch watch;

  auto defect_report = [&](const char* id, const char* anchor, Complex closed,
                           Complex numeric, double reference, double abs_error,
                           double tol) {
    CheckReport r = make_defect_check(id, anchor, params_list, closed, numeric,
                                      reference, abs_error, tol);
    r.wall_time = watch.lap();
    reports.push_back(std::move(r));
  };

  // Collective number operator and its square vanish on the family.
  {
    std::vector<StateVector> na;
    na.reserve(members.size());
    for (const auto& x : members) na.push_back(apply(a_dag, apply(a, x)));
    const CMatrix g1 = gram(members, na);
    defect_report("dark-number-zero", "Eq. 4.11", Complex(0.0), g1(n, n), 0.0,
                  diag_deviation(g1, zeros), 1e-10);

    std::vector<StateVector> nna;
    nna.reserve(members.size());
    for (const auto& x : na) nna.push_back(apply(a_dag, apply(a, x)));
    const CMatrix g2 = gram(members, nna);
    defect_report("dark-number-sq-zero", "Eq. 4.11", Complex(0.0), g2(n, n), 0.0,
                  diag_deviation(g2, zeros), 1e-10);
  }

  // Quadrature means vanish; second moments are delta_mk / 2.
  {
    const auto q_pow = power_chain(q, members, 2);
    const auto p_pow = power_chain(p, members, 2);
    const CMatrix gq = gram(members, q_pow[1]);
    const CMatrix gp = gram(members, p_pow[1]);
    defect_report("dark-q-mean-zero", "Eq. 4.12", Complex(0.0), gq(n, n), 0.0,
                  diag_deviation(gq, zeros), 1e-10);
    defect_report("dark-p-mean-zero", "Eq. 4.13", Complex(0.0), gp(n, n), 0.0,
                  diag_deviation(gp, zeros), 1e-10);

    const std::vector<Complex> halves(members.size(), Complex(0.5));
    const CMatrix gq2 = gram(members, q_pow[2]);
    const CMatrix gp2 = gram(members, p_pow[2]);
    defect_report("dark-q2-half", "Eq. 4.12", Complex(0.5), gq2(n, n), 0.5,
                  diag_deviation(gq2, halves), 1e-9);
    defect_report("dark-p2-half", "Eq. 4.13", Complex(0.5), gp2(n, n), 0.5,
                  diag_deviation(gp2, halves), 1e-9);
  }

  // Angular momentum diagonals flip sign relative to the mixed family.
  for (Axis axis : kAxes) {
    std::vector<Complex> expected(members.size());
    for (int m = 0; m < int(members.size()); ++m) {
      expected[m] = Complex(-spectral_scalars(m, params).first(axis));
    }
    const CMatrix g = family_matrix_elements(j_ops[size_t(axis)], dark);
    const std::string id = std::string("dark-J") + axis_name(axis) + "-signflip";
    defect_report(id.c_str(), "Eq. 4.14", expected[n], g(n, n),
                  real_reference(expected[n]), diag_deviation(g, expected), 1e-9);
  }

  // Fluctuations: dq = dp = 1/sqrt(2), and the product sits at the bound 1/2.
  {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    double worst_q = 0.0, worst_p = 0.0, worst_prod = 0.0;
    double last_dq = 0.0, last_dp = 0.0;
    for (const auto& x : members) {
      const double dq = std::sqrt(fluctuation(q, x));
      const double dp = std::sqrt(fluctuation(p, x));
      worst_q = std::max(worst_q, std::abs(dq - inv_sqrt2));
      worst_p = std::max(worst_p, std::abs(dp - inv_sqrt2));
      worst_prod = std::max(worst_prod, std::abs(dq * dp - 0.5));
      last_dq = dq;
      last_dp = dp;
    }
    defect_report("dark-q-fluct", "Eq. 4.15", Complex(inv_sqrt2), Complex(last_dq),
                  inv_sqrt2, worst_q, 1e-9);
    defect_report("dark-p-fluct", "Eq. 4.15", Complex(inv_sqrt2), Complex(last_dp),
                  inv_sqrt2, worst_p, 1e-9);
    defect_report("dark-uncertainty-product", "Eq. 4.16", Complex(0.5),
                  Complex(last_dq * last_dp), 0.5, worst_prod, 1e-9);
  }

  // Untransformed-family second moments for contrast: diagonals are m + 1/2,
  // not 1/2 — the two families genuinely differ here.
  {
    const auto q_pow = power_chain(q, mixed.members(), 2);
    const auto p_pow = power_chain(p, mixed.members(), 2);
    double worst_q = 0.0, worst_p = 0.0;
    for (int m = 0; m <= n; ++m) {
      const double expected = m + 0.5;
      worst_q = std::max(worst_q,
                         std::abs(inner(mixed.member(m), q_pow[2][m]) - Complex(expected)));
      worst_p = std::max(worst_p,
                         std::abs(inner(mixed.member(m), p_pow[2][m]) - Complex(expected)));
    }
    defect_report("mixed-q2-diag", "Eq. 4.12", Complex(n + 0.5),
                  inner(mixed.member(n), q_pow[2][n]), n + 0.5, worst_q, 1e-9);
    defect_report("mixed-p2-diag", "Eq. 4.13", Complex(n + 0.5),
                  inner(mixed.member(n), p_pow[2][n]), n + 0.5, worst_p, 1e-9);
  }

  return reports;
}

std::vector<CheckReport> translated_dark_suite(int n, const ModeMixParams& params,
                                               const DisplacementParams& d, CutoffSpec cutoff,
                                               const OperatorMatrix* displacement) {
  if (n < 0) throw std::invalid_argument("translated_dark_suite: negative n");
  const int needed = displacement_adequate_cutoff(n, d.alpha);
  if (std::min(cutoff.n_b_max, cutoff.n_c_max) < needed) {
    throw NumericError("translated_dark_suite: cutoff below the displacement adequacy "
                       "rule (needs " + std::to_string(needed) + " per mode)");
  }
  if (displacement != nullptr && !(displacement->cutoff() == cutoff)) {
    throw std::invalid_argument("translated_dark_suite: prebuilt displacement cutoff mismatch");
  }

  const std::vector<std::pair<std::string, double>> params_list = {
      {"n", double(n)}, {"r", params.r}, {"theta", params.theta},
      {"alpha_re", d.alpha.real()}, {"alpha_im", d.alpha.imag()},
      {"cutoff_b", double(cutoff.n_b_max)}, {"cutoff_c", double(cutoff.n_c_max)}};

  const BasisFamily dark = dark_family(n + 1, params, cutoff);
  OperatorMatrix shift = displacement != nullptr
                             ? *displacement
                             : collective_displacement(d, params, cutoff);
  std::vector<StateVector> members;
  members.reserve(n + 1);
  for (const auto& x : dark.members()) members.push_back(apply(shift, x));

  const auto [a, a_dag] = collective_mode_ops(params, cutoff);
  const auto [q, p] = quadratures(params, cutoff);

  std::vector<CheckReport> reports;
  Stopwatch watch;
  auto defect_report = [&](const std::string& id, const char* anchor, Complex closed,
                           Complex numeric, double abs_error, double tol) {
    CheckReport r = make_defect_check(id, anchor, params_list, closed, numeric,
                                      real_reference(closed), abs_error, tol);
    r.wall_time = watch.lap();
    reports.push_back(std::move(r));
  };

  defect_report("tdark-gauge", "Eq. 4.18", Complex(0.0), Complex(0.0),
                gauge_defect(BasisFamily(members)), 1e-9);

  // <a^k> = alpha^k and <a†^k> = alpha*^k, diagonal in the family.
  {
    const auto a_pow = power_chain(a, members, 4);
    for (int k = 1; k <= 4; ++k) {
      const Complex expected = ipow(d.alpha, k);
      const CMatrix g = gram(members, a_pow[k]);
      const std::vector<Complex> diag(members.size(), expected);
      defect_report("tdark-a-moment-k" + std::to_string(k), "Eq. 4.19", expected,
                    g(n, n), diag_deviation(g, diag), 1e-8);
    }
    const auto adag_pow = power_chain(a_dag, members, 2);
    for (int k = 1; k <= 2; ++k) {
      const Complex expected = ipow(std::conj(d.alpha), k);
      const CMatrix g = gram(members, adag_pow[k]);
      const std::vector<Complex> diag(members.size(), expected);
      defect_report("tdark-adag-moment-k" + std::to_string(k), "Eq. 4.19", expected,
                    g(n, n), diag_deviation(g, diag), 1e-8);
    }
  }

  // Number moments <a†a> = |alpha|^2, <(a†a)^2> = |alpha|^2 (|alpha|^2 + 1).
  {
    std::vector<StateVector> na;
    na.reserve(members.size());
    for (const auto& x : members) na.push_back(apply(a_dag, apply(a, x)));
    const CMatrix g1 = gram(members, na);
    const Complex expected1(std::norm(d.alpha));
    defect_report("tdark-number", "Eq. 4.20", expected1, g1(n, n),
                  diag_deviation(g1, std::vector<Complex>(members.size(), expected1)), 1e-8);

    std::vector<StateVector> nna;
    nna.reserve(members.size());
    for (const auto& x : na) nna.push_back(apply(a_dag, apply(a, x)));
    const CMatrix g2 = gram(members, nna);
    const Complex expected2(std::norm(d.alpha) * (std::norm(d.alpha) + 1.0));
    defect_report("tdark-number-sq", "Eq. 4.20", expected2, g2(n, n),
                  diag_deviation(g2, std::vector<Complex>(members.size(), expected2)), 1e-8);
  }

  // Gaussian quadrature moments about qbar = (alpha* + alpha)/sqrt(2) and
  // pbar = i (alpha* - alpha)/sqrt(2); both centers are real for any alpha.
  {
    const Complex qbar_c = (std::conj(d.alpha) + d.alpha) / std::sqrt(2.0);
    const Complex pbar_c = Complex(0.0, 1.0) * (std::conj(d.alpha) - d.alpha) / std::sqrt(2.0);
    if (std::abs(qbar_c.imag()) > 1e-14 || std::abs(pbar_c.imag()) > 1e-14) {
      throw NumericError("translated_dark_suite: quadrature centers acquired an "
                         "imaginary part");
    }
    const MomentTable fq = moment_table(qbar_c.real(), 6);
    const MomentTable fp = moment_table(pbar_c.real(), 6);
    const auto q_pow = power_chain(q, members, 6);
    const auto p_pow = power_chain(p, members, 6);
    for (int k = 1; k <= 6; ++k) {
      const CMatrix gq = gram(members, q_pow[k]);
      const CMatrix gp = gram(members, p_pow[k]);
      defect_report("tdark-q-moment-k" + std::to_string(k), "Eq. 4.21",
                    Complex(fq.values[k]), gq(n, n),
                    diag_deviation(gq, std::vector<Complex>(members.size(),
                                                            Complex(fq.values[k]))),
                    1e-8);
      defect_report("tdark-p-moment-k" + std::to_string(k), "Eq. 4.21",
                    Complex(fp.values[k]), gp(n, n),
                    diag_deviation(gp, std::vector<Complex>(members.size(),
                                                            Complex(fp.values[k]))),
                    1e-8);
    }
  }

  // Displacement leaves the fluctuations at the minimum-uncertainty values.
  {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    double worst_q = 0.0, worst_p = 0.0, worst_prod = 0.0;
    double last_dq = 0.0, last_dp = 0.0;
    for (const auto& x : members) {
      const double dq = std::sqrt(fluctuation(q, x));
      const double dp = std::sqrt(fluctuation(p, x));
      worst_q = std::max(worst_q, std::abs(dq - inv_sqrt2));
      worst_p = std::max(worst_p, std::abs(dp - inv_sqrt2));
      worst_prod = std::max(worst_prod, std::abs(dq * dp - 0.5));
      last_dq = dq;
      last_dp = dp;
    }
    defect_report("tdark-q-fluct", "Eq. 4.22", Complex(inv_sqrt2), Complex(last_dq),
                  worst_q, 1e-8);
    defect_report("tdark-p-fluct", "Eq. 4.22", Complex(inv_sqrt2), Complex(last_dp),
                  worst_p, 1e-8);
    defect_report("tdark-uncertainty-product", "Eq. 4.22", Complex(0.5),
                  Complex(last_dq * last_dp), worst_prod, 1e-8);
  }

  return reports;
}

}  // namespace focklab
