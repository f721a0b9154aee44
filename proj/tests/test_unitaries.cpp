#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "focklab/fock.hpp"
#include "focklab/unitaries.hpp"
#include "oracle_helpers.hpp"

using namespace focklab;

namespace {

constexpr double kPi = std::numbers::pi;

ModeMixParams params_for_tau(Complex tau) {
  return ModeMixParams{std::atan(std::abs(tau)),
                       tau == Complex(0.0) ? 0.0 : -std::arg(tau)};
}

StateVector ket(int nb, int nc, CutoffSpec cutoff) {
  return StateVector::basis_state({nb, nc}, cutoff);
}

OperatorMatrix mix_generator(const ModeMixParams& p, CutoffSpec cutoff) {
  const Complex xi = p.xi();
  return xi * (creator(Mode::b, cutoff) * annihilator(Mode::c, cutoff)) -
         std::conj(xi) * (annihilator(Mode::b, cutoff) * creator(Mode::c, cutoff));
}

}  // namespace

TEST_CASE("mode-mix parameters") {
  const ModeMixParams p{0.7, 0.9};
  CHECK(std::abs(std::norm(p.tau()) - std::tan(0.7) * std::tan(0.7)) <= 1e-12);
  CHECK(std::abs(p.xi() - 0.7 * std::exp(Complex(0, -0.9))) <= 1e-15);
  CHECK_THROWS_AS((ModeMixParams{kPi / 2.0, 0.0}).tau(), std::domain_error);
  CHECK_THROWS_AS((ModeMixParams{3.0 * kPi / 2.0, 0.2}).tau(), std::domain_error);
}

TEST_CASE("matrix exponential") {
  const CutoffSpec cutoff{4, 4};

  SUBCASE("of zero is the identity") {
    const OperatorMatrix zero(cutoff);
    CHECK((expm(zero) - OperatorMatrix::identity(cutoff)).max_abs() == 0.0);
  }

  SUBCASE("of i pi c†c is the parity diagonal") {
    const OperatorMatrix gen = Complex(0.0, kPi) * number_op(Mode::c, cutoff);
    CHECK((expm(gen) - parity_c(cutoff)).max_abs() <= 1e-13);
  }

  SUBCASE("inverse pairing on the interior") {
    const ModeMixParams p{0.7, 0.3};
    const OperatorMatrix g = mix_generator(p, cutoff);
    const OperatorMatrix round = expm(g) * expm(Complex(-1.0) * g);
    const OperatorMatrix interior = interior_projector(cutoff, {1});
    CHECK(projected_max_abs(round - OperatorMatrix::identity(cutoff), interior) <= 1e-10);
  }

  SUBCASE("agrees with a plain Taylor sum on random generators") {
    // the unscaled series oracle is only trustworthy at modest norms
    oracle::Rng rng(17);
    const CutoffSpec tiny{2, 2};
    for (double scale : {0.05, 0.3, 0.6}) {
      const CMatrix g = oracle::random_anti_hermitian(tiny.dim(), scale, rng);
      const CMatrix reference = oracle::expm_taylor(g);
      const OperatorMatrix computed = expm(OperatorMatrix(tiny, g));
      CHECK((computed.entries() - reference).cwiseAbs().maxCoeff() <= 1e-13);
    }
  }

  SUBCASE("scaling cap raises a numeric error") {
    const OperatorMatrix gen =
        Complex(40.0) * mix_generator(ModeMixParams{1.0, 0.0}, cutoff);
    CHECK_THROWS_AS(expm(gen, ExpmOptions{1e-13, 0}), NumericError);
  }

  SUBCASE("tolerance below machine epsilon is rejected") {
    CHECK_THROWS_AS(expm(OperatorMatrix(cutoff), ExpmOptions{1e-18, 32}),
                    std::invalid_argument);
  }
}

TEST_CASE("mode mixing unitary") {
  const CutoffSpec cutoff{5, 5};

  SUBCASE("fixes the vacuum") {
    const OperatorMatrix u = mode_mix_op(ModeMixParams{0.9, 0.4}, cutoff);
    CHECK((apply(u, ket(0, 0, cutoff)).amplitudes() - ket(0, 0, cutoff).amplitudes())
              .norm() <= 1e-14);
  }

  SUBCASE("r = 0 is the identity") {
    const OperatorMatrix u = mode_mix_op(ModeMixParams{0.0, 1.3}, cutoff);
    CHECK((u - OperatorMatrix::identity(cutoff)).max_abs() <= 1e-15);
  }

  SUBCASE("single-excitation image matches the closed form") {
    const ModeMixParams p{0.6, 1.1};
    const Complex tau = p.tau();
    const OperatorMatrix u = mode_mix_op(p, cutoff);
    const StateVector image = apply(u, ket(0, 1, cutoff));
    StateVector expected(cutoff);
    const double scale = 1.0 / std::sqrt(1.0 + std::norm(tau));
    expected.set({1, 0}, tau * scale);
    expected.set({0, 1}, scale);
    CHECK((image.amplitudes() - expected.amplitudes()).norm() <= 1e-13);
  }

  SUBCASE("commutes exactly with the total number operator") {
    const OperatorMatrix u = mode_mix_op(ModeMixParams{0.8, 0.2}, cutoff);
    const OperatorMatrix total = number_op(Mode::b, cutoff) + number_op(Mode::c, cutoff);
    CHECK(commutator(u, total).max_abs() == 0.0);
  }

  SUBCASE("unitary at any cutoff") {
    const OperatorMatrix u = mode_mix_op(ModeMixParams{1.2, 2.0}, cutoff);
    CHECK(unitarity_defect(u, OperatorMatrix::identity(cutoff)) <= 1e-13);
  }
}

TEST_CASE("mixed state closed form") {
  const CutoffSpec cutoff{8, 8};

  SUBCASE("n = 0 is the vacuum") {
    const StateVector s = mixed_fock_state(0, ModeMixParams{0.7, 0.5}, cutoff);
    CHECK(std::abs(s.at({0, 0}) - Complex(1.0)) == 0.0);
    CHECK(s.norm() == doctest::Approx(1.0));
  }

  SUBCASE("n = 1 at tau = 1") {
    const StateVector s = mixed_fock_state(1, params_for_tau(Complex(1.0)), cutoff);
    CHECK(std::abs(s.at({1, 0}) - Complex(1.0 / std::sqrt(2.0))) <= 1e-15);
    CHECK(std::abs(s.at({0, 1}) - Complex(1.0 / std::sqrt(2.0))) <= 1e-15);
  }

  SUBCASE("coefficients follow the binomial form") {
    const ModeMixParams p{0.9, -0.7};
    const Complex tau = p.tau();
    const int n = 5;
    const StateVector s = mixed_fock_state(n, p, cutoff);
    for (int k = 0; k <= n; ++k) {
      Complex expected = std::sqrt(double(oracle::binomial_u64(n, k))) /
                         std::pow(1.0 + std::norm(tau), 0.5 * n);
      for (int i = 0; i < n - k; ++i) expected *= tau;
      CHECK(std::abs(s.at({n - k, k}) - expected) <= 1e-14);
    }
  }

  SUBCASE("matches the exponential route for n <= 6") {
    for (double r : {0.2, 0.5, kPi / 4.0, 1.0}) {
      for (double theta : {0.0, kPi / 4.0, kPi / 2.0, kPi}) {
        const ModeMixParams p{r, theta};
        const OperatorMatrix u = mode_mix_op(p, cutoff);
        for (int n = 0; n <= 6; ++n) {
          const StateVector routed = apply(u, ket(0, n, cutoff));
          const StateVector closed = mixed_fock_state(n, p, cutoff);
          CHECK((routed.amplitudes() - closed.amplitudes()).norm() <= 1e-10);
        }
      }
    }
  }

  SUBCASE("rejects n beyond the cutoff") {
    CHECK_THROWS_AS(mixed_fock_state(9, ModeMixParams{0.3, 0.0}, cutoff),
                    std::invalid_argument);
  }
}

TEST_CASE("time-reversed family") {
  const CutoffSpec cutoff{8, 8};

  SUBCASE("n = 0 is the vacuum") {
    const StateVector s = dark_fock_state(0, ModeMixParams{0.7, 0.5}, cutoff);
    CHECK(std::abs(s.at({0, 0}) - Complex(1.0)) == 0.0);
  }

  SUBCASE("n = 1 at tau = 1 up to a global phase") {
    const StateVector s = dark_fock_state(1, params_for_tau(Complex(1.0)), cutoff);
    StateVector cited(cutoff);
    cited.set({1, 0}, -1.0 / std::sqrt(2.0));
    cited.set({0, 1}, 1.0 / std::sqrt(2.0));
    CHECK(global_phase_distance(s, cited) <= 1e-12);
  }

  SUBCASE("orthonormal family at complex tau") {
    const ModeMixParams p = params_for_tau(Complex(0.4, -0.3));
    CHECK(std::abs(p.tau() - Complex(0.4, -0.3)) <= 1e-14);
    CHECK(gauge_defect(dark_family(6, p, cutoff)) <= 1e-10);
  }

  SUBCASE("equals conjugate-then-rotate, including phase") {
    const ModeMixParams p{0.6, 1.1};
    for (int n = 0; n <= 4; ++n) {
      const StateVector direct = dark_fock_state(n, p, cutoff);
      const StateVector routed = time_reverse(mixed_fock_state(n, p, cutoff));
      CHECK((direct.amplitudes() - routed.amplitudes()).norm() <= 1e-12);
    }
  }

  SUBCASE("annihilated by the collective mode") {
    const ModeMixParams p{1.0, 2.2};
    const auto [a, a_dag] = collective_mode_ops(p, cutoff);
    for (int n = 0; n <= 5; ++n) {
      CHECK(apply(a, dark_fock_state(n, p, cutoff)).norm() <= 1e-14);
    }
  }
}

TEST_CASE("mode-c displacement") {
  SUBCASE("alpha = 0 is the identity") {
    const CutoffSpec cutoff{0, 10};
    CHECK((displacement_c({Complex(0.0)}, cutoff) - OperatorMatrix::identity(cutoff))
              .max_abs() == 0.0);
  }

  SUBCASE("vacuum overlap against a series oracle") {
    const CutoffSpec cutoff{0, 30};
    const DisplacementParams d{Complex(0.4, -0.3)};
    const OperatorMatrix disp = displacement_c(d, cutoff);
    const OperatorMatrix c = annihilator(Mode::c, cutoff);
    const CMatrix gen = -d.alpha * adjoint(c).entries() + std::conj(d.alpha) * c.entries();
    const CMatrix by_series = oracle::expm_taylor(gen);
    CHECK(std::abs(disp.entries()(0, 0) - by_series(0, 0)) <= 1e-13);
    CHECK(std::abs(disp.entries()(0, 0)) ==
          doctest::Approx(std::exp(-0.5 * std::norm(d.alpha))).epsilon(1e-12));
  }

  SUBCASE("displaced family stays orthonormal at adequate cutoff") {
    const CutoffSpec cutoff{0, 40};
    const OperatorMatrix disp = displacement_c({Complex(0.5)}, cutoff);
    std::vector<StateVector> displaced;
    for (int n = 0; n <= 5; ++n) displaced.push_back(apply(disp, ket(0, n, cutoff)));
    CHECK(gauge_defect(BasisFamily(displaced)) <= 1e-9);
  }
}

TEST_CASE("collective mode") {
  const CutoffSpec cutoff{10, 10};

  SUBCASE("tau = 0 reduces to mode c") {
    const auto [a, a_dag] = collective_mode_ops(ModeMixParams{0.0, 0.0}, cutoff);
    CHECK((a - annihilator(Mode::c, cutoff)).max_abs() == 0.0);
  }

  SUBCASE("canonical commutator on the interior") {
    const auto [a, a_dag] = collective_mode_ops(ModeMixParams{0.8, 0.5}, cutoff);
    const OperatorMatrix defect =
        commutator(a, a_dag) - OperatorMatrix::identity(cutoff);
    CHECK(projected_max_abs(defect, interior_projector(cutoff, {1})) <= 1e-12);
  }

  SUBCASE("conjugating mode c by the mixer gives the collective mode") {
    const ModeMixParams p{0.7, 0.9};
    const auto [a, a_dag] = collective_mode_ops(p, cutoff);
    const OperatorMatrix u = mode_mix_op(p, cutoff);
    const OperatorMatrix conjugated = u * annihilator(Mode::c, cutoff) * adjoint(u);
    // exact only where whole total-excitation shells survive the truncation
    const OperatorMatrix shell = shell_projector(cutoff, {2});
    CHECK(projected_max_abs(conjugated - a, shell) <= 1e-12);
  }
}

TEST_CASE("quadratures") {
  const CutoffSpec cutoff{9, 9};
  const ModeMixParams p{0.5, 0.3};
  const auto [q, p_op] = quadratures(p, cutoff);

  CHECK(std::abs(inner(ket(0, 0, cutoff), apply(q, ket(0, 0, cutoff)))) == 0.0);
  CHECK(fluctuation(q, ket(0, 0, cutoff)) == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("canonical pair on the interior") {
    const OperatorMatrix defect =
        commutator(q, p_op) - Complex(0.0, 1.0) * OperatorMatrix::identity(cutoff);
    CHECK(projected_max_abs(defect, interior_projector(cutoff, {1})) <= 1e-11);
  }

  SUBCASE("both self-adjoint") {
    CHECK((q - adjoint(q)).max_abs() <= 1e-15);
    CHECK((p_op - adjoint(p_op)).max_abs() <= 1e-15);
  }
}

TEST_CASE("quantum time reversal") {
  const CutoffSpec cutoff{16, 16};
  const OperatorMatrix rot = quantum_time_reversal(cutoff);
  const OperatorMatrix rot_inv = adjoint(rot);

  SUBCASE("fixes the vacuum") {
    CHECK((apply(rot, ket(0, 0, cutoff)).amplitudes() - ket(0, 0, cutoff).amplitudes())
              .norm() <= 1e-13);
  }

  SUBCASE("conjugation table on complete shells") {
    const OperatorMatrix shell = shell_projector(cutoff, {2});
    const OperatorMatrix b = annihilator(Mode::b, cutoff);
    const OperatorMatrix c = annihilator(Mode::c, cutoff);
    CHECK(projected_max_abs(rot * adjoint(b) * rot_inv + adjoint(c), shell) <= 1e-10);
    CHECK(projected_max_abs(rot * b * rot_inv + c, shell) <= 1e-10);
    CHECK(projected_max_abs(rot * adjoint(c) * rot_inv - adjoint(b), shell) <= 1e-10);
    CHECK(projected_max_abs(rot * c * rot_inv - b, shell) <= 1e-10);
  }

  SUBCASE("unitary at any cutoff") {
    CHECK(unitarity_defect(rot, OperatorMatrix::identity(cutoff)) <= 1e-12);
  }
}

TEST_CASE("amplitude conjugation") {
  const CutoffSpec cutoff{3, 3};

  SUBCASE("leaves real states alone") {
    const StateVector x = ket(1, 2, cutoff);
    CHECK((conjugate_amplitudes(x).amplitudes() - x.amplitudes()).norm() == 0.0);
  }

  SUBCASE("flips a pure imaginary amplitude") {
    StateVector x(cutoff);
    x.set({0, 0}, Complex(0.0, 1.0));
    CHECK(conjugate_amplitudes(x).at({0, 0}) == Complex(0.0, -1.0));
  }

  SUBCASE("anti-unitary and involutive on random states") {
    oracle::Rng rng(41);
    for (int trial = 0; trial < 20; ++trial) {
      const StateVector x = oracle::random_state(cutoff, rng, false);
      const StateVector y = oracle::random_state(cutoff, rng, false);
      CHECK(std::abs(inner(conjugate_amplitudes(x), conjugate_amplitudes(y)) -
                     std::conj(inner(x, y))) <= 1e-14);
      CHECK((conjugate_amplitudes(conjugate_amplitudes(x)).amplitudes() - x.amplitudes())
                .norm() == 0.0);
    }
  }
}

TEST_CASE("full time reversal applied twice") {
  const CutoffSpec cutoff{10, 10};
  for (double r : {0.2, 0.9}) {
    for (double theta : {0.4, kPi / 2.0}) {
      const ModeMixParams p{r, theta};
      const StateVector phi = mixed_fock_state(3, p, cutoff);
      const StateVector twice = time_reverse(time_reverse(phi));
      CHECK(global_phase_distance(phi, twice) <= 1e-9);
    }
  }
}

TEST_CASE("collective displacement") {
  SUBCASE("alpha = 0 is the identity") {
    const CutoffSpec cutoff{6, 6};
    const OperatorMatrix disp =
        collective_displacement({Complex(0.0)}, ModeMixParams{0.4, 0.2}, cutoff);
    CHECK((disp - OperatorMatrix::identity(cutoff)).max_abs() == 0.0);
  }

  SUBCASE("tau = 0 reduces to a mode-c displacement of the opposite sign convention") {
    const CutoffSpec cutoff{6, 20};
    const Complex alpha(0.35, 0.15);
    const OperatorMatrix via_collective =
        collective_displacement({alpha}, ModeMixParams{0.0, 0.0}, cutoff);
    const OperatorMatrix via_mode_c = displacement_c({-alpha}, cutoff);
    CHECK((via_collective - via_mode_c).max_abs() <= 1e-12);
  }

  SUBCASE("factorizes into commuting per-mode exponentials") {
    const CutoffSpec cutoff{12, 12};
    const ModeMixParams p{0.8, 1.4};
    const Complex alpha(0.3, -0.2);
    const Complex tau = p.tau();
    const double scale = std::sqrt(1.0 + std::norm(tau));
    const OperatorMatrix b = annihilator(Mode::b, cutoff);
    const OperatorMatrix c = annihilator(Mode::c, cutoff);
    const OperatorMatrix gen_b =
        (alpha * tau / scale) * adjoint(b) - (std::conj(alpha * tau) / scale) * b;
    const OperatorMatrix gen_c =
        (alpha / scale) * adjoint(c) - (std::conj(alpha) / scale) * c;
    const OperatorMatrix product = expm(gen_b) * expm(gen_c);
    const OperatorMatrix direct = collective_displacement({alpha}, p, cutoff);
    CHECK((product - direct).max_abs() <= 1e-12);
  }

  SUBCASE("translated dark state is a collective coherent state") {
    const CutoffSpec cutoff{14, 14};
    const ModeMixParams p{0.9, 0.6};
    const Complex alpha(0.4, 0.2);
    const StateVector shifted =
        apply(collective_displacement({alpha}, p, cutoff), dark_fock_state(1, p, cutoff));
    const auto [a, a_dag] = collective_mode_ops(p, cutoff);
    CHECK(std::abs(inner(shifted, apply(a, shifted)) - alpha) <= 1e-10);
  }
}

TEST_CASE("parity operator") {
  const CutoffSpec cutoff{2, 5};
  const OperatorMatrix parity = parity_c(cutoff);

  SUBCASE("exact involution") {
    CHECK(((parity * parity) - OperatorMatrix::identity(cutoff)).max_abs() == 0.0);
  }
  SUBCASE("diagonal signs follow the c-mode occupation") {
    for (int nc = 0; nc <= 5; ++nc) {
      const int i = index_of({1, nc}, cutoff);
      CHECK(parity.entries()(i, i) == Complex(nc % 2 == 0 ? 1.0 : -1.0));
    }
  }
}

TEST_CASE("displacement adequacy rule") {
  CHECK(displacement_adequate_cutoff(0, Complex(0.0)) == 8);
  CHECK(displacement_adequate_cutoff(3, Complex(0.5)) == 15);
  CHECK(displacement_adequate_cutoff(4, Complex(0.6)) == 18);
}
