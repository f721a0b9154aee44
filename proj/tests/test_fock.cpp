#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "focklab/fock.hpp"
#include "focklab/observables.hpp"
#include "focklab/unitaries.hpp"
#include "oracle_helpers.hpp"

using namespace focklab;

namespace {

const CutoffSpec kSmall{2, 3};

StateVector ket(int nb, int nc, CutoffSpec cutoff) {
  return StateVector::basis_state({nb, nc}, cutoff);
}

}  // namespace

TEST_CASE("basis dimension") {
  CHECK(basis_dim({0, 0}) == 1);
  CHECK(basis_dim({2, 3}) == 12);
  CHECK(basis_dim({40, 40}) == 1681);
}

TEST_CASE("row-major addressing") {
  CHECK(index_of({0, 0}, kSmall) == 0);
  CHECK(index_of({1, 0}, kSmall) == 4);
  CHECK(index_of({2, 3}, kSmall) == 11);

  SUBCASE("bijective over the basis") {
    for (int ordinal = 0; ordinal < kSmall.dim(); ++ordinal) {
      CHECK(index_of(index_unpack(ordinal, kSmall), kSmall) == ordinal);
    }
  }
  SUBCASE("out of range throws") {
    CHECK_THROWS_AS(index_of({3, 0}, kSmall), std::out_of_range);
    CHECK_THROWS_AS(index_of({0, 4}, kSmall), std::out_of_range);
    CHECK_THROWS_AS(index_of({-1, 0}, kSmall), std::out_of_range);
    CHECK_THROWS_AS(index_unpack(12, kSmall), std::out_of_range);
  }
}

TEST_CASE("ladder operators") {
  const CutoffSpec cutoff{4, 4};
  const OperatorMatrix c = annihilator(Mode::c, cutoff);

  CHECK(inner(ket(0, 0, cutoff), apply(c, ket(0, 1, cutoff))).real() == doctest::Approx(1.0));
  CHECK(inner(ket(0, 2, cutoff), apply(c, ket(0, 3, cutoff))).real() ==
        doctest::Approx(std::sqrt(3.0)));

  SUBCASE("commutator is the identity on the interior") {
    for (Mode mode : {Mode::b, Mode::c}) {
      const OperatorMatrix comm =
          commutator(annihilator(mode, cutoff), creator(mode, cutoff));
      const OperatorMatrix defect = comm - OperatorMatrix::identity(cutoff);
      const OperatorMatrix interior = interior_projector(cutoff, {1});
      CHECK(projected_max_abs(defect, interior) <= 1e-12);
      // the full matrix carries the truncation artifact on the top row
      CHECK(defect.max_abs() > 1.0);
    }
  }

  SUBCASE("cross-mode commutators vanish exactly") {
    const OperatorMatrix b = annihilator(Mode::b, cutoff);
    CHECK(commutator(b, c).max_abs() == 0.0);
    CHECK(commutator(b, creator(Mode::c, cutoff)).max_abs() == 0.0);
    CHECK(commutator(creator(Mode::b, cutoff), creator(Mode::c, cutoff)).max_abs() == 0.0);
  }
}

TEST_CASE("number operator") {
  const CutoffSpec cutoff{3, 3};
  const OperatorMatrix num_c = number_op(Mode::c, cutoff);

  CHECK(inner(ket(0, 1, cutoff), apply(num_c, ket(0, 1, cutoff))).real() ==
        doctest::Approx(1.0));

  SUBCASE("matches creator times annihilator with no boundary defect") {
    const OperatorMatrix product = creator(Mode::c, cutoff) * annihilator(Mode::c, cutoff);
    // sqrt(n)*sqrt(n) rounds within an ulp of n; unlike c c† there is no O(n)
    // truncation artifact at the top of the space
    CHECK((num_c - product).max_abs() <= 1e-14);
    const int top = index_of({0, cutoff.n_c_max}, cutoff);
    CHECK(std::abs(product.entries()(top, top) - Complex(cutoff.n_c_max)) <= 1e-14);
  }

  SUBCASE("b eigenvalues span 0..n_b_max with multiplicity n_c_max+1") {
    const OperatorMatrix num_b = number_op(Mode::b, cutoff);
    std::vector<int> counts(cutoff.n_b_max + 1, 0);
    for (int i = 0; i < cutoff.dim(); ++i) {
      counts[int(std::real(num_b.entries()(i, i)))]++;
    }
    for (int count : counts) CHECK(count == cutoff.n_c_max + 1);
  }
}

TEST_CASE("inner product") {
  const CutoffSpec cutoff{2, 2};
  CHECK(inner(ket(0, 0, cutoff), ket(0, 0, cutoff)) == Complex(1.0, 0.0));
  CHECK(inner(ket(1, 0, cutoff), ket(0, 1, cutoff)) == Complex(0.0, 0.0));

  SUBCASE("conjugate symmetry on random states") {
    oracle::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const StateVector x = oracle::random_state(cutoff, rng, false);
      const StateVector y = oracle::random_state(cutoff, rng, false);
      CHECK(std::abs(inner(x, y) - std::conj(inner(y, x))) <= 1e-15);
    }
  }

  SUBCASE("conjugate-linear in the first argument") {
    oracle::Rng rng(8);
    const StateVector x = oracle::random_state(cutoff, rng, false);
    const StateVector y = oracle::random_state(cutoff, rng, false);
    const Complex w(0.3, -0.8);
    const StateVector wx(cutoff, w * x.amplitudes());
    CHECK(std::abs(inner(wx, y) - std::conj(w) * inner(x, y)) <= 1e-14);
  }

  SUBCASE("distinct mixed states are orthogonal, by coefficient sums") {
    // tau = 1: evaluate the closed-form coefficients by hand and sum products.
    const CutoffSpec wide{6, 6};
    const ModeMixParams p{std::atan(1.0), 0.0};
    const StateVector one = mixed_fock_state(1, p, wide);
    const StateVector two = mixed_fock_state(2, p, wide);
    Complex by_sum(0.0);
    for (int k1 = 0; k1 <= 1; ++k1) {
      for (int k2 = 0; k2 <= 2; ++k2) {
        const double c1 = std::sqrt(double(oracle::binomial_u64(1, k1))) / std::sqrt(2.0);
        const double c2 = std::sqrt(double(oracle::binomial_u64(2, k2))) / 2.0;
        if (1 - k1 == 2 - k2 && k1 == k2) by_sum += c1 * c2;
      }
    }
    CHECK(std::abs(by_sum) == 0.0);
    CHECK(std::abs(inner(one, two)) <= 1e-15);
  }

  SUBCASE("cutoff mismatch throws") {
    CHECK_THROWS_AS(inner(ket(0, 0, {1, 1}), ket(0, 0, {2, 2})), std::invalid_argument);
  }
}

TEST_CASE("operator plumbing") {
  const CutoffSpec cutoff{3, 3};
  const OperatorMatrix b = annihilator(Mode::b, cutoff);
  const OperatorMatrix c = annihilator(Mode::c, cutoff);

  CHECK(commutator(c, c).max_abs() == 0.0);
  CHECK(commutator(b, creator(Mode::c, cutoff)).max_abs() == 0.0);

  oracle::Rng rng(11);
  const OperatorMatrix a(cutoff, oracle::random_anti_hermitian(cutoff.dim(), 1.0, rng));
  CHECK((adjoint(adjoint(a)) - a).max_abs() == 0.0);

  CHECK_THROWS_AS(compose(a, OperatorMatrix::identity({1, 1})), std::invalid_argument);
  CHECK_THROWS_AS(apply(a, ket(0, 0, {1, 1})), std::invalid_argument);
}

TEST_CASE("interior projector") {
  SUBCASE("margin zero is the identity") {
    const CutoffSpec cutoff{3, 2};
    CHECK((interior_projector(cutoff, {0}) - OperatorMatrix::identity(cutoff)).max_abs() ==
          0.0);
  }
  SUBCASE("tight margin keeps only the vacuum") {
    const OperatorMatrix proj = interior_projector({1, 1}, {1});
    CHECK(proj.entries().trace().real() == doctest::Approx(1.0));
    CHECK(proj.entries()(0, 0) == Complex(1.0));
  }
  SUBCASE("trace counts the retained box") {
    const CutoffSpec cutoff{5, 4};
    const OperatorMatrix proj = interior_projector(cutoff, {2});
    CHECK(proj.entries().trace().real() == doctest::Approx((5 - 2 + 1) * (4 - 2 + 1)));
  }
  SUBCASE("margin beyond the cutoff throws") {
    CHECK_THROWS_AS(interior_projector({2, 5}, {3}), std::invalid_argument);
    CHECK_THROWS_AS(interior_projector({2, 2}, {-1}), std::invalid_argument);
  }
  SUBCASE("shell projector keeps complete shells") {
    const CutoffSpec cutoff{4, 4};
    const OperatorMatrix proj = shell_projector(cutoff, {1});
    // shells 0..3 hold 1+2+3+4 states
    CHECK(proj.entries().trace().real() == doctest::Approx(10.0));
  }
}

TEST_CASE("family gauge defect") {
  const CutoffSpec cutoff{8, 8};

  SUBCASE("single vacuum member") {
    const BasisFamily family({ket(0, 0, cutoff)});
    CHECK(gauge_defect(family) == 0.0);
  }
  SUBCASE("mixed family at complex tau") {
    // tau = 0.5 + 0.2i
    const ModeMixParams p{std::atan(std::hypot(0.5, 0.2)), std::atan2(-0.2, 0.5)};
    CHECK(std::abs(p.tau() - Complex(0.5, 0.2)) <= 1e-14);
    CHECK(gauge_defect(mixed_family(6, p, cutoff)) <= 1e-10);
  }
  SUBCASE("duplicated member costs a full unit") {
    const BasisFamily family({ket(1, 0, cutoff), ket(1, 0, cutoff)});
    CHECK(gauge_defect(family) == doctest::Approx(1.0));
  }
  SUBCASE("empty family rejected") {
    CHECK_THROWS_AS(BasisFamily({}), std::invalid_argument);
  }
}

TEST_CASE("projector defect") {
  const CutoffSpec cutoff{8, 8};
  const ModeMixParams p{0.6, 0.9};
  const BasisFamily family = mixed_family(5, p, cutoff);

  SUBCASE("family member lies in the span") {
    CHECK(projector_defect(family, family.member(2)) <= 1e-12);
  }
  SUBCASE("orthogonal unit probe loses everything") {
    // |5,0> sits in total-excitation shell 5, beyond the family's 0..4
    CHECK(projector_defect(family, ket(5, 0, cutoff)) == doctest::Approx(1.0));
  }
  SUBCASE("ladder probe reproduces the closed-form defect") {
    const int n = 2;
    const OperatorMatrix mixer =
        creator(Mode::b, cutoff) * annihilator(Mode::c, cutoff) +
        annihilator(Mode::b, cutoff) * creator(Mode::c, cutoff);
    const StateVector probe = apply(mixer, mixed_fock_state(n, p, cutoff));
    const Complex tau = p.tau();
    const double s = 2.0 * tau.real() / (1.0 + std::norm(tau));
    CHECK(projector_defect(family, probe) ==
          doctest::Approx(n * (1.0 - s * s)).epsilon(1e-9));
  }
  SUBCASE("never below the Bessel floor") {
    oracle::Rng rng(23);
    for (int trial = 0; trial < 50; ++trial) {
      const StateVector probe = oracle::random_state(cutoff, rng);
      CHECK(projector_defect(family, probe) >= -1e-12);
    }
  }
}

TEST_CASE("fluctuation") {
  const CutoffSpec cutoff{6, 6};

  SUBCASE("number eigenstate has none") {
    CHECK(fluctuation(number_op(Mode::c, cutoff), ket(0, 2, cutoff)) == 0.0);
  }
  SUBCASE("vacuum quadrature variance is one half") {
    const auto [q, p_op] = quadratures(ModeMixParams{0.4, 0.7}, cutoff);
    CHECK(fluctuation(q, ket(0, 0, cutoff)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fluctuation(p_op, ket(0, 0, cutoff)) == doctest::Approx(0.5).epsilon(1e-12));
  }
  SUBCASE("collective number on a translated dark state") {
    const ModeMixParams p{0.5, 1.1};
    const DisplacementParams d{Complex(0.4, 0.1)};
    const CutoffSpec wide{14, 14};
    const StateVector dark = dark_fock_state(2, p, wide);
    const StateVector shifted = apply(collective_displacement(d, p, wide), dark);
    const auto [a, a_dag] = collective_mode_ops(p, wide);
    CHECK(fluctuation(a_dag * a, shifted) ==
          doctest::Approx(std::norm(d.alpha)).epsilon(1e-9));
  }
  SUBCASE("eigenvectors of a random self-adjoint operator") {
    oracle::Rng rng(31);
    const CMatrix h =
        Complex(0.0, 1.0) * oracle::random_anti_hermitian(cutoff.dim(), 1.0, rng);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    const OperatorMatrix op(cutoff, h);
    for (int k = 0; k < 5; ++k) {
      const StateVector vec(cutoff, solver.eigenvectors().col(k));
      CHECK(fluctuation(op, vec) <= 1e-10);
    }
  }
  SUBCASE("non-self-adjoint operator is a convention error") {
    CHECK_THROWS_AS(fluctuation(annihilator(Mode::c, cutoff), ket(0, 0, cutoff)),
                    NumericError);
  }
  SUBCASE("unnormalized state rejected") {
    StateVector x = ket(0, 0, cutoff);
    x.amplitudes() *= 2.0;
    CHECK_THROWS_AS(fluctuation(number_op(Mode::c, cutoff), x), std::invalid_argument);
  }
}
