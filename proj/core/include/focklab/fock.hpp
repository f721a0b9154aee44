#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

// Truncated two-mode bosonic Fock space: basis addressing, states, dense
// operators, ladder algebra, and the interior projectors that quarantine
// truncation artifacts.

namespace focklab {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Thrown when a numerical routine cannot meet its accuracy contract
/// (non-convergent exponential, negative variance beyond the clamp window,
/// singular factorization, inadequate cutoff).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

enum class Mode { b, c };

/// Rectangular per-mode truncation. Basis states are |n_b, n_c> with
/// 0 <= n_b <= n_b_max and 0 <= n_c <= n_c_max, stored row-major in n_b.
struct CutoffSpec {
  int n_b_max = 0;
  int n_c_max = 0;

  int dim() const { return (n_b_max + 1) * (n_c_max + 1); }
  bool operator==(const CutoffSpec&) const = default;
};

struct FockIndex {
  int n_b = 0;
  int n_c = 0;
  bool operator==(const FockIndex&) const = default;
};

int basis_dim(CutoffSpec cutoff);

/// Row-major ordinal of |n_b, n_c>; throws std::out_of_range outside the cutoff.
int index_of(FockIndex ix, CutoffSpec cutoff);

/// Inverse of index_of.
FockIndex index_unpack(int ordinal, CutoffSpec cutoff);

class StateVector {
 public:
  explicit StateVector(CutoffSpec cutoff)
      : cutoff_(cutoff), amp_(CVector::Zero(cutoff.dim())) {}
  StateVector(CutoffSpec cutoff, CVector amplitudes);

  static StateVector basis_state(FockIndex ix, CutoffSpec cutoff);

  CutoffSpec cutoff() const { return cutoff_; }
  const CVector& amplitudes() const { return amp_; }
  CVector& amplitudes() { return amp_; }

  Complex at(FockIndex ix) const { return amp_(index_of(ix, cutoff_)); }
  void set(FockIndex ix, Complex value) { amp_(index_of(ix, cutoff_)) = value; }

  double norm() const { return amp_.norm(); }

 private:
  CutoffSpec cutoff_;
  CVector amp_;
};

class OperatorMatrix {
 public:
  explicit OperatorMatrix(CutoffSpec cutoff)
      : cutoff_(cutoff), entries_(CMatrix::Zero(cutoff.dim(), cutoff.dim())) {}
  OperatorMatrix(CutoffSpec cutoff, CMatrix entries);

  static OperatorMatrix identity(CutoffSpec cutoff);

  CutoffSpec cutoff() const { return cutoff_; }
  const CMatrix& entries() const { return entries_; }
  CMatrix& entries() { return entries_; }

  double max_abs() const {
    return entries_.size() == 0 ? 0.0 : entries_.cwiseAbs().maxCoeff();
  }

 private:
  CutoffSpec cutoff_;
  CMatrix entries_;
};

// Dense linear-algebra plumbing. All binary operations check cutoffs and
// throw std::invalid_argument on mismatch.
Complex inner(const StateVector& x, const StateVector& y);
StateVector apply(const OperatorMatrix& op, const StateVector& x);
OperatorMatrix adjoint(const OperatorMatrix& op);
OperatorMatrix compose(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix commutator(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix add(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix scale(Complex factor, const OperatorMatrix& op);

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
StateVector operator*(const OperatorMatrix& op, const StateVector& x);
OperatorMatrix operator+(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix operator-(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix operator*(Complex factor, const OperatorMatrix& op);

/// Ladder lowering operator of one mode: |n> -> sqrt(n) |n-1>, identity on the
/// other mode. The raising operator is its adjoint.
OperatorMatrix annihilator(Mode mode, CutoffSpec cutoff);
OperatorMatrix creator(Mode mode, CutoffSpec cutoff);

/// Diagonal occupation-number operator of one mode.
OperatorMatrix number_op(Mode mode, CutoffSpec cutoff);

/// Excitations reserved below each cutoff when restricting assertions to the
/// interior of the truncated space.
struct InteriorSpec {
  int margin = 2;
};

/// Orthogonal projector onto basis states with n_b <= n_b_max - margin and
/// n_c <= n_c_max - margin. Ladder commutation relations hold exactly there.
OperatorMatrix interior_projector(CutoffSpec cutoff, InteriorSpec spec);

/// Projector onto states whose total excitation n_b + n_c stays within the
/// complete shells of the truncation: n_b + n_c <= min(n_b_max, n_c_max) - margin.
/// A rectangular truncation clips total-excitation shells above min(cutoffs), so
/// conjugation identities of number-conserving unitaries are only meaningful on
/// this subspace; the per-mode box of interior_projector is not enough for them.
OperatorMatrix shell_projector(CutoffSpec cutoff, InteriorSpec spec);

/// ||P op P||_max for a projector P — the boundary-quarantined defect norm.
double projected_max_abs(const OperatorMatrix& op, const OperatorMatrix& projector);

/// Ordered orthonormal state list over one cutoff; the column content of the
/// reference-frame matrix whose products give the gauge and the projector sum.
class BasisFamily {
 public:
  explicit BasisFamily(std::vector<StateVector> members);

  const std::vector<StateVector>& members() const { return members_; }
  const StateVector& member(int n) const { return members_.at(n); }
  int size() const { return static_cast<int>(members_.size()); }
  CutoffSpec cutoff() const { return cutoff_; }

 private:
  CutoffSpec cutoff_;
  std::vector<StateVector> members_;
};

/// max over m,n of |<f_m|f_n> - delta_mn|.
double gauge_defect(const BasisFamily& family);

/// <probe|probe> - sum_n |<f_n|probe>|^2. Nonnegative up to roundoff; zero iff
/// the probe lies in the family span.
double projector_defect(const BasisFamily& family, const StateVector& probe);

/// <x|op^2|x> - <x|op|x>^2 for a normalized state and self-adjoint op.
/// Values in [-1e-12, 0) are clamped to 0; anything more negative throws
/// NumericError, as does a Hermiticity defect beyond hermiticity_tol.
double fluctuation(const OperatorMatrix& op, const StateVector& state,
                   double hermiticity_tol = 1e-10);

}  // namespace focklab
