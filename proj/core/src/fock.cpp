#include "focklab/fock.hpp"

#include <algorithm>
#include <cmath>

namespace focklab {

namespace {

void require_same_cutoff(CutoffSpec a, CutoffSpec b, const char* where) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(where) + ": cutoff mismatch (" +
                                std::to_string(a.n_b_max) + "," + std::to_string(a.n_c_max) +
                                ") vs (" + std::to_string(b.n_b_max) + "," +
                                std::to_string(b.n_c_max) + ")");
  }
}

}  // namespace

int basis_dim(CutoffSpec cutoff) { return cutoff.dim(); }

int index_of(FockIndex ix, CutoffSpec cutoff) {
  if (ix.n_b < 0 || ix.n_b > cutoff.n_b_max || ix.n_c < 0 || ix.n_c > cutoff.n_c_max) {
    throw std::out_of_range("index_of: |" + std::to_string(ix.n_b) + "," +
                            std::to_string(ix.n_c) + "> outside cutoff (" +
                            std::to_string(cutoff.n_b_max) + "," +
                            std::to_string(cutoff.n_c_max) + ")");
  }
  return ix.n_b * (cutoff.n_c_max + 1) + ix.n_c;
}

FockIndex index_unpack(int ordinal, CutoffSpec cutoff) {
  if (ordinal < 0 || ordinal >= cutoff.dim()) {
    throw std::out_of_range("index_unpack: ordinal " + std::to_string(ordinal) +
                            " outside basis of dimension " + std::to_string(cutoff.dim()));
  }
  const int stride = cutoff.n_c_max + 1;
  return FockIndex{ordinal / stride, ordinal % stride};
}

StateVector::StateVector(CutoffSpec cutoff, CVector amplitudes)
    : cutoff_(cutoff), amp_(std::move(amplitudes)) {
  if (amp_.size() != cutoff_.dim()) {
    throw std::invalid_argument("StateVector: amplitude length " +
                                std::to_string(amp_.size()) + " != basis dimension " +
                                std::to_string(cutoff_.dim()));
  }
  if (!amp_.allFinite()) {
    throw std::invalid_argument("StateVector: non-finite amplitude");
  }
}

StateVector StateVector::basis_state(FockIndex ix, CutoffSpec cutoff) {
  StateVector s(cutoff);
  s.amplitudes()(index_of(ix, cutoff)) = Complex(1.0, 0.0);
  return s;
}

OperatorMatrix::OperatorMatrix(CutoffSpec cutoff, CMatrix entries)
    : cutoff_(cutoff), entries_(std::move(entries)) {
  if (entries_.rows() != cutoff_.dim() || entries_.cols() != cutoff_.dim()) {
    throw std::invalid_argument("OperatorMatrix: entries must be square of basis dimension");
  }
  if (!entries_.allFinite()) {
    throw std::invalid_argument("OperatorMatrix: non-finite entry");
  }
}

OperatorMatrix OperatorMatrix::identity(CutoffSpec cutoff) {
  return OperatorMatrix(cutoff, CMatrix::Identity(cutoff.dim(), cutoff.dim()));
}

Complex inner(const StateVector& x, const StateVector& y) {
  require_same_cutoff(x.cutoff(), y.cutoff(), "inner");
  return x.amplitudes().dot(y.amplitudes());  // conjugate-linear in x
}

StateVector apply(const OperatorMatrix& op, const StateVector& x) {
  require_same_cutoff(op.cutoff(), x.cutoff(), "apply");
  return StateVector(x.cutoff(), op.entries() * x.amplitudes());
}

OperatorMatrix adjoint(const OperatorMatrix& op) {
  return OperatorMatrix(op.cutoff(), op.entries().adjoint());
}

OperatorMatrix compose(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  require_same_cutoff(lhs.cutoff(), rhs.cutoff(), "compose");
  return OperatorMatrix(lhs.cutoff(), lhs.entries() * rhs.entries());
}

OperatorMatrix commutator(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  require_same_cutoff(lhs.cutoff(), rhs.cutoff(), "commutator");
  return OperatorMatrix(lhs.cutoff(),
                        lhs.entries() * rhs.entries() - rhs.entries() * lhs.entries());
}

OperatorMatrix add(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  require_same_cutoff(lhs.cutoff(), rhs.cutoff(), "add");
  return OperatorMatrix(lhs.cutoff(), lhs.entries() + rhs.entries());
}

OperatorMatrix scale(Complex factor, const OperatorMatrix& op) {
  return OperatorMatrix(op.cutoff(), factor * op.entries());
}

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  return compose(lhs, rhs);
}
StateVector operator*(const OperatorMatrix& op, const StateVector& x) { return apply(op, x); }
OperatorMatrix operator+(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  return add(lhs, rhs);
}
OperatorMatrix operator-(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
  require_same_cutoff(lhs.cutoff(), rhs.cutoff(), "operator-");
  return OperatorMatrix(lhs.cutoff(), lhs.entries() - rhs.entries());
}
OperatorMatrix operator*(Complex factor, const OperatorMatrix& op) { return scale(factor, op); }

OperatorMatrix annihilator(Mode mode, CutoffSpec cutoff) {
  OperatorMatrix op(cutoff);
  auto& m = op.entries();
  for (int b = 0; b <= cutoff.n_b_max; ++b) {
    for (int c = 0; c <= cutoff.n_c_max; ++c) {
      const int col = index_of({b, c}, cutoff);
      if (mode == Mode::b && b >= 1) {
        m(index_of({b - 1, c}, cutoff), col) = std::sqrt(double(b));
      } else if (mode == Mode::c && c >= 1) {
        m(index_of({b, c - 1}, cutoff), col) = std::sqrt(double(c));
      }
    }
  }
  return op;
}

OperatorMatrix creator(Mode mode, CutoffSpec cutoff) {
  return adjoint(annihilator(mode, cutoff));
}

OperatorMatrix number_op(Mode mode, CutoffSpec cutoff) {
  OperatorMatrix op(cutoff);
  auto& m = op.entries();
  for (int b = 0; b <= cutoff.n_b_max; ++b) {
    for (int c = 0; c <= cutoff.n_c_max; ++c) {
      const int k = index_of({b, c}, cutoff);
      m(k, k) = double(mode == Mode::b ? b : c);
    }
  }
  return op;
}

OperatorMatrix interior_projector(CutoffSpec cutoff, InteriorSpec spec) {
  const int floor = std::min(cutoff.n_b_max, cutoff.n_c_max);
  if (spec.margin < 0 || spec.margin > floor) {
    throw std::invalid_argument("interior_projector: margin " + std::to_string(spec.margin) +
                                " exceeds cutoff (" + std::to_string(cutoff.n_b_max) + "," +
                                std::to_string(cutoff.n_c_max) + ")");
  }
  OperatorMatrix op(cutoff);
  auto& m = op.entries();
  for (int b = 0; b <= cutoff.n_b_max - spec.margin; ++b) {
    for (int c = 0; c <= cutoff.n_c_max - spec.margin; ++c) {
      const int k = index_of({b, c}, cutoff);
      m(k, k) = 1.0;
    }
  }
  return op;
}

OperatorMatrix shell_projector(CutoffSpec cutoff, InteriorSpec spec) {
  const int floor = std::min(cutoff.n_b_max, cutoff.n_c_max);
  if (spec.margin < 0 || spec.margin > floor) {
    throw std::invalid_argument("shell_projector: margin " + std::to_string(spec.margin) +
                                " exceeds cutoff");
  }
  const int shell_cap = floor - spec.margin;
  OperatorMatrix op(cutoff);
  auto& m = op.entries();
  for (int b = 0; b <= cutoff.n_b_max; ++b) {
    for (int c = 0; c <= cutoff.n_c_max; ++c) {
      if (b + c <= shell_cap) {
        const int k = index_of({b, c}, cutoff);
        m(k, k) = 1.0;
      }
    }
  }
  return op;
}

double projected_max_abs(const OperatorMatrix& op, const OperatorMatrix& projector) {
  require_same_cutoff(op.cutoff(), projector.cutoff(), "projected_max_abs");
  const CMatrix sandwiched =
      projector.entries() * op.entries() * projector.entries();
  return sandwiched.cwiseAbs().maxCoeff();
}

BasisFamily::BasisFamily(std::vector<StateVector> members) : members_(std::move(members)) {
  if (members_.empty()) {
    throw std::invalid_argument("BasisFamily: empty family");
  }
  cutoff_ = members_.front().cutoff();
  for (const auto& s : members_) {
    require_same_cutoff(cutoff_, s.cutoff(), "BasisFamily");
  }
}

double gauge_defect(const BasisFamily& family) {
  double worst = 0.0;
  const int n = family.size();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex g = inner(family.member(i), family.member(j));
      const double delta = (i == j) ? 1.0 : 0.0;
      worst = std::max(worst, std::abs(g - delta));
    }
  }
  return worst;
}

double projector_defect(const BasisFamily& family, const StateVector& probe) {
  require_same_cutoff(family.cutoff(), probe.cutoff(), "projector_defect");
  double captured = 0.0;
  for (const auto& member : family.members()) {
    captured += std::norm(inner(member, probe));
  }
  return std::real(inner(probe, probe)) - captured;
}

double fluctuation(const OperatorMatrix& op, const StateVector& state,
                   double hermiticity_tol) {
  const double herm = (op.entries() - op.entries().adjoint()).cwiseAbs().maxCoeff();
  if (herm > hermiticity_tol) {
    throw NumericError("fluctuation: operator is not self-adjoint (defect " +
                       std::to_string(herm) + ")");
  }
  if (std::abs(state.norm() - 1.0) > 1e-8) {
    throw std::invalid_argument("fluctuation: state is not normalized");
  }
  const StateVector ox = apply(op, state);
  const double second = std::real(inner(ox, ox));  // <x|op^2|x> for self-adjoint op
  const double first = std::real(inner(state, ox));
  double var = second - first * first;
  if (var < 0.0) {
    if (var < -1e-12) {
      throw NumericError("fluctuation: variance " + std::to_string(var) +
                         " below the negative clamp window");
    }
    var = 0.0;
  }
  return var;
}

}  // namespace focklab
