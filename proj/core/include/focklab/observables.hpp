#pragma once

#include <array>
#include <vector>

#include "focklab/fock.hpp"
#include "focklab/report.hpp"
#include "focklab/unitaries.hpp"

// Schwinger angular momentum, its simultaneous diagonal elements in the mixed
// family, Robertson uncertainty products, and the dark / translated-dark
// quadrature moments.

namespace focklab {

enum class Axis { x = 0, y = 1, z = 2 };

inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};
const char* axis_name(Axis axis);

/// J_x = (b†c + bc†)/2, J_y = (b†c - bc†)/2i, J_z = (b†b - c†c)/2.
/// Self-adjoint; [J_x, J_y] = i J_z (and cyclic) on complete shells.
std::array<OperatorMatrix, 3> schwinger_J(CutoffSpec cutoff);

/// Closed-form diagonal values. First moments:
///   j_x = (n/2)(tau+tau*)/(1+|tau|^2), j_y = (n/2i)(tau*-tau)/(1+|tau|^2),
///   j_z = (n/2)(|tau|^2-1)/(1+|tau|^2);
/// second moments j2 = n/4 + ((n-1)/n) j1^2 for n >= 1. The vacuum has all
/// scalars zero (the n divisor is never applied at n = 0).
struct SpectralScalars {
  int n = 0;
  Complex tau{0.0, 0.0};
  std::array<double, 3> j1{0.0, 0.0, 0.0};
  std::array<double, 3> j2{0.0, 0.0, 0.0};

  double first(Axis axis) const { return j1[size_t(axis)]; }
  double second(Axis axis) const { return j2[size_t(axis)]; }
  /// sum of squared first moments; equals (n/2)^2 identically.
  double sphere_radius_sq() const;
};

SpectralScalars spectral_scalars(int n, const ModeMixParams& params);

/// Closed-form <J_a J_b> diagonal value for ordered distinct axes:
/// ((n-1)/n) j_a j_b ± (i/2) j_c, with + for cyclic order (xy, yz, zx).
Complex cross_moment_closed(int n, const ModeMixParams& params, Axis first, Axis second);

/// Full Gram-like matrix of <f_m|op|f_n> over a family.
CMatrix family_matrix_elements(const OperatorMatrix& op, const BasisFamily& family);

/// Largest off-diagonal magnitude — the "simultaneously diagonalized" defect.
double offdiag_max_abs(const CMatrix& elements);

struct UncertaintyRecord {
  std::string pair;          // "JxJy", "JyJz", "JzJx" or "qp"
  double product = 0.0;      // closed-form dA * dB
  double bound = 0.0;        // (1/2) |mean commutator|
  std::string state_label;
};

/// The three closed-form Robertson products on the n-th mixed state:
///   dJ_a dJ_b = sqrt((j_a j_b / n)^2 + j_c^2 / 4) >= |j_c| / 2.
/// Requires n >= 1.
std::vector<UncertaintyRecord> robertson_products(int n, const ModeMixParams& params);

/// Gaussian moments about a center with variance 1/2:
/// f_0 = 1, f_1 = center, f_{k+1} = center f_k + (k/2) f_{k-1}.
struct MomentTable {
  double center = 0.0;
  std::vector<double> values;  // values[k] = f_k, k = 0..max_order
};

/// Throws std::invalid_argument for max_order outside [0, 12].
MomentTable moment_table(double center, int max_order);

/// Checks on the time-reversed family 0..n: vanishing collective number
/// operator and its square, vanishing quadrature means, half-unit second
/// moments, sign-flipped angular momentum diagonals, and the minimal
/// uncertainty product. Also reports the untransformed-family second moments
/// (m + 1/2) so the two conventions are visible side by side.
std::vector<CheckReport> dark_state_suite(int n, const ModeMixParams& params,
                                          CutoffSpec cutoff);

/// Checks on the displaced time-reversed family 0..n: coherent-state moments
/// <a^k> = alpha^k, number moments, Gaussian quadrature moments f_k, and the
/// invariant uncertainty product. Requires the displacement-adequate cutoff;
/// pass a prebuilt displacement operator to share it across calls.
std::vector<CheckReport> translated_dark_suite(int n, const ModeMixParams& params,
                                               const DisplacementParams& d, CutoffSpec cutoff,
                                               const OperatorMatrix* displacement = nullptr);

}  // namespace focklab
