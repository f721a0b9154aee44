#pragma once

#include "focklab/fock.hpp"
#include "focklab/unitaries.hpp"

// Projector-closure falsification computations: the mixed-family probe test
// and the displaced-parity determinant identity, each with a closed-form and
// a direct matrix route.

namespace focklab {

/// s = (tau + tau*)/(1 + tau* tau) = 2 Re(tau)/(1+|tau|^2), in [-1, 1].
double closure_s_parameter(Complex tau);

struct ClosureMixResult {
  int n = 0;
  Complex tau{0.0, 0.0};
  double lhs = 0.0;          // closed form: n^2 s^2
  double rhs = 0.0;          // closed form: n + n(n-1) s^2
  double lhs_numeric = 0.0;  // sum_m |<f_m|probe>|^2 over the family
  double rhs_numeric = 0.0;  // <probe|probe>
  int family_size = 0;
  CutoffSpec cutoff;

  double defect() const { return rhs - lhs; }
  double defect_numeric() const { return rhs_numeric - lhs_numeric; }
};

/// Unnormalized probe (b†c + bc†) applied to the n-th mixed state. Couples
/// only to the total-excitation-n shell; its squared norm is the rhs closed form.
StateVector closure_probe(int n, const ModeMixParams& params, CutoffSpec cutoff);

/// Evaluates the family-projector closure test at one (n, tau) point.
/// The defect rhs - lhs equals n(1 - s^2): zero only at s = ±1.
/// Throws NumericError if the captured sum has not saturated in family_size.
ClosureMixResult closure_mix_test(int n, const ModeMixParams& params, int family_size,
                                  CutoffSpec cutoff);
/// Same with the default family_size = n + 4 (the probe lives in shell n; the
/// extra members guard the saturation claim instead of assuming it).
ClosureMixResult closure_mix_test(int n, const ModeMixParams& params, CutoffSpec cutoff);

enum class ParityRoute { closed_form, numeric };

/// M x M block of parity matrix elements between displaced Fock states,
/// entry (j, n) = <j| D^-1 (-1)^{n_c} D |n>.
struct ParityBlock {
  Complex alpha{0.0, 0.0};
  int size = 0;
  CMatrix entries;
  ParityRoute route = ParityRoute::closed_form;

  double hermiticity_defect() const;
};

/// Closed-form route evaluates the finite sum
///   e^{-2|a|^2} sum_s (-1)^s sqrt(j! n!) (2a)^{j-s} (2a*)^{n-s} / ((j-s)!(n-s)!s!)
/// exactly; the numeric route sandwiches the parity matrix between displaced
/// basis columns and needs an adequate cutoff (throws NumericError otherwise).
/// Convergence studies pass enforce_adequacy = false to watch the numeric
/// route approach the closed form from inadequate cutoffs.
ParityBlock parity_block(const DisplacementParams& d, int size, ParityRoute route,
                         CutoffSpec cutoff = {}, bool enforce_adequacy = true);

struct DeterminantResult {
  Complex alpha{0.0, 0.0};
  int size = 0;
  Complex det_value{0.0, 0.0};
  double expected = 0.0;   // e^{-4 |alpha|^2 M}
  double rel_error = 0.0;  // |det - expected| / expected
};

/// Determinant of the M x M product block sum_n B_jn B_nk, by pivoted LU.
/// Equals e^{-4|alpha|^2 M} at every retained-family size M; equals 1 only
/// at alpha = 0. Throws NumericError when the factorization is singular to
/// working precision (with a pivot-ratio estimate in the message).
DeterminantResult parity_closure_determinant(const DisplacementParams& d, int size,
                                             ParityRoute route, CutoffSpec cutoff = {},
                                             bool enforce_adequacy = true);

struct ExpansionResidual {
  int n = 0;
  Complex tau{0.0, 0.0};
  double residual_norm = 0.0;   // || probe - sum_m f_m <f_m|probe> ||
  double predicted_norm = 0.0;  // sqrt(n (1 - s^2))
  int family_size = 0;
  CutoffSpec cutoff;
};

/// Exhibits where the expansion step |psi> = sum_m |f_m><f_m|psi> loses norm
/// for the mixed family: the residual of the probe after projection.
ExpansionResidual expansion_residual(const ModeMixParams& params, int n, CutoffSpec cutoff);

}  // namespace focklab
