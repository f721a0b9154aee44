#pragma once

#include <utility>

#include "focklab/fock.hpp"

// The transformations under study, each available by two independent routes:
// matrix exponentiation of ladder-operator generators, and closed-form
// coefficient formulas. Each route serves as the other's oracle.

namespace focklab {

/// Two-mode mixing angle r and phase theta. The derived mixing ratio is
/// tau = tan(r) e^{-i theta}; the generator amplitude is xi = r e^{-i theta}.
struct ModeMixParams {
  double r = 0.0;
  double theta = 0.0;

  Complex tau() const;  // throws std::domain_error at the tan poles
  Complex xi() const;
};

struct DisplacementParams {
  Complex alpha{0.0, 0.0};
};

struct ExpmOptions {
  double tolerance = 1e-13;  // target truncation error; must be >= machine epsilon
  int max_scaling = 32;      // cap on the scaling-and-squaring depth
};

/// Matrix exponential by scaling-and-squaring with a Pade(13,13) rational core.
/// The core is accurate to machine precision once the scaled 1-norm is below
/// its convergence radius, so any tolerance >= machine epsilon is met.
/// Throws NumericError (with the offending norm) if the required scaling depth
/// exceeds opts.max_scaling.
OperatorMatrix expm(const OperatorMatrix& generator, const ExpmOptions& opts = {});

/// Two-mode mixing unitary exp(xi b†c - xi* bc†). Commutes exactly with the
/// total number operator (the generator is block-structured per shell).
OperatorMatrix mode_mix_op(const ModeMixParams& params, CutoffSpec cutoff,
                           const ExpmOptions& opts = {});

/// Closed-form image of |0, n> under the mode mixer:
///   sum_k sqrt(C(n,k)) tau^{n-k} (1+|tau|^2)^{-n/2} |n-k, k>.
/// Throws std::invalid_argument when n exceeds min(cutoffs).
StateVector mixed_fock_state(int n, const ModeMixParams& params, CutoffSpec cutoff);

/// Time-reversed member of the mixed family,
///   sum_k sqrt(C(n,k)) (-tau*)^k (1+|tau|^2)^{-n/2} |n-k, k>,
/// i.e. (a_T†)^n/sqrt(n!) |0,0> with a_T† = (b† - tau* c†)/sqrt(1+|tau|^2).
/// Identical to conjugating the amplitudes of mixed_fock_state and applying
/// quantum_time_reversal; annihilated by the collective mode, so it is a dark
/// state of the collective number operator.
StateVector dark_fock_state(int n, const ModeMixParams& params, CutoffSpec cutoff);

/// Orthonormal families of the first `count` mixed / time-reversed states.
BasisFamily mixed_family(int count, const ModeMixParams& params, CutoffSpec cutoff);
BasisFamily dark_family(int count, const ModeMixParams& params, CutoffSpec cutoff);

/// Mode-c displacement exp(-alpha c† + alpha* c). Note the sign convention:
/// the displaced vacuum has amplitude -alpha.
OperatorMatrix displacement_c(const DisplacementParams& d, CutoffSpec cutoff,
                              const ExpmOptions& opts = {});

/// Collective mode a = (tau* b + c)/sqrt(1+|tau|^2) and its adjoint.
/// Satisfies [a, a†] = 1 on the interior and a = U c U^{-1} for the mode mixer U.
std::pair<OperatorMatrix, OperatorMatrix> collective_mode_ops(const ModeMixParams& params,
                                                              CutoffSpec cutoff);

/// Quadratures q = (a† + a)/sqrt(2), p = i(a† - a)/sqrt(2) of the collective
/// mode; [q, p] = i on the interior.
std::pair<OperatorMatrix, OperatorMatrix> quadratures(const ModeMixParams& params,
                                                      CutoffSpec cutoff);

/// Quantum half of time reversal: exp((pi/2)(b†c - bc†)). Conjugation sends
/// b† -> -c†, b -> -c, c† -> b†, c -> b on complete shells.
OperatorMatrix quantum_time_reversal(CutoffSpec cutoff, const ExpmOptions& opts = {});

/// Classical half of time reversal: conjugates every Fock-basis amplitude.
/// Anti-unitary; applying it twice is the identity.
StateVector conjugate_amplitudes(const StateVector& x);

/// Full time reversal: amplitude conjugation followed by the quantum rotation.
StateVector time_reverse(const StateVector& x, const ExpmOptions& opts = {});

/// Collective-mode displacement exp(alpha a† - alpha* a).
OperatorMatrix collective_displacement(const DisplacementParams& d,
                                       const ModeMixParams& params, CutoffSpec cutoff,
                                       const ExpmOptions& opts = {});

/// Mode-c parity operator, built directly as diag((-1)^{n_c}) so that the
/// involution parity^2 = I holds exactly.
OperatorMatrix parity_c(CutoffSpec cutoff);

/// Smallest per-mode cutoff adequate for displacing Fock states up to
/// n_max_used by alpha: n_max_used + ceil(16 |alpha|^2) + 8.
int displacement_adequate_cutoff(int n_max_used, Complex alpha);

/// ||P (V†V - I) P||_max.
double unitarity_defect(const OperatorMatrix& v, const OperatorMatrix& projector);

/// 1 - |<x|y>| / (||x|| ||y||): zero iff x and y agree up to a global phase.
double global_phase_distance(const StateVector& x, const StateVector& y);

}  // namespace focklab
