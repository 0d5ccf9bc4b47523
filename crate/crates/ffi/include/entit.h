#ifndef ENTIT_H
#define ENTIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EntitStatus {
  ENTIT_STATUS_OK = 0,
  ENTIT_STATUS_NULL_POINTER = 1,
  ENTIT_STATUS_INVALID_ARGUMENT = 2,
  ENTIT_STATUS_NOT_PHYSICAL = 3,
  ENTIT_STATUS_DIMENSION_MISMATCH = 4,
  ENTIT_STATUS_TRUNCATION = 5,
  ENTIT_STATUS_BUFFER_TOO_SMALL = 6,
  ENTIT_STATUS_INTERNAL = 7,
} EntitStatus;

/**
 * Opaque covariance matrix handle.
 */
typedef struct EntitCovariance EntitCovariance;

typedef struct EntitTwbCoefficients {
  double c12;
  double c34;
  double c13;
  double c24;
} EntitTwbCoefficients;

/**
 * `0` transparent, `1` swapped, `2` generic.
 */
typedef struct EntitReport {
  int32_t classification;
  double cm_roundtrip_error;
  double fock_eigen_residual;
  double overlap;
  double swap_overlap;
  double fidelity_gaussian;
  double fidelity_fock;
  double truncation_loss;
} EntitReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next failing call.
 */
const char *entit_last_error_message(void);

/**
 * Two-mode squeezed vacuum covariance.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EntitStatus entit_covariance_twb(double r, struct EntitCovariance **out);

/**
 * Four-mode input `TWB(r) ⊕ TWB(s)`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EntitStatus entit_covariance_four_mode(double r, double s, struct EntitCovariance **out);

/**
 * Builds a covariance from `dim × dim` row-major entries; `dim` must be even.
 *
 * # Safety
 * `entries` must hold `dim * dim` readable values; `out` must be valid for writes.
 */
enum EntitStatus entit_covariance_from_entries(const double *entries,
                                               size_t dim,
                                               struct EntitCovariance **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `cm` must be null or a handle from this library not yet freed.
 */
void entit_covariance_free(struct EntitCovariance *cm);

/**
 * Number of modes, or 0 for a null handle.
 *
 * # Safety
 * `cm` must be null or a live handle.
 */
size_t entit_covariance_n_modes(const struct EntitCovariance *cm);

/**
 * Copies the `2n × 2n` entries row-major into `buf`.
 *
 * # Safety
 * `cm` must be a live handle; `buf` must hold `len` writable values.
 */
enum EntitStatus entit_covariance_entries(const struct EntitCovariance *cm,
                                          double *buf,
                                          size_t len);

/**
 * Evolves a four-mode covariance through the beam-splitter pair.
 *
 * # Safety
 * `cm` must be a live handle; `out` must be valid for writes.
 */
enum EntitStatus entit_covariance_evolve(const struct EntitCovariance *cm,
                                         double phi,
                                         double psi,
                                         struct EntitCovariance **out);

/**
 * Reduced state of modes `first`, `second` (one-based).
 *
 * # Safety
 * `cm` must be a live handle; `out` must be valid for writes.
 */
enum EntitStatus entit_covariance_reduce(const struct EntitCovariance *cm,
                                         size_t first,
                                         size_t second,
                                         struct EntitCovariance **out);

/**
 * Smallest symplectic eigenvalue of the partial transpose of a two-mode state.
 *
 * # Safety
 * `cm` must be a live handle; `out` must be valid for writes.
 */
enum EntitStatus entit_min_ppt_symplectic_eigenvalue(const struct EntitCovariance *cm, double *out);

/**
 * # Safety
 * `cm` must be a live handle; `out` must be valid for writes.
 */
enum EntitStatus entit_purity(const struct EntitCovariance *cm, double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum EntitStatus entit_entanglement_of_formation(double kappa, double *out);

/**
 * Fidelity of two two-mode states, at least one pure.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be valid for writes.
 */
enum EntitStatus entit_gaussian_fidelity(const struct EntitCovariance *a,
                                         const struct EntitCovariance *b,
                                         double *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum EntitStatus entit_output_twb_coefficients(double r,
                                               double s,
                                               double phi,
                                               double psi,
                                               struct EntitTwbCoefficients *out);

/**
 * κ̃₋ of pairs (1,2) and (1,3) for `s = x·r` at each of the `n` grid points.
 *
 * # Safety
 * `x` must hold `n` readable values; `kappa12` and `kappa13` `n` writable values each.
 */
enum EntitStatus entit_separability_scan(double r,
                                         double phi,
                                         double psi,
                                         const double *x,
                                         size_t n,
                                         double *kappa12,
                                         double *kappa13);

/**
 * Entanglement of formation and purity of pair (1,2) behind loss `gamma`, fed by TWB(`s`).
 *
 * # Safety
 * `s` must hold `n` readable values; `ef` and `purity` `n` writable values each.
 */
enum EntitStatus entit_bath_recovery(double r,
                                     double gamma,
                                     const double *s,
                                     size_t n,
                                     double *ef,
                                     double *purity);

/**
 * Runs both engines on one scenario.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum EntitStatus entit_report(double r,
                              double s,
                              double phi,
                              double psi,
                              size_t cutoff,
                              struct EntitReport *out);

/**
 * `‖U(θ,−θ)|B⟩|B⟩ − |B⟩|B⟩‖` for Bell index 0..3 (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻).
 *
 * # Safety
 * `theta` must hold 4 readable values; `out` must be valid for writes.
 */
enum EntitStatus entit_bell_invariance_residual(uint32_t bell, const double *theta, double *out);

/**
 * Exact and phase-minimized residuals for the doubled real input `a` (row-major a00, a01, a10, a11).
 *
 * # Safety
 * `a`, `theta`, `phi` must hold 4 readable values each; `exact` and `phase` must be valid for writes.
 */
enum EntitStatus entit_invariance_residual(const double *a,
                                           const double *theta,
                                           const double *phi,
                                           double *exact,
                                           double *phase);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENTIT_H */
