/* C interface to the lbmlab lattice Boltzmann laboratory.
 *
 * Generated from the lbmlab-ffi crate surface (see cbindgen.toml; the file
 * is committed so downstream builds do not need cbindgen installed).
 *
 * Conventions:
 *  - Every fallible call returns an LbmStatus; on failure,
 *    lbm_last_error() holds a message valid until the next failing call
 *    on the same thread.
 *  - Handles are opaque; free them with the matching *_free function.
 *  - Buffers are caller-allocated; sizes follow the model (q values per
 *    node, nodes ordered x + nx*(y + ny*z)).
 */

#ifndef LBMLAB_H
#define LBMLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes returned by every fallible call. */
typedef enum LbmStatus {
  LBM_STATUS_OK = 0,
  /* Bad physics inputs (unknown model, parameter out of range, rho <= 0). */
  LBM_STATUS_DOMAIN_ERROR = 1,
  /* Numerical failure (instability, non-convergence, tracking loss). */
  LBM_STATUS_NUMERICAL_ERROR = 2,
  /* Malformed call (bad UTF-8, wrong lengths). */
  LBM_STATUS_CONFIG_ERROR = 3,
  LBM_STATUS_NULL_POINTER = 4,
} LbmStatus;

/* Opaque model handle. */
typedef struct LbmModel LbmModel;

/* Opaque lattice-state handle. */
typedef struct LbmState LbmState;

/* Message for the most recent failure on this thread. */
const char *lbm_last_error(void);

/* Build a model. keys/values carry n parameter or rate assignments (rate
 * symbols are "s1", "s3", ...; anything else is an equilibrium parameter).
 * Missing parameters take the catalog defaults; missing rates default to 1.
 * Model names: "D2Q5", "D2Q9-AD", "D2Q9-NS", "D2Q13-NS", "D3Q15-AD",
 * "D3Q19-AD". */
LbmStatus lbm_model_create(const char *name,
                           const char *const *keys,
                           const double *values,
                           size_t n,
                           LbmModel **out);

void lbm_model_free(LbmModel *model);

size_t lbm_model_q(const LbmModel *model);

size_t lbm_model_dim(const LbmModel *model);

size_t lbm_model_n_conserved(const LbmModel *model);

/* m = M f. Both buffers hold q doubles. */
LbmStatus lbm_moments_from_f(const LbmModel *model, const double *f, double *m);

/* f = M^-1 m. Both buffers hold q doubles. */
LbmStatus lbm_f_from_moments(const LbmModel *model, const double *m, double *f);

/* Equilibrium moments from the conserved subvector (length n_c); m holds q
 * doubles. */
LbmStatus lbm_equilibrium_moments(const LbmModel *model,
                                  const double *conserved,
                                  double *m);

/* Equilibrium-initialized lattice of nx x ny x nz nodes (nz = 1 in 2D).
 * rho holds one density per node; jx/jy may be NULL for a fluid at rest and
 * are ignored by the diffusion schemes. */
LbmStatus lbm_state_create(const LbmModel *model,
                           size_t nx,
                           size_t ny,
                           size_t nz,
                           const double *rho,
                           const double *jx,
                           const double *jy,
                           LbmState **out);

void lbm_state_free(LbmState *state);

/* Advance the lattice by `steps` collide-stream updates. */
LbmStatus lbm_state_step(LbmState *state, uint64_t steps);

uint64_t lbm_state_time(const LbmState *state);

double lbm_state_total_mass(const LbmState *state);

/* Density per node into rho (nx*ny*nz doubles). */
LbmStatus lbm_state_density(const LbmState *state, double *rho);

/* Momentum per node into jx/jy (fluid schemes only). */
LbmStatus lbm_state_momentum(const LbmState *state, double *jx, double *jy);

/* Fit the growth exponents of one hydrodynamic mode: coeffs receives
 * (a1, a2, a3, a4) with gamma(k) ~ -i a1 k - a2 k^2 - i a3 k^3 - a4 k^4.
 * mode is "density", "shear", "acoustic+" or "acoustic-". velocity and
 * direction point to 3 doubles. */
LbmStatus lbm_dispersion_fit(const LbmModel *model,
                             const double *velocity,
                             const double *direction,
                             double k_max,
                             size_t samples,
                             const char *mode,
                             double *coeffs);

/* Relative third-order phase-velocity correction h with
 * g(k) = k.V (1 + h k^2), at the given background velocity. */
LbmStatus lbm_anomalous_advection(const LbmModel *model,
                                  const double *velocity,
                                  const double *direction,
                                  double *h);

/* Closed-form transport coefficient ("kappa", "nu0", "nu_eff", "zeta0",
 * "cs") at velocity magnitude v. */
LbmStatus lbm_predicted_transport(const LbmModel *model,
                                  double v,
                                  const char *key,
                                  double *out);

/* Largest eigenvalue modulus over a grid-per-axis wavevector scan; values
 * above 1 mean the configuration is linearly unstable. */
LbmStatus lbm_stability_max_abs(const LbmModel *model,
                                const double *velocity,
                                size_t grid,
                                double *out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LBMLAB_H */
