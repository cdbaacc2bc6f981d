/* C API for the rgeom engine: Riemannian geometry realized through
 * deformed translation and parallel-transport groups.
 *
 * All functions return rgeom_status; outputs are written through pointer
 * arguments. Array sizes follow the manifold dimension n obtained from
 * rgeom_manifold_dim: points and vectors are length n, matrices are
 * row-major n*n, rank-3 arrays n*n*n, rank-4 arrays n*n*n*n.
 * On error, rgeom_last_error() returns a message for the calling thread.
 */
#ifndef RGEOM_H
#define RGEOM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rgeom_status {
  RGEOM_OK = 0,
  RGEOM_ERR_IDENTITY = 1, /* verification ran; at least one identity failed */
  RGEOM_ERR_CONFIG = 2,   /* invalid argument or configuration */
  RGEOM_ERR_PARSE = 3,    /* manifold definition could not be parsed/loaded */
  RGEOM_ERR_SOLVER = 4,   /* integration or shooting failure */
  RGEOM_ERR_DOMAIN = 5    /* point outside the chart, or metric not SPD */
} rgeom_status;

typedef struct rgeom_manifold rgeom_manifold;

typedef struct rgeom_solver_config {
  int steps_per_unit;  /* fixed RK4 steps per unit affine parameter */
  int bvp_max_iter;    /* shooting iteration cap */
  double bvp_tol;      /* endpoint tolerance, chart units */
  double fd_eps;       /* finite-difference step for group expansions */
  int richardson;      /* nonzero: one Richardson extrapolation level */
} rgeom_solver_config;

void rgeom_solver_config_default(rgeom_solver_config* cfg);

const char* rgeom_version(void);

/* Most recent error message on this thread (empty string when none). */
const char* rgeom_last_error(void);

/* ------------------------------------------------------------------ */
/* Manifolds                                                           */

/* Resolve a built-in name ("euclidean<n>", "sphere", "halfplane") or a
 * path to a .metric file. */
rgeom_status rgeom_manifold_create(const char* name_or_path,
                                   rgeom_manifold** out);

/* Build a manifold from .metric text. */
rgeom_status rgeom_manifold_create_from_text(const char* text,
                                             const char* display_name,
                                             rgeom_manifold** out);

void rgeom_manifold_destroy(rgeom_manifold* m);

int rgeom_manifold_dim(const rgeom_manifold* m);
const char* rgeom_manifold_name(const rgeom_manifold* m);

/* Newline-separated list of built-in manifold names; caller frees. */
rgeom_status rgeom_builtin_manifolds(char** out);

/* ------------------------------------------------------------------ */
/* Pointwise geometry                                                  */

/* Any of g / dg / d2g may be NULL when not wanted. */
rgeom_status rgeom_metric_at(const rgeom_manifold* m, const double* x,
                             double* g, double* dg, double* d2g);

/* h maps coordinate components to frame components, k is its inverse. */
rgeom_status rgeom_frame_at(const rgeom_manifold* m, const double* x, double* h,
                            double* k);

/* Christoffel symbols gamma[i][j][k] = Gamma^i_jk. */
rgeom_status rgeom_christoffel_at(const rgeom_manifold* m, const double* x,
                                  double* gamma);

/* Frame connection gamma[a][b][c]: direction b, argument c. */
rgeom_status rgeom_gamma_at(const rgeom_manifold* m, const double* x,
                            double* gamma);

/* Structure operator C[a][b][c], antisymmetric in (b, c). */
rgeom_status rgeom_anholonomy_at(const rgeom_manifold* m, const double* x,
                                 double* c);

/* Frame curvature R[a][t][l][lp]: value slot a, argument t, pair (l, lp). */
rgeom_status rgeom_riemann_at(const rgeom_manifold* m, const double* x,
                              double* r);

/* ------------------------------------------------------------------ */
/* Geodesics and transports                                            */

/* Integrate the geodesic from x with chart velocity v over parameter s. */
rgeom_status rgeom_geodesic(const rgeom_manifold* m, const double* x,
                            const double* v, double s,
                            const rgeom_solver_config* cfg, double* end_x,
                            double* end_v);

rgeom_status rgeom_exp(const rgeom_manifold* m, const double* x,
                       const double* t, const rgeom_solver_config* cfg,
                       double* end_x);

rgeom_status rgeom_log(const rgeom_manifold* m, const double* x,
                       const double* target, const rgeom_solver_config* cfg,
                       double* t);

rgeom_status rgeom_distance(const rgeom_manifold* m, const double* x,
                            const double* target,
                            const rgeom_solver_config* cfg, double* dist);

/* theta is given at exp(x, t); both transports return the vector at x. */
rgeom_status rgeom_lambda_transport(const rgeom_manifold* m, const double* x,
                                    const double* t, const double* theta,
                                    const rgeom_solver_config* cfg,
                                    double* out);

rgeom_status rgeom_pi_transport(const rgeom_manifold* m, const double* x,
                                const double* t, const double* theta,
                                const rgeom_solver_config* cfg, double* out);

/* Geodesic quadrilateral with side directions a, b and leg length scale.
 * rotation (n*n, may be NULL) receives the net transport around the loop. */
rgeom_status rgeom_holonomy(const rgeom_manifold* m, const double* x,
                            const double* a, const double* b, double scale,
                            const rgeom_solver_config* cfg, double* rotation,
                            double* angle, double* closure_defect);

/* ------------------------------------------------------------------ */
/* Identity suite                                                      */

typedef struct rgeom_verify_options {
  unsigned long long seed;
  int samples;
  int threads;                   /* 0: hardware, capped by RGROUPS_THREADS */
  rgeom_solver_config solver;
  const char* tol_overrides;     /* "id=tol,id=tol" or NULL */
} rgeom_verify_options;

void rgeom_verify_options_default(rgeom_verify_options* opts);

/* Runs the identity suite. *json receives the full deterministic report
 * (caller frees with rgeom_string_free); *all_pass is set to 0/1.
 * Returns RGEOM_OK when everything passed, RGEOM_ERR_IDENTITY when the
 * suite ran but at least one identity failed. */
rgeom_status rgeom_verify(const rgeom_manifold* m,
                          const rgeom_verify_options* opts, char** json,
                          int* all_pass);

void rgeom_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RGEOM_H */
