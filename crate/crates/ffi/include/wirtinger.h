#ifndef WIRTINGER_H
#define WIRTINGER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WirtStatus {
  WIRT_STATUS_OK = 0,
  WIRT_STATUS_NULL_POINTER = 1,
  WIRT_STATUS_INVALID_UTF8 = 2,
  WIRT_STATUS_SYNTAX = 3,
  WIRT_STATUS_UNKNOWN_IDENTIFIER = 4,
  WIRT_STATUS_ARITY = 5,
  WIRT_STATUS_POLE = 6,
  WIRT_STATUS_DOMAIN = 7,
  WIRT_STATUS_UNSUPPORTED_PRIMITIVE = 8,
  WIRT_STATUS_NON_FINITE = 9,
  WIRT_STATUS_STEP_TOO_SMALL = 10,
  WIRT_STATUS_DIMENSION_MISMATCH = 11,
  WIRT_STATUS_EMPTY_DATA = 12,
  WIRT_STATUS_NON_REAL_COST = 13,
  WIRT_STATUS_SINGULAR_HESSIAN = 14,
  WIRT_STATUS_INVALID_CONFIG = 15,
  WIRT_STATUS_PANIC = 99,
} WirtStatus;

typedef enum WirtTermination {
  WIRT_TERMINATION_CONVERGED = 0,
  WIRT_TERMINATION_MAX_ITER = 1,
  WIRT_TERMINATION_DIVERGED = 2,
} WirtTermination;

typedef enum WirtVerdict {
  WIRT_VERDICT_HOLOMORPHIC = 0,
  WIRT_VERDICT_CONJUGATE_HOLOMORPHIC = 1,
  WIRT_VERDICT_BOTH = 2,
  WIRT_VERDICT_NEITHER = 3,
} WirtVerdict;

// Opaque parsed expression.
typedef struct WirtExpr WirtExpr;

// Opaque least-squares problem.
typedef struct WirtLeastSquares WirtLeastSquares;

typedef struct WirtComplex {
  double re;
  double im;
} WirtComplex;

// Value and first-order Wirtinger derivatives.
typedef struct WirtJet {
  struct WirtComplex value;
  struct WirtComplex dz;
  struct WirtComplex dzc;
} WirtJet;

// Value, first- and second-order Wirtinger derivatives.
typedef struct WirtSecondOrderJet {
  struct WirtComplex value;
  struct WirtComplex dz;
  struct WirtComplex dzc;
  struct WirtComplex dzz;
  struct WirtComplex dzzc;
  struct WirtComplex dzcz;
  struct WirtComplex dzczc;
} WirtSecondOrderJet;

typedef struct WirtClassification {
  enum WirtVerdict verdict;
  double cr_residual;
  double conj_cr_residual;
} WirtClassification;

typedef struct WirtDescentConfig {
  double mu;
  double tol;
  size_t max_iter;
  // Armijo backtracking (shrink 0.5, c 1e-4) instead of a fixed step.
  bool backtrack;
} WirtDescentConfig;

typedef struct WirtDescentResult {
  enum WirtTermination termination;
  size_t iterations;
  double final_cost;
  double final_grad_norm;
} WirtDescentResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next `wirt_*` call on the same thread.
const char *wirt_last_error_message(void);

// Parses a NUL-terminated expression. On a parse error `*error_offset`
// (if non-NULL) receives the byte offset.
enum WirtStatus wirt_expr_parse(const char *text, struct WirtExpr **out, size_t *error_offset);

void wirt_expr_free(struct WirtExpr *expr);

// Canonical text of an expression; release with [`wirt_string_free`].
enum WirtStatus wirt_expr_format(const struct WirtExpr *expr, char **out);

void wirt_string_free(char *s);

enum WirtStatus wirt_expr_eval(const struct WirtExpr *expr,
                               struct WirtComplex at,
                               struct WirtComplex *out);

// Value, ∂f/∂z and ∂f/∂z* at `at`.
enum WirtStatus wirt_expr_diff(const struct WirtExpr *expr,
                               struct WirtComplex at,
                               struct WirtJet *out);

enum WirtStatus wirt_expr_hessian(const struct WirtExpr *expr,
                                  struct WirtComplex at,
                                  struct WirtSecondOrderJet *out);

// Cauchy–Riemann classification by central differences.
enum WirtStatus wirt_expr_classify(const struct WirtExpr *expr,
                                   struct WirtComplex at,
                                   double step,
                                   double tol,
                                   struct WirtClassification *out);

// One Newton step on a real-valued cost; `out` receives `z + Δz`.
enum WirtStatus wirt_newton_step(const struct WirtExpr *cost,
                                 struct WirtComplex z,
                                 struct WirtComplex *out);

// Steepest descent on a real-valued scalar cost. `final_point` may be NULL.
enum WirtStatus wirt_minimize(const struct WirtExpr *cost,
                              struct WirtComplex z0,
                              const struct WirtDescentConfig *config,
                              struct WirtComplex *final_point,
                              struct WirtDescentResult *out);

// Builds a least-squares problem from `m` samples of dimension `n`
// (`x` row-major, `m * n` entries) and `m` targets.
enum WirtStatus wirt_least_squares_new(const struct WirtComplex *x,
                                       size_t m,
                                       size_t n,
                                       const struct WirtComplex *d,
                                       bool widely_linear,
                                       struct WirtLeastSquares **out);

// Length of the parameter vector: `n`, or `2n` when widely linear.
size_t wirt_least_squares_param_dim(const struct WirtLeastSquares *ls);

// Minimizes from zero; `theta` receives `theta_len` (= param dim) entries.
enum WirtStatus wirt_least_squares_minimize(const struct WirtLeastSquares *ls,
                                            const struct WirtDescentConfig *config,
                                            struct WirtComplex *theta,
                                            size_t theta_len,
                                            struct WirtDescentResult *out);

void wirt_least_squares_free(struct WirtLeastSquares *ls);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WIRTINGER_H */
