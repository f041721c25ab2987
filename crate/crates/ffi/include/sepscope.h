#ifndef SEPSCOPE_H
#define SEPSCOPE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum SepStatus {
  SEP_STATUS_OK = 0,
  SEP_STATUS_NULL_POINTER = 1,
  SEP_STATUS_INVALID_UTF8 = 2,
  SEP_STATUS_PARSE = 3,
  SEP_STATUS_VALIDATION = 4,
  SEP_STATUS_DIM_MISMATCH = 5,
  SEP_STATUS_NO_FACTOR_DIMS = 6,
  SEP_STATUS_BAD_PARAMETER = 7,
  SEP_STATUS_PANIC = 99,
} SepStatus;

// Opaque bipartite or single-system state.
typedef struct SepDensity SepDensity;

// Opaque vertex-represented polytope of bipartite states.
typedef struct SepPolytope SepPolytope;

// Summary of a segment scan.
typedef struct SepScanResult {
  // Some point of the segment has a negative partial transpose.
  bool entangled;
  // The verdict is decisive for these dimensions.
  bool conclusive;
  // Smallest partial-transpose eigenvalue over all sampled points.
  double min_pt_eigenvalue;
} SepScanResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or NULL if none. The
// pointer stays valid until the next failing call on the same thread.
const char *sep_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *sep_version(void);

// Releases a string returned by this library. NULL is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void sep_string_free(char *s);

// Parses a state from its JSON form (`{"dims": [...], "matrix": [...]}`).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SepStatus sep_density_from_json(const char *json, struct SepDensity **out);

// Builds a state from row-major real and imaginary parts of a `dim × dim`
// matrix. Pass `n = k = 0` for a state without a bipartite split.
//
// # Safety
// `re` and `im` must each point to `dim * dim` readable doubles; `out`
// must be writable.
enum SepStatus sep_density_from_parts(const double *re,
                                      const double *im,
                                      size_t dim,
                                      size_t n,
                                      size_t k,
                                      struct SepDensity **out);

// The two-qubit Werner state `p |Φ⁺⟩⟨Φ⁺| + (1 − p) I/4`.
//
// # Safety
// `out` must be writable.
enum SepStatus sep_werner_new(double p, struct SepDensity **out);

// Releases a state. NULL is ignored.
//
// # Safety
// `rho` must come from this library and not have been freed.
void sep_density_free(struct SepDensity *rho);

// Total Hilbert-space dimension, or 0 for NULL.
//
// # Safety
// `rho` must be NULL or a live handle.
size_t sep_density_dim(const struct SepDensity *rho);

// `‖ρ − ρᴬ⊗ρᴮ‖²_HS`.
//
// # Safety
// `rho` must be a live handle and `out` writable.
enum SepStatus sep_sm_measure(const struct SepDensity *rho, double *out);

// Smallest eigenvalue of the partial transpose on the second factor.
//
// # Safety
// `rho` must be a live handle and `out` writable.
enum SepStatus sep_ppt_min_eigenvalue(const struct SepDensity *rho, double *out);

// Von Neumann entropy in nats.
//
// # Safety
// `rho` must be a live handle and `out` writable.
enum SepStatus sep_vn_entropy(const struct SepDensity *rho, double *out);

// Whether `ρ = ρᴬ⊗ρᴮ` within the default product tolerance.
//
// # Safety
// `rho` must be a live handle and `out` writable.
enum SepStatus sep_is_product(const struct SepDensity *rho, bool *out);

// PPT scan over `n_points` points of the segment from `Ω(ρ)` to `ρ`.
//
// # Safety
// `rho` must be a live handle and `out` writable.
enum SepStatus sep_segment_scan(const struct SepDensity *rho,
                                size_t n_points,
                                struct SepScanResult *out);

// Fano decomposition as JSON; free the result with [`sep_string_free`].
//
// # Safety
// `rho` must be a live handle and `out` writable.
enum SepStatus sep_fano_json(const struct SepDensity *rho, char **out);

// Parses a polytope from `{"factor_dims": [N, K], "vertices": [...]}`.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SepStatus sep_polytope_from_json(const char *json, struct SepPolytope **out);

// Releases a polytope. NULL is ignored.
//
// # Safety
// `p` must come from this library and not have been freed.
void sep_polytope_free(struct SepPolytope *p);

// Number of vertices, or 0 for NULL.
//
// # Safety
// `p` must be NULL or a live handle.
size_t sep_polytope_vertex_count(const struct SepPolytope *p);

// Whether `Λ∘τ(P) = P`; `max_residual` (may be NULL) receives the largest
// hull residual seen.
//
// # Safety
// `p` must be a live handle, `out` writable, `max_residual` NULL or writable.
enum SepStatus sep_polytope_is_css(const struct SepPolytope *p, bool *out, double *max_residual);

// Hull membership of `rho` in `p`; `residual` (may be NULL) receives the
// HS distance to the hull.
//
// # Safety
// Both handles must be live, `inside` writable, `residual` NULL or writable.
enum SepStatus sep_hull_membership(const struct SepDensity *rho,
                                   const struct SepPolytope *p,
                                   bool *inside,
                                   double *residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEPSCOPE_H */
