#ifndef NEUTRAL_INCLUSION_H
#define NEUTRAL_INCLUSION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum NiStatus {
  NI_STATUS_OK = 0,
  NI_STATUS_NULL_POINTER = 1,
  NI_STATUS_INVALID_ARGUMENT = 2,
  NI_STATUS_COEFFICIENT_TOO_LARGE = 3,
  NI_STATUS_NOT_INJECTIVE = 4,
  // The point is inside the unit disk or the inclusion, or the inversion failed.
  NI_STATUS_OUTSIDE_DOMAIN = 5,
  // `|b|` is outside the closed-form range `[0, 2 - sqrt(3)]`.
  NI_STATUS_INADMISSIBLE = 6,
  NI_STATUS_NEGATIVE_INTERFACE = 7,
  NI_STATUS_CALIBRATION_FAILED = 8,
  NI_STATUS_CORNER_POINT = 9,
  NI_STATUS_GRADING_REQUIRED = 10,
  NI_STATUS_SINGULAR = 11,
  NI_STATUS_ILL_CONDITIONED = 12,
  NI_STATUS_TOO_CLOSE = 13,
  NI_STATUS_DEGENERATE = 14,
  NI_STATUS_PARSE = 15,
  // A Rust panic was caught at the boundary; this is a bug.
  NI_STATUS_PANIC = 16,
} NiStatus;

// Interface parameter designed for a map.
typedef struct NiInterface NiInterface;

// Exterior conformal map `zeta + b1/zeta + ...`.
typedef struct NiMap NiMap;

// Factored boundary-element system with the solutions for both unit fields.
typedef struct NiSolver NiSolver;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *ni_version(void);

// Static description of a status code.
const char *ni_status_string(enum NiStatus status);

// Copies the calling thread's last error message into `buf` (NUL-terminated,
// truncated to `len - 1` bytes) and returns the full message length in bytes.
// With `buf == NULL` only the length is returned.
//
// # Safety
// `buf` must be NULL or valid for `len` bytes.
size_t ni_last_error_message(char *buf, size_t len);

// Map of the unit-capacity ellipse with semi-axis ratio `a : b`.
//
// # Safety
// `out` must be NULL or valid for writing a handle.
enum NiStatus ni_map_ellipse(double a, double b, struct NiMap **out);

// `Phi(zeta) = zeta + 1/(4 zeta + 2)`.
//
// # Safety
// `out` must be NULL or valid for writing a handle.
enum NiStatus ni_map_droplet(struct NiMap **out);

// The identity map (unit disk).
//
// # Safety
// `out` must be NULL or valid for writing a handle.
enum NiStatus ni_map_identity(struct NiMap **out);

// `zeta + sum_k (re[k] + i im[k]) zeta^{-(k+1)}` for `k < len`.
//
// # Safety
// `re` and `im` must be valid for `len` doubles; `out` must be NULL or valid
// for writing a handle.
enum NiStatus ni_map_laurent(const double *re, const double *im, size_t len, struct NiMap **out);

// # Safety
// `map` must be NULL or a handle from one of the `ni_map_*` constructors, not yet freed.
void ni_map_free(struct NiMap *map);

// First Laurent coefficient `b1`.
//
// # Safety
// Pointers must be NULL or valid.
enum NiStatus ni_map_b(const struct NiMap *map, double *out_re, double *out_im);

// Whether the boundary has a corner (a zero of `Phi'` on the unit circle).
//
// # Safety
// Pointers must be NULL or valid.
enum NiStatus ni_map_has_corner(const struct NiMap *map, bool *out);

// `Phi(re + i im)` for `|zeta| >= 1`.
//
// # Safety
// Pointers must be NULL or valid.
enum NiStatus ni_map_eval(const struct NiMap *map,
                          double re,
                          double im,
                          double *out_re,
                          double *out_im);

// Exterior preimage `Phi^{-1}(re + i im)`.
//
// # Safety
// Pointers must be NULL or valid.
enum NiStatus ni_map_invert(const struct NiMap *map,
                            double re,
                            double im,
                            double *out_re,
                            double *out_im);

// Closed-form `(gamma0, gamma2)` for `|b| = b_abs`.
//
// # Safety
// Pointers must be NULL or valid.
enum NiStatus ni_gamma_closed_form(double b_abs, double *gamma0, double *gamma2);

// `(gamma0, gamma2)` giving the disk tensor `2 pi diag(b_abs, -b_abs)` at truncation `truncation`.
//
// # Safety
// Pointers must be NULL or valid.
enum NiStatus ni_gamma_calibrated(double b_abs, size_t truncation, double *gamma0, double *gamma2);

// Polarization tensor of the unit disk with `gamma = gamma0 + 2 gamma2 cos(2 theta - phase)`.
//
// # Safety
// `out` must be NULL or valid for four doubles.
enum NiStatus ni_disk_polarization(double gamma0,
                                   double gamma2,
                                   double phase,
                                   size_t truncation,
                                   double *out);

// Closed-form interface parameter for `map`.
//
// # Safety
// `map` must be NULL or a live handle; `out` must be NULL or valid.
enum NiStatus ni_interface_closed_form(const struct NiMap *map, struct NiInterface **out);

// Interface parameter calibrated against the disk solver at `truncation`.
//
// # Safety
// `map` must be NULL or a live handle; `out` must be NULL or valid.
enum NiStatus ni_interface_calibrated(const struct NiMap *map,
                                      size_t truncation,
                                      struct NiInterface **out);

// # Safety
// `iface` must be NULL or a handle from an `ni_interface_*` constructor, not yet freed.
void ni_interface_free(struct NiInterface *iface);

// `gamma0`, `gamma2` and the phase of the `cos 2 theta` term.
//
// # Safety
// Pointers must be NULL or valid.
enum NiStatus ni_interface_coefficients(const struct NiInterface *iface,
                                        double *gamma0,
                                        double *gamma2,
                                        double *phase);

// `beta` at the boundary point `Phi(e^{i theta})`.
//
// # Safety
// Pointers must be NULL or valid.
enum NiStatus ni_interface_beta(const struct NiInterface *iface, double theta, double *out);

// Imperfect-interface system on `nodes` boundary nodes (graded toward a corner if the map has one).
//
// # Safety
// `iface` must be NULL or a live handle; `out` must be NULL or valid.
enum NiStatus ni_solver_imperfect(const struct NiInterface *iface,
                                  size_t nodes,
                                  struct NiSolver **out);

// Perfect-bonding (perfectly conducting core) system on `nodes` boundary nodes.
//
// # Safety
// `map` must be NULL or a live handle; `out` must be NULL or valid.
enum NiStatus ni_solver_perfect(const struct NiMap *map, size_t nodes, struct NiSolver **out);

// # Safety
// `solver` must be NULL or a handle from an `ni_solver_*` constructor, not yet freed.
void ni_solver_free(struct NiSolver *solver);

// Polarization tensor computed by the solver.
//
// # Safety
// `solver` must be NULL or a live handle; `out` must be NULL or valid for four doubles.
enum NiStatus ni_solver_polarization(const struct NiSolver *solver, double *out);

// Number of boundary nodes.
//
// # Safety
// Pointers must be NULL or valid.
enum NiStatus ni_solver_nodes(const struct NiSolver *solver, size_t *out);

// Exterior potential `u(x1, x2)` for the applied field `(a1, a2)`.
//
// # Safety
// `solver` must be NULL or a live handle; `out` must be NULL or valid.
enum NiStatus ni_solver_field(const struct NiSolver *solver,
                              double a1,
                              double a2,
                              double x1,
                              double x2,
                              double *out);

// Field perturbation `u(x) - a.x` for the applied field `(a1, a2)`.
//
// # Safety
// `solver` must be NULL or a live handle; `out` must be NULL or valid.
enum NiStatus ni_solver_perturbation(const struct NiSolver *solver,
                                     double a1,
                                     double a2,
                                     double x1,
                                     double x2,
                                     double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NEUTRAL_INCLUSION_H */
