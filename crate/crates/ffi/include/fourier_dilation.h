#ifndef FOURIER_DILATION_H
#define FOURIER_DILATION_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum FdStatus {
  FD_STATUS_OK = 0,
  FD_STATUS_NULL_POINTER = 1,
  FD_STATUS_INVALID_UTF8 = 2,
  FD_STATUS_INVALID_ARGUMENT = 3,
  FD_STATUS_PARSE = 4,
  FD_STATUS_GROUP_AXIOM = 5,
  FD_STATUS_OUT_OF_RANGE = 6,
  FD_STATUS_NOT_CERTIFIED = 7,
  FD_STATUS_CONSTRUCTION = 8,
  FD_STATUS_QUADRATURE = 9,
  FD_STATUS_IO = 10,
  FD_STATUS_BUFFER_TOO_SMALL = 11,
  FD_STATUS_PANIC = 12,
  FD_STATUS_INTERNAL = 13,
} FdStatus;

// A 1-cocycle `(b, pi)` extracted from a certified symbol.
typedef struct FdCocycle FdCocycle;

// A finite group.
typedef struct FdGroup FdGroup;

// A complex-valued function on a finite group.
typedef struct FdSymbol FdSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null if the last call
// succeeded. The pointer stays valid until the next `fd_*` call on the
// same thread.
const char *fd_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void fd_string_free(char *s);

// Builds a group from a description such as `"cyclic 4"`,
// `"dihedral 3"`, `"symmetric 3"` or `"cyclic 2 x cyclic 3"`.
//
// # Safety
// `spec` must be a valid C string, `out` a valid pointer.
enum FdStatus fd_group_from_spec(const char *spec, struct FdGroup **out);

// Parses a Cayley table: a line `order n`, then `n` rows of `n`
// whitespace-separated indices with the identity at index 0.
//
// # Safety
// `text` must be a valid C string, `out` a valid pointer.
enum FdStatus fd_group_from_cayley_text(const char *text, struct FdGroup **out);

// Order of the group; 0 for a null handle.
//
// # Safety
// `g` must be null or a live handle.
size_t fd_group_order(const struct FdGroup *g);

// # Safety
// `g` must be a live handle, `out` a valid pointer.
enum FdStatus fd_group_multiply(const struct FdGroup *g, size_t a, size_t b, size_t *out);

// # Safety
// `g` must be null or a handle not yet freed.
void fd_group_free(struct FdGroup *g);

// Real-valued symbol with `values[s]` at element `s`; `len` must equal
// the group order.
//
// # Safety
// `g` must be a live handle and `values` point to `len` doubles.
enum FdStatus fd_symbol_from_values(const struct FdGroup *g,
                                    const double *values,
                                    size_t len,
                                    struct FdSymbol **out);

// Named symbol on `g`: `zero`, `delta`, `delta:C`, `circle`,
// `word-length`.
//
// # Safety
// `g` must be a live handle, `spec` a valid C string.
enum FdStatus fd_symbol_named(const struct FdGroup *g, const char *spec, struct FdSymbol **out);

// One of the built-in fixtures (`z2-delta`, `z3-circle`, `z4-circle`,
// `z8-circle`, `s3-word`).
//
// # Safety
// `name` must be a valid C string, `out` a valid pointer.
enum FdStatus fd_symbol_builtin(const char *name, struct FdSymbol **out);

// New handle to the group a symbol lives on.
//
// # Safety
// `psi` must be a live handle, `out` a valid pointer.
enum FdStatus fd_symbol_group(const struct FdSymbol *psi, struct FdGroup **out);

// # Safety
// `psi` must be null or a handle not yet freed.
void fd_symbol_free(struct FdSymbol *psi);

// Certifies `psi` as conditionally of negative type. `*verdict` is 1 if
// certified and 0 otherwise; a non-certified symbol is not an error.
//
// # Safety
// `psi` must be a live handle, `verdict` a valid pointer.
enum FdStatus fd_check_symbol(const struct FdSymbol *psi, double tol, int32_t *verdict);

// Extracts `(b, pi)` from a certified symbol.
//
// # Safety
// `psi` must be a live handle, `out` a valid pointer.
enum FdStatus fd_cocycle_extract(const struct FdSymbol *psi,
                                 double rank_tol,
                                 struct FdCocycle **out);

// Dimension of the cocycle's Hilbert space; 0 for a null handle.
//
// # Safety
// `c` must be null or a live handle.
size_t fd_cocycle_dim(const struct FdCocycle *c);

// Copies `b(s)` (length `dim`) into `out`.
//
// # Safety
// `c` must be a live handle and `out` point to `len` writable doubles.
enum FdStatus fd_cocycle_b(const struct FdCocycle *c, size_t s, double *out, size_t len);

// Copies `pi(s)` (`dim * dim`, row-major) into `out`.
//
// # Safety
// `c` must be a live handle and `out` point to `len` writable doubles.
enum FdStatus fd_cocycle_pi(const struct FdCocycle *c, size_t s, double *out, size_t len);

// # Safety
// `c` must be null or a handle not yet freed.
void fd_cocycle_free(struct FdCocycle *c);

// Runs the full dilation verification under both conventions. On success
// `*json` receives the report (release with [`fd_string_free`]) and
// `*pass` is 1 if every check passed. `t_grid` may be null with
// `t_len == 0` for the default grid; `samples == 0` selects the default.
//
// # Safety
// `psi` must be a live handle, `t_grid` point to `t_len` doubles, and
// `json`, `pass` be valid pointers.
enum FdStatus fd_dilate(const struct FdSymbol *psi,
                        const double *t_grid,
                        size_t t_len,
                        uint64_t seed,
                        size_t samples,
                        char **json,
                        int32_t *pass);

// Applies `f(A_psi)` through the contour integral at half-angle `nu`,
// writing `Re f(psi(s))` and `Im f(psi(s))` into `out_re` / `out_im`
// (each of length `len >= order`). `out_im` may be null. `function` is
// `power:A` or `exp:T:EPS`.
//
// # Safety
// `psi` must be a live handle, `function` a valid C string, and the output
// buffers hold `len` doubles.
enum FdStatus fd_hinfty_apply(const struct FdSymbol *psi,
                              const char *function,
                              double nu,
                              double *out_re,
                              double *out_im,
                              size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOURIER_DILATION_H */
