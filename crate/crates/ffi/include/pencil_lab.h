#ifndef PENCIL_LAB_H
#define PENCIL_LAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PlStatus {
  PL_STATUS_OK = 0,
  PL_STATUS_CHECK_FAILED = 1,
  PL_STATUS_INVALID_INPUT = 2,
  PL_STATUS_SIZE_GUARD = 3,
  PL_STATUS_NULL_POINTER = 4,
  PL_STATUS_INTERNAL = 5,
} PlStatus;

/**
 * Opaque pencil handle.
 */
typedef struct PlPencil PlPencil;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Owned by the library.
 */
const char *pl_last_error(void);

/**
 * Parses a pencil from JSON: {"field": {"p","k","modulus"}, "A1": [[..]], "A2": [[..]]}.
 *
 * # Safety
 * `json` must be a valid C string and `out` a valid pointer.
 */
enum PlStatus pl_pencil_from_json(const char *json, struct PlPencil **out);

/**
 * Builds a named fixture; `q = 0` selects its default field.
 *
 * # Safety
 * `name` must be a valid C string and `out` a valid pointer.
 */
enum PlStatus pl_pencil_from_fixture(const char *name, uint32_t q, struct PlPencil **out);

/**
 * # Safety
 * `p` must come from a constructor here and not be freed twice. NULL is ignored.
 */
void pl_pencil_free(struct PlPencil *p);

/**
 * Number of variables N, or 0 for NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
size_t pl_pencil_dim(const struct PlPencil *p);

/**
 * Field order q, or 0 for NULL.
 *
 * # Safety
 * `p` must be NULL or a live handle.
 */
uint32_t pl_pencil_field_order(const struct PlPencil *p);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library.
 */
void pl_string_free(char *s);

/**
 * Classification report as JSON.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum PlStatus pl_classify(const struct PlPencil *p, char **out);

/**
 * Profile count table as JSON.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum PlStatus pl_count(const struct PlPencil *p, bool force, char **out);

/**
 * Full verification report as JSON.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum PlStatus pl_verify(const struct PlPencil *p,
                        size_t samples,
                        uint64_t seed,
                        bool force,
                        char **out);

/**
 * Reduction report (odd N) or delta_v chain (even N) as JSON.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum PlStatus pl_reduce(const struct PlPencil *p, bool trace, bool force, char **out);

/**
 * Torsor checks as JSON.
 *
 * # Safety
 * `p` must be a live handle and `out` a valid pointer.
 */
enum PlStatus pl_verify_torsor(const struct PlPencil *p,
                               size_t samples,
                               uint64_t seed,
                               bool force,
                               char **out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* PENCIL_LAB_H */
