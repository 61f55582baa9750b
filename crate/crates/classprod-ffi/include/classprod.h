#ifndef CLASSPROD_H
#define CLASSPROD_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes. Values 2 and 3 match the CLI exit codes for bad input and
 capacity limits.
 */
typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_POINTER = 1,
  CP_STATUS_INVALID_INPUT = 2,
  CP_STATUS_CAPACITY = 3,
  CP_STATUS_INTERNAL = 4,
  /*
   The result does not fit the requested integer type.
   */
  CP_STATUS_OVERFLOW = 5,
  CP_STATUS_INVALID_UTF8 = 6,
} CpStatus;

/*
 A group such as GL(3,q) or PSU(3,q²).
 */
typedef struct CpGroup CpGroup;

/*
 A tuple of conjugacy classes of one group.
 */
typedef struct CpTuple CpTuple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failure on this thread. The pointer stays valid
 until the next failing call on the same thread.
 */
const char *cp_last_error(void);

/*
 Parses a group name such as `"GL3:4"` or `"PSU3:5"`.

 # Safety
 `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CpStatus cp_group_new(const char *name, struct CpGroup **out);

/*
 # Safety
 `g` must come from [`cp_group_new`] and not be used afterwards. Null is
 ignored.
 */
void cp_group_free(struct CpGroup *g);

/*
 Group order as a decimal string, to be released with [`cp_string_free`].

 # Safety
 `g` must be a live group handle and `out` a valid pointer.
 */
enum CpStatus cp_group_order(const struct CpGroup *g, char **out);

/*
 Parses a comma-separated class list such as `"C7[1,1],C7[1,1],C2[0]"`.

 # Safety
 `g` must be a live group handle, `labels` a NUL-terminated string and
 `out` a valid pointer.
 */
enum CpStatus cp_tuple_new(const struct CpGroup *g, const char *labels, struct CpTuple **out);

/*
 # Safety
 `t` must come from [`cp_tuple_new`] and not be used afterwards. Null is
 ignored.
 */
void cp_tuple_free(struct CpTuple *t);

/*
 Number of classes in the tuple, or 0 for a null handle.

 # Safety
 `t` must be null or a live tuple handle.
 */
uintptr_t cp_tuple_len(const struct CpTuple *t);

/*
 The structure constant N as a decimal string, to be released with
 [`cp_string_free`].

 # Safety
 `t` must be a live tuple handle and `out` a valid pointer.
 */
enum CpStatus cp_n_count(const struct CpTuple *t, char **out);

/*
 The structure constant N when it fits in 64 bits.

 # Safety
 `t` must be a live tuple handle and `out` a valid pointer.
 */
enum CpStatus cp_n_count_u64(const struct CpTuple *t, uint64_t *out);

/*
 Whether the identity lies in the product of the classes. Writes 1 or 0.

 # Safety
 `t` must be a live tuple handle and `out` a valid pointer.
 */
enum CpStatus cp_decide(const struct CpTuple *t, int32_t *out);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not be used afterwards.
 */
void cp_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CLASSPROD_H */
