/* C interface to the batched EC-IoU value/gradient kernel, for use from
 * foreign-function interfaces. All arrays are row-major and caller-owned. */
#ifndef SAFEDET_C_API_H
#define SAFEDET_C_API_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define SAFEDET_ABI_VERSION 1

enum safedet_status {
  SAFEDET_OK = 0,
  SAFEDET_VALIDATION_ERROR = 2,
  SAFEDET_CONFIG_ERROR = 3,
  SAFEDET_INTERNAL_ERROR = 4
};

/* Per-row gradient flags written to flags_out. */
enum safedet_grad_flag {
  SAFEDET_GRAD_SMOOTH = 0,
  SAFEDET_GRAD_NON_OVERLAPPING = 1,
  SAFEDET_GRAD_TOPOLOGY_BOUNDARY = 2
};

int safedet_abi_version(void);
const char* safedet_version(void);

/* pred, gt: n x 5 rows of (cx, cy, width, length, yaw).
 * origin: 2 values (shared) or 2n values (per row); origin_len says which.
 * values_out: n; grads_out: n x 5 (d/dcx, d/dcy, d/dw, d/dl, d/dyaw of the
 * prediction); flags_out: n. Any output pointer may be NULL.
 * workers = 0 selects the hardware concurrency.
 * On failure, a message such as "row 3: ..." is written to err (if non-NULL). */
int safedet_eciou_batch(const double* pred, const double* gt, size_t n, const double* origin, size_t origin_len,
                        double alpha, int clamp_output, unsigned workers, double* values_out, double* grads_out,
                        uint8_t* flags_out, char* err, size_t err_len);

#ifdef __cplusplus
}
#endif

#endif
