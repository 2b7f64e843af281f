#include "safedet/c_api.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <span>
#include <string>

#include "safedet/core.hpp"
#include "safedet/eciou.hpp"

namespace {

int set_error(char* err, std::size_t err_len, const std::string& msg, int code) {
  if (err != nullptr && err_len > 0) {
    const std::size_t n = std::min(msg.size(), err_len - 1);
    std::memcpy(err, msg.data(), n);
    err[n] = '\0';
  }
  return code;
}

}  // namespace

extern "C" int safedet_abi_version(void) { return SAFEDET_ABI_VERSION; }

extern "C" const char* safedet_version(void) { return "1.0.0"; }

extern "C" int safedet_eciou_batch(const double* pred, const double* gt, size_t n, const double* origin,
                                   size_t origin_len, double alpha, int clamp_output, unsigned workers,
                                   double* values_out, double* grads_out, uint8_t* flags_out, char* err,
                                   size_t err_len) {
  if (n > 0 && (pred == nullptr || gt == nullptr))
    return set_error(err, err_len, "pred and gt must be non-null", SAFEDET_VALIDATION_ERROR);
  if (origin == nullptr && origin_len != 0)
    return set_error(err, err_len, "origin is null", SAFEDET_VALIDATION_ERROR);
  try {
    safedet::eciou::EcIouParams params;
    params.clamp_output = clamp_output != 0;
    const auto r = safedet::eciou::ec_iou_batch(std::span<const double>(pred, 5 * n), std::span<const double>(gt, 5 * n),
                                                std::span<const double>(origin, origin_len), alpha, params,
                                                safedet::resolve_workers(workers));
    if (values_out != nullptr) std::copy(r.values.begin(), r.values.end(), values_out);
    if (grads_out != nullptr) std::copy(r.grads.begin(), r.grads.end(), grads_out);
    if (flags_out != nullptr) std::copy(r.flags.begin(), r.flags.end(), flags_out);
    return SAFEDET_OK;
  } catch (const safedet::Error& e) {
    const int code = e.kind() == safedet::ErrorKind::ConfigError ? SAFEDET_CONFIG_ERROR
                     : e.kind() == safedet::ErrorKind::InvariantViolation ? SAFEDET_INTERNAL_ERROR
                                                                          : SAFEDET_VALIDATION_ERROR;
    return set_error(err, err_len, e.detail(), code);
  } catch (const std::exception& e) {
    return set_error(err, err_len, e.what(), SAFEDET_INTERNAL_ERROR);
  }
}
