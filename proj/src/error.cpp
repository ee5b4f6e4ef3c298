#include "semproc/error.hpp"

namespace semproc {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::quadrature_failure: return "quadrature-failure";
    case Errc::no_bound: return "no-bound";
    case Errc::net_too_large: return "net-too-large";
    case Errc::instance_too_large: return "instance-too-large";
    case Errc::not_psd: return "not-psd";
    case Errc::lemma_violation: return "lemma-violation";
    case Errc::unsupported_model: return "unsupported-model";
    case Errc::config_error: return "config-error";
    case Errc::io_error: return "io-error";
    case Errc::overflow: return "overflow";
  }
  return "unknown";
}

}  // namespace semproc

