#pragma once

#include <stdexcept>
#include <string>

namespace semproc {

enum class Errc {
  invalid_argument,
  quadrature_failure,
  no_bound,
  net_too_large,
  instance_too_large,
  not_psd,
  lemma_violation,
  unsupported_model,
  config_error,
  io_error,
  overflow,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Carries the best estimate reached before refinement gave up.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double partial, double error_estimate)
      : Error(Errc::quadrature_failure, what), partial_(partial), error_(error_estimate) {}
  double partial_value() const noexcept { return partial_; }
  double error_estimate() const noexcept { return error_; }

 private:
  double partial_;
  double error_;
};

// Net construction refused; `required` is the estimated member count.
class NetTooLarge : public Error {
 public:
  NetTooLarge(const std::string& what, double required)
      : Error(Errc::net_too_large, what), required_(required) {}
  double required_size() const noexcept { return required_; }

 private:
  double required_;
};

}  // namespace semproc
