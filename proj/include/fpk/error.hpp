#pragma once

#include <stdexcept>
#include <string>

namespace fpk {

// Error classes surfaced by the library. The numeric values double as CLI
// exit codes (0 is reserved for success).
enum class Errc : int {
  invalid_argument = 1,
  order_window = 2,
  bad_bounds = 3,
  parse_error = 4,
  eval_error = 5,
  nonconverged = 6,
  infeasible = 7,
  wrong_regime = 8,
  zero_function = 9,
  wrong_class = 10,
  no_root = 11,
  threshold_exceeded = 12,
  regime_mismatch = 13,
  not_admissible = 14,
  no_admissible_start = 15,
  energy_increased = 16,
  io_error = 17,
  validation_error = 18,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace fpk
