#include "fpk/error.hpp"

namespace fpk {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::invalid_argument: return "INVALID_ARGUMENT";
    case Errc::order_window: return "ORDER_WINDOW";
    case Errc::bad_bounds: return "BAD_BOUNDS";
    case Errc::parse_error: return "PARSE_ERROR";
    case Errc::eval_error: return "EVAL_ERROR";
    case Errc::nonconverged: return "NONCONVERGED";
    case Errc::infeasible: return "INFEASIBLE";
    case Errc::wrong_regime: return "WRONG_REGIME";
    case Errc::zero_function: return "ZERO_FUNCTION";
    case Errc::wrong_class: return "WRONG_CLASS";
    case Errc::no_root: return "NO_ROOT";
    case Errc::threshold_exceeded: return "THRESHOLD_EXCEEDED";
    case Errc::regime_mismatch: return "REGIME_MISMATCH";
    case Errc::not_admissible: return "NOT_ADMISSIBLE";
    case Errc::no_admissible_start: return "NO_ADMISSIBLE_START";
    case Errc::energy_increased: return "ENERGY_INCREASED";
    case Errc::io_error: return "IO_ERROR";
    case Errc::validation_error: return "VALIDATION_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace fpk
