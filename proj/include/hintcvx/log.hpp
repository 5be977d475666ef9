#pragma once

#include <spdlog/spdlog.h>

namespace hintcvx {

/// Applies HINTCVX_LOG (quiet | info | debug) to the default logger, which
/// writes to stderr. Unset means info.
void configure_logging();

}  // namespace hintcvx
