#include "hintcvx/log.hpp"

#include <cstdlib>
#include <string_view>

#include <spdlog/sinks/stdout_sinks.h>

namespace hintcvx {

void configure_logging() {
    auto logger = spdlog::stderr_logger_st("hintcvx");
    logger->set_pattern("[%l] %v");
    spdlog::set_default_logger(logger);
    const char* env = std::getenv("HINTCVX_LOG");
    const std::string_view level = env ? env : "info";
    if (level == "quiet")
        spdlog::set_level(spdlog::level::off);
    else if (level == "debug")
        spdlog::set_level(spdlog::level::debug);
    else
        spdlog::set_level(spdlog::level::info);
}

}  // namespace hintcvx
