// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#include "evidoc/logging.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <string>

#include "evidoc/errors.hpp"

namespace evidoc {

void configure_logging(std::string_view level) {
  const auto parsed = spdlog::level::from_str(std::string(level));
  // from_str maps anything unrecognised to off.
  if (parsed == spdlog::level::off && level != "off") {
    throw ConfigError("unknown log level '" + std::string(level) + "'");
  }
  static const auto logger = [] {
    auto l = spdlog::stderr_color_mt("evidoc");
    spdlog::set_default_logger(l);
    return l;
  }();
  logger->set_level(parsed);
}

}  // namespace evidoc
