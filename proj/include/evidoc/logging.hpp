// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The evidoc Authors

#pragma once

#include <string_view>

namespace evidoc {

/// Routes library diagnostics to stderr at the given level:
/// trace, debug, info, warn, error, critical or off. Throws ConfigError otherwise.
void configure_logging(std::string_view level);

}  // namespace evidoc
