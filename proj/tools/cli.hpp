/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace trilimb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitTask = 2;

/// Environment variable naming the directory searched for `--scene NAME`.
inline constexpr const char* kSceneDirEnv = "TRILIMB_SCENE_DIR";

/// Entry point of the `trilimb` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trilimb::cli
