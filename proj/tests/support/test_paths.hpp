/*
 * Copyright (c) 2026 The trilimb authors
 * SPDX-License-Identifier: Apache-2.0
 */

#pragma once

#include <filesystem>

namespace trilimb::test {

inline std::filesystem::path source_dir() { return TRILIMB_SOURCE_DIR; }
inline std::filesystem::path trace_path(const char* name) { return source_dir() / "traces" / name; }
inline std::filesystem::path scene_path(const char* name) { return source_dir() / "scenes" / name; }
inline std::filesystem::path data_path(const char* name) { return source_dir() / "data" / name; }

}  // namespace trilimb::test
