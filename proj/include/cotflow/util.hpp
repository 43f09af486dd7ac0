// Copyright 2026 The cotflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cotflow {

/// Throws Error(IoError) when the file cannot be read.
std::string read_text_file(const std::filesystem::path& path);

/// Creates parent directories as needed; throws Error(IoError) on failure.
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::string_view trim(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);

std::string join(const std::vector<std::string>& items, std::string_view sep);

bool ends_with(std::string_view text, std::string_view suffix);

/// Fixed-point rendering with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

}  // namespace cotflow
