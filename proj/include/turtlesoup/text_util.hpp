// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace turtlesoup::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

// Collapses every run of whitespace into one space and trims the ends.
std::string collapse_whitespace(std::string_view s);

// Number of Unicode code points in a UTF-8 string. Malformed continuation
// bytes are counted as they come.
std::size_t utf8_length(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

// Lowercased alphanumeric word set; bytes >= 0x80 count as word characters
// so non-ASCII text still tokenizes.
std::set<std::string> word_tokens(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// "- item" / "* item" / "1. item" / "1) item" -> "item"
std::string strip_list_marker(std::string_view line);

bool iequals(std::string_view a, std::string_view b);

} // namespace turtlesoup::text
