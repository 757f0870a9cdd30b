#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace intentdisc {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::string read_file(const std::string& path);
/// Non-empty, trimmed lines; lines starting with '#' are comments.
std::vector<std::string> read_lines(const std::string& path);

}  // namespace intentdisc
