#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mise {

/// Fixed 9-significant-digit rendering used by every numeric artifact.
/// Negative zero prints as "0" so reruns stay byte-stable.
std::string format_sig9(double value);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string xml_escape(std::string_view s);

/// Well-formed UTF-8 (no overlongs, surrogates, or code points past U+10FFFF).
bool is_valid_utf8(std::string_view s);

} // namespace mise
