#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mise::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: quoted fields, doubled quotes, CRLF or LF line ends.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote, or line break.
std::string escape(std::string_view field);
std::string format_row(const Row& row);

} // namespace mise::csv
