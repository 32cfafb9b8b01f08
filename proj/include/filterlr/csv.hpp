#pragma once

// Minimal RFC 4180 reader/writer used by the dataset loader and the result
// writers.

#include <string>
#include <string_view>
#include <vector>

namespace filterlr::csv {

using Row = std::vector<std::string>;

/// Splits text into records. Handles quoted fields, doubled quotes, embedded
/// newlines, CRLF line endings and a UTF-8 byte-order mark. Blank trailing
/// lines are ignored.
std::vector<Row> parse(std::string_view text);

/// Quotes a field only when it contains a comma, quote or line break.
std::string escape(std::string_view field);

std::string join(const Row& row);

/// "%.17g" formatting; reads back bit-exactly through strtod.
std::string format_double(double v);

/// Fixed-point text with `decimals` digits after the point.
std::string format_fixed(double v, int decimals);

}  // namespace filterlr::csv
