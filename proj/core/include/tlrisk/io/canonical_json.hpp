#pragma once

// Byte-stable JSON text: object keys sorted, two-space indentation, arrays
// of scalars kept on one line, and floating-point numbers written with 17
// significant digits (always with a '.' or exponent so they re-parse as
// floats).

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace tlrisk::io {

using Json = nlohmann::json;

std::string format_double(double value);

/// Throws SchemaError when the document holds a non-finite number.
std::string to_canonical(const Json& doc);

/// Throws ParseError with `what` in the message on malformed text.
Json parse_json(std::string_view text, std::string_view what);

/// True if every number in the document is finite.
bool all_finite(const Json& doc);

}  // namespace tlrisk::io
