#pragma once

// Report documents and their schema. The schema shipped in
// docs/report.schema.json is compiled in; validate_report checks a
// document against it (a JSON Schema subset: type, const, enum, minimum,
// required, properties, additionalProperties, items, oneOf and local $ref)
// and additionally requires every number to be finite.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tlrisk/io/canonical_json.hpp"

namespace tlrisk::io {

inline constexpr int kReportVersion = 1;

std::string_view tool_version() noexcept;

const Json& report_schema();

/// Human-readable problems; empty when the document is valid.
std::vector<std::string> schema_violations(const Json& doc, const Json& schema);

/// Throws SchemaError listing the first violations.
void validate_report(const Json& report);

Json provenance(std::uint64_t seed, int jobs);

Json make_report(std::string_view command, Json input, Json result, std::uint64_t seed, int jobs);

}  // namespace tlrisk::io
