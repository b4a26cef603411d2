#include "tlrisk/io/report.hpp"

#include <cmath>

#include "tlrisk/errors.hpp"
#include "tlrisk/mc_oracle.hpp"

#ifndef TLRISK_VERSION
#define TLRISK_VERSION "0.0.0"
#endif

namespace tlrisk::io {

std::string_view tool_version() noexcept { return TLRISK_VERSION; }

const Json& report_schema() {
  static const Json schema = Json::parse(
#include "report_schema.inc"
  );
  return schema;
}

namespace {

class Validator {
 public:
  explicit Validator(const Json& root) : root_(root) {}

  void check(const Json& doc, const Json& schema, const std::string& path, std::vector<std::string>& out) const {
    if (schema.is_boolean()) {
      if (!schema.get<bool>()) out.push_back(path + ": not allowed");
      return;
    }
    if (schema.contains("$ref")) {
      check(doc, resolve(schema.at("$ref").get<std::string>()), path, out);
    }
    if (schema.contains("type") && !type_matches(doc, schema.at("type"))) {
      out.push_back(path + ": expected type " + schema.at("type").dump());
      return;
    }
    if (schema.contains("const") && !(doc == schema.at("const")))
      out.push_back(path + ": expected " + schema.at("const").dump());
    if (schema.contains("enum")) {
      bool found = false;
      for (const auto& e : schema.at("enum")) found = found || doc == e;
      if (!found) out.push_back(path + ": value not in " + schema.at("enum").dump());
    }
    if (schema.contains("minimum") && doc.is_number() && doc.get<double>() < schema.at("minimum").get<double>())
      out.push_back(path + ": below minimum " + schema.at("minimum").dump());
    if (doc.is_object()) check_object(doc, schema, path, out);
    if (doc.is_array() && schema.contains("items"))
      for (std::size_t i = 0; i < doc.size(); ++i)
        check(doc[i], schema.at("items"), path + "[" + std::to_string(i) + "]", out);
    if (schema.contains("oneOf")) {
      int matches = 0;
      for (const auto& sub : schema.at("oneOf")) {
        std::vector<std::string> tmp;
        check(doc, sub, path, tmp);
        if (tmp.empty()) ++matches;
      }
      if (matches != 1) out.push_back(path + ": matches " + std::to_string(matches) + " oneOf branches, expected 1");
    }
  }

 private:
  const Json& resolve(const std::string& ref) const {
    require(ref.rfind("#/", 0) == 0, ErrorKind::SchemaError, "only local $ref supported: " + ref);
    return root_.at(Json::json_pointer(ref.substr(1)));
  }

  static bool type_matches(const Json& doc, const Json& type) {
    if (type.is_array()) {
      for (const auto& t : type)
        if (type_matches(doc, t)) return true;
      return false;
    }
    const std::string t = type.get<std::string>();
    if (t == "object") return doc.is_object();
    if (t == "array") return doc.is_array();
    if (t == "string") return doc.is_string();
    if (t == "boolean") return doc.is_boolean();
    if (t == "integer")
      return doc.is_number_integer() || (doc.is_number_float() && std::floor(doc.get<double>()) == doc.get<double>());
    if (t == "number") return doc.is_number();
    if (t == "null") return doc.is_null();
    return false;
  }

  void check_object(const Json& doc, const Json& schema, const std::string& path, std::vector<std::string>& out) const {
    if (schema.contains("required"))
      for (const auto& key : schema.at("required"))
        if (!doc.contains(key.get<std::string>())) out.push_back(path + ": missing '" + key.get<std::string>() + "'");
    const Json empty = Json::object();
    const Json& props = schema.contains("properties") ? schema.at("properties") : empty;
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const std::string child = path + "." + it.key();
      if (props.contains(it.key())) {
        check(it.value(), props.at(it.key()), child, out);
      } else if (schema.contains("additionalProperties")) {
        check(it.value(), schema.at("additionalProperties"), child, out);
      }
    }
  }

  const Json& root_;
};

}  // namespace

std::vector<std::string> schema_violations(const Json& doc, const Json& schema) {
  std::vector<std::string> out;
  Validator(schema).check(doc, schema, "$", out);
  return out;
}

void validate_report(const Json& report) {
  require(all_finite(report), ErrorKind::SchemaError, "report holds a non-finite number");
  const auto problems = schema_violations(report, report_schema());
  if (problems.empty()) return;
  std::string msg = "report does not match the schema:";
  for (std::size_t i = 0; i < problems.size() && i < 5; ++i) msg += "\n  " + problems[i];
  fail(ErrorKind::SchemaError, msg);
}

Json provenance(std::uint64_t seed, int jobs) {
  return Json{{"tool", "trisk"},
              {"version", std::string(tool_version())},
              {"seed", seed},
              {"rng", std::string(SeededStream::kAlgorithm)},
              {"jobs", jobs}};
}

Json make_report(std::string_view command, Json input, Json result, std::uint64_t seed, int jobs) {
  return Json{{"report_version", kReportVersion},
              {"command", std::string(command)},
              {"provenance", provenance(seed, jobs)},
              {"input", std::move(input)},
              {"result", std::move(result)}};
}

}  // namespace tlrisk::io
