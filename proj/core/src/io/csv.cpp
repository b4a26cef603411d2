#include "tlrisk/io/csv.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tlrisk/io/canonical_json.hpp"
#include "tlrisk/signature.hpp"

namespace tlrisk::io {

namespace {

int parse_fixed_int(std::string_view s, std::string_view whole) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorKind::ParseError,
          "malformed date '" + std::string(whole) + "'");
  return v;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

}  // namespace

std::int64_t parse_iso8601(std::string_view text) {
  require(text.size() == 10 || text.size() == 16 || text.size() == 19, ErrorKind::ParseError,
          "malformed date '" + std::string(text) + "'");
  require(text[4] == '-' && text[7] == '-', ErrorKind::ParseError, "malformed date '" + std::string(text) + "'");
  const int y = parse_fixed_int(text.substr(0, 4), text);
  const int m = parse_fixed_int(text.substr(5, 2), text);
  const int d = parse_fixed_int(text.substr(8, 2), text);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  require(ymd.ok(), ErrorKind::ParseError, "invalid calendar date '" + std::string(text) + "'");
  std::int64_t seconds = std::chrono::sys_days(ymd).time_since_epoch().count() * 86400LL;
  if (text.size() > 10) {
    require(text[10] == 'T' || text[10] == ' ', ErrorKind::ParseError, "malformed time in '" + std::string(text) + "'");
    require(text[13] == ':', ErrorKind::ParseError, "malformed time in '" + std::string(text) + "'");
    const int hh = parse_fixed_int(text.substr(11, 2), text);
    const int mm = parse_fixed_int(text.substr(14, 2), text);
    int ss = 0;
    if (text.size() == 19) {
      require(text[16] == ':', ErrorKind::ParseError, "malformed time in '" + std::string(text) + "'");
      ss = parse_fixed_int(text.substr(17, 2), text);
    }
    require(hh < 24 && mm < 60 && ss < 60, ErrorKind::ParseError, "time out of range in '" + std::string(text) + "'");
    seconds += hh * 3600 + mm * 60 + ss;
  }
  return seconds;
}

std::string format_iso8601(std::int64_t seconds) {
  const std::int64_t days = (seconds >= 0 ? seconds : seconds - 86399) / 86400;
  const std::int64_t rem = seconds - days * 86400;
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char buf[32];
  if (rem == 0)
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()));
  else
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
  return buf;
}

PlainCsv parse_plain_csv(std::string_view text, std::string_view source) {
  PlainCsv csv;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::vector<std::string> lines;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    pos = nl + 1;
  }
  // A single trailing newline leaves one empty last line.
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  require(!lines.empty(), ErrorKind::ParseError, std::string(source) + ": empty file, a header row is required");
  for (const auto& line : lines) {
    ++line_no;
    require(!trim(line).empty(), ErrorKind::ParseError, where(source, line_no) + ": blank line");
    require(line.find('"') == std::string::npos, ErrorKind::ParseError,
            where(source, line_no) + ": quoted fields are not supported");
    auto fields = split_fields(line);
    if (line_no == 1) {
      for (const auto& f : fields) require(!f.empty(), ErrorKind::ParseError, where(source, 1) + ": empty header name");
      csv.header = std::move(fields);
      continue;
    }
    require(fields.size() == csv.header.size(), ErrorKind::ParseError,
            where(source, line_no) + ": expected " + std::to_string(csv.header.size()) + " fields, found " +
                std::to_string(fields.size()));
    csv.rows.push_back(std::move(fields));
  }
  return csv;
}

Eigen::Index DatedTable::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  require(it != columns.end(), ErrorKind::SchemaError, source + ": missing column '" + std::string(name) + "'");
  return it - columns.begin();
}

Eigen::Index DatedTable::first_at_or_after(std::int64_t time) const {
  return std::lower_bound(times.begin(), times.end(), time) - times.begin();
}

namespace {

double parse_number(const std::string& s, std::string_view source, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(!s.empty() && res.ec == std::errc() && res.ptr == s.data() + s.size(), ErrorKind::ParseError,
          where(source, line) + ": '" + s + "' is not a number");
  require(std::isfinite(v), ErrorKind::ParseError, where(source, line) + ": non-finite value");
  return v;
}

}  // namespace

DatedTable parse_dated_csv(std::string_view text, std::string_view source) {
  const PlainCsv csv = parse_plain_csv(text, source);
  require(csv.header.front() == "date", ErrorKind::SchemaError,
          std::string(source) + ": first column must be named 'date'");
  require(csv.header.size() >= 2, ErrorKind::SchemaError, std::string(source) + ": no value columns");
  require(csv.rows.size() >= 2, ErrorKind::InsufficientHistory, std::string(source) + ": fewer than two data rows");
  DatedTable t;
  t.source = std::string(source);
  t.columns.assign(csv.header.begin() + 1, csv.header.end());
  t.values.resize(static_cast<Eigen::Index>(csv.rows.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    const std::size_t line = r + 2;
    std::int64_t time = 0;
    try {
      time = parse_iso8601(row[0]);
    } catch (const Error& e) {
      fail(ErrorKind::ParseError, where(source, line) + ": " + e.what());
    }
    require(t.times.empty() || time > t.times.back(), ErrorKind::ParseError,
            where(source, line) + ": dates must be strictly increasing");
    t.times.push_back(time);
    for (std::size_t c = 1; c < row.size(); ++c)
      t.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) = parse_number(row[c], source, line);
  }
  std::vector<std::int64_t> deltas;
  for (std::size_t i = 1; i < t.times.size(); ++i) deltas.push_back(t.times[i] - t.times[i - 1]);
  std::nth_element(deltas.begin(), deltas.begin() + static_cast<std::ptrdiff_t>(deltas.size() / 2), deltas.end());
  t.period_seconds = deltas[deltas.size() / 2];
  return t;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

DatedTable read_dated_csv(const std::filesystem::path& path) {
  return parse_dated_csv(read_text_file(path), path.string());
}

std::string period_label(std::int64_t seconds) {
  if (seconds > 0 && seconds % 86400 == 0) return std::to_string(seconds / 86400) + "d";
  if (seconds > 0 && seconds % 3600 == 0) return std::to_string(seconds / 3600) + "h";
  if (seconds > 0 && seconds % 60 == 0) return std::to_string(seconds / 60) + "m";
  return std::to_string(seconds) + "s";
}

AssetSeries asset_from_table(const DatedTable& table, std::string name) {
  AssetSeries a;
  a.name = std::move(name);
  a.close = table.values.col(table.column("close"));
  a.volume = table.values.col(table.column("volume"));
  return a;
}

std::string matrix_to_csv(const std::vector<std::string>& header, const Matrix& values) {
  require(header.size() == static_cast<std::size_t>(values.cols()), ErrorKind::DimensionMismatch,
          "header has " + std::to_string(header.size()) + " names for " + std::to_string(values.cols()) + " columns");
  std::string out;
  for (std::size_t j = 0; j < header.size(); ++j) out += (j ? "," : "") + header[j];
  out += '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out += ',';
      out += format_double(values(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string signature_features_csv(const Matrix& features, int channels, int order) {
  return matrix_to_csv(signature_labels(channels, order), features);
}

}  // namespace tlrisk::io
