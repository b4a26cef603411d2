#pragma once

// CSV ingestion. Files need a header row; dated files have a first column
// named "date" holding ISO-8601 dates (YYYY-MM-DD, optionally followed by
// 'T' or ' ' and HH:MM or HH:MM:SS, UTC), strictly increasing. Any
// malformed row is an error.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tlrisk/linalg.hpp"
#include "tlrisk/portfolio.hpp"
#include "tlrisk/regression.hpp"

namespace tlrisk::io {

/// Seconds since 1970-01-01T00:00:00.
std::int64_t parse_iso8601(std::string_view text);
std::string format_iso8601(std::int64_t seconds);

struct PlainCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

PlainCsv parse_plain_csv(std::string_view text, std::string_view source);

struct DatedTable {
  std::string source;
  std::vector<std::string> columns;  // value columns, without "date"
  std::vector<std::int64_t> times;
  Matrix values;                     // rows x columns
  /// Median spacing of consecutive dates, in seconds.
  std::int64_t period_seconds;

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index column(std::string_view name) const;
  /// Index of the first row dated at or after `time`.
  Eigen::Index first_at_or_after(std::int64_t time) const;
};

DatedTable parse_dated_csv(std::string_view text, std::string_view source);

std::string read_text_file(const std::filesystem::path& path);
DatedTable read_dated_csv(const std::filesystem::path& path);

/// "1d", "1h", "5m", "30s" and so on.
std::string period_label(std::int64_t seconds);

/// Needs "close" and "volume" columns.
AssetSeries asset_from_table(const DatedTable& table, std::string name);

/// Header line plus one line per row, numbers in 17 significant digits.
std::string matrix_to_csv(const std::vector<std::string>& header, const Matrix& values);

/// Signature feature matrix with the word labels ("S", "S_1", "S_1_2", ...)
/// as header.
std::string signature_features_csv(const Matrix& features, int channels, int order);

}  // namespace tlrisk::io
