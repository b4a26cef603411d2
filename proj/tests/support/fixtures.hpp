#pragma once

// Writes synthetic CSV inputs and spec documents into a scratch directory.

#include <filesystem>
#include <fstream>
#include <string>

#include "tlrisk/io/canonical_json.hpp"
#include "tlrisk/io/csv.hpp"
#include "tlrisk/synthetic.hpp"

namespace tlrisk::testing {

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("tlrisk_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline constexpr std::int64_t kDay = 86400;
// 2020-01-01T00:00:00Z
inline constexpr std::int64_t kEpoch2020 = 1577836800;

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline void write_asset_csv(const std::filesystem::path& p, const AssetSeries& a, std::int64_t start = kEpoch2020,
                            std::int64_t step = kDay) {
  std::string s = "date,close,volume\n";
  for (Eigen::Index i = 0; i < a.close.size(); ++i)
    s += io::format_iso8601(start + i * step) + "," + io::format_double(a.close[i]) + "," +
         io::format_double(a.volume[i]) + "\n";
  write_text(p, s);
}

inline void write_returns_csv(const std::filesystem::path& p, const Matrix& r, std::int64_t start = kEpoch2020,
                              std::int64_t step = kDay) {
  std::string s = "date";
  for (Eigen::Index j = 0; j < r.cols(); ++j) s += ",asset" + std::to_string(j);
  s += "\n";
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    s += io::format_iso8601(start + i * step);
    for (Eigen::Index j = 0; j < r.cols(); ++j) s += "," + io::format_double(r(i, j));
    s += "\n";
  }
  write_text(p, s);
}

inline void write_json(const std::filesystem::path& p, const io::Json& j) { write_text(p, io::to_canonical(j)); }

}  // namespace tlrisk::testing
