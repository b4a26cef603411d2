#pragma once

// Truncated signatures of piecewise-linear paths.
//
// Coefficients are stored level by level (words of length 0, 1, ..., M),
// and within a level in lexicographic order of the word: word
// (i_1, ..., i_m) over channels {0..n-1} sits at offset
// sum_j i_j n^(m-j) inside level m. Labels are 1-based, e.g. "S_1_2".

#include <span>
#include <string>
#include <vector>

#include "tlrisk/linalg.hpp"

namespace tlrisk {

inline constexpr int kMaxSignatureOrder = 6;

/// 1 + n + ... + n^M.
std::size_t signature_dim(int channels, int order);

class TruncatedSignature {
 public:
  /// The signature of a constant path: 1 followed by zeros.
  TruncatedSignature(int channels, int order);

  int channels() const noexcept { return channels_; }
  int order() const noexcept { return order_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }

  std::span<const double> level(int m) const;
  std::span<double> level(int m);

  /// Coefficient of a word of 0-based channel indices.
  double operator[](std::span<const int> word) const;
  double at(std::initializer_list<int> word) const { return (*this)[std::span<const int>(word.begin(), word.size())]; }

 private:
  std::size_t level_offset(int m) const;

  int channels_;
  int order_;
  std::vector<double> coeffs_;
};

std::vector<std::string> signature_labels(int channels, int order);

/// exp(increment) truncated at `order`: level m is increment^{(x)m} / m!.
TruncatedSignature segment_signature(std::span<const double> increment, int order);

/// Truncated tensor product (Chen concatenation) of a followed by b.
TruncatedSignature chen_product(const TruncatedSignature& a, const TruncatedSignature& b);

class PiecewisePath {
 public:
  /// values is (m x n); times must be strictly increasing with m >= 2.
  PiecewisePath(Vector times, Matrix values);

  const Vector& times() const noexcept { return times_; }
  const Matrix& values() const noexcept { return values_; }
  Eigen::Index points() const noexcept { return values_.rows(); }
  int channels() const noexcept { return static_cast<int>(values_.cols()); }

 private:
  Vector times_;
  Matrix values_;
};

/// Signature of the linear interpolation of the samples. It does not
/// depend on the times vector (reparametrization invariance).
TruncatedSignature signature_of_path(const PiecewisePath& path, int order);

/// Row r is the signature of window [r, r + lag - 1] of `series`, with a
/// time channel normalized to [0, 1] prepended as channel 0. The result has
/// (T - lag + 1) rows and signature_dim(n + 1, order) columns.
Matrix windowed_signature_features(const Matrix& series, int lag, int order);

}  // namespace tlrisk
