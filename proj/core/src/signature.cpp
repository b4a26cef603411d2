#include "tlrisk/signature.hpp"

#include <string>
#include <utility>
#include <vector>

namespace tlrisk {

namespace {

void check_order(int order) {
  require(order >= 1, ErrorKind::OrderZero, "signature order must be at least 1");
  require(order <= kMaxSignatureOrder, ErrorKind::OrderTooLarge,
          "signature order " + std::to_string(order) + " exceeds the maximum of 6");
}

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

std::size_t signature_dim(int channels, int order) {
  require(channels >= 1, ErrorKind::InvalidArgument, "signature needs at least one channel");
  require(order >= 1, ErrorKind::OrderZero, "signature order must be at least 1");
  if (channels == 1) return static_cast<std::size_t>(order) + 1;
  const auto n = static_cast<std::size_t>(channels);
  return (ipow(n, order + 1) - 1) / (n - 1);
}

TruncatedSignature::TruncatedSignature(int channels, int order) : channels_(channels), order_(order) {
  check_order(order);
  coeffs_.assign(signature_dim(channels, order), 0.0);
  coeffs_[0] = 1.0;
}

std::size_t TruncatedSignature::level_offset(int m) const {
  std::size_t off = 0;
  for (int j = 0; j < m; ++j) off += ipow(static_cast<std::size_t>(channels_), j);
  return off;
}

std::span<const double> TruncatedSignature::level(int m) const {
  require(m >= 0 && m <= order_, ErrorKind::InvalidArgument, "signature level out of range");
  return {coeffs_.data() + level_offset(m), ipow(static_cast<std::size_t>(channels_), m)};
}

std::span<double> TruncatedSignature::level(int m) {
  require(m >= 0 && m <= order_, ErrorKind::InvalidArgument, "signature level out of range");
  return {coeffs_.data() + level_offset(m), ipow(static_cast<std::size_t>(channels_), m)};
}

double TruncatedSignature::operator[](std::span<const int> word) const {
  const int m = static_cast<int>(word.size());
  std::size_t idx = 0;
  for (int letter : word) {
    require(letter >= 0 && letter < channels_, ErrorKind::InvalidArgument, "word letter out of range");
    idx = idx * static_cast<std::size_t>(channels_) + static_cast<std::size_t>(letter);
  }
  return level(m)[idx];
}

std::vector<std::string> signature_labels(int channels, int order) {
  check_order(order);
  std::vector<std::string> labels{"S"};
  std::vector<std::string> prev{""};
  for (int m = 1; m <= order; ++m) {
    std::vector<std::string> cur;
    cur.reserve(prev.size() * static_cast<std::size_t>(channels));
    for (const auto& stem : prev)
      for (int c = 1; c <= channels; ++c) cur.push_back(stem + "_" + std::to_string(c));
    for (const auto& w : cur) labels.push_back("S" + w);
    prev = std::move(cur);
  }
  return labels;
}

TruncatedSignature segment_signature(std::span<const double> increment, int order) {
  const int n = static_cast<int>(increment.size());
  TruncatedSignature sig(n, order);
  // Raw tensor powers first, then one division by m! per level, so each
  // coefficient is the plain product of increments over m!.
  std::vector<double> prev{1.0}, cur;
  double factorial = 1.0;
  for (int m = 1; m <= order; ++m) {
    factorial *= m;
    cur.clear();
    for (double p : prev)
      for (double d : increment) cur.push_back(p * d);
    auto dst = sig.level(m);
    for (std::size_t k = 0; k < cur.size(); ++k) dst[k] = cur[k] / factorial;
    std::swap(prev, cur);
  }
  return sig;
}

TruncatedSignature chen_product(const TruncatedSignature& a, const TruncatedSignature& b) {
  require(a.channels() == b.channels() && a.order() == b.order(), ErrorKind::DimensionMismatch,
          "Chen product needs signatures of the same shape");
  TruncatedSignature out(a.channels(), a.order());
  for (int m = 1; m <= a.order(); ++m) {
    auto dst = out.level(m);
    for (int i = 0; i <= m; ++i) {
      const auto left = a.level(i);
      const auto right = b.level(m - i);
      std::size_t k = 0;
      for (double x : left)
        for (double y : right) dst[k++] += x * y;
    }
  }
  return out;
}

PiecewisePath::PiecewisePath(Vector times, Matrix values) : times_(std::move(times)), values_(std::move(values)) {
  require(values_.rows() >= 2, ErrorKind::DegeneratePath, "a path needs at least two points");
  require(values_.cols() >= 1, ErrorKind::InvalidArgument, "a path needs at least one channel");
  require(times_.size() == values_.rows(), ErrorKind::DimensionMismatch, "times and values lengths differ");
  require(values_.allFinite() && times_.allFinite(), ErrorKind::InvalidArgument, "path has non-finite entries");
  for (Eigen::Index i = 1; i < times_.size(); ++i)
    require(times_[i] > times_[i - 1], ErrorKind::InvalidArgument, "path times must be strictly increasing");
}

namespace {

TruncatedSignature signature_of_rows(const Matrix& values, int order) {
  const int n = static_cast<int>(values.cols());
  TruncatedSignature sig(n, order);
  std::vector<double> inc(static_cast<std::size_t>(n));
  for (Eigen::Index r = 1; r < values.rows(); ++r) {
    for (int c = 0; c < n; ++c) inc[static_cast<std::size_t>(c)] = values(r, c) - values(r - 1, c);
    const TruncatedSignature seg = segment_signature(inc, order);
    sig = r == 1 ? seg : chen_product(sig, seg);
  }
  return sig;
}

}  // namespace

TruncatedSignature signature_of_path(const PiecewisePath& path, int order) {
  check_order(order);
  return signature_of_rows(path.values(), order);
}

Matrix windowed_signature_features(const Matrix& series, int lag, int order) {
  check_order(order);
  require(lag >= 2, ErrorKind::InvalidArgument, "window lag must be at least 2");
  require(series.rows() >= lag, ErrorKind::WindowTooLong,
          "window of " + std::to_string(lag) + " rows exceeds series of " + std::to_string(series.rows()));
  require(series.allFinite(), ErrorKind::InvalidArgument, "series has non-finite entries");
  const Eigen::Index n = series.cols();
  const Eigen::Index rows = series.rows() - lag + 1;
  const auto dim = static_cast<Eigen::Index>(signature_dim(static_cast<int>(n) + 1, order));
  Matrix features(rows, dim);
  Matrix window(lag, n + 1);
  for (Eigen::Index i = 0; i < lag; ++i) window(i, 0) = static_cast<double>(i) / static_cast<double>(lag - 1);
  for (Eigen::Index r = 0; r < rows; ++r) {
    window.rightCols(n) = series.middleRows(r, lag);
    const TruncatedSignature sig = signature_of_rows(window, order);
    features.row(r) = Eigen::Map<const Vector>(sig.coeffs().data(), dim).transpose();
  }
  return features;
}

}  // namespace tlrisk
