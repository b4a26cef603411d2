#include "tlrisk/mc_oracle.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "tlrisk/divergence.hpp"

namespace tlrisk {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededStream::next_u64() noexcept {
  ++counter_;
  return mix64(seed_ + counter_ * kGolden);
}

double SeededStream::uniform() noexcept {
  // 53 random bits, offset by half an ulp so 0 and 1 are never returned.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double SeededStream::normal() noexcept { return normal_quantile(uniform()); }

Vector SeededStream::normal_vector(Eigen::Index n) {
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
  return z;
}

SeededStream SeededStream::split(std::uint64_t index) const noexcept {
  return SeededStream(mix64(seed_ ^ mix64(index + 0x632BE59BD9B4E019ULL)));
}

double normal_quantile(double u) {
  // Acklam's algorithm.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;
  constexpr double high = 1.0 - low;
  require(u > 0.0 && u < 1.0, ErrorKind::InvalidArgument, "normal quantile needs u in (0, 1)");
  if (u < low) {
    const double q = std::sqrt(-2.0 * std::log(u));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (u <= high) {
    const double q = u - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - u));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_log_pdf(double x, double mean, double variance) {
  const double z = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + z * z / variance);
}

namespace {

Matrix sampling_factor(const Matrix& cov) {
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  return sym_sqrt(cov);
}

}  // namespace

Matrix sample_gaussian(const GaussianDist& dist, Eigen::Index n, SeededStream& stream) {
  require(n >= 1, ErrorKind::InvalidArgument, "sample count must be positive");
  const Matrix factor = sampling_factor(dist.cov());
  const Eigen::Index k = dist.dim();
  Matrix out(n, k);
  Vector z(k);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index i = 0; i < k; ++i) z[i] = stream.normal();
    out.row(r) = (dist.mean() + factor * z).transpose();
  }
  return out;
}

Matrix sample_joint(const GaussianJointTask& task, Eigen::Index n, SeededStream& stream) {
  return sample_gaussian(task.joint_law(), n, stream);
}

namespace {

// Streams n joint draws through `visit(x, y)` without materializing them.
template <typename Visit>
void for_each_draw(const GaussianJointTask& task, Eigen::Index n, SeededStream& stream, Visit&& visit) {
  const Matrix factor = sampling_factor(task.cov());
  const Eigen::Index k = task.dim_x() + task.dim_y();
  Vector z(k), draw(k);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index i = 0; i < k; ++i) z[i] = stream.normal();
    draw.noalias() = task.mean() + factor * z;
    visit(draw.head(task.dim_x()), draw.tail(task.dim_y()));
  }
}

// Welford accumulator.
struct Running {
  double mean = 0.0;
  double m2 = 0.0;
  Eigen::Index count = 0;

  void add(double v) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  McEstimate result() const {
    const double var = count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(count))};
  }
};

void check_model(const AffineModel& model, const GaussianJointTask& task) {
  require(model.input_dim() == task.dim_x() && model.output_dim() == task.dim_y() &&
              model.intercept.size() == task.dim_y(),
          ErrorKind::DimensionMismatch, "model shape does not match task");
}

}  // namespace

McEstimate mc_loss(const AffineModel& model, const GaussianJointTask& task, Eigen::Index n, SeededStream& stream) {
  require(n >= 2, ErrorKind::InvalidArgument, "mc_loss needs at least two samples");
  check_model(model, task);
  Running acc;
  for_each_draw(task, n, stream, [&](const auto& x, const auto& y) {
    acc.add((y - model.weight * x - model.intercept).squaredNorm());
  });
  return acc.result();
}

McEstimate mc_loss_difference(const AffineModel& a, const AffineModel& b, const GaussianJointTask& task,
                              Eigen::Index n, SeededStream& stream) {
  require(n >= 2, ErrorKind::InvalidArgument, "mc_loss_difference needs at least two samples");
  check_model(a, task);
  check_model(b, task);
  Running acc;
  for_each_draw(task, n, stream, [&](const auto& x, const auto& y) {
    const double la = (y - a.weight * x - a.intercept).squaredNorm();
    const double lb = (y - b.weight * x - b.intercept).squaredNorm();
    acc.add(la - lb);
  });
  return acc.result();
}

McEstimate mc_w2_1d(const GaussianDist& p, const GaussianDist& q, Eigen::Index n, SeededStream& stream) {
  require(p.dim() == 1 && q.dim() == 1, ErrorKind::NotOneDimensional, "mc_w2_1d takes 1D Gaussians");
  require(n >= 2, ErrorKind::InvalidArgument, "mc_w2_1d needs at least two samples");
  const double mp = p.mean()[0], sp = std::sqrt(std::max(p.cov()(0, 0), 0.0));
  const double mq = q.mean()[0], sq = std::sqrt(std::max(q.cov()(0, 0), 0.0));
  std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double z = stream.normal();
    xs[i] = mp + sp * z;
    ys[i] = mq + sq * z;
  }
  const double estimate = wp_empirical_1d(EmpiricalSample1D(xs), EmpiricalSample1D(ys), 2.0);
  // The sorted coupling pairs xs[i] with ys[i] here, so the per-pair terms
  // are i.i.d. and give the standard error directly.
  Running acc;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double diff = xs[i] - ys[i];
    acc.add(diff * diff);
  }
  return {estimate, acc.result().std_error};
}

namespace {

template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm, double fb, double whole, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double kl_quadrature_1d(const GaussianDist& p, const GaussianDist& q) {
  require(p.dim() == 1 && q.dim() == 1, ErrorKind::NotOneDimensional, "kl_quadrature_1d takes 1D Gaussians");
  const double vq = q.cov()(0, 0);
  require(vq > 0.0, ErrorKind::SingularReference, "reference variance must be positive");
  const double vp = p.cov()(0, 0);
  require(vp > 0.0, ErrorKind::InvalidArgument, "quadrature needs a nondegenerate p");
  const double mp = p.mean()[0], mq = q.mean()[0];
  const double sd = std::sqrt(vp);
  auto integrand = [&](double x) {
    const double lp = normal_log_pdf(x, mp, vp);
    return std::exp(lp) * (lp - normal_log_pdf(x, mq, vq));
  };
  constexpr int kPanels = 48;
  const double lo = mp - 12.0 * sd;
  const double width = 24.0 * sd / kPanels;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double a = lo + width * i, b = a + width, m = 0.5 * (a + b);
    const double fa = integrand(a), fm = integrand(m), fb = integrand(b);
    const double whole = width / 6.0 * (fa + 4.0 * fm + fb);
    total += adaptive_simpson(integrand, a, b, fa, fm, fb, whole, 1e-14, 40);
  }
  return total;
}

Matrix random_spd(SeededStream& stream, Eigen::Index n, double lo, double hi) {
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = stream.normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  const Matrix q = qr.householderQ();
  Vector eig(n);
  for (Eigen::Index i = 0; i < n; ++i) eig[i] = stream.uniform(lo, hi);
  return symmetrized(q * eig.asDiagonal() * q.transpose());
}

GaussianJointTask random_joint_task(SeededStream& stream, Eigen::Index dim_x, Eigen::Index dim_y) {
  const Eigen::Index n = dim_x + dim_y;
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = stream.normal();
  Matrix cov = a * a.transpose() / static_cast<double>(n);
  cov.diagonal().array() += 0.5;
  Vector mean(n);
  for (Eigen::Index i = 0; i < n; ++i) mean[i] = stream.uniform(-1.0, 1.0);
  return GaussianJointTask(dim_x, dim_y, std::move(mean), symmetrized(cov));
}

}  // namespace tlrisk
