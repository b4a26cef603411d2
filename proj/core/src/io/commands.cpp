#include "tlrisk/io/commands.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "tlrisk/gaussian_transfer.hpp"
#include "tlrisk/io/csv.hpp"
#include "tlrisk/io/report.hpp"
#include "tlrisk/mc_oracle.hpp"
#include "tlrisk/portfolio.hpp"
#include "tlrisk/props.hpp"
#include "tlrisk/regression.hpp"
#include "tlrisk/transfer_risk.hpp"

namespace tlrisk::io {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "trisk: " << e.what() << "\n";
    return is_validation_error(e.kind()) ? kExitValidation : kExitNumerical;
  } catch (const Json::exception& e) {
    err << "trisk: SchemaError: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "trisk: " << e.what() << "\n";
    return kExitNumerical;
  }
}

namespace {

Json vec_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vector vec_from(const Json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

Json mat_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

void emit(const Json& report, const CommonOptions& common, std::ostream& out) {
  validate_report(report);
  const std::string text = to_canonical(report);
  if (common.out) {
    std::ofstream f(*common.out, std::ios::binary);
    require(static_cast<bool>(f), ErrorKind::IoError, "cannot write " + common.out->string());
    f << text;
    require(static_cast<bool>(f), ErrorKind::IoError, "failed writing " + common.out->string());
  } else {
    out << text;
  }
}

void check_common(const CommonOptions& c) {
  require(c.jobs >= 1, ErrorKind::InvalidArgument, "--jobs must be at least 1");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

// ---------------------------------------------------------------------------
// gaussian-risk

struct GaussianModels {
  AffineModel intermediate;
  AffineModel target_optimal;
  const GaussianJointTask* target;
};

AffineModel stack(const AffineModel& top, const AffineModel& bottom) {
  AffineModel m;
  m.weight.resize(top.weight.rows() + bottom.weight.rows(), top.weight.cols());
  m.weight << top.weight, bottom.weight;
  m.intercept.resize(top.intercept.size() + bottom.intercept.size());
  m.intercept << top.intercept, bottom.intercept;
  return m;
}

// L_T(g) - L_T(f*) = E || f*(X) - g(X) ||^2 under the target input law.
double regret_of_model(const AffineModel& g, const GaussianJointTask& target) {
  const AffineModel f = fit_optimal_affine(target);
  const Matrix dw = f.weight - g.weight;
  const Vector db = f.intercept - g.intercept;
  const Vector mean_gap = dw * target.mean_x() + db;
  return mean_gap.squaredNorm() + (dw * target.cov_x() * dw.transpose()).trace();
}

AffineModel output_init(const GaussianSpec& spec) {
  return spec.init_model ? *spec.init_model : neutralizing_init(spec.source, spec.target);
}

GaussianModels models_for(const GaussianSpec& spec) {
  const AffineModel fs = fit_optimal_affine(spec.source);
  GaussianModels m{fs, fit_optimal_affine(spec.target), &spec.target};
  switch (spec.case_tag) {
    case GaussianCase::Basic:
      break;
    case GaussianCase::FeatureAug:
      m.intermediate = compose(fs, FeatureAugmentedPair(spec.source, spec.target).projection());
      break;
    case GaussianCase::OutputAug:
      m.intermediate = stack(fs, output_init(spec));
      break;
  }
  return m;
}

Json risk_block(const RiskDecomposition& r, double input_risk, std::optional<double> lambda) {
  Json j{{"output_risk", r.total}, {"variance_term", r.variance_term}, {"bias_term", r.bias_term}};
  if (lambda) j["combined"] = linear_risk(RiskPair::checked(input_risk, r.total), *lambda);
  return j;
}

}  // namespace

Json gaussian_risk_result(const GaussianSpec& spec, bool kl, bool w, std::optional<double> lambda) {
  if (lambda) require(*lambda > 0.0, ErrorKind::NonpositiveLambda, "--lambda must be positive");
  Json result{{"case", std::string(to_string(spec.case_tag))}};
  Json variants = Json::object();
  switch (spec.case_tag) {
    case GaussianCase::Basic: {
      const BasicCasePair pair(spec.source, spec.target);
      const double input = w2sq_gaussian(spec.target.input_law(), spec.source.input_law());
      result["input_risk"] = input;
      if (kl) variants["kl"] = risk_block(basic_output_risk_kl(pair), input, lambda);
      if (w) variants["w"] = risk_block(basic_output_risk_w(pair), input, lambda);
      const RegretDecomposition reg = regret_closed_form(pair);
      result["regret"] = Json{{"regret", reg.regret}, {"var_hat", reg.var_hat}, {"bias_hat", reg.bias_hat}};
      const RegretRiskIdentity id = regret_risk_identity(pair);
      result["identity"] = Json{{"risk_w", id.risk_w},
                                {"residual", id.residual},
                                {"bound_holds", id.risk_w <= id.regret + 1e-12 * (1.0 + id.regret)}};
      break;
    }
    case GaussianCase::FeatureAug: {
      const FeatureAugmentedPair pair(spec.source, spec.target);
      const GaussianDist projected = pushforward_affine(pair.projection(), spec.target.input_law());
      const double input = w2sq_gaussian(projected, spec.source.input_law());
      result["input_risk"] = input;
      if (kl) variants["kl"] = risk_block(feature_aug_risk(pair, RiskVariant::KL), input, lambda);
      if (w) variants["w"] = risk_block(feature_aug_risk(pair, RiskVariant::Wasserstein), input, lambda);
      Json fa{{"ratio", feature_aug_ratio(pair)}};
      const Eigen::Index d = spec.source.dim_x();
      const Matrix cross = spec.target.cov_x().bottomLeftCorner(pair.augmented_dim(), d);
      if (cross.cwiseAbs().maxCoeff() == 0.0) fa["uncorrelated_ratio"] = feature_aug_uncorrelated_ratio(pair);
      result["feature_aug"] = fa;
      result["regret"] = Json{{"regret", regret_of_model(models_for(spec).intermediate, spec.target)}};
      break;
    }
    case GaussianCase::OutputAug: {
      const OutputAugmentedPair pair(spec.source, spec.target, output_init(spec));
      const double input = w2sq_gaussian(spec.target.input_law(), spec.source.input_law());
      result["input_risk"] = input;
      std::optional<OutputAugRisk> any;
      if (kl) {
        any = output_aug_risk(pair, RiskVariant::KL);
        variants["kl"] = risk_block(any->risk, input, lambda);
      }
      if (w) {
        any = output_aug_risk(pair, RiskVariant::Wasserstein);
        variants["w"] = risk_block(any->risk, input, lambda);
      }
      result["output_aug"] = Json{{"init", spec.init_model ? "given" : "neutralizing"},
                                  {"mu1", vec_json(any->mu1)},
                                  {"sigma1", mat_json(any->sigma1)},
                                  {"mu2", vec_json(any->mu2)},
                                  {"sigma2", mat_json(any->sigma2)}};
      result["regret"] = Json{{"regret", regret_of_model(models_for(spec).intermediate, spec.target)}};
      break;
    }
  }
  result["variants"] = variants;
  if (lambda) result["lambda"] = *lambda;
  return result;
}

namespace {

constexpr std::size_t kShards = 16;

// Chan et al. pairwise merge of running moments.
struct Moments1 {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  static Moments1 from(const McEstimate& e, double n) {
    const double var = e.std_error * e.std_error * n;
    return {n, e.estimate, var * (n - 1.0)};
  }
  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const Moments1& o) {
    if (o.n == 0.0) return;
    const double total = n + o.n;
    const double d = o.mean - mean;
    mean += d * o.n / total;
    m2 += o.m2 + d * d * n * o.n / total;
    n = total;
  }
  double std_error() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

Eigen::Index shard_size(long total, std::size_t shard) {
  const long base = total / static_cast<long>(kShards);
  const long extra = total % static_cast<long>(kShards);
  return base + (static_cast<long>(shard) < extra ? 1 : 0);
}

McEstimate sharded(long n, int jobs, const SeededStream& root,
                   const std::function<McEstimate(Eigen::Index, SeededStream&)>& estimator) {
  std::vector<Moments1> parts(kShards);
  parallel_for(kShards, jobs, [&](std::size_t i) {
    const Eigen::Index count = shard_size(n, i);
    if (count == 0) return;
    SeededStream s = root.split(i);
    parts[i] = Moments1::from(estimator(count, s), static_cast<double>(count));
  });
  Moments1 all;
  for (const auto& p : parts) all.merge(p);
  return {all.mean, all.std_error()};
}

Json check_json(const std::string& name, double closed, double oracle, double se, bool sigma_rule, double tol) {
  const double gap = std::abs(closed - oracle);
  const double sigma_gap = se > 0.0 ? gap / se : 0.0;
  const bool passed = sigma_rule ? (se > 0.0 ? sigma_gap <= tol : gap == 0.0) : gap <= tol;
  return Json{{"name", name},
              {"closed_form", closed},
              {"oracle", oracle},
              {"abs_gap", gap},
              {"std_error", se},
              {"sigma_gap", sigma_gap},
              {"criterion", sigma_rule ? "sigma_gap<=" + format_double(tol) : "abs_gap<=" + format_double(tol)},
              {"passed", passed}};
}

Json gaussian_oracle(const GaussianSpec& spec, const Json& result, const GaussianRiskOptions& opt) {
  const SeededStream root(opt.common.seed);
  const GaussianModels m = models_for(spec);
  const GaussianDist input = spec.target.input_law();
  const int jobs = opt.common.jobs;
  Json checks = Json::array();

  const double regret = result.at("regret").at("regret").get<double>();
  const McEstimate mc_reg = sharded(opt.mc_samples, jobs, root.split(1), [&](Eigen::Index n, SeededStream& s) {
    return mc_loss_difference(m.intermediate, m.target_optimal, spec.target, n, s);
  });
  checks.push_back(check_json("regret_vs_mc_loss_difference", regret, mc_reg.estimate, mc_reg.std_error, true, 3.0));

  const Json& variants = result.at("variants");
  if (spec.target.dim_y() == 1) {
    const GaussianDist p_t = pushforward_affine(m.target_optimal, input);
    const GaussianDist p_st = pushforward_affine(m.intermediate, input);
    if (variants.contains("kl")) {
      const double closed = variants.at("kl").at("output_risk").get<double>();
      checks.push_back(check_json("kl_vs_quadrature", closed, kl_quadrature_1d(p_t, p_st), 0.0, false,
                                  1e-6 * std::max(1.0, closed)));
    }
    if (variants.contains("w")) {
      const double closed = variants.at("w").at("output_risk").get<double>();
      const McEstimate mc_w = sharded(opt.mc_samples, jobs, root.split(2),
                                      [&](Eigen::Index n, SeededStream& s) { return mc_w2_1d(p_st, p_t, n, s); });
      checks.push_back(check_json("w2_vs_mc_quantile_coupling", closed, mc_w.estimate, mc_w.std_error, true, 3.0));
    }
  } else {
    // Moments of both prediction laws against sample moments.
    const Json& oa = result.at("output_aug");
    const Eigen::Index dim = spec.target.dim_y();
    const Vector mu1 = vec_from(oa.at("mu1"));
    const Vector mu2 = vec_from(oa.at("mu2"));
    std::vector<std::vector<Moments1>> parts(kShards);
    parallel_for(kShards, jobs, [&](std::size_t i) {
      const Eigen::Index count = shard_size(opt.mc_samples, i);
      SeededStream s = root.split(3).split(i);
      const Matrix xs = sample_gaussian(input, count, s);
      std::vector<Moments1> acc(static_cast<std::size_t>(4 * dim));
      for (Eigen::Index r = 0; r < count; ++r) {
        const Vector x = xs.row(r).transpose();
        const Vector a = m.target_optimal(x);
        const Vector b = m.intermediate(x);
        for (Eigen::Index c = 0; c < dim; ++c) {
          const auto cu = static_cast<std::size_t>(c);
          acc[cu].add(a[c]);
          acc[static_cast<std::size_t>(dim) + cu].add(b[c]);
          acc[static_cast<std::size_t>(2 * dim) + cu].add((a[c] - mu1[c]) * (a[c] - mu1[c]));
          acc[static_cast<std::size_t>(3 * dim) + cu].add((b[c] - mu2[c]) * (b[c] - mu2[c]));
        }
      }
      parts[i] = std::move(acc);
    });
    std::vector<Moments1> all(static_cast<std::size_t>(4 * dim));
    for (const auto& p : parts)
      for (std::size_t j = 0; j < all.size(); ++j) all[j].merge(p[j]);
    const char* labels[] = {"mu1", "mu2", "sigma1_diag", "sigma2_diag"};
    for (int block = 0; block < 4; ++block) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        const std::size_t cu = static_cast<std::size_t>(c);
        const auto& mo = all[static_cast<std::size_t>(block) * static_cast<std::size_t>(dim) + cu];
        double closed = 0.0;
        if (block == 0) closed = oa.at("mu1")[cu].get<double>();
        if (block == 1) closed = oa.at("mu2")[cu].get<double>();
        if (block == 2) closed = oa.at("sigma1")[cu][cu].get<double>();
        if (block == 3) closed = oa.at("sigma2")[cu][cu].get<double>();
        checks.push_back(check_json(std::string(labels[block]) + "[" + std::to_string(c) + "]_vs_sample", closed,
                                    mo.mean, mo.std_error(), true, 3.0));
      }
    }
  }
  bool passed = true;
  for (const auto& c : checks) passed = passed && c.at("passed").get<bool>();
  return Json{{"checks", checks}, {"passed", passed}, {"samples", opt.mc_samples}};
}

}  // namespace

int cmd_gaussian_risk(const GaussianRiskOptions& opt, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    check_common(opt.common);
    require(opt.variant == "kl" || opt.variant == "w" || opt.variant == "both", ErrorKind::InvalidArgument,
            "--variant must be kl, w or both");
    require(opt.mc_samples >= 2, ErrorKind::InvalidArgument, "--mc-samples must be at least 2");
    const TaskSpec spec = load_task_spec(opt.spec);
    const auto* g = std::get_if<GaussianSpec>(&spec);
    require(g != nullptr, ErrorKind::SchemaError, opt.spec.string() + ": gaussian-risk needs a gaussian spec");
    const bool kl = opt.variant != "w";
    const bool w = opt.variant != "kl";
    const Json result = gaussian_risk_result(*g, kl, w, opt.lambda);
    Json input{{"spec", to_json(spec)}, {"variant", opt.variant}, {"verify", opt.verify}};
    if (opt.verify) input["mc_samples"] = opt.mc_samples;
    Json report = make_report("gaussian-risk", input, result, opt.common.seed, opt.common.jobs);
    int code = kExitOk;
    if (opt.verify) {
      report["oracle"] = gaussian_oracle(*g, result, opt);
      for (const auto& c : report["oracle"]["checks"])
        err << (c.at("passed").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>()
            << " abs_gap=" << format_double(c.at("abs_gap").get<double>())
            << " sigma_gap=" << format_double(c.at("sigma_gap").get<double>()) << "\n";
      if (!report["oracle"]["passed"].get<bool>()) code = kExitVerifyFailed;
    }
    emit(report, opt.common, out);
    return code;
  });
}

namespace {

struct OfficeRow {
  std::string task;
  double input_risk;
  double output_risk;
  double published;
};

const std::vector<OfficeRow>& office31_rows() {
  static const std::vector<OfficeRow> rows{
      {"A-W", 0.181, 0.428, 0.224}, {"A-D", 0.263, 0.380, 0.214}, {"W-A", 0.181, 0.545, 0.330},
      {"W-D", 0.148, 0.084, 0.052}, {"D-A", 0.263, 0.543, 0.353}, {"D-W", 0.148, 0.412, 0.201},
  };
  return rows;
}

constexpr double kOfficeTolerance = 0.0025;

std::vector<OfficeRow> read_office_csv(const std::filesystem::path& path) {
  const PlainCsv csv = parse_plain_csv(read_text_file(path), path.string());
  auto col = [&](const std::string& name) -> std::ptrdiff_t {
    const auto it = std::find(csv.header.begin(), csv.header.end(), name);
    return it == csv.header.end() ? -1 : it - csv.header.begin();
  };
  const auto ci = col("input_risk");
  const auto co = col("output_risk");
  const auto ct = col("task");
  require(ci >= 0 && co >= 0, ErrorKind::SchemaError, path.string() + ": needs input_risk and output_risk columns");
  std::vector<OfficeRow> rows;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    auto num = [&](std::ptrdiff_t c) {
      const std::string& s = row[static_cast<std::size_t>(c)];
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      require(!s.empty() && used == s.size() && std::isfinite(v), ErrorKind::ParseError,
              path.string() + ":" + std::to_string(r + 2) + ": '" + s + "' is not a number");
      return v;
    };
    rows.push_back({ct >= 0 ? row[static_cast<std::size_t>(ct)] : "row" + std::to_string(r + 1), num(ci), num(co), -1.0});
  }
  require(!rows.empty(), ErrorKind::SchemaError, path.string() + ": no rows");
  return rows;
}

}  // namespace

int cmd_office_table(const OfficeTableOptions& opt, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    check_common(opt.common);
    require(opt.builtin != opt.csv.has_value(), ErrorKind::InvalidArgument, "give exactly one of --builtin or a CSV file");
    const PolyCombiner comb = PolyCombiner::office31();
    const std::vector<OfficeRow> rows = opt.builtin ? office31_rows() : read_office_csv(*opt.csv);
    Json jrows = Json::array();
    double max_dev = 0.0;
    for (const auto& r : rows) {
      const double risk = poly_risk(RiskPair::checked(r.input_risk, r.output_risk), comb);
      Json jr{{"task", r.task}, {"input_risk", r.input_risk}, {"output_risk", r.output_risk}, {"transfer_risk", risk}};
      if (opt.builtin) {
        const double dev = std::abs(risk - r.published);
        max_dev = std::max(max_dev, dev);
        jr["published"] = r.published;
        jr["deviation"] = dev;
      }
      jrows.push_back(jr);
    }
    Json result{{"combiner",
                 {{"coef_input", comb.coef_input},
                  {"coef_input_sq", comb.coef_input_sq},
                  {"coef_output", comb.coef_output},
                  {"coef_output_sq", comb.coef_output_sq}}},
                {"rows", jrows}};
    int code = kExitOk;
    if (opt.builtin) {
      const bool passed = max_dev <= kOfficeTolerance;
      result["max_deviation"] = max_dev;
      result["tolerance"] = kOfficeTolerance;
      result["passed"] = passed;
      err << (passed ? "PASS" : "FAIL") << " office31 table, max deviation " << format_double(max_dev) << "\n";
      if (!passed) code = kExitVerifyFailed;
    }
    Json input{{"builtin", opt.builtin}};
    if (opt.csv) input["csv"] = opt.csv->string();
    emit(make_report("office-table", input, result, opt.common.seed, opt.common.jobs), opt.common, out);
    return code;
  });
}

namespace {

SplitSeries load_split_asset(const std::filesystem::path& path, std::int64_t split_time, bool need_split,
                             std::string* period) {
  const DatedTable t = read_dated_csv(path);
  const Eigen::Index split = t.first_at_or_after(split_time);
  if (need_split)
    require(split > 0 && split < t.rows(), ErrorKind::InvalidArgument,
            path.string() + ": split date is outside the data range");
  if (period) *period = period_label(t.period_seconds);
  return {asset_from_table(t, path.stem().string()), split};
}

Json metrics_json(const EvalMetrics& m) {
  return Json{{"mse", m.mse}, {"r2", m.r2}, {"corr", m.corr}, {"corr_defined", m.corr_defined}};
}

}  // namespace

int cmd_predict(const PredictOptions& opt, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    check_common(opt.common);
    const TaskSpec spec = load_task_spec(opt.spec);
    const auto* job = std::get_if<RegressionJob>(&spec);
    require(job != nullptr, ErrorKind::SchemaError, opt.spec.string() + ": predict needs a regression spec");
    const auto base = opt.spec.parent_path();
    const std::int64_t split_time = parse_iso8601(job->split_date);
    std::vector<SplitSeries> sources;
    for (const auto& p : job->sources) sources.push_back(load_split_asset(resolve(base, p), split_time, false, nullptr));
    std::string period;
    const SplitSeries target = load_split_asset(resolve(base, job->target), split_time, true, &period);

    PredictionConfig cfg;
    cfg.lambda_source = opt.lambda_source.value_or(job->lambda_source);
    cfg.lambda_target = opt.lambda_target.value_or(job->lambda_target);
    cfg.lambda_direct = job->lambda_direct;
    require(cfg.lambda_source > 0.0 && cfg.lambda_target > 0.0, ErrorKind::NonpositiveLambda,
            "ridge penalties must be positive");
    std::vector<std::pair<int, int>> grid;
    for (int lag : job->lags)
      for (int order : job->orders) grid.emplace_back(lag, order);
    std::vector<std::optional<PredictionCell>> cells(grid.size());
    parallel_for(grid.size(), opt.common.jobs, [&](std::size_t i) {
      PredictionConfig c = cfg;
      c.lag = grid[i].first;
      c.order = grid[i].second;
      cells[i] = run_prediction(sources, target, c);
    });
    Json jgrid = Json::array();
    for (const auto& c : cells) {
      jgrid.push_back(Json{{"lag", c->lag},
                           {"order", c->order},
                           {"direct", metrics_json(c->direct)},
                           {"transfer", metrics_json(c->transfer)},
                           {"transfer_risk", c->transfer_risk},
                           {"train_rows", c->train_rows},
                           {"test_rows", c->test_rows},
                           {"source_rows", c->source_rows}});
    }
    Json result{{"period", period},
                {"target_scaling", "per-asset z-score with training mean and standard deviation"},
                {"grid", jgrid}};
    Json input{{"spec", to_json(spec)}, {"lambda_source", cfg.lambda_source}, {"lambda_target", cfg.lambda_target}};
    emit(make_report("predict", input, result, opt.common.seed, opt.common.jobs), opt.common, out);
    return kExitOk;
  });
}

int cmd_portfolio(const PortfolioOptions& opt, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    check_common(opt.common);
    const TaskSpec spec = load_task_spec(opt.spec);
    const auto* job = std::get_if<PortfolioJob>(&spec);
    require(job != nullptr, ErrorKind::SchemaError, opt.spec.string() + ": portfolio needs a portfolio spec");
    const auto base = opt.spec.parent_path();
    const DatedTable src = read_dated_csv(resolve(base, job->source));
    const DatedTable tgt = read_dated_csv(resolve(base, job->target));
    require(src.columns.size() == tgt.columns.size(), ErrorKind::DimensionMismatch,
            "source and target return files have different asset counts");
    const std::int64_t split_time = parse_iso8601(job->split_date);
    const Eigen::Index ss = src.first_at_or_after(split_time);
    const Eigen::Index ts = tgt.first_at_or_after(split_time);
    require(ts > 0 && ts < tgt.rows(), ErrorKind::InvalidArgument, "split date is outside the target data range");
    require(ss > 0, ErrorKind::InvalidArgument, "split date precedes all source data");
    const double penalty = opt.penalty.value_or(job->penalty);
    require(penalty >= 0.0, ErrorKind::InvalidArgument, "penalty must be nonnegative");

    const PortfolioOutcome o = run_portfolio_transfer(ReturnsDataset(src.values.topRows(ss)),
                                                      ReturnsDataset(tgt.values.topRows(ts)),
                                                      ReturnsDataset(tgt.values.bottomRows(tgt.rows() - ts)), penalty);
    auto triplet = [](double a, double b, double c) {
      return Json{{"pretrained", a}, {"transferred", b}, {"direct", c}};
    };
    Json result{{"assets", tgt.columns},
                {"period", period_label(tgt.period_seconds)},
                {"penalty", penalty},
                {"weights", Json{{"pretrained", vec_json(o.pretrained.weights())},
                                 {"transferred", vec_json(o.transferred.weights())},
                                 {"direct", vec_json(o.direct.weights())}}},
                {"sharpe", Json{{"in_sample", triplet(o.in_sample_pretrained, o.in_sample_transferred, o.in_sample_direct)},
                                {"out_of_sample", triplet(o.out_of_sample_pretrained, o.out_of_sample_transferred,
                                                          o.out_of_sample_direct)}}},
                {"prescreen_risk", o.prescreen_risk},
                {"prescreen_w2", std::sqrt(o.prescreen_risk)}};
    Json input{{"spec", to_json(spec)}, {"penalty", penalty}};
    emit(make_report("portfolio", input, result, job->seed, opt.common.jobs), opt.common, out);
    return kExitOk;
  });
}

int cmd_verify_props(const VerifyPropsOptions& opt, std::ostream& out, std::ostream& err) {
  return run_guarded(err, [&] {
    check_common(opt.common);
    require(opt.kl_cases >= 1 && opt.w_cases >= 1 && opt.regret_cases >= 1 && opt.talagrand_cases >= 1,
            ErrorKind::InvalidArgument, "case counts must be positive");
    const SeededStream root(opt.common.seed);
    std::vector<SweepSummary> sweeps(5);
    parallel_for(sweeps.size(), opt.common.jobs, [&](std::size_t i) {
      SeededStream s = root.split(i);
      switch (i) {
        case 0:
          sweeps[i] = sweep_kl_bounds(s, opt.kl_cases);
          break;
        case 1:
          sweeps[i] = sweep_w_bound(s, opt.w_cases, 1.0);
          break;
        case 2:
          sweeps[i] = sweep_w_bound(s, opt.w_cases, 2.0);
          break;
        case 3:
          sweeps[i] = sweep_regret_bound(s, opt.regret_cases);
          break;
        default:
          sweeps[i] = sweep_talagrand(s, opt.talagrand_cases);
          break;
      }
    });
    bool passed = true;
    Json jsweeps = Json::array();
    for (const auto& s : sweeps) {
      passed = passed && s.passed();
      err << (s.passed() ? "PASS " : "FAIL ") << s.name << ": " << s.cases << " cases, " << s.violations
          << " violations\n";
      jsweeps.push_back(Json{{"name", s.name},
                             {"cases", s.cases},
                             {"violations", s.violations},
                             {"worst_margin", s.worst_margin},
                             {"passed", s.passed()}});
    }
    const TalagrandDiagnostic ce = talagrand_counterexample();
    const bool reported = !ce.holds;
    err << (reported ? "PASS " : "FAIL ") << "talagrand counterexample N(1,100) vs N(0,100) reported as violation\n";
    passed = passed && reported;
    Json result{{"sweeps", jsweeps},
                {"counterexample",
                 {{"w2sq", ce.w2sq}, {"two_kl", ce.two_kl}, {"holds", ce.holds}, {"reported_as_violation", reported}}},
                {"passed", passed}};
    Json input{{"kl_cases", opt.kl_cases},
               {"w_cases", opt.w_cases},
               {"regret_cases", opt.regret_cases},
               {"talagrand_cases", opt.talagrand_cases}};
    emit(make_report("verify-props", input, result, opt.common.seed, opt.common.jobs), opt.common, out);
    return passed ? kExitOk : kExitVerifyFailed;
  });
}

}  // namespace tlrisk::io
