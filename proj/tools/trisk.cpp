// trisk: transfer-risk estimation from the command line.
//
//   trisk gaussian-risk SPEC [--variant kl|w|both] [--lambda L] [--verify]
//   trisk office-table (--builtin | CSV)
//   trisk predict SPEC [--lambda-source L] [--lambda-target L]
//   trisk portfolio SPEC [--penalty P]
//   trisk verify-props
//
// Every subcommand accepts --seed, --jobs and --out. Exit codes: 0 ok,
// 2 invalid input, 3 numerical failure, 4 verification failure.

#include <iostream>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "tlrisk/io/commands.hpp"

namespace {

void add_common(CLI::App* app, tlrisk::io::CommonOptions& c) {
  app->add_option("--seed", c.seed, "Seed for every random stream")->capture_default_str();
  app->add_option("--jobs", c.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app->add_option("--out", c.out, "Write the report here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  namespace io = tlrisk::io;
  CLI::App app{"Transfer-risk estimation for transfer learning tasks", "trisk"};
  app.set_version_flag("--version", std::string(TLRISK_VERSION));
  app.require_subcommand(1);

  io::GaussianRiskOptions g;
  auto* gr = app.add_subcommand("gaussian-risk", "Closed-form risks for a Gaussian task pair");
  gr->add_option("spec", g.spec, "Task spec (kind gaussian)")->required()->check(CLI::ExistingFile);
  gr->add_option("--variant", g.variant, "kl, w or both")
      ->check(CLI::IsMember({"kl", "w", "both"}))
      ->capture_default_str();
  gr->add_option("--lambda", g.lambda, "Input-risk weight for the linear combined risk");
  gr->add_flag("--verify", g.verify, "Cross-check closed forms against Monte-Carlo and quadrature oracles");
  gr->add_option("--mc-samples", g.mc_samples, "Oracle sample count")->capture_default_str();
  add_common(gr, g.common);

  io::OfficeTableOptions o;
  auto* ot = app.add_subcommand("office-table", "Apply the Office-31 risk combiner");
  ot->add_flag("--builtin", o.builtin, "Use the six published Office-31 rows and check them");
  ot->add_option("csv", o.csv, "CSV with input_risk and output_risk columns")->check(CLI::ExistingFile);
  add_common(ot, o.common);

  io::PredictOptions p;
  auto* pr = app.add_subcommand("predict", "Signature-feature ridge transfer for return prediction");
  pr->add_option("spec", p.spec, "Task spec (kind regression)")->required()->check(CLI::ExistingFile);
  pr->add_option("--lambda-source", p.lambda_source, "Override the source ridge penalty");
  pr->add_option("--lambda-target", p.lambda_target, "Override the anchored target penalty");
  add_common(pr, p.common);

  io::PortfolioOptions f;
  auto* pf = app.add_subcommand("portfolio", "Sharpe-ratio portfolio transfer");
  pf->add_option("spec", f.spec, "Task spec (kind portfolio)")->required()->check(CLI::ExistingFile);
  pf->add_option("--penalty", f.penalty, "Override the anchoring penalty");
  add_common(pf, f.common);

  io::VerifyPropsOptions v;
  auto* vp = app.add_subcommand("verify-props", "Randomized sweeps over the risk inequalities");
  vp->add_option("--kl-cases", v.kl_cases)->capture_default_str();
  vp->add_option("--w-cases", v.w_cases)->capture_default_str();
  vp->add_option("--regret-cases", v.regret_cases)->capture_default_str();
  vp->add_option("--talagrand-cases", v.talagrand_cases)->capture_default_str();
  add_common(vp, v.common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : io::kExitValidation;
  }

  if (*gr) return io::cmd_gaussian_risk(g, std::cout, std::cerr);
  if (*ot) return io::cmd_office_table(o, std::cout, std::cerr);
  if (*pr) return io::cmd_predict(p, std::cout, std::cerr);
  if (*pf) return io::cmd_portfolio(f, std::cout, std::cerr);
  return io::cmd_verify_props(v, std::cout, std::cerr);
}
