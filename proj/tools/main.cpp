#include <exception>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

void add_common(CLI::App* sub, asvd::cli::RunConfig& cfg) {
  sub->add_option("--seed", cfg.seed, "RNG seed");
  sub->add_option("--bins", cfg.K, "Number of frequency bins K");
  sub->add_option("--out", cfg.out, "Output directory");
  sub->add_option("--format", cfg.format, "Tabular output format (csv or json)");
  sub->add_option("--threads", cfg.threads, "Worker threads (0 = hardware concurrency)");
}

}  // namespace

int main(int argc, char** argv) {
  using asvd::cli::RunConfig;
  RunConfig cfg;
  std::size_t trials = 0;
  double sigma2_e = 0.0;
  std::size_t order = 0;

  CLI::App app{"Analytic SVD experiments on Laurent polynomial matrices"};
  app.set_version_flag("--version", asvd::cli::kVersion);
  app.require_subcommand(1);

  auto* ex1 = app.add_subcommand("ex1", "Closed-form example: ground truth vs. extracted smooth tracks");
  add_common(ex1, cfg);
  ex1->add_option("--inject-error", cfg.inject_error, "Add this value to one coefficient of A (negative test)");

  auto* hist = app.add_subcommand("hist", "Singular value samples and Rician fits at one bin");
  add_common(hist, cfg);
  auto* hist_trials = hist->add_option("--trials", trials, "Monte Carlo trials (>= 100)");
  auto* hist_e = hist->add_option("--sigma2-e", sigma2_e, "Error coefficient variance");
  hist->add_option("--omega0", cfg.omega0, "Normalized angular frequency of the bin");

  auto* perturb = app.add_subcommand("perturb", "Perturbation sweep on the random 6x6 system");
  add_common(perturb, cfg);
  auto* perturb_trials = perturb->add_option("--trials", trials, "Trials per level");
  auto* perturb_e = perturb->add_option("--sigma2-e", sigma2_e, "Error coefficient variance (single level)");
  perturb->add_option("--sigma2-norm", cfg.sigma2_norm, "Normalized error variance (repeatable)")
      ->allow_extra_args(false);
  perturb->add_option("--order", order, "Error polynomial order (defaults to the order of A)");

  auto* sysid = app.add_subcommand("sysid", "Wiener identification and MSE decomposition");
  add_common(sysid, cfg);
  sysid->add_option("--N", cfg.N, "Sample counts (repeatable)")->allow_extra_args(false);
  sysid->add_option("--sigma2-v", cfg.sigma2_v, "Observation noise variance");
  auto* sysid_order = sysid->add_option("--order", order, "Estimated order J");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? asvd::cli::kSuccess : asvd::cli::kUsageError;
  }

  for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
  if (hist_trials->count() > 0 || perturb_trials->count() > 0) cfg.trials = trials;
  if (hist_e->count() > 0 || perturb_e->count() > 0) cfg.sigma2_e = sigma2_e;
  if (sysid_order->count() > 0) cfg.J = order;
  if (perturb->get_option("--order")->count() > 0) cfg.error_order = order;

  try {
    return asvd::cli::run(cfg);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return asvd::cli::kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return asvd::cli::kToleranceFailure;
  }
}
