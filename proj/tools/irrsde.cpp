// irrsde: command-line front end.
//
//   irrsde run <config.json> [--threads N] [--output FILE]
//   irrsde run --preset thm-2.2 [--threads N] [--output FILE]
//   irrsde selftest
//   irrsde gallery
//   irrsde rates --alpha A --beta B --norm NAME [--p P]

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "irrsde/irrsde.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& preset_name, std::optional<std::size_t> threads,
            const std::string& output, bool print_config) {
  irrsde::ExperimentConfig cfg =
      preset_name.empty() ? irrsde::load_config(config_path) : irrsde::preset(preset_name);
  if (!output.empty()) cfg.output = output;
  if (print_config) {
    std::cout << irrsde::serialize_config(cfg);
    return 0;
  }
  const bool ok = irrsde::run_and_report(cfg, std::cout, threads);
  std::cout << "csv: " << cfg.output << "\n";
  return ok ? 0 : 1;
}

int cmd_gallery() {
  for (const auto& e : irrsde::gallery()) {
    std::cout << e.name << "  " << e.summary << "\n";
    if (!e.defaults.empty()) {
      std::cout << "      defaults:";
      for (const auto& [k, v] : e.defaults) std::cout << " " << k << "=" << v;
      std::cout << "\n";
    }
  }
  std::cout << "every entry also accepts x0 (default 0) and T (default 1)\n";
  return 0;
}

int cmd_rates(double alpha, double beta, const std::string& norm, double p, bool non_l1, bool hoelder_only) {
  irrsde::RateQuery q;
  q.alpha = alpha;
  q.beta = beta;
  q.norm = irrsde::Norm{irrsde::parse_norm_kind(norm), p};
  q.l1_drift = !non_l1;
  q.hoelder_only = hoelder_only;
  const auto r = irrsde::theoretical_rate(q);
  std::cout << "norm: " << norm;
  if (q.norm.kind == irrsde::NormKind::lp_sup || q.norm.kind == irrsde::NormKind::gamma_sup) std::cout << " (" << p << ")";
  std::cout << "\nmode: " << irrsde::rate_mode_name(r.mode) << "\nexponent: " << r.exponent
            << "\nsubpolynomial_correction: " << (r.subpolynomial_correction ? "yes" : "no") << "\nbound: " << r.bound
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong-convergence experiments for Euler-Maruyama with irregular coefficients"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment config and write its CSV report");
  std::string config_path, preset_name, output;
  std::size_t threads = 0;
  bool print_config = false;
  run->add_option("config", config_path, "JSON experiment config");
  run->add_option("--preset", preset_name, "Built-in preset")
      ->check(CLI::IsMember(irrsde::preset_names()));
  auto* threads_opt = run->add_option("--threads", threads, "Worker threads (results do not depend on it)");
  run->add_option("--output", output, "Override the CSV output path");
  run->add_flag("--print-config", print_config, "Print the resolved config as JSON and exit");

  auto* selftest = app.add_subcommand("selftest", "Run the invariant suite");
  auto* gallery = app.add_subcommand("gallery", "List the gallery problems");

  auto* rates = app.add_subcommand("rates", "Print the proven convergence rate");
  double alpha = 0.5, beta = 1.0, p = 1.0;
  std::string norm;
  bool non_l1 = false, hoelder_only = false;
  rates->add_option("--alpha", alpha, "sigma is (1/2 + alpha)-Hoelder, alpha in [0, 1/2]")->required();
  rates->add_option("--beta", beta, "Hoelder exponent of the drift, in (0, 1]")->required();
  rates->add_option("--norm", norm, "L1_terminal, L1_stopping, Lp_sup, L1_sup or gamma_sup")->required();
  rates->add_option("--p", p, "exponent for Lp_sup, gamma for gamma_sup");
  rates->add_flag("--non-l1", non_l1, "the drift is not integrable");
  rates->add_flag("--hoelder-only", hoelder_only, "the drift has no monotone (class A) part");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (config_path.empty() == preset_name.empty()) {
        std::cerr << "run: give exactly one of a config file or --preset\n";
        return 2;
      }
      std::optional<std::size_t> t;
      if (*threads_opt) t = threads;
      return cmd_run(config_path, preset_name, t, output, print_config);
    }
    if (*selftest) {
      const auto rep = irrsde::selftest();
      irrsde::write_selftest(std::cout, rep);
      return rep.passed() ? 0 : 1;
    }
    if (*gallery) return cmd_gallery();
    if (*rates) return cmd_rates(alpha, beta, norm, p, non_l1, hoelder_only);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
