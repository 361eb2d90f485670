#include "crcdl/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "crcdl/diagnostics.hpp"
#include "crcdl/mathutil.hpp"
#include "crcdl/runio.hpp"
#include "crcdl/sampler.hpp"
#include "crcdl/simulate.hpp"

namespace crcdl {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSampler = 3;
constexpr int kExitDiagnostics = 4;

std::uint64_t parse_seed(const std::string& text, const std::string& origin) {
  std::size_t pos = 0;
  std::uint64_t value = 0;
  try {
    value = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || text.empty() || text[0] == '-')
    throw ValidationError(origin + " seed '" + text + "' is not an unsigned integer");
  return value;
}

/** Seed from the environment, when CRCDL_SEED is set. */
bool env_seed(std::uint64_t& seed) {
  const char* text = std::getenv("CRCDL_SEED");
  if (!text) return false;
  seed = parse_seed(text, "CRCDL_SEED");
  return true;
}

void print_value(std::ostream& out, double v) {
  std::string s;
  format_double(s, v);
  out << s;
}

int cmd_simulate(const std::string& preset, const std::string& out_dir, std::uint64_t seed,
                 int M_override, double miss_override) {
  SimParams params;
  if (preset == "vole")
    params = vole_preset();
  else if (preset == "finch")
    params = finch_preset();
  else
    throw ValidationError("unknown preset '" + preset + "' (choices: vole, finch)");
  if (M_override > 0) params.design.M = M_override;
  if (miss_override >= 0.0) {
    if (params.covariate != CovariateKind::categorical)
      throw ValidationError("--miss-rate applies only to categorical presets");
    params.miss_rate = miss_override;
  }

  auto [data, truth] = generate(params, seed);
  if (params.covariate == CovariateKind::categorical && params.miss_rate > 0.0)
    mask_disease(data, params.miss_rate, derive_seed(seed, 101));

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_captures((dir / "data.csv").string(), data);
  write_truth_json((dir / "truth.json").string(), truth);
  std::cout << "simulated " << truth.n_observed << " observed of " << truth.n_total
            << " individuals over " << params.design.k1 << " periods into " << out_dir << "\n";
  return kExitOk;
}

int cmd_fit(const RunConfig& config) {
  const FitResult fit = run_fit(config);
  for (const auto& w : fit.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "fit complete: " << fit.draws.chains.size() << " chains, "
            << (fit.draws.chains.empty() ? 0 : fit.draws.chains[0].rows())
            << " kept draws each, results in " << config.out_dir << "\n";
  return kExitOk;
}

int cmd_summarize(const std::string& dir, const std::string& out_csv) {
  const PosteriorDraws draws = read_run_draws(dir);
  const auto rows = summarize(draws);
  if (!out_csv.empty()) write_summary_csv(out_csv, rows);

  std::size_t width = 4;
  for (const auto& row : rows) width = std::max(width, row.name.size());
  std::cout << std::left << std::setw(static_cast<int>(width) + 2) << "name"
            << "median q2.5 q25 q75 q97.5 psrf n_draws\n";
  for (const auto& row : rows) {
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << row.name;
    for (double v : {row.median, row.q2_5, row.q25, row.q75, row.q97_5, row.psrf}) {
      print_value(std::cout, v);
      std::cout << ' ';
    }
    std::cout << row.n_draws << "\n";
  }
  if (draws.chains.size() < 2)
    std::cout << "note: psrf needs at least two chains and is reported as nan\n";
  return kExitOk;
}

int cmd_diag(const std::string& dir) {
  const PosteriorDraws draws = read_run_draws(dir);
  if (draws.chains.size() < 2) {
    std::cerr << "diag: needs at least two chains, found " << draws.chains.size() << "\n";
    return kExitDiagnostics;
  }
  const long rows0 = draws.chains[0].rows();
  for (const auto& chain : draws.chains)
    if (chain.rows() != rows0) {
      std::cerr << "diag: chains have unequal lengths\n";
      return kExitDiagnostics;
    }
  if (rows0 < 10) {
    std::cerr << "diag: needs at least 10 draws per chain, found " << rows0 << "\n";
    return kExitDiagnostics;
  }

  double worst = 1.0;
  std::string worst_name;
  std::size_t width = 4;
  for (const auto& name : draws.names) width = std::max(width, name.size());
  std::cout << std::left << std::setw(static_cast<int>(width) + 2) << "name"
            << "psrf\n";
  for (std::size_t c = 0; c < draws.names.size(); ++c) {
    if (draws.names[c] == "iter") continue;
    std::vector<std::vector<double>> per_chain;
    bool finite = true;
    for (const auto& chain : draws.chains) {
      std::vector<double> vals(static_cast<std::size_t>(rows0));
      for (long r = 0; r < rows0; ++r) {
        vals[static_cast<std::size_t>(r)] = chain(static_cast<int>(r), static_cast<int>(c));
        if (!std::isfinite(vals[static_cast<std::size_t>(r)])) finite = false;
      }
      per_chain.push_back(std::move(vals));
    }
    const double r_hat = finite ? psrf(per_chain) : kNaN;
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << draws.names[c];
    print_value(std::cout, r_hat);
    std::cout << "\n";
    if (std::isfinite(r_hat) && r_hat > worst) {
      worst = r_hat;
      worst_name = draws.names[c];
    }
  }
  std::cout << "max psrf: ";
  print_value(std::cout, worst);
  if (!worst_name.empty()) std::cout << " (" << worst_name << ")";
  std::cout << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"open-population capture-recapture with individual covariates"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "generate a synthetic dataset from a preset");
  std::string sim_preset, sim_out, sim_seed_text;
  int sim_M = 0;
  double sim_miss = -1.0;
  sim->add_option("--preset", sim_preset, "study preset (vole, finch)")->required();
  sim->add_option("--out", sim_out, "output directory for data.csv and truth.json")->required();
  auto* sim_seed_opt = sim->add_option("--seed", sim_seed_text, "simulation seed");
  sim->add_option("--M", sim_M, "override the pseudo-individual pool size");
  sim->add_option("--miss-rate", sim_miss, "override the state missingness rate");

  auto* fit = app.add_subcommand("fit", "run the sampler on a dataset");
  std::string fit_config, fit_data, fit_out, fit_seed_text, fit_model, fit_cov;
  int fit_chains = 0, fit_adapt = -1;
  long fit_iter = -1;
  int fit_M = -1;
  fit->add_option("--config", fit_config, "JSON run configuration");
  fit->add_option("--data", fit_data, "capture CSV (overrides the config)");
  fit->add_option("--out", fit_out, "run output directory (overrides the config)");
  auto* fit_seed_opt = fit->add_option("--seed", fit_seed_text, "sampler seed (overrides the config)");
  fit->add_option("--chains", fit_chains, "number of chains");
  fit->add_option("--adapt", fit_adapt, "adaptation sweeps per chain");
  fit->add_option("--iter", fit_iter, "post-adaptation sweeps per chain");
  fit->add_option("--model", fit_model, "sampling design (standard, robust)");
  fit->add_option("--covariate", fit_cov, "covariate kind (none, mass, categorical)");
  fit->add_option("--M", fit_M, "augmented population size (0 picks a default)");

  auto* summ = app.add_subcommand("summarize", "tabulate posterior summaries for a run");
  std::string summ_dir, summ_out;
  summ->add_option("dir", summ_dir, "run directory")->required();
  summ->add_option("--out", summ_out, "also write the table as CSV");

  auto* diag = app.add_subcommand("diag", "convergence diagnostics for a run");
  std::string diag_dir;
  diag->add_option("dir", diag_dir, "run directory")->required();

  auto* expo = app.add_subcommand("export", "tidy quantile CSV for one reported quantity");
  std::string expo_dir, expo_quantity, expo_out;
  expo->add_option("dir", expo_dir, "run directory")->required();
  expo->add_option("--quantity", expo_quantity, "column or column family to export")->required();
  expo->add_option("--out", expo_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (sim->parsed()) {
      std::uint64_t seed = 1;
      env_seed(seed);
      if (sim_seed_opt->count()) seed = parse_seed(sim_seed_text, "--seed");
      return cmd_simulate(sim_preset, sim_out, seed, sim_M, sim_miss);
    }
    if (fit->parsed()) {
      RunConfig config;
      if (!fit_config.empty()) config = load_run_config(fit_config);
      std::uint64_t seed = 1;
      if (env_seed(seed)) config.sampler.seed = config.seed_from_config ? config.sampler.seed : seed;
      if (fit_seed_opt->count()) config.sampler.seed = parse_seed(fit_seed_text, "--seed");
      if (!fit_data.empty()) config.data_path = fit_data;
      if (!fit_out.empty()) config.out_dir = fit_out;
      if (fit_chains > 0) config.sampler.n_chains = fit_chains;
      if (fit_adapt >= 0) config.sampler.n_adapt = fit_adapt;
      if (fit_iter >= 0) config.sampler.n_iter = fit_iter;
      if (!fit_model.empty()) config.model = model_kind_from_string(fit_model);
      if (!fit_cov.empty()) config.covariate = covariate_kind_from_string(fit_cov);
      if (fit_M >= 0) config.sampler.M = fit_M;
      return cmd_fit(config);
    }
    if (summ->parsed()) return cmd_summarize(summ_dir, summ_out);
    if (diag->parsed()) return cmd_diag(diag_dir);
    if (expo->parsed()) return export_plot_data(expo_dir, expo_quantity, expo_out), kExitOk;
  } catch (const SamplerError& e) {
    std::cerr << "sampler error: " << e.what() << "\n";
    return kExitSampler;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace crcdl
