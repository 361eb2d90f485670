#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "crcdl/data.hpp"
#include "crcdl/diagnostics.hpp"
#include "crcdl/sampler.hpp"
#include "crcdl/simulate.hpp"

namespace crcdl {

/**
 * @brief One fit, fully specified: model shape, sampler settings, paths.
 *
 * k1/k2 describe the study design explicitly and are only consulted when the
 * data file holds no observations (prior-only runs); otherwise the design is
 * inferred from the data. seed_from_config records whether the config file
 * itself carried a seed, for the flag > config > environment precedence.
 */
struct RunConfig {
  ModelKind model = ModelKind::standard;
  CovariateKind covariate = CovariateKind::none;
  SamplerConfig sampler;
  std::string data_path;
  std::string out_dir;
  int k1 = 0;
  std::vector<int> k2;
  double mass_max = 60.0;
  bool seed_from_config = false;
};

/** Parse a JSON run configuration. Unknown keys are rejected. */
RunConfig load_run_config(const std::string& path);

/** FNV-1a over a file's bytes, for run metadata. */
std::uint64_t checksum_file(const std::string& path);

/** Write one chain's kept draws: header of names, one CSV row per draw. */
void write_draws_csv(const std::string& path, const std::vector<std::string>& names, const Grid2<double>& rows);

/**
 * Execute a configured fit end to end: ingest (or accept empty data),
 * sample, and populate out_dir with config.json (the resolved snapshot),
 * chain_<c>.csv per chain, summary.csv, and run.log. Returns the fit.
 */
FitResult run_fit(const RunConfig& config);

/** Load the chain files of a completed run directory. */
PosteriorDraws read_run_draws(const std::string& dir);

/** Generating parameters and realized truth of a simulation, as JSON. */
void write_truth_json(const std::string& path, const TruthRecord& truth);

/**
 * Pooled posterior quantiles of one quantity family in tidy form:
 * quantity,index,median,lo50,hi50,lo95,hi95. A family name (e.g. "N",
 * "beta", "zeta", "N2") selects all columns "<name>_<index>"; an exact
 * column name selects that single column with index 0.
 */
void export_plot_data(const std::string& dir, const std::string& quantity, const std::string& out_path);

}  // namespace crcdl
