#include "crcdl/runio.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "crcdl/mathutil.hpp"

namespace crcdl {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

Priors parse_priors(const json& j) {
  reject_unknown_keys(j, {"coef_sd", "sd_upper", "zeta_a", "zeta_b", "dirichlet"}, "priors");
  Priors p;
  p.coef_sd = j.value("coef_sd", p.coef_sd);
  p.sd_upper = j.value("sd_upper", p.sd_upper);
  p.zeta_a = j.value("zeta_a", p.zeta_a);
  p.zeta_b = j.value("zeta_b", p.zeta_b);
  p.dirichlet = j.value("dirichlet", p.dirichlet);
  for (double v : {p.coef_sd, p.sd_upper, p.zeta_a, p.zeta_b, p.dirichlet})
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("prior hyperparameters must be finite and positive");
  return p;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config file '" + path + "': " + e.what());
  }

  try {
    reject_unknown_keys(j, {"model",        "covariate",       "data",       "out",
                            "seed",         "chains",          "adapt",      "iter",
                            "thin",         "M",               "target_accept", "proposal_scales",
                            "priors",       "censoring",       "standardization", "progress_every",
                            "check_identities", "validate_every", "k1",      "k2",
                            "mass_max",     "data_checksum"},
                        "config");
    RunConfig cfg;
    if (j.contains("model")) cfg.model = model_kind_from_string(j.at("model").get<std::string>());
    if (j.contains("covariate"))
      cfg.covariate = covariate_kind_from_string(j.at("covariate").get<std::string>());
    cfg.data_path = j.value("data", std::string());
    cfg.out_dir = j.value("out", std::string());
    if (j.contains("seed")) {
      cfg.sampler.seed = j.at("seed").get<std::uint64_t>();
      cfg.seed_from_config = true;
    }
    cfg.sampler.n_chains = j.value("chains", cfg.sampler.n_chains);
    cfg.sampler.n_adapt = j.value("adapt", cfg.sampler.n_adapt);
    cfg.sampler.n_iter = j.value("iter", cfg.sampler.n_iter);
    cfg.sampler.thin = j.value("thin", cfg.sampler.thin);
    cfg.sampler.M = j.value("M", cfg.sampler.M);
    cfg.sampler.target_accept = j.value("target_accept", cfg.sampler.target_accept);
    if (j.contains("proposal_scales"))
      for (const auto& [key, value] : j.at("proposal_scales").items())
        cfg.sampler.proposal_scales[key] = value.get<double>();
    if (j.contains("priors")) cfg.sampler.priors = parse_priors(j.at("priors"));
    cfg.sampler.censoring = j.value("censoring", cfg.sampler.censoring);
    if (j.contains("standardization")) {
      const json& s = j.at("standardization");
      reject_unknown_keys(s, {"mode", "loc", "scale"}, "standardization");
      const std::string mode = s.value("mode", std::string("auto"));
      if (mode == "fixed") {
        cfg.sampler.fixed_standardization = true;
        cfg.sampler.loc = s.at("loc").get<double>();
        cfg.sampler.scale = s.at("scale").get<double>();
      } else if (mode != "auto") {
        throw ValidationError("standardization mode must be 'auto' or 'fixed'");
      }
    }
    cfg.sampler.progress_every = j.value("progress_every", cfg.sampler.progress_every);
    cfg.sampler.check_identities = j.value("check_identities", cfg.sampler.check_identities);
    cfg.sampler.validate_every = j.value("validate_every", cfg.sampler.validate_every);
    cfg.k1 = j.value("k1", 0);
    if (j.contains("k2")) cfg.k2 = j.at("k2").get<std::vector<int>>();
    cfg.mass_max = j.value("mass_max", 60.0);
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError("config file '" + path + "': " + e.what());
  }
}

std::uint64_t checksum_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for checksum");
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize k = 0; k < in.gcount(); ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 0x00000100000001B3ULL;
    }
    if (!in) break;
  }
  return h;
}

void write_draws_csv(const std::string& path, const std::vector<std::string>& names,
                     const Grid2<double>& rows) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write draw file '" + path + "'");
  std::string line;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (c) line += ',';
    line += names[c];
  }
  out << line << "\n";
  for (int r = 0; r < rows.rows(); ++r) {
    line.clear();
    for (int c = 0; c < rows.cols(); ++c) {
      if (c) line += ',';
      format_double(line, rows(r, c));
    }
    out << line << "\n";
  }
  if (!out) throw ValidationError("failed while writing draw file '" + path + "'");
}

namespace {

json snapshot_json(const RunConfig& cfg, const FitResult& fit, std::uint64_t data_checksum) {
  json j;
  j["model"] = to_string(cfg.model);
  j["covariate"] = to_string(cfg.covariate);
  j["data"] = cfg.data_path;
  j["data_checksum"] = data_checksum;
  j["out"] = cfg.out_dir;
  j["seed"] = cfg.sampler.seed;
  j["chains"] = cfg.sampler.n_chains;
  j["adapt"] = cfg.sampler.n_adapt;
  j["iter"] = cfg.sampler.n_iter;
  j["thin"] = cfg.sampler.thin;
  j["M"] = fit.M;
  j["target_accept"] = cfg.sampler.target_accept;
  if (!cfg.sampler.proposal_scales.empty()) j["proposal_scales"] = cfg.sampler.proposal_scales;
  j["priors"] = {{"coef_sd", cfg.sampler.priors.coef_sd},
                 {"sd_upper", cfg.sampler.priors.sd_upper},
                 {"zeta_a", cfg.sampler.priors.zeta_a},
                 {"zeta_b", cfg.sampler.priors.zeta_b},
                 {"dirichlet", cfg.sampler.priors.dirichlet}};
  j["censoring"] = cfg.sampler.censoring;
  j["standardization"] = {{"mode", "fixed"}, {"loc", fit.loc}, {"scale", fit.scale}};
  j["progress_every"] = cfg.sampler.progress_every;
  j["check_identities"] = cfg.sampler.check_identities;
  j["validate_every"] = cfg.sampler.validate_every;
  if (cfg.k1 > 0) {
    j["k1"] = cfg.k1;
    j["k2"] = cfg.k2;
  }
  j["mass_max"] = cfg.mass_max;
  return j;
}

}  // namespace

FitResult run_fit(const RunConfig& config_in) {
  RunConfig config = config_in;
  if (config.data_path.empty()) throw ValidationError("fit needs a data file");
  if (config.out_dir.empty()) throw ValidationError("fit needs an output directory");

  CaptureData data = ingest_captures(config.data_path, config.covariate, config.mass_max);
  if (data.design.k1 == 0) {
    if (config.k1 < 2)
      throw ValidationError("dataset holds no observations; the config must provide the design (k1, k2)");
    data.design.k1 = config.k1;
    data.design.k2 = config.k2.empty() ? std::vector<int>(config.k1, 1) : config.k2;
    data.design.validate();
  }

  std::filesystem::create_directories(config.out_dir);
  const std::uint64_t checksum = checksum_file(config.data_path);

  const auto t0 = std::chrono::steady_clock::now();
  FitResult fit = run(data, config.model, config.sampler);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const std::filesystem::path dir(config.out_dir);
  for (std::size_t c = 0; c < fit.draws.chains.size(); ++c)
    write_draws_csv((dir / ("chain_" + std::to_string(c + 1) + ".csv")).string(), fit.draws.names,
                    fit.draws.chains[c]);
  write_summary_csv((dir / "summary.csv").string(), summarize(fit.draws));

  {
    std::ofstream out(dir / "config.json");
    if (!out) throw ValidationError("cannot write config snapshot");
    out << snapshot_json(config, fit, checksum).dump(2) << "\n";
  }
  {
    std::ofstream out(dir / "run.log");
    if (!out) throw ValidationError("cannot write run log");
    std::string line;
    out << "elapsed_seconds: " << elapsed << "\n";
    out << "chains: " << fit.draws.chains.size() << "\n";
    out << "kept_draws_per_chain: " << (fit.draws.chains.empty() ? 0 : fit.draws.chains[0].rows()) << "\n";
    out << "M: " << fit.M << "\n";
    line = "standardization_loc: ";
    format_double(line, fit.loc);
    out << line << "\n";
    line = "standardization_scale: ";
    format_double(line, fit.scale);
    out << line << "\n";
    for (const auto& [name, rate] : fit.acceptance) {
      line = "acceptance_" + name + ": ";
      format_double(line, rate);
      out << line << "\n";
    }
    out << "identity_violations: " << fit.identity_violations << "\n";
    line = "frac_N_at_M: ";
    format_double(line, fit.frac_n_at_m);
    out << line << "\n";
    for (const auto& w : fit.warnings) out << "warning: " << w << "\n";
  }
  return fit;
}

PosteriorDraws read_run_draws(const std::string& dir) {
  PosteriorDraws draws;
  const std::filesystem::path base(dir);
  for (int c = 1;; ++c) {
    const auto path = base / ("chain_" + std::to_string(c) + ".csv");
    if (!std::filesystem::exists(path)) break;
    auto [names, grid] = read_draws_csv(path.string());
    if (draws.names.empty())
      draws.names = names;
    else if (names != draws.names)
      throw ValidationError("chain files in '" + dir + "' disagree on columns");
    draws.chains.push_back(std::move(grid));
  }
  if (draws.chains.empty()) throw ValidationError("no chain files found in '" + dir + "'");
  return draws;
}

void write_truth_json(const std::string& path, const TruthRecord& truth) {
  json j;
  const SimParams& p = truth.params;
  j["model"] = to_string(p.model);
  j["covariate"] = to_string(p.covariate);
  j["seed"] = truth.seed;
  j["M"] = p.design.M;
  j["k1"] = p.design.k1;
  j["k2"] = p.design.k2;
  j["psi"] = p.psi;
  j["zeta"] = p.zeta;
  j["alpha0"] = p.alpha0;
  j["alpha1"] = p.alpha1;
  j["gamma0"] = p.gamma0;
  j["gamma1"] = p.gamma1;
  j["sigma_S"] = p.sigma_S;
  j["sigma_p1"] = p.sigma_p1;
  if (p.model == ModelKind::robust) j["sigma_p2"] = p.sigma_p2;
  if (p.covariate == CovariateKind::mass) {
    j["mu_lambda"] = p.mu_lambda;
    j["sigma_lambda1"] = p.sigma_lambda1;
    j["sigma_lambda2"] = p.sigma_lambda2;
    j["sigma_z"] = p.sigma_z;
    j["Delta"] = p.Delta;
    j["mass_loc"] = p.mass_loc;
    j["mass_scale"] = p.mass_scale;
    j["mass_max"] = p.mass_max;
  }
  if (p.covariate == CovariateKind::categorical) {
    j["nu"] = p.nu;
    j["omega"] = {p.omega[0], p.omega[1]};
    j["miss_rate"] = p.miss_rate;
  }
  j["eta_S"] = truth.eta_S;
  j["eta_p"] = truth.eta_p;
  j["n_total"] = truth.n_total;
  j["n_per_period"] = truth.n_per_period;
  if (p.covariate == CovariateKind::categorical) {
    std::vector<int> n1(truth.n_per_state.cols()), n2(truth.n_per_state.cols());
    for (int c = 0; c < truth.n_per_state.cols(); ++c) {
      n1[c] = truth.n_per_state(0, c);
      n2[c] = truth.n_per_state(1, c);
    }
    j["n_per_state_1"] = n1;
    j["n_per_state_2"] = n2;
  }
  j["n_observed"] = truth.n_observed;
  std::vector<int> entry, last;
  for (int i = 0; i < truth.state.M(); ++i) {
    if (!truth.state.included[i]) continue;
    entry.push_back(truth.state.first_alive(i) + 1);
    last.push_back(truth.state.last_alive(i) + 1);
  }
  j["entry_period"] = entry;
  j["last_alive_period"] = last;

  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write truth file '" + path + "'");
  out << j.dump(2) << "\n";
}

void export_plot_data(const std::string& dir, const std::string& quantity, const std::string& out_path) {
  const PosteriorDraws draws = read_run_draws(dir);

  // columns of the family "<quantity>_<index>", or one exact column
  std::vector<std::pair<long, int>> picked;
  for (std::size_t c = 0; c < draws.names.size(); ++c) {
    const std::string& name = draws.names[c];
    if (name == quantity) {
      picked.emplace_back(0, static_cast<int>(c));
      continue;
    }
    if (name.size() > quantity.size() + 1 && name.compare(0, quantity.size(), quantity) == 0 &&
        name[quantity.size()] == '_') {
      const std::string suffix = name.substr(quantity.size() + 1);
      if (!suffix.empty() && std::all_of(suffix.begin(), suffix.end(),
                                         [](unsigned char ch) { return std::isdigit(ch) != 0; }))
        picked.emplace_back(std::stol(suffix), static_cast<int>(c));
    }
  }
  if (picked.empty()) {
    std::set<std::string> families;
    for (const auto& name : draws.names) {
      if (name == "iter") continue;
      const auto pos = name.find_last_of('_');
      if (pos != std::string::npos && pos + 1 < name.size() &&
          std::all_of(name.begin() + pos + 1, name.end(),
                      [](unsigned char ch) { return std::isdigit(ch) != 0; }))
        families.insert(name.substr(0, pos));
      else
        families.insert(name);
    }
    std::string choices;
    for (const auto& f : families) choices += (choices.empty() ? "" : ", ") + f;
    throw ValidationError("unknown quantity '" + quantity + "'; choices: " + choices);
  }
  std::sort(picked.begin(), picked.end());

  std::ofstream out(out_path);
  if (!out) throw ValidationError("cannot write export file '" + out_path + "'");
  out << "quantity,index,median,lo50,hi50,lo95,hi95\n";
  for (const auto& [index, col] : picked) {
    std::vector<double> pooled;
    for (const auto& chain : draws.chains)
      for (int r = 0; r < chain.rows(); ++r)
        if (std::isfinite(chain(r, col))) pooled.push_back(chain(r, col));
    std::sort(pooled.begin(), pooled.end());
    std::string line = quantity;
    line += ',' + std::to_string(index);
    for (double p : {0.5, 0.25, 0.75, 0.025, 0.975}) {
      line += ',';
      format_double(line, quantile_sorted(pooled, p));
    }
    out << line << "\n";
  }
  if (!out) throw ValidationError("failed while writing export file '" + out_path + "'");
}

}  // namespace crcdl
