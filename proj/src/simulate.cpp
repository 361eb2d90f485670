#include "crcdl/simulate.hpp"

#include <cmath>
#include <string>

#include "crcdl/mathutil.hpp"

namespace crcdl {

namespace {

std::string make_id(int i, int width) {
  std::string n = std::to_string(i + 1);
  return "id" + std::string(width > static_cast<int>(n.size()) ? width - n.size() : 0, '0') + n;
}

}  // namespace

std::pair<CaptureData, TruthRecord> generate(const SimParams& params, std::uint64_t seed) {
  const StudyDesign& des = params.design;
  des.validate();
  const int k1 = des.k1;
  const int M = des.M;
  const int k2max = des.max_k2();
  const bool robust = params.model == ModelKind::robust;
  if (!robust && k2max > 1)
    throw ValidationError("generate: standard model with more than one secondary sample");
  if (static_cast<int>(params.zeta.size()) != k1 || params.zeta[k1 - 1] != 1.0)
    throw ValidationError("generate: zeta must have length k1 and end at 1");
  if (params.covariate == CovariateKind::mass && static_cast<int>(params.Delta.size()) != k1 - 1)
    throw ValidationError("generate: Delta must have length k1-1");

  Rng rng(seed);
  TruthRecord truth;
  truth.params = params;
  truth.seed = seed;

  // period random effects
  truth.eta_S.resize(k1 - 1);
  for (double& v : truth.eta_S) v = rng.normal(0.0, params.sigma_S);
  truth.eta_p.resize(k1);
  for (double& v : truth.eta_p) v = rng.normal(0.0, params.sigma_p1);
  truth.eps_p = Grid2<double>(k1, k2max, 0.0);
  if (robust)
    for (int j = 0; j < k1; ++j)
      for (int l = 0; l < des.k2[j]; ++l) truth.eps_p(j, l) = rng.normal(0.0, params.sigma_p2);

  truth.state = AugmentedState(M, k1);
  truth.lambda = Grid2<double>(M, k1, 0.0);
  truth.zstate = Grid2<int>(M, k1, 1);

  auto effect = [&](int i, int j) -> double {
    if (params.covariate == CovariateKind::mass)
      return (truth.lambda(i, j) - params.mass_loc) / params.mass_scale;
    if (params.covariate == CovariateKind::categorical) return truth.zstate(i, j) == 2 ? 1.0 : 0.0;
    return 0.0;
  };

  Grid3<std::uint8_t> captures(M, k1, k2max, 0);
  std::vector<int> first_alive(M), last_alive(M);

  for (int i = 0; i < M; ++i) {
    truth.state.included[i] = rng.bernoulli(params.psi) ? 1 : 0;

    // entry period from the sequential entry probabilities
    int b = k1 - 1;
    for (int j = 0; j < k1; ++j) {
      if (rng.bernoulli(params.zeta[j])) {
        b = j;
        break;
      }
    }

    // covariate trajectory over the full grid, restarted at entry
    if (params.covariate == CovariateKind::mass) {
      for (int j = 0; j < k1; ++j) {
        if (j == 0 || j == b)
          truth.lambda(i, j) = rng.normal(params.mu_lambda, params.sigma_lambda1);
        else
          truth.lambda(i, j) = rng.normal(truth.lambda(i, j - 1) + params.Delta[j - 1], params.sigma_lambda2);
      }
    } else if (params.covariate == CovariateKind::categorical) {
      for (int j = 0; j < k1; ++j) {
        if (j == 0 || j == b) {
          truth.zstate(i, j) = rng.bernoulli(params.nu[1]) ? 2 : 1;
        } else {
          const auto& row = params.omega[truth.zstate(i, j - 1) - 1];
          truth.zstate(i, j) = rng.bernoulli(row[1]) ? 2 : 1;
        }
      }
    }

    // survival from entry
    int d = b;
    for (int j = b; j + 1 < k1; ++j) {
      double s = invlogit(params.alpha0 + params.alpha1 * effect(i, j) + truth.eta_S[j]);
      if (!rng.bernoulli(s)) break;
      d = j + 1;
    }
    truth.state.set_trajectory(i, b, d);
    first_alive[i] = b;
    last_alive[i] = d;

    // captures while alive and included
    if (!truth.state.included[i]) continue;
    for (int j = b; j <= d; ++j) {
      for (int l = 0; l < des.k2[j]; ++l) {
        double p = invlogit(params.gamma0 + params.gamma1 * effect(i, j) + truth.eta_p[j] +
                            (robust ? truth.eps_p(j, l) : 0.0));
        if (rng.bernoulli(p)) captures(i, j, l) = 1;
      }
    }
  }

  // derived truth
  truth.n_total = 0;
  for (auto w : truth.state.included) truth.n_total += w;
  truth.n_per_period = derive_abundance(truth.state);
  truth.n_per_state = Grid2<int>(2, k1, 0);
  if (params.covariate == CovariateKind::categorical)
    for (int i = 0; i < M; ++i)
      if (truth.state.included[i])
        for (int j = 0; j < k1; ++j)
          if (truth.state.alive(i, j)) ++truth.n_per_state(truth.zstate(i, j) - 1, j);

  // assemble observed data
  std::vector<int> observed;
  for (int i = 0; i < M; ++i) {
    bool any = false;
    for (int j = 0; j < k1 && !any; ++j)
      for (int l = 0; l < des.k2[j] && !any; ++l) any = captures(i, j, l);
    if (any) observed.push_back(i);
  }
  truth.n_observed = static_cast<int>(observed.size());

  CaptureData data;
  data.covariate = params.covariate;
  data.mass_max = params.mass_max;
  data.design = des;
  data.design.n_observed = truth.n_observed;
  data.design.M = truth.n_observed;
  data.captures = Grid3<std::uint8_t>(truth.n_observed, k1, k2max, 0);
  if (params.covariate == CovariateKind::categorical) data.state_obs = Grid2<int>(truth.n_observed, k1, 0);
  const int width = static_cast<int>(std::to_string(M).size());
  data.first_capture.assign(truth.n_observed, -1);
  data.last_capture.assign(truth.n_observed, -1);

  for (int r = 0; r < truth.n_observed; ++r) {
    int i = observed[r];
    data.ids.push_back(make_id(i, width));
    for (int j = 0; j < k1; ++j) {
      bool any = false;
      for (int l = 0; l < des.k2[j]; ++l) {
        if (!captures(i, j, l)) continue;
        any = true;
        data.captures(r, j, l) = 1;
        if (params.covariate == CovariateKind::mass) {
          double z_true = rng.normal(truth.lambda(i, j), params.sigma_z);
          bool censored = z_true >= params.mass_max - 0.5;
          double z_obs = censored ? params.mass_max : std::max(1.0, std::round(z_true));
          data.mass.push_back({r, j, l, z_obs, censored});
        }
      }
      if (any) {
        if (params.covariate == CovariateKind::categorical) data.state_obs(r, j) = truth.zstate(i, j);
        if (data.first_capture[r] < 0) data.first_capture[r] = j;
        data.last_capture[r] = j;
      }
    }
  }
  return {std::move(data), std::move(truth)};
}

void mask_disease(CaptureData& data, double miss_rate, std::uint64_t seed) {
  if (data.covariate != CovariateKind::categorical)
    throw ValidationError("mask_disease: data has no categorical covariate");
  if (!(miss_rate >= 0.0 && miss_rate <= 1.0))
    throw ValidationError("mask_disease: miss_rate must lie in [0, 1]");
  Rng rng(seed);
  for (int i = 0; i < data.state_obs.rows(); ++i)
    for (int j = 0; j < data.state_obs.cols(); ++j)
      if (data.state_obs(i, j) != 0 && rng.bernoulli(miss_rate)) data.state_obs(i, j) = 0;
}

SimParams vole_preset() {
  SimParams p;
  p.model = ModelKind::robust;
  p.covariate = CovariateKind::mass;
  p.design.k1 = 6;
  p.design.k2.assign(6, 5);
  p.design.M = 250;
  p.psi = 0.6;
  p.zeta = {0.45, 0.25, 0.25, 0.25, 0.25, 1.0};
  p.alpha0 = 1.2;
  p.alpha1 = 0.25;
  p.gamma0 = -0.2;
  p.gamma1 = 0.5;
  p.sigma_S = 0.3;
  p.sigma_p1 = 0.3;
  p.sigma_p2 = 0.2;
  p.mu_lambda = 35.0;
  p.sigma_lambda1 = 8.0;
  p.Delta = {2.5, 2.0, 1.5, 2.0, 2.5};
  p.sigma_lambda2 = 2.0;
  p.sigma_z = 1.5;
  p.mass_loc = 40.0;
  p.mass_scale = 8.0;
  p.mass_max = 60.0;
  return p;
}

SimParams finch_preset() {
  SimParams p;
  p.model = ModelKind::standard;
  p.covariate = CovariateKind::categorical;
  p.design.k1 = 16;
  p.design.k2.assign(16, 1);
  p.design.M = 1200;
  p.psi = 0.75;
  p.zeta.assign(16, 0.12);
  p.zeta[0] = 0.35;
  p.zeta[15] = 1.0;
  p.alpha0 = 1.4;
  p.alpha1 = -0.8;
  p.gamma0 = -0.1;
  p.gamma1 = 0.4;
  p.sigma_S = 0.3;
  p.sigma_p1 = 0.25;
  p.nu = {0.85, 0.15};
  p.omega = {{{0.96, 0.04}, {0.25, 0.75}}};
  p.miss_rate = 0.2;
  return p;
}

}  // namespace crcdl
