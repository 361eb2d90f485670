#include "crcdl/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <sstream>
#include <thread>

#include "crcdl/mathutil.hpp"

namespace crcdl {

namespace {

constexpr int kSigS = 0, kSigP1 = 1, kSigP2 = 2, kSigL1 = 3, kSigL2 = 4, kSigZ = 5;

double clamp_prob(double p) { return std::min(1.0 - 1e-12, std::max(1e-12, p)); }

double log_beta_pdf(double x, double a, double b) {
  if (!(x > 0.0 && x < 1.0)) return kNegInf;
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

double log_uniform_sd_pdf(double sd, double upper) {
  if (!(sd > 0.0 && sd < upper)) return kNegInf;
  return -std::log(upper);
}

double initial_scale(const std::map<std::string, double>& overrides, const char* name, double dflt) {
  auto it = overrides.find(name);
  if (it == overrides.end()) return dflt;
  if (!(it->second > 0.0)) throw ValidationError(std::string("proposal scale '") + name + "' must be positive");
  return it->second;
}

}  // namespace

GibbsSampler::GibbsSampler(const CaptureData& data, ModelKind model, const SamplerConfig& cfg, int chain_index,
                           double loc, double scale)
    : robust_(model == ModelKind::robust),
      cov_(data.covariate),
      n_obs_(data.design.n_observed),
      X_(data.captures),
      first_cap_(data.first_capture),
      last_cap_(data.last_capture),
      mass_recs_(data.mass),
      state_known_(data.state_obs),
      cfg_(cfg),
      loc_(loc),
      scale_(scale),
      chain_index_(chain_index),
      rng_(derive_seed(cfg.seed, static_cast<std::uint64_t>(chain_index))) {
  des_ = data.design;
  des_.M = cfg.M;

  mass_ivs_.reserve(mass_recs_.size());
  for (const MassRecord& r : mass_recs_)
    mass_ivs_.push_back(r.censored ? CensorInterval{data.mass_max - 0.5, kInf}
                                   : censoring_interval(true, r.z_obs, data.mass_max));

  if (n_obs_ > 0) {
    mass_by_cell_ = Grid2<std::vector<int>>(n_obs_, des_.k1);
    for (std::size_t r = 0; r < mass_recs_.size(); ++r)
      mass_by_cell_(mass_recs_[r].i, mass_recs_[r].j).push_back(static_cast<int>(r));
  }

  const int k1 = des_.k1;
  const int k2m = std::max(des_.max_k2(), 1);
  const auto& ov = cfg_.proposal_scales;
  scales_["alpha0"].assign(1, initial_scale(ov, "alpha0", 0.2));
  scales_["gamma0"].assign(1, initial_scale(ov, "gamma0", 0.2));
  scales_["eta_S"].assign(std::max(k1 - 1, 0), initial_scale(ov, "eta_S", 0.3));
  scales_["eta_p"].assign(k1, initial_scale(ov, "eta_p", 0.3));
  scales_["log_sd"].assign(6, initial_scale(ov, "log_sd", 0.5));
  if (cov_ != CovariateKind::none) {
    scales_["alpha1"].assign(1, initial_scale(ov, "alpha1", 0.2));
    scales_["gamma1"].assign(1, initial_scale(ov, "gamma1", 0.2));
  }
  if (robust_) scales_["eps_p"].assign(static_cast<std::size_t>(k1) * k2m, initial_scale(ov, "eps_p", 0.3));
  if (cov_ == CovariateKind::mass) {
    scales_["mu_lambda"].assign(1, initial_scale(ov, "mu_lambda", 1.0));
    scales_["Delta"].assign(std::max(k1 - 1, 0), initial_scale(ov, "Delta", 0.5));
    scales_["lambda"].assign(static_cast<std::size_t>(des_.M) * k1, initial_scale(ov, "lambda", 2.0));
  }
}

double GibbsSampler::effect(int i, int j) const {
  switch (cov_) {
    case CovariateKind::mass: return (ch_.mass.lambda(i, j) - loc_) / scale_;
    case CovariateKind::categorical: return ch_.disease.z(i, j) == 2 ? 1.0 : 0.0;
    default: return 0.0;
  }
}

double GibbsSampler::logit_surv(int i, int j) const {
  return ch_.link.alpha0 + ch_.link.alpha1 * effect(i, j) + ch_.link.eta_S[j];
}

double GibbsSampler::logit_capt(int i, int j, int l) const {
  double x = ch_.link.gamma0 + ch_.link.gamma1 * effect(i, j) + ch_.link.eta_p[j];
  if (robust_) x += ch_.link.eps_p(j, l);
  return x;
}

double GibbsSampler::log_surv_term(int i, int j) const { return log_invlogit(logit_surv(i, j)); }

double GibbsSampler::log_death_term(int i, int j) const { return log1m_invlogit(logit_surv(i, j)); }

std::uint8_t GibbsSampler::captured(int i, int j, int l) const { return i < n_obs_ ? X_(i, j, l) : 0; }

double GibbsSampler::log_capture_cell(int i, int j) const {
  double lp = 0.0;
  for (int l = 0; l < des_.k2[j]; ++l) {
    double x = logit_capt(i, j, l);
    lp += captured(i, j, l) ? log_invlogit(x) : log1m_invlogit(x);
  }
  return lp;
}

double GibbsSampler::log_nocapture_cell(int i, int j) const {
  double lp = 0.0;
  for (int l = 0; l < des_.k2[j]; ++l) lp += log1m_invlogit(logit_capt(i, j, l));
  return lp;
}

double GibbsSampler::mortality_loglik() const {
  double lp = 0.0;
  for (int i = 0; i < des_.M; ++i) {
    if (!ch_.state.included[i]) continue;
    const int b = ch_.first_alive[i], d = ch_.last_alive[i];
    for (int j = b; j < d; ++j) lp += log_surv_term(i, j);
    if (d < des_.k1 - 1) lp += log_death_term(i, d);
  }
  return lp;
}

double GibbsSampler::capture_loglik() const {
  double lp = 0.0;
  for (int i = 0; i < des_.M; ++i) {
    if (!ch_.state.included[i]) continue;
    const int b = ch_.first_alive[i], d = ch_.last_alive[i];
    for (int j = b; j <= d; ++j) lp += log_capture_cell(i, j);
  }
  return lp;
}

void GibbsSampler::tally(const std::string& block, int index, int accepted) {
  auto& a = accepts_[block];
  a[0] += accepted;
  a[1] += 1;
  if (!adapting_) return;
  double& s = scales_.at(block)[index];
  double step = (accepted - cfg_.target_accept) / std::pow(static_cast<double>(adapt_t_), 0.6);
  s = std::clamp(s * std::exp(step), 1e-8, 1e6);
}

void GibbsSampler::rwm_update(const std::string& block, int index, double& par, double prior_sd,
                              const std::function<double()>& loglik) {
  const double old = par;
  const double cur = loglik() + log_normal_pdf(old, 0.0, prior_sd);
  par = old + scales_.at(block)[index] * rng_.normal();
  const double prop = loglik() + log_normal_pdf(par, 0.0, prior_sd);
  int acc = 0;
  if (std::isfinite(prop) && std::log(rng_.uniform()) < prop - cur)
    acc = 1;
  else
    par = old;
  tally(block, index, acc);
}

void GibbsSampler::rwm_logsd(int index, double& sd, const std::function<double(double)>& loglik) {
  const double x = std::log(sd);
  // density of log sd under a Uniform(0, upper) sd prior is proportional to e^x
  const double cur = loglik(sd) + x;
  const double xp = x + scales_.at("log_sd")[index] * rng_.normal();
  const double sdp = std::exp(xp);
  int acc = 0;
  if (sdp < cfg_.priors.sd_upper) {
    const double prop = loglik(sdp) + xp;
    if (std::isfinite(prop) && std::log(rng_.uniform()) < prop - cur) {
      sd = sdp;
      acc = 1;
    }
  }
  tally("log_sd", index, acc);
}

void GibbsSampler::update_entry_probs() {
  const int k1 = des_.k1;
  std::vector<int> cnt(k1, 0);
  int remaining = 0;
  for (int i = 0; i < des_.M; ++i) {
    if (!ch_.state.included[i]) continue;
    ++cnt[ch_.first_alive[i]];
    ++remaining;
  }
  for (int j = 0; j < k1 - 1; ++j) {
    const int succ = cnt[j];
    const int fail = remaining - succ;
    ch_.birth.zeta[j] = clamp_prob(rng_.beta(cfg_.priors.zeta_a + succ, cfg_.priors.zeta_b + fail));
    remaining = fail;
  }
  ch_.birth.zeta[k1 - 1] = 1.0;
}

void GibbsSampler::update_disease_probs() {
  const double d0 = cfg_.priors.dirichlet;
  std::array<double, 2> an{d0, d0};
  std::array<std::array<double, 2>, 2> at{{{d0, d0}, {d0, d0}}};
  for (int i = 0; i < des_.M; ++i) {
    if (!ch_.state.included[i]) continue;
    const int b = ch_.first_alive[i];
    an[ch_.disease.z(i, b) - 1] += 1.0;
    for (int j = b + 1; j < des_.k1; ++j) at[ch_.disease.z(i, j - 1) - 1][ch_.disease.z(i, j) - 1] += 1.0;
  }
  rng_.dirichlet(an, ch_.disease.nu);
  rng_.dirichlet(at[0], ch_.disease.omega[0]);
  rng_.dirichlet(at[1], ch_.disease.omega[1]);
}

void GibbsSampler::update_coefficients() {
  rwm_update("alpha0", 0, ch_.link.alpha0, cfg_.priors.coef_sd, [this] { return mortality_loglik(); });
  if (cov_ != CovariateKind::none)
    rwm_update("alpha1", 0, ch_.link.alpha1, cfg_.priors.coef_sd, [this] { return mortality_loglik(); });
  rwm_update("gamma0", 0, ch_.link.gamma0, cfg_.priors.coef_sd, [this] { return capture_loglik(); });
  if (cov_ != CovariateKind::none)
    rwm_update("gamma1", 0, ch_.link.gamma1, cfg_.priors.coef_sd, [this] { return capture_loglik(); });
}

void GibbsSampler::update_random_effects() {
  const int k1 = des_.k1;
  for (int j = 0; j < k1 - 1; ++j) {
    rwm_update("eta_S", j, ch_.link.eta_S[j], ch_.link.sigma_S, [this, j] {
      double lp = 0.0;
      for (int i = 0; i < des_.M; ++i) {
        if (!ch_.state.included[i]) continue;
        const int b = ch_.first_alive[i], d = ch_.last_alive[i];
        if (j < b || j > d) continue;
        lp += (j < d) ? log_surv_term(i, j) : log_death_term(i, j);
      }
      return lp;
    });
  }
  for (int j = 0; j < k1; ++j) {
    rwm_update("eta_p", j, ch_.link.eta_p[j], ch_.link.sigma_p1, [this, j] {
      double lp = 0.0;
      for (int i = 0; i < des_.M; ++i) {
        if (!ch_.state.included[i]) continue;
        if (j < ch_.first_alive[i] || j > ch_.last_alive[i]) continue;
        lp += log_capture_cell(i, j);
      }
      return lp;
    });
  }
  if (!robust_) return;
  const int k2m = ch_.link.eps_p.cols();
  for (int j = 0; j < k1; ++j) {
    for (int l = 0; l < des_.k2[j]; ++l) {
      rwm_update("eps_p", j * k2m + l, ch_.link.eps_p(j, l), ch_.link.sigma_p2, [this, j, l] {
        double lp = 0.0;
        for (int i = 0; i < des_.M; ++i) {
          if (!ch_.state.included[i]) continue;
          if (j < ch_.first_alive[i] || j > ch_.last_alive[i]) continue;
          const double x = logit_capt(i, j, l);
          lp += captured(i, j, l) ? log_invlogit(x) : log1m_invlogit(x);
        }
        return lp;
      });
    }
  }
}

void GibbsSampler::update_sds() {
  rwm_logsd(kSigS, ch_.link.sigma_S, [this](double s) {
    double lp = 0.0;
    for (double v : ch_.link.eta_S) lp += log_normal_pdf(v, 0.0, s);
    return lp;
  });
  rwm_logsd(kSigP1, ch_.link.sigma_p1, [this](double s) {
    double lp = 0.0;
    for (double v : ch_.link.eta_p) lp += log_normal_pdf(v, 0.0, s);
    return lp;
  });
  if (robust_) {
    rwm_logsd(kSigP2, ch_.link.sigma_p2, [this](double s) {
      double lp = 0.0;
      for (int j = 0; j < des_.k1; ++j)
        for (int l = 0; l < des_.k2[j]; ++l) lp += log_normal_pdf(ch_.link.eps_p(j, l), 0.0, s);
      return lp;
    });
  }
  if (cov_ != CovariateKind::mass) return;
  rwm_logsd(kSigL1, ch_.mass.sigma_lambda1, [this](double s) {
    double lp = 0.0;
    for (int i = 0; i < des_.M; ++i) {
      if (!ch_.state.included[i]) continue;
      lp += log_normal_pdf(ch_.mass.lambda(i, ch_.first_alive[i]), ch_.mass.mu_lambda, s);
    }
    return lp;
  });
  rwm_logsd(kSigL2, ch_.mass.sigma_lambda2, [this](double s) {
    double lp = 0.0;
    for (int i = 0; i < des_.M; ++i) {
      if (!ch_.state.included[i]) continue;
      for (int j = ch_.first_alive[i] + 1; j < des_.k1; ++j)
        lp += log_normal_pdf(ch_.mass.lambda(i, j), ch_.mass.lambda(i, j - 1) + ch_.mass.Delta[j - 1], s);
    }
    return lp;
  });
  rwm_logsd(kSigZ, ch_.mass.sigma_z, [this](double s) {
    double lp = 0.0;
    for (std::size_t r = 0; r < mass_recs_.size(); ++r)
      lp += log_normal_pdf(ch_.mass.z_latent[r], ch_.mass.lambda(mass_recs_[r].i, mass_recs_[r].j), s);
    return lp;
  });
}

void GibbsSampler::update_mass_params() {
  rwm_update("mu_lambda", 0, ch_.mass.mu_lambda, cfg_.priors.coef_sd, [this] {
    double lp = 0.0;
    for (int i = 0; i < des_.M; ++i) {
      if (!ch_.state.included[i]) continue;
      lp += log_normal_pdf(ch_.mass.lambda(i, ch_.first_alive[i]), ch_.mass.mu_lambda, ch_.mass.sigma_lambda1);
    }
    return lp;
  });
  for (int r = 0; r < des_.k1 - 1; ++r) {
    rwm_update("Delta", r, ch_.mass.Delta[r], cfg_.priors.coef_sd, [this, r] {
      double lp = 0.0;
      for (int i = 0; i < des_.M; ++i) {
        if (!ch_.state.included[i]) continue;
        if (ch_.first_alive[i] > r) continue;
        lp += log_normal_pdf(ch_.mass.lambda(i, r + 1), ch_.mass.lambda(i, r) + ch_.mass.Delta[r],
                             ch_.mass.sigma_lambda2);
      }
      return lp;
    });
  }
}

/**
 * Conditional parameter updates. Every target below conditions only on the
 * included individuals' model factors; the prior-only structure (excluded
 * rows, pre-entry covariate cells) is integrated out of each conditional,
 * which is exact because that structure follows the same law as the model
 * prior, and is redrawn from the updated parameters immediately after this
 * step completes.
 */
void GibbsSampler::update_parameters() {
  update_entry_probs();
  if (cov_ == CovariateKind::categorical) update_disease_probs();
  update_coefficients();
  update_random_effects();
  update_sds();
  if (cov_ == CovariateKind::mass) update_mass_params();
}

void GibbsSampler::draw_covariate_row(int i, int b) {
  const int k1 = des_.k1;
  if (cov_ == CovariateKind::mass) {
    auto& mp = ch_.mass;
    for (int j = 0; j < k1; ++j) {
      if (j == 0 || j == b)
        mp.lambda(i, j) = rng_.normal(mp.mu_lambda, mp.sigma_lambda1);
      else
        mp.lambda(i, j) = rng_.normal(mp.lambda(i, j - 1) + mp.Delta[j - 1], mp.sigma_lambda2);
    }
  } else if (cov_ == CovariateKind::categorical) {
    auto& dp = ch_.disease;
    for (int j = 0; j < k1; ++j) {
      if (j == 0 || j == b)
        dp.z(i, j) = rng_.uniform() < dp.nu[0] ? 1 : 2;
      else
        dp.z(i, j) = rng_.uniform() < dp.omega[dp.z(i, j - 1) - 1][0] ? 1 : 2;
    }
  }
}

void GibbsSampler::draw_prior_trajectory(int i) {
  const int k1 = des_.k1;
  int b = 0;
  while (b < k1 - 1 && !rng_.bernoulli(ch_.birth.zeta[b])) ++b;
  draw_covariate_row(i, b);
  int d = b;
  for (int j = b; j < k1 - 1; ++j) {
    if (!rng_.bernoulli(invlogit(logit_surv(i, j)))) break;
    d = j + 1;
  }
  ch_.state.set_trajectory(i, b, d);
  ch_.first_alive[i] = b;
  ch_.last_alive[i] = d;
}

void GibbsSampler::draw_prebirth_covariates(int i) {
  const int b = ch_.first_alive[i];
  if (cov_ == CovariateKind::mass) {
    auto& mp = ch_.mass;
    for (int j = 0; j < b; ++j) {
      if (j == 0)
        mp.lambda(i, j) = rng_.normal(mp.mu_lambda, mp.sigma_lambda1);
      else
        mp.lambda(i, j) = rng_.normal(mp.lambda(i, j - 1) + mp.Delta[j - 1], mp.sigma_lambda2);
    }
  } else if (cov_ == CovariateKind::categorical) {
    auto& dp = ch_.disease;
    for (int j = 0; j < b; ++j) {
      if (j == 0)
        dp.z(i, j) = rng_.uniform() < dp.nu[0] ? 1 : 2;
      else
        dp.z(i, j) = rng_.uniform() < dp.omega[dp.z(i, j - 1) - 1][0] ? 1 : 2;
    }
  }
}

void GibbsSampler::refresh_prior_only_structure() {
  for (int i = 0; i < des_.M; ++i) {
    if (!ch_.state.included[i])
      draw_prior_trajectory(i);
    else if (cov_ != CovariateKind::none)
      draw_prebirth_covariates(i);
  }
}

void GibbsSampler::update_entry_period(int i) {
  const int d = ch_.last_alive[i];
  const int f = (i < n_obs_) ? first_cap_[i] : des_.k1;
  const int ub = std::min(f, d);
  const auto& zeta = ch_.birth.zeta;

  // entry-prior part, walking the still-unborn probability forward
  logw_.assign(ub + 1, 0.0);
  double pre1m = 0.0;
  for (int b = 0; b <= ub; ++b) {
    logw_[b] = std::log(zeta[b]) + pre1m;
    pre1m += std::log1p(-zeta[b]);
  }
  // survival, capture and covariate-restart parts, accumulated from the
  // latest option downward; an earlier entry adds the alive-cell factors of
  // every period it uncovers and swaps cell b's pseudo-prior factor for the
  // model's restart factor
  double acc = 0.0;
  for (int b = ub; b >= 0; --b) {
    if (b > 0) {
      if (cov_ == CovariateKind::mass) {
        const auto& mp = ch_.mass;
        logw_[b] += log_normal_pdf(mp.lambda(i, b), mp.mu_lambda, mp.sigma_lambda1) -
                    log_normal_pdf(mp.lambda(i, b), mp.lambda(i, b - 1) + mp.Delta[b - 1], mp.sigma_lambda2);
      } else if (cov_ == CovariateKind::categorical) {
        const auto& dp = ch_.disease;
        logw_[b] += std::log(dp.nu[dp.z(i, b) - 1]) - std::log(dp.omega[dp.z(i, b - 1) - 1][dp.z(i, b) - 1]);
      }
    }
    logw_[b] += acc;
    if (b > 0) acc += log_surv_term(i, b - 1) + log_capture_cell(i, b - 1);
  }
  if (*std::max_element(logw_.begin(), logw_.end()) == kNegInf)
    throw SamplerError("entry-period update has no feasible option for individual " + std::to_string(i));
  const int b_new = rng_.categorical_logw(logw_);
  ch_.state.set_trajectory(i, b_new, d);
  ch_.first_alive[i] = b_new;
}

void GibbsSampler::update_death_period(int i) {
  const int k1 = des_.k1;
  const int b = ch_.first_alive[i];
  const int lb = (i < n_obs_) ? std::max(last_cap_[i], b) : b;

  logw_.assign(k1 - lb, 0.0);
  double acc = 0.0;
  for (int d = lb; d < k1; ++d) {
    if (d > lb) acc += log_surv_term(i, d - 1) + log_capture_cell(i, d);
    logw_[d - lb] = acc + (d < k1 - 1 ? log_death_term(i, d) : 0.0);
  }
  if (*std::max_element(logw_.begin(), logw_.end()) == kNegInf)
    throw SamplerError("death-period update has no feasible option for individual " + std::to_string(i));
  const int d_new = lb + rng_.categorical_logw(logw_);
  ch_.state.set_trajectory(i, b, d_new);
  ch_.last_alive[i] = d_new;
}

/**
 * Enumerated Gibbs draws of entry given death and death given entry for each
 * included individual. Excluded rows already received their exact
 * conditional (the prior process) in the regeneration step.
 */
void GibbsSampler::update_birth_death() {
  for (int i = 0; i < des_.M; ++i) {
    if (!ch_.state.included[i]) continue;
    update_entry_period(i);
    update_death_period(i);
  }
}

double GibbsSampler::mass_cell_logdens(int i, int j, double v) const {
  const auto& mp = ch_.mass;
  const int k1 = des_.k1;
  const int b = ch_.first_alive[i], d = ch_.last_alive[i];
  double lp = 0.0;
  if (j == 0 || j == b)
    lp += log_normal_pdf(v, mp.mu_lambda, mp.sigma_lambda1);
  else
    lp += log_normal_pdf(v, mp.lambda(i, j - 1) + mp.Delta[j - 1], mp.sigma_lambda2);
  if (j + 1 < k1 && j + 1 != b) lp += log_normal_pdf(mp.lambda(i, j + 1), v + mp.Delta[j], mp.sigma_lambda2);
  if (i < n_obs_)
    for (int r : mass_by_cell_(i, j)) lp += log_normal_pdf(mp.z_latent[r], v, mp.sigma_z);
  if (b <= j && j <= d) {
    const double eff = (v - loc_) / scale_;
    if (j <= k1 - 2) {
      const double ls = ch_.link.alpha0 + ch_.link.alpha1 * eff + ch_.link.eta_S[j];
      if (j < d)
        lp += log_invlogit(ls);
      else
        lp += log1m_invlogit(ls);
    }
    for (int l = 0; l < des_.k2[j]; ++l) {
      double lc = ch_.link.gamma0 + ch_.link.gamma1 * eff + ch_.link.eta_p[j];
      if (robust_) lc += ch_.link.eps_p(j, l);
      lp += captured(i, j, l) ? log_invlogit(lc) : log1m_invlogit(lc);
    }
  }
  return lp;
}

void GibbsSampler::update_mass_cells() {
  const int k1 = des_.k1;
  auto& lam = ch_.mass.lambda;
  auto& sc = scales_.at("lambda");
  auto& counts = accepts_["lambda"];
  const double adapt_step = adapting_ ? 1.0 / std::pow(static_cast<double>(adapt_t_), 0.6) : 0.0;
  for (int i = 0; i < des_.M; ++i) {
    if (!ch_.state.included[i]) continue;
    for (int j = 0; j < k1; ++j) {
      const std::size_t idx = static_cast<std::size_t>(i) * k1 + j;
      const double old = lam(i, j);
      const double cur = mass_cell_logdens(i, j, old);
      const double prop = old + sc[idx] * rng_.normal();
      const double lp = mass_cell_logdens(i, j, prop);
      int acc = 0;
      if (std::isfinite(lp) && std::log(rng_.uniform()) < lp - cur) {
        lam(i, j) = prop;
        acc = 1;
      }
      counts[0] += acc;
      counts[1] += 1;
      if (adapting_) sc[idx] = std::clamp(sc[idx] * std::exp((acc - cfg_.target_accept) * adapt_step), 1e-8, 1e6);
    }
  }
}

void GibbsSampler::update_mass_latents() {
  auto& mp = ch_.mass;
  for (std::size_t r = 0; r < mass_recs_.size(); ++r) {
    const double mean = mp.lambda(mass_recs_[r].i, mass_recs_[r].j);
    mp.z_latent[r] = rng_.truncated_normal(mean, mp.sigma_z, mass_ivs_[r].lo, mass_ivs_[r].hi);
  }
}

void GibbsSampler::update_disease_cells() {
  const int k1 = des_.k1;
  auto& dp = ch_.disease;
  double lw[2];
  for (int i = 0; i < des_.M; ++i) {
    if (!ch_.state.included[i]) continue;
    const int b = ch_.first_alive[i], d = ch_.last_alive[i];
    for (int j = 0; j < k1; ++j) {
      if (i < n_obs_ && state_known_(i, j) != 0) continue;
      for (int v = 1; v <= 2; ++v) {
        double lp;
        if (j == 0 || j == b)
          lp = std::log(dp.nu[v - 1]);
        else
          lp = std::log(dp.omega[dp.z(i, j - 1) - 1][v - 1]);
        if (j + 1 < k1 && j + 1 != b) lp += std::log(dp.omega[v - 1][dp.z(i, j + 1) - 1]);
        if (b <= j && j <= d) {
          const double eff = (v == 2) ? 1.0 : 0.0;
          if (j <= k1 - 2) {
            const double ls = ch_.link.alpha0 + ch_.link.alpha1 * eff + ch_.link.eta_S[j];
            lp += (j < d) ? log_invlogit(ls) : log1m_invlogit(ls);
          }
          for (int l = 0; l < des_.k2[j]; ++l) {
            double lc = ch_.link.gamma0 + ch_.link.gamma1 * eff + ch_.link.eta_p[j];
            if (robust_) lc += ch_.link.eps_p(j, l);
            lp += captured(i, j, l) ? log_invlogit(lc) : log1m_invlogit(lc);
          }
        }
        lw[v - 1] = lp;
      }
      if (lw[0] == kNegInf && lw[1] == kNegInf)
        throw SamplerError("disease-state update has no feasible option for individual " + std::to_string(i));
      dp.z(i, j) = 1 + rng_.categorical_logw(std::span<const double>(lw, 2));
    }
  }
}

void GibbsSampler::update_covariates() {
  if (cov_ == CovariateKind::mass) {
    update_mass_cells();
    if (cfg_.censoring) update_mass_latents();
  } else if (cov_ == CovariateKind::categorical) {
    update_disease_cells();
  }
}

double GibbsSampler::inclusion_log_odds(int i) const {
  double lp = std::log(ch_.birth.psi) - std::log1p(-ch_.birth.psi);
  for (int j = ch_.first_alive[i]; j <= ch_.last_alive[i]; ++j) lp += log_nocapture_cell(i, j);
  return lp;
}

void GibbsSampler::update_inclusion() {
  int sum_w = 0;
  for (int i = 0; i < des_.M; ++i) {
    if (i >= n_obs_) ch_.state.included[i] = rng_.bernoulli(invlogit(inclusion_log_odds(i))) ? 1 : 0;
    sum_w += ch_.state.included[i];
  }
  ch_.birth.psi = clamp_prob(rng_.beta(1.0 + sum_w, 1.0 + des_.M - sum_w));
}

void GibbsSampler::sweep(bool adapting, long t) {
  adapting_ = adapting;
  adapt_t_ = std::max<long>(1, t);
  update_parameters();
  refresh_prior_only_structure();
  update_birth_death();
  update_covariates();
  update_inclusion();
  ++ch_.iteration;
}

DemographicSummary GibbsSampler::derived() const { return make_demographic_summary(ch_.state, ch_.birth.zeta); }

std::vector<std::string> draw_column_names(const StudyDesign& design, ModelKind model, CovariateKind cov) {
  const int k1 = design.k1;
  std::vector<std::string> names;
  names.push_back("iter");
  for (int j = 1; j < k1; ++j) names.push_back("zeta_" + std::to_string(j));
  names.push_back("psi");
  names.push_back("alpha0");
  if (cov != CovariateKind::none) names.push_back("alpha1");
  names.push_back("gamma0");
  if (cov != CovariateKind::none) names.push_back("gamma1");
  names.push_back("sigma_S");
  names.push_back("sigma_p1");
  if (model == ModelKind::robust) names.push_back("sigma_p2");
  if (cov == CovariateKind::mass) {
    names.push_back("mu_lambda");
    for (int j = 1; j < k1; ++j) names.push_back("Delta_" + std::to_string(j));
    names.push_back("sigma_lambda1");
    names.push_back("sigma_lambda2");
    names.push_back("sigma_z");
  }
  if (cov == CovariateKind::categorical) {
    names.push_back("nu_1");
    names.push_back("omega_11");
    names.push_back("omega_22");
  }
  for (int j = 1; j < k1; ++j) names.push_back("eta_S_" + std::to_string(j));
  for (int j = 1; j <= k1; ++j) names.push_back("eta_p_" + std::to_string(j));
  names.push_back("N_total");
  for (int j = 1; j <= k1; ++j) names.push_back("N_" + std::to_string(j));
  if (cov == CovariateKind::categorical) {
    for (int j = 1; j <= k1; ++j) names.push_back("N1_" + std::to_string(j));
    for (int j = 1; j <= k1; ++j) names.push_back("N2_" + std::to_string(j));
  }
  for (int j = 0; j < k1; ++j) names.push_back("beta_" + std::to_string(j));
  for (int j = 1; j < k1; ++j) names.push_back("eta_" + std::to_string(j));
  names.push_back("lifetime_mean");
  return names;
}

std::vector<std::string> GibbsSampler::column_names() const {
  return draw_column_names(des_, robust_ ? ModelKind::robust : ModelKind::standard, cov_);
}

std::vector<double> GibbsSampler::record_row(long iter) const {
  const int k1 = des_.k1;
  const DemographicSummary s = derived();
  std::vector<double> row;
  row.push_back(static_cast<double>(iter));
  for (int j = 0; j < k1 - 1; ++j) row.push_back(ch_.birth.zeta[j]);
  row.push_back(ch_.birth.psi);
  row.push_back(ch_.link.alpha0);
  if (cov_ != CovariateKind::none) row.push_back(ch_.link.alpha1);
  row.push_back(ch_.link.gamma0);
  if (cov_ != CovariateKind::none) row.push_back(ch_.link.gamma1);
  row.push_back(ch_.link.sigma_S);
  row.push_back(ch_.link.sigma_p1);
  if (robust_) row.push_back(ch_.link.sigma_p2);
  if (cov_ == CovariateKind::mass) {
    row.push_back(ch_.mass.mu_lambda);
    for (int j = 0; j < k1 - 1; ++j) row.push_back(ch_.mass.Delta[j]);
    row.push_back(ch_.mass.sigma_lambda1);
    row.push_back(ch_.mass.sigma_lambda2);
    row.push_back(ch_.mass.sigma_z);
  }
  if (cov_ == CovariateKind::categorical) {
    row.push_back(ch_.disease.nu[0]);
    row.push_back(ch_.disease.omega[0][0]);
    row.push_back(ch_.disease.omega[1][1]);
  }
  for (int j = 0; j < k1 - 1; ++j) row.push_back(ch_.link.eta_S[j]);
  for (int j = 0; j < k1; ++j) row.push_back(ch_.link.eta_p[j]);
  row.push_back(static_cast<double>(s.n_total));
  for (int j = 0; j < k1; ++j) row.push_back(static_cast<double>(s.n_per_period[j]));
  if (cov_ == CovariateKind::categorical) {
    for (int st = 1; st <= 2; ++st) {
      for (int j = 0; j < k1; ++j) {
        int n = 0;
        for (int i = 0; i < des_.M; ++i)
          if (ch_.state.included[i] && ch_.state.alive(i, j) && ch_.disease.z(i, j) == st) ++n;
        row.push_back(static_cast<double>(n));
      }
    }
  }
  for (int j = 0; j < k1; ++j) row.push_back(s.beta[j]);
  for (int j = 0; j < k1 - 1; ++j) row.push_back(s.eta[j]);
  double life = kNaN;
  if (s.n_total > 0) {
    long total = 0;
    for (int i = 0; i < des_.M; ++i)
      if (ch_.state.included[i]) total += s.lifetime[i];
    life = static_cast<double>(total) / s.n_total;
  }
  row.push_back(life);
  return row;
}

long GibbsSampler::check_draw_identities() const {
  long bad = 0;
  const int k1 = des_.k1;
  const auto beta = zeta_to_beta(ch_.birth.zeta);
  double sum = 0.0;
  for (double b : beta) sum += b;
  if (std::abs(sum - 1.0) > 1e-12) ++bad;

  const auto counted = derive_abundance(ch_.state);
  for (int j = 0; j < k1; ++j) {
    int direct = 0;
    for (int i = 0; i < des_.M; ++i)
      if (ch_.state.included[i] && ch_.state.born(i, j) && ch_.state.not_dead(i, j)) ++direct;
    if (direct != counted[j]) ++bad;
  }

  for (int i = 0; i < n_obs_; ++i) {
    const int span = last_cap_[i] - first_cap_[i] + 1;
    const int life = ch_.last_alive[i] - ch_.first_alive[i] + 1;
    if (life < span || ch_.first_alive[i] > first_cap_[i] || ch_.last_alive[i] < last_cap_[i]) ++bad;
  }
  return bad;
}

void GibbsSampler::validate_state() const {
  ch_.state.validate();
  if (ch_.birth.zeta.back() != 1.0) throw SamplerError("zeta terminal entry drifted from 1");
  for (int i = 0; i < n_obs_; ++i)
    if (!ch_.state.included[i]) throw SamplerError("observed individual excluded");
  if (check_draw_identities() != 0) throw SamplerError("derived-quantity identity violated");
}

double GibbsSampler::log_joint() const {
  const int k1 = des_.k1;
  const int M = des_.M;

  Grid2<double> eff(M, k1, 0.0);
  if (cov_ == CovariateKind::mass)
    eff = covariate_effect(ch_.mass, loc_, scale_);
  else if (cov_ == CovariateKind::categorical)
    eff = covariate_effect(ch_.disease);

  const LinkProbs probs = link_probabilities(ch_.link, eff, des_, robust_);
  double lp = log_birth(ch_.state.born, ch_.state.included, ch_.birth.zeta);
  lp += log_mortality(ch_.state.not_dead, ch_.state.born, ch_.state.included, probs.surv);

  if (robust_) {
    Grid3<std::uint8_t> caps(M, k1, des_.max_k2(), 0);
    for (int i = 0; i < n_obs_; ++i)
      for (int j = 0; j < k1; ++j)
        for (int l = 0; l < des_.k2[j]; ++l) caps(i, j, l) = X_(i, j, l);
    lp += log_capture_robust(caps, ch_.state.born, ch_.state.not_dead, ch_.state.included, probs.p_robust,
                             des_.k2);
  } else {
    Grid2<std::uint8_t> caps(M, k1, 0);
    for (int i = 0; i < n_obs_; ++i)
      for (int j = 0; j < k1; ++j) caps(i, j) = X_(i, j, 0);
    lp += log_capture(caps, ch_.state.born, ch_.state.not_dead, ch_.state.included, probs.p);
  }

  std::vector<int> masked_first(M);
  for (int i = 0; i < M; ++i) masked_first[i] = ch_.state.included[i] ? ch_.first_alive[i] : k1;
  if (cov_ == CovariateKind::mass) {
    lp += log_mass_walk(ch_.mass.lambda, ch_.mass, masked_first);
    std::vector<double> lam_at(mass_recs_.size());
    for (std::size_t r = 0; r < mass_recs_.size(); ++r)
      lam_at[r] = ch_.mass.lambda(mass_recs_[r].i, mass_recs_[r].j);
    lp += log_mass_obs(ch_.mass.z_latent, lam_at, ch_.mass.sigma_z, mass_ivs_);
  } else if (cov_ == CovariateKind::categorical) {
    lp += log_disease_process(ch_.disease.z, ch_.disease.nu, ch_.disease.omega, masked_first,
                              ch_.state.included);
  }

  const Priors& pr = cfg_.priors;
  for (int j = 0; j < k1 - 1; ++j) lp += log_beta_pdf(ch_.birth.zeta[j], pr.zeta_a, pr.zeta_b);
  lp += log_beta_pdf(ch_.birth.psi, 1.0, 1.0);
  for (int i = 0; i < M; ++i)
    lp += ch_.state.included[i] ? std::log(ch_.birth.psi) : std::log1p(-ch_.birth.psi);

  lp += log_normal_pdf(ch_.link.alpha0, 0.0, pr.coef_sd) + log_normal_pdf(ch_.link.gamma0, 0.0, pr.coef_sd);
  if (cov_ != CovariateKind::none)
    lp += log_normal_pdf(ch_.link.alpha1, 0.0, pr.coef_sd) + log_normal_pdf(ch_.link.gamma1, 0.0, pr.coef_sd);
  for (double v : ch_.link.eta_S) lp += log_normal_pdf(v, 0.0, ch_.link.sigma_S);
  for (double v : ch_.link.eta_p) lp += log_normal_pdf(v, 0.0, ch_.link.sigma_p1);
  lp += log_uniform_sd_pdf(ch_.link.sigma_S, pr.sd_upper) + log_uniform_sd_pdf(ch_.link.sigma_p1, pr.sd_upper);
  if (robust_) {
    for (int j = 0; j < k1; ++j)
      for (int l = 0; l < des_.k2[j]; ++l) lp += log_normal_pdf(ch_.link.eps_p(j, l), 0.0, ch_.link.sigma_p2);
    lp += log_uniform_sd_pdf(ch_.link.sigma_p2, pr.sd_upper);
  }
  if (cov_ == CovariateKind::mass) {
    lp += log_normal_pdf(ch_.mass.mu_lambda, 0.0, pr.coef_sd);
    for (double v : ch_.mass.Delta) lp += log_normal_pdf(v, 0.0, pr.coef_sd);
    lp += log_uniform_sd_pdf(ch_.mass.sigma_lambda1, pr.sd_upper) +
          log_uniform_sd_pdf(ch_.mass.sigma_lambda2, pr.sd_upper) +
          log_uniform_sd_pdf(ch_.mass.sigma_z, pr.sd_upper);
  }
  if (cov_ == CovariateKind::categorical) {
    lp += log_beta_pdf(ch_.disease.nu[0], pr.dirichlet, pr.dirichlet);
    lp += log_beta_pdf(ch_.disease.omega[0][0], pr.dirichlet, pr.dirichlet);
    lp += log_beta_pdf(ch_.disease.omega[1][0], pr.dirichlet, pr.dirichlet);
  }
  return lp;
}

void GibbsSampler::init() {
  const int k1 = des_.k1;
  const int M = des_.M;

  ch_.state = AugmentedState(M, k1);
  ch_.first_alive.assign(M, 0);
  ch_.last_alive.assign(M, k1 - 1);
  ch_.iteration = 0;

  ch_.birth.zeta.assign(k1, 0.0);
  for (int j = 0; j < k1; ++j) ch_.birth.zeta[j] = 1.0 / (k1 - j);
  ch_.birth.psi = (M == 0) ? 0.5 : std::clamp(1.5 * std::max(n_obs_, 1) / M, 0.05, 0.95);

  ch_.link = LinkParams{};
  ch_.link.eta_S.assign(k1 - 1, 0.0);
  ch_.link.eta_p.assign(k1, 0.0);
  ch_.link.eps_p = Grid2<double>(k1, std::max(des_.max_k2(), 1), 0.0);
  ch_.link.sigma_S = ch_.link.sigma_p1 = ch_.link.sigma_p2 = 0.5;
  ch_.link.alpha0 = 0.5 + rng_.uniform(-1.0, 1.0);
  ch_.link.gamma0 = rng_.uniform(-1.0, 1.0);
  ch_.link.alpha1 = ch_.link.gamma1 = 0.0;
  if (cov_ != CovariateKind::none) {
    ch_.link.alpha1 = rng_.uniform(-1.0, 1.0);
    ch_.link.gamma1 = rng_.uniform(-1.0, 1.0);
  }

  if (cov_ == CovariateKind::mass) {
    ch_.mass = MassProcessParams{};
    ch_.mass.mu_lambda = loc_ + rng_.uniform(-1.0, 1.0);
    ch_.mass.sigma_lambda1 = std::clamp(scale_, 0.5, 0.9 * cfg_.priors.sd_upper);
    ch_.mass.sigma_lambda2 = 1.0;
    ch_.mass.sigma_z = 1.0;
    ch_.mass.Delta.assign(k1 - 1, 0.0);
    ch_.mass.lambda = Grid2<double>(M, k1, loc_);
    // nearest recorded mass per period, observed rows only
    for (int i = 0; i < n_obs_; ++i) {
      std::vector<int> recs;
      for (int jj = 0; jj < k1; ++jj)
        for (int r : mass_by_cell_(i, jj)) recs.push_back(r);
      if (recs.empty()) continue;
      for (int j = 0; j < k1; ++j) {
        int best = recs.front();
        for (int r : recs)
          if (std::abs(mass_recs_[r].j - j) < std::abs(mass_recs_[best].j - j)) best = r;
        ch_.mass.lambda(i, j) = mass_recs_[best].z_obs;
      }
    }
    ch_.mass.z_latent.resize(mass_recs_.size());
    for (std::size_t r = 0; r < mass_recs_.size(); ++r)
      ch_.mass.z_latent[r] = mass_recs_[r].censored ? mass_ivs_[r].lo + 0.5 : mass_recs_[r].z_obs;
  } else if (cov_ == CovariateKind::categorical) {
    ch_.disease = DiseaseProcessParams{};
    ch_.disease.nu = {0.5, 0.5};
    ch_.disease.omega = {{{0.8, 0.2}, {0.2, 0.8}}};
    ch_.disease.z = Grid2<int>(M, k1, 1);
    for (int i = 0; i < n_obs_; ++i) {
      for (int j = 0; j < k1; ++j) {
        int best = 0, best_dist = k1 + 1;
        for (int jj = 0; jj < k1; ++jj) {
          if (state_known_(i, jj) == 0) continue;
          const int dist = std::abs(jj - j);
          if (dist < best_dist) {
            best_dist = dist;
            best = state_known_(i, jj);
          }
        }
        if (best != 0) ch_.disease.z(i, j) = best;
      }
    }
  }

  for (int i = 0; i < n_obs_; ++i) {
    ch_.state.set_trajectory(i, first_cap_[i], k1 - 1);
    ch_.first_alive[i] = first_cap_[i];
    ch_.last_alive[i] = k1 - 1;
    ch_.state.included[i] = 1;
  }
  for (int i = n_obs_; i < M; ++i) {
    ch_.state.included[i] = rng_.bernoulli(ch_.birth.psi) ? 1 : 0;
    draw_prior_trajectory(i);
  }

  const double lj = log_joint();
  if (!std::isfinite(lj)) {
    std::ostringstream os;
    os << "non-finite joint density at initialization (chain " << chain_index_ << "): log density " << lj
       << "; check covariate readings, study design and prior bounds";
    throw SamplerError(os.str());
  }
}

namespace {

struct ChainOutput {
  Grid2<double> draws;
  std::map<std::string, std::array<long, 2>> accepts;
  long identity_violations = 0;
  std::exception_ptr error;
};

void run_one_chain(const CaptureData& data, ModelKind model, const SamplerConfig& cfg, int chain_index,
                   double loc, double scale, int n_cols, ChainOutput& out) {
  try {
    GibbsSampler s(data, model, cfg, chain_index, loc, scale);
    s.init();
    const long kept_total = cfg.n_iter / cfg.thin;
    out.draws = Grid2<double>(static_cast<int>(kept_total), n_cols, 0.0);
    long kept = 0;
    for (long t = 1; t <= cfg.n_adapt; ++t) {
      s.sweep(true, t);
      if (cfg.validate_every > 0 && t % cfg.validate_every == 0) s.validate_state();
      if (cfg.progress_every > 0 && t % cfg.progress_every == 0)
        std::fprintf(stderr, "chain %d adapt %ld/%ld\n", chain_index, t, cfg.n_adapt);
    }
    for (long t = 1; t <= cfg.n_iter; ++t) {
      s.sweep(false, t);
      if (cfg.validate_every > 0 && t % cfg.validate_every == 0) s.validate_state();
      if (t % cfg.thin == 0) {
        const auto row = s.record_row(t);
        for (int c = 0; c < n_cols; ++c) out.draws(static_cast<int>(kept), c) = row[c];
        ++kept;
        if (cfg.check_identities) out.identity_violations += s.check_draw_identities();
      }
      if (cfg.progress_every > 0 && t % cfg.progress_every == 0) {
        std::string acc;
        for (const auto& [name, cnt] : s.acceptance_counts()) {
          char buf[64];
          std::snprintf(buf, sizeof(buf), " %s=%.2f", name.c_str(),
                        cnt[1] ? static_cast<double>(cnt[0]) / cnt[1] : 0.0);
          acc += buf;
        }
        std::fprintf(stderr, "chain %d iter %ld/%ld accept:%s\n", chain_index, t, cfg.n_iter, acc.c_str());
      }
    }
    out.accepts = s.acceptance_counts();
  } catch (...) {
    out.error = std::current_exception();
  }
}

}  // namespace

FitResult run(const CaptureData& data, ModelKind model, const SamplerConfig& cfg_in) {
  SamplerConfig cfg = cfg_in;
  if (cfg.n_chains < 1) throw ValidationError("n_chains must be >= 1");
  if (cfg.n_adapt < 0) throw ValidationError("n_adapt must be >= 0");
  if (cfg.n_iter < 1) throw ValidationError("n_iter must be >= 1");
  if (cfg.thin < 1) throw ValidationError("thin must be >= 1");
  if (!(cfg.target_accept > 0.0 && cfg.target_accept < 1.0))
    throw ValidationError("target_accept must lie in (0, 1)");
  if (cfg.M < 0) throw ValidationError("M must be >= 0");

  const int n_obs = data.design.n_observed;
  if (model == ModelKind::standard && !data.design.is_standard())
    throw ValidationError("standard model requires exactly one secondary sample per primary period");
  if (cfg.M == 0) cfg.M = 2 * n_obs;
  if (cfg.M < n_obs) throw ValidationError("M must be at least the number of observed individuals");
  if (data.design.k1 < 2) throw ValidationError("a fit needs at least two primary periods");
  data.design.validate();

  double loc = 0.0, scale = 1.0;
  std::vector<std::string> warnings;
  if (cfg.fixed_standardization) {
    if (!(cfg.scale > 0.0)) throw ValidationError("standardization scale must be positive");
    loc = cfg.loc;
    scale = cfg.scale;
  } else if (data.covariate == CovariateKind::mass) {
    std::vector<double> zs;
    zs.reserve(data.mass.size());
    for (const MassRecord& r : data.mass) zs.push_back(r.z_obs);
    if (zs.size() >= 2) {
      loc = mean(zs);
      scale = std::sqrt(variance(zs));
      if (!(scale > 0.0)) scale = 1.0;
    } else {
      warnings.push_back("too few mass readings to standardize; using loc=0, scale=1");
    }
  }

  for (const auto& [name, value] : cfg.proposal_scales) {
    static const std::vector<std::string> known{"alpha0", "alpha1", "gamma0",    "gamma1", "eta_S", "eta_p",
                                                "eps_p",  "log_sd", "mu_lambda", "Delta",  "lambda"};
    if (std::find(known.begin(), known.end(), name) == known.end())
      throw ValidationError("unknown proposal scale block '" + name + "'");
    if (!(value > 0.0)) throw ValidationError("proposal scale '" + name + "' must be positive");
  }

  const auto names = draw_column_names(data.design, model, data.covariate);
  const int n_cols = static_cast<int>(names.size());

  std::vector<ChainOutput> outputs(cfg.n_chains);
  std::vector<std::thread> threads;
  threads.reserve(cfg.n_chains);
  for (int c = 0; c < cfg.n_chains; ++c)
    threads.emplace_back(run_one_chain, std::cref(data), model, std::cref(cfg), c, loc, scale, n_cols,
                         std::ref(outputs[c]));
  for (auto& t : threads) t.join();
  for (auto& o : outputs)
    if (o.error) std::rethrow_exception(o.error);

  FitResult result;
  result.draws.names = names;
  result.loc = loc;
  result.scale = scale;
  result.M = cfg.M;
  result.warnings = std::move(warnings);
  std::map<std::string, std::array<long, 2>> pooled;
  for (auto& o : outputs) {
    result.draws.chains.push_back(std::move(o.draws));
    result.identity_violations += o.identity_violations;
    for (const auto& [name, cnt] : o.accepts) {
      pooled[name][0] += cnt[0];
      pooled[name][1] += cnt[1];
    }
  }
  for (const auto& [name, cnt] : pooled)
    result.acceptance[name] = cnt[1] ? static_cast<double>(cnt[0]) / cnt[1] : 0.0;

  const auto it = std::find(names.begin(), names.end(), "N_total");
  const int n_col = static_cast<int>(it - names.begin());
  long at_m = 0, total = 0;
  for (const auto& g : result.draws.chains) {
    for (int r = 0; r < g.rows(); ++r, ++total)
      if (g(r, n_col) >= cfg.M) ++at_m;
  }
  result.frac_n_at_m = total ? static_cast<double>(at_m) / total : 0.0;
  if (cfg.M > n_obs && result.frac_n_at_m >= 0.01) {
    std::ostringstream os;
    os << "posterior puts " << 100.0 * result.frac_n_at_m << "% of its mass at N_total = M = " << cfg.M
       << "; increase M";
    result.warnings.push_back(os.str());
  }
  return result;
}

}  // namespace crcdl
