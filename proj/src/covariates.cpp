#include "crcdl/covariates.hpp"

#include <cmath>

#include "crcdl/mathutil.hpp"

namespace crcdl {

CensorInterval censoring_interval(bool captured, std::optional<double> z_obs, double scale_max) {
  if (!captured || !z_obs.has_value()) return {0.0, kInf};
  double z = *z_obs;
  if (z >= scale_max) return {scale_max - 0.5, kInf};
  return {std::max(0.0, z - 0.5), z + 0.5};
}

double log_mass_obs(std::span<const double> z_latent, std::span<const double> lambda_at, double sigma_z,
                    std::span<const CensorInterval> intervals) {
  if (z_latent.size() != lambda_at.size() || z_latent.size() != intervals.size())
    throw ValidationError("log_mass_obs: z_latent, lambda_at and intervals must align");
  if (!(sigma_z > 0.0)) throw ValidationError("log_mass_obs: sigma_z must be positive");

  double total = 0.0;
  for (std::size_t r = 0; r < z_latent.size(); ++r) {
    const CensorInterval& iv = intervals[r];
    double z = z_latent[r];
    if (!(z > iv.lo && z < iv.hi)) return kNegInf;
    double a = (iv.lo - lambda_at[r]) / sigma_z;
    double b = std::isinf(iv.hi) ? kInf : (iv.hi - lambda_at[r]) / sigma_z;
    total += log_normal_pdf(z, lambda_at[r], sigma_z) - normal_interval_logmass(a, b);
  }
  return total;
}

double log_mass_walk(const Grid2<double>& lambda, const MassProcessParams& params,
                     std::span<const int> first_alive) {
  const int M = lambda.rows();
  const int k1 = lambda.cols();
  if (static_cast<int>(first_alive.size()) != M)
    throw ValidationError("log_mass_walk: first_alive has wrong length");
  if (static_cast<int>(params.Delta.size()) != k1 - 1)
    throw ValidationError("log_mass_walk: Delta must have length k1-1");
  if (!(params.sigma_lambda1 > 0.0) || !(params.sigma_lambda2 > 0.0))
    throw ValidationError("log_mass_walk: walk sds must be positive");

  double total = 0.0;
  for (int i = 0; i < M; ++i) {
    int b = first_alive[i];
    if (b >= k1) continue;
    total += log_normal_pdf(lambda(i, b), params.mu_lambda, params.sigma_lambda1);
    for (int j = b + 1; j < k1; ++j)
      total += log_normal_pdf(lambda(i, j), lambda(i, j - 1) + params.Delta[j - 1], params.sigma_lambda2);
  }
  return total;
}

double standardize_mass(double z, double loc, double scale) {
  if (!(scale > 0.0)) throw ValidationError("standardize_mass: scale must be positive");
  return (z - loc) / scale;
}

double log_disease_process(const Grid2<int>& z, const std::array<double, 2>& nu,
                           const std::array<std::array<double, 2>, 2>& omega, std::span<const int> first_alive,
                           std::span<const std::uint8_t> included) {
  const int M = z.rows();
  const int k1 = z.cols();
  if (static_cast<int>(first_alive.size()) != M || static_cast<int>(included.size()) != M)
    throw ValidationError("log_disease_process: first_alive and included must have length M");

  double total = 0.0;
  for (int i = 0; i < M; ++i) {
    if (!included[i]) continue;
    int b = first_alive[i];
    if (b >= k1) continue;
    int s = z(i, b);
    if (s < 1 || s > 2) throw ValidationError("log_disease_process: states must be 1 or 2");
    if (nu[s - 1] <= 0.0) return kNegInf;
    total += std::log(nu[s - 1]);
    for (int j = b + 1; j < k1; ++j) {
      int from = z(i, j - 1), to = z(i, j);
      if (to < 1 || to > 2) throw ValidationError("log_disease_process: states must be 1 or 2");
      double w = omega[from - 1][to - 1];
      if (w <= 0.0) return kNegInf;
      total += std::log(w);
    }
  }
  return total;
}

Grid2<double> covariate_effect(const MassProcessParams& params, double loc, double scale) {
  if (!(scale > 0.0)) throw ValidationError("covariate_effect: scale must be positive");
  Grid2<double> eff(params.lambda.rows(), params.lambda.cols());
  for (int i = 0; i < eff.rows(); ++i)
    for (int j = 0; j < eff.cols(); ++j) eff(i, j) = (params.lambda(i, j) - loc) / scale;
  return eff;
}

Grid2<double> covariate_effect(const DiseaseProcessParams& params) {
  Grid2<double> eff(params.z.rows(), params.z.cols());
  for (int i = 0; i < eff.rows(); ++i)
    for (int j = 0; j < eff.cols(); ++j) eff(i, j) = params.z(i, j) == 2 ? 1.0 : 0.0;
  return eff;
}

}  // namespace crcdl
