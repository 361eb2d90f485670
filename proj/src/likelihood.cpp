#include "crcdl/likelihood.hpp"

#include <cmath>

#include "crcdl/mathutil.hpp"

namespace crcdl {

namespace {

void check_dims(int rows, int cols, const Grid2<std::uint8_t>& m, const char* name) {
  if (m.rows() != rows || m.cols() != cols)
    throw ValidationError(std::string("likelihood: ") + name + " has wrong dimensions");
}

}  // namespace

LinkProbs link_probabilities(const LinkParams& params, const Grid2<double>& effect, const StudyDesign& design,
                             bool robust) {
  const int M = effect.rows();
  const int k1 = design.k1;
  if (effect.cols() != k1) throw ValidationError("link_probabilities: effect must be M x k1");
  if (static_cast<int>(params.eta_S.size()) != k1 - 1)
    throw ValidationError("link_probabilities: eta_S must have length k1-1");
  if (static_cast<int>(params.eta_p.size()) != k1)
    throw ValidationError("link_probabilities: eta_p must have length k1");

  LinkProbs out;
  out.surv = Grid2<double>(M, k1 - 1);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j + 1 < k1; ++j)
      out.surv(i, j) = invlogit(params.alpha0 + params.alpha1 * effect(i, j) + params.eta_S[j]);

  if (robust) {
    const int k2max = design.max_k2();
    if (params.eps_p.rows() != k1 || params.eps_p.cols() < k2max)
      throw ValidationError("link_probabilities: eps_p must cover k1 x max_k2");
    out.p_robust = Grid3<double>(M, k1, k2max);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < k1; ++j)
        for (int l = 0; l < design.k2[j]; ++l)
          out.p_robust(i, j, l) =
              invlogit(params.gamma0 + params.gamma1 * effect(i, j) + params.eta_p[j] + params.eps_p(j, l));
  } else {
    out.p = Grid2<double>(M, k1);
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < k1; ++j)
        out.p(i, j) = invlogit(params.gamma0 + params.gamma1 * effect(i, j) + params.eta_p[j]);
  }
  return out;
}

double log_birth(const Grid2<std::uint8_t>& born, std::span<const std::uint8_t> included,
                 std::span<const double> zeta) {
  const int M = born.rows();
  const int k1 = born.cols();
  if (static_cast<int>(included.size()) != M) throw ValidationError("log_birth: included has wrong length");
  if (static_cast<int>(zeta.size()) != k1) throw ValidationError("log_birth: zeta has wrong length");
  if (zeta[k1 - 1] != 1.0) throw ValidationError("log_birth: final entry probability must be 1");

  double total = 0.0;
  for (int i = 0; i < M; ++i) {
    if (!included[i]) continue;
    bool entered = false;
    for (int j = 0; j < k1; ++j) {
      if (born(i, j)) {
        if (!entered) {
          // entry at j
          if (zeta[j] <= 0.0) return kNegInf;
          total += std::log(zeta[j]);
          entered = true;
        }
      } else {
        if (entered) return kNegInf;  // born row dropped back to 0
        if (zeta[j] >= 1.0) return kNegInf;
        total += std::log1p(-zeta[j]);
      }
    }
  }
  return total;
}

double log_mortality(const Grid2<std::uint8_t>& not_dead, const Grid2<std::uint8_t>& born,
                     std::span<const std::uint8_t> included, const Grid2<double>& surv) {
  const int M = not_dead.rows();
  const int k1 = not_dead.cols();
  check_dims(M, k1, born, "born");
  if (static_cast<int>(included.size()) != M) throw ValidationError("log_mortality: included has wrong length");
  if (surv.rows() != M || surv.cols() != k1 - 1)
    throw ValidationError("log_mortality: surv must be M x (k1-1)");

  double total = 0.0;
  for (int i = 0; i < M; ++i) {
    if (!included[i]) continue;
    if (!not_dead(i, 0)) return kNegInf;  // death cannot precede the study
    for (int j = 1; j < k1; ++j) {
      if (not_dead(i, j) && !not_dead(i, j - 1)) return kNegInf;  // resurrection
      if (!not_dead(i, j - 1)) continue;                          // stays dead with probability 1
      if (!born(i, j - 1)) {
        // not yet entered: persists with probability 1
        if (!not_dead(i, j)) return kNegInf;
        continue;
      }
      double s = surv(i, j - 1);
      if (not_dead(i, j)) {
        if (s <= 0.0) return kNegInf;
        total += std::log(s);
      } else {
        if (s >= 1.0) return kNegInf;
        total += std::log1p(-s);
      }
    }
  }
  return total;
}

double log_capture(const Grid2<std::uint8_t>& captures, const Grid2<std::uint8_t>& born,
                   const Grid2<std::uint8_t>& not_dead, std::span<const std::uint8_t> included,
                   const Grid2<double>& p) {
  const int M = captures.rows();
  const int k1 = captures.cols();
  check_dims(M, k1, born, "born");
  check_dims(M, k1, not_dead, "not_dead");
  if (static_cast<int>(included.size()) != M) throw ValidationError("log_capture: included has wrong length");
  if (p.rows() != M || p.cols() != k1) throw ValidationError("log_capture: p must be M x k1");

  double total = 0.0;
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < k1; ++j) {
      bool at_risk = included[i] && born(i, j) && not_dead(i, j);
      if (!at_risk) {
        if (captures(i, j)) return kNegInf;  // capture of an unavailable individual
        continue;
      }
      double pr = p(i, j);
      if (captures(i, j)) {
        if (pr <= 0.0) return kNegInf;
        total += std::log(pr);
      } else {
        if (pr >= 1.0) return kNegInf;
        total += std::log1p(-pr);
      }
    }
  }
  return total;
}

double log_capture_robust(const Grid3<std::uint8_t>& captures, const Grid2<std::uint8_t>& born,
                          const Grid2<std::uint8_t>& not_dead, std::span<const std::uint8_t> included,
                          const Grid3<double>& p, std::span<const int> k2) {
  const int M = captures.dim1();
  const int k1 = captures.dim2();
  check_dims(M, k1, born, "born");
  check_dims(M, k1, not_dead, "not_dead");
  if (static_cast<int>(included.size()) != M)
    throw ValidationError("log_capture_robust: included has wrong length");
  if (p.dim1() != M || p.dim2() != k1 || p.dim3() != captures.dim3())
    throw ValidationError("log_capture_robust: p must match captures in shape");
  if (static_cast<int>(k2.size()) != k1) throw ValidationError("log_capture_robust: k2 has wrong length");

  double total = 0.0;
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < k1; ++j) {
      bool at_risk = included[i] && born(i, j) && not_dead(i, j);
      for (int l = 0; l < k2[j]; ++l) {
        if (!at_risk) {
          if (captures(i, j, l)) return kNegInf;
          continue;
        }
        double pr = p(i, j, l);
        if (captures(i, j, l)) {
          if (pr <= 0.0) return kNegInf;
          total += std::log(pr);
        } else {
          if (pr >= 1.0) return kNegInf;
          total += std::log1p(-pr);
        }
      }
    }
  }
  return total;
}

}  // namespace crcdl
