#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace crcdl {

/** Thrown for malformed inputs: bad dimensions, bad records, bad config. */
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/**
 * @brief Sampling layout of a study.
 *
 * k1 primary periods; k2[j] secondary samples within primary j (all 1 for a
 * standard design); M the size of the augmented individual list; n_observed
 * the number of distinct captured individuals.
 */
struct StudyDesign {
  int k1 = 0;
  std::vector<int> k2;
  int M = 0;
  int n_observed = 0;

  int max_k2() const {
    int m = 0;
    for (int v : k2) m = std::max(m, v);
    return m;
  }

  bool is_standard() const {
    return std::all_of(k2.begin(), k2.end(), [](int v) { return v == 1; });
  }

  void validate() const {
    if (k1 < 2) throw ValidationError("design: k1 must be at least 2, got " + std::to_string(k1));
    if (static_cast<int>(k2.size()) != k1)
      throw ValidationError("design: k2 must list one secondary count per primary period");
    for (int j = 0; j < k1; ++j)
      if (k2[j] < 1)
        throw ValidationError("design: k2[" + std::to_string(j + 1) + "] must be positive");
    if (n_observed < 0) throw ValidationError("design: n_observed must be non-negative");
    if (M < n_observed)
      throw ValidationError("design: augmented size M (" + std::to_string(M) +
                            ") smaller than n_observed (" + std::to_string(n_observed) + ")");
  }
};

}  // namespace crcdl
