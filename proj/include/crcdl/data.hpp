#pragma once

#include <string>
#include <vector>

#include "crcdl/design.hpp"
#include "crcdl/grid.hpp"

namespace crcdl {

enum class ModelKind { standard, robust };
enum class CovariateKind { none, mass, categorical };

std::string to_string(ModelKind m);
std::string to_string(CovariateKind c);
ModelKind model_kind_from_string(const std::string& s);
CovariateKind covariate_kind_from_string(const std::string& s);

/** One recorded mass: individual i, primary j, secondary l (0-based). */
struct MassRecord {
  int i = 0, j = 0, l = 0;
  double z_obs = 0.0;
  bool censored = false;
};

/**
 * @brief Ingested capture records in dense individual-major form.
 *
 * Only observed individuals are stored; the augmented pseudo-individuals of
 * a fit are appended downstream. state_obs uses 0 for unknown, otherwise the
 * recorded categorical state. design.M is left equal to n_observed until a
 * fit decides the augmentation size.
 */
struct CaptureData {
  StudyDesign design;
  CovariateKind covariate = CovariateKind::none;
  std::vector<std::string> ids;
  Grid3<std::uint8_t> captures;  // n_observed x k1 x max_k2
  std::vector<int> first_capture, last_capture;

  std::vector<MassRecord> mass;
  double mass_max = 60.0;

  Grid2<int> state_obs;  // n_observed x k1

  /** Total captures of individual i in primary j. */
  int captures_in_period(int i, int j) const {
    int n = 0;
    for (int l = 0; l < design.k2[j]; ++l) n += captures(i, j, l);
    return n;
  }
};

/**
 * Read a flat capture CSV. Columns: id,primary,secondary,captured,value,flag.
 * One row per individual and sampling occasion; captured is 0/1; value holds
 * the covariate reading at a capture (mass in grams, or categorical state
 * 1/2) and is empty when there is none; flag is empty, "censored" (mass at
 * the scale maximum), "unknown" (masked categorical state) or "absent"
 * (capture with no mass reading). Throws
 * ValidationError with a line reference on any malformed record. A file with
 * a header and no rows yields an empty dataset; a file without the header is
 * an error.
 */
CaptureData ingest_captures(const std::string& path, CovariateKind covariate, double mass_max = 60.0);

/** Write the full occasion grid back to CSV in the ingest format. */
void write_captures(const std::string& path, const CaptureData& data);

}  // namespace crcdl
