#pragma once

#include <string>
#include <vector>

#include "crcdl/grid.hpp"

namespace crcdl {

/** Draws from one or more chains over a common set of named scalars.
 *  chains[c] has one row per kept draw and one column per name. */
struct PosteriorDraws {
  std::vector<std::string> names;
  std::vector<Grid2<double>> chains;
};

struct SummaryRow {
  std::string name;
  double median = 0.0, q2_5 = 0.0, q25 = 0.0, q75 = 0.0, q97_5 = 0.0;
  double psrf = 0.0;
  long n_draws = 0;
};

/**
 * Potential scale reduction factor over two or more equal-length chains
 * (length >= 2): with W the mean within-chain variance and B/n the variance
 * of the chain means, returns sqrt(((n-1)/n W + B/n) / W), clamped below at
 * 1. Degenerate chains: all draws identical everywhere gives 1; constant
 * chains at different values gives +inf.
 */
double psrf(const std::vector<std::vector<double>>& chains);

/**
 * Pooled quantile and convergence summary per named column. Quantiles are
 * linear interpolations of order statistics over all finite draws; psrf is
 * NaN when only one chain is present or a column's finite draws are unusable
 * for it. A column named "iter" is treated as bookkeeping and skipped.
 */
std::vector<SummaryRow> summarize(const PosteriorDraws& draws);

/** Columns: name,median,q2.5,q25,q75,q97.5,psrf,n_draws. */
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

/** Append the shortest round-trip decimal form of v; specials spelled
 *  "nan", "inf", "-inf". */
void format_double(std::string& out, double v);

/** Read a draw CSV written by a fit (header of names, numeric rows). */
std::pair<std::vector<std::string>, Grid2<double>> read_draws_csv(const std::string& path);

}  // namespace crcdl
