#include "crcdl/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "crcdl/design.hpp"
#include "crcdl/mathutil.hpp"

namespace crcdl {

namespace {

// core formula; inputs already validated
double psrf_core(const std::vector<std::vector<double>>& chains) {
  const std::size_t m = chains.size();
  const std::size_t n = chains[0].size();

  std::vector<double> means(m);
  double W = 0.0;
  for (std::size_t c = 0; c < m; ++c) {
    means[c] = mean(chains[c]);
    W += variance(chains[c]);
  }
  W /= static_cast<double>(m);
  double B_over_n = variance(means);

  if (W == 0.0) return B_over_n == 0.0 ? 1.0 : kInf;
  double nn = static_cast<double>(n);
  double vhat = (nn - 1.0) / nn * W + B_over_n;
  return std::max(1.0, std::sqrt(vhat / W));
}

}  // namespace

void format_double(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "nan";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "inf" : "-inf";
    return;
  }
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, p - buf);
}

double psrf(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw ValidationError("psrf: need at least two chains");
  const std::size_t n = chains[0].size();
  for (const auto& c : chains)
    if (c.size() != n) throw ValidationError("psrf: chains must have equal length");
  if (n < 2) throw ValidationError("psrf: chains must have length >= 2");
  return psrf_core(chains);
}

std::vector<SummaryRow> summarize(const PosteriorDraws& draws) {
  if (draws.chains.empty()) throw ValidationError("summarize: no chains");
  const int ncol = static_cast<int>(draws.names.size());
  for (const auto& c : draws.chains)
    if (c.cols() != ncol) throw ValidationError("summarize: chain columns do not match names");

  std::vector<SummaryRow> rows;
  for (int col = 0; col < ncol; ++col) {
    if (draws.names[col] == "iter") continue;
    SummaryRow row;
    row.name = draws.names[col];

    std::vector<std::vector<double>> finite_per_chain;
    std::vector<double> pooled;
    for (const auto& chain : draws.chains) {
      std::vector<double> v;
      v.reserve(chain.rows());
      for (int r = 0; r < chain.rows(); ++r) {
        double x = chain(r, col);
        if (std::isfinite(x)) v.push_back(x);
      }
      pooled.insert(pooled.end(), v.begin(), v.end());
      finite_per_chain.push_back(std::move(v));
    }
    row.n_draws = static_cast<long>(pooled.size());

    std::sort(pooled.begin(), pooled.end());
    row.q2_5 = quantile_sorted(pooled, 0.025);
    row.q25 = quantile_sorted(pooled, 0.25);
    row.median = quantile_sorted(pooled, 0.5);
    row.q75 = quantile_sorted(pooled, 0.75);
    row.q97_5 = quantile_sorted(pooled, 0.975);

    bool usable = finite_per_chain.size() >= 2;
    for (const auto& v : finite_per_chain)
      if (v.size() != finite_per_chain[0].size() || v.size() < 10) usable = false;
    row.psrf = usable ? psrf_core(finite_per_chain) : kNaN;

    rows.push_back(std::move(row));
  }
  return rows;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write summary file '" + path + "'");
  out << "name,median,q2.5,q25,q75,q97.5,psrf,n_draws\n";
  for (const SummaryRow& r : rows) {
    std::string line = r.name;
    for (double v : {r.median, r.q2_5, r.q25, r.q75, r.q97_5, r.psrf}) {
      line += ',';
      format_double(line, v);
    }
    line += ',' + std::to_string(r.n_draws);
    out << line << "\n";
  }
  if (!out) throw ValidationError("failed while writing summary file '" + path + "'");
}

std::pair<std::vector<std::string>, Grid2<double>> read_draws_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open draw file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("draw file '" + path + "' is empty");

  std::vector<std::string> names;
  {
    std::string cur;
    for (char ch : line) {
      if (ch == ',') {
        names.push_back(cur);
        cur.clear();
      } else if (ch != '\r') {
        cur.push_back(ch);
      }
    }
    names.push_back(cur);
  }
  const std::size_t ncol = names.size();

  std::vector<double> values;
  long nrow = 0;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t col = 0, start = 0;
    for (std::size_t pos = 0; pos <= line.size(); ++pos) {
      if (pos == line.size() || line[pos] == ',') {
        std::size_t end = pos;
        while (end > start && line[end - 1] == '\r') --end;
        double v = kNaN;
        std::string_view cell(line.data() + start, end - start);
        if (cell == "inf") {
          v = kInf;
        } else if (cell == "-inf") {
          v = -kInf;
        } else if (cell != "nan") {
          auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
          if (ec != std::errc() || p != cell.data() + cell.size())
            throw ValidationError("draw file '" + path + "' line " + std::to_string(lineno) +
                                  ": bad numeric cell");
        }
        values.push_back(v);
        ++col;
        start = pos + 1;
      }
    }
    if (col != ncol)
      throw ValidationError("draw file '" + path + "' line " + std::to_string(lineno) +
                            ": wrong number of columns");
    ++nrow;
  }

  Grid2<double> grid(static_cast<int>(nrow), static_cast<int>(ncol));
  grid.data() = std::move(values);
  return {std::move(names), std::move(grid)};
}

}  // namespace crcdl
