#include "crcdl/data.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace crcdl {

std::string to_string(ModelKind m) { return m == ModelKind::standard ? "standard" : "robust"; }

std::string to_string(CovariateKind c) {
  switch (c) {
    case CovariateKind::none: return "none";
    case CovariateKind::mass: return "mass";
    default: return "categorical";
  }
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "standard") return ModelKind::standard;
  if (s == "robust") return ModelKind::robust;
  throw ValidationError("unknown model kind '" + s + "' (expected standard or robust)");
}

CovariateKind covariate_kind_from_string(const std::string& s) {
  if (s == "none") return CovariateKind::none;
  if (s == "mass") return CovariateKind::mass;
  if (s == "categorical") return CovariateKind::categorical;
  throw ValidationError("unknown covariate kind '" + s + "' (expected none, mass or categorical)");
}

namespace {

constexpr const char* kHeader = "id,primary,secondary,captured,value,flag";

struct RawRow {
  long line = 0;
  std::string id;
  int primary = 0, secondary = 0, captured = 0;
  std::string value, flag;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

int parse_int(const std::string& s, long line, const char* what) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError("line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  return v;
}

double parse_double(const std::string& s, long line, const char* what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw ValidationError("line " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  return v;
}

}  // namespace

CaptureData ingest_captures(const std::string& path, CovariateKind covariate, double mass_max) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open capture file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw ValidationError("capture file '" + path + "' is empty");
  {
    auto cells = split_csv_line(line);
    std::string got;
    for (std::size_t c = 0; c < cells.size(); ++c) got += (c ? "," : "") + cells[c];
    if (got != kHeader)
      throw ValidationError("capture file header must be '" + std::string(kHeader) + "', got '" + got + "'");
  }

  // pass 1: raw rows, design extent, individual order of first appearance
  std::vector<RawRow> rows;
  std::vector<std::string> ids;
  std::map<std::string, int> index_of;
  int k1 = 0;
  std::map<int, int> max_secondary;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 6)
      throw ValidationError("line " + std::to_string(lineno) + ": expected 6 fields, got " +
                            std::to_string(cells.size()));
    RawRow r;
    r.line = lineno;
    r.id = cells[0];
    r.primary = parse_int(cells[1], lineno, "primary period");
    r.secondary = parse_int(cells[2], lineno, "secondary sample");
    r.captured = parse_int(cells[3], lineno, "captured flag");
    r.value = cells[4];
    r.flag = cells[5];
    if (r.id.empty()) throw ValidationError("line " + std::to_string(lineno) + ": empty id");
    if (r.primary < 1) throw ValidationError("line " + std::to_string(lineno) + ": primary period must be >= 1");
    if (r.secondary < 1)
      throw ValidationError("line " + std::to_string(lineno) + ": secondary sample must be >= 1");
    if (r.captured != 0 && r.captured != 1)
      throw ValidationError("line " + std::to_string(lineno) + ": captured flag must be 0 or 1");
    if (!r.flag.empty() && r.flag != "censored" && r.flag != "unknown" && r.flag != "absent")
      throw ValidationError("line " + std::to_string(lineno) + ": unknown flag '" + r.flag + "'");
    k1 = std::max(k1, r.primary);
    auto& ms = max_secondary[r.primary];
    ms = std::max(ms, r.secondary);
    if (!index_of.count(r.id)) {
      index_of[r.id] = static_cast<int>(ids.size());
      ids.push_back(r.id);
    }
    rows.push_back(std::move(r));
  }

  CaptureData data;
  data.covariate = covariate;
  data.mass_max = mass_max;
  data.ids = ids;
  data.design.k1 = k1;
  data.design.n_observed = static_cast<int>(ids.size());
  data.design.M = data.design.n_observed;
  data.design.k2.assign(std::max(k1, 0), 1);
  for (auto& [j, ms] : max_secondary) data.design.k2[j - 1] = ms;

  if (rows.empty()) return data;  // header-only file: empty dataset
  data.design.validate();

  const int n = data.design.n_observed;
  const int k2max = data.design.max_k2();
  data.captures = Grid3<std::uint8_t>(n, k1, k2max, 0);
  if (covariate == CovariateKind::categorical) data.state_obs = Grid2<int>(n, k1, 0);

  std::set<std::tuple<int, int, int>> seen;
  for (const RawRow& r : rows) {
    int i = index_of[r.id];
    int j = r.primary - 1;
    int l = r.secondary - 1;
    if (l >= data.design.k2[j])
      throw ValidationError("line " + std::to_string(r.line) + ": secondary sample out of range");
    if (!seen.insert({i, j, l}).second)
      throw ValidationError("line " + std::to_string(r.line) + ": duplicate record for id '" + r.id +
                            "', period " + std::to_string(r.primary) + ", sample " +
                            std::to_string(r.secondary));
    if (!r.captured) {
      if (!r.value.empty())
        throw ValidationError("line " + std::to_string(r.line) + ": covariate value on an uncaptured occasion");
      if (!r.flag.empty())
        throw ValidationError("line " + std::to_string(r.line) + ": flag on an uncaptured occasion");
      continue;
    }
    data.captures(i, j, l) = 1;

    if (covariate == CovariateKind::mass) {
      if (r.flag == "unknown")
        throw ValidationError("line " + std::to_string(r.line) + ": 'unknown' flag applies to categorical states");
      if (r.value.empty()) {
        if (r.flag != "absent")
          throw ValidationError("line " + std::to_string(r.line) +
                                ": capture without a mass reading needs the 'absent' flag");
        continue;
      }
      if (r.flag == "absent")
        throw ValidationError("line " + std::to_string(r.line) + ": 'absent' flag with a mass value");
      double z = parse_double(r.value, r.line, "mass");
      if (!(z > 0.0) || z > mass_max)
        throw ValidationError("line " + std::to_string(r.line) + ": mass must lie in (0, " +
                              std::to_string(mass_max) + "]");
      bool censored = z >= mass_max || r.flag == "censored";
      if (r.flag == "censored" && z < mass_max)
        throw ValidationError("line " + std::to_string(r.line) + ": censored flag with mass below the scale max");
      data.mass.push_back({i, j, l, z, censored});
    } else if (covariate == CovariateKind::categorical) {
      if (r.flag == "censored" || r.flag == "absent")
        throw ValidationError("line " + std::to_string(r.line) + ": flag '" + r.flag +
                              "' applies to mass readings");
      int s = 0;
      if (!r.value.empty() && r.flag != "unknown") {
        s = parse_int(r.value, r.line, "state");
        if (s != 1 && s != 2)
          throw ValidationError("line " + std::to_string(r.line) + ": state must be 1 or 2");
      }
      if (s != 0) {
        int& cur = data.state_obs(i, j);
        if (cur != 0 && cur != s)
          throw ValidationError("line " + std::to_string(r.line) + ": conflicting states for id '" + r.id +
                                "' within primary period " + std::to_string(r.primary));
        cur = s;
      }
    } else {
      if (!r.value.empty())
        throw ValidationError("line " + std::to_string(r.line) +
                              ": covariate value present but no covariate was requested");
      if (!r.flag.empty())
        throw ValidationError("line " + std::to_string(r.line) + ": flag present but no covariate was requested");
    }
  }

  data.first_capture.assign(n, -1);
  data.last_capture.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k1; ++j) {
      if (data.captures_in_period(i, j) > 0) {
        if (data.first_capture[i] < 0) data.first_capture[i] = j;
        data.last_capture[i] = j;
      }
    }
    if (data.first_capture[i] < 0)
      throw ValidationError("individual '" + data.ids[i] + "' has no captures");
  }
  return data;
}

void write_captures(const std::string& path, const CaptureData& data) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write capture file '" + path + "'");
  out << kHeader << "\n";

  // index mass records for direct lookup
  std::map<std::tuple<int, int, int>, const MassRecord*> mass_at;
  for (const MassRecord& r : data.mass) mass_at[{r.i, r.j, r.l}] = &r;

  char buf[64];
  for (int i = 0; i < data.design.n_observed; ++i) {
    for (int j = 0; j < data.design.k1; ++j) {
      for (int l = 0; l < data.design.k2[j]; ++l) {
        bool captured = data.captures(i, j, l);
        out << data.ids[i] << ',' << (j + 1) << ',' << (l + 1) << ',' << (captured ? 1 : 0) << ',';
        std::string flag;
        if (captured) {
          if (data.covariate == CovariateKind::mass) {
            auto it = mass_at.find({i, j, l});
            if (it != mass_at.end()) {
              auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), it->second->z_obs);
              out.write(buf, p - buf);
              if (it->second->censored) flag = "censored";
            } else {
              flag = "absent";
            }
          } else if (data.covariate == CovariateKind::categorical) {
            int s = data.state_obs(i, j);
            if (s != 0)
              out << s;
            else
              flag = "unknown";
          }
        }
        out << ',' << flag << "\n";
      }
    }
  }
  if (!out) throw ValidationError("failed while writing capture file '" + path + "'");
}

}  // namespace crcdl
