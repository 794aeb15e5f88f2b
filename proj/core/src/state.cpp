#include "vwave/state.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vwave/errors.hpp"

namespace vwave {

StateField::StateField(GridSpec gs, int k_lo, int k_hi) : gs_(gs), k_lo_(k_lo), k_hi_(k_hi) {
  if (!(gs.dx > 0)) throw ConfigError("grid step must be positive");
  if (k_lo < gs.k_min() || k_hi > gs.k_max() || k_lo > k_hi)
    throw ConfigError("diagonal range outside the grid box");
  rows_.resize(k_hi - k_lo + 1);
  for (int k = k_lo; k <= k_hi; ++k) rows_[k - k_lo].resize(gs.row_width(k));
}

void StateField::truncate(int k_new_hi) {
  if (k_new_hi >= k_hi_) return;
  if (k_new_hi < k_lo_) throw ConfigError("cannot truncate below the first row");
  rows_.resize(k_new_hi - k_lo_ + 1);
  k_hi_ = k_new_hi;
}

void export_state_csv(const StateField& state, const std::string& csv_path,
                      const std::string& json_path, const std::string& coeff_hash) {
  std::ofstream csv(csv_path);
  if (!csv) throw ConfigError("cannot write " + csv_path);
  csv << "i,j,X,Y,u,l,m,h,g,p,q,x,t\n";
  const GridSpec& gs = state.grid();
  char buf[512];
  for (int k = state.k_lo(); k <= state.k_hi(); ++k) {
    int ilo = gs.row_i_lo(k);
    const auto& row = state.row(k);
    for (std::size_t pos = 0; pos < row.size(); ++pos) {
      const StateNode& n = row[pos];
      if (!n.solved) continue;
      int i = ilo + static_cast<int>(pos);
      int j = k - i;
      std::snprintf(buf, sizeof(buf),
                    "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                    i, j, gs.X(i), gs.Y(j), n.u, n.l, n.m, n.h, n.g, n.p, n.q, n.x, n.t);
      csv << buf;
    }
  }

  nlohmann::ordered_json hdr;
  hdr["dx"] = gs.dx;
  hdr["i_lo"] = gs.i_lo;
  hdr["i_hi"] = gs.i_hi;
  hdr["j_lo"] = gs.j_lo;
  hdr["j_hi"] = gs.j_hi;
  hdr["k_lo"] = state.k_lo();
  hdr["k_hi"] = state.k_hi();
  hdr["e0"] = state.e0;
  hdr["covered_time"] = state.covered_time;
  hdr["coeff_hash"] = coeff_hash;
  std::ofstream js(json_path);
  if (!js) throw ConfigError("cannot write " + json_path);
  js << hdr.dump(2) << "\n";
}

StateField import_state_csv(const std::string& csv_path, const std::string& json_path) {
  std::ifstream js(json_path);
  if (!js) throw ConfigError("cannot open " + json_path);
  nlohmann::json hdr;
  js >> hdr;
  GridSpec gs;
  gs.dx = hdr.at("dx").get<double>();
  gs.i_lo = hdr.at("i_lo").get<int>();
  gs.i_hi = hdr.at("i_hi").get<int>();
  gs.j_lo = hdr.at("j_lo").get<int>();
  gs.j_hi = hdr.at("j_hi").get<int>();
  StateField state(gs, hdr.at("k_lo").get<int>(), hdr.at("k_hi").get<int>());
  state.e0 = hdr.value("e0", 0.0);
  state.covered_time = hdr.value("covered_time", 0.0);

  std::ifstream csv(csv_path);
  if (!csv) throw ConfigError("cannot open " + csv_path);
  std::string line;
  if (!std::getline(csv, line) || line.rfind("i,j,", 0) != 0)
    throw ConfigError(csv_path + ": missing state CSV header");
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    double vals[13];
    for (int c = 0; c < 13; ++c) {
      if (!std::getline(ss, cell, ','))
        throw ConfigError(csv_path + ": short row '" + line + "'");
      vals[c] = std::stod(cell);
    }
    int i = static_cast<int>(vals[0]);
    int j = static_cast<int>(vals[1]);
    if (!state.has(i, j))
      throw ConfigError(csv_path + ": node outside the declared grid");
    StateNode& n = state.at(i, j);
    n.u = vals[4];
    n.l = vals[5];
    n.m = vals[6];
    n.h = vals[7];
    n.g = vals[8];
    n.p = vals[9];
    n.q = vals[10];
    n.x = vals[11];
    n.t = vals[12];
    n.solved = true;
  }
  return state;
}

}  // namespace vwave
