#include "vwave/singular.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <array>
#include <map>
#include <optional>

#include <json.hpp>

#include "vwave/errors.hpp"

namespace vwave {

namespace {

constexpr std::size_t kFlagCap = 4096;

double field_of(const StateNode& n, SingularFamily fam) {
  return fam == SingularFamily::kBackward ? n.h : n.g;
}

// Unique key for a lattice edge; orient 0 = toward +X, 1 = toward +Y.
long long edge_key(int i, int j, int orient) {
  const long long off = 1LL << 20;
  return (((i + off) << 22) | (j + off)) << 1 | orient;
}

struct Crossing {
  double X, Y, x, t;
  int near_i, near_j;
  std::vector<int> nbr;
};

}  // namespace

std::vector<SingularCurve> zero_curves(const StateField& state, SingularFamily family,
                                       double eps_level) {
  const GridSpec& gs = state.grid();
  double level = eps_level;

  std::map<long long, int> edge_to_crossing;
  std::vector<Crossing> crossings;

  auto crossing_on_edge = [&](int i, int j, int orient) -> int {
    long long key = edge_key(i, j, orient);
    auto it = edge_to_crossing.find(key);
    if (it != edge_to_crossing.end()) return it->second;
    int i2 = orient == 0 ? i + 1 : i;
    int j2 = orient == 0 ? j : j + 1;
    const StateNode& a = state.at(i, j);
    const StateNode& b = state.at(i2, j2);
    double va = field_of(a, family) - level;
    double vb = field_of(b, family) - level;
    double frac = (vb != va) ? va / (va - vb) : 0.0;
    frac = std::clamp(frac, 0.0, 1.0);
    Crossing c;
    c.X = gs.X(i) + frac * (gs.X(i2) - gs.X(i));
    c.Y = gs.Y(j) + frac * (gs.Y(j2) - gs.Y(j));
    c.x = a.x + frac * (b.x - a.x);
    c.t = a.t + frac * (b.t - a.t);
    c.near_i = frac < 0.5 ? i : i2;
    c.near_j = frac < 0.5 ? j : j2;
    crossings.push_back(c);
    int idx = static_cast<int>(crossings.size()) - 1;
    edge_to_crossing[key] = idx;
    return idx;
  };

  auto add_segment = [&](int ea, int eb) {
    crossings[ea].nbr.push_back(eb);
    crossings[eb].nbr.push_back(ea);
  };

  for (int k = state.k_lo(); k <= state.k_hi(); ++k) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; ++i) {
      int j = k - i;
      if (!state.solved(i, j) || !state.solved(i + 1, j) || !state.solved(i, j + 1) ||
          !state.solved(i + 1, j + 1))
        continue;
      double v00 = field_of(state.at(i, j), family) - level;
      double v10 = field_of(state.at(i + 1, j), family) - level;
      double v01 = field_of(state.at(i, j + 1), family) - level;
      double v11 = field_of(state.at(i + 1, j + 1), family) - level;
      bool s00 = v00 >= 0, s10 = v10 >= 0, s01 = v01 >= 0, s11 = v11 >= 0;
      bool bottom = s00 != s10, right = s10 != s11, top = s01 != s11, left = s00 != s01;
      int crossed = bottom + right + top + left;
      if (crossed == 0) continue;

      auto eb = [&] { return crossing_on_edge(i, j, 0); };
      auto er = [&] { return crossing_on_edge(i + 1, j, 1); };
      auto et = [&] { return crossing_on_edge(i, j + 1, 0); };
      auto el = [&] { return crossing_on_edge(i, j, 1); };

      if (crossed == 2) {
        int a = -1, b = -1;
        if (bottom) a = eb();
        if (right) (a < 0 ? a : b) = er();
        if (top) (a < 0 ? a : b) = et();
        if (left) (a < 0 ? a : b) = el();
        add_segment(a, b);
      } else if (crossed == 4) {
        double c = 0.25 * (v00 + v10 + v01 + v11);
        bool center = c >= 0;
        if (s00) {  // positives on the main diagonal
          if (center) {
            add_segment(eb(), er());
            add_segment(el(), et());
          } else {
            add_segment(eb(), el());
            add_segment(er(), et());
          }
        } else {  // positives on the anti-diagonal
          if (center) {
            add_segment(eb(), el());
            add_segment(er(), et());
          } else {
            add_segment(eb(), er());
            add_segment(el(), et());
          }
        }
      }
    }
  }

  // Stitch crossings into polylines: open chains first, then loops.
  std::vector<SingularCurve> curves;
  std::vector<char> visited(crossings.size(), 0);
  auto walk = [&](int start) {
    SingularCurve cur;
    cur.family = family;
    int prev = -1, node = start;
    while (node >= 0 && !visited[node]) {
      visited[node] = 1;
      const Crossing& c = crossings[node];
      cur.pts.push_back({c.X, c.Y, c.x, c.t});
      int next = -1;
      for (int nb : c.nbr)
        if (nb != prev && !visited[nb]) {
          next = nb;
          break;
        }
      prev = node;
      node = next;
    }
    if (cur.pts.size() >= 2) curves.push_back(std::move(cur));
  };
  for (std::size_t c = 0; c < crossings.size(); ++c)
    if (!visited[c] && crossings[c].nbr.size() <= 1) walk(static_cast<int>(c));
  for (std::size_t c = 0; c < crossings.size(); ++c)
    if (!visited[c]) walk(static_cast<int>(c));

  return curves;
}

namespace {

struct DiffProbe {
  double h, g, l_X, l_XX, m_Y, m_YY;
  double x, t, u;
  bool ok;
};

DiffProbe probe_node(const StateField& state, int i, int j) {
  DiffProbe p{};
  const GridSpec& gs = state.grid();
  // clamp toward the interior so the centered stencils exist
  for (int tries = 0; tries < 4; ++tries) {
    if (state.solved(i - 1, j) && state.solved(i + 1, j) && state.solved(i, j - 1) &&
        state.solved(i, j + 1))
      break;
    if (!state.solved(i - 1, j)) ++i;
    else if (!state.solved(i + 1, j)) --i;
    else if (!state.solved(i, j - 1)) ++j;
    else if (!state.solved(i, j + 1)) --j;
  }
  if (!(state.solved(i - 1, j) && state.solved(i + 1, j) && state.solved(i, j - 1) &&
        state.solved(i, j + 1) && state.solved(i, j))) {
    p.ok = false;
    return p;
  }
  const StateNode& n = state.at(i, j);
  const StateNode& e = state.at(i + 1, j);
  const StateNode& w = state.at(i - 1, j);
  const StateNode& nn = state.at(i, j + 1);
  const StateNode& s = state.at(i, j - 1);
  double dx = gs.dx;
  p.h = n.h;
  p.g = n.g;
  p.l_X = (e.l - w.l) / (2 * dx);
  p.l_XX = (e.l - 2 * n.l + w.l) / (dx * dx);
  p.m_Y = (nn.m - s.m) / (2 * dx);
  p.m_YY = (nn.m - 2 * n.m + s.m) / (dx * dx);
  p.x = n.x;
  p.t = n.t;
  p.u = n.u;
  p.ok = true;
  return p;
}

std::optional<std::pair<double, std::array<double, 2>>> seg_intersect(
    const CurveVertex& a0, const CurveVertex& a1, const CurveVertex& b0,
    const CurveVertex& b1) {
  double rX = a1.X - a0.X, rY = a1.Y - a0.Y;
  double sX = b1.X - b0.X, sY = b1.Y - b0.Y;
  double den = rX * sY - rY * sX;
  if (den == 0) return std::nullopt;
  double qpX = b0.X - a0.X, qpY = b0.Y - a0.Y;
  double tpar = (qpX * sY - qpY * sX) / den;
  double upar = (qpX * rY - qpY * rX) / den;
  if (tpar < 0 || tpar > 1 || upar < 0 || upar > 1) return std::nullopt;
  return std::make_pair(tpar, std::array<double, 2>{a0.X + tpar * rX, a0.Y + tpar * rY});
}

}  // namespace

std::vector<SingularPoint> classify(const StateField& state, const CoefficientSet& cs,
                                    const std::vector<SingularCurve>& curves,
                                    ClassifyTols tols) {
  const GridSpec& gs = state.grid();
  double tol_c = tols.tol_c > 0 ? tols.tol_c : gs.dx;
  std::vector<SingularPoint> pts;

  for (const SingularCurve& cv : curves) {
    bool backward = cv.family == SingularFamily::kBackward;
    std::vector<double> deriv1(cv.pts.size(), 0.0);
    std::vector<DiffProbe> probes(cv.pts.size());
    for (std::size_t v = 0; v < cv.pts.size(); ++v) {
      int ni = static_cast<int>(std::lround(cv.pts[v].X / gs.dx));
      int nj = static_cast<int>(std::lround(cv.pts[v].Y / gs.dx));
      probes[v] = probe_node(state, ni, nj);
      deriv1[v] = backward ? probes[v].l_X : probes[v].m_Y;
    }
    for (std::size_t v = 0; v < cv.pts.size(); ++v) {
      if (!probes[v].ok) continue;
      const DiffProbe& pb = probes[v];
      SingularPoint sp;
      sp.X = cv.pts[v].X;
      sp.Y = cv.pts[v].Y;
      sp.x = cv.pts[v].x;
      sp.t = cv.pts[v].t;
      sp.family = cv.family;
      sp.witness.h = pb.h;
      sp.witness.g = pb.g;
      sp.witness.l_X = pb.l_X;
      sp.witness.l_XX = pb.l_XX;
      sp.witness.m_Y = pb.m_Y;
      sp.witness.m_YY = pb.m_YY;
      DerivedCoeffs dc = cs.derived_at(pb.x, pb.u);
      sp.witness.lam_m_u = dc.lam_m_u;
      sp.witness.lam_p_u = dc.lam_p_u;

      double d1 = deriv1[v];
      double d2 = backward ? pb.l_XX : pb.m_YY;
      double other = backward ? pb.g : pb.h;
      bool sign_change = (v > 0 && probes[v - 1].ok && deriv1[v - 1] * d1 < 0 &&
                          std::abs(d1) <= std::abs(deriv1[v - 1])) ||
                         (v + 1 < cv.pts.size() && probes[v + 1].ok && deriv1[v + 1] * d1 < 0 &&
                          std::abs(d1) < std::abs(deriv1[v + 1]));
      if (other <= tols.tol_hg) sp.type = SingularType::kCrossing;
      else if ((std::abs(d1) <= tol_c || sign_change) && std::abs(d2) > tol_c)
        sp.type = SingularType::kEndpoint;
      else sp.type = SingularType::kInterior;
      pts.push_back(sp);
    }
  }

  // crossings between the two families, by bounding-box sweep + segment solve
  for (const SingularCurve& cb : curves) {
    if (cb.family != SingularFamily::kBackward) continue;
    for (const SingularCurve& cf : curves) {
      if (cf.family != SingularFamily::kForward) continue;
      for (std::size_t a = 0; a + 1 < cb.pts.size(); ++a) {
        double axlo = std::min(cb.pts[a].X, cb.pts[a + 1].X);
        double axhi = std::max(cb.pts[a].X, cb.pts[a + 1].X);
        double aylo = std::min(cb.pts[a].Y, cb.pts[a + 1].Y);
        double ayhi = std::max(cb.pts[a].Y, cb.pts[a + 1].Y);
        for (std::size_t b = 0; b + 1 < cf.pts.size(); ++b) {
          double bxlo = std::min(cf.pts[b].X, cf.pts[b + 1].X);
          double bxhi = std::max(cf.pts[b].X, cf.pts[b + 1].X);
          double bylo = std::min(cf.pts[b].Y, cf.pts[b + 1].Y);
          double byhi = std::max(cf.pts[b].Y, cf.pts[b + 1].Y);
          if (axhi < bxlo || bxhi < axlo || ayhi < bylo || byhi < aylo) continue;
          auto hit = seg_intersect(cb.pts[a], cb.pts[a + 1], cf.pts[b], cf.pts[b + 1]);
          if (!hit) continue;
          double tpar = hit->first;
          SingularPoint sp;
          sp.X = hit->second[0];
          sp.Y = hit->second[1];
          sp.x = cb.pts[a].x + tpar * (cb.pts[a + 1].x - cb.pts[a].x);
          sp.t = cb.pts[a].t + tpar * (cb.pts[a + 1].t - cb.pts[a].t);
          sp.family = SingularFamily::kBackward;
          sp.type = SingularType::kCrossing;
          int ni = static_cast<int>(std::lround(sp.X / gs.dx));
          int nj = static_cast<int>(std::lround(sp.Y / gs.dx));
          DiffProbe pb = probe_node(state, ni, nj);
          if (pb.ok) {
            sp.witness.h = pb.h;
            sp.witness.g = pb.g;
            sp.witness.l_X = pb.l_X;
            sp.witness.l_XX = pb.l_XX;
            sp.witness.m_Y = pb.m_Y;
            sp.witness.m_YY = pb.m_YY;
            DerivedCoeffs dc = cs.derived_at(pb.x, pb.u);
            sp.witness.lam_m_u = dc.lam_m_u;
            sp.witness.lam_p_u = dc.lam_p_u;
          }
          pts.push_back(sp);
        }
      }
    }
  }
  return pts;
}

const char* GenericReport::triple_name(int triple) {
  static const char* names[6] = {"(h,l_X,l_XX)",      "(g,m_Y,m_YY)",      "(h,g,l_X)",
                                 "(h,g,m_Y)",         "(h,du_lam_m,l_X)",  "(g,du_lam_p,m_Y)"};
  return (triple >= 0 && triple < 6) ? names[triple] : "?";
}

GenericReport generic_report(const StateField& state, const CoefficientSet& cs,
                             ClassifyTols tols) {
  const GridSpec& gs = state.grid();
  GenericReport rep;
  rep.tol_hg = tols.tol_hg;
  rep.tol_c = tols.tol_c > 0 ? tols.tol_c : gs.dx;

  auto flag = [&](int i, int j, int triple, double v0, double v1, double v2,
                  const StateNode& n) {
    ++rep.flag_count;
    if (rep.flags.size() < kFlagCap)
      rep.flags.push_back({i, j, triple, v0, v1, v2, n.x, n.t});
  };

  for (int k = state.k_lo() + 1; k < state.k_hi(); ++k) {
    int lo = gs.row_i_lo(k), hi = gs.row_i_hi(k);
    for (int i = lo; i <= hi; ++i) {
      int j = k - i;
      if (!state.solved(i, j)) continue;
      const StateNode& n = state.at(i, j);
      bool h0 = std::abs(n.h) <= rep.tol_hg;
      bool g0 = std::abs(n.g) <= rep.tol_hg;
      if (!h0 && !g0) continue;
      if (!(state.solved(i - 1, j) && state.solved(i + 1, j) && state.solved(i, j - 1) &&
            state.solved(i, j + 1)))
        continue;
      double dx = gs.dx;
      double l_X = (state.at(i + 1, j).l - state.at(i - 1, j).l) / (2 * dx);
      double l_XX = (state.at(i + 1, j).l - 2 * n.l + state.at(i - 1, j).l) / (dx * dx);
      double m_Y = (state.at(i, j + 1).m - state.at(i, j - 1).m) / (2 * dx);
      double m_YY = (state.at(i, j + 1).m - 2 * n.m + state.at(i, j - 1).m) / (dx * dx);

      if (h0 && std::abs(l_X) <= rep.tol_c && std::abs(l_XX) <= rep.tol_c)
        flag(i, j, 0, n.h, l_X, l_XX, n);
      if (g0 && std::abs(m_Y) <= rep.tol_c && std::abs(m_YY) <= rep.tol_c)
        flag(i, j, 1, n.g, m_Y, m_YY, n);
      if (h0 && g0 && std::abs(l_X) <= rep.tol_c) flag(i, j, 2, n.h, n.g, l_X, n);
      if (h0 && g0 && std::abs(m_Y) <= rep.tol_c) flag(i, j, 3, n.h, n.g, m_Y, n);
      if (h0 || g0) {
        DerivedCoeffs dc = cs.derived_at(n.x, n.u);
        if (h0 && std::abs(dc.lam_m_u) <= rep.tol_c && std::abs(l_X) <= rep.tol_c)
          flag(i, j, 4, n.h, dc.lam_m_u, l_X, n);
        if (g0 && std::abs(dc.lam_p_u) <= rep.tol_c && std::abs(m_Y) <= rep.tol_c)
          flag(i, j, 5, n.g, dc.lam_p_u, m_Y, n);
      }
    }
  }
  return rep;
}

void export_curves_csv(const std::vector<SingularCurve>& curves, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << "curve_id,family,X,Y,x,t\n";
  char buf[256];
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const char* fam = curves[c].family == SingularFamily::kBackward ? "h" : "g";
    for (const CurveVertex& v : curves[c].pts) {
      std::snprintf(buf, sizeof(buf), "%zu,%s,%.17g,%.17g,%.17g,%.17g\n", c, fam, v.X, v.Y,
                    v.x, v.t);
      out << buf;
    }
  }
}

void export_singular_json(const std::vector<SingularCurve>& curves,
                          const std::vector<SingularPoint>& points,
                          const GenericReport& rep, const std::string& path) {
  nlohmann::ordered_json j;
  j["curves"] = nlohmann::json::array();
  for (const auto& c : curves) {
    nlohmann::ordered_json jc;
    jc["family"] = c.family == SingularFamily::kBackward ? "h" : "g";
    jc["n_points"] = c.pts.size();
    auto& arr = jc["points"] = nlohmann::json::array();
    for (const auto& v : c.pts) arr.push_back({v.X, v.Y, v.x, v.t});
    j["curves"].push_back(jc);
  }
  j["points"] = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::ordered_json jp;
    jp["type"] = p.type == SingularType::kInterior
                     ? "interior"
                     : (p.type == SingularType::kEndpoint ? "endpoint" : "crossing");
    jp["family"] = p.family == SingularFamily::kBackward ? "h" : "g";
    jp["X"] = p.X;
    jp["Y"] = p.Y;
    jp["x"] = p.x;
    jp["t"] = p.t;
    jp["witness"] = {{"h", p.witness.h},       {"g", p.witness.g},
                     {"l_X", p.witness.l_X},   {"l_XX", p.witness.l_XX},
                     {"m_Y", p.witness.m_Y},   {"m_YY", p.witness.m_YY},
                     {"du_lam_m", p.witness.lam_m_u}, {"du_lam_p", p.witness.lam_p_u}};
    j["points"].push_back(jp);
  }
  j["generic_flags"] = {{"count", rep.flag_count},
                        {"tol_hg", rep.tol_hg},
                        {"tol_c", rep.tol_c}};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace vwave
