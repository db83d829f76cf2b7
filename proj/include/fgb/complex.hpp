#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>
#include <vector>

#include "bundle.hpp"
#include "numerics.hpp"

namespace fgb {

// Signed area density of one bundle side, with an optional flip of the parameter orientation.
struct SideField {
  const SurfaceDef* s = nullptr;
  Side side = Side::phi;
  int orient = 1;

  double lam(Vec2 p) const {
    auto J = eval_jet<1>(*s, p);
    const auto& X = side == Side::phi ? J.f : J.nu;
    return orient * det3(partial(X, 1, 0), partial(X, 0, 1), value(J.nu));
  }
  // value and gradient
  std::pair<double, Vec2> lam_grad(Vec2 p) const {
    auto J = eval_jet<2>(*s, p);
    const auto& X = side == Side::phi ? J.f : J.nu;
    Jet2 l = det3(diff_u(X), diff_v(X), J.nu);
    return {orient * l.value(), orient * Vec2{l.du(), l.dv()}};
  }
};

inline int sign_class(double lam) { return lam >= 0 ? 1 : -1; }

// ---------------------------------------------------------------- grid

struct Grid {
  const Domain* d = nullptr;
  int n = 0;        // cells per axis
  int nu = 0, nv = 0;  // node counts
  bool periodic = false, aligned = false;
  Vec2 lo;
  double hu = 0, hv = 0;

  Vec2 node(int i, int j) const { return {lo.u + i * hu, lo.v + j * hv}; }
  int cells_u() const { return periodic ? nu : nu - 1; }
  int cells_v() const { return nv - 1; }
  int node_id(int i, int j) const { return (periodic ? (i % nu + nu) % nu : i) + nu * j; }
};

inline Grid make_grid(const Domain& d, int n) {
  Grid g;
  g.d = &d;
  g.n = n;
  if (d.kind == DomainKind::disk || d.kind == DomainKind::annulus) {
    // margin on every side and an irrational shift keep nodes off the circles and symmetry lines
    double h = 2 * d.r_outer / (n - 2);
    g.hu = g.hv = h;
    g.lo = d.center - Vec2{d.r_outer + 0.7236068 * h, d.r_outer + 0.6180340 * h};
    g.nu = g.nv = n + 1;
  } else {
    g.aligned = true;
    g.periodic = d.periodic();
    g.lo = d.lo;
    g.hu = (d.hi.u - d.lo.u) / n;
    g.hv = (d.hi.v - d.lo.v) / n;
    g.nu = g.periodic ? n : n + 1;
    g.nv = n + 1;
  }
  return g;
}

// ---------------------------------------------------------------- subdivision

struct SubVertex {
  enum Kind { node, bcross, root, broot } kind = node;
  Vec2 p;
  int cls = 1;     // +1 / -1, 0 on the singular set
  int comp = -1;   // boundary component for points on the boundary
  double tau = 0;  // boundary parameter
  bool on_boundary = false;
};

struct Chord {
  int a, b, cell;
};

struct RegionCounts {
  long V = 0, E = 0, F = 0;
  long chi() const { return V - E + F; }
};

struct Subdivision {
  Grid grid;
  std::vector<SubVertex> verts;
  std::vector<Chord> chords;
  RegionCounts all, plus, minus, sigma;
  // per boundary component: singular points sorted by tau
  std::vector<std::vector<int>> boundary_sigma;
  double lam_scale = 0;   // max |lambda| over inside nodes
  bool degenerate = false;  // lambda vanishes identically at the nodes
};

namespace detail {

struct EdgePoints {
  std::vector<int> ids;  // ordered along the edge from its first node
};

// roots t in [0, 1) of |p0 + t d - c| = r
inline void circle_hits(Vec2 p0, Vec2 d, Vec2 c, double r, std::vector<double>& out) {
  Vec2 q = p0 - c;
  double A = dot(d, d), B = 2 * dot(q, d), C = dot(q, q) - r * r;
  double disc = B * B - 4 * A * C;
  if (disc <= 0) return;
  double s = std::sqrt(disc);
  for (double t : {(-B - s) / (2 * A), (-B + s) / (2 * A)})
    if (t >= 0 && t < 1) out.push_back(t);
}

inline double circle_tau(const BoundaryCurve& b, Vec2 p) {
  double t = std::atan2(b.clockwise ? -(p.v - b.center.v) : p.v - b.center.v, p.u - b.center.u);
  if (t < 0) t += 2 * std::numbers::pi;
  return t;
}

inline double aligned_tau(const Domain& d, int comp, Vec2 p) {
  if (d.kind == DomainKind::cylinder) {
    double P = d.period();
    double t = comp == 0 ? p.u - d.lo.u : d.hi.u - p.u;
    t = std::fmod(t, P);
    return t < 0 ? t + P : t;
  }
  double W = d.hi.u - d.lo.u, H = d.hi.v - d.lo.v;
  if (p.v == d.lo.v) return p.u - d.lo.u;
  if (p.u == d.hi.u) return W + (p.v - d.lo.v);
  if (p.v == d.hi.v) return W + H + (d.hi.u - p.u);
  return 2 * W + H + (d.hi.v - p.v);
}

}  // namespace detail

// Grid cells clipped by the boundary and split by {lambda = 0}; Euler characteristics by V - E + F.
inline Subdivision build_subdivision(const Domain& dom, const SideField& F, int n) {
  using detail::EdgePoints;
  Subdivision S;
  S.grid = make_grid(dom, n);
  const Grid& g = S.grid;
  auto bcurves = dom.boundary();
  S.boundary_sigma.resize(bcurves.size());

  // nodes
  int NN = g.nu * g.nv;
  std::vector<double> lam(NN, 0.0);
  std::vector<char> inside(NN, 0);
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) inside[g.node_id(i, j)] = g.aligned || dom.signed_distance(g.node(i, j)) > 0;
  parallel_for(g.nv, [&](size_t j) {
    for (int i = 0; i < g.nu; ++i) {
      int id = g.node_id(i, int(j));
      if (inside[id]) lam[id] = F.lam(g.node(i, int(j)));
    }
  });
  S.verts.resize(NN);
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      int id = g.node_id(i, j);
      auto& v = S.verts[id];
      v.kind = SubVertex::node;
      v.p = g.node(i, j);
      v.cls = sign_class(lam[id]);
      if (inside[id]) S.lam_scale = std::max(S.lam_scale, std::fabs(lam[id]));
      if (g.aligned && (j == 0 || j == g.nv - 1 || (!g.periodic && (i == 0 || i == g.nu - 1)))) v.on_boundary = true;
    }
  S.degenerate = S.lam_scale < 1e-10;

  auto add_vertex = [&](SubVertex v) {
    S.verts.push_back(v);
    return int(S.verts.size()) - 1;
  };
  auto lam_at = [&](Vec2 p) { return F.lam(p); };

  // boundary crossings per component: (tau, vertex)
  std::vector<std::vector<std::pair<double, int>>> bcross(bcurves.size());

  // grid edges: horizontal (i, j)-(i+1, j) index i + nu*j, vertical (i, j)-(i, j+1) index NN + i + nu*j
  auto hcount = g.periodic ? g.nu : g.nu - 1;
  std::vector<EdgePoints> edges(2 * NN);
  auto edge_end = [&](int i, int j, bool vertical) {
    return vertical ? std::pair{g.node_id(i, j), g.node_id(i, j + 1)} : std::pair{g.node_id(i, j), g.node_id(i + 1, j)};
  };
  auto fill_edge = [&](int i, int j, bool vertical) {
    auto [a, b] = edge_end(i, j, vertical);
    Vec2 p0 = g.node(i, j), p1 = vertical ? g.node(i, j + 1) : g.node(i + 1, j);
    Vec2 d = p1 - p0;
    // points on the edge: (t, vertex id)
    std::vector<std::pair<double, int>> pts;
    if (inside[a]) pts.push_back({0.0, a});
    if (!g.aligned) {
      for (size_t c = 0; c < bcurves.size(); ++c) {
        std::vector<double> ts;
        detail::circle_hits(p0, d, bcurves[c].center, bcurves[c].radius, ts);
        for (double t : ts) {
          SubVertex v;
          v.kind = SubVertex::bcross;
          v.p = p0 + t * d;
          v.comp = int(c);
          v.tau = detail::circle_tau(bcurves[c], v.p);
          v.on_boundary = true;
          v.cls = sign_class(lam_at(v.p));
          int id = add_vertex(v);
          bcross[c].push_back({v.tau, id});
          pts.push_back({t, id});
        }
      }
    }
    if (inside[b]) pts.push_back({1.0, b});
    std::sort(pts.begin(), pts.end());
    // singular roots on the inside sub-intervals
    std::vector<std::pair<double, int>> out;
    for (size_t k = 0; k < pts.size(); ++k) {
      out.push_back(pts[k]);
      if (k + 1 == pts.size()) break;
      double t0 = pts[k].first, t1 = pts[k + 1].first;
      Vec2 mid = p0 + (0.5 * (t0 + t1)) * d;
      if (!g.aligned && dom.signed_distance(mid) <= 0) continue;
      int c0 = S.verts[pts[k].second].cls, c1 = S.verts[pts[k + 1].second].cls;
      if (c0 == c1) continue;
      auto h = [&](double t) { return lam_at(p0 + t * d); };
      double l0 = h(t0), l1 = h(t1);
      // the class rule puts exact zeros on the + side; a zero endpoint is the root itself
      double t = (l0 == 0.0) ? t0 : (l1 == 0.0 ? t1 : bracket_root(h, t0, t1, l0, l1));
      SubVertex v;
      v.kind = SubVertex::root;
      v.p = p0 + t * d;
      v.cls = 0;
      bool on_b = g.aligned && (vertical ? (!g.periodic && (i == 0 || i == g.nu - 1)) : (j == 0 || j == g.nv - 1));
      if (on_b) {
        v.on_boundary = true;
        v.comp = g.periodic && j != 0 ? 1 : 0;
        v.tau = detail::aligned_tau(dom, v.comp, v.p);
      }
      out.push_back({t, add_vertex(v)});
    }
    return out;
  };
  for (int j = 0; j < g.nv; ++j)
    for (int i = 0; i < hcount; ++i) {
      auto pts = fill_edge(i, j, false);
      for (auto& [t, id] : pts) edges[i + g.nu * j].ids.push_back(id);
    }
  for (int j = 0; j + 1 < g.nv; ++j)
    for (int i = 0; i < g.nu; ++i) {
      auto pts = fill_edge(i, j, true);
      for (auto& [t, id] : pts) edges[NN + i + g.nu * j].ids.push_back(id);
    }

  // singular points on smooth boundary components
  if (!g.aligned) {
    for (size_t c = 0; c < bcurves.size(); ++c) {
      const auto& bc = bcurves[c];
      int M = std::max(256, 8 * n);
      auto h = [&](double t) { return lam_at(bc.point(t)); };
      double t0 = 0, l0 = h(0);
      for (int k = 1; k <= M; ++k) {
        double t1 = bc.period * k / M, l1 = k == M ? h(0) : h(t1);
        if (sign_class(l0) != sign_class(l1)) {
          double t = l0 == 0.0 ? t0 : (l1 == 0.0 ? t1 : bracket_root(h, t0, t1, l0, l1));
          SubVertex v;
          v.kind = SubVertex::broot;
          v.p = bc.point(t);
          v.cls = 0;
          v.comp = int(c);
          v.tau = std::fmod(t, bc.period);
          v.on_boundary = true;
          int id = add_vertex(v);
          bcross[c].push_back({v.tau, id});
        }
        t0 = t1;
        l0 = l1;
      }
      std::sort(bcross[c].begin(), bcross[c].end());
      if (!bcross[c].empty() &&
          std::none_of(bcross[c].begin(), bcross[c].end(),
                       [&](auto& x) { return S.verts[x.second].kind == SubVertex::bcross; }))
        throw GeometryError("boundary component smaller than a grid cell; increase grid");
      if (bcross[c].empty()) throw GeometryError("boundary component smaller than a grid cell; increase grid");
    }
  }
  // position of each boundary vertex in its component list
  std::vector<int> bpos(S.verts.size(), -1);
  for (auto& list : bcross)
    for (size_t k = 0; k < list.size(); ++k) bpos[list[k].second] = int(k);

  // edge bookkeeping
  std::map<std::tuple<int, int, int, int>, int> edge_ids;
  std::vector<char> vflag_all(S.verts.size()), vflag_p(S.verts.size()), vflag_m(S.verts.size()), vflag_s(S.verts.size());
  std::vector<char> eflag_all, eflag_p, eflag_m;
  std::vector<int> edge_cls;
  auto edge_id = [&](int a, int b, int type, int cell) {
    auto key = std::make_tuple(std::min(a, b), std::max(a, b), type, type == 0 ? -1 : cell);
    auto [it, fresh] = edge_ids.emplace(key, int(edge_ids.size()));
    if (fresh) {
      eflag_all.push_back(0);
      eflag_p.push_back(0);
      eflag_m.push_back(0);
      int c = S.verts[a].cls != 0 ? S.verts[a].cls : S.verts[b].cls;
      if (c == 0 && type != 2) c = sign_class(lam_at(0.5 * (S.verts[a].p + S.verts[b].p)));
      edge_cls.push_back(type == 2 ? 0 : c);
    }
    return it->second;
  };

  int ncu = g.cells_u(), ncv = g.cells_v();
  for (int j = 0; j < ncv; ++j)
    for (int i = 0; i < ncu; ++i) {
      int cell = i + ncu * j;
      // counter-clockwise perimeter
      std::vector<int> perim, side_mask;
      auto append = [&](const std::vector<int>& ids, bool reverse, int side) {
        std::vector<int> x = ids;
        if (reverse) std::reverse(x.begin(), x.end());
        for (int id : x) {
          if (!perim.empty() && perim.back() == id) {
            side_mask.back() |= 1 << side;
            continue;
          }
          perim.push_back(id);
          side_mask.push_back(1 << side);
        }
      };
      int i1 = g.periodic ? (i + 1) % g.nu : i + 1;
      append(edges[i + g.nu * j].ids, false, 0);
      append(edges[NN + i1 + g.nu * j].ids, false, 1);
      append(edges[i + g.nu * (j + 1)].ids, true, 2);
      append(edges[NN + i + g.nu * j].ids, true, 3);
      if (perim.size() > 1 && perim.front() == perim.back()) {
        side_mask.front() |= side_mask.back();
        perim.pop_back();
        side_mask.pop_back();
      }
      int m = int(perim.size());
      if (m < 2) continue;
      // inside flag of segment perim[k] -> perim[k+1]: along one cell side and inside the domain
      std::vector<char> seg_in(m);
      for (int k = 0; k < m; ++k) {
        const auto& a = S.verts[perim[k]];
        const auto& b = S.verts[perim[(k + 1) % m]];
        if (g.aligned)
          seg_in[k] = 1;
        else
          seg_in[k] = (side_mask[k] & side_mask[(k + 1) % m]) && dom.signed_distance(0.5 * (a.p + b.p)) > 0;
      }
      // a perimeter point may appear with its own edge list order only once
      std::map<int, int> where;
      for (int k = 0; k < m; ++k) where[perim[k]] = k;
      std::vector<char> used(m, 0);
      for (int k0 = 0; k0 < m; ++k0) {
        if (!seg_in[k0] || used[k0]) continue;
        std::vector<int> lv, le, ltype;
        int cur = k0;
        int guard = 0;
        do {
          if (++guard > 4 * m + 64) throw GeometryError("cell walk did not close; increase grid");
          used[cur] = 1;
          int nxt = (cur + 1) % m;
          lv.push_back(perim[cur]);
          ltype.push_back(0);
          if (seg_in[nxt]) {
            cur = nxt;
            continue;
          }
          if (g.aligned || S.verts[perim[nxt]].kind != SubVertex::bcross)
            throw GeometryError("cell perimeter leaves the domain away from the boundary; increase grid");
          // leave along the boundary curve until it meets this cell's perimeter again
          int x = perim[nxt];
          lv.push_back(x);
          ltype.push_back(1);
          const auto& list = bcross[S.verts[x].comp];
          int pos = bpos[x];
          int y = -1;
          for (size_t step = 1; step <= list.size(); ++step) {
            int id = list[(pos + step) % list.size()].second;
            if (S.verts[id].kind == SubVertex::bcross) {
              y = id;
              break;
            }
            lv.push_back(id);
            ltype.push_back(1);
          }
          auto it = where.find(y);
          if (y < 0 || it == where.end()) throw GeometryError("boundary arc leaves the cell unexpectedly; increase grid");
          cur = it->second;
        } while (cur != k0);
        // edges between consecutive loop vertices
        int L = int(lv.size());
        for (int k = 0; k < L; ++k) le.push_back(edge_id(lv[k], lv[(k + 1) % L], ltype[k], cell));

        // split by chords between singular points
        std::vector<int> z;
        for (int k = 0; k < L; ++k)
          if (S.verts[lv[k]].cls == 0) z.push_back(k);
        std::vector<std::pair<int, int>> pairs;
        if (z.size() == 2) {
          pairs = {{z[0], z[1]}};
        } else if (z.size() == 4) {
          Vec2 c{0, 0};
          for (int k : z) c = c + 0.25 * S.verts[lv[k]].p;
          int cc = 1;
          try {
            cc = sign_class(lam_at(c));
          } catch (const EvalError&) {
          }
          // class of the loop part following z[1]
          int c1 = edge_cls[le[z[1]]];
          if (cc == c1)
            pairs = {{z[0], z[1]}, {z[2], z[3]}};
          else
            pairs = {{z[1], z[2]}, {z[3], z[0]}};
        } else if (z.size() % 2 == 1 || z.size() > 4) {
          throw GeometryError("unresolved singular set in one grid cell; increase grid");
        }
        // faces: assign each loop edge to a face by walking with chord shortcuts
        std::vector<int> chord_edge;
        std::map<int, int> jump;  // loop index -> partner index
        for (auto [a, b] : pairs) {
          int e = edge_id(lv[a], lv[b], 2, cell);
          chord_edge.push_back(e);
          S.chords.push_back({lv[a], lv[b], cell});
          jump[a] = b;
          jump[b] = a;
        }
        std::vector<char> eused(L, 0);
        for (int s0 = 0; s0 < L; ++s0) {
          if (eused[s0]) continue;
          std::vector<int> fv, fe;
          int k = s0, cls = 0;
          int guard2 = 0;
          while (true) {
            if (++guard2 > 4 * L + 8) throw GeometryError("face walk did not close");
            eused[k] = 1;
            fv.push_back(lv[k]);
            fe.push_back(le[k]);
            int ec = edge_cls[le[k]];
            if (ec != 0) {
              if (cls != 0 && cls != ec) throw GeometryError("inconsistent sign labels in one grid cell; increase grid");
              cls = ec;
            }
            int nk = (k + 1) % L;
            auto jt = jump.find(nk);
            if (jt != jump.end()) {
              // take the chord to the partner and continue from there
              fv.push_back(lv[nk]);
              fe.push_back(edge_id(lv[nk], lv[jt->second], 2, cell));
              nk = jt->second;
            }
            if (nk == s0) break;
            k = nk;
          }
          if (cls == 0) cls = sign_class(lam_at(S.verts[fv[0]].p));
          auto& vf = cls > 0 ? vflag_p : vflag_m;
          auto& ef = cls > 0 ? eflag_p : eflag_m;
          auto& R = cls > 0 ? S.plus : S.minus;
          ++R.F;
          ++S.all.F;
          for (int v : fv) vf[v] = vflag_all[v] = 1;
          for (int e : fe) ef[e] = eflag_all[e] = 1;
        }
        for (size_t q = 0; q < pairs.size(); ++q) {
          vflag_s[lv[pairs[q].first]] = vflag_s[lv[pairs[q].second]] = 1;
        }
      }
    }
  auto count = [](const std::vector<char>& f) { return long(std::count(f.begin(), f.end(), 1)); };
  S.all.V = count(vflag_all);
  S.all.E = count(eflag_all);
  S.plus.V = count(vflag_p);
  S.plus.E = count(eflag_p);
  S.minus.V = count(vflag_m);
  S.minus.E = count(eflag_m);
  S.sigma.V = count(vflag_s);
  S.sigma.E = long(S.chords.size());
  for (size_t c = 0; c < bcross.size(); ++c)
    for (auto& [t, id] : bcross[c])
      if (S.verts[id].cls == 0) S.boundary_sigma[c].push_back(id);
  if (g.aligned) {
    for (int id = NN; id < int(S.verts.size()); ++id)
      if (S.verts[id].on_boundary && S.verts[id].cls == 0) S.boundary_sigma[S.verts[id].comp].push_back(id);
    for (auto& list : S.boundary_sigma)
      std::sort(list.begin(), list.end(), [&](int a, int b) { return S.verts[a].tau < S.verts[b].tau; });
  }
  return S;
}

}  // namespace fgb
