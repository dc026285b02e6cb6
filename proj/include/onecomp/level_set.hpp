#pragma once

// Connected components of { |Theta| < eps } on a polar Whitney grid.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "onecomp/classifier.hpp"

namespace onecomp {

/// A leaf of the grid. Whitney depth n >= 2 is the top half of the dyadic box
/// (n, index); depth 1 is the central disc |z| < 1 - pi/4. `path` lists the
/// quadrant digits of Schwarz-Pick refinement (empty when unrefined).
struct LevelCell {
  int depth = 0;
  std::uint64_t index = 0;
  std::string path;
  double r_lo = 0.0, r_hi = 0.0;  // radial position: depth + fraction of the ring
  double t_lo = 0.0, t_hi = 0.0;  // angular position in turns, within [0, 1]
  double value = 0.0;             // certified upper bound of |Theta| at the sample point
  bool sub = false;
  int label = -1;

  std::string id() const { return path.empty() ? std::to_string(index) : std::to_string(index) + ":" + path; }
};

struct LevelSetOptions {
  int max_refine = 6;
  double eval_tol = 1e-9;
  std::size_t max_cells = 4'000'000;
  unsigned threads = 0;
};

struct LevelSetAnalysis {
  double epsilon = 0.0;
  int depth = 0;
  std::size_t component_count = 0;
  std::size_t previous_count = 0;  // the same analysis one depth coarser
  bool stabilized = false;
  std::vector<LevelCell> cells;
  std::vector<std::string> notes;
};

namespace detail {

inline constexpr double kCentralRadius = 1.0 - kPi / 4.0;

/// Modulus for a radial position (depth + fraction).
inline double level_radius(double r_key) {
  const int n = static_cast<int>(std::floor(r_key));
  const double frac = r_key - n;
  if (n <= 1) return frac * kCentralRadius;
  return 1.0 - kPi * std::ldexp(1.0, -n) * (1.0 - frac / 2.0);
}

inline DiscPoint level_point(double r_key, double turns) {
  return DiscPoint::polar(level_radius(r_key), kTwoPi * turns);
}

inline bool is_full_disc(const LevelCell& c) { return c.r_lo == 1.0 && c.t_lo == 0.0 && c.t_hi == 1.0; }

inline DiscPoint level_sample(const LevelCell& c) {
  if (is_full_disc(c)) return DiscPoint::cartesian(0.0, 0.0);
  return level_point((c.r_lo + c.r_hi) / 2.0, (c.t_lo + c.t_hi) / 2.0);
}

/// Pseudo-hyperbolic radius of the cell seen from its sample point, from 16
/// perimeter points (rho(c, .) is the modulus of an analytic map, so its
/// maximum lies on the boundary) with a 10% allowance between them.
inline double level_cell_radius(const LevelCell& c, const DiscPoint& s) {
  if (is_full_disc(c)) return kCentralRadius;
  double m = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double f = i / 4.0;
    const double r = c.r_lo + f * (c.r_hi - c.r_lo);
    const double t = c.t_lo + f * (c.t_hi - c.t_lo);
    for (const auto& w : {level_point(r, c.t_lo), level_point(r, c.t_hi), level_point(c.r_lo, t),
                          level_point(c.r_hi, t)}) {
      m = std::max(m, pseudo_distance(s, w));
    }
  }
  for (const auto& w : {level_point(c.r_hi, c.t_lo), level_point(c.r_hi, c.t_hi)}) {
    m = std::max(m, pseudo_distance(s, w));
  }
  return std::min(1.0, 1.1 * m);
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

/// Calls fn(i, j) for every pair of cells sharing an edge segment of positive length.
template <typename Fn>
void for_each_adjacent(const std::vector<LevelCell>& cells, Fn&& fn) {
  struct Edge {
    double key;
    int side;  // 0: cell ends at key, 1: cell starts at key
    double lo, hi;
    std::size_t cell;
  };
  auto sweep = [&](std::vector<Edge>& edges) {
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
      return std::tie(a.key, a.side, a.lo, a.cell) < std::tie(b.key, b.side, b.lo, b.cell);
    });
    for (std::size_t i = 0; i < edges.size();) {
      std::size_t mid = i;
      while (mid < edges.size() && edges[mid].key == edges[i].key && edges[mid].side == 0) ++mid;
      std::size_t end = mid;
      while (end < edges.size() && edges[end].key == edges[i].key) ++end;
      // both groups are sorted by lo and tile disjoint intervals: merge-walk them
      std::size_t a = i, b = mid;
      while (a < mid && b < end) {
        if (std::min(edges[a].hi, edges[b].hi) > std::max(edges[a].lo, edges[b].lo) &&
            edges[a].cell != edges[b].cell) {
          fn(edges[a].cell, edges[b].cell);
        }
        if (edges[a].hi < edges[b].hi) ++a; else ++b;
      }
      i = end;
    }
  };
  std::vector<Edge> radial, angular;
  radial.reserve(2 * cells.size());
  angular.reserve(2 * cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    radial.push_back({c.r_hi, 0, c.t_lo, c.t_hi, i});
    radial.push_back({c.r_lo, 1, c.t_lo, c.t_hi, i});
    angular.push_back({c.t_hi == 1.0 ? 0.0 : c.t_hi, 0, c.r_lo, c.r_hi, i});
    angular.push_back({c.t_lo, 1, c.r_lo, c.r_hi, i});
  }
  sweep(radial);
  sweep(angular);
}

inline LevelSetAnalysis level_set_once(const InnerFunction& f, double eps, int depth,
                                       const LevelSetOptions& opt) {
  LevelSetAnalysis out;
  out.epsilon = eps;
  out.depth = depth;
  std::vector<LevelCell> pending;
  pending.push_back({1, 0, "", 1.0, 2.0, 0.0, 1.0});
  for (int n = 2; n <= depth; ++n) {
    const double w = std::ldexp(1.0, -n);
    for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
      pending.push_back({n, k, "", static_cast<double>(n), n + 1.0, w * k, w * (k + 1)});
    }
  }
  std::vector<LevelCell>& leaves = out.cells;
  bool capped = false;
  while (!pending.empty()) {
    std::vector<Bracket> vals(pending.size());
    std::vector<double> radii(pending.size());
    parallel_for(pending.size(), opt.threads, [&](std::size_t i) {
      const auto s = level_sample(pending[i]);
      vals[i] = modulus_bracket(f, s, opt.eval_tol);
      radii[i] = level_cell_radius(pending[i], s);
    });
    std::vector<LevelCell> next;
    for (std::size_t i = 0; i < pending.size(); ++i) {
      LevelCell c = pending[i];
      c.value = vals[i].hi;
      c.sub = c.value < eps;
      const double s = radii[i];
      const double lo = std::max(0.0, (vals[i].lo - s) / (1.0 - vals[i].lo * s));
      const double hi = (vals[i].hi + s) / (1.0 + vals[i].hi * s);
      const bool ambiguous = lo < eps && hi >= eps;
      const bool room = leaves.size() + next.size() + 4 <= opt.max_cells;
      if (ambiguous && static_cast<int>(c.path.size()) < opt.max_refine && room) {
        const double rm = (c.r_lo + c.r_hi) / 2.0, tm = (c.t_lo + c.t_hi) / 2.0;
        const double rs[3] = {c.r_lo, rm, c.r_hi}, ts[3] = {c.t_lo, tm, c.t_hi};
        for (int q = 0; q < 4; ++q) {
          LevelCell child = c;
          child.path += static_cast<char>('0' + q);
          child.r_lo = rs[q / 2];
          child.r_hi = rs[q / 2 + 1];
          child.t_lo = ts[q % 2];
          child.t_hi = ts[q % 2 + 1];
          next.push_back(std::move(child));
        }
      } else {
        if (ambiguous && static_cast<int>(c.path.size()) < opt.max_refine) capped = true;
        leaves.push_back(std::move(c));
      }
    }
    pending = std::move(next);
  }
  if (capped) out.notes.push_back("cell budget reached; some ambiguous cells were not refined");
  std::sort(leaves.begin(), leaves.end(), [](const LevelCell& a, const LevelCell& b) {
    return std::tie(a.depth, a.index, a.path) < std::tie(b.depth, b.index, b.path);
  });
  UnionFind uf(leaves.size());
  for_each_adjacent(leaves, [&](std::size_t a, std::size_t b) {
    if (leaves[a].sub && leaves[b].sub) uf.unite(a, b);
  });
  std::vector<int> label_of_root(leaves.size(), -1);
  int next_label = 0;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (!leaves[i].sub) continue;
    auto& l = label_of_root[uf.find(i)];
    if (l < 0) l = next_label++;
    leaves[i].label = l;
  }
  out.component_count = static_cast<std::size_t>(next_label);
  return out;
}

}  // namespace detail

/// Components of { |Theta| < eps } on the Whitney grid to `depth`, with the
/// count one depth coarser for a stabilization check.
inline LevelSetAnalysis level_set_components(const InnerFunction& f, double eps, int depth,
                                             const LevelSetOptions& opt = {}) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("level_set_components: epsilon must be in (0, 1)");
  if (depth < 3 || depth > 22) throw PreconditionError("level_set_components: depth must be in [3, 22]");
  auto out = detail::level_set_once(f, eps, depth, opt);
  out.previous_count = detail::level_set_once(f, eps, depth - 1, opt).component_count;
  out.stabilized = out.previous_count == out.component_count;
  return out;
}

/// CSV rows depth,index,label; refined cells carry "index:path", cells above eps label -1.
inline void write_level_csv(std::ostream& os, const LevelSetAnalysis& a) {
  os << "depth,index,label\n";
  for (const auto& c : a.cells) os << c.depth << ',' << c.id() << ',' << c.label << '\n';
}

/// Binary PGM (P5): row n - 1 holds Whitney depth n, columns split the circle
/// into 2^min(depth, 12) equal angles. Cells above eps are white; components
/// get distinct gray levels.
inline void write_level_pgm(std::ostream& os, const LevelSetAnalysis& a) {
  const int rows = a.depth;
  const int cols = 1 << std::min(a.depth, 12);
  std::vector<unsigned char> px(static_cast<std::size_t>(rows) * cols, 255);
  for (const auto& c : a.cells) {
    const double mid_ring = c.depth + 0.5;
    if (mid_ring < c.r_lo || mid_ring >= c.r_hi) continue;
    const int first = static_cast<int>(std::ceil(c.t_lo * cols - 0.5));
    const int last = static_cast<int>(std::ceil(c.t_hi * cols - 0.5));  // exclusive
    const unsigned char v = c.label < 0 ? 255 : static_cast<unsigned char>(16 + (c.label * 37) % 200);
    for (int col = std::max(first, 0); col < std::min(last, cols); ++col) {
      px[static_cast<std::size_t>(c.depth - 1) * cols + col] = v;
    }
  }
  os << "P5\n" << cols << ' ' << rows << "\n255\n";
  os.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
}

}  // namespace onecomp
