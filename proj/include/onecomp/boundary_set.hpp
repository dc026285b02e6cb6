#pragma once

// Closed subsets of the unit circle (finite point sets, finite unions of arcs,
// symmetric Cantor sets and unions of these), distance queries against them,
// dyadic Whitney decompositions of their complements and sawtooth regions.

#include <algorithm>
#include <limits>
#include <memory>
#include <variant>
#include <vector>

#include "onecomp/cantor.hpp"
#include "onecomp/geometry.hpp"

namespace onecomp {

class BoundarySet {
 public:
  struct Points {
    std::vector<double> angles;  // sorted, in [0, 2pi)
  };
  struct Arcs {
    std::vector<std::pair<double, double>> spans;  // [lo, hi], lo in [0, 2pi), hi - lo <= 2pi
  };
  struct Cantor {
    std::shared_ptr<const CantorGeometry> geometry;
  };
  using Component = std::variant<Points, Arcs, Cantor>;

  BoundarySet() = default;

  static BoundarySet empty() { return {}; }

  static BoundarySet points(std::vector<double> angles) {
    for (double& a : angles) a = wrap_positive(a);
    std::sort(angles.begin(), angles.end());
    angles.erase(std::unique(angles.begin(), angles.end()), angles.end());
    BoundarySet s;
    if (!angles.empty()) s.parts_.push_back(Points{std::move(angles)});
    return s;
  }

  static BoundarySet arcs(const std::vector<BoundaryArc>& arcs) {
    Arcs a;
    for (const auto& arc : arcs) {
      if (arc.half_width < 0) throw PreconditionError("boundary set: negative arc width");
      const double len = std::min(arc.length(), kTwoPi);
      const double lo = wrap_positive(arc.lo());
      a.spans.emplace_back(lo, lo + len);
    }
    BoundarySet s;
    if (!a.spans.empty()) s.parts_.push_back(std::move(a));
    return s;
  }

  static BoundarySet cantor(std::shared_ptr<const CantorGeometry> g) {
    BoundarySet s;
    s.parts_.push_back(Cantor{std::move(g)});
    return s;
  }

  BoundarySet united(const BoundarySet& other) const {
    BoundarySet s = *this;
    s.parts_.insert(s.parts_.end(), other.parts_.begin(), other.parts_.end());
    return s;
  }

  const std::vector<Component>& components() const { return parts_; }
  bool is_empty() const { return parts_.empty(); }

  /// Lebesgue measure (arc length) of the set; points and Cantor sets are null.
  double lebesgue_measure() const {
    std::vector<std::pair<double, double>> spans;
    for (const auto& c : parts_) {
      if (const auto* a = std::get_if<Arcs>(&c)) {
        for (auto [lo, hi] : a->spans) {
          if (hi - lo >= kTwoPi) return kTwoPi;
          if (hi > kTwoPi) {
            spans.emplace_back(lo, kTwoPi);
            spans.emplace_back(0.0, hi - kTwoPi);
          } else {
            spans.emplace_back(lo, hi);
          }
        }
      }
    }
    std::sort(spans.begin(), spans.end());
    double total = 0.0;
    double cur_lo = 0.0;
    double cur_hi = -1.0;
    for (auto [lo, hi] : spans) {
      if (lo > cur_hi) {
        if (cur_hi >= cur_lo) total += cur_hi - cur_lo;
        cur_lo = lo;
        cur_hi = hi;
      } else {
        cur_hi = std::max(cur_hi, hi);
      }
    }
    if (cur_hi >= cur_lo) total += cur_hi - cur_lo;
    return std::min(total, kTwoPi);
  }

  bool is_full_circle() const { return lebesgue_measure() >= kTwoPi * (1.0 - 1e-15); }

  /// Smallest angle y >= x (x in [0, 2pi)) belonging to the set; may exceed 2pi after wrapping.
  double next_at_or_after(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : parts_) best = std::min(best, next_in(c, x));
    return best;
  }

  /// Largest angle y <= x belonging to the set; may be negative after wrapping.
  double prev_at_or_before(double x) const {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : parts_) best = std::max(best, prev_in(c, x));
    return best;
  }

  /// Angular distance from e^{i angle} to the set (infinity when empty).
  double angular_distance_to(double angle) const {
    if (is_empty()) return std::numeric_limits<double>::infinity();
    const double x = wrap_positive(angle);
    return std::min(next_at_or_after(x) - x, x - prev_at_or_before(x));
  }

  /// Euclidean distance from e^{i angle} to the set.
  double chord_distance(double angle) const {
    const double a = angular_distance_to(angle);
    return std::isinf(a) ? a : chord_from_angle(a);
  }

  bool intersects(const BoundaryArc& arc) const {
    if (is_empty()) return false;
    if (arc.full()) return true;
    const double lo = wrap_positive(arc.lo());
    return next_at_or_after(lo) <= lo + arc.length();
  }

  /// Euclidean distance between a closed arc and the set (0 when they meet).
  double arc_chord_distance(const BoundaryArc& arc) const {
    if (is_empty()) return std::numeric_limits<double>::infinity();
    if (intersects(arc)) return 0.0;
    const double lo = wrap_positive(arc.lo());
    const double hi = lo + arc.length();
    const double ang = std::min(next_at_or_after(lo) - hi, lo - prev_at_or_before(lo));
    return chord_from_angle(ang);
  }

  /// Arcs of length at most about `scale` whose union covers the set.
  std::vector<BoundaryArc> cover(double scale, int max_generation = 22) const {
    std::vector<BoundaryArc> out;
    for (const auto& c : parts_) {
      if (const auto* p = std::get_if<Points>(&c)) {
        for (double a : p->angles) out.push_back({a, 0.0});
      } else if (const auto* a = std::get_if<Arcs>(&c)) {
        for (auto [lo, hi] : a->spans) out.push_back(BoundaryArc::between(lo, hi));
      } else {
        const auto& g = *std::get<Cantor>(c).geometry;
        int n = 0;
        while (n < std::min(g.depth_cap(), max_generation) &&
               static_cast<double>(g.interval_length(n)) > scale) {
          ++n;
        }
        const double len = static_cast<double>(g.interval_length(n));
        for (long double s : g.interval_starts(n)) {
          const double lo = static_cast<double>(s) + g.offset();
          out.push_back(BoundaryArc::between(lo, lo + len));
        }
      }
    }
    return out;
  }

  BoundarySet rotated(double alpha) const {
    BoundarySet s;
    for (const auto& c : parts_) {
      if (const auto* p = std::get_if<Points>(&c)) {
        std::vector<double> angles;
        for (double a : p->angles) angles.push_back(a + alpha);
        s = s.united(points(std::move(angles)));
      } else if (const auto* a = std::get_if<Arcs>(&c)) {
        Arcs r;
        for (auto [lo, hi] : a->spans) {
          const double nlo = wrap_positive(lo + alpha);
          r.spans.emplace_back(nlo, nlo + (hi - lo));
        }
        s.parts_.push_back(std::move(r));
      } else {
        s.parts_.push_back(
            Cantor{std::make_shared<CantorGeometry>(std::get<Cantor>(c).geometry->rotated(alpha))});
      }
    }
    return s;
  }

 private:
  static double next_in(const Component& c, double x) {
    if (const auto* p = std::get_if<Points>(&c)) {
      auto it = std::lower_bound(p->angles.begin(), p->angles.end(), x);
      return it == p->angles.end() ? p->angles.front() + kTwoPi : *it;
    }
    if (const auto* a = std::get_if<Arcs>(&c)) {
      double best = std::numeric_limits<double>::infinity();
      for (auto [lo, hi] : a->spans) {
        for (int k = -1; k <= 1; ++k) {
          const double l = lo + k * kTwoPi;
          const double h = hi + k * kTwoPi;
          if (l <= x && x <= h) return x;
          if (l > x) best = std::min(best, l);
        }
      }
      return best;
    }
    const auto& g = *std::get<Cantor>(c).geometry;
    const double u = wrap_positive(x - g.offset());
    return x + static_cast<double>(g.next_local(u) - u);
  }

  static double prev_in(const Component& c, double x) {
    if (const auto* p = std::get_if<Points>(&c)) {
      auto it = std::upper_bound(p->angles.begin(), p->angles.end(), x);
      return it == p->angles.begin() ? p->angles.back() - kTwoPi : *std::prev(it);
    }
    if (const auto* a = std::get_if<Arcs>(&c)) {
      double best = -std::numeric_limits<double>::infinity();
      for (auto [lo, hi] : a->spans) {
        for (int k = -1; k <= 1; ++k) {
          const double l = lo + k * kTwoPi;
          const double h = hi + k * kTwoPi;
          if (l <= x && x <= h) return x;
          if (h < x) best = std::max(best, h);
        }
      }
      return best;
    }
    const auto& g = *std::get<Cantor>(c).geometry;
    const double u = wrap_positive(x - g.offset());
    return x - static_cast<double>(u - g.prev_local(u));
  }

  std::vector<Component> parts_;
};

/// Dyadic Whitney decomposition of the complement of a closed null set E.
///
/// Bisects the circle recursively and keeps an arc I as soon as
/// dist(I, E) >= |I| (Euclidean distance, arc length); since the parent failed
/// that test every kept arc satisfies |I| <= dist(I, E) <= 4|I|. Arcs shorter
/// than `min_length` are not emitted. Output is in increasing angle from 0.
/// For E empty, four quarter-circle arcs are returned.
inline std::vector<BoundaryArc> whitney_arcs(const BoundarySet& e, double min_length) {
  if (!(min_length > 0.0)) throw PreconditionError("whitney_arcs: cutoff must be positive");
  if (e.is_full_circle()) throw PreconditionError("whitney_arcs: set is the whole circle");
  if (e.lebesgue_measure() > 0.0) {
    throw PreconditionError("whitney_arcs: set has positive Lebesgue measure");
  }
  std::vector<BoundaryArc> out;
  if (e.is_empty()) {
    for (int q = 0; q < 4; ++q) out.push_back(BoundaryArc::between(q * kPi / 2, (q + 1) * kPi / 2));
    return out;
  }
  // Explicit stack (depth-first, left child first) keeps the output in boundary order.
  struct Node {
    int level;
    long long index;
  };
  std::vector<Node> stack{{0, 0}};
  while (!stack.empty()) {
    const Node n = stack.back();
    stack.pop_back();
    const double len = kTwoPi * std::ldexp(1.0, -n.level);
    const double lo = len * static_cast<double>(n.index);
    const auto arc = BoundaryArc::between(lo, lo + len);
    if (e.arc_chord_distance(arc) >= len) {
      out.push_back(arc);
      continue;
    }
    if (len / 2.0 < min_length || n.level >= 60) continue;
    stack.push_back({n.level + 1, 2 * n.index + 1});
    stack.push_back({n.level + 1, 2 * n.index});
  }
  return out;
}

/// Sawtooth region { z : 1 - |z| >= 2 dist(z/|z|, support) }.
class SawtoothRegion {
 public:
  explicit SawtoothRegion(BoundarySet support) : support_(std::move(support)) {}

  const BoundarySet& support() const { return support_; }

  bool contains(const DiscPoint& z) const {
    require_interior(z, "sawtooth_contains");
    if (z.is_origin()) throw DomainError("sawtooth_contains: radial projection of 0 is undefined");
    return z.depth() >= 2.0 * support_.chord_distance(z.angle());
  }

 private:
  BoundarySet support_;
};

}  // namespace onecomp
