#pragma once

// Symmetric Cantor sets on [0, 2pi] built from a length sequence delta_n:
// E_n is a union of 2^n closed intervals of length 2^-n delta_n, E_{n+1} is
// obtained by removing the centered open segment from every interval of E_n,
// and the Cantor measure gives each generation-n interval mass 2^-n.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "onecomp/errors.hpp"
#include "onecomp/geometry.hpp"

namespace onecomp {

inline constexpr int kDefaultCantorDepth = 48;

class CantorGeometry {
 public:
  /// delta_n = 2 pi (2/3)^n.
  static CantorGeometry middle_thirds(int depth_cap = kDefaultCantorDepth) {
    return geometric(2.0L / 3.0L, depth_cap);
  }

  /// delta_n = 2 pi ratio^n, 0 < ratio < 1.
  static CantorGeometry geometric(long double ratio, int depth_cap = kDefaultCantorDepth) {
    if (!(ratio > 0.0L && ratio < 1.0L)) {
      throw PreconditionError("cantor: ratio must lie in (0, 1)");
    }
    std::vector<long double> deltas{2.0L * std::numbers::pi_v<long double>};
    for (int n = 1; n <= depth_cap; ++n) deltas.push_back(deltas.back() * ratio);
    return CantorGeometry(std::move(deltas), depth_cap);
  }

  /// Explicit delta_0 = 2 pi, delta_1, ...; continued geometrically past the list.
  static CantorGeometry from_deltas(std::vector<long double> deltas,
                                    int depth_cap = kDefaultCantorDepth) {
    if (deltas.size() < 2) throw PreconditionError("cantor: need at least delta_0 and delta_1");
    if (std::abs(deltas[0] - 2.0L * std::numbers::pi_v<long double>) > 1e-12L) {
      throw PreconditionError("cantor: delta_0 must equal 2 pi");
    }
    for (std::size_t i = 1; i < deltas.size(); ++i) {
      if (!(deltas[i] > 0.0L && deltas[i] < deltas[i - 1])) {
        throw PreconditionError("cantor: delta sequence must be positive and strictly decreasing");
      }
    }
    const long double ratio = deltas.back() / deltas[deltas.size() - 2];
    while (static_cast<int>(deltas.size()) <= depth_cap) deltas.push_back(deltas.back() * ratio);
    deltas.resize(static_cast<std::size_t>(depth_cap) + 1);
    return CantorGeometry(std::move(deltas), depth_cap);
  }

  int depth_cap() const { return cap_; }
  double offset() const { return offset_; }
  long double delta(int n) const { return deltas_.at(static_cast<std::size_t>(n)); }
  /// Length of each generation-n interval, 2^-n delta_n.
  long double interval_length(int n) const { return lengths_.at(static_cast<std::size_t>(n)); }

  CantorGeometry rotated(double alpha) const {
    CantorGeometry g = *this;
    g.offset_ = wrap_positive(offset_ + alpha);
    return g;
  }

  /// Left endpoints (local coordinates, before the offset) of the 2^n generation-n intervals.
  std::vector<long double> interval_starts(int n) const {
    std::vector<long double> starts{0.0L};
    for (int g = 0; g < n; ++g) {
      const long double shift = lengths_[g] - lengths_[g + 1];
      std::vector<long double> next;
      next.reserve(starts.size() * 2);
      for (long double a : starts) {
        next.push_back(a);
        next.push_back(a + shift);
      }
      starts = std::move(next);
    }
    return starts;
  }

  /// Outcome of descending the construction towards a local coordinate u in [0, 2pi].
  struct Descent {
    int level;            // generation of the deepest interval containing u
    long double start;    // its left endpoint
    long double mass;     // Cantor CDF at that left endpoint
    bool in_gap;          // u lies in the removed segment of that interval
  };

  Descent descend(long double u) const {
    long double a = 0.0L;
    long double m = 0.0L;
    long double child_mass = 0.5L;
    for (int n = 0; n < cap_; ++n, child_mass *= 0.5L) {
      const long double len = lengths_[n];
      const long double child = lengths_[n + 1];
      if (u <= a + child) continue;
      if (u >= a + len - child) {
        a += len - child;
        m += child_mass;
        continue;
      }
      return {n, a, m, true};
    }
    return {cap_, a, m, false};
  }

  /// Smallest point of E at or after u (local coordinates; 2pi belongs to E).
  long double next_local(long double u) const {
    if (u <= 0.0L) return 0.0L;
    const auto d = descend(u);
    if (!d.in_gap) return u;
    return d.start + lengths_[d.level] - lengths_[d.level + 1];
  }

  /// Largest point of E at or before u.
  long double prev_local(long double u) const {
    const auto d = descend(u);
    if (!d.in_gap) return u;
    return d.start + lengths_[d.level + 1];
  }

  /// Bracket for the Cantor function at local coordinate u.
  std::pair<long double, long double> cdf_local(long double u) const {
    if (u <= 0.0L) return {0.0L, 0.0L};
    if (u >= lengths_[0]) return {1.0L, 1.0L};
    const auto d = descend(u);
    const long double step = std::ldexp(1.0L, -(d.level + 1));
    if (d.in_gap) return {d.mass + step, d.mass + step};
    return {d.mass, d.mass + std::ldexp(1.0L, -cap_)};
  }

  /// Point estimate of the Cantor function (interpolated inside an unresolved interval).
  long double cdf_estimate_local(long double u) const {
    if (u <= 0.0L) return 0.0L;
    if (u >= lengths_[0]) return 1.0L;
    const auto d = descend(u);
    if (d.in_gap) return d.mass + std::ldexp(1.0L, -(d.level + 1));
    const long double frac = std::clamp((u - d.start) / lengths_[cap_], 0.0L, 1.0L);
    return d.mass + frac * std::ldexp(1.0L, -cap_);
  }

 private:
  CantorGeometry(std::vector<long double> deltas, int cap) : deltas_(std::move(deltas)), cap_(cap) {
    if (cap_ < 1 || cap_ > 60) throw PreconditionError("cantor: depth cap must be in [1, 60]");
    lengths_.resize(deltas_.size());
    for (std::size_t n = 0; n < deltas_.size(); ++n) {
      lengths_[n] = std::ldexp(deltas_[n], -static_cast<int>(n));
    }
  }

  std::vector<long double> deltas_;
  std::vector<long double> lengths_;
  int cap_;
  double offset_ = 0.0;
};

}  // namespace onecomp
