#pragma once

// Companion interpolating Blaschke product: zeros every 1/10 pseudo-hyperbolic
// units along a curve that follows the Whitney arcs of the singular set at
// radii where |Theta| is already close to 1.

#include <functional>
#include <map>
#include <optional>
#include <ostream>

#include "onecomp/classifier.hpp"

namespace onecomp {

struct ChainArc {
  BoundaryArc arc;
  double depth;    // 1 - r_n, a power of two
  double epsilon;  // |Theta| >= 1 - epsilon was checked on { |z| >= r_n, arg z in arc }
};

struct WhitneyChain {
  std::vector<ChainArc> arcs;  // boundary order
};

using EpsilonSchedule = std::function<double(const BoundaryArc&)>;

inline double default_epsilon(const BoundaryArc& a) { return std::min(0.5, a.length()); }

namespace detail {

/// Certified lower bounds of |Theta| on depths depth0 2^-j (j = 0..6) at up to
/// 513 equally spaced angles across the arc, endpoints included.
inline bool radius_sample_ok(const InnerFunction& f, const BoundaryArc& arc, double depth0, double eps,
                             unsigned threads) {
  for (int j = 0; j <= 6; ++j) {
    const double d = std::ldexp(depth0, -j);
    const auto n = static_cast<std::size_t>(std::clamp(std::ceil(arc.length() / d), 1.0, 512.0));
    std::vector<char> ok(n + 1, 1);
    parallel_for(n + 1, threads, [&](std::size_t i) {
      const double t = arc.lo() + arc.length() * static_cast<double>(i) / static_cast<double>(n);
      ok[i] = modulus_bracket(f, DiscPoint::from_depth(d, t), 1e-3 * eps).lo >= 1.0 - eps;
    });
    if (std::find(ok.begin(), ok.end(), 0) != ok.end()) return false;
  }
  return true;
}

inline std::vector<DiscPoint> theta_zero_prefix(const InnerFunction& f, std::size_t prefix = 4096) {
  std::vector<DiscPoint> out;
  for (const auto& zs : f.zero_factors()) {
    for (const auto& z : zs.materialize(prefix)) out.push_back(z);
  }
  return out;
}

}  // namespace detail

/// For each arc, the smallest grid radius r_n = 1 - 2^-k (k <= 50) passing the
/// sampled bound |Theta| >= 1 - eps_n above it, and above every known zero of
/// Theta over the arc.
inline WhitneyChain choose_radii(const InnerFunction& f, const std::vector<BoundaryArc>& arcs,
                                 const EpsilonSchedule& schedule = default_epsilon, unsigned threads = 0) {
  const auto zeros = detail::theta_zero_prefix(f);
  WhitneyChain chain;
  for (const auto& arc : arcs) {
    const double eps = schedule(arc);
    if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("choose_radii: epsilon must be in (0, 1)");
    int k_min = 1;
    for (const auto& z : zeros) {
      if (z.is_origin() || !arc.contains(z.angle())) continue;
      while (k_min <= 50 && std::ldexp(1.0, -k_min) >= z.depth()) ++k_min;
    }
    auto ok = [&](int k) { return detail::radius_sample_ok(f, arc, std::ldexp(1.0, -k), eps, threads); };
    if (k_min > 50 || !ok(50)) {
      throw PreconditionError("choose_radii: radius search exhausted on the arc at angle " +
                              std::to_string(arc.center_angle) +
                              " (the singular set may be under-described)");
    }
    int lo = k_min, hi = 50;  // ok(hi) holds
    if (ok(lo)) hi = lo;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      if (ok(mid)) hi = mid; else lo = mid;
    }
    chain.arcs.push_back({arc, std::ldexp(1.0, -hi), eps});
  }
  return chain;
}

/// A circular piece (fixed depth, angle from a to b) or a radial connector
/// (fixed angle, depth from a to b).
struct GammaPiece {
  enum class Kind { Arc, Radial } kind;
  double fixed;
  double a, b;

  DiscPoint at(double s) const {
    if (kind == Kind::Arc) return DiscPoint::from_depth(fixed, a + s * (b - a));
    return DiscPoint::from_depth(a * std::pow(b / a, s), fixed);
  }
  /// Parameter step that moves about 0.02 in pseudo-hyperbolic distance.
  double fine_step() const {
    if (kind == Kind::Arc) return std::min(1.0, 0.02 * fixed / std::abs(b - a));
    return std::min(1.0, 0.04 / std::abs(std::log(b / a)));
  }
};

struct GammaChain {
  std::vector<GammaPiece> pieces;
  bool closed = false;
};

struct GammaCurve {
  std::vector<GammaChain> chains;
};

/// Consecutive arcs sharing an endpoint are joined by a radial connector at
/// that angle; a gap (a point of the singular set) starts a new chain.
inline GammaCurve build_gamma(const WhitneyChain& chain) {
  GammaCurve g;
  const auto& arcs = chain.arcs;
  if (arcs.empty()) return g;
  // angles in [0, 2 pi) so that boundary order is increasing order
  std::vector<double> lo(arcs.size()), hi(arcs.size());
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    lo[i] = wrap_positive(arcs[i].arc.lo());
    hi[i] = lo[i] + arcs[i].arc.length();
  }
  auto touches = [](double x, double y) { return std::abs(x - y) <= 1e-12; };
  auto piece = [&](std::size_t i, double shift) {
    return GammaPiece{GammaPiece::Kind::Arc, arcs[i].depth, lo[i] + shift, hi[i] + shift};
  };
  auto connect = [](GammaChain& ch, double angle, double from, double to) {
    if (from != to) ch.pieces.push_back({GammaPiece::Kind::Radial, angle, from, to});
  };
  g.chains.push_back({});
  g.chains.back().pieces.push_back(piece(0, 0.0));
  for (std::size_t i = 1; i < arcs.size(); ++i) {
    if (touches(hi[i - 1], lo[i])) {
      connect(g.chains.back(), lo[i], arcs[i - 1].depth, arcs[i].depth);
    } else {
      g.chains.push_back({});
    }
    g.chains.back().pieces.push_back(piece(i, 0.0));
  }
  const bool wraps = touches(hi.back(), lo.front() + kTwoPi);
  if (wraps && g.chains.size() == 1) {
    connect(g.chains.front(), lo.front(), arcs.back().depth, arcs.front().depth);
    g.chains.front().closed = true;
  } else if (wraps) {
    // the last chain runs on through angle 0 into the first one
    auto& last = g.chains.back();
    connect(last, lo.front() + kTwoPi, arcs.back().depth, arcs.front().depth);
    for (auto p : g.chains.front().pieces) {
      if (p.kind == GammaPiece::Kind::Arc) {
        p.a += kTwoPi;
        p.b += kTwoPi;
      } else {
        p.fixed += kTwoPi;
      }
      last.pieces.push_back(p);
    }
    g.chains.erase(g.chains.begin());
  }
  return g;
}

/// Polyline samples "chain,piece,re,im" for plotting.
inline void write_gamma_csv(std::ostream& os, const GammaCurve& g, int samples_per_piece = 16) {
  os << "chain,piece,re,im\n";
  os.precision(17);
  for (std::size_t c = 0; c < g.chains.size(); ++c) {
    const auto& ch = g.chains[c];
    for (std::size_t p = 0; p < ch.pieces.size(); ++p) {
      for (int i = 0; i <= samples_per_piece; ++i) {
        const auto z = ch.pieces[p].at(static_cast<double>(i) / samples_per_piece);
        os << c << ',' << p << ',' << z.re() << ',' << z.im() << '\n';
      }
    }
  }
}

namespace detail {

struct Cursor {
  std::size_t piece;
  double s;
};

/// Next point along `ch` (direction +1 or -1) at pseudo-hyperbolic distance
/// exactly `step` (within `tol`) from `from`, found by walking in fine steps
/// and bisecting on the first crossing. Returns nullopt at the end of an open chain;
/// `travelled` accumulates pieces passed (for loop detection on closed chains).
inline std::optional<Cursor> march(const GammaChain& ch, Cursor cur, int dir, const DiscPoint& from,
                                   double step, double tol, std::size_t& travelled) {
  const std::size_t n = ch.pieces.size();
  for (std::size_t guard = 0; guard < 64 * n + 1024; ) {
    const GammaPiece& p = ch.pieces[cur.piece];
    const double end = dir > 0 ? 1.0 : 0.0;
    if (cur.s == end) {
      // hop to the neighbouring piece
      if (dir > 0 && cur.piece + 1 == n && !ch.closed) return std::nullopt;
      if (dir < 0 && cur.piece == 0 && !ch.closed) return std::nullopt;
      cur.piece = dir > 0 ? (cur.piece + 1) % n : (cur.piece + n - 1) % n;
      cur.s = dir > 0 ? 0.0 : 1.0;
      ++travelled;
      ++guard;
      continue;
    }
    const double h = p.fine_step();
    const double next = dir > 0 ? std::min(1.0, cur.s + h) : std::max(0.0, cur.s - h);
    if (pseudo_distance(from, p.at(next)) >= step) {
      double a = cur.s, b = next;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        const double r = pseudo_distance(from, p.at(m));
        if (std::abs(r - step) < tol || m == a || m == b) return Cursor{cur.piece, m};
        if (r < step) a = m; else b = m;
      }
      return Cursor{cur.piece, 0.5 * (a + b)};
    }
    cur.s = next;
  }
  return std::nullopt;
}

}  // namespace detail

struct CompanionOptions {
  double step = 0.1;
  double step_tol = 1e-9;
  EpsilonSchedule schedule = default_epsilon;
  int first_level = 4;   // Whitney arcs shorter than 2 pi 2^-level are cut off ...
  int max_level = 40;    // ... and the cutoff deepens up to this level while zeros are missing
  unsigned threads = 0;
};

struct CompanionResult {
  WhitneyChain chain;
  GammaCurve gamma;
  ZeroSequence zeros;
  std::vector<std::size_t> chain_of;  // chain index of each zero
  std::vector<long> position;         // signed position along its chain, 0 at the start point
  double tail_estimate = 0.0;         // rough sum of 1 - |z| over zeros not materialized
  SeparationConstants separation{};
  double max_step_error = 0.0;        // max |rho - step| over consecutive pairs
  ClassificationReport report_b;
  ClassificationReport report_b_theta;
  std::vector<Witness> mechanism_violations;  // scanned z with |B| > 12/21 and mu(B)(Q(z)) > 0
  bool spacing_ok = false;
  bool separation_ok = false;
  bool one_component_ok = false;
  bool mechanism_ok = false;
  std::vector<std::string> notes;

  bool verified() const { return spacing_ok && separation_ok && one_component_ok && mechanism_ok; }

  /// Index pairs of zeros adjacent along Gamma.
  std::vector<std::pair<std::size_t, std::size_t>> consecutive_pairs() const {
    std::map<std::pair<std::size_t, long>, std::size_t> at;
    for (std::size_t i = 0; i < position.size(); ++i) at[{chain_of[i], position[i]}] = i;
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [key, i] : at) {
      auto it = at.find({key.first, key.second + 1});
      if (it != at.end()) out.emplace_back(i, it->second);
    }
    return out;
  }
};

struct PlacedZeros {
  std::vector<DiscPoint> zeros;
  std::vector<std::size_t> chain_of;
  std::vector<long> position;
  bool needs_more_arcs = false;  // a chain end was reached inside the selection
  double leftover = 0.0;         // sum of 1 - |z| over marched zeros left out
};

/// Marches every chain in both directions from its point of smallest modulus
/// (ties: smallest angle) and keeps the `horizon` zeros of smallest modulus,
/// merging the marches so that each keeps a contiguous prefix.
inline PlacedZeros place_zeros(const GammaCurve& g, std::size_t horizon, double step = 0.1,
                               double step_tol = 1e-9) {
  struct Stream {
    std::size_t chain;
    int dir;
    std::vector<DiscPoint> pts;
    bool ended = false;  // reached an open end of its chain
  };
  std::vector<Stream> streams;
  for (std::size_t c = 0; c < g.chains.size(); ++c) {
    const auto& ch = g.chains[c];
    std::size_t best = 0;
    for (std::size_t i = 0; i < ch.pieces.size(); ++i) {
      const auto& p = ch.pieces[i];
      const auto& q = ch.pieces[best];
      if (p.kind != GammaPiece::Kind::Arc) continue;
      if (q.kind != GammaPiece::Kind::Arc || p.fixed > q.fixed ||
          (p.fixed == q.fixed && wrap_positive(p.a) < wrap_positive(q.a))) {
        best = i;
      }
    }
    const detail::Cursor start{best, 0.0};
    const DiscPoint z0 = ch.pieces[best].at(0.0);
    for (int dir : {1, -1}) {
      if (dir < 0 && ch.closed) break;
      Stream st{c, dir, {}, false};
      if (dir > 0) st.pts.push_back(z0);
      detail::Cursor cur = start;
      DiscPoint last = z0;
      std::size_t travelled = 0;
      while (st.pts.size() < horizon) {
        auto nxt = detail::march(ch, cur, dir, last, step, step_tol, travelled);
        if (!nxt) {
          st.ended = true;
          break;
        }
        // a closed chain stops before passing its start again
        const bool passed = ch.closed && (travelled > ch.pieces.size() ||
                                          (travelled == ch.pieces.size() && nxt->s >= start.s));
        if (passed) break;
        cur = *nxt;
        last = ch.pieces[cur.piece].at(cur.s);
        st.pts.push_back(last);
      }
      if (ch.closed && st.pts.size() > 2 && pseudo_distance(st.pts.back(), z0) < step - 1e-6) {
        st.pts.pop_back();
      }
      streams.push_back(std::move(st));
    }
  }
  PlacedZeros out;
  std::vector<std::size_t> head(streams.size(), 0);
  while (out.zeros.size() < horizon) {
    std::ptrdiff_t pick = -1;
    for (std::size_t s = 0; s < streams.size(); ++s) {
      if (head[s] >= streams[s].pts.size()) continue;
      if (pick < 0 || streams[s].pts[head[s]].depth() >
                          streams[static_cast<std::size_t>(pick)].pts[head[static_cast<std::size_t>(pick)]].depth()) {
        pick = static_cast<std::ptrdiff_t>(s);
      }
    }
    if (pick < 0) break;
    const auto s = static_cast<std::size_t>(pick);
    const long k = static_cast<long>(head[s]);
    out.zeros.push_back(streams[s].pts[head[s]]);
    out.chain_of.push_back(streams[s].chain);
    out.position.push_back(streams[s].dir > 0 ? k : -(k + 1));
    ++head[s];
  }
  for (std::size_t s = 0; s < streams.size(); ++s) {
    if (streams[s].ended && head[s] == streams[s].pts.size()) out.needs_more_arcs = true;
    for (std::size_t i = head[s]; i < streams[s].pts.size(); ++i) out.leftover += streams[s].pts[i].depth();
  }
  return out;
}

/// Builds B for Theta (singular set of measure zero), then checks spacing,
/// separation, one-component evidence for B and B Theta at `depth`, and that
/// scanned boxes with |B| > 12/21 carry no zeros of B.
inline CompanionResult construct_companion(const InnerFunction& theta, std::size_t horizon, int depth,
                                           const CompanionOptions& opt = {}) {
  if (horizon < 2) throw PreconditionError("construct_companion: horizon must be at least 2");
  const BoundarySet sing = theta.singular_set();
  if (sing.lebesgue_measure() > 0.0) {
    throw PreconditionError("construct_companion: singular set has positive Lebesgue measure");
  }
  CompanionResult res;
  std::map<std::pair<double, double>, ChainArc> cache;
  PlacedZeros placed;
  double uncovered = 0.0;
  for (int level = opt.first_level;; level += 2) {
    const auto arcs = whitney_arcs(sing, kTwoPi * std::ldexp(1.0, -level));
    std::vector<BoundaryArc> fresh;
    for (const auto& a : arcs) {
      if (!cache.count({a.lo(), a.length()})) fresh.push_back(a);
    }
    WhitneyChain radii;
    try {
      radii = choose_radii(theta, fresh, opt.schedule, opt.threads);
    } catch (const PreconditionError&) {
      if (level == opt.first_level) throw;
      res.notes.push_back("curve exhausted: radius search failed at Whitney level " + std::to_string(level) +
                          "; zeros placed from level " + std::to_string(level - 2));
      break;
    }
    for (const auto& c : radii.arcs) cache.emplace(std::pair{c.arc.lo(), c.arc.length()}, c);
    res.chain.arcs.clear();
    uncovered = kTwoPi;
    for (const auto& a : arcs) {
      res.chain.arcs.push_back(cache.at({a.lo(), a.length()}));
      uncovered -= a.length();
    }
    res.gamma = build_gamma(res.chain);
    placed = place_zeros(res.gamma, horizon, opt.step, opt.step_tol);
    if (!placed.needs_more_arcs) break;
    if (level + 2 > opt.max_level) {
      res.notes.push_back("curve exhausted: chain ends reached before the horizon at the deepest Whitney level");
      break;
    }
  }
  res.chain_of = placed.chain_of;
  res.position = placed.position;
  res.zeros = ZeroSequence::finite(placed.zeros);
  // zeros on an arc of length L at depth d sit about 0.2 d apart: their depths sum to about 5 L
  res.tail_estimate = placed.leftover + 5.0 * std::max(0.0, uncovered);
  res.notes.push_back("arcs are joined in boundary order of their left endpoints");
  res.notes.push_back("B is verified as the finite product over the materialized zeros");

  for (auto [i, j] : res.consecutive_pairs()) {
    res.max_step_error = std::max(res.max_step_error,
                                  std::abs(pseudo_distance(placed.zeros[i], placed.zeros[j]) - opt.step));
  }
  res.spacing_ok = res.max_step_error < 1e-6;
  if (placed.zeros.size() >= 2) {
    res.separation = separation_constants(res.zeros, placed.zeros.size());
    res.separation_ok = res.separation.separation >= 0.05 && std::isfinite(res.separation.box_constant);
  }
  const auto b = InnerFunction::blaschke(res.zeros);
  ScanOptions scan;
  scan.depth = depth;
  scan.threads = opt.threads;
  scan.report_above = 12.0 / 21.0;
  res.report_b = criterion_scan(b, scan);
  scan.report_above = 2.0;
  res.report_b_theta = criterion_scan(b * theta, scan);
  res.one_component_ok = res.report_b.verdict == Verdict::OneComponentEvidence &&
                         res.report_b_theta.verdict == Verdict::OneComponentEvidence;
  res.mechanism_violations = res.report_b.exceedances;
  res.mechanism_ok = res.mechanism_violations.empty();
  return res;
}

}  // namespace onecomp
