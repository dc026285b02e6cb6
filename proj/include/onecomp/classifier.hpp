#pragma once

// Numerical one-component classification: the Carleson-square criterion scan
// over dyadic top halves, and the specialized radial-limit, sawtooth and
// density tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "onecomp/inner_function.hpp"
#include "onecomp/parallel.hpp"

namespace onecomp {

enum class Verdict { OneComponentEvidence, NotOneComponentEvidence, Inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::OneComponentEvidence: return "OneComponentEvidence";
    case Verdict::NotOneComponentEvidence: return "NotOneComponentEvidence";
    default: return "Inconclusive";
  }
}

/// Certified enclosure of |Theta(z)| of width <= mod_tol. The log tolerance is
/// loosened where |Theta| is small, which keeps deep evaluations cheap.
inline Bracket modulus_bracket(const InnerFunction& f, const DiscPoint& z, double mod_tol) {
  double t = 0.5;
  for (int attempt = 0;; ++attempt) {
    const auto lm = log_modulus(f, z, t);
    if (lm.at_zero) return Bracket::exact(0.0);
    const Bracket b{std::exp(lm.value.lo), std::exp(lm.value.hi)};
    if (b.width() <= mod_tol || attempt >= 6 || t <= 1e-14) return b;
    t = std::max(1e-14, std::min(t / 4.0, 0.5 * mod_tol / std::max(b.hi, 1e-300)));
  }
}

struct Witness {
  DiscPoint z;
  double mod_theta;
  double mu_q;
  int depth;
};

struct TestRecord {
  std::string name;
  Verdict verdict = Verdict::Inconclusive;
  double estimate = 0.0;
  std::vector<double> trace;  // window maxima, outermost last
  std::string note;
};

struct ScanOptions {
  int depth = 16;
  double tol = 1e-3;        // stabilization tolerance
  double margin = 0.05;     // one-component evidence needs C* <= 1 - margin
  double eval_tol = 1e-10;  // accuracy of |Theta| at scan points
  double grid_rotation = 0.0;
  unsigned threads = 0;
  double report_above = 2.0;  // boxes with mu(Q) > 0 and |Theta| above this go to `exceedances`
};

struct ClassificationReport {
  Verdict verdict = Verdict::Inconclusive;
  double c_star = 0.0;
  std::vector<double> depth_trace;  // cumulative C* after depths 2..depth
  std::vector<double> depth_max;    // per-depth maximum over boxes with mu(Q) > 0
  std::vector<Witness> witnesses;   // per-depth argmax among certainly positive boxes
  std::vector<Witness> exceedances;
  std::vector<TestRecord> tests;
  ScanOptions options;
  std::size_t scanned = 0;
  std::size_t positive = 0;
  std::size_t undecided = 0;
  std::vector<std::string> notes;
};

/// Scan points at dyadic depth n: the top-half depth 3 pi 2^-(n+2) at the four
/// angles rotation + pi j 2^-(n+1), four per box; together the windows of their
/// Carleson squares cover the circle and include the top-half centers.
inline std::vector<DiscPoint> scan_points(int n, double rotation) {
  const double d = 0.75 * kPi * std::ldexp(1.0, -n);
  const std::size_t count = std::size_t{1} << (n + 2);
  const double step = kPi * std::ldexp(1.0, -n - 1);
  std::vector<DiscPoint> pts;
  pts.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    pts.push_back(DiscPoint::from_depth(d, rotation + step * static_cast<double>(j)));
  }
  return pts;
}

inline ClassificationReport criterion_scan(const InnerFunction& f, const ScanOptions& opt = {}) {
  if (opt.depth < 3 || opt.depth > 40) throw PreconditionError("criterion_scan: depth must be in [3, 40]");
  ClassificationReport rep;
  rep.options = opt;
  if (f.is_constant()) {
    rep.verdict = Verdict::OneComponentEvidence;
    rep.notes.push_back("constant: mu vanishes, nothing to scan");
    return rep;
  }
  const double finest = 0.75 * kPi * std::ldexp(1.0, -opt.depth);
  const MuMeasure mu(f, 0.5 * finest);
  struct Sample {
    bool relevant = false;
    bool certain = false;
    double mu_q = 0.0;
    double mod = 0.0;
  };
  double c_star = 0.0;
  for (int n = 2; n <= opt.depth; ++n) {
    const auto pts = scan_points(n, opt.grid_rotation);
    std::vector<Sample> res(pts.size());
    parallel_for(pts.size(), opt.threads, [&](std::size_t i) {
      const auto m = mu.of_square(CarlesonSquare::of(pts[i]));
      Sample& s = res[i];
      s.relevant = m.positive() || m.undecided();
      if (!s.relevant) return;
      s.certain = m.positive();
      s.mu_q = m.mass;
      s.mod = modulus_bracket(f, pts[i], opt.eval_tol).hi;
    });
    double level_max = 0.0;
    std::ptrdiff_t arg = -1;
    for (std::size_t i = 0; i < res.size(); ++i) {
      ++rep.scanned;
      if (!res[i].relevant) continue;
      if (res[i].certain) ++rep.positive; else ++rep.undecided;
      level_max = std::max(level_max, res[i].mod);
      if (res[i].mod > opt.report_above) rep.exceedances.push_back({pts[i], res[i].mod, res[i].mu_q, n});
      if (res[i].certain && (arg < 0 || res[i].mod > res[static_cast<std::size_t>(arg)].mod)) {
        arg = static_cast<std::ptrdiff_t>(i);
      }
    }
    c_star = std::max(c_star, level_max);
    rep.depth_max.push_back(level_max);
    rep.depth_trace.push_back(c_star);
    if (arg >= 0) {
      const auto& s = res[static_cast<std::size_t>(arg)];
      rep.witnesses.push_back({pts[static_cast<std::size_t>(arg)], s.mod, s.mu_q, n});
    }
  }
  rep.c_star = c_star;
  if (rep.undecided > 0) {
    rep.notes.push_back(std::to_string(rep.undecided) +
                        " squares may contain unmaterialized zeros and were counted as positive");
  }

  const auto& tr = rep.depth_trace;
  const bool stable = tr.size() >= 2 && std::abs(tr.back() - tr[tr.size() - 2]) < opt.tol;
  bool witness_run = false;
  const auto& w = rep.witnesses;
  if (w.size() >= 3 && w.back().depth == opt.depth) {
    const auto k = w.size();
    witness_run = w[k - 3].depth == opt.depth - 2 && w[k - 3].mod_theta <= w[k - 2].mod_theta &&
                  w[k - 2].mod_theta <= w[k - 1].mod_theta && w[k - 1].mod_theta > 1.0 - opt.tol;
  }
  if (c_star > 1.0 - opt.tol && witness_run) {
    rep.verdict = Verdict::NotOneComponentEvidence;
  } else if (c_star <= 1.0 - opt.margin && stable) {
    rep.verdict = Verdict::OneComponentEvidence;
  } else {
    rep.verdict = Verdict::Inconclusive;
  }
  return rep;
}

namespace detail {

/// Shared verdict rule of the radial and sawtooth tests: window maxima ordered
/// from the inside out. A strictly increasing run over the last three windows
/// points to a limsup of 1; a stabilized estimate below 1 - tol to one-component.
inline Verdict trend_verdict(const std::vector<double>& maxima, double estimate, double tol) {
  const auto k = maxima.size();
  if (k >= 3 && maxima[k - 1] > maxima[k - 2] + tol && maxima[k - 2] > maxima[k - 3] + tol) {
    return Verdict::NotOneComponentEvidence;
  }
  if (estimate >= 1.0 - tol) return Verdict::NotOneComponentEvidence;
  if (k >= 2 && maxima[k - 1] <= maxima[k - 2] + tol) return Verdict::OneComponentEvidence;
  return Verdict::Inconclusive;
}

}  // namespace detail

struct LimitTestResult {
  double estimate = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> window_maxima;
  std::vector<std::pair<double, double>> samples;  // (1 - |z|, certified upper bound of |Theta|)

  TestRecord record(const std::string& name) const {
    return {name, verdict, estimate, window_maxima, {}};
  }
};

/// limsup of |B| along the radius at stolz.vertex_angle, sampled at the depths 1 - r in `depths`.
/// Windows are the stretches of the radius between consecutive zero depths.
inline LimitTestResult radial_limit_test(const InnerFunction& b, const StolzAngle& stolz,
                                         std::vector<double> depths, double tol = 1e-3,
                                         double eval_tol = 1e-12, std::size_t prefix = 4096,
                                         unsigned threads = 0) {
  if (!b.sigma().is_zero()) throw PreconditionError("radial_limit_test: expects a Blaschke product");
  if (depths.size() < 2) throw PreconditionError("radial_limit_test: need at least two grid points");
  std::sort(depths.begin(), depths.end(), std::greater<>());
  // zeros far below the finest grid point do not affect the samples
  const double cutoff = std::ldexp(depths.back(), -20);
  bool infinite = false;
  std::vector<double> zero_depths;
  for (const auto& zs : b.zero_factors()) {
    if (!zs.available()) infinite = true;
    for (const auto& z : zs.materialize(prefix)) {
      if (z.depth() < cutoff) break;
      if (!stolz.contains(z)) {
        throw PreconditionError("radial_limit_test: not a Stolz sequence (zero outside the declared "
                                "aperture)");
      }
      zero_depths.push_back(z.depth());
    }
  }
  if (!infinite) throw PreconditionError("radial_limit_test: finite zero set");
  LimitTestResult out;
  out.samples.resize(depths.size());
  parallel_for(depths.size(), threads, [&](std::size_t i) {
    const auto z = DiscPoint::from_depth(depths[i], stolz.vertex_angle);
    out.samples[i] = {depths[i], modulus_bracket(b, z, eval_tol).hi};
  });
  // window boundaries: zero depths inside the grid range, plus the grid ends
  std::sort(zero_depths.begin(), zero_depths.end(), std::greater<>());
  zero_depths.erase(std::unique(zero_depths.begin(), zero_depths.end()), zero_depths.end());
  std::vector<double> cuts;
  for (double a : zero_depths) {
    if (a < depths.front() && a > depths.back()) cuts.push_back(a);
  }
  std::size_t c = 0;
  double cur = -1.0;
  for (const auto& [d, m] : out.samples) {
    while (c < cuts.size() && d <= cuts[c]) {
      if (cur >= 0.0) out.window_maxima.push_back(cur);
      cur = -1.0;
      ++c;
    }
    cur = std::max(cur, m);
  }
  if (cur >= 0.0) out.window_maxima.push_back(cur);
  const std::size_t half = out.samples.size() / 2;
  for (std::size_t i = half; i < out.samples.size(); ++i) {
    out.estimate = std::max(out.estimate, out.samples[i].second);
  }
  out.verdict = detail::trend_verdict(out.window_maxima, out.estimate, tol);
  return out;
}

/// Angles of sample points of the sawtooth region at depth d, at most about
/// `budget` of them (support pieces are subsampled uniformly in index beyond that).
inline std::vector<double> sawtooth_angles(const BoundarySet& support, double d,
                                           std::size_t budget = 4096) {
  std::vector<double> cand;
  const double step = d / 4.0;
  auto around = [&](double center) {
    for (int k = -2; k <= 2; ++k) cand.push_back(center + step * k);
  };
  for (const auto& c : support.components()) {
    if (const auto* p = std::get_if<BoundarySet::Points>(&c)) {
      const std::size_t stride = std::max<std::size_t>(1, p->angles.size() * 5 / budget);
      for (std::size_t i = 0; i < p->angles.size(); i += stride) around(p->angles[i]);
    } else if (const auto* a = std::get_if<BoundarySet::Arcs>(&c)) {
      for (auto [lo, hi] : a->spans) {
        const double len = hi - lo + d;
        const std::size_t n = static_cast<std::size_t>(std::ceil(len / step)) + 1;
        const std::size_t stride = std::max<std::size_t>(1, n / budget);
        for (std::size_t i = 0; i < n; i += stride) cand.push_back(lo - d / 2 + step * i);
      }
    } else {
      const auto& g = *std::get<BoundarySet::Cantor>(c).geometry;
      int m = 0;
      while (m < std::min(g.depth_cap(), 40) && static_cast<double>(g.interval_length(m)) > step) ++m;
      int sub = 0;
      while (m - sub > 0 && (std::size_t{5} << (m - sub)) > budget) ++sub;
      // one interval out of every 2^sub, walking the binary tree of generation m
      const std::size_t count = std::size_t{1} << (m - sub);
      const double len = static_cast<double>(g.interval_length(m));
      for (std::size_t idx = 0; idx < count; ++idx) {
        long double a = 0.0L;
        const std::size_t path = idx << sub;
        for (int lvl = 0; lvl < m; ++lvl) {
          if ((path >> (m - 1 - lvl)) & 1U) a += g.interval_length(lvl) - g.interval_length(lvl + 1);
        }
        around(static_cast<double>(a) + g.offset() + len / 2.0);
      }
    }
  }
  for (double& t : cand) t = wrap_positive(t);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [&](double x, double y) { return y - x < 1e-3 * step; }),
             cand.end());
  const SawtoothRegion omega(support);
  std::vector<double> out;
  for (double t : cand) {
    if (omega.contains(DiscPoint::from_depth(d, t))) out.push_back(t);
  }
  return out;
}

/// limsup of |Theta| over the sawtooth region of supp sigma, sampled on the circles 1 - |z| = d.
inline LimitTestResult sawtooth_test(const InnerFunction& f, std::vector<double> depths,
                                     double tol = 1e-3, double eval_tol = 1e-9,
                                     std::size_t budget = 4096, std::size_t prefix = 4096,
                                     unsigned threads = 0) {
  if (f.sigma().is_zero()) throw PreconditionError("sawtooth_test: singular part is trivial");
  if (depths.size() < 2) throw PreconditionError("sawtooth_test: need at least two levels");
  std::sort(depths.begin(), depths.end(), std::greater<>());
  const BoundarySet support = f.sigma().support();
  const SawtoothRegion omega(support);
  const double cutoff = std::ldexp(depths.back(), -20);
  for (const auto& zs : f.zero_factors()) {
    for (const auto& z : zs.materialize(prefix)) {
      if (z.depth() < cutoff) continue;
      if (z.is_origin() || !omega.contains(z)) {
        throw PreconditionError("sawtooth_test: hypothesis violated (a zero lies outside the "
                                "sawtooth region)");
      }
    }
  }
  LimitTestResult out;
  for (double d : depths) {
    const auto angles = sawtooth_angles(support, d, budget);
    std::vector<double> mods(angles.size());
    parallel_for(angles.size(), threads, [&](std::size_t i) {
      mods[i] = modulus_bracket(f, DiscPoint::from_depth(d, angles[i]), eval_tol).hi;
    });
    double m = 0.0;
    for (double v : mods) m = std::max(m, v);
    out.window_maxima.push_back(m);
    out.samples.emplace_back(d, m);
  }
  for (std::size_t i = depths.size() / 2; i < depths.size(); ++i) {
    out.estimate = std::max(out.estimate, out.window_maxima[i]);
  }
  out.verdict = detail::trend_verdict(out.window_maxima, out.estimate, tol);
  return out;
}

enum class DensityVerdict { SufficientConditionMet, Inconclusive };

inline const char* to_string(DensityVerdict v) {
  return v == DensityVerdict::SufficientConditionMet ? "sufficient-condition-met" : "inconclusive";
}

/// Grid liminf of sigma(ball(xi, h)) / h at each sampled support point against a threshold.
inline DensityVerdict density_test(const SingularMeasure& sigma, const std::vector<double>& support_sample,
                                   double threshold,
                                   const std::vector<double>& h_grid = SingularMeasure::default_density_grid()) {
  for (double xi : support_sample) {
    if (!(sigma.density_liminf(xi, h_grid) >= threshold)) return DensityVerdict::Inconclusive;
  }
  return DensityVerdict::SufficientConditionMet;
}

struct ClassifyBudget {
  ScanOptions scan;
  std::vector<double> limit_depths;  // defaults to 16 points per octave on [2^-22, 2^-6]
};

inline std::vector<double> default_limit_depths(int from = 6, int to = 22, int per_octave = 16) {
  std::vector<double> d;
  for (int i = from * per_octave; i <= to * per_octave; ++i) {
    d.push_back(std::exp2(-static_cast<double>(i) / per_octave));
  }
  return d;
}

/// Runs the criterion scan and, when the input has the right shape, the
/// matching specialized test; disagreeing definite verdicts downgrade to Inconclusive.
inline ClassificationReport classify(const InnerFunction& f, const ClassifyBudget& budget = {}) {
  ClassificationReport rep = criterion_scan(f, budget.scan);
  if (f.is_constant()) return rep;
  rep.tests.push_back({"criterion_scan", rep.verdict, rep.c_star, rep.depth_trace, {}});
  const auto depths = budget.limit_depths.empty() ? default_limit_depths() : budget.limit_depths;
  std::vector<TestRecord> extra;
  const double tol = budget.scan.tol;
  if (!f.sigma().is_zero()) {
    try {
      extra.push_back(sawtooth_test(f, depths, tol).record("sawtooth_test"));
    } catch (const PreconditionError& e) {
      rep.notes.push_back(std::string("sawtooth_test skipped: ") + e.what());
    }
  } else if (f.zero_factors().size() == 1) {
    const auto& zs = f.zero_factors().front();
    const auto acc = zs.accumulation_angles();
    if (!zs.available() && acc.size() == 1) {
      try {
        extra.push_back(radial_limit_test(f, StolzAngle{acc.front(), 2.0}, depths, tol)
                            .record("radial_limit_test"));
      } catch (const PreconditionError& e) {
        rep.notes.push_back(std::string("radial_limit_test skipped: ") + e.what());
      }
    }
  }
  for (auto& t : extra) {
    if (t.verdict != Verdict::Inconclusive && rep.verdict != Verdict::Inconclusive &&
        t.verdict != rep.verdict) {
      rep.notes.push_back("criterion_scan and " + t.name + " disagree");
      rep.verdict = Verdict::Inconclusive;
    } else if (rep.verdict == Verdict::Inconclusive && t.verdict != Verdict::Inconclusive) {
      rep.notes.push_back(t.name + " is definite while criterion_scan is inconclusive");
    }
    rep.tests.push_back(std::move(t));
  }
  return rep;
}

}  // namespace onecomp
