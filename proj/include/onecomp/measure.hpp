#pragma once

// Positive singular measures on the unit circle and their Poisson/Herglotz
// integrals with explicit error control.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "onecomp/boundary_set.hpp"
#include "onecomp/cantor.hpp"
#include "onecomp/geometry.hpp"

namespace onecomp {

/// Closed interval [lo, hi] containing a computed quantity.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;

  static Bracket exact(double v) { return {v, v}; }
  static Bracket around(double v, double err) { return {v - err, v + err}; }
  double mid() const { return lo == hi ? lo : 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double v) const { return lo <= v && v <= hi; }
  Bracket operator+(const Bracket& o) const { return {lo + o.lo, hi + o.hi}; }
  Bracket operator-() const { return {-hi, -lo}; }
};

/// Herglotz integral value with a componentwise absolute error bound.
struct ComplexEstimate {
  Complex value;
  double error = 0.0;
};

namespace kernel {

/// |z - e^{i t}|^2 for t at angular offset `offset` from arg z.
inline double dist_sq(const DiscPoint& z, double offset) {
  const double s = std::sin(offset / 2.0);
  return z.depth() * z.depth() + 4.0 * z.modulus() * s * s;
}

/// Poisson kernel (1 - |z|^2) / |z - e^{i t}|^2.
inline double poisson(const DiscPoint& z, double t) {
  return z.one_minus_mod_sq() / dist_sq(z, t - z.angle());
}

/// (z + xi) / (z - xi) for xi = e^{i t}.
inline Complex herglotz(const DiscPoint& z, double t) {
  const double d = dist_sq(z, t - z.angle());
  const double im = 2.0 * z.modulus() * std::sin(z.angle() - t);
  return -Complex(z.one_minus_mod_sq(), im) / d;
}

/// Nearest and farthest angular offsets from arg z to the arc [lo, lo + len].
inline std::pair<double, double> offset_range(const DiscPoint& z, double lo, double len) {
  if (len >= kTwoPi) return {0.0, kPi};
  const double rel = wrap_positive(z.angle() - lo);  // position of arg z measured from lo
  const double near = rel <= len ? 0.0 : std::min(rel - len, kTwoPi - rel);
  const double anti = wrap_positive(rel + kPi);
  const double far = anti <= len ? kPi
                                 : std::max(angular_distance(z.angle(), lo),
                                            angular_distance(z.angle(), lo + len));
  return {near, far};
}

}  // namespace kernel

struct Atom {
  double angle;
  double mass;
};

/// Finite (or truncated) sum of point masses.
class AtomicMeasure {
 public:
  AtomicMeasure(std::vector<Atom> atoms, double tail_mass = 0.0,
                std::vector<double> accumulation = {})
      : atoms_(std::move(atoms)), tail_mass_(tail_mass), accumulation_(std::move(accumulation)) {
    if (!(tail_mass_ >= 0.0) || !std::isfinite(tail_mass_)) {
      throw PreconditionError("atomic measure: tail mass must be finite and >= 0");
    }
    for (auto& a : atoms_) {
      if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
        throw PreconditionError("atomic measure: atom masses must be positive");
      }
      a.angle = wrap_angle(a.angle);
    }
    std::vector<double> angles;
    for (const auto& a : atoms_) angles.push_back(wrap_positive(a.angle));
    std::sort(angles.begin(), angles.end());
    if (std::adjacent_find(angles.begin(), angles.end()) != angles.end()) {
      throw PreconditionError("atomic measure: atom angles must be distinct");
    }
    if (atoms_.empty() && tail_mass_ == 0.0) {
      throw PreconditionError("atomic measure: total mass must be positive");
    }
  }

  const std::vector<Atom>& atoms() const { return atoms_; }
  double tail_mass() const { return tail_mass_; }
  const std::vector<double>& accumulation() const { return accumulation_; }

  double total_mass() const {
    double s = tail_mass_;
    for (const auto& a : atoms_) s += a.mass;
    return s;
  }

  /// Atoms whose rotated angles round to the same double are merged.
  AtomicMeasure rotated(double alpha) const {
    std::vector<Atom> atoms;
    for (const auto& a : atoms_) atoms.push_back({wrap_angle(a.angle + alpha), a.mass});
    std::stable_sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) {
      return wrap_positive(x.angle) < wrap_positive(y.angle);
    });
    std::vector<Atom> merged;
    for (const auto& a : atoms) {
      if (!merged.empty() && wrap_positive(merged.back().angle) == wrap_positive(a.angle)) {
        merged.back().mass += a.mass;
      } else {
        merged.push_back(a);
      }
    }
    atoms = std::move(merged);
    auto acc = accumulation_;
    for (double& a : acc) a = wrap_angle(a + alpha);
    return AtomicMeasure(std::move(atoms), tail_mass_, std::move(acc));
  }

 private:
  std::vector<Atom> atoms_;
  double tail_mass_;
  std::vector<double> accumulation_;
};

/// Cantor measure of a symmetric Cantor set (total mass 1).
class CantorMeasure {
 public:
  explicit CantorMeasure(CantorGeometry g)
      : geometry_(std::make_shared<const CantorGeometry>(std::move(g))) {}

  const CantorGeometry& geometry() const { return *geometry_; }
  std::shared_ptr<const CantorGeometry> geometry_ptr() const { return geometry_; }
  CantorMeasure rotated(double alpha) const { return CantorMeasure(geometry_->rotated(alpha)); }

 private:
  std::shared_ptr<const CantorGeometry> geometry_;
};

/// Measure given by a monotone piecewise-linear distribution function on [0, 2pi].
class CdfMeasure {
 public:
  explicit CdfMeasure(std::vector<std::pair<double, double>> samples, double offset = 0.0)
      : samples_(std::move(samples)), offset_(wrap_positive(offset)) {
    if (samples_.size() < 2) throw PreconditionError("cdf measure: need at least two samples");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const auto [t, v] = samples_[i];
      if (!std::isfinite(t) || !std::isfinite(v) || t < 0.0 || t > kTwoPi + 1e-12) {
        throw PreconditionError("cdf measure: sample " + std::to_string(i) + " out of range");
      }
      if (i > 0 && (t <= samples_[i - 1].first || v < samples_[i - 1].second)) {
        throw PreconditionError("cdf measure: samples must be strictly increasing in t and "
                                "non-decreasing in value (sample " + std::to_string(i) + ")");
      }
    }
    if (!(total_mass() > 0.0)) throw PreconditionError("cdf measure: total mass must be positive");
  }

  const std::vector<std::pair<double, double>>& samples() const { return samples_; }
  double offset() const { return offset_; }
  double total_mass() const { return samples_.back().second - samples_.front().second; }

  /// Distribution function at local coordinate u in [0, 2pi].
  double cdf_local(double u) const {
    if (u <= samples_.front().first) return samples_.front().second;
    if (u >= samples_.back().first) return samples_.back().second;
    auto it = std::upper_bound(samples_.begin(), samples_.end(), u,
                               [](double x, const auto& s) { return x < s.first; });
    const auto& [t1, v1] = *it;
    const auto& [t0, v0] = *std::prev(it);
    return v0 + (v1 - v0) * (u - t0) / (t1 - t0);
  }

  CdfMeasure rotated(double alpha) const { return CdfMeasure(samples_, offset_ + alpha); }

  /// Spans where the distribution function increases.
  std::vector<BoundaryArc> increasing_spans() const {
    std::vector<BoundaryArc> out;
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      if (samples_[i].second > samples_[i - 1].second) {
        out.push_back(BoundaryArc::between(samples_[i - 1].first + offset_,
                                           samples_[i].first + offset_));
      }
    }
    return out;
  }

 private:
  std::vector<std::pair<double, double>> samples_;
  double offset_;
};

struct IntegrationOptions {
  std::size_t max_cells = 4'000'000;
};

namespace detail {

/// A piece of a continuous measure: the arc [lo, lo + len] carrying `mass`.
struct Cell {
  double lo;
  double len;
  double mass;
  int level;
  long double local_start;
};

inline bool split_cell(const CantorGeometry& g, const Cell& c, Cell& left, Cell& right) {
  if (c.level >= g.depth_cap()) return false;
  const long double child = g.interval_length(c.level + 1);
  const long double shift = g.interval_length(c.level) - child;
  const double m = c.mass / 2.0;
  left = {static_cast<double>(c.local_start) + g.offset(), static_cast<double>(child), m,
          c.level + 1, c.local_start};
  right = {static_cast<double>(c.local_start + shift) + g.offset(), static_cast<double>(child), m,
           c.level + 1, c.local_start + shift};
  return true;
}

inline bool split_cell(const CdfMeasure&, const Cell& c, Cell& left, Cell& right) {
  if (c.level >= 60 || c.len < 1e-15) return false;
  const long double mid = c.local_start + static_cast<long double>(c.len) / 2.0L;
  // cells never straddle a sample, so the density is constant on them
  const double half = c.len / 2.0;
  left = {c.lo, half, c.mass / 2.0, c.level + 1, c.local_start};
  right = {c.lo + half, half, c.mass / 2.0, c.level + 1, mid};
  return true;
}

inline std::vector<Cell> root_cells(const CantorGeometry& g) {
  return {Cell{g.offset(), static_cast<double>(g.interval_length(0)), 1.0, 0, 0.0L}};
}

inline std::vector<Cell> root_cells(const CdfMeasure& f) {
  std::vector<Cell> out;
  const auto& s = f.samples();
  for (std::size_t i = 1; i < s.size(); ++i) {
    const double m = s[i].second - s[i - 1].second;
    if (m > 0.0) {
      out.push_back({s[i - 1].first + f.offset(), s[i].first - s[i - 1].first, m, 0,
                     static_cast<long double>(s[i - 1].first)});
    }
  }
  return out;
}

/// Greedy adaptive quadrature: refine the cell with the largest error bound
/// until the summed bound is below tol. `rule(cell)` returns (estimate, error).
template <typename Source, typename Value, typename Rule>
std::pair<Value, double> adaptive_integrate(const Source& src, double tol, const Rule& rule,
                                            const IntegrationOptions& opt, const char* what) {
  struct Entry {
    Cell cell;
    Value value;
    double error;
    bool operator<(const Entry& o) const { return error < o.error; }
  };
  std::vector<Entry> open;  // max-heap on error
  std::vector<Entry> frozen;
  double total_error = 0.0;
  for (const auto& c : root_cells(src)) {
    auto [v, e] = rule(c);
    total_error += e;
    open.push_back({c, v, e});
  }
  std::make_heap(open.begin(), open.end());
  auto exact_error = [&] {
    double e = 0.0;
    for (const auto& x : open) e += x.error;
    for (const auto& x : frozen) e += x.error;
    return e;
  };
  std::size_t cells = open.size();
  std::size_t since_exact = 0;
  std::size_t recheck = 1024;
  while (!open.empty() && cells <= opt.max_cells) {
    // the running sum loses precision once the leading errors are removed, in
    // either direction; a periodic exact sum (amortized O(1)) bounds the drift
    if (total_error <= tol || ++since_exact > recheck) {
      total_error = exact_error();
      since_exact = 0;
      recheck = std::max<std::size_t>(1024, open.size() + frozen.size());
      if (total_error <= tol) break;
    }
    std::pop_heap(open.begin(), open.end());
    Entry top = open.back();
    open.pop_back();
    Cell l{}, r{};
    if (!split_cell(src, top.cell, l, r)) {
      frozen.push_back(top);
      continue;
    }
    total_error -= top.error;
    for (const Cell& c : {l, r}) {
      if (c.mass <= 0.0) continue;
      auto [v, e] = rule(c);
      total_error += e;
      open.push_back({c, v, e});
      std::push_heap(open.begin(), open.end());
      ++cells;
    }
  }
  Value sum{};
  for (const auto& x : open) sum += x.value;
  for (const auto& x : frozen) sum += x.value;
  const double err = exact_error();
  if (err > tol) {
    if constexpr (std::is_same_v<Value, double>) {
      throw PrecisionExhausted(std::string(what) + ": tolerance not reachable", sum - err,
                               sum + err);
    } else {
      throw PrecisionExhausted(std::string(what) + ": tolerance not reachable",
                               std::abs(sum) - err, std::abs(sum) + err);
    }
  }
  return {sum, err};
}

}  // namespace detail

/// Sum of atomic, Cantor and distribution-function parts.
class SingularMeasure {
 public:
  using Part = std::variant<AtomicMeasure, CantorMeasure, CdfMeasure>;

  SingularMeasure() = default;
  SingularMeasure(Part p) { parts_.push_back(std::move(p)); }  // NOLINT(implicit)
  SingularMeasure(AtomicMeasure m) : SingularMeasure(Part(std::move(m))) {}  // NOLINT(implicit)
  SingularMeasure(CantorMeasure m) : SingularMeasure(Part(std::move(m))) {}  // NOLINT(implicit)
  SingularMeasure(CdfMeasure m) : SingularMeasure(Part(std::move(m))) {}  // NOLINT(implicit)

  static SingularMeasure atom(double angle, double mass) {
    return SingularMeasure(Part(AtomicMeasure({{angle, mass}})));
  }

  const std::vector<Part>& parts() const { return parts_; }
  bool is_zero() const { return parts_.empty(); }

  SingularMeasure operator+(const SingularMeasure& o) const {
    SingularMeasure s = *this;
    s.parts_.insert(s.parts_.end(), o.parts_.begin(), o.parts_.end());
    return s;
  }

  SingularMeasure rotated(double alpha) const {
    SingularMeasure s;
    for (const auto& p : parts_) {
      std::visit([&](const auto& m) { s.parts_.emplace_back(m.rotated(alpha)); }, p);
    }
    return s;
  }

  double total_mass() const {
    double s = 0.0;
    for (const auto& p : parts_) {
      if (const auto* a = std::get_if<AtomicMeasure>(&p)) s += a->total_mass();
      else if (const auto* f = std::get_if<CdfMeasure>(&p)) s += f->total_mass();
      else s += 1.0;
    }
    return s;
  }

  /// Closed support: atoms and their declared accumulation points, Cantor sets,
  /// and the spans where a distribution function increases.
  BoundarySet support() const {
    BoundarySet s;
    for (const auto& p : parts_) {
      if (const auto* a = std::get_if<AtomicMeasure>(&p)) {
        std::vector<double> angles = a->accumulation();
        for (const auto& atom : a->atoms()) angles.push_back(atom.angle);
        s = s.united(BoundarySet::points(std::move(angles)));
      } else if (const auto* c = std::get_if<CantorMeasure>(&p)) {
        s = s.united(BoundarySet::cantor(c->geometry_ptr()));
      } else {
        s = s.united(BoundarySet::arcs(std::get<CdfMeasure>(p).increasing_spans()));
      }
    }
    return s;
  }

  /// Mass of an arc. Atoms on the arc's endpoints count iff `closed_ends`.
  /// Tail mass of truncated atomic families is not located and is excluded.
  double mass_of_arc(const BoundaryArc& arc, bool closed_ends = true, double tol = 1e-12) const {
    double total = 0.0;
    for (const auto& p : parts_) {
      if (const auto* a = std::get_if<AtomicMeasure>(&p)) {
        for (const auto& atom : a->atoms()) {
          const double d = angular_distance(atom.angle, arc.center_angle);
          if (arc.full() || d < arc.half_width || (closed_ends && d == arc.half_width)) {
            total += atom.mass;
          }
        }
      } else if (const auto* c = std::get_if<CantorMeasure>(&p)) {
        total += cantor_arc_mass(c->geometry(), arc, tol);
      } else {
        total += cdf_arc_mass(std::get<CdfMeasure>(p), arc);
      }
    }
    return total;
  }

  /// P[sigma](z) = int (1 - |z|^2) / |z - e^{it}|^2 dsigma(t), bracketed with width <= 2 tol.
  Bracket poisson_integral(const DiscPoint& z, double tol,
                           const IntegrationOptions& opt = {}) const {
    require_interior(z, "poisson_integral");
    Bracket out = Bracket::exact(0.0);
    if (parts_.empty()) return out;
    const double share = tol / static_cast<double>(parts_.size());
    for (const auto& p : parts_) {
      if (const auto* a = std::get_if<AtomicMeasure>(&p)) {
        double s = 0.0;
        for (const auto& atom : a->atoms()) s += atom.mass * kernel::poisson(z, atom.angle);
        const double kmax = (2.0 - z.depth()) / z.depth();
        const double tail = a->tail_mass() * kmax;
        if (tail > 2.0 * share) {
          throw PrecisionExhausted("poisson_integral: atomic tail bound too large", s, s + tail);
        }
        out = out + Bracket{s, s + tail};
      } else {
        // Every cell carries a measure symmetric about its center (a Cantor piece,
        // or uniform density between CDF samples), so the linear Taylor term
        // cancels; |P''| <= 10 r (1 - r^2) / D^2.
        auto rule = [&z](const detail::Cell& c) {
          const double dmin = kernel::dist_sq(z, kernel::offset_range(z, c.lo, c.len).first);
          const double v = c.mass * kernel::poisson(z, c.lo + c.len / 2.0);
          const double err =
              c.mass * c.len * c.len / 8.0 * 10.0 * z.modulus() * z.one_minus_mod_sq() / (dmin * dmin);
          return std::pair<double, double>{v, err};
        };
        std::pair<double, double> r;
        if (const auto* c = std::get_if<CantorMeasure>(&p)) {
          r = detail::adaptive_integrate<CantorGeometry, double>(c->geometry(), share,
                                                                 rule, opt,
                                                                 "poisson_integral");
        } else {
          r = detail::adaptive_integrate<CdfMeasure, double>(std::get<CdfMeasure>(p), share, rule,
                                                             opt, "poisson_integral");
        }
        out = out + Bracket::around(r.first, r.second);
      }
    }
    out.lo = std::max(out.lo, 0.0);
    return out;
  }

  /// int (z + xi) / (z - xi) dsigma(xi); real and imaginary parts within tol.
  ComplexEstimate herglotz_integral(const DiscPoint& z, double tol,
                                    const IntegrationOptions& opt = {}) const {
    require_interior(z, "herglotz_integral");
    ComplexEstimate out{Complex(0.0, 0.0), 0.0};
    if (parts_.empty()) return out;
    const double share = tol / static_cast<double>(parts_.size());
    for (const auto& p : parts_) {
      if (const auto* a = std::get_if<AtomicMeasure>(&p)) {
        Complex s(0.0, 0.0);
        for (const auto& atom : a->atoms()) s += atom.mass * kernel::herglotz(z, atom.angle);
        const double tail = a->tail_mass() * (2.0 - z.depth()) / z.depth();
        if (tail > share) {
          throw PrecisionExhausted("herglotz_integral: atomic tail bound too large",
                                   std::abs(s) - tail, std::abs(s) + tail);
        }
        out.value += s;
        out.error += tail;
      } else {
        // same symmetry; second derivative in t bounded by 8 r / |e^{it} - z|^3
        auto rule = [&z](const detail::Cell& c) {
          const double dmin =
              std::sqrt(kernel::dist_sq(z, kernel::offset_range(z, c.lo, c.len).first));
          const Complex v = c.mass * kernel::herglotz(z, c.lo + c.len / 2.0);
          const double err = c.mass * c.len * c.len * z.modulus() / (dmin * dmin * dmin);
          return std::pair<Complex, double>{v, err};
        };
        std::pair<Complex, double> r;
        if (const auto* c = std::get_if<CantorMeasure>(&p)) {
          r = detail::adaptive_integrate<CantorGeometry, Complex>(c->geometry(), share,
                                                                  rule, opt,
                                                                  "herglotz_integral");
        } else {
          r = detail::adaptive_integrate<CdfMeasure, Complex>(std::get<CdfMeasure>(p), share,
                                                              rule, opt, "herglotz_integral");
        }
        out.value += r.first;
        out.error += r.second;
      }
    }
    return out;
  }

  /// Grid minimum of sigma({psi : |psi - xi| < h}) / h (chordal distance).
  double density_liminf(double xi, const std::vector<double>& h_grid) const {
    double best = std::numeric_limits<double>::infinity();
    for (double h : h_grid) {
      if (!(h > 0.0)) throw PreconditionError("density_liminf: grid values must be positive");
      const double half = h >= 2.0 ? kPi : 2.0 * std::asin(h / 2.0);
      best = std::min(best, mass_of_arc({xi, half}, false) / h);
    }
    return best;
  }

  static std::vector<double> default_density_grid() {
    std::vector<double> g;
    for (int k = 3; k <= 20; ++k) g.push_back(std::ldexp(1.0, -k));
    return g;
  }

 private:
  static double cantor_arc_mass(const CantorGeometry& g, const BoundaryArc& arc, double tol) {
    if (arc.full()) return 1.0;
    const long double len = static_cast<long double>(arc.length());
    const long double full = g.interval_length(0);
    // a double angle cannot resolve 2pi any closer than this
    constexpr long double snap = 8.0L * std::numeric_limits<double>::epsilon();
    long double u0 = static_cast<long double>(wrap_positive(arc.lo() - g.offset()));
    if (u0 > full - snap) u0 = 0.0L;
    long double u1 = u0 + len;
    if (std::abs(u1 - full) < snap) u1 = full;
    auto diff = [&g](long double a, long double b) {
      const auto fa = g.cdf_local(a);
      const auto fb = g.cdf_local(b);
      const long double lo = std::max(0.0L, fb.first - fa.second);
      const long double hi = fb.second - fa.first;
      return std::pair<long double, long double>{lo, hi};
    };
    std::pair<long double, long double> br;
    long double est;
    if (u1 <= full) {
      br = diff(u0, u1);
      est = g.cdf_estimate_local(u1) - g.cdf_estimate_local(u0);
    } else {
      const auto a = diff(u0, full);
      const auto b = diff(0.0L, u1 - full);
      br = {a.first + b.first, a.second + b.second};
      est = (1.0L - g.cdf_estimate_local(u0)) + g.cdf_estimate_local(u1 - full);
    }
    if (static_cast<double>(br.second - br.first) > tol) {
      throw PrecisionExhausted("mass_of_arc: Cantor depth cap reached",
                               static_cast<double>(br.first), static_cast<double>(br.second));
    }
    return static_cast<double>(std::clamp(est, br.first, br.second));
  }

  static double cdf_arc_mass(const CdfMeasure& f, const BoundaryArc& arc) {
    if (arc.full()) return f.total_mass();
    const double u0 = wrap_positive(arc.lo() - f.offset());
    const double u1 = u0 + arc.length();
    if (u1 <= kTwoPi) return f.cdf_local(u1) - f.cdf_local(u0);
    return (f.cdf_local(kTwoPi) - f.cdf_local(u0)) + (f.cdf_local(u1 - kTwoPi) - f.cdf_local(0.0));
  }

  std::vector<Part> parts_;
};

}  // namespace onecomp
