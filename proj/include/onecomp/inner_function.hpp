#pragma once

// Inner functions lambda * B * S: evaluation in log space with certified
// Blaschke tails, and the measure mu = sum (1 - |z_n|) delta_{z_n} + sigma.

#include <complex>
#include <limits>
#include <vector>

#include "onecomp/measure.hpp"
#include "onecomp/zeros.hpp"

namespace onecomp {

class InnerFunction {
 public:
  InnerFunction() = default;

  static InnerFunction constant(Complex lambda = 1.0) {
    InnerFunction f;
    f.set_lambda(lambda);
    return f;
  }
  static InnerFunction blaschke(ZeroSequence zeros, Complex lambda = 1.0) {
    InnerFunction f = constant(lambda);
    if (!zeros.empty()) f.factors_.push_back(std::move(zeros));
    return f;
  }
  static InnerFunction singular(SingularMeasure sigma, Complex lambda = 1.0) {
    InnerFunction f = constant(lambda);
    f.sigma_ = std::move(sigma);
    return f;
  }

  Complex lambda() const { return lambda_; }
  const std::vector<ZeroSequence>& zero_factors() const { return factors_; }
  const SingularMeasure& sigma() const { return sigma_; }
  bool has_zeros() const { return !factors_.empty(); }
  bool is_constant() const { return factors_.empty() && sigma_.is_zero(); }

  InnerFunction operator*(const InnerFunction& o) const {
    InnerFunction f = constant(lambda_ * o.lambda_);
    f.factors_ = factors_;
    f.factors_.insert(f.factors_.end(), o.factors_.begin(), o.factors_.end());
    f.sigma_ = sigma_ + o.sigma_;
    return f;
  }

  /// Theta(e^{-i alpha} z) up to a unimodular constant: zeros and measure rotated by alpha.
  InnerFunction rotated(double alpha) const {
    InnerFunction f = constant(lambda_);
    for (const auto& z : factors_) f.factors_.push_back(z.rotated(alpha));
    f.sigma_ = sigma_.rotated(alpha);
    return f;
  }

  /// Accumulation points of the zeros together with the closed support of sigma.
  BoundarySet singular_set() const {
    std::vector<double> acc;
    for (const auto& z : factors_) {
      if (z.is_exhaustive()) continue;
      const auto a = z.accumulation_angles();
      acc.insert(acc.end(), a.begin(), a.end());
    }
    return BoundarySet::points(std::move(acc)).united(sigma_.support());
  }

 private:
  void set_lambda(Complex l) {
    if (std::abs(std::abs(l) - 1.0) > 1e-12) {
      throw PreconditionError("inner function: |lambda| must be 1");
    }
    lambda_ = l;
  }

  Complex lambda_ = 1.0;
  std::vector<ZeroSequence> factors_;
  SingularMeasure sigma_;
};

/// Certified enclosure of log|Theta(z)|.
struct LogModulus {
  Bracket value;
  bool at_zero = false;       // z is a zero; value is -infinity
  std::size_t zeros_used = 0;

  static LogModulus zero_hit(std::size_t used) {
    const double inf = std::numeric_limits<double>::infinity();
    return {{-inf, -inf}, true, used};
  }
  double upper_modulus() const { return at_zero ? 0.0 : std::exp(value.hi); }
  double lower_modulus() const { return at_zero ? 0.0 : std::exp(value.lo); }
};

namespace detail {

/// Bound on -sum_{j >= k} log rho(z, z_j) from the Blaschke tail at k, or +inf.
inline double blaschke_tail_bound(const DiscPoint& z, double tail_sum) {
  if (tail_sum == 0.0) return 0.0;
  const double t = 4.0 * (2.0 - z.depth()) / z.depth() * tail_sum;
  return t < 1.0 ? t / (1.0 - t) : std::numeric_limits<double>::infinity();
}

struct BlaschkeSum {
  double log_sum = 0.0;       // sum of log rho over used zeros
  double tail = 0.0;          // certified bound for the rest
  std::size_t used = 0;
  bool at_zero = false;
};

/// Sums log rho(z, z_j) until the certified tail is <= budget (or `max_terms` are used).
inline BlaschkeSum blaschke_log_sum(const ZeroSequence& zs, const DiscPoint& z, double budget,
                                    std::size_t max_terms) {
  BlaschkeSum r;
  const std::size_t avail = zs.available().value_or(std::numeric_limits<std::size_t>::max());
  while (true) {
    r.tail = blaschke_tail_bound(z, zs.tail_after(r.used));
    if (r.tail <= budget || r.used >= avail || r.used >= max_terms) return r;
    const double l = log_pseudo_distance(z, zs.zero(r.used));
    ++r.used;
    if (std::isinf(l)) {
      r.at_zero = true;
      return r;
    }
    r.log_sum += l;
  }
}

}  // namespace detail

/// |w|/w (w - z) / (1 - conj(w) z), or z when w = 0; z may lie on the circle.
inline Complex blaschke_factor(const DiscPoint& w, Complex z) {
  if (w.is_origin()) return z;
  const Complex wv = w.value();
  return std::polar(1.0, -w.angle()) * (wv - z) / (1.0 - std::conj(wv) * z);
}

inline constexpr std::size_t kMaxBlaschkeTerms = 50'000'000;

/// log|Theta(z)| with each of the Blaschke and singular parts certified to tol/2.
inline LogModulus log_modulus(const InnerFunction& f, const DiscPoint& z, double tol,
                              const IntegrationOptions& opt = {}) {
  require_interior(z, "log_modulus");
  if (!(tol > 0.0)) throw PreconditionError("log_modulus: tol must be positive");
  LogModulus out{Bracket::exact(0.0), false, 0};
  const auto& fs = f.zero_factors();
  const double share = fs.empty() ? 0.0 : 0.5 * tol / static_cast<double>(fs.size());
  for (const auto& zs : fs) {
    const auto s = detail::blaschke_log_sum(zs, z, share, kMaxBlaschkeTerms);
    out.zeros_used += s.used;
    if (s.at_zero) return LogModulus::zero_hit(out.zeros_used);
    if (s.tail > share) {
      throw TailInsufficient("log_modulus: certified Blaschke tail bound insufficient",
                             out.value.lo + s.log_sum - s.tail, out.value.hi + s.log_sum);
    }
    out.value = out.value + Bracket{s.log_sum - s.tail, s.log_sum};
  }
  if (!f.sigma().is_zero()) out.value = out.value + -f.sigma().poisson_integral(z, tol / 4.0, opt);
  out.value.hi = std::min(out.value.hi, 0.0);
  out.value.lo = std::min(out.value.lo, out.value.hi);
  return out;
}

/// Enclosure of log|Theta(z)| using exactly the first `k` zeros of every factor
/// (fewer when a factor has fewer); the tail bound may be large or infinite.
inline LogModulus log_modulus_truncated(const InnerFunction& f, const DiscPoint& z, std::size_t k,
                                        double sigma_tol = 1e-12,
                                        const IntegrationOptions& opt = {}) {
  require_interior(z, "log_modulus_truncated");
  LogModulus out{Bracket::exact(0.0), false, 0};
  for (const auto& zs : f.zero_factors()) {
    const auto s = detail::blaschke_log_sum(zs, z, -1.0, k);
    out.zeros_used += s.used;
    if (s.at_zero) return LogModulus::zero_hit(out.zeros_used);
    out.value = out.value + Bracket{s.log_sum - s.tail, s.log_sum};
  }
  if (!f.sigma().is_zero()) out.value = out.value + -f.sigma().poisson_integral(z, sigma_tol, opt);
  out.value.hi = std::min(out.value.hi, 0.0);
  out.value.lo = std::min(out.value.lo, out.value.hi);
  return out;
}

/// Complex value lambda * B_N(z) * S(z), with B truncated where the certified
/// tail of log|B| drops below tol/2.
inline Complex evaluate(const InnerFunction& f, const DiscPoint& z, double tol,
                        const IntegrationOptions& opt = {}) {
  require_interior(z, "evaluate");
  if (!(tol > 0.0)) throw PreconditionError("evaluate: tol must be positive");
  double log_mod = 0.0;
  Complex phase = f.lambda();
  const auto& fs = f.zero_factors();
  const double share = fs.empty() ? 0.0 : 0.5 * tol / static_cast<double>(fs.size());
  const Complex zv = z.value();
  for (const auto& zs : fs) {
    const auto s = detail::blaschke_log_sum(zs, z, share, kMaxBlaschkeTerms);
    if (s.at_zero) return 0.0;
    if (s.tail > share) {
      throw TailInsufficient("evaluate: certified Blaschke tail bound insufficient",
                             log_mod + s.log_sum - s.tail, log_mod + s.log_sum);
    }
    log_mod += s.log_sum;
    for (std::size_t j = 0; j < s.used; ++j) {
      const Complex factor = blaschke_factor(zs.zero(j), zv);
      const double a = std::abs(factor);
      if (a > 0.0) phase *= factor / a;
    }
  }
  if (!f.sigma().is_zero()) {
    const auto h = f.sigma().herglotz_integral(z, tol / 4.0, opt);
    log_mod += h.value.real();
    phase *= std::polar(1.0, h.value.imag());
  }
  return std::exp(log_mod) * phase;
}

/// mu(Theta) restricted to what has been materialized: every zero with
/// 1 - |z| >= horizon is listed; queries need squares of side > horizon.
class MuMeasure {
 public:
  struct ZeroAtom {
    DiscPoint z;
    double weight;
  };

  /// Mass of a Carleson square, split by certainty.
  struct SquareMass {
    double mass = 0.0;           // listed zeros + sigma of the closed boundary arc
    bool tail_possible = false;  // unlisted zeros may lie in the square
    bool tail_certain = false;   // unlisted zeros certainly lie in the square
    bool positive() const { return mass > 0.0 || tail_certain; }
    bool undecided() const { return mass == 0.0 && tail_possible && !tail_certain; }
  };

  MuMeasure(const InnerFunction& f, double horizon, std::size_t max_zeros = 20'000'000)
      : horizon_(horizon), sigma_(f.sigma()) {
    if (!(horizon > 0.0)) throw PreconditionError("mu: horizon must be positive");
    for (const auto& zs : f.zero_factors()) {
      const std::size_t avail = zs.available().value_or(std::numeric_limits<std::size_t>::max());
      std::size_t k = 0;
      for (; k < avail; ++k) {
        if (zs.tail_after(k) < horizon) break;
        const DiscPoint z = zs.zero(k);
        if (zs.ordered_by_modulus() && z.depth() < horizon) break;
        if (k >= max_zeros) {
          throw HorizonExceeded("mu: horizon needs more than " + std::to_string(max_zeros) +
                                " zeros");
        }
        atoms_.push_back({z, z.depth()});
      }
      if (k < avail || !zs.is_exhaustive()) {
        Tail t;
        t.angles = zs.accumulation_angles();
        t.window = zs.tail_window(k);
        t.infinite = !zs.available().has_value();
        t.mass = zs.tail_after(k);
        if (t.mass > 0.0) tails_.push_back(std::move(t));
      }
    }
    std::stable_sort(atoms_.begin(), atoms_.end(), [](const ZeroAtom& a, const ZeroAtom& b) {
      return key(a.z) < key(b.z);
    });
  }

  double horizon() const { return horizon_; }
  /// Listed zeros, sorted by angle in [0, 2pi).
  const std::vector<ZeroAtom>& zero_atoms() const { return atoms_; }
  const SingularMeasure& boundary_part() const { return sigma_; }

  SquareMass of_square(const CarlesonSquare& q) const {
    if (!(q.side() > horizon_)) {
      throw HorizonExceeded("mu: square side " + std::to_string(q.side()) +
                            " is below the materialized horizon " + std::to_string(horizon_));
    }
    SquareMass m;
    auto add_range = [&](double lo, double hi) {
      auto it = std::lower_bound(atoms_.begin(), atoms_.end(), lo,
                                 [](const ZeroAtom& a, double v) { return key(a.z) < v; });
      for (; it != atoms_.end() && key(it->z) <= hi; ++it) {
        if (q.member(it->z)) m.mass += it->weight;
      }
    };
    if (q.full_angle()) {
      add_range(-1.0, 2.0 * kTwoPi);
    } else {
      // candidates by angle, padded so rounding in the wrap cannot drop a member
      const auto arc = q.boundary_arc();
      const double pad = 1e-12;
      const double lo = wrap_positive(arc.center_angle - arc.half_width) - pad;
      const double hi = lo + 2.0 * arc.half_width + 2.0 * pad;
      add_range(lo, std::min(hi, kTwoPi + pad));
      if (hi > kTwoPi) add_range(-1.0, hi - kTwoPi);
      if (lo < 0.0) add_range(kTwoPi + lo, 2.0 * kTwoPi);
    }
    if (!sigma_.is_zero()) m.mass += sigma_.mass_of_arc(q.boundary_arc(), true);
    const auto arc = q.boundary_arc();
    for (const auto& t : tails_) {
      if (t.angles.empty()) m.tail_possible = true;
      for (double a : t.angles) {
        const double d = angular_distance(a, arc.center_angle);
        if (arc.full() || d <= arc.half_width + t.window) m.tail_possible = true;
        // infinitely many zeros within the window, all eventually deeper than any side
        if (t.infinite && (arc.full() || d + t.window <= arc.half_width)) m.tail_certain = true;
      }
    }
    return m;
  }

 private:
  struct Tail {
    std::vector<double> angles;
    double window = kPi;
    bool infinite = false;
    double mass = 0.0;
  };

  static double key(const DiscPoint& z) { return z.is_origin() ? 0.0 : wrap_positive(z.angle()); }

  double horizon_;
  std::vector<ZeroAtom> atoms_;
  std::vector<Tail> tails_;
  SingularMeasure sigma_;
};

}  // namespace onecomp
