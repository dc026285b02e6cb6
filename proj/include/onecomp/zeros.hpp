#pragma once

// Zero sequences of Blaschke products: finite lists (optionally truncated from
// an infinite family, with a bound on the discarded Blaschke sum) and lazily
// evaluated infinite families.

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "onecomp/errors.hpp"
#include "onecomp/geometry.hpp"

namespace onecomp {

/// An infinite (or very long) zero family evaluated term by term.
///
/// Implementations must be pure: zero_at and tail_after may be called
/// concurrently and repeatedly with the same result.
class ZeroGenerator {
 public:
  virtual ~ZeroGenerator() = default;

  /// The j-th zero (0-based).
  virtual DiscPoint zero_at(std::size_t j) const = 0;
  /// Upper bound for the sum of 1 - |z_j| over j >= k.
  virtual double tail_after(std::size_t k) const = 0;
  /// Number of zeros, or nullopt for an infinite family.
  virtual std::optional<std::size_t> count() const { return std::nullopt; }
  /// Angles where the zeros accumulate.
  virtual std::vector<double> accumulation_angles() const = 0;
  /// Angular radius around the accumulation angles containing every zero j >= k.
  virtual double tail_window(std::size_t) const { return kPi; }
  virtual bool ordered_by_modulus() const { return false; }
  virtual std::shared_ptr<const ZeroGenerator> rotated(double alpha) const = 0;
};

/// Zeros on the ray at `angle` with 1 - |z_n| = 2^-n (linear) or 2^-(n^2) (square), n >= 1.
class RadialZeros final : public ZeroGenerator {
 public:
  enum class Exponent { Linear, Square };

  RadialZeros(double angle, Exponent e) : angle_(wrap_angle(angle)), exponent_(e) {}

  double angle() const { return angle_; }
  Exponent exponent() const { return exponent_; }

  DiscPoint zero_at(std::size_t j) const override {
    return DiscPoint::from_depth(depth(j + 1), angle_);
  }

  double tail_after(std::size_t k) const override {
    const double n = static_cast<double>(k + 1);  // first omitted index
    if (exponent_ == Exponent::Linear) return std::ldexp(1.0, -static_cast<int>(k));
    // consecutive terms shrink by at least 1/8 past n = 1
    const double e = std::min(n * n, 2000.0);
    return 8.0 / 7.0 * std::ldexp(1.0, -static_cast<int>(e));
  }

  std::vector<double> accumulation_angles() const override { return {angle_}; }
  double tail_window(std::size_t) const override { return 0.0; }
  bool ordered_by_modulus() const override { return true; }

  std::shared_ptr<const ZeroGenerator> rotated(double alpha) const override {
    return std::make_shared<RadialZeros>(angle_ + alpha, exponent_);
  }

 private:
  double depth(std::size_t n) const {
    const double nn = static_cast<double>(n);
    const double e = exponent_ == Exponent::Linear ? nn : std::min(nn * nn, 2000.0);
    // keep the point interior once 2^-e underflows
    return std::max(std::ldexp(1.0, -static_cast<int>(e)), std::numeric_limits<double>::denorm_min());
  }

  double angle_;
  Exponent exponent_;
};

/// Zeros of a Blaschke product, repeated according to multiplicity.
class ZeroSequence {
 public:
  static constexpr std::size_t kValidationTerms = 4096;

  ZeroSequence() = default;

  /// Finite list; `tail_sum` bounds the Blaschke sum of zeros left out of the list,
  /// and any such zeros lie within `tail_window` of the `accumulation` angles.
  static ZeroSequence finite(std::vector<DiscPoint> zeros, double tail_sum = 0.0,
                             std::vector<double> accumulation = {}, double tail_window = kPi) {
    if (!(tail_sum >= 0.0) || !std::isfinite(tail_sum)) {
      throw PreconditionError("zero sequence: tail Blaschke sum must be finite and >= 0");
    }
    for (std::size_t i = 0; i < zeros.size(); ++i) {
      if (!zeros[i].is_interior()) {
        throw DomainError("zero sequence: zero " + std::to_string(i) + " is not in the open disc");
      }
    }
    ZeroSequence s;
    s.listed_ = std::move(zeros);
    s.tail_sum_ = tail_sum;
    s.accumulation_ = std::move(accumulation);
    for (double& a : s.accumulation_) a = wrap_angle(a);
    s.tail_window_ = tail_sum > 0.0 ? tail_window : 0.0;
    s.suffix_.assign(s.listed_.size() + 1, 0.0);
    for (std::size_t i = s.listed_.size(); i-- > 0;) {
      s.suffix_[i] = s.suffix_[i + 1] + s.listed_[i].depth();
    }
    return s;
  }

  /// Generated family. The first terms are checked against the declared tail
  /// bounds, which rejects families violating the Blaschke condition.
  static ZeroSequence generated(std::shared_ptr<const ZeroGenerator> g) {
    if (!g) throw PreconditionError("zero sequence: null generator");
    const double total = g->tail_after(0);
    if (!(total >= 0.0) || !std::isfinite(total)) {
      throw PreconditionError("zero sequence: Blaschke sum bound must be finite");
    }
    const std::size_t n = std::min(kValidationTerms, g->count().value_or(kValidationTerms));
    double partial = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const DiscPoint z = g->zero_at(k);
      if (!z.is_interior()) {
        throw DomainError("zero sequence: generated zero " + std::to_string(k) +
                          " is not in the open disc");
      }
      partial += z.depth();
      if (partial + g->tail_after(k + 1) > total * (1.0 + 1e-9) + 1e-300) {
        throw PreconditionError("zero sequence: partial Blaschke sums exceed the declared bound "
                                "(Blaschke condition violated) at term " + std::to_string(k));
      }
    }
    ZeroSequence s;
    s.gen_ = std::move(g);
    return s;
  }

  bool is_generated() const { return static_cast<bool>(gen_); }
  const std::shared_ptr<const ZeroGenerator>& generator() const { return gen_; }
  const std::vector<DiscPoint>& listed() const { return listed_; }
  double listed_tail_sum() const { return tail_sum_; }

  /// Number of zeros that can be materialized (nullopt: unbounded).
  std::optional<std::size_t> available() const {
    if (gen_) return gen_->count();
    return listed_.size();
  }

  /// True when every zero is materializable (no unlisted remainder).
  bool is_exhaustive() const {
    return gen_ ? gen_->count().has_value() : tail_sum_ == 0.0;
  }

  bool empty() const { return !gen_ && listed_.empty() && tail_sum_ == 0.0; }

  DiscPoint zero(std::size_t j) const { return gen_ ? gen_->zero_at(j) : listed_.at(j); }

  /// Bound for the Blaschke sum of zeros j >= k, including the unlisted remainder.
  double tail_after(std::size_t k) const {
    if (gen_) return gen_->tail_after(k);
    const double listed = k < suffix_.size() ? suffix_[k] : 0.0;
    return (listed + tail_sum_) * (1.0 + 1e-12);
  }

  std::vector<double> accumulation_angles() const {
    return gen_ ? gen_->accumulation_angles() : accumulation_;
  }

  /// Angular radius around the accumulation angles containing zeros j >= k that
  /// are not materialized by index k.
  double tail_window(std::size_t k) const { return gen_ ? gen_->tail_window(k) : tail_window_; }

  bool ordered_by_modulus() const {
    if (gen_) return gen_->ordered_by_modulus();
    for (std::size_t i = 1; i < listed_.size(); ++i) {
      if (listed_[i].depth() > listed_[i - 1].depth()) return false;
    }
    return true;
  }

  /// First n zeros (all when n exceeds the available count).
  std::vector<DiscPoint> materialize(std::size_t n) const {
    const std::size_t m = std::min(n, available().value_or(n));
    std::vector<DiscPoint> out;
    out.reserve(m);
    for (std::size_t j = 0; j < m; ++j) out.push_back(zero(j));
    return out;
  }

  ZeroSequence rotated(double alpha) const {
    if (gen_) return generated(gen_->rotated(alpha));
    std::vector<DiscPoint> z;
    z.reserve(listed_.size());
    for (const auto& p : listed_) z.push_back(p.rotated(alpha));
    auto acc = accumulation_;
    for (double& a : acc) a += alpha;
    return finite(std::move(z), tail_sum_, std::move(acc), tail_window_);
  }

 private:
  std::vector<DiscPoint> listed_;
  std::vector<double> suffix_{0.0};
  double tail_sum_ = 0.0;
  std::vector<double> accumulation_;
  double tail_window_ = 0.0;
  std::shared_ptr<const ZeroGenerator> gen_;
};

/// Separation and Carleson box evidence for the first `horizon` zeros.
struct SeparationConstants {
  double separation;      // min pairwise pseudohyperbolic distance
  double box_constant;    // max over dyadic boxes of sum (1 - |z_j|) / (pi 2^-n)
};

inline SeparationConstants separation_constants(const ZeroSequence& zeros, std::size_t horizon) {
  const auto pts = zeros.materialize(horizon);
  if (pts.size() < 2) throw PreconditionError("separation_constants: need at least two zeros");
  double sep = 1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) sep = std::min(sep, pseudo_distance(pts[i], pts[j]));
  }
  double min_depth = 1.0;
  for (const auto& p : pts) min_depth = std::min(min_depth, p.depth());
  const int max_n = std::clamp(static_cast<int>(std::ceil(std::log2(kPi / min_depth))), 2, 60);
  double box = 0.0;
  std::vector<std::pair<long long, double>> hits;
  for (int n = 2; n <= max_n; ++n) {
    const double side = kPi * std::ldexp(1.0, -n);
    hits.clear();
    for (const auto& p : pts) {
      if (p.depth() <= side) hits.emplace_back(WhitneyBox::containing(p, n).index, p.depth());
    }
    std::sort(hits.begin(), hits.end());
    for (std::size_t i = 0; i < hits.size();) {
      double s = 0.0;
      std::size_t j = i;
      for (; j < hits.size() && hits[j].first == hits[i].first; ++j) s += hits[j].second;
      box = std::max(box, s / side);
      i = j;
    }
  }
  return {sep, box};
}

/// min over n < horizon of sum_{j > n} (1 - |z_j|) / (1 - |z_n|), zeros ordered by modulus.
inline double stolz_tail_ratio(const ZeroSequence& zeros, std::size_t horizon) {
  if (!zeros.ordered_by_modulus()) {
    throw PreconditionError("stolz_tail_ratio: zeros must be ordered by non-decreasing modulus");
  }
  const std::size_t n = std::min(horizon, zeros.available().value_or(horizon));
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    best = std::min(best, zeros.tail_after(k + 1) / zeros.zero(k).depth());
  }
  return std::isinf(best) ? 0.0 : best;
}

/// Trapezoidal approximation of int_0^{2pi} log+ sum_n (1 - |z_n|^2) / |e^{it} - z_n|^2 dt.
inline double ahern_clark_integral(const ZeroSequence& zeros, std::size_t quadrature_n) {
  if (!zeros.available()) {
    throw PreconditionError("ahern_clark_integral: needs a finite materialized zero list");
  }
  if (quadrature_n == 0) throw PreconditionError("ahern_clark_integral: need at least one node");
  const auto pts = zeros.materialize(*zeros.available());
  const double h = kTwoPi / static_cast<double>(quadrature_n);
  double sum = 0.0;
  for (std::size_t i = 0; i < quadrature_n; ++i) {
    const double t = h * static_cast<double>(i);
    double k = 0.0;
    for (const auto& z : pts) {
      const double s = std::sin((t - z.angle()) / 2.0);
      k += z.one_minus_mod_sq() / (z.depth() * z.depth() + 4.0 * z.modulus() * s * s);
    }
    sum += k > 1.0 ? std::log(k) : 0.0;
  }
  return h * sum;
}

}  // namespace onecomp
