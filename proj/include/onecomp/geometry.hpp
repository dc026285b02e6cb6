#pragma once

// Hyperbolic and Carleson geometry of the unit disc.
//
// Points are stored in polar form with the *depth* 1 - |z| kept explicitly, so
// that quantities such as 1 - |z|^2 and |1 - conj(z) w| stay accurate for points
// within 1e-15 of the circle.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "onecomp/errors.hpp"

namespace onecomp {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduce an angle to (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// Reduce an angle to [0, 2pi).
inline double wrap_positive(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

/// Distance between two angles measured along the circle, in [0, pi].
inline double angular_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

/// Euclidean distance between e^{ia} and e^{ib}.
inline double chord_from_angle(double angular) {
  return 2.0 * std::sin(std::min(angular, kPi) / 2.0);
}

class DiscPoint {
 public:
  DiscPoint() = default;

  /// Keeps re and im as given, so that points read from text print back unchanged.
  static DiscPoint cartesian(double re, double im) {
    const double m = std::hypot(re, im);
    DiscPoint p(1.0 - m, m == 0.0 ? 0.0 : std::atan2(im, re));
    p.cartesian_ = true;
    p.re_ = re;
    p.im_ = im;
    return p;
  }
  static DiscPoint from_complex(Complex z) { return cartesian(z.real(), z.imag()); }
  static DiscPoint polar(double modulus, double angle) { return DiscPoint(1.0 - modulus, angle); }
  /// Point with 1 - |z| = depth; exact for depths far below machine epsilon.
  static DiscPoint from_depth(double depth, double angle) { return DiscPoint(depth, angle); }

  double depth() const { return depth_; }
  double modulus() const { return 1.0 - depth_; }
  double angle() const { return angle_; }
  double re() const { return cartesian_ ? re_ : modulus() * std::cos(angle_); }
  double im() const { return cartesian_ ? im_ : modulus() * std::sin(angle_); }
  Complex value() const { return cartesian_ ? Complex(re_, im_) : std::polar(modulus(), angle_); }

  /// 1 - |z|^2 without cancellation.
  double one_minus_mod_sq() const { return depth_ * (2.0 - depth_); }

  bool is_interior() const { return depth_ > 0.0 && depth_ <= 1.0; }
  bool is_origin() const { return depth_ == 1.0; }

  DiscPoint rotated(double alpha) const {
    return is_origin() ? *this : DiscPoint(depth_, wrap_angle(angle_ + alpha));
  }

  friend bool operator==(const DiscPoint& a, const DiscPoint& b) {
    return a.depth_ == b.depth_ && (a.is_origin() || a.angle_ == b.angle_);
  }

 private:
  DiscPoint(double depth, double angle)
      : depth_(depth), angle_(depth == 1.0 ? 0.0 : wrap_angle(angle)) {}

  double depth_ = 1.0;
  double angle_ = 0.0;
  bool cartesian_ = false;
  double re_ = 0.0, im_ = 0.0;
};

inline void require_interior(const DiscPoint& z, const char* what) {
  if (!(z.depth() > 0.0) || z.depth() > 1.0) {
    throw DomainError(std::string(what) + ": point is not in the open unit disc");
  }
}

/// Squared pseudohyperbolic distance, split into numerator and denominator:
/// rho^2 = num / den with num = |z-w|^2 and den = |1 - conj(z) w|^2.
struct RhoParts {
  double num;
  double den;
};

inline RhoParts rho_parts(const DiscPoint& z, const DiscPoint& w) {
  const double s = std::sin((z.angle() - w.angle()) / 2.0);
  const double cross = 4.0 * z.modulus() * w.modulus() * s * s;
  const double dd = z.depth() - w.depth();
  const double one_minus_rr = z.depth() + w.depth() - z.depth() * w.depth();
  return {dd * dd + cross, one_minus_rr * one_minus_rr + cross};
}

/// rho(z, w) = |(z - w) / (1 - conj(z) w)|.
inline double pseudo_distance(const DiscPoint& z, const DiscPoint& w) {
  require_interior(z, "pseudo_distance");
  require_interior(w, "pseudo_distance");
  const auto p = rho_parts(z, w);
  return std::sqrt(p.num / p.den);
}

/// log rho(z, w), accurate both when rho is tiny and when rho is close to 1.
inline double log_pseudo_distance(const DiscPoint& z, const DiscPoint& w) {
  const auto p = rho_parts(z, w);
  if (p.num == 0.0) return -std::numeric_limits<double>::infinity();
  const double one_minus = z.one_minus_mod_sq() * w.one_minus_mod_sq() / p.den;
  if (one_minus < 0.5) return 0.5 * std::log1p(-one_minus);
  return 0.5 * std::log(p.num / p.den);
}

/// Closed arc of the circle: angles within half_width of center_angle.
struct BoundaryArc {
  double center_angle = 0.0;
  double half_width = kPi;

  static BoundaryArc between(double lo, double hi) {
    return {wrap_angle((lo + hi) / 2.0), (hi - lo) / 2.0};
  }
  double length() const { return 2.0 * half_width; }
  double lo() const { return center_angle - half_width; }
  double hi() const { return center_angle + half_width; }
  bool full() const { return half_width >= kPi; }
  bool contains(double angle) const {
    return full() || angular_distance(angle, center_angle) <= half_width;
  }
};

/// Carleson square Q(z) = { w : |arg z - arg w| <= (1-|z|)/2, |w| >= |z| } and its dilates.
class CarlesonSquare {
 public:
  static CarlesonSquare of(const DiscPoint& z) {
    require_interior(z, "carleson_square");
    if (z.is_origin()) return CarlesonSquare(0.0, kPi, 1.0, true);
    return CarlesonSquare(z.angle(), z.depth() / 2.0, z.depth(), false);
  }

  double center_angle() const { return center_; }
  double side() const { return full_ ? 1.0 : 2.0 * half_width_; }
  double base_modulus() const { return 1.0 - depth_limit_; }
  /// Largest 1 - |w| admitted.
  double depth_limit() const { return depth_limit_; }
  bool full_angle() const { return full_ || half_width_ >= kPi; }

  BoundaryArc boundary_arc() const {
    return full_angle() ? BoundaryArc{0.0, kPi} : BoundaryArc{center_, half_width_};
  }

  /// Membership for closed-disc points (depth 0 allowed).
  bool member(const DiscPoint& w) const {
    if (w.depth() > depth_limit_) return false;
    if (full_angle()) return true;
    if (w.is_origin()) return false;
    return angular_distance(w.angle(), center_) <= half_width_;
  }

  CarlesonSquare dilate(double lambda) const {
    if (!(lambda >= 1.0)) throw PreconditionError("dilate: factor must be >= 1");
    if (full_) return *this;
    return CarlesonSquare(center_, half_width_ * lambda, std::min(1.0, depth_limit_ * lambda),
                          false);
  }

  CarlesonSquare(double center, double half_width, double depth_limit, bool full)
      : center_(wrap_angle(center)), half_width_(half_width), depth_limit_(depth_limit),
        full_(full) {}

 private:
  double center_;
  double half_width_;
  double depth_limit_;
  bool full_;
};

/// Dyadic Carleson box Q_{n,k} = { re^{it}: 1 - pi 2^-n <= r < 1, 2 pi k 2^-n <= t < 2 pi (k+1) 2^-n }.
struct WhitneyBox {
  int depth = 2;
  long long index = 0;

  double outer_depth() const { return kPi * std::ldexp(1.0, -depth); }   // 1 - r at the bottom
  double top_half_depth() const { return kPi * std::ldexp(1.0, -depth - 1); }
  double angle_lo() const { return kTwoPi * std::ldexp(static_cast<double>(index), -depth); }
  double angle_hi() const { return kTwoPi * std::ldexp(static_cast<double>(index + 1), -depth); }

  /// Center of the top half T(Q_{n,k}).
  DiscPoint top_center() const {
    return DiscPoint::from_depth(0.75 * outer_depth(), (angle_lo() + angle_hi()) / 2.0);
  }

  bool contains(const DiscPoint& z) const {
    if (!(z.depth() > 0.0) || z.depth() > outer_depth()) return false;
    const double t = wrap_positive(z.angle());
    return t >= angle_lo() && t < angle_hi();
  }
  bool in_top_half(const DiscPoint& z) const {
    return contains(z) && z.depth() >= top_half_depth();
  }

  /// Box of the given depth containing z (angles on boundaries go to the lower index).
  static WhitneyBox containing(const DiscPoint& z, int depth) {
    const double t = wrap_positive(z.angle());
    const long long count = 1LL << depth;
    long long k = static_cast<long long>(std::floor(t / kTwoPi * static_cast<double>(count)));
    k = std::clamp(k, 0LL, count - 1);
    return {depth, k};
  }
};

/// Stolz angle { z : |z - e^{i theta}| < aperture (1 - |z|) }, aperture > 1.
struct StolzAngle {
  double vertex_angle = 0.0;
  double aperture = 2.0;

  bool contains(const DiscPoint& z) const {
    const double s = std::sin((z.angle() - vertex_angle) / 2.0);
    const double dist_sq = z.depth() * z.depth() + 4.0 * z.modulus() * s * s;
    const double bound = aperture * z.depth();
    return dist_sq < bound * bound;
  }
};

}  // namespace onecomp
