#include <gtest/gtest.h>

#include <random>

#include "onecomp/inner_function.hpp"

using namespace onecomp;

namespace {

InnerFunction finite_blaschke(std::vector<Complex> zs) {
  std::vector<DiscPoint> pts;
  for (auto z : zs) pts.push_back(DiscPoint::from_complex(z));
  return InnerFunction::blaschke(ZeroSequence::finite(std::move(pts)));
}

InnerFunction radial(RadialZeros::Exponent e) {
  return InnerFunction::blaschke(ZeroSequence::generated(std::make_shared<RadialZeros>(0.0, e)));
}

double rho_complex(Complex a, Complex b) { return std::abs(a - b) / std::abs(1.0 - std::conj(a) * b); }

// Blaschke condition violated: 1 - |z_n| = 1/(n+2) but the declared sum is 5.
class HarmonicZeros final : public ZeroGenerator {
 public:
  DiscPoint zero_at(std::size_t j) const override {
    return DiscPoint::from_depth(1.0 / static_cast<double>(j + 2), 0.0);
  }
  double tail_after(std::size_t) const override { return 5.0; }
  std::vector<double> accumulation_angles() const override { return {0.0}; }
  std::shared_ptr<const ZeroGenerator> rotated(double) const override {
    return std::make_shared<HarmonicZeros>();
  }
};

// int log+ K(t) dt for one zero: K > 1 exactly on |t - arg z| < acos(|z|), where
// log K is smooth, so composite Simpson on that arc converges fast.
double ahern_clark_oracle(const DiscPoint& z, int panels) {
  const double r = z.modulus();
  const double t0 = std::acos(r);
  auto f = [&](double t) { return std::log((1.0 - r * r) / (1.0 - 2.0 * r * std::cos(t) + r * r)); };
  const double h = t0 / panels;
  double s = f(0.0) + f(t0);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return 2.0 * s * h / 3.0;
}

}  // namespace

TEST(LogModulus, Examples) {
  const auto b = finite_blaschke({0.5});
  EXPECT_NEAR(log_modulus(b, DiscPoint(), 1e-12).value.mid(), std::log(0.5), 1e-15);

  const auto b3 = finite_blaschke({{0.5, 0.1}, {-0.2, 0.7}, {0.0, -0.9}});
  const double expect =
      std::log(std::abs(Complex(0.5, 0.1))) + std::log(std::abs(Complex(-0.2, 0.7))) + std::log(0.9);
  EXPECT_NEAR(log_modulus(b3, DiscPoint(), 1e-12).value.mid(), expect, 1e-14);

  const auto s = InnerFunction::singular(SingularMeasure::atom(0.0, 1.0));
  EXPECT_NEAR(log_modulus(s, DiscPoint::cartesian(0.5, 0), 1e-12).value.mid(), -3.0, 1e-12);

  const auto hit = log_modulus(b, DiscPoint::cartesian(0.5, 0), 1e-12);
  EXPECT_TRUE(hit.at_zero);
  EXPECT_EQ(hit.upper_modulus(), 0.0);
  EXPECT_THROW(log_modulus(b, DiscPoint::cartesian(1.0, 0), 1e-9), DomainError);
}

TEST(LogModulus, TailInsufficientWhenTruncatedListIsTooCoarse) {
  // ten known zeros plus an unlisted remainder of Blaschke mass 1e-3
  std::vector<DiscPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(DiscPoint::polar(0.5, i));
  const auto f = InnerFunction::blaschke(ZeroSequence::finite(pts, 1e-3, {0.0}));
  EXPECT_NO_THROW(log_modulus(f, DiscPoint::cartesian(0.1, 0), 1e-2));
  EXPECT_THROW(log_modulus(f, DiscPoint::cartesian(0.999, 0), 1e-2), TailInsufficient);
}

TEST(Evaluate, Examples) {
  const auto id = finite_blaschke({0.0});
  const Complex v = evaluate(id, DiscPoint::cartesian(0, 0.3), 1e-12);
  EXPECT_NEAR(v.real(), 0.0, 1e-15);
  EXPECT_NEAR(v.imag(), 0.3, 1e-15);

  const auto s = InnerFunction::singular(SingularMeasure::atom(0.0, 1.0));
  const Complex sv = evaluate(s, DiscPoint::cartesian(0.5, 0), 1e-12);
  EXPECT_NEAR(sv.real(), std::exp(-3.0), 1e-14);
  EXPECT_NEAR(sv.imag(), 0.0, 1e-14);

  const auto b = finite_blaschke({{0.3, 0.4}, {-0.5, 0.0}});
  EXPECT_EQ(evaluate(b, DiscPoint::cartesian(0.3, 0.4), 1e-12), Complex(0.0, 0.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const auto z = DiscPoint::polar(std::sqrt(u(rng)), kTwoPi * u(rng));
    EXPECT_LE(std::abs(evaluate(b * s, z, 1e-10)), 1.0 + 1e-15);
  }
}

TEST(Evaluate, ProductOfFactorsIsProductOfValues) {
  const auto b = finite_blaschke({{0.3, 0.4}});
  const auto s = InnerFunction::singular(SingularMeasure::atom(1.0, 0.5));
  const auto z = DiscPoint::cartesian(-0.2, 0.6);
  const Complex lhs = evaluate(b * s, z, 1e-12);
  const Complex rhs = evaluate(b, z, 1e-12) * evaluate(s, z, 1e-12);
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
}

TEST(Invariants, BoundaryUnimodularityOfFiniteBlaschke) {
  const std::vector<std::vector<Complex>> sets{
      {0.5}, {0.0, 0.5}, {{0.9, 0.1}, {-0.3, -0.3}, {0.0, 0.99}}, {{0.999, 0.0}, {0.5, 0.5}}};
  for (const auto& zs : sets) {
    for (int i = 0; i < 1024; ++i) {
      const Complex w = std::polar(1.0, kTwoPi * i / 1024.0);
      Complex p = 1.0;
      for (auto z : zs) p *= blaschke_factor(DiscPoint::from_complex(z), w);
      EXPECT_NEAR(std::abs(p), 1.0, 1e-12);
    }
  }
}

TEST(Invariants, SchwarzPickContraction) {
  const auto f = finite_blaschke({{0.5, 0.1}, {-0.2, 0.7}, 0.0}) *
                 InnerFunction::singular(SingularMeasure::atom(2.0, 0.3));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const auto z = DiscPoint::polar(0.99 * std::sqrt(u(rng)), kTwoPi * u(rng));
    const auto w = DiscPoint::polar(0.99 * std::sqrt(u(rng)), kTwoPi * u(rng));
    const Complex fz = evaluate(f, z, 1e-13);
    const Complex fw = evaluate(f, w, 1e-13);
    EXPECT_LE(rho_complex(fz, fw), pseudo_distance(z, w) + 1e-10);
  }
}

TEST(Invariants, ModulusIdentity) {
  const auto f = radial(RadialZeros::Exponent::Linear) *
                 InnerFunction::singular(SingularMeasure::atom(2.0, 0.3));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double tol = 1e-9;
  for (int i = 0; i < 300; ++i) {
    const auto z = DiscPoint::from_depth(std::pow(10.0, -3.0 * u(rng)), kTwoPi * u(rng));
    const auto lm = log_modulus(f, z, tol);
    EXPECT_NEAR(std::log(std::abs(evaluate(f, z, tol))), lm.value.mid(), 2 * tol);
  }
}

TEST(Invariants, CertifiedTailContainsDoubledTruncation) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto e : {RadialZeros::Exponent::Linear, RadialZeros::Exponent::Square}) {
    const auto f = radial(e);
    for (int i = 0; i < 300; ++i) {
      const auto z = DiscPoint::from_depth(std::pow(10.0, -6.0 * u(rng)), 0.2 * (u(rng) - 0.5));
      const std::size_t k = 1 + static_cast<std::size_t>(40 * u(rng));
      const auto a = log_modulus_truncated(f, z, k);
      const auto b = log_modulus_truncated(f, z, 2 * k);
      if (a.at_zero || b.at_zero) continue;
      EXPECT_LE(a.value.lo, b.value.hi);
      EXPECT_LE(b.value.hi, a.value.hi);
    }
  }
}

TEST(ZeroSequence, RejectsBlaschkeViolation) {
  EXPECT_THROW(ZeroSequence::generated(std::make_shared<HarmonicZeros>()), PreconditionError);
  EXPECT_NO_THROW(ZeroSequence::generated(
      std::make_shared<RadialZeros>(0.0, RadialZeros::Exponent::Square)));
  EXPECT_THROW(ZeroSequence::finite({DiscPoint::cartesian(1.0, 0.0)}), DomainError);
  EXPECT_THROW(ZeroSequence::finite({}, -1.0), PreconditionError);
}

TEST(Mu, Examples) {
  const auto b = finite_blaschke({0.9});
  const MuMeasure mb(b, 1e-6);
  EXPECT_NEAR(mb.of_square(CarlesonSquare::of(DiscPoint::cartesian(0.9, 0))).mass, 0.1, 1e-15);

  const auto s = InnerFunction::singular(SingularMeasure::atom(0.0, 1.0));
  const MuMeasure ms(s, 1e-9);
  for (double r : {0.1, 0.5, 0.9, 0.99999}) {
    EXPECT_EQ(ms.of_square(CarlesonSquare::of(DiscPoint::cartesian(r, 0))).mass, 1.0);
  }

  const auto off = InnerFunction::blaschke(ZeroSequence::finite({DiscPoint::polar(0.9, 1.0)}));
  const MuMeasure mo(off, 1e-6);
  EXPECT_EQ(mo.of_square(CarlesonSquare::of(DiscPoint::cartesian(0.9, 0))).mass, 0.0);

  EXPECT_THROW(mb.of_square(CarlesonSquare::of(DiscPoint::from_depth(1e-7, 0.0))), HorizonExceeded);
}

TEST(Mu, RadialTailIsCertainOnTheRay) {
  const auto f = radial(RadialZeros::Exponent::Square);
  const MuMeasure m(f, 1e-5);
  const auto on_ray = m.of_square(CarlesonSquare::of(DiscPoint::from_depth(1e-4, 3e-5)));
  EXPECT_TRUE(on_ray.positive());
  const auto away = m.of_square(CarlesonSquare::of(DiscPoint::from_depth(1e-4, 1e-3)));
  EXPECT_FALSE(away.positive());
  EXPECT_FALSE(away.undecided());
}

TEST(Separation, Examples) {
  const auto zs = ZeroSequence::finite({DiscPoint(), DiscPoint::cartesian(0.5, 0)});
  EXPECT_NEAR(separation_constants(zs, 10).separation, 0.5, 1e-15);

  const auto rad = ZeroSequence::generated(
      std::make_shared<RadialZeros>(0.0, RadialZeros::Exponent::Linear));
  double prev = 1.0;
  for (std::size_t n : {4, 8, 16, 32}) {
    const double d = separation_constants(rad, n).separation;
    // consecutive pair n-1, n: (2^-n) / (3 * 2^-n - 2^-2n) -> 1/3 from above
    const double m = std::ldexp(1.0, -static_cast<int>(n) + 1);
    const double closed = (m / 2.0) / (1.5 * m - m * m / 2.0);
    EXPECT_NEAR(d, closed, 1e-12);
    EXPECT_GT(d, 1.0 / 3.0);
    EXPECT_LE(d, prev);
    prev = d;
  }
  EXPECT_THROW(separation_constants(ZeroSequence::finite({DiscPoint()}), 5), PreconditionError);
}

TEST(StolzTailRatio, Examples) {
  const auto lin = ZeroSequence::generated(
      std::make_shared<RadialZeros>(0.0, RadialZeros::Exponent::Linear));
  EXPECT_NEAR(stolz_tail_ratio(lin, 40), 1.0, 1e-12);
  const auto sq = ZeroSequence::generated(
      std::make_shared<RadialZeros>(0.0, RadialZeros::Exponent::Square));
  EXPECT_LT(stolz_tail_ratio(sq, 20), 1e-9);
  EXPECT_GT(stolz_tail_ratio(sq, 2), stolz_tail_ratio(sq, 4));
  const auto fin = ZeroSequence::finite({DiscPoint::cartesian(0.5, 0), DiscPoint::cartesian(0.9, 0)});
  EXPECT_EQ(stolz_tail_ratio(fin, 10), 0.0);
}

TEST(AhernClark, Examples) {
  EXPECT_EQ(ahern_clark_integral(ZeroSequence::finite({}), 64), 0.0);
  EXPECT_NEAR(ahern_clark_integral(ZeroSequence::finite({DiscPoint()}), 64), 0.0, 1e-15);
  const auto z = DiscPoint::cartesian(0.9, 0);
  const double trap = ahern_clark_integral(ZeroSequence::finite({z}), 1 << 16);
  EXPECT_NEAR(trap, ahern_clark_oracle(z, 1 << 14), 1e-6);
}
