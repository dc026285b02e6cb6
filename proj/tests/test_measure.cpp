#include <gtest/gtest.h>

#include <random>

#include "onecomp/measure.hpp"

using namespace onecomp;

namespace {

SingularMeasure middle_thirds() { return CantorMeasure(CantorGeometry::middle_thirds()); }

SingularMeasure example_one(int n_atoms = 60) {
  std::vector<Atom> atoms;
  double tail = 0.0;
  for (int n = 1; n <= n_atoms; ++n) atoms.push_back({std::ldexp(1.0, -n), std::ldexp(1.0, -3 * n)});
  for (int n = n_atoms + 1; n <= n_atoms + 40; ++n) tail += std::ldexp(1.0, -3 * n);
  return AtomicMeasure(std::move(atoms), tail, {0.0});
}

// Riemann-Stieltjes sum over all generation-n Cantor intervals, evaluated at
// interval midpoints; error shrinks like the interval length.
double cantor_poisson_oracle(const CantorGeometry& g, const DiscPoint& z, int n) {
  const auto starts = g.interval_starts(n);
  const double len = static_cast<double>(g.interval_length(n));
  const double mass = std::ldexp(1.0, -n);
  double s = 0.0;
  for (long double a : starts) {
    const Complex xi = std::polar(1.0, static_cast<double>(a) + len / 2 + g.offset());
    const Complex zz = z.value();
    s += mass * (1.0 - std::norm(zz)) / std::norm(zz - xi);
  }
  return s;
}

}  // namespace

TEST(MassOfArc, Examples) {
  const auto atom = SingularMeasure::atom(0.0, 1.0);
  EXPECT_EQ(atom.mass_of_arc({0.0, 0.1}, true), 1.0);
  EXPECT_EQ(atom.mass_of_arc({0.1, 0.1}, true), 1.0);
  EXPECT_EQ(atom.mass_of_arc({0.1, 0.1}, false), 0.0);
  EXPECT_EQ(atom.mass_of_arc({2.0, 0.5}, true), 0.0);

  const auto cantor = middle_thirds();
  // endpoints nudged into the adjacent gaps: the Cantor function is only
  // Hoelder continuous, so a rounded endpoint inside E costs ~1e-10 of mass
  EXPECT_NEAR(cantor.mass_of_arc(BoundaryArc::between(0.0, kTwoPi / 3 + 1e-9), true), 0.5, 1e-14);
  EXPECT_NEAR(cantor.mass_of_arc(BoundaryArc::between(2 * kTwoPi / 3 - 1e-9, kTwoPi), true), 0.5,
              1e-14);
  EXPECT_EQ(cantor.mass_of_arc(BoundaryArc::between(2.3, 4.0), true), 0.0);
  EXPECT_NEAR(cantor.mass_of_arc({0.0, kPi}, true), 1.0, 1e-15);
}

TEST(MassOfArc, CantorGenerationConsistency) {
  const CantorGeometry g = CantorGeometry::middle_thirds();
  const SingularMeasure s = CantorMeasure(g);
  for (int n = 0; n <= 10; ++n) {
    const auto starts = g.interval_starts(n);
    const auto child_starts = g.interval_starts(n + 1);
    const double len = static_cast<double>(g.interval_length(n));
    const double clen = static_cast<double>(g.interval_length(n + 1));
    double total = 0.0;
    for (std::size_t i = 0; i < starts.size(); ++i) {
      const double a = static_cast<double>(starts[i]);
      // gaps at these generations are far wider than the padding; 0 and 2pi
      // are the same point of E, so those ends are left alone
      auto padded = [](double lo, double hi) {
        constexpr double pad = 1e-9;
        return BoundaryArc::between(lo > 0.0 ? lo - pad : lo, hi < kTwoPi - 1e-12 ? hi + pad : hi);
      };
      const double m = s.mass_of_arc(padded(a, a + len));
      EXPECT_NEAR(m, std::ldexp(1.0, -n), 1e-13);
      double kids = 0.0;
      for (std::size_t c = 2 * i; c < 2 * i + 2; ++c) {
        const double ca = static_cast<double>(child_starts[c]);
        kids += s.mass_of_arc(padded(ca, ca + clen));
      }
      EXPECT_NEAR(kids, m, 1e-13);
      total += m;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(MassOfArc, AdditivityAndMonotonicity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::vector<SingularMeasure> measures{
      middle_thirds(), example_one(),
      SingularMeasure(AtomicMeasure({{0.3, 0.5}, {2.0, 0.25}, {-1.0, 1.5}})),
      SingularMeasure(CdfMeasure({{0.0, 0.0}, {1.0, 0.5}, {4.0, 0.5}, {kTwoPi, 2.0}}))};
  for (const auto& s : measures) {
    for (int trial = 0; trial < 200; ++trial) {
      const double start = u(rng) * kTwoPi;
      std::vector<double> cuts{0.0, kTwoPi};
      for (int k = 0; k < 5; ++k) cuts.push_back(u(rng) * kTwoPi);
      std::sort(cuts.begin(), cuts.end());
      double sum = 0.0;
      for (std::size_t k = 1; k < cuts.size(); ++k) {
        // half-open pieces: closed on the left piece only through the first arc
        sum += s.mass_of_arc(BoundaryArc::between(start + cuts[k - 1], start + cuts[k]),
                             k == 1);
      }
      EXPECT_NEAR(sum, s.total_mass() - (s.parts().size() == 1 &&
                                                 std::holds_alternative<AtomicMeasure>(s.parts()[0])
                                             ? std::get<AtomicMeasure>(s.parts()[0]).tail_mass()
                                             : 0.0),
                  1e-12);
      const double a = u(rng) * kTwoPi;
      const double w1 = u(rng);
      const double w2 = w1 + u(rng);
      EXPECT_LE(s.mass_of_arc({a, w1}), s.mass_of_arc({a, w2}) + 1e-15);
    }
  }
}

TEST(MassOfArc, PrecisionExhaustedAtShallowCap) {
  const SingularMeasure s = CantorMeasure(CantorGeometry::middle_thirds(4));
  EXPECT_THROW(s.mass_of_arc(BoundaryArc::between(0.01, 1.0), true, 1e-12), PrecisionExhausted);
}

TEST(PoissonIntegral, Examples) {
  const auto atom = SingularMeasure::atom(0.0, 1.0);
  EXPECT_NEAR(atom.poisson_integral(DiscPoint(), 1e-12).mid(), 1.0, 1e-15);
  EXPECT_NEAR(atom.poisson_integral(DiscPoint::cartesian(0.5, 0), 1e-12).mid(), 3.0, 1e-14);
  EXPECT_NEAR(middle_thirds().poisson_integral(DiscPoint(), 1e-10).mid(), 1.0, 1e-10);
  EXPECT_THROW(atom.poisson_integral(DiscPoint::cartesian(1.0, 0), 1e-9), DomainError);
}

TEST(PoissonIntegral, UniformCdfIsHarmonicConstant) {
  const SingularMeasure s = CdfMeasure({{0.0, 0.0}, {kTwoPi, 1.0}});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const auto z = DiscPoint::polar(0.95 * u(rng), kTwoPi * u(rng));
    const auto b = s.poisson_integral(z, 1e-8);
    EXPECT_LE(b.width(), 2e-8);
    EXPECT_TRUE(b.contains(1.0));
  }
}

TEST(PoissonIntegral, CantorMatchesRiemannStieltjesOracle) {
  const CantorGeometry g = CantorGeometry::middle_thirds();
  const SingularMeasure s = CantorMeasure(g);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const auto z = DiscPoint::polar(0.9 * std::sqrt(u(rng)), kTwoPi * u(rng));
    const auto b = s.poisson_integral(z, 1e-9);
    const double oracle = cantor_poisson_oracle(g, z, 16);
    EXPECT_NEAR(b.mid(), oracle, 1e-6) << "z = " << z.re() << "," << z.im();
  }
}

TEST(PoissonIntegral, LinearityOnRandomPoints) {
  const auto a = example_one();
  const auto b = middle_thirds();
  const auto sum = a + b;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const auto z = DiscPoint::polar(0.99 * u(rng), kTwoPi * u(rng));
    const double tol = 1e-9;
    EXPECT_NEAR(sum.poisson_integral(z, tol).mid(),
                a.poisson_integral(z, tol).mid() + b.poisson_integral(z, tol).mid(), 4 * tol);
  }
}

TEST(PoissonIntegral, LowerBoundByArcMassOverDepth) {
  // P[sigma](z) >= 0.8 sigma(I(z)) / (1 - |z|), I(z) the closed arc of length 1 - |z| centered at z/|z|:
  // on I(z) the kernel is at least (2 - d) d / (d^2 + d^2 / 4) >= 0.8 / d for d <= 1.
  const std::vector<SingularMeasure> measures{middle_thirds(), example_one(),
                                              SingularMeasure::atom(1.0, 2.0)};
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& s : measures) {
    for (int i = 0; i < 200; ++i) {
      const double d = std::pow(10.0, -4.0 * u(rng));
      const auto z = DiscPoint::from_depth(d, kTwoPi * u(rng));
      const double arc_mass = s.mass_of_arc({z.angle(), d / 2.0}, true);
      EXPECT_GE(s.poisson_integral(z, 1e-3).hi, 0.8 * arc_mass / d);
    }
  }
}

TEST(PoissonIntegral, ExampleOneUpperBound) {
  const auto s = example_one();
  // sum alpha_n theta_n^-2 = sum 2^-n = 1
  for (int k = 1; k <= 30; ++k) {
    const double d = std::ldexp(1.0, -k);
    const auto r = DiscPoint::from_depth(d, 0.0);
    EXPECT_LE(s.poisson_integral(r, 1e-12).hi, 3.0 * d * (2.0 - d) * 1.0);
  }
}

TEST(HerglotzIntegral, ExamplesAndIdentity) {
  const auto atom = SingularMeasure::atom(0.0, 1.0);
  const auto h0 = atom.herglotz_integral(DiscPoint(), 1e-12);
  EXPECT_NEAR(h0.value.real(), -1.0, 1e-15);
  const auto h = atom.herglotz_integral(DiscPoint::cartesian(0.5, 0), 1e-12);
  EXPECT_NEAR(h.value.real(), -3.0, 1e-14);
  EXPECT_NEAR(h.value.imag(), 0.0, 1e-14);

  const std::vector<SingularMeasure> measures{middle_thirds(), example_one(),
                                              SingularMeasure(CdfMeasure({{0.0, 0.0}, {1.0, 1.0}}))};
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double tol = 1e-8;
  for (const auto& s : measures) {
    EXPECT_NEAR(s.herglotz_integral(DiscPoint(), tol).value.real(), -s.total_mass(), 2 * tol);
    for (int i = 0; i < 50; ++i) {
      const auto z = DiscPoint::polar(0.98 * u(rng), kTwoPi * u(rng));
      EXPECT_NEAR(s.herglotz_integral(z, tol).value.real() + s.poisson_integral(z, tol).mid(), 0.0,
                  2 * tol);
    }
  }
}

TEST(DensityLiminf, Examples) {
  const auto grid = SingularMeasure::default_density_grid();
  const double alpha = 0.3;
  const auto atom = SingularMeasure::atom(1.0, alpha);
  EXPECT_GE(atom.density_liminf(1.0, grid), alpha / grid.front());

  // Cantor: at generation endpoints the ratio grows as h shrinks.
  const auto cantor = middle_thirds();
  const double coarse = cantor.density_liminf(0.0, {0.1});
  const double fine = cantor.density_liminf(0.0, {1e-5});
  EXPECT_GT(fine, 10.0 * coarse);

  // Example 1 at the accumulation point: the ratio decays.
  const auto ex = example_one();
  EXPECT_LT(ex.density_liminf(0.0, grid), 1e-3);
  EXPECT_LT(ex.density_liminf(0.0, {1e-6}), ex.density_liminf(0.0, {1e-2}));
}

TEST(CdfMeasure, RejectsNonMonotoneSamples) {
  EXPECT_THROW(CdfMeasure({{0.0, 0.0}, {1.0, 0.5}, {2.0, 0.4}}), PreconditionError);
  EXPECT_THROW(CdfMeasure({{0.0, 0.0}, {1.0, 0.5}, {1.0, 0.6}}), PreconditionError);
  EXPECT_THROW(CdfMeasure({{0.0, 0.0}}), PreconditionError);
}
