#pragma once

// Example inner functions with known one-component status.

#include <memory>
#include <string>
#include <vector>

#include "onecomp/inner_function.hpp"

namespace onecomp::families {

/// Atoms 2^-n with masses 8^-n for n <= count, the rest as a tail accumulating at angle 0.
inline AtomicMeasure example_one_measure(int count = 60) {
  std::vector<Atom> atoms;
  for (int n = 1; n <= count; ++n) {
    atoms.push_back({std::ldexp(1.0, -n), std::ldexp(1.0, -3 * n)});
  }
  return AtomicMeasure(std::move(atoms), std::ldexp(1.0, -3 * count) / 7.0, {0.0});
}

inline InnerFunction single_atom() { return InnerFunction::singular(SingularMeasure::atom(0.0, 1.0)); }

inline InnerFunction two_atoms() {
  return InnerFunction::singular(AtomicMeasure({{0.0, 1.0}, {kPi, 1.0}}));
}

inline InnerFunction example_one() { return InnerFunction::singular(example_one_measure()); }

inline InnerFunction cantor() {
  return InnerFunction::singular(CantorMeasure(CantorGeometry::middle_thirds()));
}

inline InnerFunction radial() {
  return InnerFunction::blaschke(ZeroSequence::generated(
      std::make_shared<RadialZeros>(0.0, RadialZeros::Exponent::Linear)));
}

inline InnerFunction sparse() {
  return InnerFunction::blaschke(ZeroSequence::generated(
      std::make_shared<RadialZeros>(0.0, RadialZeros::Exponent::Square)));
}

/// (0.5 - z) / (1 - 0.5 z)
inline InnerFunction mobius() {
  return InnerFunction::blaschke(ZeroSequence::finite({DiscPoint::cartesian(0.5, 0.0)}));
}

struct Family {
  std::string name;
  InnerFunction f;
  bool one_component;
};

/// The six families with known status, in a fixed order.
inline std::vector<Family> seeded() {
  return {
      {"atom1", single_atom(), true},    {"atoms2", two_atoms(), true},
      {"cantor", cantor(), true},        {"radial", radial(), true},
      {"example1", example_one(), false}, {"sparse", sparse(), false},
  };
}

}  // namespace onecomp::families
