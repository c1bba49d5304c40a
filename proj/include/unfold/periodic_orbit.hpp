#pragma once

#include "unfold/precision.hpp"

#include <string_view>
#include <vector>

namespace unfold {

enum class Stability { Attracting, Superstable, Repelling, Neutral };

std::string_view to_string(Stability s);

/// |m| <= 1e-10 is super-stable, |m| within 1e-6 of 1 is neutral.
template <class Real>
Stability classify_multiplier(const Real& multiplier) {
  using std::abs;
  const Real m = abs(multiplier);
  if (m <= Real(1e-10)) return Stability::Superstable;
  if (abs(m - 1) <= Real(1e-6)) return Stability::Neutral;
  return m < 1 ? Stability::Attracting : Stability::Repelling;
}

/// A cycle x_1 -> x_2 -> ... -> x_p -> x_1 of f_a with minimal period p.
template <class Real>
struct PeriodicOrbit {
  Real a;
  std::vector<Real> points;
  int period = 0;
  Real multiplier = 0;  ///< prod (-2a x_i)
  Stability stability = Stability::Repelling;
};

}  // namespace unfold
