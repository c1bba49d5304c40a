#pragma once

// Sign-change scanning and bisection for scalar functions of one parameter.

#include <algorithm>
#include <cmath>
#include <vector>

namespace unfold {

template <class Real>
struct Bracket {
  Real lo;
  Real hi;
  Real g_lo;
  Real g_hi;
  bool exact() const { return g_lo == 0 || g_hi == 0; }
};

/// Samples g at `samples` equally spaced points of [lo, hi] (endpoints
/// included) and returns every adjacent pair with a strict sign change, plus
/// degenerate brackets [x, x] at samples where g vanishes exactly.
template <class Real, class G>
std::vector<Bracket<Real>> scan_sign_changes(G&& g, const Real& lo, const Real& hi, int samples) {
  std::vector<Bracket<Real>> out;
  samples = std::max(samples, 2);
  const Real step = (hi - lo) / (samples - 1);
  Real x_prev = lo;
  Real g_prev = g(lo);
  if (g_prev == 0) out.push_back({lo, lo, g_prev, g_prev});
  for (int i = 1; i < samples; ++i) {
    const Real x = i == samples - 1 ? hi : lo + step * i;
    const Real gx = g(x);
    if (gx == 0) {
      out.push_back({x, x, gx, gx});
    } else if (g_prev != 0 && ((g_prev < 0) != (gx < 0))) {
      out.push_back({x_prev, x, g_prev, gx});
    }
    x_prev = x;
    g_prev = gx;
  }
  return out;
}

enum class Side { Below, Above, Both };

/// Sign-change brackets within `half_width` of `center` on the requested
/// side, ordered by distance of their nearer end from the center.
template <class Real, class G>
std::vector<Bracket<Real>> brackets_near(G&& g, const Real& center, const Real& half_width, Side side,
                                         int samples_per_side, const Real& floor_lo, const Real& ceil_hi) {
  using std::abs;
  std::vector<Bracket<Real>> out;
  if (side != Side::Above) {
    const Real lo = std::max<Real>(center - half_width, floor_lo);
    auto below = scan_sign_changes<Real>(g, lo, center, samples_per_side);
    out.insert(out.end(), below.begin(), below.end());
  }
  if (side != Side::Below && center < ceil_hi) {
    const Real hi = std::min<Real>(center + half_width, ceil_hi);
    auto above = scan_sign_changes<Real>(g, center, hi, samples_per_side);
    for (const auto& b : above) {
      // The center sample is shared by both scans.
      if (side == Side::Both && b.lo == center && b.hi == center) continue;
      out.push_back(b);
    }
  }
  auto distance = [&](const Bracket<Real>& b) {
    if (b.lo <= center && center <= b.hi) return Real(0);
    return std::min<Real>(abs(b.lo - center), abs(b.hi - center));
  };
  std::stable_sort(out.begin(), out.end(),
                   [&](const Bracket<Real>& l, const Bracket<Real>& r) { return distance(l) < distance(r); });
  return out;
}

/// Bisects a sign-change bracket down to adjacent representable numbers
/// (or to width `tol`, whichever comes first). Returns the endpoint with the
/// smaller |g|.
template <class Real, class G>
Real bisect(G&& g, Bracket<Real> b, const Real& tol = Real(0)) {
  using std::abs;
  if (b.g_lo == 0) return b.lo;
  if (b.g_hi == 0) return b.hi;
  for (int it = 0; it < 400; ++it) {
    const Real mid = b.lo + (b.hi - b.lo) / 2;
    if (mid <= b.lo || mid >= b.hi || b.hi - b.lo <= tol) break;
    const Real gm = g(mid);
    if (gm == 0) return mid;
    if ((gm < 0) == (b.g_lo < 0)) {
      b.lo = mid;
      b.g_lo = gm;
    } else {
      b.hi = mid;
      b.g_hi = gm;
    }
  }
  return abs(b.g_lo) <= abs(b.g_hi) ? b.lo : b.hi;
}

}  // namespace unfold
