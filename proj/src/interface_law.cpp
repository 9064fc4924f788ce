#include "mpjr/interface_law.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mpjr/errors.hpp"

namespace mpjr {

namespace {

// Bisection for an increasing function f on [lo, hi] with f(lo) < 0 < f(hi).
template <typename F>
double bisect_increasing(F&& f, double lo, double hi) {
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

double pow3(double x) { return x * x * x; }

}  // namespace

double analytic_traction(const LJLawParams& law, double g) {
  const double x3 = pow3(law.g0 / g);
  return 8.0 * law.delta_gamma / (3.0 * law.g0) * (x3 - x3 * x3 * x3);
}

double analytic_tangent(const LJLawParams& law, double g) {
  const double x = law.g0 / g;
  const double x4 = x * x * x * x;
  const double x10 = x4 * x4 * x * x;
  return 8.0 * law.delta_gamma / (3.0 * law.g0 * law.g0) * (9.0 * x10 - 3.0 * x4);
}

double analytic_antiderivative(const LJLawParams& law, double g) {
  const double x2 = (law.g0 / g) * (law.g0 / g);
  const double x8 = x2 * x2 * x2 * x2;
  return 8.0 * law.delta_gamma / 3.0 * (x8 / 8.0 - x2 / 2.0);
}

double analytic_area(const LJLawParams& law, double x, double y) {
  return analytic_antiderivative(law, y) - analytic_antiderivative(law, x);
}

LJLawParams derive_params(double delta_gamma, double p_max, double k_cap) {
  if (!(delta_gamma > 0.0) || !(p_max > 0.0) || !(k_cap > 0.0)) {
    throw DataError("law parameters must be strictly positive (delta_gamma=" +
                    std::to_string(delta_gamma) + ", p_max=" + std::to_string(p_max) +
                    ", k_cap=" + std::to_string(k_cap) + ")");
  }

  LJLawParams law;
  law.delta_gamma = delta_gamma;
  law.p_max = p_max;
  law.g0 = 16.0 / (9.0 * std::sqrt(3.0)) * delta_gamma / p_max;
  law.g_max = std::pow(3.0, 1.0 / 6.0) * law.g0;
  law.a1 = 8.0 / 3.0 * std::pow(16.0 / (9.0 * std::sqrt(3.0)), 8) *
           std::pow(delta_gamma, 9) / std::pow(p_max, 8);
  law.a2 = 2048.0 / 729.0 * pow3(delta_gamma) / (p_max * p_max);

  const double slope_at_g0 = analytic_tangent(law, law.g0);
  if (!(k_cap > slope_at_g0)) {
    throw DataError("repulsive slope cap " + std::to_string(k_cap) +
                    " does not exceed the law slope at g0 (" + std::to_string(slope_at_g0) +
                    ")");
  }

  // Analytic slope decreases monotonically on (0, g0]; search in x = g0/g.
  auto slope_excess = [&](double x) { return analytic_tangent(law, law.g0 / x) - k_cap; };
  double x_hi = 2.0;
  while (slope_excess(x_hi) < 0.0) x_hi *= 2.0;
  const double x_n0 = bisect_increasing(slope_excess, 1.0, x_hi);
  law.g_n0 = law.g0 / x_n0;
  law.k_reg = k_cap;
  law.p_n0 = analytic_traction(law, law.g_n0);

  law.a_tot = -analytic_antiderivative(law, law.g_n0);
  if (!(law.a_tot > 0.0)) {
    throw DataError("repulsive slope cap " + std::to_string(k_cap) +
                    " is too stiff: signed adhesive area over [g_n0, inf) is not positive");
  }

  // P(g_nc1) = -(1 - 0.99) A_tot, with P increasing on (g0, inf).
  const double target = -(1.0 - kCutoffAreaFraction) * law.a_tot;
  auto area_excess = [&](double g) { return analytic_antiderivative(law, g) - target; };
  double g_hi = 2.0 * law.g0;
  while (area_excess(g_hi) < 0.0) g_hi *= 2.0;
  law.g_nc1 = bisect_increasing(area_excess, law.g0, g_hi);
  law.p_nc1 = analytic_traction(law, law.g_nc1);
  law.g_nc2 = law.g_nc1 + 2.0 * (1.0 - kCutoffAreaFraction) * law.a_tot / law.p_nc1;
  return law;
}

double traction(const LJLawParams& law, double g) {
  if (g <= law.g_n0) return law.p_n0 + law.k_reg * (g - law.g_n0);
  if (g <= law.g_nc1) return analytic_traction(law, g);
  if (g <= law.g_nc2) return law.p_nc1 * (law.g_nc2 - g) / (law.g_nc2 - law.g_nc1);
  return 0.0;
}

double tangent(const LJLawParams& law, double g) {
  if (g < law.g_n0) return law.k_reg;
  if (g < law.g_nc1) return analytic_tangent(law, g);
  if (g < law.g_nc2) return -law.p_nc1 / (law.g_nc2 - law.g_nc1);
  return 0.0;
}

double potential(const LJLawParams& law, double g) {
  const double span = law.g_nc2 - law.g_nc1;
  if (g >= law.g_nc2) return 0.0;
  if (g >= law.g_nc1) {
    const double d = law.g_nc2 - g;
    return -0.5 * law.p_nc1 * d * d / span;
  }
  const double phi_nc1 = -0.5 * law.p_nc1 * span;
  if (g >= law.g_n0) {
    return phi_nc1 - analytic_area(law, g, law.g_nc1);
  }
  const double phi_n0 = phi_nc1 - analytic_area(law, law.g_n0, law.g_nc1);
  const double d = g - law.g_n0;
  return phi_n0 + law.p_n0 * d + 0.5 * law.k_reg * d * d;
}

double traction(const PenaltyLaw& law, double g) { return g < 0.0 ? law.k * g : 0.0; }
double tangent(const PenaltyLaw& law, double g) { return g < 0.0 ? law.k : 0.0; }
double potential(const PenaltyLaw& law, double g) { return g < 0.0 ? 0.5 * law.k * g * g : 0.0; }

double traction(const NormalLaw& law, double g) {
  return std::visit([g](const auto& l) { return traction(l, g); }, law);
}
double tangent(const NormalLaw& law, double g) {
  return std::visit([g](const auto& l) { return tangent(l, g); }, law);
}
double potential(const NormalLaw& law, double g) {
  return std::visit([g](const auto& l) { return potential(l, g); }, law);
}

double inflection_gap(const LJLawParams& law) { return std::pow(7.5, 1.0 / 6.0) * law.g0; }

double max_softening_slope(const LJLawParams& law) {
  return std::abs(analytic_tangent(law, inflection_gap(law)));
}

double max_abs_slope(const LJLawParams& law) {
  double m = std::max(law.k_reg, law.p_nc1 / (law.g_nc2 - law.g_nc1));
  if (inflection_gap(law) < law.g_nc1) m = std::max(m, max_softening_slope(law));
  return m;
}

bool instability_check(double max_abs_slope, double modulus, double thickness) {
  return max_abs_slope > modulus / thickness;
}

}  // namespace mpjr
