#pragma once

#include <variant>

namespace mpjr {

// Regularized Lennard-Jones traction-gap law parameterized by the adhesion
// energy per unit area and the peak adhesive traction. Positive traction is
// attractive.
//
//   g <= g_n0           tangent line to the analytic law at g_n0 (slope k_reg)
//   g_n0 < g <= g_nc1   a2 g^-3 - a1 g^-9
//   g_nc1 < g <= g_nc2  linear descent to zero
//   g > g_nc2           0
struct LJLawParams {
  double delta_gamma = 0.0;
  double p_max = 0.0;
  double g0 = 0.0;
  double g_max = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  static constexpr double b1 = -9.0;
  static constexpr double b2 = -3.0;
  double g_n0 = 0.0;
  double k_reg = 0.0;
  double g_nc1 = 0.0;
  double g_nc2 = 0.0;

  double p_n0 = 0.0;   // analytic traction at g_n0
  double p_nc1 = 0.0;  // analytic traction at g_nc1
  double a_tot = 0.0;  // signed area of the analytic law over [g_n0, inf)
};

// Adhesion-free comparison law: p = k g for g < 0, zero otherwise.
struct PenaltyLaw {
  double k = 0.0;
};

using NormalLaw = std::variant<LJLawParams, PenaltyLaw>;

// Area fraction of the analytic law kept up to g_nc1; the linear tail
// carries the remainder.
inline constexpr double kCutoffAreaFraction = 0.99;

/// Builds the regularized law. `k_cap` is the slope of the linear repulsive
/// branch; it must exceed the analytic slope at g0 (16 dgamma / g0^2) and be
/// soft enough that the signed area over [g_n0, inf) stays positive.
/// Throws DataError otherwise.
LJLawParams derive_params(double delta_gamma, double p_max, double k_cap);

double traction(const LJLawParams& law, double g);
double tangent(const LJLawParams& law, double g);
// Interface energy density phi(g) = -int_g^{g_nc2} p dg; zero past the cutoff.
double potential(const LJLawParams& law, double g);

double traction(const PenaltyLaw& law, double g);
double tangent(const PenaltyLaw& law, double g);
double potential(const PenaltyLaw& law, double g);

double traction(const NormalLaw& law, double g);
double tangent(const NormalLaw& law, double g);
double potential(const NormalLaw& law, double g);

// Unregularized law and its antiderivative (zero at infinity).
double analytic_traction(const LJLawParams& law, double g);
double analytic_tangent(const LJLawParams& law, double g);
double analytic_antiderivative(const LJLawParams& law, double g);

// Signed area of the analytic law over [x, y].
double analytic_area(const LJLawParams& law, double x, double y);

// Largest softening slope magnitude of the analytic law, attained at the
// inflection g = 7.5^(1/6) g0.
double max_softening_slope(const LJLawParams& law);
double inflection_gap(const LJLawParams& law);

// max |dp/dg| over the regularized law (repulsive cap included).
double max_abs_slope(const LJLawParams& law);

// True when the interface softening slope exceeds the layer stiffness E/t.
bool instability_check(double max_abs_slope, double modulus, double thickness);

}  // namespace mpjr
