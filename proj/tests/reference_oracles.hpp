#pragma once

// Independent reference values used by the model tests and the acceptance binary.

#include <array>
#include <cmath>
#include <numbers>

namespace ref {

// Classical fixed-step RK4 for the Duffing system, halving the step until two
// successive answers agree to `agree`.
inline double duffing_step_halving(double omega1, double omega2, double omega3, double t_end, double agree = 1e-10) {
  auto f = [&](std::array<double, 2> const& y) {
    return std::array<double, 2>{y[1], -2.0 * omega1 * omega2 * y[1] - omega1 * omega1 * (y[0] + omega3 * y[0] * y[0] * y[0])};
  };
  auto integrate = [&](long steps) {
    double const h = t_end / static_cast<double>(steps);
    std::array<double, 2> y{1.0, 0.0};
    for (long s = 0; s < steps; ++s) {
      auto const k1 = f(y);
      auto const k2 = f({y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]});
      auto const k3 = f({y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]});
      auto const k4 = f({y[0] + h * k3[0], y[1] + h * k3[1]});
      for (int c = 0; c < 2; ++c) y[c] += h / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
    }
    return y[0];
  };
  long steps = 250;
  double previous = integrate(steps);
  for (;;) {
    steps *= 2;
    double const current = integrate(steps);
    if (std::abs(current - previous) < agree || steps > (1L << 24)) return current;
    previous = current;
  }
}

// Damped linear oscillator u'' + 2 zeta w u' + w^2 u = 0, u(0) = 1, u'(0) = 0.
inline double damped_linear(double w, double zeta, double t) {
  double const wd = w * std::sqrt(1.0 - zeta * zeta);
  return std::exp(-zeta * w * t) * (std::cos(wd * t) + zeta * w / wd * std::sin(wd * t));
}

// Wing weight with the physical parameters given directly (sweep in degrees).
inline double wing_weight_direct(double sw, double wfw, double a, double sweep_deg, double q, double taper, double tc,
                                 double nz, double wdg, double wp) {
  double const c = std::cos(sweep_deg * std::numbers::pi / 180.0);
  return 0.036 * std::pow(sw, 0.758) * std::pow(wfw, 0.0035) * std::pow(a / (c * c), 0.6) * std::pow(q, 0.006) *
             std::pow(taper, 0.04) * std::pow(100.0 * tc / c, -0.3) * std::pow(nz * wdg, 0.49) +
         sw * wp;
}

}  // namespace ref
