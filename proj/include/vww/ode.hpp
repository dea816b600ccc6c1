#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "vww/error.hpp"

namespace vww {

struct OdeOptions {
  double atol = 1e-11;
  double rtol = 1e-11;
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-14;
  std::size_t max_steps = 20'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// Dormand-Prince 5(4) with local extrapolation.
///
/// Integrates y' = rhs(x, y) from x0 through every point of `stops`
/// (strictly increasing, all > x0), landing exactly on each and calling
/// observe(index, x, y) there. `h` is the initial step (<= 0 picks one) and
/// receives the step suggested for continuing past the last stop.
template <std::size_t N, class Rhs, class Observer>
void integrate_dopri5(Rhs&& rhs, std::array<double, N>& y, double x0, std::span<const double> stops,
                      Observer&& observe, const OdeOptions& opt, double& h, OdeStats* stats = nullptr) {
  using S = std::array<double, N>;
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (stops.empty()) return;
  double x = x0;
  S k1 = rhs(x, y), k2, k3, k4, k5, k6, k7, tmp, ynew;
  std::size_t evals = 1;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  if (!(h > 0.0)) h = std::min(1e-3, 0.1 * (stops.back() - x0));
  h = std::min(h, opt.max_step);

  std::size_t next = 0;
  while (next < stops.size()) {
    const double target = stops[next];
    bool hits = false;
    double step = h;
    if (x + 1.01 * step >= target) {
      step = target - x;
      hits = true;
    }
    if (step < opt.min_step * std::max(1.0, std::abs(x))) {
      throw Error(ErrorCode::StepFailure, "step size underflow at x=" + std::to_string(x));
    }
    if (accepted + rejected > opt.max_steps) {
      throw Error(ErrorCode::StepFailure, "step budget exhausted at x=" + std::to_string(x));
    }

    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + step * a21 * k1[i];
    k2 = rhs(x + c2 * step, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + step * (a31 * k1[i] + a32 * k2[i]);
    k3 = rhs(x + c3 * step, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    k4 = rhs(x + c4 * step, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    k5 = rhs(x + c5 * step, tmp);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    k6 = rhs(x + step, tmp);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    k7 = rhs(x + step, ynew);
    evals += 6;

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    if (!std::isfinite(err)) err = 1e10;

    const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    if (err <= 1.0) {
      x = hits ? target : x + step;
      y = ynew;
      k1 = k7;
      ++accepted;
      // Stretched final steps should not inflate the continuation step.
      h = std::min(opt.max_step, std::max(h, step) * (hits ? std::min(grow, 1.0) : grow));
      if (hits) {
        observe(next, x, y);
        ++next;
      }
    } else {
      h = step * std::min(grow, 1.0);
      ++rejected;
    }
  }
  if (stats) {
    stats->accepted += accepted;
    stats->rejected += rejected;
    stats->evaluations += evals;
  }
}

}  // namespace vww
