#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "vww/error.hpp"
#include "vww/wave.hpp"

using namespace vww;
using oracle::pi;

namespace {

const BasisPtr& free_basis() {
  static const BasisPtr b = build_basis(NuPrimitive::zero(), 20, Grid(512));
  return b;
}

GridFunction sample(const Grid& g, double (*f)(double)) { return GridFunction::sample(g, f); }

double sin1(double x) { return std::sin(pi * x); }
double sin2(double x) { return std::sin(2 * pi * x); }
double zero(double) { return 0.0; }
double bubble(double x) { return x * (1 - x); }

double l2_diff(const GridFunction& a, const std::function<double(double)>& f) {
  return l2_norm(a - GridFunction::sample(a.grid, f));
}

}  // namespace

TEST_CASE("homogeneous closed forms") {
  const BasisPtr& b = free_basis();
  const Grid& g = b->grid();
  {
    const WaveProblem p = make_problem(b, sample(g, sin1), sample(g, zero), 1.0);
    const WaveSolution s = solve_homogeneous(p, {0.0, 0.5, 1.0});
    CHECK(l2_diff(s.values[2], [](double x) { return -std::sin(pi * x); }) <= 1e-8);
    CHECK(l2_diff(s.values[1], zero) <= 1e-8);
    CHECK(l2_diff(s.dt_values[1], [](double x) { return -pi * std::sin(pi * x); }) <= 1e-8);
  }
  {
    const WaveProblem p = make_problem(b, sample(g, zero), sample(g, sin2), 1.0);
    const WaveSolution s = solve_homogeneous(p, {0.3});
    CHECK(l2_diff(s.values[0], [](double x) {
      return std::sin(2 * pi * 0.3) * std::sin(2 * pi * x) / (2 * pi);
    }) <= 1e-8);
  }
}

TEST_CASE("boundary values vanish exactly") {
  const BasisPtr b = build_basis(NuPrimitive::heaviside(0.5, 2.0), 20, Grid(512));
  const WaveProblem p = make_problem(b, sample(b->grid(), bubble), sample(b->grid(), sin2), 3.0);
  const WaveSolution s = solve_homogeneous(p, uniform_times(3.0, 30));
  for (const GridFunction& u : s.values) CHECK(std::abs(u.values.front()) + std::abs(u.values.back()) <= 1e-12);
  const GridFunction u0 = sample(b->grid(), bubble);
  const double tail = l2_norm(synthesize(analyze(u0, b)) - u0);
  CHECK(l2_norm(s.values[0] - u0) <= tail + 1e-12);
}

TEST_CASE("energy is conserved per mode and in total") {
  const BasisPtr b = build_basis(NuPrimitive::heaviside(0.5, 1.0), 20, Grid(512));
  const WaveProblem p = make_problem(b, sample(b->grid(), bubble), sample(b->grid(), sin1), 4.0);
  const WaveSolution s = solve_homogeneous(p, uniform_times(4.0, 200));
  const std::vector<double> e = mode_energy(s);
  const std::vector<double> tot = total_energy(s);
  for (std::size_t j = 0; j < e.size(); ++j) {
    CHECK(std::abs(e[j] / e[0] - 1) <= 1e-10);
    CHECK(std::abs(tot[j] / tot[0] - 1) <= 1e-9);
  }
  for (std::size_t n = 0; n < b->size(); ++n) {
    const double l = (*b)[n].lambda;
    const double e0 = l * s.modes[0][n] * s.modes[0][n] + s.mode_rates[0][n] * s.mode_rates[0][n];
    for (std::size_t j = 0; j < s.times.size(); j += 17) {
      const double ej = l * s.modes[j][n] * s.modes[j][n] + s.mode_rates[j][n] * s.mode_rates[j][n];
      CHECK(std::abs(ej - e0) <= 1e-10 * std::max(e0, 1e-30));
    }
  }
}

TEST_CASE("time reversal returns the initial state") {
  const BasisPtr b = build_basis(NuPrimitive::heaviside(0.4, 1.5), 20, Grid(512));
  const WaveProblem p = make_problem(b, sample(b->grid(), bubble), sample(b->grid(), sin1), 1.7);
  const WaveSolution fwd = solve_homogeneous(p, {1.7});
  WaveProblem back = p;
  back.u0 = fwd.modes[0];
  back.u1 = fwd.mode_rates[0];
  for (double& v : back.u1) v = -v;
  back.u0_samples.reset();
  back.u1_samples.reset();
  const WaveSolution rev = solve_homogeneous(back, {1.7});
  for (std::size_t n = 0; n < b->size(); ++n) {
    CHECK(std::abs(rev.modes[0][n] - p.u0[n]) <= 1e-12);
    CHECK(std::abs(rev.mode_rates[0][n] + p.u1[n]) <= 1e-11);
  }
}

TEST_CASE("forced: constant-in-time source") {
  const BasisPtr& b = free_basis();
  const Grid& g = b->grid();
  WaveProblem p = make_problem(b, sample(g, zero), sample(g, zero), 2.0);
  const std::vector<double> grid_t = default_time_grid(*b, 2.0);
  p.forcing = analyze_forcing([](double, double x) { return std::sin(pi * x); }, grid_t, b);
  const WaveSolution s = solve_forced(p, uniform_times(2.0, 37));
  double worst = 0.0;
  for (std::size_t j = 0; j < s.times.size(); ++j) {
    const double t = s.times[j];
    worst = std::max(worst, l2_diff(s.values[j], [t](double x) {
      return (1 - std::cos(pi * t)) / (pi * pi) * std::sin(pi * x);
    }));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("forced: resonance") {
  const BasisPtr& b = free_basis();
  const Grid& g = b->grid();
  WaveProblem p = make_problem(b, sample(g, zero), sample(g, zero), 2.0);
  p.forcing = analyze_forcing([](double t, double x) { return std::sin(pi * x) * std::cos(pi * t); },
                              default_time_grid(*b, 2.0), b);
  const WaveSolution s = solve_forced(p, uniform_times(2.0, 41));
  double worst = 0.0;
  for (std::size_t j = 0; j < s.times.size(); ++j) {
    const double t = s.times[j];
    worst = std::max(worst, l2_diff(s.values[j], [t](double x) {
      return t * std::sin(pi * t) * std::sin(pi * x) / (2 * pi);
    }));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("forced with zero source reduces to homogeneous") {
  const BasisPtr& b = free_basis();
  WaveProblem p = make_problem(b, sample(b->grid(), bubble), sample(b->grid(), sin2), 1.0);
  const std::vector<double> times = uniform_times(1.0, 10);
  const WaveSolution h = solve_homogeneous(p, times);
  p.forcing = analyze_forcing([](double, double) { return 0.0; }, default_time_grid(*b, 1.0), b);
  const WaveSolution f = solve_forced(p, times);
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t n = 0; n < b->size(); ++n) CHECK(std::abs(f.modes[j][n] - h.modes[j][n]) <= 1e-12);
  }
}

TEST_CASE("forced time grid must resolve the top mode") {
  const BasisPtr& b = free_basis();
  WaveProblem p = make_problem(b, sample(b->grid(), zero), sample(b->grid(), zero), 1.0);
  p.forcing = analyze_forcing([](double, double x) { return x; }, uniform_times(1.0, 20), b);
  try {
    solve_forced(p, {1.0});
    FAIL("expected TimeGridTooCoarse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TimeGridTooCoarse);
  }
}

TEST_CASE("duhamel consistency: u'' + lambda u - f = O(dt^2)") {
  const BasisPtr& b = free_basis();
  auto f = [](double t, double x) { return std::exp(-t) * x * (1 - x) + t * std::sin(3 * pi * x); };
  auto residual = [&](std::size_t count) {
    WaveProblem p = make_problem(b, sample(b->grid(), bubble), sample(b->grid(), zero), 1.0);
    const std::vector<double> tg = uniform_times(1.0, count);
    p.forcing = analyze_forcing(f, tg, b);
    const WaveSolution s = solve_forced(p, tg);
    const double dt = tg[1];
    double worst = 0.0;
    for (std::size_t j = 1; j + 1 < tg.size(); ++j) {
      for (std::size_t n = 0; n < 3; ++n) {
        const double acc = (s.modes[j + 1][n] - 2 * s.modes[j][n] + s.modes[j - 1][n]) / (dt * dt);
        worst = std::max(worst, std::abs(acc + (*b)[n].lambda * s.modes[j][n] - p.forcing->coeffs[j][n]));
      }
    }
    return worst;
  };
  const double coarse = residual(1000);
  const double fine = residual(2000);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("analyze forcing") {
  const BasisPtr& b = free_basis();
  const GridFunction& phi3 = (*b)[2].phi;
  const std::vector<double> times = uniform_times(1.0, 4);
  std::vector<GridFunction> slices;
  for (double t : times) slices.push_back((1.0 + t * t) * phi3);
  const ForcingTable table = analyze_forcing(slices, times, b);
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t n = 0; n < b->size(); ++n) {
      if (n == 2) CHECK(table.coeffs[j][n] == doctest::Approx(1.0 + times[j] * times[j]).epsilon(1e-9));
      else CHECK(std::abs(table.coeffs[j][n]) <= 1e-9);
    }
  }
  const ForcingTable sep = analyze_forcing([](double t, double x) { return t * x; }, times, b);
  const SpectralCoeffs cx = analyze(GridFunction::sample(b->grid(), [](double x) { return x; }), b);
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t n = 0; n < b->size(); ++n) CHECK(std::abs(sep.coeffs[j][n] - times[j] * cx.coeffs[n]) <= 1e-12);
  }
  slices.pop_back();
  CHECK_THROWS_AS(analyze_forcing(slices, times, b), Error);
  std::vector<GridFunction> wrong(times.size(), GridFunction(Grid(64)));
  CHECK_THROWS_AS(analyze_forcing(wrong, times, b), Error);
}

TEST_CASE("spatial derivatives") {
  const BasisPtr& b = free_basis();
  const Grid& g = b->grid();
  const WaveProblem p = make_problem(b, sample(g, sin1), sample(g, zero), 1.0);
  const WaveSolution s = solve_homogeneous(p, {0.0});
  const SpatialDerivatives d = spatial_derivatives(s, 0);
  CHECK(d.dx[0] == doctest::Approx(pi).epsilon(1e-8));
  CHECK(l2_diff(d.dxx, [](double x) { return -pi * pi * std::sin(pi * x); }) <= 1e-6);
  CHECK(second_derivative_at(s, 0, 0.5) == doctest::Approx(-pi * pi).epsilon(1e-6));
}

TEST_CASE("second derivative at an atom is refused") {
  const BasisPtr b = build_basis(NuPrimitive::heaviside(0.5, 1.0), 10, Grid(256));
  const WaveProblem p = make_problem(b, sample(b->grid(), bubble), sample(b->grid(), zero), 1.0);
  const WaveSolution s = solve_homogeneous(p, {0.5});
  try {
    second_derivative_at(s, 0, 0.5);
    FAIL("expected AtomEvaluation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AtomEvaluation);
  }
  CHECK(std::isfinite(second_derivative_at(s, 0, 0.25)));
  const SpatialDerivatives d = spatial_derivatives(s, 0);
  CHECK(d.atom_nodes == std::vector<std::size_t>{128});
  CHECK(std::isnan(d.dxx[128]));
}

TEST_CASE("fd oracle: free mode converges at second order") {
  auto err = [](std::size_t n) {
    const Grid g(n);
    const WaveSolution s = fd_oracle(GridFunction(g), sample(g, sin1), GridFunction(g), {}, 1.0, g.step() / 2, {1.0});
    return l2_diff(s.values[0], [](double x) { return -std::sin(pi * x); });
  };
  const double e400 = err(400);
  CHECK(e400 <= 5e-5);
  CHECK(e400 / err(800) >= 3.0);
}

TEST_CASE("fd oracle: zero data stays zero and CFL is enforced") {
  const Grid g(100);
  const WaveSolution s = fd_oracle(GridFunction(g), GridFunction(g), GridFunction(g), {}, 1.0, 0.005, {0.5, 1.0});
  CHECK(linf_norm(s.values[1]) == 0.0);
  try {
    fd_oracle(GridFunction(g), GridFunction(g), GridFunction(g), {}, 1.0, 0.02, {1.0});
    FAIL("expected CFLViolation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CFLViolation);
  }
}

TEST_CASE("fd oracle agrees with the constant-potential spectral solve") {
  const Grid g(400);
  const BasisPtr b = build_basis(NuPrimitive::linear(5.0), 40, g);
  const GridFunction u0 = GridFunction::sample(g, [](double x) { return std::sin(pi * x) + 0.5 * std::sin(2 * pi * x); });
  const WaveSolution spec = solve_homogeneous(make_problem(b, u0, GridFunction(g), 1.0), {1.0});
  const GridFunction q = GridFunction::sample(g, [](double) { return 5.0; });
  const WaveSolution fd = fd_oracle(q, u0, GridFunction(g), {}, 1.0, g.step() / 2, {1.0});
  CHECK(l2_norm(spec.values[0] - fd.values[0]) <= 1e-4);
}

TEST_CASE("delta potential: spectral solve against the mollified fd oracle") {
  const Grid g(4000);
  const double alpha = 1.0;
  const NuPrimitive nu = NuPrimitive::heaviside(0.5, alpha);
  const BasisPtr b = build_basis(nu, 40, g);
  const GridFunction u0 = sample(g, bubble);
  const WaveSolution spec = solve_homogeneous(make_problem(b, u0, GridFunction(g), 1.0), {0.5, 1.0});
  const GridFunction q = mollify_potential(nu, {MollifierProfile::Bump, 1e-3}, g);
  const WaveSolution fd = fd_oracle(q, u0, GridFunction(g), {}, 1.0, g.step() / 2, {1.0});
  CHECK(l2_norm(spec.values[1] - fd.values[0]) <= 2e-3);

  // Jump of d_x u at the atom equals alpha*u(1/2), seen through one-sided differences.
  const GridFunction& u = spec.values[0];
  const std::size_t mid = g.index_of(0.5);
  const double h = g.step();
  const double left = (3 * u[mid] - 4 * u[mid - 1] + u[mid - 2]) / (2 * h);
  const double right = (-3 * u[mid] + 4 * u[mid + 1] - u[mid + 2]) / (2 * h);
  CHECK(std::abs((right - left) - alpha * u[mid]) <= 2e-3);
  const SpatialDerivatives dl = spatial_derivatives(spec, 0, Limit::Left);
  const SpatialDerivatives dr = spatial_derivatives(spec, 0, Limit::Right);
  CHECK(std::abs((dr.dx[mid] - dl.dx[mid]) - alpha * u[mid]) <= 1e-12);
}

TEST_CASE("problem validation") {
  const BasisPtr& b = free_basis();
  WaveProblem p = make_problem(b, sample(b->grid(), sin1), sample(b->grid(), zero), 1.0);
  p.u0.pop_back();
  CHECK_THROWS_AS(p.validate(), Error);
  p = make_problem(b, sample(b->grid(), sin1), sample(b->grid(), zero), 1.0);
  CHECK_THROWS_AS(solve_homogeneous(p, {1.5}), Error);
  CHECK_THROWS_AS(solve_forced(p, {0.5}), Error);
}
