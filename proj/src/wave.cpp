#include "vww/wave.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "vww/error.hpp"

namespace vww {

namespace {

GridFunction combine(const EigenBasis& basis, const std::vector<double>& weights) {
  const std::size_t points = basis.grid().size();
  std::vector<CompensatedSum> acc(points);
  for (std::size_t n = 0; n < weights.size(); ++n) {
    const auto& phi = basis[n].phi.values;
    const double w = weights[n];
    for (std::size_t i = 0; i < points; ++i) acc[i].add(w * phi[i]);
  }
  GridFunction out(basis.grid());
  for (std::size_t i = 0; i < points; ++i) out.values[i] = acc[i].value();
  return out;
}

void fill_series(const EigenBasis& basis, WaveSolution& sol) {
  sol.values.reserve(sol.times.size());
  sol.dt_values.reserve(sol.times.size());
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    sol.values.push_back(combine(basis, sol.modes[j]));
    sol.dt_values.push_back(combine(basis, sol.mode_rates[j]));
  }
}

void require_times(const std::vector<double>& times, double horizon) {
  for (double t : times) {
    if (!(t >= 0.0) || t > horizon * (1.0 + 1e-12) + 1e-14) {
      throw Error(ErrorCode::InvalidArgument, "requested time " + std::to_string(t) + " outside [0, T]");
    }
  }
}

// Running integral of g on a uniform grid: Simpson on even prefixes, a
// third-order one-panel rule on the odd ones.
std::vector<double> cumulative_simpson(const std::vector<double>& g, double h) {
  const std::size_t m = g.size();
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 1; j < m; ++j) {
    if (j % 2 == 0) {
      out[j] = out[j - 2] + h / 3.0 * (g[j - 2] + 4.0 * g[j - 1] + g[j]);
    } else if (j + 1 < m) {
      out[j] = out[j - 1] + h / 12.0 * (5.0 * g[j - 1] + 8.0 * g[j] - g[j + 1]);
    } else if (j >= 2) {
      out[j] = out[j - 1] + h / 12.0 * (5.0 * g[j] + 8.0 * g[j - 1] - g[j - 2]);
    } else {
      out[j] = 0.5 * h * (g[0] + g[1]);
    }
  }
  return out;
}

double hermite(double y0, double y1, double d0, double d1, double s, double h) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * y1 + (s3 - s2) * h * d1;
}

}  // namespace

void WaveProblem::validate() const {
  if (!basis) throw Error(ErrorCode::InvalidArgument, "wave problem has no basis");
  if (u0.size() != basis->size() || u1.size() != basis->size()) {
    throw Error(ErrorCode::InvalidArgument, "initial coefficient count does not match the basis");
  }
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon T must be positive");
  if (forcing) {
    const ForcingTable& f = *forcing;
    if (f.times.size() < 3 || f.coeffs.size() != f.times.size()) {
      throw Error(ErrorCode::InvalidArgument, "forcing table needs at least three time samples");
    }
    const double h = f.step();
    if (std::abs(f.times.front()) > 1e-14 || !(h > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "forcing time grid must start at 0 and increase");
    }
    for (std::size_t j = 0; j < f.times.size(); ++j) {
      if (std::abs(f.times[j] - h * static_cast<double>(j)) > 1e-9 * std::max(1.0, horizon)) {
        throw Error(ErrorCode::InvalidArgument, "forcing time grid must be uniform");
      }
      if (f.coeffs[j].size() != basis->size()) {
        throw Error(ErrorCode::InvalidArgument, "forcing coefficient count does not match the basis");
      }
    }
    if (f.times.back() < horizon * (1.0 - 1e-12)) {
      throw Error(ErrorCode::InvalidArgument, "forcing table does not cover [0, T]");
    }
  }
}

WaveProblem make_problem(const BasisPtr& basis, const GridFunction& u0, const GridFunction& u1, double horizon) {
  WaveProblem p;
  p.basis = basis;
  p.u0 = analyze(u0, basis).coeffs;
  p.u1 = analyze(u1, basis).coeffs;
  p.horizon = horizon;
  p.u0_samples = u0;
  p.u1_samples = u1;
  return p;
}

std::vector<double> uniform_times(double horizon, std::size_t count) {
  std::vector<double> t(count + 1);
  for (std::size_t j = 0; j <= count; ++j) t[j] = horizon * static_cast<double>(j) / static_cast<double>(count);
  t.back() = horizon;
  return t;
}

std::vector<double> default_time_grid(const EigenBasis& basis, double horizon) {
  const double top = std::sqrt(basis.pairs().back().lambda);
  const double dt = std::min(horizon / 200.0, 0.25 / top);
  auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  if (steps % 2) ++steps;
  return uniform_times(horizon, std::max<std::size_t>(steps, 2));
}

WaveSolution solve_homogeneous(const WaveProblem& p, const std::vector<double>& times) {
  p.validate();
  if (p.forcing) throw Error(ErrorCode::InvalidArgument, "solve_homogeneous called with a forcing table");
  const std::vector<double> lambdas = p.basis->lambdas();
  require_positive_spectrum(lambdas);
  require_times(times, p.horizon);

  WaveSolution sol;
  sol.basis = p.basis;
  sol.times = times;
  sol.modes.assign(times.size(), std::vector<double>(lambdas.size()));
  sol.mode_rates = sol.modes;
  for (std::size_t n = 0; n < lambdas.size(); ++n) {
    const double w = std::sqrt(lambdas[n]);
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double c = std::cos(w * times[j]);
      const double s = std::sin(w * times[j]);
      sol.modes[j][n] = p.u0[n] * c + p.u1[n] * s / w;
      sol.mode_rates[j][n] = -w * p.u0[n] * s + p.u1[n] * c;
    }
  }
  fill_series(*p.basis, sol);
  return sol;
}

WaveSolution solve_forced(const WaveProblem& p, const std::vector<double>& times) {
  p.validate();
  if (!p.forcing) throw Error(ErrorCode::InvalidArgument, "solve_forced needs a forcing table");
  const std::vector<double> lambdas = p.basis->lambdas();
  require_positive_spectrum(lambdas);
  require_times(times, p.horizon);

  const ForcingTable& table = *p.forcing;
  const double h = table.step();
  const double top = std::sqrt(lambdas.back());
  if (top * h > 0.5 + 1e-12) {
    throw Error(ErrorCode::TimeGridTooCoarse, "sqrt(lambda_N)*dt = " + std::to_string(top * h) + " exceeds 0.5");
  }
  const std::size_t m = table.times.size();

  WaveSolution sol;
  sol.basis = p.basis;
  sol.times = times;
  sol.modes.assign(times.size(), std::vector<double>(lambdas.size()));
  sol.mode_rates = sol.modes;

  std::vector<double> gs(m), gc(m);
  for (std::size_t n = 0; n < lambdas.size(); ++n) {
    const double w = std::sqrt(lambdas[n]);
    for (std::size_t j = 0; j < m; ++j) {
      gs[j] = std::sin(w * table.times[j]) * table.coeffs[j][n];
      gc[j] = std::cos(w * table.times[j]) * table.coeffs[j][n];
    }
    const std::vector<double> is = cumulative_simpson(gs, h);
    const std::vector<double> ic = cumulative_simpson(gc, h);
    for (std::size_t j = 0; j < times.size(); ++j) {
      const double t = times[j];
      auto k = static_cast<std::size_t>(std::floor(t / h));
      if (k >= m - 1) k = m - 2;
      const double s = (t - table.times[k]) / h;
      double sv = is[k];
      double cv = ic[k];
      if (s != 0.0) {
        sv = hermite(is[k], is[k + 1], gs[k], gs[k + 1], s, h);
        cv = hermite(ic[k], ic[k + 1], gc[k], gc[k + 1], s, h);
      }
      const double c = std::cos(w * t);
      const double sn = std::sin(w * t);
      const double a = p.u0[n] - sv / w;
      const double b = p.u1[n] + cv;
      sol.modes[j][n] = a * c + b * sn / w;
      sol.mode_rates[j][n] = -w * a * sn + b * c;
    }
  }
  fill_series(*p.basis, sol);
  return sol;
}

ForcingTable analyze_forcing(const std::vector<GridFunction>& slices, const std::vector<double>& times,
                             const BasisPtr& basis) {
  if (slices.size() != times.size()) {
    throw Error(ErrorCode::InvalidArgument, "forcing slice count does not match the time grid");
  }
  ForcingTable table;
  table.times = times;
  table.coeffs.reserve(times.size());
  for (const GridFunction& f : slices) table.coeffs.push_back(analyze(f, basis).coeffs);
  return table;
}

ForcingTable analyze_forcing(const std::function<double(double, double)>& f, const std::vector<double>& times,
                             const BasisPtr& basis) {
  std::vector<GridFunction> slices;
  slices.reserve(times.size());
  for (double t : times) {
    slices.push_back(GridFunction::sample(basis->grid(), [&](double x) { return f(t, x); }));
  }
  return analyze_forcing(slices, times, basis);
}

std::vector<double> mode_energy(const WaveSolution& sol) {
  if (!sol.basis) throw Error(ErrorCode::InvalidArgument, "mode energy needs a spectral solution");
  const std::vector<double> lambdas = sol.basis->lambdas();
  std::vector<double> e(sol.times.size());
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    CompensatedSum s;
    for (std::size_t n = 0; n < lambdas.size(); ++n) {
      s.add(lambdas[n] * sol.modes[j][n] * sol.modes[j][n]);
      s.add(sol.mode_rates[j][n] * sol.mode_rates[j][n]);
    }
    e[j] = s.value();
  }
  return e;
}

std::vector<double> total_energy(const WaveSolution& sol) {
  if (!sol.basis) throw Error(ErrorCode::InvalidArgument, "total energy needs a spectral solution");
  const std::vector<double> lambdas = sol.basis->lambdas();
  std::vector<double> e(sol.times.size());
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    CompensatedSum s;
    s.add(inner(sol.dt_values[j], sol.dt_values[j]));
    for (std::size_t n = 0; n < lambdas.size(); ++n) s.add(lambdas[n] * sol.modes[j][n] * sol.modes[j][n]);
    e[j] = s.value();
  }
  return e;
}

SpatialDerivatives spatial_derivatives(const WaveSolution& sol, std::size_t time_index, Limit limit) {
  if (!sol.basis) throw Error(ErrorCode::InvalidArgument, "spatial derivatives need a spectral solution");
  const EigenBasis& basis = *sol.basis;
  const Grid& grid = basis.grid();
  const std::vector<double>& u = sol.modes.at(time_index);

  SpatialDerivatives out;
  std::vector<CompensatedSum> dx(grid.size()), lam(grid.size());
  for (std::size_t n = 0; n < basis.size(); ++n) {
    const GridFunction right = limit == Limit::Right ? eigen_derivative(basis[n], basis.nu(), Limit::Right)
                                                     : GridFunction{};
    const auto& dphi = limit == Limit::Right ? right.values : basis[n].phi_prime.values;
    const auto& phi = basis[n].phi.values;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      dx[i].add(u[n] * dphi[i]);
      lam[i].add(u[n] * basis[n].lambda * phi[i]);
    }
  }
  const GridFunction q = basis.nu().sample_q(grid, true, &out.atom_nodes);
  const GridFunction& value = sol.values.at(time_index);
  out.dx = GridFunction(grid);
  out.dxx = GridFunction(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.dx.values[i] = dx[i].value();
    out.dxx.values[i] = q.values[i] * value.values[i] - lam[i].value();
  }
  for (std::size_t i : out.atom_nodes) out.dxx.values[i] = std::numeric_limits<double>::quiet_NaN();
  return out;
}

double second_derivative_at(const WaveSolution& sol, std::size_t time_index, double x) {
  if (!sol.basis) throw Error(ErrorCode::InvalidArgument, "spatial derivatives need a spectral solution");
  const std::size_t i = sol.basis->grid().index_of(x);
  if (i == Grid::npos) throw Error(ErrorCode::InvalidArgument, "x is not a grid node");
  for (const Jump& j : sol.basis->nu().jumps()) {
    if (std::abs(j.x - x) < 1e-12) {
      throw Error(ErrorCode::AtomEvaluation, "second derivative requested at the atom x=" + std::to_string(x));
    }
  }
  return spatial_derivatives(sol, time_index).dxx.values[i];
}

WaveSolution fd_oracle(const GridFunction& q, const GridFunction& u0, const GridFunction& u1,
                       const std::function<double(double, double)>& f, double horizon, double dt,
                       const std::vector<double>& times) {
  require_same_grid(q.grid, u0.grid, "fd_oracle");
  require_same_grid(q.grid, u1.grid, "fd_oracle");
  const Grid& grid = q.grid;
  const double h = grid.step();
  if (!(dt > 0.0) || dt > h * (1.0 + 1e-12)) {
    throw Error(ErrorCode::CFLViolation, "dt = " + std::to_string(dt) + " exceeds h = " + std::to_string(h));
  }
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon T must be positive");
  require_times(times, horizon);
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  const double k = horizon / static_cast<double>(steps);

  std::vector<std::size_t> wanted(times.size());
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double idx = times[j] / k;
    wanted[j] = static_cast<std::size_t>(std::llround(idx));
    if (std::abs(idx - static_cast<double>(wanted[j])) > 1e-6) {
      throw Error(ErrorCode::InvalidArgument, "requested time " + std::to_string(times[j]) + " is not a time step");
    }
  }

  const std::size_t points = grid.size();
  const double r = k * k / (h * h);
  auto force = [&](double t, std::vector<double>& out) {
    for (std::size_t i = 0; i < points; ++i) out[i] = f ? f(t, grid.node(i)) : 0.0;
  };

  WaveSolution sol;
  sol.times = times;
  sol.values.assign(times.size(), GridFunction(grid));
  sol.dt_values.assign(times.size(), GridFunction(grid));

  std::vector<double> prev = u0.values, cur(points, 0.0), next(points, 0.0), src(points, 0.0);
  prev.front() = prev.back() = 0.0;
  auto store = [&](std::size_t level, const std::vector<double>& u, const std::vector<double>& ut) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (wanted[j] != level) continue;
      sol.values[j].values = u;
      sol.dt_values[j].values = ut;
    }
  };

  force(0.0, src);
  for (std::size_t i = 1; i + 1 < points; ++i) {
    const double lap = (prev[i - 1] - 2.0 * prev[i] + prev[i + 1]) / (h * h);
    cur[i] = prev[i] + k * u1.values[i] + 0.5 * k * k * (lap - q.values[i] * prev[i] + src[i]);
  }
  std::vector<double> rate = u1.values;
  rate.front() = rate.back() = 0.0;
  store(0, prev, rate);

  for (std::size_t n = 1; n <= steps; ++n) {
    force(static_cast<double>(n) * k, src);
    for (std::size_t i = 1; i + 1 < points; ++i) {
      next[i] = 2.0 * cur[i] - prev[i] + r * (cur[i - 1] - 2.0 * cur[i] + cur[i + 1]) +
                k * k * (src[i] - q.values[i] * cur[i]);
    }
    for (std::size_t i = 0; i < points; ++i) rate[i] = (next[i] - prev[i]) / (2.0 * k);
    store(n, cur, rate);
    std::swap(prev, cur);
    std::swap(cur, next);
  }
  return sol;
}

}  // namespace vww
