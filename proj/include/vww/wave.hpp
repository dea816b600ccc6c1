#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vww/grid.hpp"
#include "vww/prufer.hpp"
#include "vww/spectral.hpp"

namespace vww {

/// Forcing coefficients f_n(t_j) on a uniform time grid starting at 0.
struct ForcingTable {
  std::vector<double> times;
  std::vector<std::vector<double>> coeffs;  // coeffs[j][n]

  double step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

struct WaveProblem {
  BasisPtr basis;
  std::vector<double> u0;  // A_n
  std::vector<double> u1;  // B_n
  std::optional<ForcingTable> forcing;
  double horizon = 1.0;
  // Grid samples of the data, kept when the problem was built from them so
  // that finite-difference norms of u0'' and u1'' are available.
  std::optional<GridFunction> u0_samples;
  std::optional<GridFunction> u1_samples;

  void validate() const;
};

/// Projects grid data onto the basis and keeps the samples.
WaveProblem make_problem(const BasisPtr& basis, const GridFunction& u0, const GridFunction& u1, double horizon);

struct WaveSolution {
  BasisPtr basis;  // null for the finite-difference oracle
  std::vector<double> times;
  std::vector<GridFunction> values;     // u(t_j, .)
  std::vector<GridFunction> dt_values;  // d/dt u(t_j, .)
  std::vector<std::vector<double>> modes;       // u_n(t_j), [j][n]
  std::vector<std::vector<double>> mode_rates;  // u_n'(t_j), [j][n]
};

/// Default time grid for a forced solve: uniform, step min(T/200, 0.25/sqrt(lambda_N)).
std::vector<double> default_time_grid(const EigenBasis& basis, double horizon);

/// Uniformly spaced instants t_j = j*T/count, j = 0..count.
std::vector<double> uniform_times(double horizon, std::size_t count);

WaveSolution solve_homogeneous(const WaveProblem& p, const std::vector<double>& times);

/// Variation of constants with the Duhamel integrals accumulated by Simpson on
/// the forcing time grid. Requested times need not be grid points; the
/// integrals are interpolated by cubic Hermite between grid points.
WaveSolution solve_forced(const WaveProblem& p, const std::vector<double>& times);

/// f_n(t_j) = <f(t_j, .), phi_n>.
ForcingTable analyze_forcing(const std::vector<GridFunction>& slices, const std::vector<double>& times,
                             const BasisPtr& basis);

/// Samples f(t, x) on the basis grid at every time and projects it.
ForcingTable analyze_forcing(const std::function<double(double, double)>& f, const std::vector<double>& times,
                             const BasisPtr& basis);

/// Per-time spectral energy sum_n (lambda_n u_n^2 + u_n'^2).
std::vector<double> mode_energy(const WaveSolution& sol);

/// Per-time ||d_t u||^2 + sum_n lambda_n u_n^2.
std::vector<double> total_energy(const WaveSolution& sol);

struct SpatialDerivatives {
  GridFunction dx;
  GridFunction dxx;  // NaN at atom nodes
  std::vector<std::size_t> atom_nodes;
};

/// d_x u = sum u_n phi_n' (chosen one-sided limit of nu at jumps) and
/// d_xx u = sum u_n (q - lambda_n) phi_n away from atoms.
SpatialDerivatives spatial_derivatives(const WaveSolution& sol, std::size_t time_index, Limit limit = Limit::Left);

/// d_xx u at a grid node; AtomEvaluation when an atom of q sits there.
double second_derivative_at(const WaveSolution& sol, std::size_t time_index, double x);

/// Second-order leapfrog for u_tt = u_xx - q u + f with Dirichlet ends and a
/// Taylor first step. The grid of `q` sets h. Requested times are rounded to
/// the nearest step of the (possibly shortened) uniform step T/ceil(T/dt).
WaveSolution fd_oracle(const GridFunction& q, const GridFunction& u0, const GridFunction& u1,
                       const std::function<double(double, double)>& f, double horizon, double dt,
                       const std::vector<double>& times);

}  // namespace vww
