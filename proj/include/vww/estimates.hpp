#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vww/potential.hpp"
#include "vww/wave.hpp"

namespace vww {

enum class EstimateId {
  Est1, Est2, Est3, Est4, Est5,
  Ec1, Ec2, Ec3, Ec4,
  Esnh1, Esnh2, Esnh3, Esnh4,
  Ecnh1, Ecnh2, Ecnh3, Ecnh4,
};

std::string to_string(EstimateId id);
EstimateId estimate_id_from_string(const std::string& name);

/// est1-5, ec1-4 and esnh1-4.
const std::vector<EstimateId>& core_estimates();
/// core_estimates() plus ecnh1-4.
const std::vector<EstimateId>& all_estimates();

struct EstimateOptions {
  double k = 1.0;  // Sobolev order of est5
};

/// Every norm that appears on a right-hand side, squared.
struct RhsNorms {
  double u0_l2 = 0.0, u0_w1 = 0.0, u0_w2 = 0.0, u0_wk = 0.0;
  double u1_wm1 = 0.0, u1_l2 = 0.0, u1_w1 = 0.0, u1_wkm1 = 0.0;
  std::optional<double> u0_dd, u1_dd;  // ||u0''||^2, ||u1''||^2 from grid samples
  double nu_l2 = 0.0, nu_linf = 0.0;
  std::optional<double> q_linf;  // absent when q has atoms
  double f_c = 0.0, f_c1 = 0.0;  // ||f||^2 in C([0,T],L2) and C^1([0,T],L2)
  double horizon = 0.0;
};

RhsNorms rhs_norms(const WaveProblem& p, const EstimateOptions& options = {});

struct EstimateReport {
  EstimateId id = EstimateId::Est1;
  double lhs_max = 0.0;
  double lhs_time = 0.0;  // where the max was attained
  double rhs = 0.0;
  double ratio = 0.0;
  std::string inputs;
  std::uint64_t problem_hash = 0;
};

/// Right side of `id` assembled as the inequality states it. Throws
/// MissingNorm when a required norm is unavailable.
double assemble_rhs(EstimateId id, const RhsNorms& n);

/// Maximizes the left side over the solution's time grid and divides by the
/// right side.
EstimateReport verify(EstimateId id, const WaveProblem& p, const WaveSolution& sol,
                      const EstimateOptions& options = {});

/// Deterministic digest of a problem (coefficients, spectrum, horizon, forcing).
std::uint64_t problem_hash(const WaveProblem& p);

struct SweepResult {
  double max_ratio = 0.0;
  std::vector<EstimateReport> rows;
};

/// Solves every problem in the battery on `times` (forced when a forcing table
/// is present) and verifies `id` on each.
SweepResult constant_sweep(EstimateId id, const std::vector<WaveProblem>& battery, const std::vector<double>& times,
                           const EstimateOptions& options = {}, std::size_t threads = 1);

/// Smooth random data: sum_{m<=modes} a_m sin(m pi x)/m^2 with a_m uniform in
/// [-1,1], drawn from a seeded generator.
GridFunction random_smooth_data(const Grid& grid, std::uint64_t seed, int modes = 6);

/// Slope of log(value) against log(1/eps); a flat trend has slope near 0.
PowerFit fit_epsilon_trend(const std::vector<double>& ladder, const std::vector<double>& values);

}  // namespace vww
