#pragma once

#include <optional>
#include <vector>

#include "vww/potential.hpp"
#include "vww/prufer.hpp"
#include "vww/wave.hpp"

namespace vww {

struct VeryWeakExperiment {
  NuPrimitive nu;
  GridFunction u0;
  GridFunction u1;
  std::vector<double> ladder = default_ladder();
  MollifierProfile profile = MollifierProfile::Bump;
  int n_max = 40;
  Grid grid{2048};
  double horizon = 1.0;
  std::size_t time_samples = 100;  // sup over t taken on uniform_times(T, time_samples)
  // Data net u_{0,eps} = eps^-s u0, u_{1,eps} = eps^-s u1.
  double data_exponent = 0.0;
  EigenOptions eigen;
  std::size_t threads = 1;

  void validate() const;
};

struct NetRow {
  double epsilon = 0.0;
  double u_norm = 0.0;   // ||u_eps||_{C([0,T],L2)}
  double ut_norm = 0.0;  // ||d_t u_eps||_{C([0,T],L2)}
  double q_linf = 0.0;   // ||q_eps||_Linf
  double lambda1 = 0.0;
};

struct NetReport {
  std::vector<NetRow> rows;
  // Absent when the measured norms vanish identically (exponent -inf).
  std::optional<PowerFit> u_fit;
  std::optional<PowerFit> ut_fit;
  std::optional<PowerFit> q_fit;
  int declared_order = 0;
  bool moderate = false;
};

/// Mollifies q along the ladder, builds each basis, solves, and fits the
/// moderateness exponents of the solution nets.
NetReport run_existence(const VeryWeakExperiment& e, int declared_order = 0);

/// Perturbation injected at order M.
struct Perturbation {
  // Primitive W of the potential perturbation w = W'; q~_eps = q_eps + eps^M w.
  std::optional<SmoothTerm> potential;
  // Data perturbations eps^M w0, eps^M w1; empty means zero.
  std::optional<GridFunction> w0;
  std::optional<GridFunction> w1;
  // Replace the perturbed net by the same problem mollified with a second
  // profile instead of injecting eps^M terms.
  std::optional<MollifierProfile> second_profile;
};

struct UniquenessRow {
  double epsilon = 0.0;
  double diff_norm = 0.0;    // ||U_eps||_{C([0,T],L2)}
  double force_norm = 0.0;   // ||f_eps||_{C([0,T],L2)} with f_eps = (q~_eps - q_eps) u~_eps
  double bound_ratio = 0.0;  // ||U_eps||^2 over the esnh1 right side
};

struct UniquenessReport {
  std::vector<UniquenessRow> rows;
  int order = 0;
  std::optional<NegligibilityResult> fit;
  bool degenerate = false;  // U_eps vanished identically
  bool pass = false;
};

UniquenessReport run_uniqueness(const VeryWeakExperiment& e, int order, const Perturbation& w);

struct ConsistencyRow {
  double epsilon = 0.0;
  double discrepancy = 0.0;  // sup_t ||u(t) - u_eps(t)||_L2
};

struct ConsistencyReport {
  std::vector<ConsistencyRow> rows;
  std::optional<PowerFit> rate;  // slope of log discrepancy against log(1/eps), negated decay
  bool strictly_decreasing = false;
  bool spike_flagged = false;  // some increase above 5%
  double tolerance = 1e-3;
  bool pass = false;
};

/// Classical solution on the unmollified bounded q against the mollified
/// ladder. Throws NotBoundedPotential when q has atoms.
ConsistencyReport run_consistency(const VeryWeakExperiment& e, double tolerance = 1e-3);

}  // namespace vww
