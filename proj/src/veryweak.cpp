#include "vww/veryweak.hpp"

#include <cmath>
#include <string>

#include "vww/error.hpp"
#include "vww/parallel.hpp"
#include "vww/spectral.hpp"

namespace vww {

namespace {

// Tags an error with the ladder point it came from.
template <class Fn>
auto at_epsilon(double eps, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& err) {
    std::string msg = err.what();
    const std::string prefix = std::string(to_string(err.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw Error(err.code(), "eps=" + std::to_string(eps) + ": " + msg);
  }
}

WaveSolution solve_on(const BasisPtr& basis, const GridFunction& u0, const GridFunction& u1, double horizon,
                      const std::vector<double>& times) {
  return solve_homogeneous(make_problem(basis, u0, u1, horizon), times);
}

double sup_l2(const std::vector<GridFunction>& series) {
  double m = 0.0;
  for (const GridFunction& f : series) m = std::max(m, l2_norm(f));
  return m;
}

double sup_l2_difference(const std::vector<GridFunction>& a, const std::vector<GridFunction>& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, l2_norm(a[j] - b[j]));
  return m;
}

std::optional<PowerFit> try_fit(const std::vector<double>& ladder, const std::vector<double>& norms) {
  RegularizedNet net{ladder, norms, "C([0,T],L2)", {}};
  try {
    return fit_moderateness(net);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::DegenerateNet) return std::nullopt;
    throw;
  }
}

SmoothTerm scaled(SmoothTerm t, double factor) {
  switch (t.kind) {
    case SmoothKind::Sine:
    case SmoothKind::Cosine: t.params[0] *= factor; break;
    default:
      for (double& v : t.params) v *= factor;
      for (double& v : t.derivs) v *= factor;
  }
  return t;
}

}  // namespace

void VeryWeakExperiment::validate() const {
  RegularizedNet probe{ladder, std::vector<double>(ladder.size(), 1.0), "", {}};
  probe.validate();
  require_same_grid(u0.grid, grid, "experiment data u0");
  require_same_grid(u1.grid, grid, "experiment data u1");
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 1");
  if (!(horizon > 0.0)) throw Error(ErrorCode::InvalidArgument, "horizon T must be positive");
  if (time_samples < 1) throw Error(ErrorCode::InvalidArgument, "time_samples must be >= 1");
  for (double eps : ladder) require_resolved({profile, eps}, grid);
}

NetReport run_existence(const VeryWeakExperiment& e, int declared_order) {
  e.validate();
  const std::vector<double> times = uniform_times(e.horizon, e.time_samples);
  NetReport report;
  report.declared_order = declared_order;
  report.rows.resize(e.ladder.size());
  parallel_for(e.ladder.size(), e.threads, [&](std::size_t i) {
    const double eps = e.ladder[i];
    report.rows[i] = at_epsilon(eps, [&] {
      const MollifierSpec m{e.profile, eps};
      const NuPrimitive nu_eps = mollify_primitive(e.nu, m, e.grid);
      const BasisPtr basis = build_basis(nu_eps, e.n_max, e.grid, e.eigen);
      const double scale = std::pow(eps, -e.data_exponent);
      const WaveSolution sol = solve_on(basis, scale * e.u0, scale * e.u1, e.horizon, times);
      NetRow row;
      row.epsilon = eps;
      row.u_norm = sup_l2(sol.values);
      row.ut_norm = sup_l2(sol.dt_values);
      row.q_linf = nu_eps.q_linf().value_or(0.0);
      row.lambda1 = basis->pairs().front().lambda;
      return row;
    });
  });

  std::vector<double> u, ut, q;
  for (const NetRow& r : report.rows) {
    u.push_back(r.u_norm);
    ut.push_back(r.ut_norm);
    q.push_back(r.q_linf);
  }
  report.u_fit = try_fit(e.ladder, u);
  report.ut_fit = try_fit(e.ladder, ut);
  report.q_fit = try_fit(e.ladder, q);
  const double limit = declared_order + kExponentTolerance;
  report.moderate = (!report.u_fit || report.u_fit->slope <= limit) && (!report.ut_fit || report.ut_fit->slope <= limit);
  return report;
}

UniquenessReport run_uniqueness(const VeryWeakExperiment& e, int order, const Perturbation& w) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "perturbation order M must be >= 1");
  e.validate();
  if (w.w0) require_same_grid(w.w0->grid, e.grid, "perturbation w0");
  if (w.w1) require_same_grid(w.w1->grid, e.grid, "perturbation w1");
  const std::vector<double> times = uniform_times(e.horizon, e.time_samples);

  UniquenessReport report;
  report.order = order;
  report.rows.resize(e.ladder.size());
  parallel_for(e.ladder.size(), e.threads, [&](std::size_t i) {
    const double eps = e.ladder[i];
    report.rows[i] = at_epsilon(eps, [&] {
      const double small = std::pow(eps, order);
      const NuPrimitive nu_eps = mollify_primitive(e.nu, {e.profile, eps}, e.grid);
      const BasisPtr basis = build_basis(nu_eps, e.n_max, e.grid, e.eigen);

      BasisPtr tilde_basis = basis;
      if (w.second_profile) {
        tilde_basis = build_basis(mollify_primitive(e.nu, {*w.second_profile, eps}, e.grid), e.n_max, e.grid, e.eigen);
      } else if (w.potential) {
        tilde_basis = build_basis(with_extra_term(nu_eps, scaled(*w.potential, small)), e.n_max, e.grid, e.eigen);
      }
      GridFunction v0 = e.u0;
      GridFunction v1 = e.u1;
      if (!w.second_profile) {
        if (w.w0) v0 += small * *w.w0;
        if (w.w1) v1 += small * *w.w1;
      }
      const WaveSolution a = solve_on(basis, e.u0, e.u1, e.horizon, times);
      const WaveSolution b = solve_on(tilde_basis, v0, v1, e.horizon, times);

      UniquenessRow row;
      row.epsilon = eps;
      row.diff_norm = sup_l2_difference(a.values, b.values);

      // f_eps = (q~_eps - q_eps) u~_eps drives U_eps through the forced
      // problem; compare against the esnh1 right side with measured norms.
      const GridFunction dq = tilde_basis->nu().sample_q(e.grid) - nu_eps.sample_q(e.grid);
      double f_norm = 0.0;
      for (const GridFunction& ub : b.values) {
        GridFunction f = ub;
        for (std::size_t k = 0; k < f.size(); ++k) f.values[k] *= dq.values[k];
        f_norm = std::max(f_norm, l2_norm(f));
      }
      row.force_norm = f_norm;
      const GridFunction d0 = e.u0 - v0;
      const GridFunction d1 = e.u1 - v1;
      const double u1_wm1 = sobolev_norm(analyze(d1, basis), -1.0);
      const double rhs = std::pow(l2_norm(d0), 2) + u1_wm1 * u1_wm1 + 2.0 * e.horizon * e.horizon * f_norm * f_norm;
      row.bound_ratio = rhs > 0.0 ? row.diff_norm * row.diff_norm / rhs : 0.0;
      return row;
    });
  });

  std::vector<double> norms;
  for (const UniquenessRow& r : report.rows) norms.push_back(r.diff_norm);
  RegularizedNet net{e.ladder, norms, "C([0,T],L2)", {}};
  try {
    report.fit = check_negligibility(net, order);
    report.pass = report.fit->pass;
  } catch (const Error& err) {
    if (err.code() != ErrorCode::DegenerateNet) throw;
    report.degenerate = true;
    report.pass = true;
  }
  return report;
}

ConsistencyReport run_consistency(const VeryWeakExperiment& e, double tolerance) {
  if (e.nu.has_atoms()) {
    throw Error(ErrorCode::NotBoundedPotential, "consistency needs a bounded potential; q carries delta atoms");
  }
  e.validate();
  const std::vector<double> times = uniform_times(e.horizon, e.time_samples);
  const BasisPtr classical = build_basis(e.nu, e.n_max, e.grid, e.eigen, e.threads);
  const WaveSolution reference = solve_on(classical, e.u0, e.u1, e.horizon, times);

  ConsistencyReport report;
  report.tolerance = tolerance;
  report.rows.resize(e.ladder.size());
  parallel_for(e.ladder.size(), e.threads, [&](std::size_t i) {
    const double eps = e.ladder[i];
    report.rows[i] = at_epsilon(eps, [&] {
      const NuPrimitive nu_eps = mollify_primitive(e.nu, {e.profile, eps}, e.grid);
      const BasisPtr basis = build_basis(nu_eps, e.n_max, e.grid, e.eigen);
      const WaveSolution sol = solve_on(basis, e.u0, e.u1, e.horizon, times);
      return ConsistencyRow{eps, sup_l2_difference(reference.values, sol.values)};
    });
  });

  std::vector<double> d;
  for (const ConsistencyRow& r : report.rows) d.push_back(r.discrepancy);
  report.rate = try_fit(e.ladder, d);
  report.strictly_decreasing = true;
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (!(d[i] < d[i - 1])) report.strictly_decreasing = false;
    if (d[i] > 1.05 * d[i - 1]) report.spike_flagged = true;
  }
  report.pass = report.strictly_decreasing && d.back() <= tolerance;
  return report;
}

}  // namespace vww
