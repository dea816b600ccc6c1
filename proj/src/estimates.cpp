#include "vww/estimates.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "vww/error.hpp"
#include "vww/parallel.hpp"

namespace vww {

namespace {

constexpr std::array<const char*, 17> kNames = {"est1", "est2", "est3", "est4",  "est5",  "ec1",
                                                "ec2",  "ec3",  "ec4",  "esnh1", "esnh2", "esnh3",
                                                "esnh4", "ecnh1", "ecnh2", "ecnh3", "ecnh4"};

enum class Lhs { Value, Rate, Dx, Dxx, Sobolev };

Lhs lhs_kind(EstimateId id) {
  switch (id) {
    case EstimateId::Est1:
    case EstimateId::Ec1:
    case EstimateId::Esnh1:
    case EstimateId::Ecnh1: return Lhs::Value;
    case EstimateId::Est2:
    case EstimateId::Ec2:
    case EstimateId::Esnh2:
    case EstimateId::Ecnh2: return Lhs::Rate;
    case EstimateId::Est3:
    case EstimateId::Ec3:
    case EstimateId::Esnh3:
    case EstimateId::Ecnh3: return Lhs::Dx;
    case EstimateId::Est4:
    case EstimateId::Ec4:
    case EstimateId::Esnh4:
    case EstimateId::Ecnh4: return Lhs::Dxx;
    case EstimateId::Est5: return Lhs::Sobolev;
  }
  return Lhs::Value;
}

double need(const std::optional<double>& v, const char* what, EstimateId id) {
  if (!v) {
    throw Error(ErrorCode::MissingNorm, to_string(id) + " needs " + what + ", which the problem cannot furnish");
  }
  return *v;
}

double spectral_sq(const std::vector<double>& c, const std::vector<double>& lambdas, double k) {
  CompensatedSum s;
  for (std::size_t n = 0; n < c.size(); ++n) s.add(std::exp(k * std::log(lambdas[n])) * c[n] * c[n]);
  return s.value();
}

double coeff_l2(const std::vector<double>& c) {
  CompensatedSum s;
  for (double v : c) s.add(v * v);
  return std::sqrt(s.value());
}

void mix(std::uint64_t& h, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
}

void mix(std::uint64_t& h, const std::vector<double>& v) { mix(h, v.data(), v.size() * sizeof(double)); }

}  // namespace

std::string to_string(EstimateId id) { return kNames[static_cast<std::size_t>(id)]; }

EstimateId estimate_id_from_string(const std::string& name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (name == kNames[i]) return static_cast<EstimateId>(i);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown estimate id '" + name + "'");
}

const std::vector<EstimateId>& core_estimates() {
  static const std::vector<EstimateId> ids = [] {
    std::vector<EstimateId> v;
    for (std::size_t i = 0; i <= static_cast<std::size_t>(EstimateId::Esnh4); ++i) v.push_back(static_cast<EstimateId>(i));
    return v;
  }();
  return ids;
}

const std::vector<EstimateId>& all_estimates() {
  static const std::vector<EstimateId> ids = [] {
    std::vector<EstimateId> v;
    for (std::size_t i = 0; i < kNames.size(); ++i) v.push_back(static_cast<EstimateId>(i));
    return v;
  }();
  return ids;
}

RhsNorms rhs_norms(const WaveProblem& p, const EstimateOptions& options) {
  p.validate();
  const std::vector<double> lambdas = p.basis->lambdas();
  require_positive_spectrum(lambdas);
  RhsNorms n;
  n.u0_l2 = spectral_sq(p.u0, lambdas, 0.0);
  n.u0_w1 = spectral_sq(p.u0, lambdas, 1.0);
  n.u0_w2 = spectral_sq(p.u0, lambdas, 2.0);
  n.u0_wk = spectral_sq(p.u0, lambdas, options.k);
  n.u1_wm1 = spectral_sq(p.u1, lambdas, -1.0);
  n.u1_l2 = spectral_sq(p.u1, lambdas, 0.0);
  n.u1_w1 = spectral_sq(p.u1, lambdas, 1.0);
  n.u1_wkm1 = spectral_sq(p.u1, lambdas, options.k - 1.0);
  if (p.u0_samples) n.u0_dd = std::pow(l2_norm(second_difference(*p.u0_samples)), 2);
  if (p.u1_samples) n.u1_dd = std::pow(l2_norm(second_difference(*p.u1_samples)), 2);
  const NuPrimitive& nu = p.basis->nu();
  n.nu_l2 = std::pow(nu.l2_norm(), 2);
  n.nu_linf = std::pow(nu.linf_norm(), 2);
  if (auto q = nu.q_linf()) n.q_linf = *q * *q;
  n.horizon = p.horizon;
  if (p.forcing) {
    const ForcingTable& f = *p.forcing;
    const double h = f.step();
    double c = 0.0;
    double c1 = 0.0;
    for (std::size_t j = 0; j < f.times.size(); ++j) {
      if (f.times[j] > p.horizon * (1.0 + 1e-12)) break;
      const double v = coeff_l2(f.coeffs[j]);
      const std::size_t a = j + 1 < f.times.size() ? j : j - 1;
      std::vector<double> diff(f.coeffs[a].size());
      for (std::size_t m = 0; m < diff.size(); ++m) diff[m] = (f.coeffs[a + 1][m] - f.coeffs[a][m]) / h;
      c = std::max(c, v);
      c1 = std::max(c1, v + coeff_l2(diff));
    }
    n.f_c = c * c;
    n.f_c1 = c1 * c1;
  }
  return n;
}

double assemble_rhs(EstimateId id, const RhsNorms& n) {
  const double force = 2.0 * n.horizon * n.horizon * n.f_c;
  const double force1 = 2.0 * n.horizon * n.horizon * n.f_c1;
  switch (id) {
    case EstimateId::Est1: return n.u0_l2 + n.u1_wm1;
    case EstimateId::Est2: return n.u0_w1 + n.u1_l2;
    case EstimateId::Est3: return (1.0 + n.nu_l2) * (n.u0_w1 + n.u1_l2) + n.nu_linf * (n.u0_l2 + n.u1_wm1);
    case EstimateId::Est4: {
      const double q = need(n.q_linf, "||q||_Linf", id);
      return q * (n.u0_l2 + n.u1_wm1) + n.u0_w2 + n.u1_w1;
    }
    case EstimateId::Est5: return n.u0_wk + n.u1_wkm1;
    case EstimateId::Ec1: return n.u0_l2 + n.u1_l2;
    case EstimateId::Ec2: {
      const double q = need(n.q_linf, "||q||_Linf", id);
      return need(n.u0_dd, "||u0''||", id) + q * n.u0_l2 + n.u1_l2;
    }
    case EstimateId::Ec3: {
      const double q = need(n.q_linf, "||q||_Linf", id);
      return (1.0 + n.nu_l2) * (need(n.u0_dd, "||u0''||", id) + q * n.u0_l2 + n.u1_l2) +
             n.nu_linf * (n.u0_l2 + n.u1_l2);
    }
    case EstimateId::Ec4: {
      const double q = need(n.q_linf, "||q||_Linf", id);
      return q * (n.u0_l2 + n.u1_l2) + need(n.u0_dd, "||u0''||", id) + need(n.u1_dd, "||u1''||", id);
    }
    case EstimateId::Esnh1: return n.u0_l2 + n.u1_wm1 + force;
    case EstimateId::Esnh2: return n.u0_w1 + n.u1_l2 + force;
    case EstimateId::Esnh3:
      return (1.0 + n.nu_l2) * (n.u0_w1 + n.u1_l2 + force) + n.nu_linf * (n.u0_l2 + n.u1_wm1 + force);
    case EstimateId::Esnh4: {
      const double q = need(n.q_linf, "||q||_Linf", id);
      return q * (n.u0_l2 + n.u1_wm1 + force) + n.u0_w2 + n.u1_w1 + force1;
    }
    case EstimateId::Ecnh1: return n.u0_l2 + n.u1_l2 + force;
    case EstimateId::Ecnh2: {
      const double q = need(n.q_linf, "||q||_Linf", id);
      return need(n.u0_dd, "||u0''||", id) + q * n.u0_l2 + n.u1_l2 + force;
    }
    case EstimateId::Ecnh3: {
      const double q = need(n.q_linf, "||q||_Linf", id);
      return (1.0 + n.nu_l2) * (need(n.u0_dd, "||u0''||", id) + q * n.u0_l2 + n.u1_l2 + force) +
             n.nu_linf * (n.u0_l2 + n.u1_l2 + force);
    }
    case EstimateId::Ecnh4: {
      const double q = need(n.q_linf, "||q||_Linf", id);
      return q * (n.u0_l2 + n.u1_l2 + force) + need(n.u0_dd, "||u0''||", id) + need(n.u1_dd, "||u1''||", id) +
             force;
    }
  }
  return 0.0;
}

std::uint64_t problem_hash(const WaveProblem& p) {
  std::uint64_t h = 14695981039346656037ULL;
  mix(h, p.u0);
  mix(h, p.u1);
  mix(h, p.basis->lambdas());
  mix(h, &p.horizon, sizeof p.horizon);
  const std::size_t points = p.basis->grid().size();
  mix(h, &points, sizeof points);
  if (p.forcing) {
    mix(h, p.forcing->times);
    for (const auto& row : p.forcing->coeffs) mix(h, row);
  }
  return h;
}

EstimateReport verify(EstimateId id, const WaveProblem& p, const WaveSolution& sol, const EstimateOptions& options) {
  if (sol.basis != p.basis) throw Error(ErrorCode::GridMismatch, "solution was not computed on the problem basis");
  const RhsNorms norms = rhs_norms(p, options);
  EstimateReport r;
  r.id = id;
  r.rhs = assemble_rhs(id, norms);
  r.problem_hash = problem_hash(p);

  const Lhs kind = lhs_kind(id);
  if (kind == Lhs::Dxx && p.basis->nu().has_atoms()) {
    throw Error(ErrorCode::MissingNorm, to_string(id) + " needs d_xx u in L2, undefined for an atomic potential");
  }
  const std::vector<double> lambdas = p.basis->lambdas();
  r.lhs_max = -1.0;
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    double v = 0.0;
    switch (kind) {
      case Lhs::Value: v = spectral_sq(sol.modes[j], lambdas, 0.0); break;
      case Lhs::Rate: v = spectral_sq(sol.mode_rates[j], lambdas, 0.0); break;
      case Lhs::Sobolev: v = spectral_sq(sol.modes[j], lambdas, options.k); break;
      case Lhs::Dx: {
        const SpatialDerivatives d = spatial_derivatives(sol, j);
        v = inner(d.dx, d.dx);
        break;
      }
      case Lhs::Dxx: {
        const SpatialDerivatives d = spatial_derivatives(sol, j);
        v = inner(d.dxx, d.dxx);
        break;
      }
    }
    if (v > r.lhs_max) {
      r.lhs_max = v;
      r.lhs_time = sol.times[j];
    }
  }
  r.ratio = r.rhs > 0.0 ? r.lhs_max / r.rhs : (r.lhs_max == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());

  std::ostringstream os;
  os.precision(6);
  os << "N=" << p.basis->size() << " grid=" << p.basis->grid().intervals() << " T=" << p.horizon
     << " atoms=" << p.basis->nu().jumps().size() << " forced=" << (p.forcing ? 1 : 0);
  if (id == EstimateId::Est5) os << " k=" << options.k;
  r.inputs = os.str();
  return r;
}

SweepResult constant_sweep(EstimateId id, const std::vector<WaveProblem>& battery, const std::vector<double>& times,
                           const EstimateOptions& options, std::size_t threads) {
  if (battery.empty()) throw Error(ErrorCode::InvalidArgument, "estimate battery is empty");
  SweepResult out;
  out.rows.resize(battery.size());
  parallel_for(battery.size(), threads, [&](std::size_t i) {
    const WaveProblem& p = battery[i];
    const WaveSolution sol = p.forcing ? solve_forced(p, times) : solve_homogeneous(p, times);
    out.rows[i] = verify(id, p, sol, options);
  });
  for (const EstimateReport& r : out.rows) out.max_ratio = std::max(out.max_ratio, r.ratio);
  return out;
}

GridFunction random_smooth_data(const Grid& grid, std::uint64_t seed, int modes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(modes));
  for (double& v : a) v = coin(rng);
  return GridFunction::sample(grid, [&](double x) {
    double s = 0.0;
    for (int m = 1; m <= modes; ++m) {
      s += a[static_cast<std::size_t>(m - 1)] * std::sin(m * std::numbers::pi * x) / (m * m);
    }
    return s;
  });
}

PowerFit fit_epsilon_trend(const std::vector<double>& ladder, const std::vector<double>& values) {
  RegularizedNet net;
  net.ladder = ladder;
  net.norms = values;
  net.norm_kind = "ratio";
  return fit_moderateness(net);
}

}  // namespace vww
