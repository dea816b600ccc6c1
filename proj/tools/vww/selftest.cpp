#include <cmath>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "vww/estimates.hpp"
#include "vww/spectral.hpp"
#include "vww/veryweak.hpp"
#include "vww/wave.hpp"

namespace vww::cli {

namespace {

constexpr double kPi = std::numbers::pi;

struct Check {
  std::string name;
  std::function<bool()> run;
};

std::vector<Check> potential_checks() {
  return {
      {"nu = H(x-1/2) at 0.25 is 0", [] { return NuPrimitive::heaviside(0.5, 1.0)(0.25) == 0.0; }},
      {"nu = H(x-1/2) at 0.75 is 1", [] { return NuPrimitive::heaviside(0.5, 1.0)(0.75) == 1.0; }},
      {"nu = 2x + 3H(x-0.3) at 0.5 is 4",
       [] {
         const NuPrimitive nu({{SmoothKind::Linear, {2.0}, {}}}, {{0.3, 3.0}});
         return std::abs(nu(0.5) - 4.0) < 1e-15;
       }},
      {"zero extension vanishes outside (0,1)",
       [] {
         const Grid g(64);
         const ZeroExtension f = extend_by_zero(GridFunction::sample(g, [](double) { return 1.0; }));
         return f(1.5) == 0.0 && f(-0.2) == 0.0 && f(0.5) == 1.0;
       }},
      {"mollified zero potential is zero",
       [] { return linf_norm(mollify_potential(NuPrimitive::zero(), {MollifierProfile::Bump, 0.1}, Grid(256))) == 0.0; }},
      {"exact power law eps^-2 has exponent 2",
       [] {
         RegularizedNet net{dyadic_ladder(1, 6), {}, "L2", {}};
         for (double e : net.ladder) net.norms.push_back(std::pow(e, -2.0));
         return std::abs(fit_moderateness(net).slope - 2.0) < 1e-12;
       }},
      {"eps^3 is negligible at order 3, not at 5",
       [] {
         RegularizedNet net{dyadic_ladder(1, 6), {}, "L2", {}};
         for (double e : net.ladder) net.norms.push_back(std::pow(e, 3.0));
         return check_negligibility(net, 3).pass && !check_negligibility(net, 5).pass;
       }},
  };
}

std::vector<Check> eigs_checks() {
  std::vector<Check> c = potential_checks();
  const Grid g(512);
  c.push_back({"free lambda_3 = 9 pi^2", [g] {
                 return std::abs(shoot_eigenvalue(NuPrimitive::zero(), 3, g).lambda / (9 * kPi * kPi) - 1) < 1e-8;
               }});
  c.push_back({"constant nu leaves lambda_1 = pi^2", [g] {
                 return std::abs(shoot_eigenvalue(NuPrimitive::constant(3.0), 1, g).lambda / (kPi * kPi) - 1) < 1e-8;
               }});
  c.push_back({"delta at 1/2 leaves lambda_2 = 4 pi^2", [g] {
                 const double l = shoot_eigenvalue(NuPrimitive::heaviside(0.5, 1.0), 2, g).lambda;
                 return std::abs(l / (4 * kPi * kPi) - 1) < 1e-8;
               }});
  c.push_back({"free phi_1'(0) = sqrt(2) pi", [g] {
                 const EigenPair p = shoot_eigenvalue(NuPrimitive::zero(), 1, g);
                 return std::abs(p.phi_prime.values[0] - std::sqrt(2.0) * kPi) < 1e-8;
               }});
  c.push_back({"free basis of 10 is orthonormal", [g] {
                 const BasisPtr b = build_basis(NuPrimitive::zero(), 10, g);
                 return b->gram_off_diagonal() <= 1e-7 && b->gram_diagonal() <= 1e-7;
               }});
  return c;
}

std::vector<Check> solve_checks() {
  const Grid g(512);
  const BasisPtr b = build_basis(NuPrimitive::zero(), 10, g);
  auto sine = [g](double m) { return GridFunction::sample(g, [m](double x) { return std::sin(m * kPi * x); }); };
  return {
      {"analyze sqrt2 sin(pi x) gives c_1 = 1",
       [=] {
         const SpectralCoeffs c = analyze(std::sqrt(2.0) * sine(1), b);
         return std::abs(c.coeffs[0] - 1.0) < 1e-9 && std::abs(c.coeffs[3]) < 1e-9;
       }},
      {"W^1 norm of sin(pi x) is pi/sqrt2",
       [=] { return std::abs(sobolev_norm(analyze(sine(1), b), 1.0) - kPi / std::sqrt(2.0)) < 1e-9; }},
      {"u0 = sin(pi x) reaches -sin(pi x) at t = 1",
       [=] {
         const WaveSolution s = solve_homogeneous(make_problem(b, sine(1), GridFunction(g), 1.0), {1.0});
         return l2_norm(s.values[0] + sine(1)) < 1e-8;
       }},
      {"u1 = sin(2 pi x) gives sin(2 pi t) sin(2 pi x)/(2 pi)",
       [=] {
         const WaveSolution s = solve_homogeneous(make_problem(b, GridFunction(g), sine(2), 1.0), {0.3});
         return l2_norm(s.values[0] - (std::sin(2 * kPi * 0.3) / (2 * kPi)) * sine(2)) < 1e-8;
       }},
  };
}

std::vector<Check> forced_checks() {
  const Grid g(512);
  const BasisPtr b = build_basis(NuPrimitive::zero(), 10, g);
  return {
      {"zero forcing reduces to the homogeneous solve",
       [=] {
         WaveProblem p = make_problem(b, GridFunction::sample(g, [](double x) { return x * (1 - x); }), GridFunction(g), 1.0);
         const WaveSolution h = solve_homogeneous(p, {0.5, 1.0});
         const std::vector<double> tg = default_time_grid(*b, 1.0);
         p.forcing = ForcingTable{tg, std::vector<std::vector<double>>(tg.size(), std::vector<double>(b->size()))};
         const WaveSolution f = solve_forced(p, {0.5, 1.0});
         double d = 0.0;
         for (std::size_t j = 0; j < 2; ++j)
           for (std::size_t n = 0; n < b->size(); ++n) d = std::max(d, std::abs(h.modes[j][n] - f.modes[j][n]));
         return d <= 1e-12;
       }},
      {"forcing g(t) phi_3 projects onto mode 3",
       [=] {
         const std::vector<double> t = uniform_times(1.0, 4);
         std::vector<GridFunction> slices;
         for (double s : t) slices.push_back((1.0 + s) * (*b)[2].phi);
         const ForcingTable f = analyze_forcing(slices, t, b);
         return std::abs(f.coeffs[2][2] - 1.5) < 1e-9 && std::abs(f.coeffs[2][0]) < 1e-9;
       }},
      {"forcing sin(pi x) gives (1 - cos pi t)/pi^2 sin(pi x)",
       [=] {
         WaveProblem p = make_problem(b, GridFunction(g), GridFunction(g), 1.0);
         const std::vector<double> tg = default_time_grid(*b, 1.0);
         p.forcing = analyze_forcing([](double, double x) { return std::sin(kPi * x); }, tg, b);
         const WaveSolution s = solve_forced(p, {1.0});
         const GridFunction exact = GridFunction::sample(g, [](double x) { return 2.0 / (kPi * kPi) * std::sin(kPi * x); });
         return l2_norm(s.values[0] - exact) < 1e-6;
       }},
  };
}

std::vector<Check> estimates_checks() {
  const Grid g(512);
  const BasisPtr b = build_basis(NuPrimitive::zero(), 10, g);
  const GridFunction u0 = GridFunction::sample(g, [](double x) { return std::sin(kPi * x); });
  return {
      {"est1 single mode ratio is 1",
       [=] {
         const WaveProblem p = make_problem(b, u0, GridFunction(g), 1.0);
         const EstimateReport r = verify(EstimateId::Est1, p, solve_homogeneous(p, uniform_times(1.0, 50)));
         return std::abs(r.ratio - 1.0) < 1e-9 && std::abs(r.lhs_max - 0.5) < 1e-9;
       }},
      {"est5 with k = 0 equals est1",
       [=] {
         const WaveProblem p = make_problem(b, u0, 0.3 * u0, 1.0);
         const WaveSolution s = solve_homogeneous(p, uniform_times(1.0, 50));
         return std::abs(verify(EstimateId::Est5, p, s, {0.0}).ratio - verify(EstimateId::Est1, p, s).ratio) <= 1e-12;
       }},
      {"doubling the data leaves est2 unchanged",
       [=] {
         const WaveProblem p = make_problem(b, u0, 0.3 * u0, 1.0);
         const WaveProblem q = make_problem(b, 2.0 * u0, 0.6 * u0, 1.0);
         const auto t = uniform_times(1.0, 50);
         return std::abs(verify(EstimateId::Est2, p, solve_homogeneous(p, t)).ratio -
                         verify(EstimateId::Est2, q, solve_homogeneous(q, t)).ratio) <= 1e-12;
       }},
  };
}

std::vector<Check> veryweak_checks() {
  VeryWeakExperiment e;
  e.nu = NuPrimitive::zero();
  e.grid = Grid(256);
  e.n_max = 8;
  e.ladder = dyadic_ladder(2, 5);
  e.time_samples = 20;
  e.u0 = GridFunction::sample(e.grid, [](double x) { return std::sin(kPi * x); });
  e.u1 = GridFunction(e.grid);
  return {
      {"q = 0 gives an exponent-0 net",
       [=] {
         const NetReport r = run_existence(e);
         return r.u_fit && std::abs(r.u_fit->slope) < 1e-9 && r.moderate;
       }},
      {"zero perturbation leaves U identically 0",
       [=] {
         const UniquenessReport r = run_uniqueness(e, 2, {});
         return r.degenerate && r.pass;
       }},
      {"q = 0 consistency is at rounding level",
       [=] {
         const ConsistencyReport r = run_consistency(e);
         double m = 0.0;
         for (const ConsistencyRow& row : r.rows) m = std::max(m, row.discrepancy);
         return m < 1e-10;
       }},
  };
}

}  // namespace

int run_selftest(const std::string& command, std::ostream& out) {
  std::vector<Check> checks;
  if (command == "eigs") {
    checks = eigs_checks();
  } else if (command == "solve") {
    checks = solve_checks();
  } else if (command == "forced") {
    checks = forced_checks();
  } else if (command == "estimates") {
    checks = estimates_checks();
  } else if (command == "veryweak") {
    checks = veryweak_checks();
  } else {
    out << "unknown command '" << command << "'\n";
    return 2;
  }
  int failed = 0;
  for (const Check& c : checks) {
    bool ok = false;
    try {
      ok = c.run();
    } catch (const std::exception& e) {
      out << "  error: " << e.what() << '\n';
    }
    out << (ok ? "ok    " : "FAIL  ") << c.name << '\n';
    failed += ok ? 0 : 1;
  }
  out << (checks.size() - failed) << "/" << checks.size() << " selftest checks passed\n";
  return failed ? 3 : 0;
}

}  // namespace vww::cli
