// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../oracles.hpp"
#include "commands.hpp"
#include "vww/error.hpp"
#include "vww/estimates.hpp"
#include "vww/veryweak.hpp"

using namespace vww;
using oracle::pi;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail, double seconds) {
  std::printf("[%s] %2d %-28s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

// Runs one criterion; an exception is a failure with its message.
void criterion(int id, const std::string& name, const std::function<bool(std::string&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report(id, name, pass, detail, s);
}

const Grid kGrid(2048);

struct Catalog {
  std::string name;
  NuPrimitive nu;
};

std::vector<Catalog> catalog() {
  std::vector<double> samples;
  for (int k = 0; k <= 16; ++k) samples.push_back(0.3 * std::sin(pi * k / 16.0) + 0.1 * k / 16.0);
  const NuPrimitive delta = NuPrimitive::heaviside(0.5, 1.0);
  return {
      {"zero", NuPrimitive::zero()},
      {"constant", NuPrimitive::constant(2.0)},
      {"linear", NuPrimitive::linear(5.0)},
      {"sine", NuPrimitive::sine(0.3, 2.0)},
      {"cosine", NuPrimitive::cosine(-1.0 / (2 * pi), 1.0)},
      {"sampled", NuPrimitive({{SmoothKind::Sampled, samples, {}}}, {})},
      {"delta", delta},
      {"mixed", NuPrimitive({{SmoothKind::Sine, {0.2, 1.0}, {}}}, {{0.3, 2.0}, {0.7, -1.0}})},
      {"mollified delta", mollify_primitive(delta, {MollifierProfile::Bump, 1.0 / 64}, kGrid)},
  };
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

int main() {
  const NuPrimitive delta = NuPrimitive::heaviside(0.5, 1.0);
  const BasisPtr delta_basis = build_basis(delta, 40, kGrid);

  criterion(1, "free spectrum", [](std::string& d) {
    const BasisPtr b = build_basis(NuPrimitive::zero(), 40, kGrid);
    double worst = 0.0;
    for (const EigenPair& p : b->pairs()) worst = std::max(worst, std::abs(p.lambda / std::pow(pi * p.n, 2) - 1));
    d = fmt("max |lambda_n/(pi n)^2 - 1| = %.3g (limit 1e-8)", worst);
    return worst <= 1e-8;
  });

  criterion(2, "constant potential", [](std::string& d) {
    const BasisPtr b = build_basis(NuPrimitive::linear(5.0), 20, kGrid);
    double worst = 0.0;
    for (const EigenPair& p : b->pairs()) worst = std::max(worst, std::abs(p.lambda - (std::pow(pi * p.n, 2) + 5)));
    d = fmt("max |lambda_n - ((pi n)^2 + 5)| = %.3g (limit 1e-7)", worst);
    return worst <= 1e-7;
  });

  criterion(3, "delta potential", [&](std::string& d) {
    const double k = oracle::delta_first_k(1.0);
    const double e1 = std::abs((*delta_basis)[0].lambda - k * k);
    const double e2 = std::abs((*delta_basis)[1].lambda - 4 * pi * pi);
    d = fmt("|lambda_1 - k^2| = %.3g (limit 1e-7), |lambda_2 - 4pi^2| = %.3g (limit 1e-8)", e1, e2);
    return e1 <= 1e-7 && e2 <= 1e-8;
  });

  criterion(4, "eigenvalue asymptotics", [&](std::string& d) {
    // s_10 vanishes because even modes ignore the atom; compare against the
    // largest value up to n = 10 instead.
    double max_all = 0.0;
    double max_10 = 0.0;
    double s10 = 0.0;
    for (const EigenPair& p : delta_basis->pairs()) {
      const double s = p.n * std::abs(p.lambda / std::pow(pi * p.n, 2) - 1);
      max_all = std::max(max_all, s);
      if (p.n <= 10) max_10 = std::max(max_10, s);
      if (p.n == 10) s10 = s;
    }
    d = fmt("max_{n<=40} s_n = %.4g, max_{n<=10} s_n = %.4g, s_10 = %.3g", max_all, max_10, s10);
    return max_all <= 2 * max_10;
  });

  criterion(5, "residual plateau", [&](std::string& d) {
    const auto rows = asymptotic_residuals(*delta_basis);
    const double s10 = rows[9].partial_sum;
    const double s20 = rows[19].partial_sum;
    const double s40 = rows[39].partial_sum;
    d = fmt("partial sums N=10,20,40: %.5g %.5g %.5g, growth 20->40 = %.2f%%", s10, s20, s40, 100 * (s40 / s20 - 1));
    return s40 < 1.1 * s20;
  });

  const std::vector<Catalog> cat = catalog();
  std::vector<BasisPtr> cat_bases;
  for (const Catalog& c : cat) cat_bases.push_back(build_basis(c.nu, 40, kGrid));

  criterion(6, "orthonormality", [&](std::string& d) {
    double worst = 0.0;
    std::string who;
    for (std::size_t i = 0; i < cat.size(); ++i) {
      if (cat_bases[i]->gram_off_diagonal() >= worst) {
        worst = cat_bases[i]->gram_off_diagonal();
        who = cat[i].name;
      }
    }
    d = fmt("max off-diagonal Gram entry = %.3g (limit 1e-7)", worst) + " [" + who + "]";
    return worst <= 1e-7;
  });

  criterion(7, "energy conservation", [&](std::string& d) {
    double worst = 0.0;
    const GridFunction u0 = GridFunction::sample(kGrid, [](double x) { return x * (1 - x); });
    const GridFunction u1 = GridFunction::sample(kGrid, [](double x) { return std::sin(2 * pi * x); });
    for (const BasisPtr& b : cat_bases) {
      const WaveSolution s = solve_homogeneous(make_problem(b, u0, u1, 4.0), uniform_times(4.0, 199));
      const std::vector<double> e = mode_energy(s);
      for (double v : e) worst = std::max(worst, std::abs(v / e[0] - 1));
    }
    d = fmt("max relative energy drift = %.3g over %g potentials (limit 1e-9)", worst, static_cast<double>(cat.size()));
    return worst <= 1e-9;
  });

  criterion(8, "spectral-fd equivalence", [](std::string& d) {
    auto u0f = [](double x) { return std::sin(pi * x) + 0.5 * std::sin(2 * pi * x); };
    const Grid fine(1600);
    const BasisPtr b = build_basis(NuPrimitive::linear(5.0), 40, fine);
    const WaveSolution spec =
        solve_homogeneous(make_problem(b, GridFunction::sample(fine, u0f), GridFunction(fine), 1.0), {1.0});
    auto fd_error = [&](std::size_t n) {
      const Grid g(n);
      const GridFunction q = GridFunction::sample(g, [](double) { return 5.0; });
      const WaveSolution fd = fd_oracle(q, GridFunction::sample(g, u0f), GridFunction(g), {}, 1.0, g.step() / 2, {1.0});
      GridFunction ref(g);
      const std::size_t stride = fine.intervals() / n;
      for (std::size_t i = 0; i < g.size(); ++i) ref.values[i] = spec.values[0][i * stride];
      return l2_norm(fd.values[0] - ref);
    };
    const double e400 = fd_error(400);
    const double e800 = fd_error(800);
    d = fmt("error h=1/400: %.3g (limit 1e-4), h=1/800: %.3g, reduction %.2fx (need >= 3)", e400, e800, e400 / e800);
    return e400 <= 1e-4 && e400 / e800 >= 3.0;
  });

  criterion(9, "forced closed form", [](std::string& d) {
    const BasisPtr b = build_basis(NuPrimitive::zero(), 40, kGrid);
    WaveProblem p = make_problem(b, GridFunction(kGrid), GridFunction(kGrid), 1.0);
    p.forcing = analyze_forcing([](double, double x) { return std::sin(pi * x); }, default_time_grid(*b, 1.0), b);
    const WaveSolution s = solve_forced(p, uniform_times(1.0, 200));
    double worst = 0.0;
    for (std::size_t j = 0; j < s.times.size(); ++j) {
      const double t = s.times[j];
      const GridFunction exact =
          GridFunction::sample(kGrid, [t](double x) { return (1 - std::cos(pi * t)) / (pi * pi) * std::sin(pi * x); });
      worst = std::max(worst, l2_norm(s.values[j] - exact));
    }
    d = fmt("max_t L2 error = %.3g (limit 1e-6)", worst);
    return worst <= 1e-6;
  });

  criterion(10, "estimate suite", [](std::string& d) {
    const std::vector<double> times = uniform_times(1.0, 100);
    auto battery = [&](const BasisPtr& b, bool forced) {
      std::vector<WaveProblem> out;
      const std::vector<double> tgrid = default_time_grid(*b, 1.0);
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        WaveProblem p = make_problem(b, random_smooth_data(b->grid(), 2 * seed),
                                     random_smooth_data(b->grid(), 2 * seed + 1), 1.0);
        if (forced) {
          const double a = 0.25 + 0.05 * static_cast<double>(seed);
          p.forcing = analyze_forcing(
              [a](double t, double x) { return a * std::cos(3 * t) * std::sin(pi * x) + x * (1 - x) * t; }, tgrid, b);
        }
        out.push_back(std::move(p));
      }
      return out;
    };

    // Every core inequality on one mollified delta.
    const BasisPtr b = build_basis(
        mollify_primitive(NuPrimitive::heaviside(0.5, 2.0), {MollifierProfile::Bump, 1.0 / 16}, kGrid), 40, kGrid);
    const std::vector<WaveProblem> hom = battery(b, false);
    const std::vector<WaveProblem> frc = battery(b, true);
    bool finite = true;
    double worst = 0.0;
    for (EstimateId id : core_estimates()) {
      const bool is_forced = to_string(id).rfind("esnh", 0) == 0;
      const SweepResult r = constant_sweep(id, is_forced ? frc : hom, times);
      for (const EstimateReport& row : r.rows) finite = finite && std::isfinite(row.ratio);
      worst = std::max(worst, r.max_ratio);
    }

    // Constant uniformity along the regularization sweep.
    const std::vector<double> ladder = dyadic_ladder(2, 9);
    double worst_slope = 0.0;
    for (double alpha : {1.0, 2.0, 4.0}) {
      std::vector<double> r1, r2, r5;
      for (double eps : ladder) {
        const BasisPtr be = build_basis(
            mollify_primitive(NuPrimitive::heaviside(0.5, alpha), {MollifierProfile::Bump, eps}, kGrid), 40, kGrid);
        const std::vector<WaveProblem> bat = battery(be, false);
        r1.push_back(constant_sweep(EstimateId::Est1, bat, times).max_ratio);
        r2.push_back(constant_sweep(EstimateId::Est2, bat, times).max_ratio);
        r5.push_back(constant_sweep(EstimateId::Est5, bat, times).max_ratio);
      }
      for (const auto* v : {&r1, &r2, &r5}) {
        const double s = fit_epsilon_trend(ladder, *v).slope;
        if (std::abs(s) >= std::abs(worst_slope)) worst_slope = s;
      }
    }
    d = fmt("13 inequalities x 20 problems: all finite = %g, max ratio = %.4g; worst est1/2/5 eps-slope = %.3g (limit 0.1)",
            finite ? 1.0 : 0.0, worst, worst_slope);
    return finite && std::abs(worst_slope) <= 0.1;
  });

  criterion(11, "existence", [](std::string& d) {
    VeryWeakExperiment e;
    e.nu = NuPrimitive::heaviside(0.5, 1.0);
    e.u0 = GridFunction::sample(e.grid, [](double x) { return x * (1 - x); });
    e.u1 = GridFunction(e.grid);
    const NetReport r = run_existence(e);
    const double qs = r.q_fit ? r.q_fit->slope : NAN;
    const double us = r.u_fit ? r.u_fit->slope : -INFINITY;
    d = fmt("||q_eps||_Linf slope = %.4f (1 +- 0.05), ||u_eps|| slope = %.4f (limit 0.1)", qs, us);
    return std::abs(qs - 1.0) <= 0.05 && us <= 0.1;
  });

  criterion(12, "uniqueness", [](std::string& d) {
    VeryWeakExperiment e;
    e.nu = NuPrimitive::heaviside(0.5, 1.0);
    e.u0 = GridFunction::sample(e.grid, [](double x) { return x * (1 - x); });
    e.u1 = GridFunction(e.grid);
    Perturbation w;
    w.potential = SmoothTerm{SmoothKind::Cosine, {-1.0 / (2 * pi), 1.0}, {}};
    w.w0 = GridFunction::sample(e.grid, [](double x) { return std::sin(pi * x); });
    bool pass = true;
    for (int m : {2, 3}) {
      const UniquenessReport r = run_uniqueness(e, m, w);
      const double s = r.fit ? r.fit->fit.slope : INFINITY;
      pass = pass && (r.degenerate || s >= m - 0.2);
      d += fmt("M=%g: slope %.4f (need >= %.1f); ", m, s, m - 0.2);
    }
    return pass;
  });

  criterion(13, "consistency", [](std::string& d) {
    bool pass = true;
    for (const auto& [name, nu] : {std::pair<std::string, NuPrimitive>{"q=5", NuPrimitive::linear(5.0)},
                                   {"q=sin(2 pi x)", NuPrimitive::cosine(-1.0 / (2 * pi), 1.0)}}) {
      VeryWeakExperiment e;
      e.nu = nu;
      e.u0 = GridFunction::sample(e.grid, [](double x) { return std::sin(pi * x); });
      e.u1 = GridFunction(e.grid);
      const ConsistencyReport r = run_consistency(e, 1e-3);
      pass = pass && r.pass;
      d += name + fmt(": final %.3g, decreasing %g, rate %.3f; ", r.rows.back().discrepancy,
                      r.strictly_decreasing ? 1.0 : 0.0, r.rate ? r.rate->slope : NAN);
    }
    return pass;
  });

  criterion(14, "determinism", [](std::string& d) {
    const fs::path configs = VWW_CONFIG_DIR;
    const fs::path scratch = fs::temp_directory_path() / ("vww_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(scratch);
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"eigs", "eigs_delta.json"},         {"solve", "solve_delta.json"},
        {"forced", "forced_sine.json"},      {"estimates", "estimates_mollified_delta.json"},
        {"veryweak", "veryweak_consistency.json"}, {"veryweak", "veryweak_uniqueness.json"},
    };
    std::size_t compared = 0;
    bool same = true;
    for (const auto& [cmd, file] : runs) {
      const fs::path a = scratch / (file + ".a");
      const fs::path b = scratch / (file + ".b");
      std::ostringstream err;
      if (cli::run_command(cmd, {configs / file, a, 1}, err) != 0 ||
          cli::run_command(cmd, {configs / file, b, 2}, err) != 0) {
        d = cmd + " " + file + " failed: " + err.str();
        fs::remove_all(scratch);
        return false;
      }
      for (const auto& entry : fs::directory_iterator(a)) {
        const std::string name = entry.path().filename().string();
        if (name == "metadata.json") continue;
        ++compared;
        if (slurp(entry.path()) != slurp(b / name)) {
          same = false;
          d += file + "/" + name + " differs; ";
        }
      }
    }
    fs::remove_all(scratch);
    d += fmt("%g files compared across reruns with 1 and 2 threads", static_cast<double>(compared));
    return same && compared > 0;
  });

  std::printf("%s: %d failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
