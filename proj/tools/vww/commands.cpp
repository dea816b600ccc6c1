#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "config.hpp"
#include "vww/estimates.hpp"
#include "vww/parallel.hpp"
#include "vww/spectral.hpp"
#include "vww/veryweak.hpp"
#include "vww/wave.hpp"

namespace vww::cli {

namespace {

constexpr const char* kVersion = "1.0.0";

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Files are staged in memory and written only after the command succeeded.
class Outputs {
 public:
  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  void add_json(const std::string& name, const json& j) { add(name, j.dump(2) + "\n"); }

  void commit(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
    for (const auto& [name, content] : files_) {
      const std::filesystem::path target = dir / name;
      const std::filesystem::path tmp = dir / (name + ".tmp");
      {
        std::ofstream f(tmp, std::ios::binary);
        f << content;
        if (!f) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
      }
      std::filesystem::rename(tmp, target, ec);
      if (ec) throw Error(ErrorCode::Io, "cannot move " + tmp.string() + " into place: " + ec.message());
    }
  }

 private:
  std::map<std::string, std::string> files_;
};

json metadata(const std::string& command, const RunOptions& o) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return {{"command", command}, {"version", kVersion}, {"config", o.config.string()},
          {"threads", o.threads},  {"timestamp", stamp}};
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json settings_json(const BasisSettings& b) {
  json j = {{"potential", describe_potential(b.nu)}, {"grid", b.grid.intervals()}, {"n_max", b.n_max}};
  if (b.mollifier) j["mollifier"] = {{"profile", to_string(b.mollifier->profile)}, {"epsilon", b.mollifier->epsilon}};
  return j;
}

BasisPtr build(const BasisSettings& b, std::size_t threads) {
  return build_basis(b.effective_nu(), b.n_max, b.grid, {}, threads);
}

double positive(Section& s, const std::string& key, double fallback) {
  const double v = s.number(key, fallback);
  if (!(v > 0.0)) throw Error(ErrorCode::Config, s.path() + "." + key + " must be positive");
  return v;
}

std::size_t count(Section& s, const std::string& key, long fallback) {
  const long v = s.integer(key, fallback);
  if (v < 1) throw Error(ErrorCode::Config, s.path() + "." + key + " must be >= 1");
  return static_cast<std::size_t>(v);
}

// ---------------------------------------------------------------------------

void cmd_eigs(const RunOptions& o, Outputs& out) {
  const json cfg = load_json(o.config);
  Section s(cfg, "config");
  const BasisSettings b = parse_basis_settings(s);
  const bool cache = s.flag("cache", false);
  const bool cache_samples = s.flag("cache_samples", false);
  s.finish();

  const BasisPtr basis = build(b, o.threads);
  const std::vector<ResidualRow> residuals = asymptotic_residuals(*basis);
  std::ostringstream csv;
  csv << "n,lambda,residual,tilde_norm,psi_norm\n";
  json lambdas = json::array();
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const EigenPair& p = (*basis)[i];
    csv << p.n << ',' << num(p.lambda) << ',' << num(p.theta_residual) << ',' << num(p.tilde_norm) << ','
        << num(residuals[i].psi_norm) << '\n';
    lambdas.push_back(p.lambda);
  }
  out.add("eigs.csv", csv.str());

  json report = settings_json(b);
  report["command"] = "eigs";
  report["eigenvalues"] = lambdas;
  report["gram_off_diagonal"] = basis->gram_off_diagonal();
  report["gram_diagonal"] = basis->gram_diagonal();
  report["orthonormal"] = basis->gram_off_diagonal() <= 1e-7 && basis->gram_diagonal() <= 1e-7;
  out.add_json("report.json", report);

  if (cache) {
    json c = settings_json(b);
    c["eigenvalues"] = lambdas;
    c["has_samples"] = cache_samples;
    if (cache_samples) {
      json rows = json::array();
      for (const EigenPair& p : basis->pairs()) rows.push_back(p.phi.values);
      c["eigenfunctions"] = rows;
    }
    out.add_json("basis.json", c);
  }
}

struct SolveInputs {
  BasisSettings basis;
  GridFunction u0, u1;
  double horizon = 1.0;
  std::size_t time_samples = 200;
  std::size_t x_stride = 1;
  std::optional<GridFunction> space;
  std::optional<TimeProfile> time;
  std::optional<double> dt;
};

SolveInputs parse_solve(Section& s, bool forced) {
  SolveInputs in;
  in.basis = parse_basis_settings(s);
  in.u0 = parse_data(s.raw("u0"), in.basis.grid, "config.u0");
  in.u1 = parse_data(s.raw("u1"), in.basis.grid, "config.u1");
  in.horizon = positive(s, "T", 1.0);
  in.time_samples = count(s, "time_samples", 200);
  in.x_stride = count(s, "x_stride", static_cast<long>(std::max<std::size_t>(1, in.basis.grid.intervals() / 64)));
  if (forced) {
    if (!s.has("forcing")) throw Error(ErrorCode::Config, "config: forced solve needs a 'forcing' block");
    Section f = s.child("forcing");
    in.space = parse_data(f.raw("space"), in.basis.grid, "config.forcing.space");
    in.time = parse_time_profile(f.raw("time"), "config.forcing.time");
    if (f.has("dt")) in.dt = positive(f, "dt", 1.0);
    f.finish();
  }
  return in;
}

std::vector<double> forcing_grid(const SolveInputs& in, const EigenBasis& basis) {
  if (!in.dt) return default_time_grid(basis, in.horizon);
  auto steps = static_cast<std::size_t>(std::ceil(in.horizon / *in.dt - 1e-9));
  if (steps % 2) ++steps;
  return uniform_times(in.horizon, std::max<std::size_t>(steps, 2));
}

ForcingTable separable_forcing(const SolveInputs& in, const BasisPtr& basis, const std::vector<double>& times) {
  const std::vector<double> c = analyze(*in.space, basis).coeffs;
  ForcingTable table;
  table.times = times;
  for (double t : times) {
    const double g = (*in.time)(t);
    std::vector<double> row(c.size());
    for (std::size_t n = 0; n < c.size(); ++n) row[n] = g * c[n];
    table.coeffs.push_back(std::move(row));
  }
  return table;
}

void write_solution(const WaveSolution& sol, std::size_t stride, const json& settings, const std::string& command,
                    Outputs& out) {
  std::ostringstream csv;
  csv << "t,x,u,u_t\n";
  const Grid& grid = sol.basis->grid();
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    for (std::size_t i = 0; i < grid.size(); i += stride) {
      csv << num(sol.times[j]) << ',' << num(grid.node(i)) << ',' << num(sol.values[j].values[i]) << ','
          << num(sol.dt_values[j].values[i]) << '\n';
    }
  }
  out.add("solution.csv", csv.str());

  const std::vector<double> energy = mode_energy(sol);
  double drift = 0.0;
  for (double e : energy) drift = std::max(drift, std::abs(e - energy.front()));
  json norms = json::array();
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    norms.push_back({{"t", sol.times[j]},
                     {"u_l2", l2_norm(sol.values[j])},
                     {"ut_l2", l2_norm(sol.dt_values[j])},
                     {"energy", energy[j]}});
  }
  json report = settings;
  report["command"] = command;
  report["energy_relative_drift"] = energy.front() > 0.0 ? drift / energy.front() : drift;
  report["series"] = norms;
  out.add_json("report.json", report);

  std::ostringstream dat;
  dat << "# t energy u_l2 ut_l2\n";
  for (std::size_t j = 0; j < sol.times.size(); ++j) {
    dat << num(sol.times[j]) << ' ' << num(energy[j]) << ' ' << num(l2_norm(sol.values[j])) << ' '
        << num(l2_norm(sol.dt_values[j])) << '\n';
  }
  out.add("energy.dat", dat.str());
}

void cmd_solve(const RunOptions& o, Outputs& out, bool forced) {
  const json cfg = load_json(o.config);
  Section s(cfg, "config");
  const SolveInputs in = parse_solve(s, forced);
  s.finish();

  const BasisPtr basis = build(in.basis, o.threads);
  WaveProblem p = make_problem(basis, in.u0, in.u1, in.horizon);
  const std::vector<double> times = uniform_times(in.horizon, in.time_samples);
  json settings = settings_json(in.basis);
  settings["T"] = in.horizon;
  WaveSolution sol;
  if (forced) {
    p.forcing = separable_forcing(in, basis, forcing_grid(in, *basis));
    settings["forcing_dt"] = p.forcing->step();
    sol = solve_forced(p, times);
  } else {
    sol = solve_homogeneous(p, times);
  }
  write_solution(sol, in.x_stride, settings, forced ? "forced" : "solve", out);
}

void cmd_estimates(const RunOptions& o, Outputs& out) {
  const json cfg = load_json(o.config);
  Section s(cfg, "config");
  SolveInputs in;
  in.basis = parse_basis_settings(s);
  in.u0 = parse_data(s.raw("u0"), in.basis.grid, "config.u0");
  in.u1 = parse_data(s.raw("u1"), in.basis.grid, "config.u1");
  in.horizon = positive(s, "T", 1.0);
  in.time_samples = count(s, "time_samples", 100);
  EstimateOptions eo;
  eo.k = s.number("k", 1.0);
  if (s.has("forcing")) {
    Section f = s.child("forcing");
    in.space = parse_data(f.raw("space"), in.basis.grid, "config.forcing.space");
    in.time = parse_time_profile(f.raw("time"), "config.forcing.time");
    if (f.has("dt")) in.dt = positive(f, "dt", 1.0);
    f.finish();
  }
  std::vector<EstimateId> ids = core_estimates();
  if (s.has("ids")) {
    const json& node = s.raw("ids");
    if (node.is_string() && node.get<std::string>() == "all") {
      ids = all_estimates();
    } else if (node.is_string() && node.get<std::string>() == "core") {
      ids = core_estimates();
    } else if (node.is_array()) {
      ids.clear();
      for (const json& v : node) {
        if (!v.is_string()) throw Error(ErrorCode::Config, "config.ids: expected estimate names");
        try {
          ids.push_back(estimate_id_from_string(v.get<std::string>()));
        } catch (const Error& e) {
          throw Error(ErrorCode::Config, std::string("config.ids: ") + e.what());
        }
      }
    } else {
      throw Error(ErrorCode::Config, "config.ids: expected \"all\", \"core\" or an array of names");
    }
  }
  s.finish();

  const BasisPtr basis = build(in.basis, o.threads);
  const std::vector<double> times = uniform_times(in.horizon, in.time_samples);
  const WaveProblem free = make_problem(basis, in.u0, in.u1, in.horizon);
  const WaveSolution free_sol = solve_homogeneous(free, times);
  WaveProblem driven = free;
  WaveSolution driven_sol = free_sol;
  if (in.space) {
    driven.forcing = separable_forcing(in, basis, forcing_grid(in, *basis));
    driven_sol = solve_forced(driven, times);
  }

  std::vector<json> rows(ids.size());
  parallel_for(ids.size(), o.threads, [&](std::size_t i) {
    const EstimateId id = ids[i];
    const bool nonhomogeneous = id >= EstimateId::Esnh1;
    const WaveProblem& p = nonhomogeneous ? driven : free;
    const WaveSolution& sol = nonhomogeneous ? driven_sol : free_sol;
    try {
      const EstimateReport r = verify(id, p, sol, eo);
      rows[i] = {{"estimate_id", to_string(id)}, {"lhs_max", r.lhs_max}, {"lhs_time", r.lhs_time},
                 {"rhs", r.rhs},                 {"ratio", nullable(r.ratio)}, {"inputs", r.inputs},
                 {"problem_hash", hex(r.problem_hash)}};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::MissingNorm) throw;
      rows[i] = {{"estimate_id", to_string(id)}, {"error", e.what()}, {"problem_hash", hex(problem_hash(p))}};
    }
  });

  json reports = json::array();
  std::ostringstream csv;
  csv << "estimate_id,ratio,problem_hash\n";
  for (const json& r : rows) {
    reports.push_back(r);
    const bool ok = r.contains("ratio") && r["ratio"].is_number();
    csv << r["estimate_id"].get<std::string>() << ',' << (ok ? num(r["ratio"].get<double>()) : "nan") << ','
        << r["problem_hash"].get<std::string>() << '\n';
  }
  json report = settings_json(in.basis);
  report["command"] = "estimates";
  report["T"] = in.horizon;
  report["reports"] = reports;
  out.add_json("report.json", report);
  out.add("estimates.csv", csv.str());
}

void write_net(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows, Outputs& out) {
  std::ostringstream csv;
  std::ostringstream dat;
  dat << "#";
  for (std::size_t c = 0; c < header.size(); ++c) {
    csv << (c ? "," : "") << header[c];
    dat << ' ' << header[c];
  }
  csv << '\n';
  dat << '\n';
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      csv << (c ? "," : "") << num(row[c]);
      dat << (c ? " " : "") << num(row[c]);
    }
    csv << '\n';
    dat << '\n';
  }
  out.add("net.csv", csv.str());
  out.add("net.dat", dat.str());
}

json fit_json(const std::optional<PowerFit>& f) {
  if (!f) return nullptr;
  return {{"slope", f->slope}, {"intercept", f->intercept}, {"max_deviation", f->max_deviation}};
}

void cmd_veryweak(const RunOptions& o, Outputs& out) {
  const json cfg = load_json(o.config);
  Section s(cfg, "config");
  VeryWeakExperiment e;
  e.nu = parse_potential(s.raw("potential"), "config.potential");
  const long intervals = s.integer("grid", 2048);
  if (intervals < 2 || intervals % 2) throw Error(ErrorCode::Config, "config.grid: need an even count >= 2");
  e.grid = Grid(static_cast<std::size_t>(intervals));
  e.n_max = static_cast<int>(count(s, "n_max", 40));
  e.u0 = parse_data(s.raw("u0"), e.grid, "config.u0");
  e.u1 = parse_data(s.raw("u1"), e.grid, "config.u1");
  if (s.has("ladder")) e.ladder = parse_ladder(s.raw("ladder"), "config.ladder");
  if (e.ladder.size() < 4) {
    throw Error(ErrorCode::Config, "config.ladder: need at least 4 epsilon values, got " +
                                       std::to_string(e.ladder.size()));
  }
  try {
    e.profile = mollifier_profile_from_string(s.text("profile", "bump"));
  } catch (const Error& err) {
    throw Error(ErrorCode::Config, std::string("config.profile: ") + err.what());
  }
  e.horizon = positive(s, "T", 1.0);
  e.time_samples = count(s, "time_samples", 100);
  e.data_exponent = s.number("data_exponent", 0.0);
  e.threads = o.threads;
  const std::string mode = s.text("mode");
  const long order = s.integer("order", 2);
  const long declared = s.integer("declared_order", 0);
  const double tolerance = s.number("tolerance", 1e-3);
  Perturbation w;
  if (s.has("perturbation")) {
    Section p = s.child("perturbation");
    if (p.has("potential")) w.potential = parse_smooth_term(p.raw("potential"), "config.perturbation.potential");
    if (p.has("w0")) w.w0 = parse_data(p.raw("w0"), e.grid, "config.perturbation.w0");
    if (p.has("w1")) w.w1 = parse_data(p.raw("w1"), e.grid, "config.perturbation.w1");
    if (p.has("second_profile")) {
      try {
        w.second_profile = mollifier_profile_from_string(p.text("second_profile"));
      } catch (const Error& err) {
        throw Error(ErrorCode::Config, std::string("config.perturbation.second_profile: ") + err.what());
      }
    }
    p.finish();
  }
  s.finish();
  try {
    e.validate();
  } catch (const Error& err) {
    if (err.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::Config, err.what());
    throw;
  }

  json report = {{"command", "veryweak"},        {"mode", mode},
                 {"potential", describe_potential(e.nu)}, {"grid", e.grid.intervals()},
                 {"n_max", e.n_max},             {"profile", to_string(e.profile)},
                 {"T", e.horizon},               {"ladder", e.ladder}};
  if (mode == "existence") {
    const NetReport r = run_existence(e, static_cast<int>(declared));
    std::vector<std::vector<double>> rows;
    json jr = json::array();
    for (const NetRow& row : r.rows) {
      rows.push_back({row.epsilon, row.u_norm, row.ut_norm, row.q_linf});
      jr.push_back({{"epsilon", row.epsilon}, {"u_norm", row.u_norm}, {"ut_norm", row.ut_norm},
                    {"q_linf", row.q_linf}, {"lambda1", row.lambda1}});
    }
    write_net({"epsilon", "u_norm", "ut_norm", "q_linf"}, rows, out);
    report["rows"] = jr;
    report["u_fit"] = fit_json(r.u_fit);
    report["ut_fit"] = fit_json(r.ut_fit);
    report["q_fit"] = fit_json(r.q_fit);
    report["declared_order"] = r.declared_order;
    report["moderate"] = r.moderate;
  } else if (mode == "uniqueness") {
    const UniquenessReport r = run_uniqueness(e, static_cast<int>(order), w);
    std::vector<std::vector<double>> rows;
    json jr = json::array();
    for (const UniquenessRow& row : r.rows) {
      rows.push_back({row.epsilon, row.diff_norm, row.force_norm, row.bound_ratio});
      jr.push_back({{"epsilon", row.epsilon}, {"diff_norm", row.diff_norm}, {"force_norm", row.force_norm},
                    {"bound_ratio", row.bound_ratio}});
    }
    write_net({"epsilon", "diff_norm", "force_norm", "bound_ratio"}, rows, out);
    report["rows"] = jr;
    report["order"] = r.order;
    report["fit"] = r.fit ? fit_json(r.fit->fit) : json(nullptr);
    report["degenerate"] = r.degenerate;
    report["negligible"] = r.pass;
  } else if (mode == "consistency") {
    const ConsistencyReport r = run_consistency(e, tolerance);
    std::vector<std::vector<double>> rows;
    json jr = json::array();
    for (const ConsistencyRow& row : r.rows) {
      rows.push_back({row.epsilon, row.discrepancy});
      jr.push_back({{"epsilon", row.epsilon}, {"discrepancy", row.discrepancy}});
    }
    write_net({"epsilon", "discrepancy"}, rows, out);
    report["rows"] = jr;
    report["rate"] = fit_json(r.rate);
    report["strictly_decreasing"] = r.strictly_decreasing;
    report["spike_flagged"] = r.spike_flagged;
    report["tolerance"] = r.tolerance;
    report["consistent"] = r.pass;
  } else {
    throw Error(ErrorCode::Config, "config.mode: expected existence, uniqueness or consistency, got '" + mode + "'");
  }
  out.add_json("report.json", report);
}

}  // namespace

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::InvalidArgument:
    case ErrorCode::UnresolvedMollifier:
    case ErrorCode::GridMismatch:
    case ErrorCode::TimeGridTooCoarse:
    case ErrorCode::CFLViolation:
    case ErrorCode::NotBoundedPotential: return 2;
    case ErrorCode::Io: return 4;
    default: return 3;
  }
}

int run_command(const std::string& command, const RunOptions& options, std::ostream& err) {
  RunOptions o = options;
  o.threads = resolve_threads(o.threads);
  try {
    Outputs out;
    if (command == "eigs") {
      cmd_eigs(o, out);
    } else if (command == "solve") {
      cmd_solve(o, out, false);
    } else if (command == "forced") {
      cmd_solve(o, out, true);
    } else if (command == "estimates") {
      cmd_estimates(o, out);
    } else if (command == "veryweak") {
      cmd_veryweak(o, out);
    } else {
      err << "unknown command '" << command << "'\n";
      return 2;
    }
    out.add_json("metadata.json", metadata(command, o));
    out.commit(o.out);
    return 0;
  } catch (const Error& e) {
    err << "vww " << command << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "vww " << command << ": " << e.what() << '\n';
    return 4;
  }
}

}  // namespace vww::cli
