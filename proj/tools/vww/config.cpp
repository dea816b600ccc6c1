#include "config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "vww/error.hpp"

namespace vww::cli {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& message) {
  throw Error(ErrorCode::Config, path + ": " + message);
}

std::vector<double> numbers(const json& node, const std::string& path) {
  if (!node.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  for (const json& v : node) {
    if (!v.is_number()) bad(path, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

Section::Section(const json& node, std::string path) : node_(&node), path_(std::move(path)) {
  if (!node.is_object()) bad(path_, "expected an object");
}

bool Section::has(const std::string& key) const { return node_->contains(key); }

const json& Section::raw(const std::string& key) {
  seen_.insert(key);
  if (!node_->contains(key)) bad(path_, "missing key '" + key + "'");
  return node_->at(key);
}

Section Section::child(const std::string& key) { return Section(raw(key), path_ + "." + key); }

double Section::number(const std::string& key, std::optional<double> fallback) {
  seen_.insert(key);
  if (!node_->contains(key)) {
    if (!fallback) bad(path_, "missing key '" + key + "'");
    return *fallback;
  }
  const json& v = node_->at(key);
  if (!v.is_number()) bad(path_ + "." + key, "expected a number");
  return v.get<double>();
}

long Section::integer(const std::string& key, std::optional<long> fallback) {
  seen_.insert(key);
  if (!node_->contains(key)) {
    if (!fallback) bad(path_, "missing key '" + key + "'");
    return *fallback;
  }
  const json& v = node_->at(key);
  if (!v.is_number_integer()) bad(path_ + "." + key, "expected an integer");
  return v.get<long>();
}

bool Section::flag(const std::string& key, bool fallback) {
  seen_.insert(key);
  if (!node_->contains(key)) return fallback;
  const json& v = node_->at(key);
  if (!v.is_boolean()) bad(path_ + "." + key, "expected true or false");
  return v.get<bool>();
}

std::string Section::text(const std::string& key, std::optional<std::string> fallback) {
  seen_.insert(key);
  if (!node_->contains(key)) {
    if (!fallback) bad(path_, "missing key '" + key + "'");
    return *fallback;
  }
  const json& v = node_->at(key);
  if (!v.is_string()) bad(path_ + "." + key, "expected a string");
  return v.get<std::string>();
}

void Section::finish() const {
  for (auto it = node_->begin(); it != node_->end(); ++it) {
    if (!seen_.count(it.key())) bad(path_, "unknown key '" + it.key() + "'");
  }
}

json load_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, file.string() + ": malformed JSON: " + e.what());
  }
}

SmoothTerm parse_smooth_term(const json& node, const std::string& path) {
  Section s(node, path);
  SmoothTerm t;
  try {
    t.kind = smooth_kind_from_string(s.text("kind"));
  } catch (const Error& e) {
    bad(path, e.what());
  }
  if (s.has("params")) t.params = numbers(s.raw("params"), path + ".params");
  if (s.has("derivs")) t.derivs = numbers(s.raw("derivs"), path + ".derivs");
  s.finish();
  return t;
}

NuPrimitive parse_potential(const json& node, const std::string& path) {
  Section s(node, path);
  std::vector<SmoothTerm> smooth;
  if (s.has("smooth")) {
    const json& sm = s.raw("smooth");
    if (sm.is_array()) {
      for (std::size_t i = 0; i < sm.size(); ++i) {
        smooth.push_back(parse_smooth_term(sm[i], path + ".smooth[" + std::to_string(i) + "]"));
      }
    } else {
      smooth.push_back(parse_smooth_term(sm, path + ".smooth"));
    }
  }
  std::vector<Jump> jumps;
  if (s.has("jumps")) {
    const json& js = s.raw("jumps");
    if (!js.is_array()) bad(path + ".jumps", "expected an array of [x, alpha] pairs");
    for (const json& j : js) {
      const std::vector<double> pair = numbers(j, path + ".jumps");
      if (pair.size() != 2) bad(path + ".jumps", "each jump is [x, alpha]");
      jumps.push_back({pair[0], pair[1]});
    }
  }
  s.finish();
  try {
    return NuPrimitive(std::move(smooth), std::move(jumps));
  } catch (const Error& e) {
    bad(path, e.what());
  }
}

json describe_potential(const NuPrimitive& nu) {
  json smooth = json::array();
  for (const SmoothTerm& t : nu.smooth()) {
    json term = {{"kind", to_string(t.kind)}, {"params", t.params}};
    if (!t.derivs.empty()) term["derivs"] = t.derivs;
    smooth.push_back(term);
  }
  json jumps = json::array();
  for (const Jump& j : nu.jumps()) jumps.push_back({j.x, j.height});
  return {{"smooth", smooth}, {"jumps", jumps}};
}

GridFunction parse_data(const json& node, const Grid& grid, const std::string& path) {
  if (node.is_array()) {
    GridFunction sum(grid);
    for (std::size_t i = 0; i < node.size(); ++i) {
      sum += parse_data(node[i], grid, path + "[" + std::to_string(i) + "]");
    }
    return sum;
  }
  Section s(node, path);
  const std::string kind = s.text("kind");
  GridFunction out(grid);
  if (kind == "zero") {
  } else if (kind == "sine") {
    const std::vector<double> p = numbers(s.raw("params"), path + ".params");
    if (p.size() != 2) bad(path, "sine takes [amplitude, mode]");
    out = GridFunction::sample(grid, [&](double x) { return p[0] * std::sin(p[1] * std::numbers::pi * x); });
  } else if (kind == "bubble") {
    const std::vector<double> p = numbers(s.raw("params"), path + ".params");
    if (p.size() != 1) bad(path, "bubble takes [amplitude]");
    out = GridFunction::sample(grid, [&](double x) { return p[0] * x * (1.0 - x); });
  } else if (kind == "samples") {
    std::vector<double> v = numbers(s.raw("values"), path + ".values");
    if (v.size() != grid.size()) {
      bad(path, "samples need " + std::to_string(grid.size()) + " values, got " + std::to_string(v.size()));
    }
    out.values = std::move(v);
  } else if (kind == "random") {
    const long seed = s.integer("seed");
    const long modes = s.integer("modes", 6);
    if (seed < 0 || modes < 1) bad(path, "random needs seed >= 0 and modes >= 1");
    out = random_smooth_data(grid, static_cast<std::uint64_t>(seed), static_cast<int>(modes));
  } else {
    bad(path, "unknown data kind '" + kind + "'");
  }
  s.finish();
  return out;
}

double TimeProfile::operator()(double t) const {
  if (kind == "constant") return params[0];
  if (kind == "cos") return params[0] * std::cos(params[1] * t);
  if (kind == "sin") return params[0] * std::sin(params[1] * t);
  return params[0] + params[1] * t;  // linear
}

TimeProfile parse_time_profile(const json& node, const std::string& path) {
  Section s(node, path);
  TimeProfile p;
  p.kind = s.text("kind");
  p.params = numbers(s.raw("params"), path + ".params");
  const std::size_t need = p.kind == "constant" ? 1 : 2;
  if (p.kind != "constant" && p.kind != "cos" && p.kind != "sin" && p.kind != "linear") {
    bad(path, "unknown time profile '" + p.kind + "'");
  }
  if (p.params.size() != need) bad(path, p.kind + " takes " + std::to_string(need) + " parameters");
  s.finish();
  return p;
}

NuPrimitive BasisSettings::effective_nu() const {
  return mollifier ? mollify_primitive(nu, *mollifier, grid) : nu;
}

BasisSettings parse_basis_settings(Section& s) {
  BasisSettings b;
  b.nu = parse_potential(s.raw("potential"), s.path() + ".potential");
  const long intervals = s.integer("grid", 2048);
  if (intervals < 2 || intervals % 2) bad(s.path() + ".grid", "grid needs an even number of intervals >= 2");
  b.grid = Grid(static_cast<std::size_t>(intervals));
  const long n_max = s.integer("n_max", 40);
  if (n_max < 1) bad(s.path() + ".n_max", "n_max must be >= 1");
  b.n_max = static_cast<int>(n_max);
  if (s.has("mollifier")) {
    Section m = s.child("mollifier");
    MollifierSpec spec;
    try {
      spec.profile = mollifier_profile_from_string(m.text("profile", "bump"));
    } catch (const Error& e) {
      bad(m.path(), e.what());
    }
    spec.epsilon = m.number("epsilon");
    m.finish();
    b.mollifier = spec;
  }
  return b;
}

std::vector<double> parse_ladder(const json& node, const std::string& path) {
  if (node.is_array()) return numbers(node, path);
  Section s(node, path);
  const long lo = s.integer("k_min");
  const long hi = s.integer("k_max");
  s.finish();
  if (hi < lo) bad(path, "k_max must be >= k_min");
  return dyadic_ladder(static_cast<int>(lo), static_cast<int>(hi));
}

}  // namespace vww::cli
