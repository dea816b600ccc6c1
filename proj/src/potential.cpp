#include "vww/potential.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "vww/error.hpp"
#include "vww/quadrature.hpp"

namespace vww {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct SampledCell {
  std::size_t j;
  double t;
  double width;
};

SampledCell locate(const std::vector<double>& values, double x) {
  const std::size_t cells = values.size() - 1;
  const double u = std::clamp(x, 0.0, 1.0) * static_cast<double>(cells);
  std::size_t j = static_cast<std::size_t>(std::floor(u));
  if (j >= cells) j = cells - 1;
  return {j, u - static_cast<double>(j), 1.0 / static_cast<double>(cells)};
}

void validate_term(const SmoothTerm& t) {
  auto need = [&](std::size_t n) {
    if (t.params.size() != n) {
      throw Error(ErrorCode::InvalidArgument, "smooth term '" + to_string(t.kind) + "' takes " +
                                                  std::to_string(n) + " parameters, got " +
                                                  std::to_string(t.params.size()));
    }
  };
  switch (t.kind) {
    case SmoothKind::Zero: need(0); break;
    case SmoothKind::Constant:
    case SmoothKind::Linear: need(1); break;
    case SmoothKind::Sine:
    case SmoothKind::Cosine: need(2); break;
    case SmoothKind::Sampled:
      if (t.params.size() < 2) {
        throw Error(ErrorCode::InvalidArgument, "sampled smooth term needs at least two values");
      }
      if (!t.derivs.empty() && t.derivs.size() != t.params.size()) {
        throw Error(ErrorCode::InvalidArgument, "sampled derivative count must match value count");
      }
      break;
  }
  for (double p : t.params) {
    if (!std::isfinite(p)) throw Error(ErrorCode::InvalidArgument, "non-finite smooth parameter");
  }
}

// Piecewise pieces of [0,1] separated by kinks, each subdivided.
std::vector<double> piece_edges(const NuPrimitive& nu, std::size_t min_pieces) {
  std::vector<double> edges{0.0};
  for (double k : nu.kinks()) edges.push_back(k);
  edges.push_back(1.0);
  const std::size_t panels = edges.size() - 1;
  const std::size_t sub = std::max<std::size_t>(1, min_pieces / panels);
  std::vector<double> out{0.0};
  for (std::size_t p = 0; p < panels; ++p) {
    for (std::size_t s = 1; s <= sub; ++s) {
      out.push_back(edges[p] + (edges[p + 1] - edges[p]) * static_cast<double>(s) / static_cast<double>(sub));
    }
  }
  return out;
}

// Tabulated CDF of a profile, interpolated by cubic Hermite with psi as slope.
class ProfileTable {
 public:
  explicit ProfileTable(MollifierProfile p) : profile_(p) {
    const double raw_mass = composite_gauss([&](double s) { return raw(s); }, -1.0, 1.0, 32, 16);
    normalization_ = 1.0 / raw_mass;
    cdf_.assign(kCells + 1, 0.0);
    const double h = 2.0 / kCells;
    for (std::size_t i = 0; i < kCells; ++i) {
      const double a = -1.0 + h * static_cast<double>(i);
      cdf_[i + 1] = cdf_[i] + composite_gauss([&](double s) { return density(s); }, a, a + h, 1, 8);
    }
  }

  double raw(double s) const {
    if (s <= -1.0 || s >= 1.0) return 0.0;
    const double b = std::exp(-1.0 / (1.0 - s * s));
    return profile_ == MollifierProfile::Bump ? b : b * (1.0 + 0.5 * s);
  }

  double density(double s) const { return normalization_ * raw(s); }
  double normalization() const { return normalization_; }

  double cdf(double s) const {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return cdf_.back();
    const double h = 2.0 / kCells;
    const double u = (s + 1.0) / h;
    std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(u), kCells - 1);
    const double t = u - static_cast<double>(j);
    const double a = -1.0 + h * static_cast<double>(j);
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * cdf_[j] + (t3 - 2 * t2 + t) * h * density(a) +
           (-2 * t3 + 3 * t2) * cdf_[j + 1] + (t3 - t2) * h * density(a + h);
  }

 private:
  static constexpr std::size_t kCells = 4000;
  MollifierProfile profile_;
  double normalization_ = 1.0;
  std::vector<double> cdf_;
};

const ProfileTable& table(MollifierProfile p) {
  static const ProfileTable bump(MollifierProfile::Bump);
  static const ProfileTable skewed(MollifierProfile::SkewedBump);
  return p == MollifierProfile::Bump ? bump : skewed;
}

bool term_needs_quadrature(const SmoothTerm& t) {
  return t.kind == SmoothKind::Sine || t.kind == SmoothKind::Cosine || t.kind == SmoothKind::Sampled;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(SmoothKind kind) {
  switch (kind) {
    case SmoothKind::Zero: return "zero";
    case SmoothKind::Constant: return "constant";
    case SmoothKind::Linear: return "linear";
    case SmoothKind::Sine: return "sine";
    case SmoothKind::Cosine: return "cosine";
    case SmoothKind::Sampled: return "sampled";
  }
  return "zero";
}

SmoothKind smooth_kind_from_string(const std::string& name) {
  for (SmoothKind k : {SmoothKind::Zero, SmoothKind::Constant, SmoothKind::Linear, SmoothKind::Sine,
                       SmoothKind::Cosine, SmoothKind::Sampled}) {
    if (to_string(k) == name) return k;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown smooth kind '" + name + "'");
}

double SmoothTerm::value(double x) const {
  switch (kind) {
    case SmoothKind::Zero: return 0.0;
    case SmoothKind::Constant: return params[0];
    case SmoothKind::Linear: return params[0] * x;
    case SmoothKind::Sine: return params[0] * std::sin(kTwoPi * params[1] * x);
    case SmoothKind::Cosine: return params[0] * std::cos(kTwoPi * params[1] * x);
    case SmoothKind::Sampled: {
      const SampledCell c = locate(params, x);
      const double v0 = params[c.j];
      const double v1 = params[c.j + 1];
      if (derivs.empty()) return v0 + c.t * (v1 - v0);
      const double t = c.t;
      const double t2 = t * t;
      const double t3 = t2 * t;
      return (2 * t3 - 3 * t2 + 1) * v0 + (t3 - 2 * t2 + t) * c.width * derivs[c.j] +
             (-2 * t3 + 3 * t2) * v1 + (t3 - t2) * c.width * derivs[c.j + 1];
    }
  }
  return 0.0;
}

double SmoothTerm::derivative(double x) const {
  switch (kind) {
    case SmoothKind::Zero:
    case SmoothKind::Constant: return 0.0;
    case SmoothKind::Linear: return params[0];
    case SmoothKind::Sine: return kTwoPi * params[1] * params[0] * std::cos(kTwoPi * params[1] * x);
    case SmoothKind::Cosine: return -kTwoPi * params[1] * params[0] * std::sin(kTwoPi * params[1] * x);
    case SmoothKind::Sampled: {
      const SampledCell c = locate(params, x);
      const double v0 = params[c.j];
      const double v1 = params[c.j + 1];
      if (derivs.empty()) return (v1 - v0) / c.width;
      const double t = c.t;
      const double t2 = t * t;
      return ((6 * t2 - 6 * t) * v0 + (-6 * t2 + 6 * t) * v1) / c.width +
             (3 * t2 - 4 * t + 1) * derivs[c.j] + (3 * t2 - 2 * t) * derivs[c.j + 1];
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

NuPrimitive::NuPrimitive(std::vector<SmoothTerm> smooth, std::vector<Jump> jumps)
    : smooth_(std::move(smooth)), jumps_(std::move(jumps)) {
  for (const SmoothTerm& t : smooth_) validate_term(t);
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    const Jump& j = jumps_[i];
    if (!(j.x > 0.0 && j.x < 1.0) || !std::isfinite(j.height)) {
      throw Error(ErrorCode::InvalidArgument,
                  "jump location " + std::to_string(j.x) + " must lie strictly inside (0,1)");
    }
    if (i > 0 && !(j.x > jumps_[i - 1].x)) {
      throw Error(ErrorCode::InvalidArgument, "jump locations must be strictly increasing");
    }
  }
  jump_prefix_.assign(jumps_.size() + 1, 0.0);
  for (std::size_t i = 0; i < jumps_.size(); ++i) jump_prefix_[i + 1] = jump_prefix_[i] + jumps_[i].height;
}

NuPrimitive NuPrimitive::zero() { return NuPrimitive({}, {}); }
NuPrimitive NuPrimitive::constant(double c) { return NuPrimitive({{SmoothKind::Constant, {c}, {}}}, {}); }
NuPrimitive NuPrimitive::linear(double c) { return NuPrimitive({{SmoothKind::Linear, {c}, {}}}, {}); }
NuPrimitive NuPrimitive::heaviside(double x0, double alpha) { return NuPrimitive({}, {{x0, alpha}}); }
NuPrimitive NuPrimitive::sine(double a, double m) { return NuPrimitive({{SmoothKind::Sine, {a, m}, {}}}, {}); }
NuPrimitive NuPrimitive::cosine(double a, double m) {
  return NuPrimitive({{SmoothKind::Cosine, {a, m}, {}}}, {});
}

double NuPrimitive::smooth_value(double x) const {
  double v = 0.0;
  for (const SmoothTerm& t : smooth_) v += t.value(x);
  return v;
}

double NuPrimitive::smooth_q(double x) const {
  double v = 0.0;
  for (const SmoothTerm& t : smooth_) v += t.derivative(x);
  return v;
}

double NuPrimitive::operator()(double x) const {
  // Left limit: count jumps with x_i < x.
  const auto it = std::lower_bound(jumps_.begin(), jumps_.end(), x,
                                   [](const Jump& j, double v) { return j.x < v; });
  return smooth_value(x) + jump_prefix_[static_cast<std::size_t>(it - jumps_.begin())];
}

double NuPrimitive::on_panel(double x, std::size_t panel) const {
  return smooth_value(x) + jump_prefix_[std::min(panel, jumps_.size())];
}

std::vector<double> NuPrimitive::kinks() const {
  std::vector<double> k;
  for (const Jump& j : jumps_) k.push_back(j.x);
  for (const SmoothTerm& t : smooth_) {
    if (t.kind != SmoothKind::Sampled) continue;
    const std::size_t cells = t.params.size() - 1;
    for (std::size_t i = 1; i < cells; ++i) k.push_back(static_cast<double>(i) / static_cast<double>(cells));
  }
  std::sort(k.begin(), k.end());
  k.erase(std::unique(k.begin(), k.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
          k.end());
  return k;
}

double NuPrimitive::l2_norm() const {
  const std::vector<double> edges = piece_edges(*this, 512);
  double total = 0.0;
  std::size_t panel = 0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p];
    const double b = edges[p + 1];
    while (panel < jumps_.size() && jumps_[panel].x <= a + 1e-15) ++panel;
    total += composite_gauss(
        [&](double x) {
          const double v = on_panel(x, panel);
          return v * v;
        },
        a, b, 1, 8);
  }
  return std::sqrt(total);
}

double NuPrimitive::linf_norm() const {
  const std::vector<double> edges = piece_edges(*this, 512);
  double m = 0.0;
  std::size_t panel = 0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p];
    const double b = edges[p + 1];
    while (panel < jumps_.size() && jumps_[panel].x <= a + 1e-15) ++panel;
    constexpr int kSamples = 32;
    for (int s = 0; s <= kSamples; ++s) {
      const double x = a + (b - a) * s / kSamples;
      m = std::max(m, std::abs(on_panel(x, panel)));
    }
  }
  return m;
}

std::optional<double> NuPrimitive::q_linf() const {
  if (has_atoms()) return std::nullopt;
  const std::vector<double> edges = piece_edges(*this, 512);
  double m = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    constexpr int kSamples = 32;
    for (int s = 0; s <= kSamples; ++s) {
      // Stay inside the piece so one-sided derivatives of sampled terms are used.
      const double frac = (s == 0) ? 1e-12 : (s == kSamples ? 1.0 - 1e-12 : double(s) / kSamples);
      m = std::max(m, std::abs(smooth_q(edges[p] + (edges[p + 1] - edges[p]) * frac)));
    }
  }
  return m;
}

double NuPrimitive::total_mass() const {
  return jump_prefix_.back() + smooth_value(1.0) - smooth_value(0.0);
}

GridFunction NuPrimitive::sample(const Grid& grid) const {
  return GridFunction::sample(grid, [this](double x) { return (*this)(x); });
}

GridFunction NuPrimitive::sample_q(const Grid& grid, bool skip_atoms,
                                   std::vector<std::size_t>* atom_nodes) const {
  GridFunction q = GridFunction::sample(grid, [this](double x) { return smooth_q(x); });
  for (const Jump& j : jumps_) {
    const std::size_t idx = grid.index_of(j.x);
    if (idx == Grid::npos) continue;
    if (!skip_atoms) {
      throw Error(ErrorCode::AtomEvaluation,
                  "potential has a delta atom at grid node x=" + std::to_string(j.x));
    }
    if (atom_nodes) atom_nodes->push_back(idx);
  }
  return q;
}

double ZeroExtension::operator()(double x) const {
  if (!(x > 0.0 && x < 1.0)) return 0.0;
  const Grid& g = f_.grid;
  const double u = x * static_cast<double>(g.intervals());
  std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(u), g.intervals() - 1);
  const double t = u - static_cast<double>(j);
  return (1.0 - t) * f_.values[j] + t * f_.values[j + 1];
}

ZeroExtension extend_by_zero(const GridFunction& f) { return ZeroExtension(f); }

// ---------------------------------------------------------------------------

std::string to_string(MollifierProfile p) {
  return p == MollifierProfile::Bump ? "bump" : "skewed";
}

MollifierProfile mollifier_profile_from_string(const std::string& name) {
  if (name == "bump") return MollifierProfile::Bump;
  if (name == "skewed") return MollifierProfile::SkewedBump;
  throw Error(ErrorCode::InvalidArgument, "unknown mollifier profile '" + name + "'");
}

double profile_density(MollifierProfile p, double s) { return table(p).density(s); }
double profile_cdf(MollifierProfile p, double s) { return table(p).cdf(s); }
double profile_normalization(MollifierProfile p) { return table(p).normalization(); }

double MollifierSpec::kernel(double x) const { return profile_density(profile, x / epsilon) / epsilon; }
double MollifierSpec::kernel_cdf(double x) const { return profile_cdf(profile, x / epsilon); }

void require_resolved(const MollifierSpec& m, const Grid& grid) {
  if (!(m.epsilon > 0.0 && m.epsilon <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must lie in (0,1], got " + std::to_string(m.epsilon));
  }
  const double steps = 2.0 * m.epsilon / grid.step();
  if (steps < 8.0 - 1e-9) {
    throw Error(ErrorCode::UnresolvedMollifier,
                "grid with " + std::to_string(grid.intervals()) + " intervals resolves only " +
                    std::to_string(steps) + " steps across [-eps,eps] for eps=" + std::to_string(m.epsilon));
  }
}

double mollified_q(const NuPrimitive& nu, const MollifierSpec& m, double x) {
  const double eps = m.epsilon;
  double q = 0.0;
  for (const Jump& j : nu.jumps()) q += j.height * m.kernel(x - j.x);

  // Zero-extended smooth part: y in (0,1) maps to s = (x-y)/eps.
  const double s_lo = std::max(-1.0, (x - 1.0) / eps);
  const double s_hi = std::min(1.0, x / eps);
  if (s_hi <= s_lo) return q;
  bool quadrature = false;
  for (const SmoothTerm& t : nu.smooth()) {
    if (t.kind == SmoothKind::Linear) {
      q += t.params[0] * (profile_cdf(m.profile, s_hi) - profile_cdf(m.profile, s_lo));
    } else if (term_needs_quadrature(t)) {
      quadrature = true;
    }
  }
  if (quadrature) {
    const double w = s_hi - s_lo;
    const std::size_t panels = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(12.0 * w)));
    q += composite_gauss(
        [&](double s) {
          const double y = x - eps * s;
          double v = 0.0;
          for (const SmoothTerm& t : nu.smooth()) {
            if (term_needs_quadrature(t)) v += t.derivative(y);
          }
          return v * profile_density(m.profile, s);
        },
        s_lo, s_hi, panels, 16);
  }
  return q;
}

GridFunction mollify_potential(const NuPrimitive& nu, const MollifierSpec& m, const Grid& grid) {
  require_resolved(m, grid);
  return GridFunction::sample(grid, [&](double x) { return mollified_q(nu, m, x); });
}

NuPrimitive mollify_primitive(const NuPrimitive& nu, const MollifierSpec& m, const Grid& grid) {
  require_resolved(m, grid);
  const std::size_t n = grid.size();
  std::vector<double> values(n, 0.0);
  std::vector<double> derivs(n, 0.0);

  // Smooth part of q_eps only; atoms are integrated in closed form below.
  const NuPrimitive smooth_only(nu.smooth(), {});
  const double h = grid.step();
  CompensatedSum running;
  for (std::size_t i = 0; i < n; ++i) {
    derivs[i] = mollified_q(nu, m, grid.node(i));
    if (i > 0) {
      const double a = grid.node(i - 1);
      running.add(composite_gauss([&](double x) { return mollified_q(smooth_only, m, x); }, a, a + h, 1, 4));
    }
    double v = running.value();
    for (const Jump& j : nu.jumps()) {
      v += j.height * (m.kernel_cdf(grid.node(i) - j.x) - m.kernel_cdf(-j.x));
    }
    values[i] = v;
  }
  SmoothTerm term{SmoothKind::Sampled, std::move(values), std::move(derivs)};
  return NuPrimitive({std::move(term)}, {});
}

NuPrimitive with_extra_term(const NuPrimitive& nu, SmoothTerm term) {
  std::vector<SmoothTerm> smooth = nu.smooth();
  smooth.push_back(std::move(term));
  return NuPrimitive(std::move(smooth), nu.jumps());
}

// ---------------------------------------------------------------------------

std::vector<double> dyadic_ladder(int k_min, int k_max) {
  std::vector<double> l;
  for (int k = k_min; k <= k_max; ++k) l.push_back(std::ldexp(1.0, -k));
  return l;
}

std::vector<double> default_ladder() { return dyadic_ladder(2, 9); }

void RegularizedNet::validate() const {
  if (ladder.size() < 4) {
    throw Error(ErrorCode::InvalidArgument,
                "net ladder needs at least 4 points, got " + std::to_string(ladder.size()));
  }
  if (norms.size() != ladder.size()) {
    throw Error(ErrorCode::InvalidArgument, "net has " + std::to_string(norms.size()) + " norms for " +
                                                std::to_string(ladder.size()) + " ladder points");
  }
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (!(ladder[i] > 0.0) || (i > 0 && !(ladder[i] < ladder[i - 1]))) {
      throw Error(ErrorCode::InvalidArgument, "ladder must be positive and strictly decreasing");
    }
  }
  if (!members.empty()) {
    for (const GridFunction& f : members) require_same_grid(f.grid, members.front().grid, "net member");
  }
}

namespace {

PowerFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  PowerFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    f.max_deviation = std::max(f.max_deviation, std::abs(ys[i] - (f.intercept + f.slope * xs[i])));
  }
  return f;
}

void require_positive_norms(const RegularizedNet& net) {
  for (std::size_t i = 0; i < net.norms.size(); ++i) {
    if (!(net.norms[i] > 0.0) || !std::isfinite(net.norms[i])) {
      throw Error(ErrorCode::DegenerateNet, "norm at eps=" + std::to_string(net.ladder[i]) + " is " +
                                                std::to_string(net.norms[i]) + " (exponent -inf)");
    }
  }
}

}  // namespace

PowerFit fit_moderateness(const RegularizedNet& net) {
  net.validate();
  require_positive_norms(net);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < net.ladder.size(); ++i) {
    xs.push_back(std::log(1.0 / net.ladder[i]));
    ys.push_back(std::log(net.norms[i]));
  }
  return fit_line(xs, ys);
}

NegligibilityResult check_negligibility(const RegularizedNet& net, int order) {
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "negligibility order must be >= 1");
  net.validate();
  require_positive_norms(net);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < net.ladder.size(); ++i) {
    xs.push_back(std::log(net.ladder[i]));
    ys.push_back(std::log(net.norms[i]));
  }
  NegligibilityResult r;
  r.fit = fit_line(xs, ys);
  r.order = order;
  r.pass = r.fit.slope >= static_cast<double>(order) - kExponentTolerance;
  return r;
}

}  // namespace vww
