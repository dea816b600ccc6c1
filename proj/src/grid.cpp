#include "vww/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vww/error.hpp"

namespace vww {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnresolvedMollifier: return "UnresolvedMollifier";
    case ErrorCode::DegenerateNet: return "DegenerateNet";
    case ErrorCode::NonPositiveLambda: return "NonPositiveLambda";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::NonPositiveSpectrum: return "NonPositiveSpectrum";
    case ErrorCode::TimeGridTooCoarse: return "TimeGridTooCoarse";
    case ErrorCode::AtomEvaluation: return "AtomEvaluation";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::MissingNorm: return "MissingNorm";
    case ErrorCode::NotBoundedPotential: return "NotBoundedPotential";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

Grid::Grid(std::size_t intervals) : intervals_(intervals) {
  if (intervals < 2 || intervals % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "grid needs an even number of intervals >= 2, got " + std::to_string(intervals));
  }
  const double h3 = step() / 3.0;
  weights_.assign(size(), 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    if (i == 0 || i == intervals_) {
      weights_[i] = h3;
    } else {
      weights_[i] = (i % 2 == 1) ? 4.0 * h3 : 2.0 * h3;
    }
  }
}

std::vector<double> Grid::nodes() const {
  std::vector<double> x(size());
  for (std::size_t i = 0; i < size(); ++i) x[i] = node(i);
  return x;
}

std::size_t Grid::index_of(double x) const {
  const double s = x * static_cast<double>(intervals_);
  const double r = std::round(s);
  if (r < 0 || r > static_cast<double>(intervals_) || std::abs(s - r) > 1e-9) return npos;
  return static_cast<std::size_t>(r);
}

GridFunction::GridFunction(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "sample count " + std::to_string(values.size()) +
                                             " does not match grid size " + std::to_string(grid.size()));
  }
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.node(i));
  return GridFunction(g, std::move(v));
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(grid, o.grid, "operator+=");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(grid, o.grid, "operator-=");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) {
    throw Error(ErrorCode::GridMismatch, std::string(where) + ": grids with " +
                                             std::to_string(a.intervals()) + " and " +
                                             std::to_string(b.intervals()) + " intervals");
  }
}

double integrate(const GridFunction& f) {
  return compensated_dot(f.grid.weights(), f.values);
}

double inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid, g.grid, "inner");
  const auto& w = f.grid.weights();
  CompensatedSum s;
  for (std::size_t i = 0; i < w.size(); ++i) s.add(w[i] * f.values[i] * g.values[i]);
  return s.value();
}

double l2_norm(const GridFunction& f) { return std::sqrt(std::max(0.0, inner(f, f))); }

namespace {

// Adds to w the weights of int_a^b p, where p interpolates the samples at
// nodes i0, i0+1, i0+2; three-point Gauss is exact for the quadratic.
void add_quadratic_piece(std::vector<double>& w, const Grid& grid, std::size_t i0, double a, double b) {
  static constexpr double kNodes[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double kWeights[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double x[3] = {grid.node(i0), grid.node(i0 + 1), grid.node(i0 + 2)};
  for (int g = 0; g < 3; ++g) {
    const double t = 0.5 * (a + b) + 0.5 * (b - a) * kNodes[g];
    const double gw = 0.5 * (b - a) * kWeights[g];
    for (int k = 0; k < 3; ++k) {
      double l = 1.0;
      for (int m = 0; m < 3; ++m) {
        if (m != k) l *= (t - x[m]) / (x[k] - x[m]);
      }
      w[i0 + static_cast<std::size_t>(k)] += gw * l;
    }
  }
}

}  // namespace

std::vector<double> kink_adapted_weights(const Grid& grid, std::span<const double> kinks) {
  std::vector<double> w = grid.weights();
  const double h = grid.step();
  const std::size_t n = grid.intervals();
  std::vector<double> off;
  for (double k : kinks) {
    if (k > 0.0 && k < 1.0 && grid.index_of(k) == Grid::npos) off.push_back(k);
  }
  for (std::size_t q = 0; q < off.size(); ++q) {
    const double xi = off[q];
    const auto j = static_cast<std::size_t>(std::floor(xi / h));  // last node left of xi
    if (j < 2 || j + 3 > n) continue;
    const double lo = grid.node(j - 2);
    const double hi = grid.node(j + 3);
    bool crowded = false;
    for (std::size_t r = 0; r < off.size(); ++r) {
      if (r != q && off[r] >= lo && off[r] <= hi) crowded = true;
    }
    if (crowded) continue;
    const std::size_t a = 2 * (j / 2);  // panel [a, a+2] holds xi
    const double h3 = h / 3.0;
    w[a] -= h3;
    w[a + 1] -= 4.0 * h3;
    w[a + 2] -= h3;
    add_quadratic_piece(w, grid, j - 2, grid.node(a), xi);
    add_quadratic_piece(w, grid, j + 1, xi, grid.node(a + 2));
  }
  return w;
}

double inner(const std::vector<double>& weights, const GridFunction& f, const GridFunction& g) {
  require_same_grid(f.grid, g.grid, "inner");
  if (weights.size() != f.size()) throw Error(ErrorCode::GridMismatch, "inner: weight count does not match the grid");
  CompensatedSum s;
  for (std::size_t i = 0; i < weights.size(); ++i) s.add(weights[i] * f.values[i] * g.values[i]);
  return s.value();
}

double linf_norm(const GridFunction& f) {
  double m = 0.0;
  for (double v : f.values) m = std::max(m, std::abs(v));
  return m;
}

GridFunction second_difference(const GridFunction& f) {
  const std::size_t n = f.size();
  const double h2 = f.grid.step() * f.grid.step();
  GridFunction d(f.grid);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d.values[i] = (f.values[i - 1] - 2.0 * f.values[i] + f.values[i + 1]) / h2;
  }
  if (n >= 4) {
    d.values[0] = (2.0 * f.values[0] - 5.0 * f.values[1] + 4.0 * f.values[2] - f.values[3]) / h2;
    d.values[n - 1] = (2.0 * f.values[n - 1] - 5.0 * f.values[n - 2] + 4.0 * f.values[n - 3] -
                       f.values[n - 4]) / h2;
  }
  return d;
}

void CompensatedSum::add(double v) {
  const double t = sum_ + v;
  if (std::abs(sum_) >= std::abs(v)) {
    comp_ += (sum_ - t) + v;
  } else {
    comp_ += (v - t) + sum_;
  }
  sum_ = t;
}

double compensated_dot(std::span<const double> a, std::span<const double> b) {
  CompensatedSum s;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s.add(a[i] * b[i]);
  return s.value();
}

}  // namespace vww
