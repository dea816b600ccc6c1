#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vww {

/// Uniform grid on [0,1] with an even number of intervals so that composite
/// Simpson applies to every grid function.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::size_t intervals);

  std::size_t intervals() const { return intervals_; }
  std::size_t size() const { return intervals_ + 1; }
  double step() const { return 1.0 / static_cast<double>(intervals_); }
  double node(std::size_t i) const { return static_cast<double>(i) * step(); }
  std::vector<double> nodes() const;

  /// Composite Simpson weights (h/3 * [1 4 2 4 ... 4 1]).
  const std::vector<double>& weights() const { return weights_; }

  /// Index of the node equal to x (within 1e-12), or npos.
  std::size_t index_of(double x) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.intervals_ == b.intervals_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t intervals_ = 0;
  std::vector<double> weights_;
};

struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  GridFunction(Grid g, std::vector<double> v);
  explicit GridFunction(Grid g) : grid(g), values(g.size(), 0.0) {}

  static GridFunction sample(const Grid& g, const std::function<double(double)>& f);

  double operator[](std::size_t i) const { return values[i]; }
  std::size_t size() const { return values.size(); }

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double s);
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);

void require_same_grid(const Grid& a, const Grid& b, const char* where);

double integrate(const GridFunction& f);
double inner(const GridFunction& f, const GridFunction& g);
double l2_norm(const GridFunction& f);

/// Simpson weights with every panel that contains an off-node kink replaced
/// by one-sided quadratics integrated up to the kink from either side, so
/// piecewise smooth integrands keep close to Simpson accuracy.
/// Kinks closer than three steps to an end or to each other keep Simpson.
std::vector<double> kink_adapted_weights(const Grid& grid, std::span<const double> kinks);

/// sum_i w_i f_i g_i with compensated summation.
double inner(const std::vector<double>& weights, const GridFunction& f, const GridFunction& g);
double linf_norm(const GridFunction& f);

/// Second difference (f[i-1]-2f[i]+f[i+1])/h^2 on interior nodes; one-sided
/// second-order stencils at the endpoints.
GridFunction second_difference(const GridFunction& f);

/// Neumaier-compensated sum; result independent of summation order to ~1 ulp.
class CompensatedSum {
 public:
  void add(double v);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_dot(std::span<const double> a, std::span<const double> b);

}  // namespace vww
