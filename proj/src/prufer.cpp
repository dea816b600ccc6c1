#include "vww/prufer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "vww/error.hpp"
#include "vww/parallel.hpp"

namespace vww {

namespace {

using State = std::array<double, 2>;  // (eta, log r)

// Integrates panel by panel between the kinks of nu; `sink(node, x, state)`
// receives the state at every grid node when a grid is given.
template <class Sink>
void run_prufer(const NuPrimitive& nu, double lambda, const Grid* grid, const PruferOptions& options,
                Sink&& sink) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NonPositiveLambda, "trial eigenvalue must be positive, got " + std::to_string(lambda));
  }
  const double root = std::sqrt(lambda);
  const double inv_root = 1.0 / root;

  std::vector<double> edges = nu.kinks();
  edges.push_back(1.0);

  State y{0.0, 0.0};
  if (grid) sink(std::size_t{0}, 0.0, y);

  const auto& jumps = nu.jumps();
  double x = 0.0;
  double h = 0.0;
  std::size_t next_node = 1;
  std::vector<double> stops;
  std::vector<std::ptrdiff_t> node_of;
  for (double b : edges) {
    stops.clear();
    node_of.clear();
    if (grid) {
      while (next_node < grid->size() && grid->node(next_node) <= b + 1e-14) {
        stops.push_back(grid->node(next_node));
        node_of.push_back(static_cast<std::ptrdiff_t>(next_node));
        ++next_node;
      }
    }
    if (stops.empty() || std::abs(stops.back() - b) > 1e-14) {
      stops.push_back(b);
      node_of.push_back(-1);
    }

    std::size_t panel = 0;
    while (panel < jumps.size() && jumps[panel].x <= x + 1e-15) ++panel;

    auto rhs = [&](double xx, const State& s) -> State {
      const double v = nu.on_panel(xx, panel);
      const double theta = root * xx + s[0];
      const double sn = std::sin(theta);
      const double cs = std::cos(theta);
      const double sin2 = 2.0 * sn * cs;
      const double cos2 = cs * cs - sn * sn;
      const double v2 = v * v;
      return {v2 * sn * sn * inv_root + v * sin2, -(0.5 * v2 * sin2 * inv_root + v * cos2)};
    };
    integrate_dopri5(
        rhs, y, x, stops,
        [&](std::size_t idx, double xx, const State& s) {
          if (node_of[idx] >= 0) sink(static_cast<std::size_t>(node_of[idx]), xx, s);
        },
        options.ode, h);
    x = b;
  }
  if (!grid) sink(std::size_t{0}, 1.0, y);
}

std::string bracket_text(double lo, double hi) {
  std::ostringstream os;
  os.precision(12);
  os << "[" << lo << ", " << hi << "]";
  return os.str();
}

}  // namespace

PruferPath integrate_prufer(const NuPrimitive& nu, double lambda, const Grid& grid, const PruferOptions& options) {
  PruferPath path;
  path.lambda = lambda;
  path.grid = grid;
  path.theta.assign(grid.size(), 0.0);
  path.log_r.assign(grid.size(), 0.0);
  path.eta.assign(grid.size(), 0.0);
  const double root = std::sqrt(std::max(lambda, 0.0));
  run_prufer(nu, lambda, &grid, options, [&](std::size_t i, double x, const State& s) {
    path.eta[i] = s[0];
    path.log_r[i] = s[1];
    path.theta[i] = root * x + s[0];
  });
  return path;
}

double prufer_end_phase(const NuPrimitive& nu, double lambda, const PruferOptions& options) {
  double eta = 0.0;
  run_prufer(nu, lambda, nullptr, options, [&](std::size_t, double, const State& s) { eta = s[0]; });
  return std::sqrt(lambda) + eta;
}

int EigenPair::sign_changes() const {
  int changes = 0;
  int last = 0;
  for (std::size_t i = 1; i + 1 < phi.size(); ++i) {
    const double v = phi.values[i];
    const int sgn = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
    if (sgn == 0) continue;
    if (last != 0 && sgn != last) ++changes;
    last = sgn;
  }
  return changes;
}

EigenPair shoot_eigenvalue(const NuPrimitive& nu, int n, const Grid& grid, const EigenOptions& options) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "mode index must be >= 1");
  const double target = std::numbers::pi * n;
  const double guess = target * target;
  auto g = [&](double lambda) { return prufer_end_phase(nu, lambda, options.prufer) - target; };

  // Bracket around the asymptotic guess, widening geometrically.
  double c = 0.1;
  double lo = 0.0;
  double hi = 0.0;
  double flo = 0.0;
  double fhi = 0.0;
  bool bracketed = false;
  for (int attempt = 0; attempt <= options.max_bracket_growth; ++attempt, c *= 2.0) {
    lo = std::max(guess * (1.0 - 2.0 / n - c), options.lambda_floor);
    hi = guess * (1.0 + 2.0 / n + c);
    flo = g(lo);
    fhi = g(hi);
    if (flo < 0.0 && fhi > 0.0) {
      bracketed = true;
      break;
    }
    if (flo >= 0.0 && lo <= options.lambda_floor) break;
  }
  if (!bracketed) {
    throw Error(ErrorCode::BracketFailure, "mode n=" + std::to_string(n) + ": theta(1)-pi*n has no sign change on " +
                                               bracket_text(lo, hi) + " (values " + std::to_string(flo) + ", " +
                                               std::to_string(fhi) + ")");
  }

  // A few bisections, then Illinois-modified secant on the bracket.
  for (int i = 0; i < 3; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = g(mid);
    if (fm < 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  double root = 0.5 * (lo + hi);
  double froot = 1.0;
  int side = 0;
  double fa = flo;
  double fb = fhi;
  for (int iter = 0; iter < 200; ++iter) {
    double cand = (fa * hi - fb * lo) / (fa - fb);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    const double fc = g(cand);
    root = cand;
    froot = fc;
    if (std::abs(fc) <= 1e-13 || (hi - lo) <= 8.0 * std::numeric_limits<double>::epsilon() * hi) break;
    if (fc < 0.0) {
      lo = cand;
      fa = fc;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      hi = cand;
      fb = fc;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
  }
  if (!(std::abs(froot) <= options.residual_tolerance)) {
    throw Error(ErrorCode::BracketFailure, "mode n=" + std::to_string(n) + ": residual " + std::to_string(froot) +
                                               " above tolerance on " + bracket_text(lo, hi));
  }

  EigenPair pair;
  pair.n = n;
  pair.lambda = root;
  pair.path = integrate_prufer(nu, root, grid, options.prufer);
  pair.theta_residual = pair.path.theta.back() - target;

  GridFunction tilde(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    tilde.values[i] = std::exp(pair.path.log_r[i]) * std::sin(pair.path.theta[i]);
  }
  tilde.values.front() = 0.0;
  tilde.values.back() = 0.0;
  const std::vector<double> kinks = nu.kinks();
  pair.tilde_norm = std::sqrt(inner(kink_adapted_weights(grid, kinks), tilde, tilde));
  pair.phi = (1.0 / pair.tilde_norm) * std::move(tilde);
  pair.phi_prime = eigen_derivative(pair, nu, Limit::Left);
  return pair;
}

GridFunction eigen_derivative(const EigenPair& pair, const NuPrimitive& nu, Limit limit) {
  const Grid& grid = pair.phi.grid;
  const double root = std::sqrt(pair.lambda);
  GridFunction d(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    double v = nu(x);
    if (limit == Limit::Right) {
      for (const Jump& j : nu.jumps()) {
        if (std::abs(j.x - x) < 1e-14) v += j.height;
      }
    }
    d.values[i] = root * std::exp(pair.path.log_r[i]) * std::cos(pair.path.theta[i]) / pair.tilde_norm +
                  v * pair.phi.values[i];
  }
  return d;
}

EigenBasis::EigenBasis(NuPrimitive nu, Grid grid, std::vector<EigenPair> pairs)
    : nu_(std::move(nu)), grid_(std::move(grid)), pairs_(std::move(pairs)) {
  const std::vector<double> kinks = nu_.kinks();
  weights_ = kink_adapted_weights(grid_, kinks);
  for (std::size_t m = 0; m < pairs_.size(); ++m) {
    require_same_grid(pairs_[m].phi.grid, grid_, "EigenBasis");
    gram_diagonal_ = std::max(gram_diagonal_, std::abs(inner(weights_, pairs_[m].phi, pairs_[m].phi) - 1.0));
    for (std::size_t n = m + 1; n < pairs_.size(); ++n) {
      gram_off_diagonal_ = std::max(gram_off_diagonal_, std::abs(inner(weights_, pairs_[m].phi, pairs_[n].phi)));
    }
  }
}

std::vector<double> EigenBasis::lambdas() const {
  std::vector<double> l;
  l.reserve(pairs_.size());
  for (const EigenPair& p : pairs_) l.push_back(p.lambda);
  return l;
}

BasisPtr build_basis(const NuPrimitive& nu, int n_max, const Grid& grid, const EigenOptions& options,
                     std::size_t threads) {
  if (n_max < 1) throw Error(ErrorCode::InvalidArgument, "n_max must be >= 1");
  std::vector<EigenPair> pairs(static_cast<std::size_t>(n_max));
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    pairs[i] = shoot_eigenvalue(nu, static_cast<int>(i) + 1, grid, options);
  });
  for (std::size_t i = 1; i < pairs.size(); ++i) {
    if (!(pairs[i].lambda > pairs[i - 1].lambda)) {
      throw Error(ErrorCode::BracketFailure, "eigenvalues not increasing at n=" + std::to_string(i + 1));
    }
  }
  return std::make_shared<const EigenBasis>(nu, grid, std::move(pairs));
}

std::vector<ResidualRow> asymptotic_residuals(const EigenBasis& basis) {
  std::vector<ResidualRow> rows;
  const Grid& grid = basis.grid();
  double partial = 0.0;
  for (const EigenPair& p : basis.pairs()) {
    const double root = std::sqrt(p.lambda);
    GridFunction psi(grid);
    GridFunction rho(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = std::exp(p.path.log_r[i]);
      psi.values[i] = p.tilde_norm * p.phi.values[i] - std::sin(root * grid.node(i));
      rho.values[i] = r - 1.0;
    }
    ResidualRow row;
    row.n = p.n;
    row.psi_norm = std::sqrt(std::max(0.0, inner(basis.weights(), psi, psi)));
    row.rho_norm = std::sqrt(std::max(0.0, inner(basis.weights(), rho, rho)));
    partial += row.psi_norm * row.psi_norm;
    row.partial_sum = partial;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace vww
