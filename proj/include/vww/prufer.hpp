#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "vww/grid.hpp"
#include "vww/ode.hpp"
#include "vww/potential.hpp"

namespace vww {

/// Phase/amplitude path of the modified Prufer system at a trial lambda.
///
/// With y = r sin(theta) and y' - nu*y = sqrt(lambda) r cos(theta):
///   theta'   = sqrt(lambda) + nu^2 sin^2(theta)/sqrt(lambda) + nu sin(2 theta)
///   (log r)' = -[nu^2 sin(2 theta)/(2 sqrt(lambda)) + nu cos(2 theta)]
/// integrated from theta(0) = 0, r(0) = 1. Only nu enters, never q.
struct PruferPath {
  double lambda = 0.0;
  Grid grid;
  std::vector<double> theta;
  std::vector<double> log_r;
  std::vector<double> eta;  // theta - sqrt(lambda)*x
};

struct PruferOptions {
  OdeOptions ode;
};

PruferPath integrate_prufer(const NuPrimitive& nu, double lambda, const Grid& grid,
                            const PruferOptions& options = {});

/// theta(1, lambda) without sampling the path.
double prufer_end_phase(const NuPrimitive& nu, double lambda, const PruferOptions& options = {});

struct EigenOptions {
  PruferOptions prufer;
  double residual_tolerance = 1e-10;
  double lambda_floor = 1e-3;
  int max_bracket_growth = 16;
};

struct EigenPair {
  int n = 0;
  double lambda = 0.0;
  GridFunction phi;
  GridFunction phi_prime;
  PruferPath path;
  double tilde_norm = 0.0;
  double theta_residual = 0.0;

  /// Interior sign changes of phi.
  int sign_changes() const;
};

EigenPair shoot_eigenvalue(const NuPrimitive& nu, int n, const Grid& grid, const EigenOptions& options = {});

enum class Limit { Left, Right };

/// phi_n' = sqrt(lambda_n) r_n cos(theta_n)/||phi~_n|| + nu*phi_n, with the
/// chosen one-sided limit of nu at jump nodes.
GridFunction eigen_derivative(const EigenPair& pair, const NuPrimitive& nu, Limit limit = Limit::Left);

class EigenBasis {
 public:
  EigenBasis(NuPrimitive nu, Grid grid, std::vector<EigenPair> pairs);

  const NuPrimitive& nu() const { return nu_; }
  const Grid& grid() const { return grid_; }
  const std::vector<EigenPair>& pairs() const { return pairs_; }
  const EigenPair& operator[](std::size_t i) const { return pairs_[i]; }
  std::size_t size() const { return pairs_.size(); }
  std::vector<double> lambdas() const;

  /// max_{m != n} |<phi_m, phi_n>|.
  double gram_off_diagonal() const { return gram_off_diagonal_; }
  /// max_n |<phi_n, phi_n> - 1|.
  double gram_diagonal() const { return gram_diagonal_; }
  /// Quadrature weights adapted to the kinks of nu; every inner product
  /// against the basis uses them.
  const std::vector<double>& weights() const { return weights_; }

 private:
  NuPrimitive nu_;
  Grid grid_;
  std::vector<EigenPair> pairs_;
  std::vector<double> weights_;
  double gram_off_diagonal_ = 0.0;
  double gram_diagonal_ = 0.0;
};

using BasisPtr = std::shared_ptr<const EigenBasis>;

/// Modes 1..n_max, computed independently (fanned out over `threads`).
BasisPtr build_basis(const NuPrimitive& nu, int n_max, const Grid& grid, const EigenOptions& options = {},
                     std::size_t threads = 1);

struct ResidualRow {
  int n = 0;
  double psi_norm = 0.0;     // ||phi~_n - sin(sqrt(lambda_n) x)||
  double rho_norm = 0.0;     // ||r_n - 1||
  double partial_sum = 0.0;  // sum_{m<=n} psi_norm_m^2
};

std::vector<ResidualRow> asymptotic_residuals(const EigenBasis& basis);

}  // namespace vww
