#include <doctest.h>

#include <cmath>

#include "../oracles.hpp"
#include "vww/error.hpp"
#include "vww/prufer.hpp"
#include "vww/quadrature.hpp"

using namespace vww;
using oracle::pi;

TEST_CASE("free operator: lambda_n = (n pi)^2") {
  const Grid g(512);
  const EigenPair p = shoot_eigenvalue(NuPrimitive::zero(), 3, g);
  CHECK(std::abs(p.lambda / (9 * pi * pi) - 1) <= 1e-8);
  CHECK(std::abs(p.theta_residual) <= 1e-10);
  CHECK(p.sign_changes() == 2);
  CHECK(p.phi[0] == 0.0);
  CHECK(p.phi[g.intervals()] == 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    worst = std::max(worst, std::abs(p.phi[i] - std::sqrt(2.0) * std::sin(3 * pi * g.node(i))));
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("constant primitive leaves the operator unchanged") {
  const EigenPair p = shoot_eigenvalue(NuPrimitive::constant(2.5), 1, Grid(256));
  CHECK(std::abs(p.lambda - pi * pi) <= 1e-8 * pi * pi);
}

TEST_CASE("delta at 1/2: even modes are inert") {
  const EigenPair p = shoot_eigenvalue(NuPrimitive::heaviside(0.5, 1.0), 2, Grid(256));
  CHECK(std::abs(p.lambda - 4 * pi * pi) <= 1e-8 * 4 * pi * pi);
}

TEST_CASE("delta at 1/2: first eigenvalue matches the jump-condition root") {
  for (double alpha : {1.0, 4.0, -2.0}) {
    CAPTURE(alpha);
    const double k = oracle::delta_first_k(alpha);
    const EigenPair p = shoot_eigenvalue(NuPrimitive::heaviside(0.5, alpha), 1, Grid(256));
    CHECK(std::abs(p.lambda - k * k) <= 1e-7);
  }
}

TEST_CASE("end phase agrees with a Richardson-extrapolated RK4 reference") {
  for (double lambda : {5.0, 40.0, 300.0}) {
    for (double x0 : {0.5, 0.3125}) {
      CAPTURE(lambda);
      CAPTURE(x0);
      const auto ref = oracle::prufer_rk4(lambda, x0, 1.5, 4000);
      const NuPrimitive nu = NuPrimitive::heaviside(x0, 1.5);
      CHECK(prufer_end_phase(nu, lambda) == doctest::Approx(ref[0]).epsilon(1e-9));
      const PruferPath path = integrate_prufer(nu, lambda, Grid(64));
      CHECK(path.theta.back() == doctest::Approx(ref[0]).epsilon(1e-9));
      CHECK(std::abs(path.log_r.back() - ref[1]) <= 1e-9);
    }
  }
}

TEST_CASE("zero count of the shooting solution grows with lambda") {
  // The scaled phase itself need not be monotone, but floor(theta(1)/pi)
  // counts zeros and cannot decrease.
  const NuPrimitive nu = NuPrimitive::heaviside(0.5, 3.0);
  double last = std::floor(prufer_end_phase(nu, 0.5) / pi);
  for (double l = 1.0; l < 2000.0; l *= 1.3) {
    const double v = std::floor(prufer_end_phase(nu, l) / pi);
    CHECK(v >= last);
    last = v;
  }
  CHECK(last >= 12);
}

TEST_CASE("non-positive trial lambda is rejected") {
  try {
    prufer_end_phase(NuPrimitive::zero(), -1.0);
    FAIL("expected NonPositiveLambda");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveLambda);
  }
}

TEST_CASE("negative ground state reports a bracket failure") {
  try {
    shoot_eigenvalue(NuPrimitive::linear(-50.0), 1, Grid(64));
    FAIL("expected BracketFailure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BracketFailure);
    CHECK(std::string(e.what()).find("[") != std::string::npos);
  }
  CHECK_THROWS_AS(shoot_eigenvalue(NuPrimitive::zero(), 0, Grid(64)), Error);
}

TEST_CASE("eigen derivative: free closed forms") {
  const Grid g(512);
  const EigenPair p1 = shoot_eigenvalue(NuPrimitive::zero(), 1, g);
  CHECK(p1.phi_prime[0] == doctest::Approx(std::sqrt(2.0) * pi).epsilon(1e-9));
  const EigenPair p2 = shoot_eigenvalue(NuPrimitive::zero(), 2, g);
  CHECK(std::abs(p2.phi_prime[g.index_of(0.25)]) <= 1e-10);
}

TEST_CASE("eigen derivative matches centered differences away from the jump") {
  auto worst = [](std::size_t n) {
    const Grid g(n);
    const NuPrimitive nu = NuPrimitive::heaviside(0.5, 1.0);
    const EigenPair p = shoot_eigenvalue(nu, 1, g);
    const double h = g.step();
    double w = 0.0;
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      const double x = g.node(i);
      if (std::abs(x - 0.5) < 2 * h) continue;
      w = std::max(w, std::abs((p.phi[i + 1] - p.phi[i - 1]) / (2 * h) - p.phi_prime[i]));
    }
    return w;
  };
  const double coarse = worst(128);
  const double fine = worst(256);
  CHECK(coarse < 1e-3);
  CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("quasi-derivative jump at an atom") {
  const Grid g(256);
  const NuPrimitive nu = NuPrimitive::heaviside(0.5, 2.0);
  const EigenPair p = shoot_eigenvalue(nu, 3, g);
  const std::size_t mid = g.index_of(0.5);
  const GridFunction right = eigen_derivative(p, nu, Limit::Right);
  CHECK(right[mid] - p.phi_prime[mid] == doctest::Approx(2.0 * p.phi[mid]).epsilon(1e-12));
  // One-sided second-order differences see the same jump.
  const double h = g.step();
  const double left_fd = (3 * p.phi[mid] - 4 * p.phi[mid - 1] + p.phi[mid - 2]) / (2 * h);
  const double right_fd = (-3 * p.phi[mid] + 4 * p.phi[mid + 1] - p.phi[mid + 2]) / (2 * h);
  CHECK(std::abs((right_fd - left_fd) - 2.0 * p.phi[mid]) <= 1e-2);
}

TEST_CASE("basis: closed forms and orthonormality") {
  const BasisPtr free = build_basis(NuPrimitive::zero(), 10, Grid(1024));
  for (std::size_t i = 0; i < free->size(); ++i) {
    const double n = static_cast<double>(i + 1);
    CHECK(std::abs((*free)[i].lambda / (n * n * pi * pi) - 1) <= 1e-10);
  }
  CHECK(free->gram_off_diagonal() <= 1e-7);
  CHECK(free->gram_diagonal() <= 1e-7);

  const BasisPtr five = build_basis(NuPrimitive::linear(5.0), 10, Grid(1024));
  for (std::size_t i = 0; i < five->size(); ++i) {
    const double n = static_cast<double>(i + 1);
    CHECK(std::abs((*five)[i].lambda - (n * n * pi * pi + 5)) <= 1e-7);
  }
}

TEST_CASE("basis is independent of the thread count") {
  const NuPrimitive nu({{SmoothKind::Sine, {0.3, 2.0}, {}}}, {{0.4, 1.0}});
  const BasisPtr a = build_basis(nu, 12, Grid(256), {}, 1);
  const BasisPtr b = build_basis(nu, 12, Grid(256), {}, 4);
  for (std::size_t i = 0; i < a->size(); ++i) {
    CHECK((*a)[i].lambda == (*b)[i].lambda);
    CHECK((*a)[i].phi.values == (*b)[i].phi.values);
  }
}

TEST_CASE("delta basis: oscillation, monotonicity and norm bound") {
  const NuPrimitive nu = NuPrimitive::heaviside(0.5, 1.0);
  const BasisPtr basis = build_basis(nu, 20, Grid(1024));
  const double nu_l2 = nu.l2_norm();
  for (std::size_t i = 0; i < basis->size(); ++i) {
    const EigenPair& p = (*basis)[i];
    CHECK(p.sign_changes() == p.n - 1);
    if (i > 0) CHECK(p.lambda > (*basis)[i - 1].lambda);
    CHECK(p.tilde_norm <= std::exp(nu_l2 + nu_l2 * nu_l2 / std::sqrt(p.lambda)));
  }
  CHECK(basis->gram_off_diagonal() <= 1e-7);
}

TEST_CASE("eigenvalues are stable under grid refinement") {
  const NuPrimitive nu = NuPrimitive::heaviside(0.5, 1.0);
  for (int n : {1, 5, 17}) {
    const double coarse = shoot_eigenvalue(nu, n, Grid(256)).lambda;
    const double fine = shoot_eigenvalue(nu, n, Grid(512)).lambda;
    CHECK(std::abs(coarse - fine) <= 1e-10 * fine);
  }
}

TEST_CASE("asymptotic residuals") {
  const BasisPtr free = build_basis(NuPrimitive::zero(), 5, Grid(256));
  for (const ResidualRow& r : asymptotic_residuals(*free)) {
    CHECK(r.psi_norm <= 1e-8);
    CHECK(r.rho_norm <= 1e-8);
  }

  const NuPrimitive nu = NuPrimitive::heaviside(0.5, 1.0);
  const auto rows = asymptotic_residuals(*build_basis(nu, 40, Grid(1024)));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].partial_sum >= rows[i - 1].partial_sum);
  CHECK(rows[39].partial_sum <= 1.1 * rows[19].partial_sum);
  double c = 0.0;
  for (const ResidualRow& r : rows) c = std::max(c, r.rho_norm / nu.l2_norm());
  CHECK(c < 2.0);
  // |lambda_n/(pi n)^2 - 1| <= C/n.
  double fitted = 0.0;
  const BasisPtr b = build_basis(nu, 40, Grid(512));
  for (const EigenPair& p : b->pairs()) fitted = std::max(fitted, p.n * std::abs(p.lambda / std::pow(pi * p.n, 2) - 1));
  CHECK(fitted < 1.0);
}
