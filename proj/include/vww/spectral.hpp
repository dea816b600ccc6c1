#pragma once

#include <vector>

#include "vww/grid.hpp"
#include "vww/prufer.hpp"

namespace vww {

struct SpectralCoeffs {
  BasisPtr basis;
  std::vector<double> coeffs;  // c_n for n = 1..N_max

  std::size_t size() const { return coeffs.size(); }
};

/// c_n = <f, phi_n> by composite Simpson.
SpectralCoeffs analyze(const GridFunction& f, const BasisPtr& basis);

/// sum_n c_n phi_n on the basis grid.
GridFunction synthesize(const SpectralCoeffs& c);

/// (sum_n lambda_n^k c_n^2)^(1/2); k may be any real.
double sobolev_norm(const SpectralCoeffs& c, double k);

/// Same norm from raw coefficients and eigenvalues.
double sobolev_norm(const std::vector<double>& coeffs, const std::vector<double>& lambdas, double k);

/// ||f||^2 - sum_n c_n^2.
double parseval_defect(const GridFunction& f, const BasisPtr& basis);

/// Throws NonPositiveSpectrum unless every lambda is positive.
void require_positive_spectrum(const std::vector<double>& lambdas);

}  // namespace vww
