#include "vww/spectral.hpp"

#include <cmath>
#include <string>

#include "vww/error.hpp"

namespace vww {

SpectralCoeffs analyze(const GridFunction& f, const BasisPtr& basis) {
  require_same_grid(f.grid, basis->grid(), "analyze");
  SpectralCoeffs c{basis, std::vector<double>(basis->size())};
  for (std::size_t n = 0; n < basis->size(); ++n) c.coeffs[n] = inner(basis->weights(), f, (*basis)[n].phi);
  return c;
}

GridFunction synthesize(const SpectralCoeffs& c) {
  const EigenBasis& basis = *c.basis;
  const std::size_t points = basis.grid().size();
  std::vector<CompensatedSum> acc(points);
  for (std::size_t n = 0; n < c.size(); ++n) {
    const auto& phi = basis[n].phi.values;
    for (std::size_t i = 0; i < points; ++i) acc[i].add(c.coeffs[n] * phi[i]);
  }
  GridFunction out(basis.grid());
  for (std::size_t i = 0; i < points; ++i) out.values[i] = acc[i].value();
  return out;
}

void require_positive_spectrum(const std::vector<double>& lambdas) {
  for (std::size_t n = 0; n < lambdas.size(); ++n) {
    if (!(lambdas[n] > 0.0)) {
      throw Error(ErrorCode::NonPositiveSpectrum,
                  "lambda_" + std::to_string(n + 1) + " = " + std::to_string(lambdas[n]) + " is not positive");
    }
  }
}

double sobolev_norm(const std::vector<double>& coeffs, const std::vector<double>& lambdas, double k) {
  require_positive_spectrum(lambdas);
  CompensatedSum s;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    s.add(std::exp(k * std::log(lambdas[n])) * coeffs[n] * coeffs[n]);
  }
  return std::sqrt(s.value());
}

double sobolev_norm(const SpectralCoeffs& c, double k) { return sobolev_norm(c.coeffs, c.basis->lambdas(), k); }

double parseval_defect(const GridFunction& f, const BasisPtr& basis) {
  const SpectralCoeffs c = analyze(f, basis);
  CompensatedSum s;
  s.add(inner(basis->weights(), f, f));
  for (double v : c.coeffs) s.add(-v * v);
  return s.value();
}

}  // namespace vww
