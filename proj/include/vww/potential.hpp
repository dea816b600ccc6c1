#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "vww/grid.hpp"

namespace vww {

// ---------------------------------------------------------------------------
// Primitive nu of the potential q = nu'.
// ---------------------------------------------------------------------------

enum class SmoothKind { Zero, Constant, Linear, Sine, Cosine, Sampled };

std::string to_string(SmoothKind kind);
SmoothKind smooth_kind_from_string(const std::string& name);

/// One term of the smooth part of nu.
///
///   Zero            0
///   Constant [c]    c
///   Linear   [c]    c*x
///   Sine     [a,m]  a*sin(2*pi*m*x)
///   Cosine   [a,m]  a*cos(2*pi*m*x)
///   Sampled  [v0..vM] values on the uniform nodes k/M; piecewise linear, or
///                  cubic Hermite when `derivs` carries nu' at the same nodes.
struct SmoothTerm {
  SmoothKind kind = SmoothKind::Zero;
  std::vector<double> params;
  std::vector<double> derivs;

  double value(double x) const;
  double derivative(double x) const;
};

struct Jump {
  double x = 0.0;
  double height = 0.0;
};

/// nu(x) = sum of smooth terms + sum_i height_i * H(x - x_i).
///
/// At a jump location the left limit is returned. The induced potential is
/// q = (smooth part)' + sum_i height_i * delta_{x_i}.
class NuPrimitive {
 public:
  NuPrimitive() = default;
  NuPrimitive(std::vector<SmoothTerm> smooth, std::vector<Jump> jumps);

  static NuPrimitive zero();
  static NuPrimitive constant(double c);
  /// nu = c*x, i.e. q == c.
  static NuPrimitive linear(double c);
  /// nu = alpha*H(x - x0), i.e. q = alpha*delta_{x0}.
  static NuPrimitive heaviside(double x0, double alpha);
  static NuPrimitive sine(double amplitude, double mode);
  static NuPrimitive cosine(double amplitude, double mode);

  double operator()(double x) const;
  /// Value on panel k, i.e. between breakpoint k-1 and breakpoint k of the
  /// jump list; jumps strictly left of the panel are included.
  double on_panel(double x, std::size_t panel) const;
  double smooth_value(double x) const;
  /// Absolutely continuous part of q.
  double smooth_q(double x) const;

  const std::vector<SmoothTerm>& smooth() const { return smooth_; }
  const std::vector<Jump>& jumps() const { return jumps_; }
  bool has_atoms() const { return !jumps_.empty(); }

  /// Points in (0,1) where nu or its low derivatives lose smoothness: jump
  /// locations, plus sample nodes of Sampled terms.
  std::vector<double> kinks() const;

  double l2_norm() const;
  double linf_norm() const;
  /// ||q||_inf, absent when q carries delta atoms.
  std::optional<double> q_linf() const;
  /// sum of jump heights plus int_0^1 smooth_q.
  double total_mass() const;

  /// nu sampled on a grid (left limits at jumps).
  GridFunction sample(const Grid& grid) const;

  /// q sampled on a grid. Throws AtomEvaluation if an atom sits on a node and
  /// `skip_atoms` is false; with `skip_atoms` those nodes carry only the
  /// smooth part and are listed in `atom_nodes`.
  GridFunction sample_q(const Grid& grid, bool skip_atoms = false,
                        std::vector<std::size_t>* atom_nodes = nullptr) const;

 private:
  std::vector<SmoothTerm> smooth_;
  std::vector<Jump> jumps_;
  std::vector<double> jump_prefix_;  // jump_prefix_[k] = sum of first k heights
};

/// f extended by zero outside (0,1).
class ZeroExtension {
 public:
  explicit ZeroExtension(GridFunction f) : f_(std::move(f)) {}
  double operator()(double x) const;
  const GridFunction& inner() const { return f_; }

 private:
  GridFunction f_;
};

ZeroExtension extend_by_zero(const GridFunction& f);

// ---------------------------------------------------------------------------
// Mollifiers.
// ---------------------------------------------------------------------------

enum class MollifierProfile {
  /// C*exp(-1/(1-s^2)) on (-1,1).
  Bump,
  /// C*exp(-1/(1-s^2))*(1+s/2): same support, nonzero first moment.
  SkewedBump,
};

std::string to_string(MollifierProfile p);
MollifierProfile mollifier_profile_from_string(const std::string& name);

/// Unit-mass profile psi on [-1,1].
double profile_density(MollifierProfile p, double s);
/// int_{-1}^{s} psi.
double profile_cdf(MollifierProfile p, double s);
/// Normalization constant C.
double profile_normalization(MollifierProfile p);

struct MollifierSpec {
  MollifierProfile profile = MollifierProfile::Bump;
  double epsilon = 0.1;

  /// psi_eps(x) = psi(x/eps)/eps.
  double kernel(double x) const;
  /// int_{-inf}^{x} psi_eps.
  double kernel_cdf(double x) const;
};

/// Throws UnresolvedMollifier when fewer than 8 grid steps fit in [-eps,eps].
void require_resolved(const MollifierSpec& m, const Grid& grid);

/// q_eps(x) = int q~(y) psi_eps(x-y) dy at a single point; atoms exact,
/// smooth part by quadrature of the zero-extended q.
double mollified_q(const NuPrimitive& nu, const MollifierSpec& m, double x);

GridFunction mollify_potential(const NuPrimitive& nu, const MollifierSpec& m, const Grid& grid);

/// Primitive nu_eps(x) = int_0^x q_eps of the mollified potential, as a
/// Hermite-sampled NuPrimitive on `grid` (values nu_eps, derivatives q_eps).
NuPrimitive mollify_primitive(const NuPrimitive& nu, const MollifierSpec& m, const Grid& grid);

/// Adds a smooth term to the primitive (the potential gains its derivative).
NuPrimitive with_extra_term(const NuPrimitive& nu, SmoothTerm term);

// ---------------------------------------------------------------------------
// Nets and exponent fits.
// ---------------------------------------------------------------------------

std::vector<double> default_ladder();

/// epsilon_k = 2^-k for k = k_min..k_max.
std::vector<double> dyadic_ladder(int k_min, int k_max);

struct RegularizedNet {
  std::vector<double> ladder;
  std::vector<double> norms;
  std::string norm_kind;
  std::vector<GridFunction> members;  // optional

  void validate() const;
};

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_deviation = 0.0;
};

/// Least-squares line through (log 1/eps, log norm). The slope is the
/// moderateness exponent N.
PowerFit fit_moderateness(const RegularizedNet& net);

struct NegligibilityResult {
  bool pass = false;
  PowerFit fit;  // slope of log norm against log eps
  int order = 0;
};

inline constexpr double kExponentTolerance = 0.2;

NegligibilityResult check_negligibility(const RegularizedNet& net, int order);

}  // namespace vww
