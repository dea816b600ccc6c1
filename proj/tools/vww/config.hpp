#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vww/estimates.hpp"
#include "vww/potential.hpp"
#include "vww/prufer.hpp"
#include "vww/veryweak.hpp"
#include "vww/wave.hpp"

namespace vww::cli {

using json = nlohmann::ordered_json;

/// Reads one JSON object and rejects keys that were never asked for.
class Section {
 public:
  Section(const json& node, std::string path);

  bool has(const std::string& key) const;
  const json& raw(const std::string& key);
  Section child(const std::string& key);

  double number(const std::string& key, std::optional<double> fallback = std::nullopt);
  long integer(const std::string& key, std::optional<long> fallback = std::nullopt);
  bool flag(const std::string& key, bool fallback);
  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt);

  /// Throws Config naming the first key nobody read.
  void finish() const;

  const std::string& path() const { return path_; }

 private:
  const json* node_;
  std::string path_;
  std::set<std::string> seen_;
};

json load_json(const std::filesystem::path& file);

NuPrimitive parse_potential(const json& node, const std::string& path);
json describe_potential(const NuPrimitive& nu);

SmoothTerm parse_smooth_term(const json& node, const std::string& path);

/// zero | sine [a,m] -> a sin(m pi x) | bubble [a] -> a x(1-x) |
/// samples {values} | random {seed, modes}; an array sums its entries.
GridFunction parse_data(const json& node, const Grid& grid, const std::string& path);

struct TimeProfile {
  std::string kind = "constant";  // constant [c] | cos [a,w] | sin [a,w] | linear [a,b]
  std::vector<double> params{1.0};
  double operator()(double t) const;
};

TimeProfile parse_time_profile(const json& node, const std::string& path);

/// Settings shared by every command that builds a basis.
struct BasisSettings {
  NuPrimitive nu;
  std::optional<MollifierSpec> mollifier;
  Grid grid{2048};
  int n_max = 40;

  /// nu, or its mollified primitive when a mollifier block is present.
  NuPrimitive effective_nu() const;
};

BasisSettings parse_basis_settings(Section& s);

std::vector<double> parse_ladder(const json& node, const std::string& path);

}  // namespace vww::cli
