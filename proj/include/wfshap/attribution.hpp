#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wfshap/game.hpp"

namespace wfshap {

enum class Method {
  kExact,
  kPermutationMc,
  /// Values supplied from outside (e.g. a published table), not computed here.
  kReported,
};

std::string_view method_name(Method method);
Method parse_method(std::string_view name);

struct AttributionResult {
  std::vector<std::string> labels;  ///< component order of the source game
  std::vector<double> phi;
  Method method = Method::kExact;
  std::size_t samples = 0;
  std::optional<std::vector<double>> std_error;  ///< present iff method is kPermutationMc
  double empty_value = 0.0;
  double grand_value = 0.0;
  std::optional<std::uint64_t> seed;

  double phi_sum() const;
  /// |sum(phi) - (v(N) - v(empty))|
  double efficiency_residual() const;
};

/// Symmetric n x n matrix of pairwise synergy coefficients, zero diagonal.
struct SynergyMatrix {
  std::vector<std::string> labels;
  std::vector<double> entries;  ///< row-major

  std::size_t size() const noexcept { return labels.size(); }
  double at(std::size_t i, std::size_t j) const { return entries.at(i * labels.size() + j); }
};

struct EstimatorConfig {
  Method method = Method::kExact;
  /// Number of orderings. With antithetic sampling this counts both members of
  /// each (ordering, reversed ordering) pair and must be even and at least 2.
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool antithetic = true;
};

/// Returns v(S) for a coalition over an n-component universe. May throw.
using CoalitionOracle = std::function<double(const Coalition&)>;

/// Thrown when a CoalitionOracle fails; carries the coalition being evaluated.
class OracleError : public Error {
 public:
  OracleError(const std::string& what, Mask mask) : Error(what), mask_(mask) {}
  Mask mask() const noexcept { return mask_; }

 private:
  Mask mask_;
};

/// v(s + {i}) - v(s). Rejects i in s and absent coalitions.
double marginal_contribution(const GameTable& game, const ComponentId& component, const Coalition& s);

/// Subset-sum Shapley values with weights |S|!(n-|S|-1)!/n!. Requires a complete table.
AttributionResult shapley_exact(const GameTable& game);

/// Permutation Monte Carlo over a complete table.
AttributionResult shapley_permutation(const GameTable& game, const EstimatorConfig& config);

/// Permutation Monte Carlo over a lazily evaluated game. Each coalition is
/// requested from the oracle at most once per call. Works for up to
/// kMaxComponents components.
AttributionResult shapley_permutation(const CoalitionOracle& oracle, const ComponentSet& components,
                                      const EstimatorConfig& config);

/// v({i,j}) - v({i}) - v({j}) + v(empty)
double synergy_pair(const GameTable& game, const ComponentId& i, const ComponentId& j);
SynergyMatrix synergy_matrix(const GameTable& game);

struct AxiomReport {
  double efficiency_residual = 0.0;
  bool efficiency_pass = false;
  /// False when the table is incomplete; symmetry and dummy need every coalition.
  bool scanned = false;
  std::vector<std::pair<std::size_t, std::size_t>> interchangeable_pairs;
  std::vector<std::pair<std::size_t, std::size_t>> symmetry_violations;
  std::vector<std::size_t> null_players;
  std::vector<std::size_t> dummy_violations;

  bool passed() const {
    return efficiency_pass && symmetry_violations.empty() && dummy_violations.empty();
  }
};

/// Efficiency needs v(empty) and v(N) in the table; symmetry and dummy are
/// checked by exact table scans when the table is complete.
AxiomReport check_axioms(const GameTable& game, const AttributionResult& result, double tol);

}  // namespace wfshap
