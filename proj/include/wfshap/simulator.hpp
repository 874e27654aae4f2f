#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wfshap/game.hpp"
#include "wfshap/records.hpp"

namespace wfshap {

/// Additive-plus-pairwise game:
///   v(S) = base + sum_{i in S} w_i + sum_{{i,j} in S} gamma_ij
/// clamped to [0, 1] when `clamp` is set. Without clamping its Shapley value
/// is phi_i = w_i + 1/2 sum_j gamma_ij and its synergy matrix is gamma.
struct SyntheticGameSpec {
  std::size_t n = 0;
  double base = 0.0;
  std::vector<double> weights;
  std::vector<double> interactions;  ///< n x n row-major, symmetric, zero diagonal
  bool clamp = true;

  double gamma(std::size_t i, std::size_t j) const { return interactions.at(i * n + j); }
  void set_gamma(std::size_t i, std::size_t j, double value);

  /// Value before clamping.
  double raw_value(Mask mask) const;
  /// Value after the clamp policy.
  double value(Mask mask) const;

  /// Rejects size mismatches, an asymmetric matrix, or a nonzero diagonal.
  void validate() const;

  static SyntheticGameSpec additive(double base, std::vector<double> weights);
};

struct SyntheticGame {
  GameTable table;
  /// True when no coalition value needed clamping (always true without clamping).
  bool clamp_free = true;
  /// w_i + 1/2 sum_j gamma_ij; withheld when clamping changed any value.
  std::optional<std::vector<double>> analytic_phi;
};

/// Labels default to c0, c1, ...
ComponentSet default_components(std::size_t n);

SyntheticGame synthesize_game(const SyntheticGameSpec& spec, const ComponentSet& components);
SyntheticGame synthesize_game(const SyntheticGameSpec& spec);

/// num_tasks independent Bernoulli(v(S)) scores from one stream seeded by
/// `seed`, with task ids "t0000", "t0001", ...
std::vector<TaskOutcomeRecord> simulate_task_outcomes(const SyntheticGameSpec& spec, const Coalition& coalition,
                                                      std::size_t num_tasks, std::uint64_t seed);

/// One Bernoulli(v(S)) draw keyed by (seed, coalition, task id), so any task
/// list can be scored in any order with reproducible results.
double simulate_task_score(const SyntheticGameSpec& spec, const Coalition& coalition, std::string_view task_id,
                           std::uint64_t seed);

/// { "n": int, "base": n, "weights": [...], "interactions": [[i, j, gamma], ...], "clamp": bool }
SyntheticGameSpec parse_spec_json(std::string_view text);
std::string format_spec_json(const SyntheticGameSpec& spec);

}  // namespace wfshap
