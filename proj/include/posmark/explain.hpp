#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "posmark/forest.hpp"

namespace posmark {

/// Additive explanation of one prediction: base_value + sum(phi) equals
/// model_output up to rounding.
struct Attribution {
  std::vector<double> phi;
  double base_value = 0;
  double model_output = 0;
};

/// Path-dependent TreeSHAP for the Target probability of one tree. `x` must
/// already be imputed. Throws if a node has no positive cover.
Attribution tree_shap(const DecisionTree& tree, std::span<const double> x);

/// Exact Shapley values by enumerating all 2^d feature subsets of the same
/// cover-weighted game. Test oracle; throws for more than 15 features.
Attribution brute_force_shapley(const DecisionTree& tree, std::span<const double> x);

/// Mean of per-tree attributions; undefined entries of `x` are imputed.
Attribution forest_shap(const Forest& forest, std::span<const double> x);

struct FeatureImportance {
  std::size_t feature = 0;
  std::string name;
  double mean_abs_phi = 0;
  std::size_t rank = 0; // 1-based
};

struct ShapSummary {
  std::vector<std::size_t> rows;            // sampled row indices, ascending
  std::vector<Attribution> attributions;    // parallel to rows
  std::vector<FeatureImportance> ranking;   // every feature, descending mean |phi|
};

/// Explains a seeded uniform sample (without replacement) of `X`'s rows and
/// ranks features by mean |phi|, ties by feature index. Throws when
/// sample_size exceeds the row count.
ShapSummary shap_summary(const Forest& forest, const FeatureMatrix& X, std::size_t sample_size,
                         std::uint64_t seed);

/// Long-format CSV: post_index, feature, feature_value, phi. `post_ids`
/// maps matrix rows to post indices (row index when empty).
std::string attributions_to_csv(const ShapSummary& summary, const Forest& forest,
                                const FeatureMatrix& X, std::span<const std::size_t> post_ids = {});
/// feature, mean_abs_phi, rank; truncated to `top_k` rows when nonzero.
std::string ranking_to_csv(const ShapSummary& summary, std::size_t top_k = 0);

} // namespace posmark
