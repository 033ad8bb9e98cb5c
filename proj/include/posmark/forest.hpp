#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "posmark/corpus.hpp"

namespace posmark {

/// Dense row-major matrix; NaN marks an undefined value.
class FeatureMatrix {
public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  void append_row(std::span<const double> values);

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ClassWeighting { Balanced, Uniform };

struct ForestParams {
  std::size_t n_trees = 50;
  std::size_t max_depth = 15;
  ClassWeighting class_weighting = ClassWeighting::Balanced;
  /// Candidate features per split; nullopt means floor(sqrt(d)).
  std::optional<std::size_t> features_per_split;
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 0;
};

struct TreeNode {
  int feature = -1; // -1 for a leaf
  double threshold = 0; // x[feature] <= threshold goes left
  int left = -1;
  int right = -1;
  std::array<double, 2> proba{}; // class-weighted, indexed by Label
  double cover = 0;              // class-weighted sample count

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

/// Binary tree stored in preorder; node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  /// Target probability of the leaf reached by `x` (no imputation here).
  double predict(std::span<const double> x) const;
  /// Longest root-to-leaf path, in edges.
  std::size_t depth() const;
  bool operator==(const DecisionTree&) const = default;
};

struct Forest {
  std::vector<DecisionTree> trees;
  ForestParams params;
  std::vector<std::string> feature_names;
  std::vector<double> medians;          // imputation values, one per feature
  std::array<double, 2> class_weights{}; // indexed by Label

  std::size_t dimension() const { return medians.size(); }
  /// Copy of `x` with undefined entries replaced by the training medians.
  std::vector<double> impute(std::span<const double> x) const;

  std::string serialize() const;
  static Forest deserialize(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Forest load(const std::filesystem::path& path);

  bool operator==(const Forest& other) const;
};

std::array<double, 2> class_weights(std::span<const Label> y, ClassWeighting weighting);

/// Per-feature median of the defined values (0 when a column is all NaN).
std::vector<double> column_medians(const FeatureMatrix& X);

/// Grows one tree on the (already imputed) rows listed in `sample`, which
/// may repeat rows. `rng` drives candidate-feature sampling only.
DecisionTree grow_tree(const FeatureMatrix& X, std::span<const Label> y,
                       std::span<const std::size_t> sample, const std::array<double, 2>& weights,
                       const ForestParams& params, std::mt19937_64& rng);

/// Bootstrap indices for tree `tree_index` (n draws with replacement), using
/// the per-tree generator seeded with params.seed + tree_index. The same
/// generator then feeds grow_tree.
std::vector<std::size_t> bootstrap_sample(std::size_t n, std::mt19937_64& rng);

/// Throws posmark::Error for empty input, mismatched sizes or a single class.
Forest train_forest(const FeatureMatrix& X, std::span<const Label> y, const ForestParams& params,
                    std::vector<std::string> feature_names = {});

/// Mean Target probability over trees, after median imputation.
double predict_proba(const Forest& forest, std::span<const double> x);

struct ClassMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::size_t support = 0;
};

struct Metrics {
  std::array<ClassMetrics, 2> per_class{}; // indexed by Label
  double weighted_f1 = 0;
  double macro_f1 = 0;
  double accuracy = 0;
  std::array<std::array<std::size_t, 2>, 2> confusion{}; // [actual][predicted]
  /// Classes with no true instances (their scores fall back to 0).
  std::vector<Label> empty_classes;

  std::string to_json() const;
};

Metrics compute_metrics(std::span<const Label> actual, std::span<const Label> predicted);
Metrics evaluate(const Forest& forest, const FeatureMatrix& X, std::span<const Label> y,
                 double threshold = 0.5);

/// Uniform integer in [0, n) from a 64-bit engine, identical on every platform.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);

} // namespace posmark
