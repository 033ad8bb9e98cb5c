#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "posmark/csv.hpp"
#include "posmark/error.hpp"
#include "posmark/explain.hpp"

namespace posmark {

namespace {

struct PathElement {
  int feature = -1;
  double zero_fraction = 0;
  double one_fraction = 0;
  double weight = 0;
};

void extend_path(PathElement* path, std::size_t depth, double zero_fraction, double one_fraction,
                 int feature) {
  path[depth] = {feature, zero_fraction, one_fraction, depth == 0 ? 1.0 : 0.0};
  const double d1 = static_cast<double>(depth + 1);
  for (std::size_t k = depth; k-- > 0;) {
    path[k + 1].weight += one_fraction * path[k].weight * static_cast<double>(k + 1) / d1;
    path[k].weight = zero_fraction * path[k].weight * static_cast<double>(depth - k) / d1;
  }
}

void unwind_path(PathElement* path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].weight;
  for (std::size_t k = depth; k-- > 0;) {
    if (one != 0) {
      const double tmp = path[k].weight;
      path[k].weight = next * d1 / (static_cast<double>(k + 1) * one);
      next = tmp - path[k].weight * zero * static_cast<double>(depth - k) / d1;
    } else {
      path[k].weight = path[k].weight * d1 / (zero * static_cast<double>(depth - k));
    }
  }
  for (std::size_t k = index; k < depth; ++k) {
    path[k].feature = path[k + 1].feature;
    path[k].zero_fraction = path[k + 1].zero_fraction;
    path[k].one_fraction = path[k + 1].one_fraction;
  }
}

/// Total weight of the path with element `index` removed.
double unwound_sum(const PathElement* path, std::size_t depth, std::size_t index) {
  const double one = path[index].one_fraction;
  const double zero = path[index].zero_fraction;
  const double d1 = static_cast<double>(depth + 1);
  double next = path[depth].weight;
  double total = 0;
  for (std::size_t k = depth; k-- > 0;) {
    if (one != 0) {
      const double tmp = next * d1 / (static_cast<double>(k + 1) * one);
      total += tmp;
      next = path[k].weight - tmp * zero * static_cast<double>(depth - k) / d1;
    } else if (zero != 0) {
      total += path[k].weight / zero / (static_cast<double>(depth - k) / d1);
    }
  }
  return total;
}

class TreeShap {
public:
  TreeShap(const DecisionTree& tree, std::span<const double> x, std::vector<double>& phi)
      : tree_(tree), x_(x), phi_(phi) {
    const std::size_t levels = tree.depth() + 2;
    buffer_.resize(levels * (levels + 1) / 2 + levels);
  }

  void run() { recurse(0, buffer_.data(), 0, 1.0, 1.0, -1); }

private:
  void recurse(std::size_t node_id, PathElement* parent_path, std::size_t depth,
               double zero_fraction, double one_fraction, int feature) {
    PathElement* path = parent_path + depth + 1;
    std::copy(parent_path, parent_path + depth + 1, path);
    extend_path(path, depth, zero_fraction, one_fraction, feature);

    const TreeNode& node = tree_.nodes[node_id];
    if (node.is_leaf()) {
      const double value = node.proba[static_cast<std::size_t>(Label::Target)];
      for (std::size_t i = 1; i <= depth; ++i) {
        const double w = unwound_sum(path, depth, i);
        phi_[static_cast<std::size_t>(path[i].feature)] +=
            w * (path[i].one_fraction - path[i].zero_fraction) * value;
      }
      return;
    }

    const auto f = static_cast<std::size_t>(node.feature);
    const bool go_left = x_[f] <= node.threshold;
    const auto hot = static_cast<std::size_t>(go_left ? node.left : node.right);
    const auto cold = static_cast<std::size_t>(go_left ? node.right : node.left);
    const double hot_zero = tree_.nodes[hot].cover / node.cover;
    const double cold_zero = tree_.nodes[cold].cover / node.cover;

    double incoming_zero = 1.0, incoming_one = 1.0;
    std::size_t index = 0;
    while (index <= depth && path[index].feature != node.feature) ++index;
    if (index <= depth) {
      incoming_zero = path[index].zero_fraction;
      incoming_one = path[index].one_fraction;
      unwind_path(path, depth, index);
      --depth;
    }
    recurse(hot, path, depth + 1, hot_zero * incoming_zero, incoming_one, node.feature);
    recurse(cold, path, depth + 1, cold_zero * incoming_zero, 0.0, node.feature);
  }

  const DecisionTree& tree_;
  std::span<const double> x_;
  std::vector<double>& phi_;
  std::vector<PathElement> buffer_;
};

void check_tree(const DecisionTree& tree, std::span<const double> x) {
  if (tree.nodes.empty()) throw Error("tree has no nodes");
  for (const auto& node : tree.nodes) {
    if (!(node.cover > 0)) throw Error("tree node without cover; cannot attribute");
    if (!node.is_leaf() && static_cast<std::size_t>(node.feature) >= x.size())
      throw Error("feature vector is shorter than the tree's feature indices");
  }
}

/// Cover-weighted expectation of the tree output when only features in
/// `known` follow x.
double conditional_expectation(const DecisionTree& tree, std::size_t id, std::span<const double> x,
                               std::uint32_t known) {
  const TreeNode& node = tree.nodes[id];
  if (node.is_leaf()) return node.proba[static_cast<std::size_t>(Label::Target)];
  const auto f = static_cast<std::size_t>(node.feature);
  const auto l = static_cast<std::size_t>(node.left), r = static_cast<std::size_t>(node.right);
  if (known & (1u << f)) return conditional_expectation(tree, x[f] <= node.threshold ? l : r, x, known);
  return (tree.nodes[l].cover * conditional_expectation(tree, l, x, known) +
          tree.nodes[r].cover * conditional_expectation(tree, r, x, known)) /
         node.cover;
}

} // namespace

Attribution tree_shap(const DecisionTree& tree, std::span<const double> x) {
  check_tree(tree, x);
  Attribution a;
  a.phi.assign(x.size(), 0.0);
  TreeShap(tree, x, a.phi).run();
  a.model_output = tree.predict(x);
  // base value: cover-weighted mean of leaf values
  double base = 0;
  for (const auto& node : tree.nodes)
    if (node.is_leaf()) base += node.cover * node.proba[static_cast<std::size_t>(Label::Target)];
  a.base_value = base / tree.nodes[0].cover;
  return a;
}

Attribution brute_force_shapley(const DecisionTree& tree, std::span<const double> x) {
  const std::size_t d = x.size();
  if (d > 15) throw Error("brute_force_shapley: at most 15 features");
  check_tree(tree, x);

  const std::uint32_t subsets = 1u << d;
  std::vector<double> value(subsets);
  for (std::uint32_t s = 0; s < subsets; ++s) value[s] = conditional_expectation(tree, 0, x, s);

  // |S|! (d - |S| - 1)! / d!
  std::vector<double> coef(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    double c = 1.0 / static_cast<double>(d);
    // 1 / (d * C(d-1, k))
    for (std::size_t j = 1; j <= k; ++j)
      c *= static_cast<double>(j) / static_cast<double>(d - j);
    coef[k] = c;
  }

  Attribution a;
  a.phi.assign(d, 0.0);
  for (std::size_t i = 0; i < d; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t s = 0; s < subsets; ++s) {
      if (s & bit) continue;
      a.phi[i] += coef[static_cast<std::size_t>(std::popcount(s))] * (value[s | bit] - value[s]);
    }
  }
  a.base_value = value[0];
  a.model_output = value[subsets - 1];
  return a;
}

Attribution forest_shap(const Forest& forest, std::span<const double> x) {
  if (forest.trees.empty()) throw Error("forest_shap: forest has no trees");
  const auto row = forest.impute(x);
  Attribution total;
  total.phi.assign(row.size(), 0.0);
  for (const auto& tree : forest.trees) {
    const auto a = tree_shap(tree, row);
    for (std::size_t i = 0; i < row.size(); ++i) total.phi[i] += a.phi[i];
    total.base_value += a.base_value;
  }
  const double n = static_cast<double>(forest.trees.size());
  for (auto& p : total.phi) p /= n;
  total.base_value /= n;
  total.model_output = predict_proba(forest, x);
  return total;
}

ShapSummary shap_summary(const Forest& forest, const FeatureMatrix& X, std::size_t sample_size,
                         std::uint64_t seed) {
  if (sample_size > X.rows())
    throw Error("sample size " + std::to_string(sample_size) + " exceeds the " +
                std::to_string(X.rows()) + " available rows");
  if (X.cols() != forest.dimension())
    throw Error("feature matrix width does not match the forest");

  ShapSummary summary;
  std::vector<std::size_t> rows(X.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  if (sample_size < X.rows()) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < sample_size; ++i)
      std::swap(rows[i], rows[i + uniform_index(rng, rows.size() - i)]);
    rows.resize(sample_size);
    std::sort(rows.begin(), rows.end());
  }
  summary.rows = std::move(rows);

  const std::size_t d = X.cols();
  std::vector<double> mean_abs(d, 0.0);
  summary.attributions.reserve(summary.rows.size());
  for (std::size_t r : summary.rows) {
    auto a = forest_shap(forest, X.row(r));
    for (std::size_t i = 0; i < d; ++i) mean_abs[i] += std::fabs(a.phi[i]);
    summary.attributions.push_back(std::move(a));
  }
  if (!summary.rows.empty())
    for (auto& m : mean_abs) m /= static_cast<double>(summary.rows.size());

  for (std::size_t i = 0; i < d; ++i)
    summary.ranking.push_back({i, i < forest.feature_names.size() ? forest.feature_names[i] : "f" + std::to_string(i),
                               mean_abs[i], 0});
  std::stable_sort(summary.ranking.begin(), summary.ranking.end(),
                   [](const FeatureImportance& a, const FeatureImportance& b) {
                     return a.mean_abs_phi > b.mean_abs_phi;
                   });
  for (std::size_t i = 0; i < summary.ranking.size(); ++i) summary.ranking[i].rank = i + 1;
  return summary;
}

std::string attributions_to_csv(const ShapSummary& summary, const Forest& forest,
                                const FeatureMatrix& X, std::span<const std::size_t> post_ids) {
  std::string out = "post_index,feature,feature_value,phi\n";
  for (std::size_t k = 0; k < summary.rows.size(); ++k) {
    const std::size_t r = summary.rows[k];
    const std::size_t post = post_ids.empty() ? r : post_ids[r];
    for (std::size_t i = 0; i < X.cols(); ++i) {
      const double v = X.at(r, i);
      out += csv::join({std::to_string(post), forest.feature_names[i],
                        std::isnan(v) ? std::string("NA") : csv::number(v),
                        csv::number(summary.attributions[k].phi[i])});
      out += '\n';
    }
  }
  return out;
}

std::string ranking_to_csv(const ShapSummary& summary, std::size_t top_k) {
  std::string out = "feature,mean_abs_phi,rank\n";
  for (const auto& f : summary.ranking) {
    if (top_k != 0 && f.rank > top_k) break;
    out += csv::join({f.name, csv::number(f.mean_abs_phi), std::to_string(f.rank)}) + "\n";
  }
  return out;
}

} // namespace posmark
