#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "posmark/csv.hpp"
#include "posmark/error.hpp"
#include "posmark/forest.hpp"

namespace posmark {

__extension__ using u128 = unsigned __int128;

namespace {

constexpr std::string_view kForestHeader = "posmark-forest 1";

std::size_t label_index(Label l) { return static_cast<std::size_t>(l); }

/// Class-weighted Gini impurity times node weight: W - (W0² + W1²) / W.
double weighted_impurity(double w0, double w1) {
  const double w = w0 + w1;
  if (w <= 0.0) return 0.0;
  return w - (w0 * w0 + w1 * w1) / w;
}

struct Split {
  int feature = -1;
  double threshold = 0;
  double gain = 0;
};

class TreeBuilder {
public:
  TreeBuilder(const FeatureMatrix& X, std::span<const Label> y, const std::array<double, 2>& weights,
              const ForestParams& params, std::mt19937_64& rng)
      : X_(X), y_(y), weights_(weights), params_(params), rng_(rng) {
    const std::size_t d = X.cols();
    k_ = params.features_per_split.value_or(
        static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d)))));
    k_ = std::clamp<std::size_t>(k_, 1, d);
  }

  DecisionTree build(std::vector<std::size_t> sample) {
    grow(std::move(sample), 0);
    return std::move(tree_);
  }

private:
  int grow(std::vector<std::size_t> sample, std::size_t depth) {
    std::array<std::size_t, 2> counts{};
    for (auto i : sample) ++counts[label_index(y_[i])];
    const double w0 = static_cast<double>(counts[0]) * weights_[0];
    const double w1 = static_cast<double>(counts[1]) * weights_[1];

    const int id = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    {
      TreeNode& node = tree_.nodes.back();
      node.cover = w0 + w1;
      node.proba = node.cover > 0 ? std::array<double, 2>{w0 / node.cover, w1 / node.cover}
                                  : std::array<double, 2>{0.5, 0.5};
    }

    const bool pure = counts[0] == 0 || counts[1] == 0;
    if (depth >= params_.max_depth || pure || sample.size() < 2 * params_.min_samples_leaf)
      return id;

    const Split split = best_split(sample, counts, weighted_impurity(w0, w1), w0 + w1);
    if (split.feature < 0) return id;

    std::vector<std::size_t> left, right;
    for (auto i : sample)
      (X_.at(i, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(i);
    sample.clear();
    sample.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    TreeNode& node = tree_.nodes[static_cast<std::size_t>(id)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> all(X_.cols());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    for (std::size_t i = 0; i < k_; ++i) {
      const std::size_t j = i + uniform_index(rng_, all.size() - i);
      std::swap(all[i], all[j]);
    }
    all.resize(k_);
    std::sort(all.begin(), all.end());
    return all;
  }

  Split best_split(const std::vector<std::size_t>& sample, const std::array<std::size_t, 2>& counts,
                   double parent_impurity, double parent_weight) {
    Split best;
    const double min_gain = 1e-12 * parent_weight;
    const std::size_t n = sample.size();
    std::vector<std::pair<double, std::size_t>> column(n);
    for (std::size_t f : candidate_features()) {
      for (std::size_t k = 0; k < n; ++k)
        column[k] = {X_.at(sample[k], f), label_index(y_[sample[k]])};
      std::sort(column.begin(), column.end());
      std::array<std::size_t, 2> left{};
      for (std::size_t k = 0; k + 1 < n; ++k) {
        ++left[column[k].second];
        const double v = column[k].first, next = column[k + 1].first;
        if (!(v < next)) continue;
        const std::size_t nl = k + 1, nr = n - nl;
        if (nl < params_.min_samples_leaf || nr < params_.min_samples_leaf) continue;
        const double l0 = static_cast<double>(left[0]) * weights_[0];
        const double l1 = static_cast<double>(left[1]) * weights_[1];
        const double r0 = static_cast<double>(counts[0] - left[0]) * weights_[0];
        const double r1 = static_cast<double>(counts[1] - left[1]) * weights_[1];
        const double gain = parent_impurity - weighted_impurity(l0, l1) - weighted_impurity(r0, r1);
        if (gain > min_gain && gain > best.gain) {
          double threshold = v + (next - v) / 2.0;
          if (!(threshold < next)) threshold = v;
          best = Split{static_cast<int>(f), threshold, gain};
        }
      }
    }
    return best;
  }

  const FeatureMatrix& X_;
  std::span<const Label> y_;
  std::array<double, 2> weights_;
  const ForestParams& params_;
  std::mt19937_64& rng_;
  std::size_t k_ = 1;
  DecisionTree tree_;
};

std::size_t subtree_depth(const DecisionTree& tree, int id) {
  const auto& node = tree.nodes[static_cast<std::size_t>(id)];
  if (node.is_leaf()) return 0;
  return 1 + std::max(subtree_depth(tree, node.left), subtree_depth(tree, node.right));
}

double parse_double(const std::string& s) {
  auto v = csv::parse_number(s);
  if (!v) throw Error("forest file: unexpected NA");
  return *v;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string field;
  while (std::getline(in, field, '\t')) out.push_back(field);
  return out;
}

} // namespace

// ---------------------------------------------------------------------------

void FeatureMatrix::append_row(std::span<const double> values) {
  if (rows_ == 0 && cols_ == 0) cols_ = values.size();
  if (values.size() != cols_) throw Error("FeatureMatrix: row has wrong dimension");
  data_.insert(data_.end(), values.begin(), values.end());
  ++rows_;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  // Lemire's multiply-and-reject.
  const std::uint64_t range = n;
  std::uint64_t x = rng();
  u128 m = static_cast<u128>(x) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t floor = (0 - range) % range;
    while (low < floor) {
      x = rng();
      m = static_cast<u128>(x) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

double DecisionTree::predict(std::span<const double> x) const {
  std::size_t id = 0;
  while (!nodes[id].is_leaf()) {
    const auto& node = nodes[id];
    id = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                            : node.right);
  }
  return nodes[id].proba[label_index(Label::Target)];
}

std::size_t DecisionTree::depth() const { return nodes.empty() ? 0 : subtree_depth(*this, 0); }

std::vector<double> Forest::impute(std::span<const double> x) const {
  if (x.size() != medians.size())
    throw Error("feature vector has dimension " + std::to_string(x.size()) + ", forest expects " +
                std::to_string(medians.size()));
  std::vector<double> out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (std::isnan(out[i])) out[i] = medians[i];
  return out;
}

std::array<double, 2> class_weights(std::span<const Label> y, ClassWeighting weighting) {
  if (weighting == ClassWeighting::Uniform) return {1.0, 1.0};
  std::array<std::size_t, 2> counts{};
  for (auto l : y) ++counts[label_index(l)];
  const double n = static_cast<double>(y.size());
  std::array<double, 2> w{};
  for (std::size_t c = 0; c < 2; ++c)
    w[c] = counts[c] > 0 ? n / (2.0 * static_cast<double>(counts[c])) : 0.0;
  return w;
}

std::vector<double> column_medians(const FeatureMatrix& X) {
  std::vector<double> medians(X.cols(), 0.0);
  std::vector<double> values;
  for (std::size_t c = 0; c < X.cols(); ++c) {
    values.clear();
    for (std::size_t r = 0; r < X.rows(); ++r)
      if (!std::isnan(X.at(r, c))) values.push_back(X.at(r, c));
    if (values.empty()) continue;
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size() / 2;
    medians[c] = values.size() % 2 ? values[m] : (values[m - 1] + values[m]) / 2.0;
  }
  return medians;
}

std::vector<std::size_t> bootstrap_sample(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::size_t> sample(n);
  for (auto& s : sample) s = uniform_index(rng, n);
  return sample;
}

DecisionTree grow_tree(const FeatureMatrix& X, std::span<const Label> y,
                       std::span<const std::size_t> sample, const std::array<double, 2>& weights,
                       const ForestParams& params, std::mt19937_64& rng) {
  if (X.cols() == 0) throw Error("grow_tree: matrix has no columns");
  TreeBuilder builder(X, y, weights, params, rng);
  return builder.build(std::vector<std::size_t>(sample.begin(), sample.end()));
}

Forest train_forest(const FeatureMatrix& X, std::span<const Label> y, const ForestParams& params,
                    std::vector<std::string> feature_names) {
  if (X.rows() == 0 || X.cols() == 0) throw Error("train_forest: empty feature matrix");
  if (X.rows() != y.size()) throw Error("train_forest: matrix rows and labels differ in number");
  if (X.rows() < 2) throw Error("train_forest: need at least two rows");
  if (params.n_trees == 0 || params.max_depth == 0 || params.min_samples_leaf == 0)
    throw Error("train_forest: n_trees, max_depth and min_samples_leaf must be positive");
  const bool has_target = std::find(y.begin(), y.end(), Label::Target) != y.end();
  const bool has_control = std::find(y.begin(), y.end(), Label::Control) != y.end();
  if (!has_target || !has_control) throw Error("train_forest: both classes must be present");
  if (!feature_names.empty() && feature_names.size() != X.cols())
    throw Error("train_forest: feature name count does not match matrix width");

  Forest forest;
  forest.params = params;
  forest.params.features_per_split = params.features_per_split.value_or(
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(X.cols()))))));
  forest.feature_names = std::move(feature_names);
  if (forest.feature_names.empty())
    for (std::size_t c = 0; c < X.cols(); ++c) forest.feature_names.push_back("f" + std::to_string(c));
  forest.medians = column_medians(X);
  forest.class_weights = class_weights(y, params.class_weighting);

  FeatureMatrix imputed = X;
  for (std::size_t r = 0; r < imputed.rows(); ++r)
    for (std::size_t c = 0; c < imputed.cols(); ++c)
      if (std::isnan(imputed.at(r, c))) imputed.at(r, c) = forest.medians[c];

  forest.trees.reserve(params.n_trees);
  for (std::size_t t = 0; t < params.n_trees; ++t) {
    std::mt19937_64 rng(params.seed + t);
    const auto sample = bootstrap_sample(imputed.rows(), rng);
    forest.trees.push_back(grow_tree(imputed, y, sample, forest.class_weights, forest.params, rng));
  }
  return forest;
}

double predict_proba(const Forest& forest, std::span<const double> x) {
  if (forest.trees.empty()) throw Error("predict_proba: forest has no trees");
  const auto row = forest.impute(x);
  double sum = 0;
  for (const auto& tree : forest.trees) sum += tree.predict(row);
  return sum / static_cast<double>(forest.trees.size());
}

// ---------------------------------------------------------------------------

std::string Forest::serialize() const {
  std::ostringstream os;
  os << kForestHeader << '\n';
  os << "n_trees\t" << params.n_trees << '\n';
  os << "max_depth\t" << params.max_depth << '\n';
  os << "class_weighting\t" << (params.class_weighting == ClassWeighting::Balanced ? "balanced" : "uniform")
     << '\n';
  os << "features_per_split\t" << params.features_per_split.value_or(0) << '\n';
  os << "min_samples_leaf\t" << params.min_samples_leaf << '\n';
  os << "seed\t" << params.seed << '\n';
  os << "class_weights\t" << csv::number(class_weights[0]) << '\t' << csv::number(class_weights[1]) << '\n';
  os << "features";
  for (const auto& f : feature_names) os << '\t' << f;
  os << '\n';
  os << "medians";
  for (double m : medians) os << '\t' << csv::number(m);
  os << '\n';
  os << "# tree\tnode\tfeature\tthreshold\tleft\tright\tp_control\tp_target\tcover\n";
  for (std::size_t t = 0; t < trees.size(); ++t)
    for (std::size_t n = 0; n < trees[t].nodes.size(); ++n) {
      const auto& node = trees[t].nodes[n];
      os << t << '\t' << n << '\t' << node.feature << '\t' << csv::number(node.threshold) << '\t'
         << node.left << '\t' << node.right << '\t' << csv::number(node.proba[0]) << '\t'
         << csv::number(node.proba[1]) << '\t' << csv::number(node.cover) << '\n';
    }
  return os.str();
}

Forest Forest::deserialize(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kForestHeader)
    throw Error("forest file: missing or unsupported version header");
  auto field = [&](const std::string& key) {
    if (!std::getline(in, line)) throw Error("forest file: truncated before '" + key + "'");
    auto cols = split_tabs(line);
    if (cols.empty() || cols[0] != key) throw Error("forest file: expected '" + key + "'");
    cols.erase(cols.begin());
    return cols;
  };
  auto one = [&](const std::string& key) {
    auto cols = field(key);
    if (cols.size() != 1) throw Error("forest file: bad '" + key + "' line");
    return cols[0];
  };
  Forest f;
  try {
    f.params.n_trees = std::stoull(one("n_trees"));
    f.params.max_depth = std::stoull(one("max_depth"));
    const auto weighting = one("class_weighting");
    if (weighting != "balanced" && weighting != "uniform")
      throw Error("forest file: unknown class weighting '" + weighting + "'");
    f.params.class_weighting =
        weighting == "balanced" ? ClassWeighting::Balanced : ClassWeighting::Uniform;
    f.params.features_per_split = std::stoull(one("features_per_split"));
    f.params.min_samples_leaf = std::stoull(one("min_samples_leaf"));
    f.params.seed = std::stoull(one("seed"));
    auto cw = field("class_weights");
    if (cw.size() != 2) throw Error("forest file: bad class_weights line");
    f.class_weights = {parse_double(cw[0]), parse_double(cw[1])};
    f.feature_names = field("features");
    for (const auto& m : field("medians")) f.medians.push_back(parse_double(m));
    if (f.medians.size() != f.feature_names.size())
      throw Error("forest file: medians and feature names differ in number");

    f.trees.resize(f.params.n_trees);
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto cols = split_tabs(line);
      if (cols.size() != 9) throw Error("forest file: node record needs 9 fields");
      const std::size_t t = std::stoull(cols[0]), n = std::stoull(cols[1]);
      if (t >= f.trees.size() || n != f.trees[t].nodes.size())
        throw Error("forest file: node records out of order");
      TreeNode node;
      node.feature = std::stoi(cols[2]);
      node.threshold = parse_double(cols[3]);
      node.left = std::stoi(cols[4]);
      node.right = std::stoi(cols[5]);
      node.proba = {parse_double(cols[6]), parse_double(cols[7])};
      node.cover = parse_double(cols[8]);
      if (node.feature >= static_cast<int>(f.medians.size()))
        throw Error("forest file: feature index out of range");
      f.trees[t].nodes.push_back(node);
    }
  } catch (const std::invalid_argument&) {
    throw Error("forest file: malformed integer field");
  } catch (const std::out_of_range&) {
    throw Error("forest file: integer field out of range");
  }
  for (const auto& tree : f.trees) {
    if (tree.nodes.empty()) throw Error("forest file: tree without nodes");
    for (const auto& node : tree.nodes)
      if (!node.is_leaf() &&
          (node.left <= 0 || node.right <= 0 || static_cast<std::size_t>(node.left) >= tree.nodes.size() ||
           static_cast<std::size_t>(node.right) >= tree.nodes.size()))
        throw Error("forest file: child index out of range");
  }
  return f;
}

void Forest::save(const std::filesystem::path& path) const { csv::write_file(path, serialize()); }

Forest Forest::load(const std::filesystem::path& path) { return deserialize(csv::read_file(path)); }

bool Forest::operator==(const Forest& other) const { return serialize() == other.serialize(); }

// ---------------------------------------------------------------------------

Metrics compute_metrics(std::span<const Label> actual, std::span<const Label> predicted) {
  if (actual.size() != predicted.size()) throw Error("compute_metrics: size mismatch");
  Metrics m;
  for (std::size_t i = 0; i < actual.size(); ++i)
    ++m.confusion[label_index(actual[i])][label_index(predicted[i])];
  auto safe_div = [](double a, double b) { return b > 0 ? a / b : 0.0; };
  double correct = 0;
  for (std::size_t c = 0; c < 2; ++c) {
    const double tp = static_cast<double>(m.confusion[c][c]);
    const double pred_c = static_cast<double>(m.confusion[0][c] + m.confusion[1][c]);
    const double actual_c = static_cast<double>(m.confusion[c][0] + m.confusion[c][1]);
    auto& cm = m.per_class[c];
    cm.support = m.confusion[c][0] + m.confusion[c][1];
    cm.precision = safe_div(tp, pred_c);
    cm.recall = safe_div(tp, actual_c);
    cm.f1 = safe_div(2 * cm.precision * cm.recall, cm.precision + cm.recall);
    if (cm.support == 0) m.empty_classes.push_back(static_cast<Label>(c));
    correct += tp;
  }
  const double n = static_cast<double>(actual.size());
  m.macro_f1 = (m.per_class[0].f1 + m.per_class[1].f1) / 2.0;
  m.weighted_f1 = safe_div(m.per_class[0].f1 * static_cast<double>(m.per_class[0].support) +
                               m.per_class[1].f1 * static_cast<double>(m.per_class[1].support),
                           n);
  m.accuracy = safe_div(correct, n);
  return m;
}

Metrics evaluate(const Forest& forest, const FeatureMatrix& X, std::span<const Label> y,
                 double threshold) {
  if (X.rows() != y.size()) throw Error("evaluate: matrix rows and labels differ in number");
  if (X.rows() == 0) throw Error("evaluate: empty evaluation set");
  std::vector<Label> predicted;
  predicted.reserve(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r)
    predicted.push_back(predict_proba(forest, X.row(r)) >= threshold ? Label::Target : Label::Control);
  return compute_metrics(y, predicted);
}

std::string Metrics::to_json() const {
  nlohmann::ordered_json j;
  for (Label l : kLabels) {
    const auto& c = per_class[label_index(l)];
    j["per_class"][std::string(label_name(l))] = {
        {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}, {"support", c.support}};
  }
  j["weighted_f1"] = weighted_f1;
  j["macro_f1"] = macro_f1;
  j["accuracy"] = accuracy;
  j["confusion_matrix"] = {
      {"labels", {"control", "target"}},
      {"rows_actual_cols_predicted",
       {{confusion[0][0], confusion[0][1]}, {confusion[1][0], confusion[1][1]}}}};
  auto empty = nlohmann::ordered_json::array();
  for (Label l : empty_classes) empty.push_back(std::string(label_name(l)));
  j["empty_classes"] = empty;
  return j.dump(2) + "\n";
}

} // namespace posmark
