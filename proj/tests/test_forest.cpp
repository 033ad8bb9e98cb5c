#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "posmark/forest.hpp"
#include "test_util.hpp"

using namespace posmark;

namespace {

struct Data {
  FeatureMatrix X;
  std::vector<Label> y;
};

/// Feature 0 carries the class (shifted by `separation`), the rest is noise.
Data planted(std::size_t n, double separation, double target_share, std::uint64_t seed, std::size_t d = 5) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> u(0, 1);
  Data data{FeatureMatrix(0, d), {}};
  std::vector<double> row(d);
  for (std::size_t i = 0; i < n; ++i) {
    const bool target = u(rng) < target_share;
    for (auto& v : row) v = g(rng);
    if (target) row[0] += separation;
    data.X.append_row(row);
    data.y.push_back(target ? Label::Target : Label::Control);
  }
  return data;
}

double training_accuracy(const Forest& f, const Data& d) { return evaluate(f, d.X, d.y).accuracy; }

void check_structure(const Forest& f) {
  for (const auto& tree : f.trees) {
    CHECK(tree.depth() <= f.params.max_depth);
    for (const auto& node : tree.nodes) {
      CHECK(std::fabs(node.proba[0] + node.proba[1] - 1.0) <= 1e-12);
      CHECK(node.cover > 0);
    }
  }
}

Forest constant_forest(std::vector<double> target_probs, std::size_t d) {
  Forest f;
  f.medians.assign(d, 0.0);
  for (double p : target_probs) {
    DecisionTree t;
    TreeNode leaf;
    leaf.proba = {1 - p, p};
    leaf.cover = 1;
    t.nodes.push_back(leaf);
    f.trees.push_back(t);
  }
  return f;
}

} // namespace

TEST_SUITE("model") {

TEST_CASE("balanced class weights") {
  const std::vector<Label> y{Label::Control, Label::Control, Label::Control, Label::Target};
  const auto w = class_weights(y, ClassWeighting::Balanced);
  CHECK(w[0] == doctest::Approx(4.0 / 6.0));
  CHECK(w[1] == 2.0);
  CHECK(class_weights(y, ClassWeighting::Uniform) == std::array<double, 2>{1.0, 1.0});
}

TEST_CASE("medians ignore undefined values") {
  FeatureMatrix X(0, 3);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  X.append_row(std::vector<double>{1, nan, nan});
  X.append_row(std::vector<double>{3, 5, nan});
  X.append_row(std::vector<double>{2, nan, nan});
  X.append_row(std::vector<double>{10, 7, nan});
  CHECK(column_medians(X) == std::vector<double>{2.5, 6, 0});
}

TEST_CASE("separable data is fit exactly") {
  FeatureMatrix X(0, 2);
  std::vector<Label> y;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    X.append_row(std::vector<double>{a, b});
    y.push_back(a > 0 ? Label::Target : Label::Control);
  }
  ForestParams p;
  p.n_trees = 10;
  const auto f = train_forest(X, y, p);
  CHECK(evaluate(f, X, y).accuracy == 1.0);
  CHECK(evaluate(f, X, y).macro_f1 == 1.0);
  check_structure(f);
  CHECK(f.params.features_per_split == 1);
}

TEST_CASE("training is deterministic and depth-bounded") {
  const auto d = planted(400, 1.0, 0.3, 2, 9);
  ForestParams p;
  p.seed = 42;
  p.max_depth = 4;
  const auto a = train_forest(d.X, d.y, p);
  const auto b = train_forest(d.X, d.y, p);
  CHECK(a == b);
  CHECK(a.serialize() == b.serialize());
  check_structure(a);
  p.seed = 43;
  CHECK_FALSE(train_forest(d.X, d.y, p) == a);
  for (std::size_t depth : {1u, 2u, 15u}) {
    p.max_depth = depth;
    check_structure(train_forest(d.X, d.y, p));
  }
}

TEST_CASE("row permutation composed with the inverse index map gives the same tree") {
  const auto d = planted(150, 1.0, 0.4, 3);
  std::vector<std::size_t> perm(d.X.rows());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 shuffler(8);
  std::shuffle(perm.begin(), perm.end(), shuffler);
  // new row i holds old row perm[i]
  FeatureMatrix Xp(0, d.X.cols());
  std::vector<Label> yp;
  std::vector<std::size_t> inverse(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    Xp.append_row(d.X.row(perm[i]));
    yp.push_back(d.y[perm[i]]);
    inverse[perm[i]] = i;
  }
  ForestParams p;
  p.features_per_split = 2;
  const auto w = class_weights(d.y, p.class_weighting);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    std::mt19937_64 r1(seed), r2(seed);
    const auto sample = bootstrap_sample(d.X.rows(), r1);
    bootstrap_sample(d.X.rows(), r2);
    std::vector<std::size_t> mapped;
    for (auto s : sample) mapped.push_back(inverse[s]);
    CHECK(grow_tree(d.X, d.y, sample, w, p, r1) == grow_tree(Xp, yp, mapped, w, p, r2));
  }
}

TEST_CASE("balanced weighting lifts minority recall") {
  const auto train = planted(2000, 0.8, 0.1, 4);
  const auto test = planted(2000, 0.8, 0.1, 5);
  ForestParams p;
  p.seed = 1;
  p.max_depth = 4;
  const auto balanced = evaluate(train_forest(train.X, train.y, p), test.X, test.y);
  p.class_weighting = ClassWeighting::Uniform;
  const auto uniform = evaluate(train_forest(train.X, train.y, p), test.X, test.y);
  const auto target = static_cast<std::size_t>(Label::Target);
  CHECK(balanced.per_class[target].recall > uniform.per_class[target].recall);
  CHECK(uniform.weighted_f1 > uniform.macro_f1);
}

TEST_CASE("more planted separation never lowers training accuracy") {
  ForestParams p;
  p.seed = 3;
  p.max_depth = 3;
  p.n_trees = 20;
  double last = 0;
  for (double sep : {0.5, 1.5, 3.0}) {
    const auto d = planted(600, sep, 0.5, 77);
    const double acc = training_accuracy(train_forest(d.X, d.y, p), d);
    CHECK(acc >= last);
    last = acc;
  }
}

TEST_CASE("training preconditions") {
  FeatureMatrix X(0, 1);
  X.append_row(std::vector<double>{1});
  X.append_row(std::vector<double>{2});
  CHECK_THROWS_AS(train_forest(X, std::vector<Label>{Label::Target, Label::Target}, {}), Error);
  CHECK_THROWS_AS(train_forest(FeatureMatrix(0, 1), std::vector<Label>{}, {}), Error);
  CHECK_THROWS_AS(train_forest(X, std::vector<Label>{Label::Target}, {}), Error);
}

TEST_CASE("prediction") {
  CHECK(predict_proba(constant_forest({1.0}, 2), std::vector<double>{0, 0}) == 1.0);
  CHECK(predict_proba(constant_forest({1.0, 0.0}, 2), std::vector<double>{0, 0}) == 0.5);
  CHECK_THROWS_AS(predict_proba(constant_forest({1.0}, 2), std::vector<double>{0}), Error);

  const auto d = planted(300, 1.0, 0.5, 6);
  ForestParams p;
  p.n_trees = 15;
  const auto f = train_forest(d.X, d.y, p);
  std::mt19937_64 rng(0);
  std::normal_distribution<double> g(0, 3);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> x(5);
    for (auto& v : x) v = i % 7 == 0 ? std::numeric_limits<double>::quiet_NaN() : g(rng);
    const double prob = predict_proba(f, x);
    CHECK(prob >= 0.0);
    CHECK(prob <= 1.0);
  }
  // undefined entries take the training median
  std::vector<double> x(5, std::numeric_limits<double>::quiet_NaN());
  CHECK(predict_proba(f, x) == predict_proba(f, f.medians));
}

TEST_CASE("metrics worked example") {
  const std::vector<Label> actual{Label::Control, Label::Control, Label::Control, Label::Target};
  const std::vector<Label> predicted(4, Label::Control);
  const auto m = compute_metrics(actual, predicted);
  const auto C = static_cast<std::size_t>(Label::Control), T = static_cast<std::size_t>(Label::Target);
  // control: precision 3/4, recall 1, F1 6/7; target: 0/0 precision, recall 0, F1 0
  CHECK(m.per_class[C].f1 == doctest::Approx(6.0 / 7.0));
  CHECK(m.per_class[T].f1 == 0.0);
  CHECK(m.macro_f1 == doctest::Approx(0.4286).epsilon(1e-4 / 0.4286));
  CHECK(m.weighted_f1 == doctest::Approx(0.6429).epsilon(1e-4 / 0.6429));
  CHECK(m.macro_f1 == doctest::Approx((m.per_class[0].f1 + m.per_class[1].f1) / 2));
  CHECK(m.confusion[T][C] == 1);
  CHECK(m.accuracy == 0.75);
  CHECK(m.empty_classes.empty());

  const auto perfect = compute_metrics(actual, actual);
  CHECK(perfect.macro_f1 == 1.0);
  CHECK(perfect.weighted_f1 == 1.0);

  const std::vector<Label> only_control(3, Label::Control);
  const std::vector<Label> mixed{Label::Control, Label::Target, Label::Control};
  const auto e = compute_metrics(only_control, mixed);
  REQUIRE(e.empty_classes.size() == 1);
  CHECK(e.empty_classes[0] == Label::Target);
  CHECK(e.per_class[T].f1 == 0.0);
  CHECK(e.to_json().find("\"empty_classes\"") != std::string::npos);
}

TEST_CASE("threshold moves predictions") {
  const auto f = constant_forest({0.4}, 1);
  FeatureMatrix X(0, 1);
  X.append_row(std::vector<double>{0});
  const std::vector<Label> y{Label::Target};
  CHECK(evaluate(f, X, y, 0.5).accuracy == 0.0);
  CHECK(evaluate(f, X, y, 0.4).accuracy == 1.0);
}

TEST_CASE("persistence round trip") {
  const auto d = planted(300, 1.0, 0.3, 9);
  ForestParams p;
  p.n_trees = 7;
  p.class_weighting = ClassWeighting::Uniform;
  const auto f = train_forest(d.X, d.y, p, {"a", "b", "c", "d", "e"});
  testutil::TempDir dir;
  f.save(dir / "f.model");
  const auto back = Forest::load(dir / "f.model");
  CHECK(back == f);
  CHECK(back.serialize() == f.serialize());
  for (std::size_t r = 0; r < d.X.rows(); ++r) CHECK(predict_proba(back, d.X.row(r)) == predict_proba(f, d.X.row(r)));
  CHECK_THROWS_AS(Forest::deserialize("posmark-forest 99\n"), Error);
}

TEST_CASE("uniform index stays in range and covers it") {
  std::mt19937_64 rng(0);
  std::array<int, 7> seen{};
  for (int i = 0; i < 7000; ++i) ++seen[uniform_index(rng, 7)];
  for (int c : seen) CHECK(c > 800);
}

} // TEST_SUITE
