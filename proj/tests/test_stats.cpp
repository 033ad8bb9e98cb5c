#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "oracles.hpp"
#include "posmark/stats.hpp"
#include "test_util.hpp"

using namespace posmark;

TEST_SUITE("stats") {

TEST_CASE("log-gamma and incomplete beta against independent references") {
  for (double x : {1e-8, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 9.99, 10.0, 10.5, 55.5, 1e3, 1e6, 1e12})
    CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13).scale(1.0));
  CHECK(log_beta(0.5, 1e9) == doctest::Approx(std::log(boost::math::beta(0.5, 1e9))).epsilon(1e-12));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 500; ++i) {
    const double a = std::exp(8 * u(rng) - 3), b = std::exp(8 * u(rng) - 3), x = u(rng);
    CHECK(std::fabs(incomplete_beta(a, b, x) - boost::math::ibeta(a, b, x)) <= 1e-12);
  }
  CHECK(incomplete_beta(2, 3, 0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1) == 1.0);
}

TEST_CASE("student t CDF basics") {
  for (double df : {1.0, 2.5, 30.0, 1e6}) CHECK(student_t_cdf(0, df) == 0.5);
  CHECK(student_t_cdf(std::numeric_limits<double>::infinity(), 3) == 1.0);
  CHECK(student_t_cdf(-std::numeric_limits<double>::infinity(), 3) == 0.0);
  CHECK(std::fabs(student_t_cdf(1.0, 10) - oracle::t_cdf(1.0, 10)) <= 1e-10);
  CHECK_THROWS_AS(student_t_cdf(1.0, 0), Error);
  CHECK_THROWS_AS(student_t_cdf(1.0, -2), Error);
  // Cauchy closed form
  CHECK(student_t_cdf(1.0, 1) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("student t CDF matches quadrature across df and x grid") {
  double worst = 0;
  for (double df : {1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1e3, 1e4, 1e5, 1e6})
    for (double x : {-100.0, -31.6, -10.0, -5.0, -2.0, -1.0, -0.3, 0.01, 0.5, 1.0, 1.96, 3.0, 7.5, 20.0, 100.0})
      worst = std::max(worst, std::fabs(student_t_cdf(x, df) - oracle::t_cdf(x, df)));
  CHECK(worst <= 1e-10);
}

TEST_CASE("student t CDF symmetry and normal limit") {
  for (double df : {1.0, 4.0, 17.5, 1e3, 1e6})
    for (double x = -100; x <= 100; x += 0.77)
      CHECK(std::fabs(student_t_cdf(x, df) + student_t_cdf(-x, df) - 1) <= 1e-10);
  for (double df : {1e5, 1e6})
    for (double x = -3; x <= 3; x += 0.25)
      CHECK(std::fabs(student_t_cdf(x, df) - 0.5 * std::erfc(-x / std::sqrt(2.0))) <= 1e-4);
}

TEST_CASE("two-sided p keeps tail precision") {
  const double p = student_t_two_sided_p(40, 200);
  CHECK(p > 0);
  CHECK(p == doctest::Approx(oracle::t_two_sided_p(40, 200)).epsilon(1e-8));
  CHECK(student_t_two_sided_p(0, 5) == 1.0);
}

TEST_CASE("Welch worked example") {
  const std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10};
  const auto r = welch_t(a, b);
  // hand evaluation: s2a = 2.5, s2b = 10, se2 = 0.5 + 2 = 2.5
  const double t = (3.0 - 6.0) / std::sqrt(2.5);
  const double df = 2.5 * 2.5 / (0.5 * 0.5 / 4 + 2.0 * 2.0 / 4);
  CHECK(r.t == doctest::Approx(-1.8974).epsilon(1e-4));
  CHECK(r.df == doctest::Approx(5.8824).epsilon(1e-4));
  CHECK(std::fabs(r.t - t) <= 1e-12);
  CHECK(std::fabs(r.df - df) <= 1e-12);
  CHECK(std::fabs(r.p_two_sided - oracle::t_two_sided_p(t, df)) <= 1e-10);
  CHECK(r.mean_a == 3.0);
  CHECK(r.n_b == 5);
}

TEST_CASE("Welch identities and edge cases") {
  const std::vector<double> a{1.5, 2.0, 7.25, 3.0};
  const auto same = welch_t(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p_two_sided == 1.0);

  const std::vector<double> zeros{0, 0};
  const auto z = welch_t(zeros, zeros);
  CHECK(z.degenerate);
  CHECK(z.t == 0.0);
  CHECK(z.p_two_sided == 1.0);
  CHECK(z.df == 2.0);

  const std::vector<double> ones{1, 1, 1};
  const auto d = welch_t(zeros, ones);
  CHECK(d.degenerate);
  CHECK(d.p_two_sided == 0.0);
  CHECK(std::isinf(d.t));
  CHECK(d.t < 0);

  CHECK_THROWS_AS(welch_t(std::vector<double>{1}, a), Error);
  CHECK_THROWS_AS(welch_t(a, std::vector<double>{}), Error);
}

TEST_CASE("Welch properties over random samples") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t na = 2 + rng() % 60, nb = 2 + rng() % 60;
    const double shift = g(rng);
    std::vector<double> a(na), b(nb);
    for (auto& x : a) x = g(rng) * 2 + shift;
    for (auto& x : b) x = g(rng);
    const auto r = welch_t(a, b);
    const auto s = welch_t(b, a);
    CHECK(r.t == doctest::Approx(-s.t).epsilon(1e-12));
    CHECK(r.p_two_sided == doctest::Approx(s.p_two_sided).epsilon(1e-12));
    CHECK(r.p_two_sided >= 0.0);
    CHECK(r.p_two_sided <= 1.0);
    CHECK(r.df <= static_cast<double>(na + nb - 2) + 1e-9);
    CHECK((r.t > 0) == (r.mean_a > r.mean_b));

    auto shifted_a = a, shifted_b = b, scaled_a = a, scaled_b = b;
    for (auto& x : shifted_a) x += 3.0;
    for (auto& x : shifted_b) x += 3.0;
    for (auto& x : scaled_a) x *= 4.0;
    for (auto& x : scaled_b) x *= 4.0;
    const auto sh = welch_t(shifted_a, shifted_b);
    const auto sc = welch_t(scaled_a, scaled_b);
    CHECK(sh.t == doctest::Approx(r.t).epsilon(1e-9));
    CHECK(sh.df == doctest::Approx(r.df).epsilon(1e-9));
    CHECK(sc.t == doctest::Approx(r.t).epsilon(1e-12));
    CHECK(sc.p_two_sided == doctest::Approx(r.p_two_sided).epsilon(1e-9));

    const auto o = oracle::welch(a, b);
    CHECK(std::fabs(r.t - o.t) <= 1e-10);
    CHECK(std::fabs(r.df - o.df) <= 1e-10);
    CHECK(std::fabs(r.p_two_sided - o.p) <= 1e-8);
  }
}

TEST_CASE("G2 worked examples") {
  CHECK(log_likelihood_g2(10, 100, 10, 1000) == doctest::Approx(22.14).epsilon(0.01 / 22.14));
  CHECK(std::fabs(log_likelihood_g2(10, 100, 10, 1000) - oracle::g2(10, 100, 10, 1000)) <= 1e-12);
  CHECK(log_likelihood_g2(5, 100, 50, 1000) == 0.0);
  CHECK(log_likelihood_g2(0, 100, 7, 1000) > 0.0);
  CHECK(log_likelihood_g2(0, 100, 7, 1000) == doctest::Approx(oracle::g2(0, 100, 7, 1000)));
  CHECK(log_likelihood_g2(0, 100, 0, 100) == 0.0);
}

TEST_CASE("G2 swap symmetry and sign") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t n1 = 1 + rng() % 100000, n2 = 1 + rng() % 100000;
    const std::size_t o1 = rng() % (n1 + 1), o2 = rng() % (n2 + 1);
    const double g = log_likelihood_g2(o1, n1, o2, n2);
    CHECK(g >= 0.0);
    CHECK(std::fabs(g - log_likelihood_g2(o2, n2, o1, n1)) <= 1e-10);
  }
}

TEST_CASE("keyness ranking") {
  WordCounts t{{"sad", 30}, {"dog", 10}, {"cat", 10}, {"rare", 1}, {"only_ref", 0}},
      r{{"sad", 5}, {"dog", 20}, {"cat", 20}, {"game", 40}, {"rare", 1}};
  const auto res = keyness(t, r, {2, 5});
  REQUIRE(res.overused_in_target.size() == 1);
  CHECK(res.overused_in_target[0].word == "sad");
  CHECK(res.overused_in_target[0].overused_in == Label::Target);
  REQUIRE(res.overused_in_reference.size() == 2);
  CHECK(res.overused_in_reference[0].word == "game");
  // cat and dog tie exactly; the word breaks the tie
  const auto all = keyness(t, r, {10, 5});
  REQUIRE(all.overused_in_reference.size() == 3);
  CHECK(all.overused_in_reference[1].word == "cat");
  CHECK(all.overused_in_reference[2].word == "dog");
  for (const auto& e : all.overused_in_reference) {
    CHECK(e.g2 >= 0);
    CHECK(e.total_target == 51);
    CHECK(e.total_reference == 86);
    CHECK(e.count_target * e.total_reference <= e.count_reference * e.total_target);
  }
  // min_total filter
  for (const auto* list : {&all.overused_in_target, &all.overused_in_reference})
    for (const auto& e : *list) CHECK(e.word != "rare");
  CHECK_THROWS_AS(keyness({}, r), Error);
  CHECK_THROWS_AS(keyness(t, {{"x", 0}}), Error);
}

TEST_CASE("word counts by UPOS") {
  const TaggedDocument doc{"u", Label::Target,
                           {testutil::sentence({"Dogs/NNS", "chase/VBP", "dogs/NNS"})}};
  const std::vector<TaggedDocument> docs{doc};
  CHECK(word_counts(docs, {Upos::NOUN}) == WordCounts{{"dogs", 2}});
  CHECK(word_counts(docs, {Upos::VERB}) == WordCounts{{"chase", 1}});
  CHECK(word_counts(std::vector<TaggedDocument>{}, {Upos::NOUN}).empty());
  auto with_lemma = doc;
  for (auto& t : with_lemma.sentences[0]) t.lemma = t.form == "chase" ? "chase" : "dog";
  const std::vector<TaggedDocument> ld{with_lemma};
  CHECK(word_counts(ld, {Upos::NOUN}, true) == WordCounts{{"dog", 2}});
  CHECK(word_counts(ld, {Upos::NOUN}, false) == WordCounts{{"dogs", 2}});
}

} // TEST_SUITE
