#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "posmark/corpus.hpp"
#include "posmark/tagger.hpp"

namespace posmark {

// ---------------------------------------------------------------------------
// Special functions

/// ln Γ(x) for x > 0.
double log_gamma(double x);
/// ln B(a, b) for a, b > 0, stable when one argument is very large.
double log_beta(double a, double b);
/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student t CDF. Throws posmark::Error when df <= 0.
double student_t_cdf(double x, double df);
/// 2 * (1 - CDF(|t|)), evaluated without cancellation in the tail.
double student_t_two_sided_p(double t, double df);

// ---------------------------------------------------------------------------
// Welch's unequal-variance t-test

struct TTestResult {
  double t = 0;
  double df = 0;
  double p_two_sided = 1;
  double mean_a = 0;
  double mean_b = 0;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  /// Both samples have zero variance. t is 0 (p = 1) for equal means and
  /// ±inf (p = 0) otherwise; df is then n_a + n_b - 2.
  bool degenerate = false;
};

/// Throws posmark::Error when either sample has fewer than two values.
TTestResult welch_t(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Keyness

using WordCounts = std::map<std::string, std::size_t>;

struct KeynessEntry {
  std::string word;
  std::size_t count_target = 0;
  std::size_t count_reference = 0;
  std::size_t total_target = 0;
  std::size_t total_reference = 0;
  double g2 = 0;
  Label overused_in = Label::Control;
};

/// Dunning log-likelihood for a word seen o1 times in n1 target tokens and
/// o2 times in n2 reference tokens. 0 * ln 0 is taken as 0.
double log_likelihood_g2(std::size_t o1, std::size_t n1, std::size_t o2, std::size_t n2);

struct KeynessOptions {
  std::size_t top_k = 20;
  /// Words with o1 + o2 below this are not ranked.
  std::size_t min_total = 5;
};

struct KeynessResult {
  std::vector<KeynessEntry> overused_in_target;    // descending G²
  std::vector<KeynessEntry> overused_in_reference; // descending G²
};

/// Ranks words by G² in both directions; ties break by word. Throws when
/// either side has no tokens.
KeynessResult keyness(const WordCounts& target_counts, const WordCounts& reference_counts,
                      const KeynessOptions& options = {});

/// Lowercased forms (or lemmas, when requested and present) of tokens whose
/// UPOS is in `filter`.
WordCounts word_counts(std::span<const TaggedDocument> documents, const std::set<Upos>& filter,
                       bool use_lemmas = false);

} // namespace posmark
