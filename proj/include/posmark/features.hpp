#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "posmark/corpus.hpp"
#include "posmark/tagger.hpp"

namespace posmark {

/// The 22 per-post features, in export order.
enum class Feature {
  ADJ, ADV, NOUN, PROPN, VERB, ADP, CCONJ, DET, PART, SCONJ, AUX, PRON,
  Past, Present, Future,
  FirstPerson, SecondPerson, ThirdPerson,
  FirstSingular, FirstPlural,
  PronominalisationIndex, Formality
};
inline constexpr std::size_t kFeatureCount = 22;

/// The twelve UPOS tags tracked as frequency features, in Feature order.
inline constexpr std::array<Upos, 12> kTrackedUpos = {
    Upos::ADJ, Upos::ADV, Upos::NOUN, Upos::PROPN, Upos::VERB, Upos::ADP,
    Upos::CCONJ, Upos::DET, Upos::PART, Upos::SCONJ, Upos::AUX, Upos::PRON};

std::string_view feature_name(Feature f);
std::span<const std::string_view> feature_names();
/// Throws posmark::Error for unknown names.
Feature parse_feature(std::string_view name);

/// Per-post feature values. A ratio whose denominator is zero is undefined
/// (nullopt), never zero.
struct FeatureVector {
  std::array<std::optional<double>, kFeatureCount> values{};

  std::optional<double>& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  const std::optional<double>& operator[](Feature f) const {
    return values[static_cast<std::size_t>(f)];
  }
  bool operator==(const FeatureVector&) const = default;
};

struct FeatureOptions {
  /// Normalize UPOS counts by every token instead of excluding
  /// PUNCT, SYM, X and NUM.
  bool all_tags_denominator = false;
};

/// nullopt for an empty post (the post is skipped downstream).
std::optional<FeatureVector> extract_post_features(std::span<const TaggedToken> tokens,
                                                   const FeatureOptions& options = {});

/// Pronouns per noun (common + proper); undefined without nouns.
std::optional<double> pronominalisation_index(std::span<const TaggedToken> tokens);

/// (NOUN + ADJ + PREP + ART - PRON - VERB - ADV - INTJ + 100) / 2 with every
/// term a percentage of all tokens. Throws on empty input.
double formality_score(std::span<const TaggedToken> tokens);

struct FeatureStats {
  std::optional<double> mean;
  std::optional<double> stddev; // sample (n-1); needs two observations
  std::size_t count = 0;
};

struct GroupSummary {
  Label label = Label::Control;
  std::array<FeatureStats, kFeatureCount> features{};

  const FeatureStats& operator[](Feature f) const { return features[static_cast<std::size_t>(f)]; }
};

GroupSummary aggregate(std::span<const FeatureVector> vectors, Label label);

/// One row of the feature matrix export.
struct FeatureRow {
  std::string user_id;
  std::size_t post_index = 0;
  Label label = Label::Control;
  FeatureVector features;

  bool operator==(const FeatureRow&) const = default;
};

/// Collapses rows to one row per user (feature-wise mean over that user's
/// defined values). Output is ordered by first appearance of each user.
std::vector<FeatureRow> per_user_means(std::span<const FeatureRow> rows);

std::string features_to_csv(std::span<const FeatureRow> rows);
std::vector<FeatureRow> features_from_csv(std::string_view content);
void write_features_csv(std::span<const FeatureRow> rows, const std::filesystem::path& path);
std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path);

} // namespace posmark
