#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "posmark/corpus.hpp"
#include "posmark/tagger.hpp"

namespace posmark {

/// Generation rates for one group. Nominal-slot rates are probabilities per
/// noun-phrase slot (subject, object, prepositional object); they must sum
/// to at most 1, the remainder being common-noun phrases.
struct GroupProfile {
  double first_singular = 0.08;
  double first_plural = 0.04;
  double other_pronoun = 0.20;
  double proper_noun = 0.06;
  std::array<double, 3> tense_mix = {0.35, 0.45, 0.20}; // past, present, future
  double adjective = 0.35;    // per common noun phrase
  double adverb = 0.20;       // per verb phrase
  double prep_phrase = 0.40;  // per clause
  double interjection = 0.04; // per sentence
  double article = 0.70;      // share of determiners that are a/an/the
};

struct SynthConfig {
  std::size_t posts_per_group = 2000;
  std::size_t users_per_group = 200;
  std::size_t sentences_per_post = 40;
  std::uint64_t seed = 0;
  GroupProfile target;
  GroupProfile control;
};

/// Target: first-singular 0.15, proper nouns 0.02; Control: 0.08 and 0.06.
SynthConfig default_synth_config();
/// Copies the control profile onto the target so every planted delta is 0.
SynthConfig zero_separation(SynthConfig config);

struct SynthResult {
  Corpus corpus;
  /// Gold tags of every generated post, parallel to corpus.documents().
  std::vector<std::vector<TrainingSentence>> gold;
  std::string manifest_json;
};

/// Seeded two-group corpus; Target posts first, then Control. Throws on an
/// invalid profile.
SynthResult synth_corpus(const SynthConfig& config);

/// Gold-tagged sentences drawn from both default profiles.
std::vector<TrainingSentence> synth_treebank(std::size_t sentences, std::uint64_t seed);

/// Joins tokens so that `tokenize` recovers them exactly.
std::string detokenize(std::span<const std::string> tokens);

/// CoNLL-U for gold sentences (one document).
std::string treebank_to_conllu(std::span<const TrainingSentence> sentences);
/// Gold (form, XPOS) sentences from CoNLL-U text.
std::vector<TrainingSentence> treebank_from_conllu(std::string_view content);

} // namespace posmark
