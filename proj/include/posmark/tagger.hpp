#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace posmark {

// ---------------------------------------------------------------------------
// Tag inventories

enum class Upos {
  ADJ, ADV, NOUN, PROPN, VERB, ADP, CCONJ, DET, PART, SCONJ, AUX, PRON,
  NUM, INTJ, PUNCT, SYM, X
};
inline constexpr std::size_t kUposCount = 17;

std::string_view upos_name(Upos upos);
/// Throws posmark::Error naming the value when it is not a UPOS symbol.
Upos parse_upos(std::string_view name);

enum class Tense { Past, Present, Future };
enum class Person { First, Second, Third };
enum class Number { Singular, Plural };

std::string_view tense_name(Tense tense);

/// Every Penn Treebank tag this toolkit knows, in a fixed order.
std::span<const std::string_view> ptb_tagset();
bool is_ptb_tag(std::string_view ptb);

/// Universal Dependencies conversion of a PTB tag. IN always becomes ADP.
/// Throws posmark::Error for unknown tags.
Upos ptb_to_upos(std::string_view ptb);

// ---------------------------------------------------------------------------
// Morphology

struct PronounMorph {
  Person person;
  std::optional<Number> number;

  bool operator==(const PronounMorph&) const = default;
};

/// Person/number of a personal pronoun (PRP or PRP$ only); nullopt otherwise.
std::optional<PronounMorph> pronoun_morph(std::string_view form, std::string_view ptb);

struct MorphologyOptions {
  /// Future tense requires MD immediately before VB (no adverbs between).
  bool strict_md_adjacency = false;
};

/// Tense per tag. VBD/VBN are past, VBG/VBZ/VBP present, VB after MD future
/// (adverbs skipped unless strict), any other VB present. Sentence-final
/// punctuation (tag ".") resets the modal context.
std::vector<std::optional<Tense>> assign_tense(std::span<const std::string> ptb_sequence,
                                               const MorphologyOptions& options = {});

struct TaggedToken {
  std::string form;
  std::string ptb;
  Upos upos = Upos::X;
  std::optional<Tense> tense;
  std::optional<Person> pron_person;
  std::optional<Number> pron_number;
  std::string lemma; // empty unless supplied by pre-tagged input

  bool operator==(const TaggedToken&) const = default;
};

/// Builds tagged tokens for one sentence from forms and PTB tags. When
/// `upos` is given it is used verbatim, otherwise it is derived from PTB.
/// Tense is kept only on VERB/AUX, pronoun morphology only on PRON.
std::vector<TaggedToken> annotate(std::span<const std::string> forms,
                                  std::span<const std::string> ptb,
                                  std::span<const Upos> upos = {},
                                  const MorphologyOptions& options = {});

// ---------------------------------------------------------------------------
// Tokenizer

/// PTB-style tokenization: whitespace split, punctuation and quotes peeled,
/// contractions split ("don't" -> "do" "n't"), URLs kept whole.
std::vector<std::string> tokenize(std::string_view text);

/// Splits a token stream after sentence-final punctuation (. ! ? ...).
std::vector<std::vector<std::string>> split_sentences(std::span<const std::string> tokens);

// ---------------------------------------------------------------------------
// Averaged perceptron

struct TrainingToken {
  std::string form;
  std::string ptb;
};
using TrainingSentence = std::vector<TrainingToken>;

class TaggerModel {
public:
  TaggerModel() = default;

  /// PTB tag per token, greedy left to right.
  std::vector<std::string> predict(std::span<const std::string> sentence) const;

  /// Tags in tie-break order (most frequent training tag first).
  const std::vector<std::string>& tags() const { return tags_; }
  std::size_t feature_count() const { return index_.size(); }
  int epochs() const { return epochs_; }
  std::uint64_t seed() const { return seed_; }

  void save(const std::filesystem::path& path) const;
  std::string serialize() const;
  static TaggerModel load(const std::filesystem::path& path);
  static TaggerModel deserialize(std::string_view text);

  bool operator==(const TaggerModel& other) const;

private:
  friend class PerceptronTrainer;

  std::size_t best_tag(std::span<const std::string> features) const;

  std::vector<std::string> tags_;
  std::unordered_map<std::string, std::size_t> index_; // feature -> row
  std::vector<double> weights_;                        // row-major, |tags| per row
  int epochs_ = 0;
  std::uint64_t seed_ = 0;
};

/// Trains on gold PTB sentences. Throws if `sentences` is empty or contains
/// a tag outside the PTB tagset. epochs = 0 yields a model that predicts the
/// most frequent training tag everywhere.
TaggerModel train_tagger(std::span<const TrainingSentence> sentences, int epochs,
                         std::uint64_t seed);

/// Tokens in, tagged tokens out (one per input token).
std::vector<TaggedToken> tag(const TaggerModel& model, std::span<const std::string> tokens,
                             const MorphologyOptions& options = {});

/// Same as `tag`, keeping the sentence segmentation.
std::vector<std::vector<TaggedToken>> tag_sentences(const TaggerModel& model,
                                                    std::span<const std::string> tokens,
                                                    const MorphologyOptions& options = {});

/// Token accuracy of `model` against gold sentences.
double tagging_accuracy(const TaggerModel& model, std::span<const TrainingSentence> gold);

} // namespace posmark
