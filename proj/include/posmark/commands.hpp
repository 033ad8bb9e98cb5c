#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "posmark/corpus.hpp"
#include "posmark/features.hpp"
#include "posmark/forest.hpp"
#include "posmark/synth.hpp"

namespace posmark {

enum class InputFormat { Jsonl, EriskXml, Conllu };

std::string_view format_name(InputFormat format);
InputFormat parse_format(std::string_view name);

/// An input file or directory, optionally bound to a group. jsonl records
/// carry their own label; eRisk directories need one; CoNLL-U documents use
/// their `# label` comment and fall back to the bound group (else Control).
struct InputSpec {
  std::filesystem::path path;
  std::optional<Label> label;
};

struct RunConfig {
  // common
  std::vector<InputSpec> inputs;
  InputFormat format = InputFormat::Jsonl;
  std::optional<std::filesystem::path> tagger_model;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  bool strict_md_adjacency = false;

  // analyze
  bool per_user = false;
  std::size_t keyness_min_count = 5;
  std::size_t keyness_top_k = 20;
  bool lemma_mode = false;
  bool all_tags_denominator = false;

  // train-eval
  std::optional<std::filesystem::path> features;
  std::optional<std::filesystem::path> train_features;
  std::optional<std::filesystem::path> test_features;
  double test_fraction = 0.25;
  bool drop_undefined = false;
  double threshold = 0.5;
  ForestParams forest;

  // explain
  std::optional<std::filesystem::path> forest_model;
  std::size_t sample_size = 1500;
  std::size_t top_k = 20;

  // synth
  SynthConfig synth = default_synth_config();
  std::size_t treebank_sentences = 0;

  // train-tagger
  int epochs = 5;
  double holdout = 0.1;
};

/// Files written by a command, in write order (manifest last).
using Outputs = std::vector<std::filesystem::path>;

/// Tags raw input (needs a model) or re-derives morphology of CoNLL-U input;
/// writes tagged.conllu.
Outputs cmd_tag(const RunConfig& config);

/// Group tables, keyness, Welch tests, and the per-post feature matrix.
Outputs cmd_analyze(const RunConfig& config);

/// Trains a forest on a feature matrix and evaluates it on held-out rows.
Outputs cmd_train_eval(const RunConfig& config);

/// SHAP attributions for a sample of a feature matrix under a saved forest.
Outputs cmd_explain(const RunConfig& config);

/// Writes a seeded synthetic corpus and its manifest (plus an optional
/// gold treebank).
Outputs cmd_synth(const RunConfig& config);

/// Trains the POS tagger on CoNLL-U (form + XPOS) and scores a holdout.
Outputs cmd_train_tagger(const RunConfig& config);

/// Splits rows into train and test by user, stratified by label, so no
/// user appears on both sides.
std::pair<std::vector<FeatureRow>, std::vector<FeatureRow>>
split_by_user(std::span<const FeatureRow> rows, double test_fraction, std::uint64_t seed);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

} // namespace posmark
