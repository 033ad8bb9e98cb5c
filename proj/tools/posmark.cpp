// posmark: command-line front end.

#include <iostream>

#include <CLI11.hpp>

#include "posmark/commands.hpp"
#include "posmark/error.hpp"

using namespace posmark;

int main(int argc, char** argv) {
  CLI::App app{"POS-based linguistic markers: tagging, group statistics, classification, attribution"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig config;
  std::string format = "jsonl";
  std::vector<std::string> inputs, targets, controls;
  std::string weighting = "balanced";

  app.add_option("--seed", config.seed, "Random seed")->capture_default_str();
  app.add_option("--out-dir", config.out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", format, "Input format")
      ->check(CLI::IsMember({"jsonl", "erisk-xml", "conllu"}))
      ->capture_default_str();

  auto add_inputs = [&](CLI::App* cmd) {
    cmd->add_option("--input,-i", inputs, "Input file (labels taken from the data)");
    cmd->add_option("--target", targets, "Input belonging to the target group");
    cmd->add_option("--control", controls, "Input belonging to the control group");
  };
  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", config.tagger_model, "Tagger model for raw-text input");
    cmd->add_flag("--strict-md", config.strict_md_adjacency, "Future tense only for MD directly before VB");
  };

  auto* tag = app.add_subcommand("tag", "Tag a corpus and write tagged.conllu");
  add_inputs(tag);
  add_model(tag);

  auto* analyze = app.add_subcommand("analyze", "Group tables, keyness and Welch tests");
  add_inputs(analyze);
  add_model(analyze);
  analyze->add_flag("--per-user", config.per_user, "Aggregate per user instead of per post");
  analyze->add_option("--keyness-min-count", config.keyness_min_count, "Minimum total count for keyness")
      ->capture_default_str();
  analyze->add_option("--keyness-top-k", config.keyness_top_k, "Words listed per direction")
      ->capture_default_str();
  analyze->add_flag("--lemmas", config.lemma_mode, "Count lemmas for keyness when available");
  analyze->add_flag("--all-tags-denominator", config.all_tags_denominator,
                    "Normalize POS frequencies by every token");

  auto* train_eval = app.add_subcommand("train-eval", "Train a random forest and evaluate it");
  train_eval->add_option("--features", config.features, "Feature CSV to split by user");
  train_eval->add_option("--train", config.train_features, "Training feature CSV");
  train_eval->add_option("--test", config.test_features, "Test feature CSV");
  train_eval->add_option("--test-fraction", config.test_fraction, "Share of users held out")
      ->capture_default_str();
  train_eval->add_flag("--drop-undefined", config.drop_undefined, "Drop rows with undefined features");
  train_eval->add_option("--threshold", config.threshold, "Target decision threshold")->capture_default_str();
  train_eval->add_option("--n-trees", config.forest.n_trees, "Number of trees")->capture_default_str();
  train_eval->add_option("--max-depth", config.forest.max_depth, "Maximum tree depth")->capture_default_str();
  train_eval->add_option("--min-samples-leaf", config.forest.min_samples_leaf, "Minimum rows per leaf")
      ->capture_default_str();
  train_eval->add_option("--class-weights", weighting, "Class weighting")
      ->check(CLI::IsMember({"balanced", "uniform"}))
      ->capture_default_str();

  auto* explain = app.add_subcommand("explain", "SHAP attributions for a sample of posts");
  explain->add_option("--forest", config.forest_model, "Forest model file")->required();
  explain->add_option("--features", config.features, "Feature CSV")->required();
  explain->add_option("--sample-size", config.sample_size, "Rows to explain")->capture_default_str();
  explain->add_option("--top-k", config.top_k, "Features in the summary (0 = all)")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic two-group corpus");
  synth->add_option("--posts-per-group", config.synth.posts_per_group)->capture_default_str();
  synth->add_option("--users-per-group", config.synth.users_per_group)->capture_default_str();
  synth->add_option("--sentences-per-post", config.synth.sentences_per_post)->capture_default_str();
  synth->add_option("--target-first-singular", config.synth.target.first_singular)->capture_default_str();
  synth->add_option("--target-proper-noun", config.synth.target.proper_noun)->capture_default_str();
  synth->add_option("--control-first-singular", config.synth.control.first_singular)->capture_default_str();
  synth->add_option("--control-proper-noun", config.synth.control.proper_noun)->capture_default_str();
  bool zero = false;
  synth->add_flag("--zero-separation", zero, "Give both groups the control profile");
  synth->add_option("--treebank", config.treebank_sentences, "Also write N gold-tagged sentences");

  auto* train_tagger = app.add_subcommand("train-tagger", "Train the POS tagger on CoNLL-U");
  train_tagger->add_option("--input,-i", inputs, "CoNLL-U file with XPOS tags")->required();
  train_tagger->add_option("--epochs", config.epochs, "Training epochs")->capture_default_str();
  train_tagger->add_option("--holdout", config.holdout, "Share of sentences held out")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    config.format = parse_format(format);
    for (const auto& p : inputs) config.inputs.push_back({p, std::nullopt});
    for (const auto& p : targets) config.inputs.push_back({p, Label::Target});
    for (const auto& p : controls) config.inputs.push_back({p, Label::Control});
    config.forest.class_weighting = weighting == "uniform" ? ClassWeighting::Uniform : ClassWeighting::Balanced;
    if (zero) config.synth = zero_separation(config.synth);

    Outputs written;
    if (tag->parsed()) written = cmd_tag(config);
    else if (analyze->parsed()) written = cmd_analyze(config);
    else if (train_eval->parsed()) written = cmd_train_eval(config);
    else if (explain->parsed()) written = cmd_explain(config);
    else if (synth->parsed()) written = cmd_synth(config);
    else written = cmd_train_tagger(config);
    for (const auto& p : written) std::cout << p.string() << "\n";
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "error: " << msg << "\n";
    return 1;
  }
  return 0;
}
