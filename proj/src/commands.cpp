#include "posmark/commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>
#include <openssl/evp.h>

#include "posmark/csv.hpp"
#include "posmark/error.hpp"
#include "posmark/explain.hpp"
#include "posmark/stats.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace posmark {

std::string_view format_name(InputFormat format) {
  switch (format) {
  case InputFormat::Jsonl: return "jsonl";
  case InputFormat::EriskXml: return "erisk-xml";
  case InputFormat::Conllu: return "conllu";
  }
  return "jsonl";
}

InputFormat parse_format(std::string_view name) {
  if (name == "jsonl") return InputFormat::Jsonl;
  if (name == "erisk-xml") return InputFormat::EriskXml;
  if (name == "conllu") return InputFormat::Conllu;
  throw Error("unknown format '" + std::string(name) + "' (expected jsonl, erisk-xml or conllu)");
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 computation failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 0xf];
  }
  return out;
}

namespace {

/// Collects outputs and input digests, then writes the run manifest.
class Run {
public:
  Run(std::string command, const RunConfig& config) : command_(std::move(command)), dir_(config.out_dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_))
      throw Error("cannot create output directory '" + dir_.string() + "'");
  }

  void write(const std::string& name, std::string_view content) {
    const fs::path path = dir_ / name;
    csv::write_file(path, content);
    outputs_.push_back({{"file", name}, {"sha256", sha256_hex(content)}});
    written_.push_back(path);
  }

  void input(const fs::path& path) {
    if (fs::is_directory(path)) {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(path))
        if (entry.is_regular_file()) files.push_back(entry.path());
      std::sort(files.begin(), files.end());
      std::string digest_input;
      for (const auto& f : files)
        digest_input += f.filename().string() + '\0' + sha256_hex(csv::read_file(f)) + '\n';
      inputs_.push_back({{"path", path.string()}, {"sha256", sha256_hex(digest_input)}});
    } else {
      inputs_.push_back({{"path", path.string()}, {"sha256", sha256_hex(csv::read_file(path))}});
    }
  }

  Outputs finish(json config) {
    json manifest;
    manifest["command"] = command_;
    manifest["config"] = std::move(config);
    manifest["inputs"] = inputs_;
    manifest["outputs"] = outputs_;
    const std::string name = command_ + ".manifest.json";
    const std::string text = manifest.dump(2) + "\n";
    csv::write_file(dir_ / name, text);
    written_.push_back(dir_ / name);
    return written_;
  }

private:
  std::string command_;
  fs::path dir_;
  json inputs_ = json::array();
  json outputs_ = json::array();
  Outputs written_;
};

void require_exists(const fs::path& path) {
  if (!fs::exists(path)) throw Error("input not found: '" + path.string() + "'");
}

json inputs_json(const RunConfig& c) {
  json arr = json::array();
  for (const auto& in : c.inputs)
    arr.push_back({{"path", in.path.string()},
                   {"label", in.label ? json(std::string(label_name(*in.label))) : json(nullptr)}});
  return arr;
}

json common_json(const RunConfig& c) {
  return {{"inputs", inputs_json(c)},
          {"format", std::string(format_name(c.format))},
          {"tagger_model", c.tagger_model ? json(c.tagger_model->string()) : json(nullptr)},
          {"seed", c.seed},
          {"strict_md_adjacency", c.strict_md_adjacency}};
}

json path_or_null(const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); }

Corpus load_raw(const RunConfig& c, Run& run) {
  Corpus corpus;
  for (const auto& in : c.inputs) {
    require_exists(in.path);
    run.input(in.path);
    if (c.format == InputFormat::Jsonl) {
      Corpus part = load_jsonl(in.path);
      if (in.label)
        for (const auto& doc : part.documents())
          if (doc.label != *in.label)
            throw Error("record of user '" + doc.user_id + "' in '" + in.path.string() + "' is labeled " +
                        std::string(label_name(doc.label)) + " but the input was given as " +
                        std::string(label_name(*in.label)));
      corpus.append(part);
    } else {
      if (!in.label)
        throw Error("eRisk input '" + in.path.string() + "' needs a group: pass it with --target or --control");
      corpus.append(load_erisk_xml(in.path, *in.label));
    }
  }
  return corpus;
}

std::vector<TaggedDocument> load_tagged(const RunConfig& c, Run& run) {
  if (c.inputs.empty()) throw Error("no input given; pass --input, --target or --control");
  const MorphologyOptions morph{c.strict_md_adjacency};
  std::vector<TaggedDocument> docs;

  if (c.format == InputFormat::Conllu) {
    for (const auto& in : c.inputs) {
      require_exists(in.path);
      run.input(in.path);
      auto part = load_conllu(in.path, in.label.value_or(Label::Control), in.path.stem().string(), morph);
      std::move(part.begin(), part.end(), std::back_inserter(docs));
    }
    std::map<std::string, Label> users;
    for (const auto& d : docs) {
      auto [it, fresh] = users.emplace(d.user_id, d.label);
      if (!fresh && it->second != d.label)
        throw Error("user '" + d.user_id + "' appears in both groups");
    }
    return docs;
  }

  if (!c.tagger_model)
    throw Error("raw text input needs a tagger model: pass --model PATH (train one with 'posmark "
                "train-tagger') or supply pre-tagged --format conllu input");
  require_exists(*c.tagger_model);
  run.input(*c.tagger_model);
  const TaggerModel model = TaggerModel::load(*c.tagger_model);
  const Corpus corpus = load_raw(c, run);
  docs.reserve(corpus.size());
  for (const auto& doc : corpus.documents())
    docs.push_back({doc.user_id, doc.label, tag_sentences(model, tokenize(doc.text()), morph)});
  return docs;
}

// ---------------------------------------------------------------------------
// analyze helpers

std::string group_table(std::span<const Feature> features, const GroupSummary& target,
                        const GroupSummary& control) {
  std::string out = "feature,mean_target,std_target,n_target,mean_control,std_control,n_control\n";
  for (Feature f : features) {
    const auto& t = target[f];
    const auto& c = control[f];
    out += csv::join({std::string(feature_name(f)), csv::number_or_na(t.mean), csv::number_or_na(t.stddev),
                      std::to_string(t.count), csv::number_or_na(c.mean), csv::number_or_na(c.stddev),
                      std::to_string(c.count)});
    out += '\n';
  }
  return out;
}

std::string welch_table(std::span<const FeatureVector> target, std::span<const FeatureVector> control) {
  std::string out = "feature,mean_target,mean_control,t,df,p,n_target,n_control\n";
  auto mean = [](const std::vector<double>& v) -> std::optional<double> {
    if (v.empty()) return std::nullopt;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    const auto f = static_cast<Feature>(k);
    std::vector<double> a, b;
    for (const auto& v : target)
      if (v[f]) a.push_back(*v[f]);
    for (const auto& v : control)
      if (v[f]) b.push_back(*v[f]);
    std::vector<std::string> row{std::string(feature_name(f))};
    if (a.size() < 2 || b.size() < 2) {
      row.insert(row.end(), {csv::number_or_na(mean(a)), csv::number_or_na(mean(b)), "NA", "NA", "NA"});
    } else {
      const auto r = welch_t(a, b);
      row.insert(row.end(), {csv::number(r.mean_a), csv::number(r.mean_b), csv::number(r.t),
                             csv::number(r.df), csv::number(r.p_two_sided)});
    }
    row.push_back(std::to_string(a.size()));
    row.push_back(std::to_string(b.size()));
    out += csv::join(row) + '\n';
  }
  return out;
}

void keyness_rows(std::string& out, const std::vector<TaggedDocument>& target,
                  const std::vector<TaggedDocument>& control, Upos upos, const std::string& category,
                  const RunConfig& c) {
  const auto t = word_counts(target, {upos}, c.lemma_mode);
  const auto r = word_counts(control, {upos}, c.lemma_mode);
  if (t.empty() || r.empty()) return;
  const auto result = keyness(t, r, {c.keyness_top_k, c.keyness_min_count});
  for (const auto* list : {&result.overused_in_target, &result.overused_in_reference}) {
    std::size_t rank = 0;
    for (const auto& e : *list)
      out += csv::join({e.word, std::to_string(e.count_target), std::to_string(e.count_reference),
                        csv::number(e.g2), std::string(label_name(e.overused_in)), std::to_string(++rank),
                        category}) +
             '\n';
  }
}

// ---------------------------------------------------------------------------
// feature matrices

FeatureMatrix to_matrix(std::span<const FeatureRow> rows) {
  FeatureMatrix X(rows.size(), kFeatureCount);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < kFeatureCount; ++k)
      X.at(i, k) = rows[i].features.values[k].value_or(std::numeric_limits<double>::quiet_NaN());
  return X;
}

std::vector<Label> labels_of(std::span<const FeatureRow> rows) {
  std::vector<Label> y;
  y.reserve(rows.size());
  for (const auto& r : rows) y.push_back(r.label);
  return y;
}

std::vector<FeatureRow> drop_undefined_rows(std::vector<FeatureRow> rows) {
  std::erase_if(rows, [](const FeatureRow& r) {
    return std::any_of(r.features.values.begin(), r.features.values.end(),
                       [](const auto& v) { return !v.has_value(); });
  });
  return rows;
}

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

} // namespace

// ---------------------------------------------------------------------------

std::pair<std::vector<FeatureRow>, std::vector<FeatureRow>>
split_by_user(std::span<const FeatureRow> rows, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw Error("test fraction must lie in (0, 1)");
  std::array<std::vector<std::string>, 2> users;
  std::map<std::string, Label> seen;
  for (const auto& r : rows) {
    auto [it, fresh] = seen.emplace(r.user_id, r.label);
    if (fresh)
      users[static_cast<std::size_t>(r.label)].push_back(r.user_id);
    else if (it->second != r.label)
      throw Error("user '" + r.user_id + "' appears in both groups");
  }
  std::mt19937_64 rng(seed);
  std::set<std::string> test_users;
  for (auto& group : users) {
    std::vector<std::size_t> order(group.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle(order, rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(group.size())));
    if (group.size() >= 2) n_test = std::clamp<std::size_t>(n_test, 1, group.size() - 1);
    for (std::size_t i = 0; i < n_test && i < order.size(); ++i) test_users.insert(group[order[i]]);
  }
  std::pair<std::vector<FeatureRow>, std::vector<FeatureRow>> out;
  for (const auto& r : rows) (test_users.count(r.user_id) ? out.second : out.first).push_back(r);
  return out;
}

Outputs cmd_tag(const RunConfig& config) {
  Run run("tag", config);
  const auto docs = load_tagged(config, run);
  run.write("tagged.conllu", to_conllu(docs));
  return run.finish(common_json(config));
}

Outputs cmd_analyze(const RunConfig& config) {
  Run run("analyze", config);
  const auto docs = load_tagged(config, run);

  std::vector<TaggedDocument> target_docs, control_docs;
  for (const auto& d : docs) (d.label == Label::Target ? target_docs : control_docs).push_back(d);
  if (target_docs.empty() || control_docs.empty())
    throw Error("both groups required: found " + std::to_string(target_docs.size()) + " target and " +
                std::to_string(control_docs.size()) + " control documents");

  const FeatureOptions options{config.all_tags_denominator};
  std::vector<FeatureRow> rows;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto tokens = docs[i].tokens();
    if (auto fv = extract_post_features(tokens, options))
      rows.push_back({docs[i].user_id, i, docs[i].label, *fv});
  }
  const auto units = config.per_user ? per_user_means(rows) : rows;
  std::vector<FeatureVector> target, control;
  for (const auto& r : units) (r.label == Label::Target ? target : control).push_back(r.features);
  if (target.empty() || control.empty())
    throw Error("both groups required: one group has no non-empty posts");
  const auto st = aggregate(target, Label::Target);
  const auto sc = aggregate(control, Label::Control);

  using F = Feature;
  constexpr F content[] = {F::ADJ, F::ADV, F::NOUN, F::PROPN, F::VERB};
  constexpr F function[] = {F::ADP, F::CCONJ, F::DET, F::PART, F::SCONJ, F::AUX, F::PRON};
  constexpr F tenses[] = {F::Past, F::Present, F::Future};
  constexpr F pronouns[] = {F::FirstPerson, F::SecondPerson, F::ThirdPerson, F::FirstSingular, F::FirstPlural};
  constexpr F indices[] = {F::PronominalisationIndex, F::Formality};

  run.write("content_pos.csv", group_table(content, st, sc));
  std::string key = "word,count_target,count_reference,g2,overused_in,rank,category\n";
  keyness_rows(key, target_docs, control_docs, Upos::NOUN, "noun", config);
  keyness_rows(key, target_docs, control_docs, Upos::VERB, "verb", config);
  run.write("keyness.csv", key);
  run.write("verb_tenses.csv", group_table(tenses, st, sc));
  run.write("function_pos.csv", group_table(function, st, sc));
  run.write("pronouns.csv", group_table(pronouns, st, sc));
  run.write("indices.csv", group_table(indices, st, sc));
  run.write("welch.csv", welch_table(target, control));
  run.write("features.csv", features_to_csv(rows));

  auto cfg = common_json(config);
  cfg["per_user"] = config.per_user;
  cfg["keyness_min_count"] = config.keyness_min_count;
  cfg["keyness_top_k"] = config.keyness_top_k;
  cfg["lemma_mode"] = config.lemma_mode;
  cfg["all_tags_denominator"] = config.all_tags_denominator;
  return run.finish(std::move(cfg));
}

Outputs cmd_train_eval(const RunConfig& config) {
  Run run("train-eval", config);
  std::vector<FeatureRow> train, test;
  if (config.train_features && config.test_features) {
    for (const auto& p : {*config.train_features, *config.test_features}) {
      require_exists(p);
      run.input(p);
    }
    train = read_features_csv(*config.train_features);
    test = read_features_csv(*config.test_features);
  } else if (config.features && !config.train_features && !config.test_features) {
    require_exists(*config.features);
    run.input(*config.features);
    const auto rows = read_features_csv(*config.features);
    std::tie(train, test) = split_by_user(rows, config.test_fraction, config.seed);
  } else {
    throw Error("train-eval needs --features, or both --train and --test");
  }
  if (config.drop_undefined) {
    train = drop_undefined_rows(std::move(train));
    test = drop_undefined_rows(std::move(test));
  }
  if (train.empty()) throw Error("training split is empty");
  if (test.empty()) throw Error("test split is empty");

  ForestParams params = config.forest;
  params.seed = config.seed;
  std::vector<std::string> names(feature_names().begin(), feature_names().end());
  const Forest forest = train_forest(to_matrix(train), labels_of(train), params, names);
  const Metrics metrics = evaluate(forest, to_matrix(test), labels_of(test), config.threshold);

  run.write("forest.model", forest.serialize());
  run.write("metrics.json", metrics.to_json());
  run.write("test_features.csv", features_to_csv(test));

  json cfg = {{"features", path_or_null(config.features)},
              {"train", path_or_null(config.train_features)},
              {"test", path_or_null(config.test_features)},
              {"seed", config.seed},
              {"test_fraction", config.test_fraction},
              {"drop_undefined", config.drop_undefined},
              {"threshold", config.threshold},
              {"n_trees", params.n_trees},
              {"max_depth", params.max_depth},
              {"class_weighting", params.class_weighting == ClassWeighting::Balanced ? "balanced" : "uniform"},
              {"min_samples_leaf", params.min_samples_leaf},
              {"train_rows", train.size()},
              {"test_rows", test.size()}};
  return run.finish(std::move(cfg));
}

Outputs cmd_explain(const RunConfig& config) {
  Run run("explain", config);
  if (!config.forest_model) throw Error("explain needs --forest PATH (written by train-eval)");
  if (!config.features) throw Error("explain needs --features PATH");
  for (const auto& p : {*config.forest_model, *config.features}) {
    require_exists(p);
    run.input(p);
  }
  const Forest forest = Forest::load(*config.forest_model);
  const auto rows = read_features_csv(*config.features);
  const FeatureMatrix X = to_matrix(rows);
  if (X.cols() != forest.dimension())
    throw Error("feature matrix has " + std::to_string(X.cols()) + " columns but the forest expects " +
                std::to_string(forest.dimension()));
  if (config.sample_size > X.rows())
    throw Error("sample size " + std::to_string(config.sample_size) + " exceeds the " +
                std::to_string(X.rows()) + " available rows");
  const auto summary = shap_summary(forest, X, config.sample_size, config.seed);
  std::vector<std::size_t> post_ids;
  for (const auto& r : rows) post_ids.push_back(r.post_index);

  run.write("attributions.csv", attributions_to_csv(summary, forest, X, post_ids));
  run.write("shap_summary.csv", ranking_to_csv(summary, config.top_k));

  json cfg = {{"forest", config.forest_model->string()},
              {"features", config.features->string()},
              {"seed", config.seed},
              {"sample_size", config.sample_size},
              {"top_k", config.top_k}};
  return run.finish(std::move(cfg));
}

Outputs cmd_synth(const RunConfig& config) {
  Run run("synth", config);
  SynthConfig sc = config.synth;
  sc.seed = config.seed;
  const auto result = synth_corpus(sc);
  run.write("corpus.jsonl", to_jsonl(result.corpus));
  run.write("synth_manifest.json", result.manifest_json);
  if (config.treebank_sentences > 0)
    run.write("treebank.conllu", treebank_to_conllu(synth_treebank(config.treebank_sentences, config.seed)));

  json cfg = {{"seed", config.seed},
              {"posts_per_group", sc.posts_per_group},
              {"users_per_group", sc.users_per_group},
              {"sentences_per_post", sc.sentences_per_post},
              {"treebank_sentences", config.treebank_sentences}};
  return run.finish(std::move(cfg));
}

Outputs cmd_train_tagger(const RunConfig& config) {
  Run run("train-tagger", config);
  if (config.inputs.empty()) throw Error("train-tagger needs --input PATH (CoNLL-U with XPOS)");
  if (!(config.holdout >= 0.0 && config.holdout < 1.0)) throw Error("holdout must lie in [0, 1)");
  if (config.epochs < 0) throw Error("epochs must be non-negative");
  std::vector<TrainingSentence> sentences;
  for (const auto& in : config.inputs) {
    require_exists(in.path);
    run.input(in.path);
    auto part = treebank_from_conllu(csv::read_file(in.path));
    std::move(part.begin(), part.end(), std::back_inserter(sentences));
  }
  if (sentences.empty()) throw Error("training data contains no sentences");

  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);
  shuffle(order, rng);
  const auto n_held = static_cast<std::size_t>(config.holdout * static_cast<double>(sentences.size()));
  std::vector<std::size_t> held(order.end() - static_cast<std::ptrdiff_t>(n_held), order.end());
  order.resize(order.size() - n_held);
  std::sort(order.begin(), order.end());
  std::sort(held.begin(), held.end());

  std::vector<TrainingSentence> train, test;
  for (auto i : order) train.push_back(sentences[i]);
  for (auto i : held) test.push_back(sentences[i]);
  if (train.empty()) throw Error("holdout leaves no training sentences");

  const TaggerModel model = train_tagger(train, config.epochs, config.seed);
  std::size_t held_tokens = 0;
  for (const auto& s : test) held_tokens += s.size();
  json eval = {{"train_sentences", train.size()},
               {"heldout_sentences", test.size()},
               {"heldout_tokens", held_tokens},
               {"accuracy", test.empty() ? json(nullptr) : json(tagging_accuracy(model, test))},
               {"epochs", config.epochs},
               {"seed", config.seed},
               {"features", model.feature_count()}};

  run.write("tagger.model", model.serialize());
  run.write("tagger_eval.json", eval.dump(2) + "\n");
  json cfg = {{"inputs", inputs_json(config)},
              {"seed", config.seed},
              {"epochs", config.epochs},
              {"holdout", config.holdout}};
  return run.finish(std::move(cfg));
}

} // namespace posmark
