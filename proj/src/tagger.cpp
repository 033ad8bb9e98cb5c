#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "posmark/error.hpp"
#include "posmark/tagger.hpp"

namespace posmark {

namespace {

constexpr std::string_view kModelHeader = "posmark-tagger 1";

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view tail(std::string_view s, std::size_t n) {
  return s.size() <= n ? s : s.substr(s.size() - n);
}

/// Context window for one sentence: lowercased words padded on both sides.
struct Context {
  std::vector<std::string> words; // lowercased

  explicit Context(std::span<const std::string> sentence) {
    words.reserve(sentence.size() + 2);
    words.emplace_back("-START-");
    for (const auto& w : sentence) words.push_back(lower(w));
    words.emplace_back("-END-");
  }
};

void token_features(const Context& ctx, std::span<const std::string> sentence, std::size_t i,
                    std::string_view prev_tag, std::string_view prev2_tag,
                    std::vector<std::string>& out) {
  out.clear();
  const std::string& raw = sentence[i];
  const std::string& word = ctx.words[i + 1];
  auto add = [&](std::string_view key, std::string_view value) {
    std::string f;
    f.reserve(key.size() + value.size());
    f.append(key).append(value);
    out.push_back(std::move(f));
  };
  out.emplace_back("bias");
  add("w=", word);
  add("s1=", tail(word, 1));
  add("s2=", tail(word, 2));
  add("s3=", tail(word, 3));
  add("p1=", std::string_view(word).substr(0, 1));
  add("t1=", prev_tag);
  std::string both(prev_tag);
  both.push_back('|');
  both.append(prev2_tag);
  add("t2=", both);
  add("wp=", ctx.words[i]);
  add("wn=", ctx.words[i + 2]);
  if (std::any_of(raw.begin(), raw.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    out.emplace_back("has-digit");
  if (raw.find('-') != std::string::npos) out.emplace_back("has-hyphen");
  if (!raw.empty() && std::isupper(static_cast<unsigned char>(raw[0]))) out.emplace_back("init-cap");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error("tagger model: bad number '" + std::string(s) + "'");
  return v;
}

} // namespace

// ---------------------------------------------------------------------------

std::size_t TaggerModel::best_tag(std::span<const std::string> features) const {
  const std::size_t n = tags_.size();
  std::vector<double> scores(n, 0.0);
  for (const auto& f : features) {
    auto it = index_.find(f);
    if (it == index_.end()) continue;
    const double* row = weights_.data() + it->second * n;
    for (std::size_t t = 0; t < n; ++t) scores[t] += row[t];
  }
  std::size_t best = 0;
  for (std::size_t t = 1; t < n; ++t)
    if (scores[t] > scores[best]) best = t;
  return best;
}

std::vector<std::string> TaggerModel::predict(std::span<const std::string> sentence) const {
  if (tags_.empty()) throw Error("tagger model has no tags");
  std::vector<std::string> out;
  out.reserve(sentence.size());
  Context ctx(sentence);
  std::vector<std::string> feats;
  std::string prev = "-START-", prev2 = "-START2-";
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    token_features(ctx, sentence, i, prev, prev2, feats);
    const std::string& guess = tags_[best_tag(feats)];
    out.push_back(guess);
    prev2 = std::move(prev);
    prev = guess;
  }
  return out;
}

std::string TaggerModel::serialize() const {
  std::ostringstream os;
  os << kModelHeader << '\n';
  os << "epochs\t" << epochs_ << '\n';
  os << "seed\t" << seed_ << '\n';
  os << "tags";
  for (const auto& t : tags_) os << '\t' << t;
  os << '\n';
  std::vector<std::pair<std::string_view, std::size_t>> rows(index_.begin(), index_.end());
  std::sort(rows.begin(), rows.end());
  const std::size_t n = tags_.size();
  for (const auto& [feature, row] : rows) {
    for (std::size_t t = 0; t < n; ++t) {
      const double w = weights_[row * n + t];
      if (w == 0.0) continue;
      os << feature << '\t' << t << '\t' << format_double(w) << '\n';
    }
  }
  return os.str();
}

void TaggerModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write tagger model '" + path.string() + "'");
  out << serialize();
}

TaggerModel TaggerModel::deserialize(std::string_view text) {
  TaggerModel model;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != kModelHeader)
    throw Error("tagger model: missing or unsupported version header");
  auto field = [&](std::string_view key) {
    if (!std::getline(in, line) || line.rfind(std::string(key) + "\t", 0) != 0)
      throw Error("tagger model: expected '" + std::string(key) + "' line");
    return line.substr(key.size() + 1);
  };
  model.epochs_ = std::stoi(field("epochs"));
  model.seed_ = std::stoull(field("seed"));
  {
    std::istringstream tags(field("tags"));
    std::string t;
    while (std::getline(tags, t, '\t')) model.tags_.push_back(t);
  }
  const std::size_t n = model.tags_.size();
  if (n == 0) throw Error("tagger model: empty tag list");
  std::size_t lineno = 4;
  while (std::getline(in, line)) {
    ++lineno;
    const auto a = line.find('\t');
    const auto b = line.find('\t', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos)
      throw Error("tagger model: malformed line " + std::to_string(lineno));
    const std::string feature = line.substr(0, a);
    const std::size_t t = std::stoul(line.substr(a + 1, b - a - 1));
    if (t >= n) throw Error("tagger model: tag index out of range on line " + std::to_string(lineno));
    auto [it, inserted] = model.index_.try_emplace(feature, model.index_.size());
    if (inserted) model.weights_.resize(model.weights_.size() + n, 0.0);
    model.weights_[it->second * n + t] = parse_double(std::string_view(line).substr(b + 1));
  }
  return model;
}

TaggerModel TaggerModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read tagger model '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

bool TaggerModel::operator==(const TaggerModel& other) const {
  return serialize() == other.serialize();
}

// ---------------------------------------------------------------------------

/// Averaged perceptron training state. Averages are accumulated lazily: each
/// weight remembers the step it last changed at.
class PerceptronTrainer {
public:
  PerceptronTrainer(std::vector<std::string> tags) : n_(tags.size()) {
    model_.tags_ = std::move(tags);
  }

  std::size_t predict(std::span<const std::string> feats) const { return model_.best_tag(feats); }

  void update(std::size_t truth, std::size_t guess, std::span<const std::string> feats) {
    ++step_;
    if (truth == guess) return;
    for (const auto& f : feats) {
      const std::size_t row = row_for(f);
      bump(row * n_ + truth, 1.0);
      bump(row * n_ + guess, -1.0);
    }
  }

  TaggerModel finish(int epochs, std::uint64_t seed) {
    if (step_ > 0) {
      for (std::size_t k = 0; k < model_.weights_.size(); ++k) {
        const double total = totals_[k] + static_cast<double>(step_ - stamps_[k]) * model_.weights_[k];
        model_.weights_[k] = total / static_cast<double>(step_);
      }
    }
    model_.epochs_ = epochs;
    model_.seed_ = seed;
    return std::move(model_);
  }

private:
  std::size_t row_for(const std::string& f) {
    auto [it, inserted] = model_.index_.try_emplace(f, model_.index_.size());
    if (inserted) {
      model_.weights_.resize(model_.weights_.size() + n_, 0.0);
      totals_.resize(model_.weights_.size(), 0.0);
      stamps_.resize(model_.weights_.size(), 0);
    }
    return it->second;
  }

  void bump(std::size_t k, double delta) {
    totals_[k] += static_cast<double>(step_ - stamps_[k]) * model_.weights_[k];
    stamps_[k] = step_;
    model_.weights_[k] += delta;
  }

  std::size_t n_;
  TaggerModel model_;
  std::vector<double> totals_;
  std::vector<std::uint64_t> stamps_;
  std::uint64_t step_ = 0;
};

TaggerModel train_tagger(std::span<const TrainingSentence> sentences, int epochs,
                         std::uint64_t seed) {
  if (sentences.empty()) throw Error("train_tagger: empty training set");
  if (epochs < 0) throw Error("train_tagger: epochs must be non-negative");

  std::map<std::string, std::size_t> freq;
  for (const auto& s : sentences)
    for (const auto& tok : s) {
      if (!is_ptb_tag(tok.ptb)) throw Error("train_tagger: unknown PTB tag '" + tok.ptb + "'");
      ++freq[tok.ptb];
    }
  if (freq.empty()) throw Error("train_tagger: training sentences contain no tokens");

  std::vector<std::pair<std::string, std::size_t>> ordered(freq.begin(), freq.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tags;
  std::map<std::string, std::size_t> tag_index;
  for (const auto& [t, c] : ordered) {
    tag_index.emplace(t, tags.size());
    tags.push_back(t);
  }

  PerceptronTrainer trainer(tags);
  std::vector<std::size_t> order(sentences.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);

  std::vector<std::string> forms, feats;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    if (epoch > 0) {
      // Fisher-Yates with an explicit bounded draw so the order is the same
      // on every standard library.
      for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = rng() % i;
        std::swap(order[i - 1], order[j]);
      }
    }
    for (std::size_t idx : order) {
      const auto& sentence = sentences[idx];
      forms.clear();
      for (const auto& tok : sentence) forms.push_back(tok.form);
      Context ctx(forms);
      std::string prev = "-START-", prev2 = "-START2-";
      for (std::size_t i = 0; i < forms.size(); ++i) {
        token_features(ctx, forms, i, prev, prev2, feats);
        const std::size_t guess = trainer.predict(feats);
        trainer.update(tag_index.at(sentence[i].ptb), guess, feats);
        prev2 = std::move(prev);
        prev = tags[guess];
      }
    }
  }
  return trainer.finish(epochs, seed);
}

std::vector<std::vector<TaggedToken>> tag_sentences(const TaggerModel& model,
                                                    std::span<const std::string> tokens,
                                                    const MorphologyOptions& options) {
  std::vector<std::vector<TaggedToken>> out;
  for (const auto& sentence : split_sentences(tokens))
    out.push_back(annotate(sentence, model.predict(sentence), {}, options));
  return out;
}

std::vector<TaggedToken> tag(const TaggerModel& model, std::span<const std::string> tokens,
                             const MorphologyOptions& options) {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  for (auto& sentence : tag_sentences(model, tokens, options))
    std::move(sentence.begin(), sentence.end(), std::back_inserter(out));
  return out;
}

double tagging_accuracy(const TaggerModel& model, std::span<const TrainingSentence> gold) {
  std::size_t total = 0, correct = 0;
  std::vector<std::string> forms;
  for (const auto& s : gold) {
    forms.clear();
    for (const auto& t : s) forms.push_back(t.form);
    const auto pred = model.predict(forms);
    for (std::size_t i = 0; i < s.size(); ++i) {
      ++total;
      if (pred[i] == s[i].ptb) ++correct;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

} // namespace posmark
