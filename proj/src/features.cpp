#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "posmark/csv.hpp"
#include "posmark/error.hpp"
#include "posmark/features.hpp"

namespace posmark {

namespace {

constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "ADJ", "ADV", "NOUN", "PROPN", "VERB", "ADP", "CCONJ", "DET", "PART", "SCONJ", "AUX", "PRON",
    "tense_past", "tense_present", "tense_future",
    "person_first", "person_second", "person_third",
    "first_singular", "first_plural",
    "pronominalisation_index", "formality"};

constexpr std::size_t idx(Feature f) { return static_cast<std::size_t>(f); }

bool is_article(const TaggedToken& t) {
  if (t.upos != Upos::DET || t.form.size() > 3) return false;
  std::string low = t.form;
  for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return low == "a" || low == "an" || low == "the";
}

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

std::string_view feature_name(Feature f) { return kFeatureNames[idx(f)]; }

std::span<const std::string_view> feature_names() { return kFeatureNames; }

Feature parse_feature(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
    if (kFeatureNames[i] == name) return static_cast<Feature>(i);
  throw Error("unknown feature '" + std::string(name) + "'");
}

std::optional<double> pronominalisation_index(std::span<const TaggedToken> tokens) {
  std::size_t pron = 0, noun = 0;
  for (const auto& t : tokens) {
    if (t.upos == Upos::PRON) ++pron;
    if (t.upos == Upos::NOUN || t.upos == Upos::PROPN) ++noun;
  }
  return ratio(pron, noun);
}

double formality_score(std::span<const TaggedToken> tokens) {
  if (tokens.empty()) throw Error("formality_score: empty token list");
  // Signed integer balance first, so duplicating the post changes nothing.
  long long balance = 0;
  for (const auto& t : tokens) {
    switch (t.upos) {
    case Upos::NOUN:
    case Upos::PROPN:
    case Upos::ADJ:
    case Upos::ADP: ++balance; break;
    case Upos::PRON:
    case Upos::VERB:
    case Upos::ADV:
    case Upos::INTJ: --balance; break;
    default:
      if (is_article(t)) ++balance;
    }
  }
  const double percent = 100.0 * static_cast<double>(balance) / static_cast<double>(tokens.size());
  return (percent + 100.0) / 2.0;
}

std::optional<FeatureVector> extract_post_features(std::span<const TaggedToken> tokens,
                                                   const FeatureOptions& options) {
  if (tokens.empty()) return std::nullopt;

  std::array<std::size_t, kUposCount> upos{};
  std::array<std::size_t, 3> tense{}, person{};
  std::array<std::size_t, 2> first_number{};
  std::size_t tensed = 0, personal = 0, first = 0;
  for (const auto& t : tokens) {
    ++upos[static_cast<std::size_t>(t.upos)];
    if (t.tense) {
      ++tense[static_cast<std::size_t>(*t.tense)];
      ++tensed;
    }
    if (t.pron_person) {
      ++person[static_cast<std::size_t>(*t.pron_person)];
      ++personal;
      if (*t.pron_person == Person::First && t.pron_number) {
        ++first_number[static_cast<std::size_t>(*t.pron_number)];
        ++first;
      }
    }
  }

  std::size_t denom = tokens.size();
  if (!options.all_tags_denominator)
    for (Upos excluded : {Upos::PUNCT, Upos::SYM, Upos::X, Upos::NUM})
      denom -= upos[static_cast<std::size_t>(excluded)];

  FeatureVector v;
  for (std::size_t i = 0; i < kTrackedUpos.size(); ++i)
    v.values[i] = ratio(upos[static_cast<std::size_t>(kTrackedUpos[i])], denom);
  for (std::size_t i = 0; i < 3; ++i) {
    v.values[idx(Feature::Past) + i] = ratio(tense[i], tensed);
    v.values[idx(Feature::FirstPerson) + i] = ratio(person[i], personal);
  }
  for (std::size_t i = 0; i < 2; ++i) v.values[idx(Feature::FirstSingular) + i] = ratio(first_number[i], first);
  v[Feature::PronominalisationIndex] = pronominalisation_index(tokens);
  v[Feature::Formality] = formality_score(tokens);
  return v;
}

GroupSummary aggregate(std::span<const FeatureVector> vectors, Label label) {
  GroupSummary summary;
  summary.label = label;
  std::vector<double> values;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    values.clear();
    for (const auto& v : vectors)
      if (v.values[f]) values.push_back(*v.values[f]);
    auto& stats = summary.features[f];
    stats.count = values.size();
    if (values.empty()) continue;
    double sum = 0;
    for (double x : values) sum += x;
    const double mean = sum / static_cast<double>(values.size());
    stats.mean = mean;
    if (values.size() >= 2) {
      double ss = 0;
      for (double x : values) ss += (x - mean) * (x - mean);
      stats.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
  }
  return summary;
}

std::vector<FeatureRow> per_user_means(std::span<const FeatureRow> rows) {
  std::map<std::string, std::size_t> slot;
  std::vector<FeatureRow> out;
  std::vector<std::array<std::pair<double, std::size_t>, kFeatureCount>> sums;
  for (const auto& row : rows) {
    auto [it, inserted] = slot.try_emplace(row.user_id, out.size());
    if (inserted) {
      out.push_back(FeatureRow{row.user_id, out.size(), row.label, {}});
      sums.emplace_back();
    }
    auto& acc = sums[it->second];
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      if (!row.features.values[f]) continue;
      acc[f].first += *row.features.values[f];
      ++acc[f].second;
    }
  }
  for (std::size_t u = 0; u < out.size(); ++u)
    for (std::size_t f = 0; f < kFeatureCount; ++f)
      if (sums[u][f].second > 0)
        out[u].features.values[f] = sums[u][f].first / static_cast<double>(sums[u][f].second);
  return out;
}

std::string features_to_csv(std::span<const FeatureRow> rows) {
  std::vector<std::string> header = {"user_id", "post_index", "label"};
  for (auto name : kFeatureNames) header.emplace_back(name);
  std::string out = csv::join(header) + "\n";
  for (const auto& row : rows) {
    std::vector<std::string> fields = {row.user_id, std::to_string(row.post_index),
                                       std::string(label_name(row.label))};
    for (const auto& v : row.features.values) fields.push_back(csv::number_or_na(v));
    out += csv::join(fields) + "\n";
  }
  return out;
}

std::vector<FeatureRow> features_from_csv(std::string_view content) {
  const auto table = csv::parse(content);
  if (table.empty()) throw Error("feature CSV: missing header row");
  const auto& header = table.front();
  if (header.size() != kFeatureCount + 3 || header[0] != "user_id" || header[1] != "post_index" ||
      header[2] != "label")
    throw Error("feature CSV: unexpected header");
  for (std::size_t f = 0; f < kFeatureCount; ++f)
    if (header[f + 3] != kFeatureNames[f])
      throw Error("feature CSV: unexpected column '" + header[f + 3] + "'");

  std::vector<FeatureRow> rows;
  rows.reserve(table.size() - 1);
  for (std::size_t r = 1; r < table.size(); ++r) {
    const auto& fields = table[r];
    if (fields.size() != header.size())
      throw Error("feature CSV: row " + std::to_string(r + 1) + " has " +
                  std::to_string(fields.size()) + " fields");
    FeatureRow row;
    row.user_id = fields[0];
    try {
      row.post_index = std::stoull(fields[1]);
    } catch (const std::exception&) {
      throw Error("feature CSV: bad post_index on row " + std::to_string(r + 1));
    }
    row.label = parse_label(fields[2]);
    for (std::size_t f = 0; f < kFeatureCount; ++f)
      row.features.values[f] = csv::parse_number(fields[f + 3]);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_features_csv(std::span<const FeatureRow> rows, const std::filesystem::path& path) {
  csv::write_file(path, features_to_csv(rows));
}

std::vector<FeatureRow> read_features_csv(const std::filesystem::path& path) {
  return features_from_csv(csv::read_file(path));
}

} // namespace posmark
