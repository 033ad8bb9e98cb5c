#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

#include "posmark/error.hpp"
#include "posmark/tagger.hpp"

namespace posmark {

namespace {

constexpr std::array<std::string_view, kUposCount> kUposNames = {
    "ADJ", "ADV", "NOUN", "PROPN", "VERB", "ADP", "CCONJ", "DET", "PART",
    "SCONJ", "AUX", "PRON", "NUM", "INTJ", "PUNCT", "SYM", "X"};

struct PtbEntry {
  std::string_view ptb;
  Upos upos;
};

// Universal Dependencies PTB conversion table. IN is always ADP here.
constexpr std::array<PtbEntry, 51> kPtbTable = {{
    {"CC", Upos::CCONJ},   {"CD", Upos::NUM},     {"DT", Upos::DET},
    {"EX", Upos::PRON},    {"FW", Upos::X},       {"IN", Upos::ADP},
    {"JJ", Upos::ADJ},     {"JJR", Upos::ADJ},    {"JJS", Upos::ADJ},
    {"LS", Upos::X},       {"MD", Upos::AUX},     {"NN", Upos::NOUN},
    {"NNS", Upos::NOUN},   {"NNP", Upos::PROPN},  {"NNPS", Upos::PROPN},
    {"PDT", Upos::DET},    {"POS", Upos::PART},   {"PRP", Upos::PRON},
    {"PRP$", Upos::PRON},  {"RB", Upos::ADV},     {"RBR", Upos::ADV},
    {"RBS", Upos::ADV},    {"RP", Upos::PART},    {"SYM", Upos::SYM},
    {"TO", Upos::PART},    {"UH", Upos::INTJ},    {"VB", Upos::VERB},
    {"VBD", Upos::VERB},   {"VBG", Upos::VERB},   {"VBN", Upos::VERB},
    {"VBP", Upos::VERB},   {"VBZ", Upos::VERB},   {"WDT", Upos::DET},
    {"WP", Upos::PRON},    {"WP$", Upos::PRON},   {"WRB", Upos::ADV},
    {"XX", Upos::X},       {"ADD", Upos::X},      {"GW", Upos::X},
    {"AFX", Upos::ADJ},    {"NFP", Upos::PUNCT},  {"HYPH", Upos::PUNCT},
    {".", Upos::PUNCT},    {",", Upos::PUNCT},    {":", Upos::PUNCT},
    {"``", Upos::PUNCT},   {"''", Upos::PUNCT},   {"-LRB-", Upos::PUNCT},
    {"-RRB-", Upos::PUNCT}, {"$", Upos::SYM},     {"#", Upos::SYM},
}};

constexpr std::array<std::string_view, kPtbTable.size()> make_tagset() {
  std::array<std::string_view, kPtbTable.size()> out{};
  for (std::size_t i = 0; i < kPtbTable.size(); ++i) out[i] = kPtbTable[i].ptb;
  return out;
}

const auto kTagset = make_tagset();

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct LexEntry {
  std::string_view form;
  Person person;
  std::optional<Number> number;
};

constexpr auto S = Number::Singular;
constexpr auto P = Number::Plural;

const std::array<LexEntry, 32> kPronouns = {{
    {"i", Person::First, S},          {"me", Person::First, S},
    {"my", Person::First, S},         {"mine", Person::First, S},
    {"myself", Person::First, S},     {"we", Person::First, P},
    {"us", Person::First, P},         {"our", Person::First, P},
    {"ours", Person::First, P},       {"ourselves", Person::First, P},
    {"you", Person::Second, {}},      {"your", Person::Second, {}},
    {"yours", Person::Second, {}},    {"yourself", Person::Second, S},
    {"yourselves", Person::Second, P}, {"he", Person::Third, S},
    {"him", Person::Third, S},        {"his", Person::Third, S},
    {"himself", Person::Third, S},    {"she", Person::Third, S},
    {"her", Person::Third, S},        {"hers", Person::Third, S},
    {"herself", Person::Third, S},    {"it", Person::Third, S},
    {"its", Person::Third, S},        {"itself", Person::Third, S},
    {"they", Person::Third, P},       {"them", Person::Third, P},
    {"their", Person::Third, P},      {"theirs", Person::Third, P},
    {"themselves", Person::Third, P}, {"themself", Person::Third, S},
}};

bool is_adverb_tag(std::string_view t) { return t == "RB" || t == "RBR" || t == "RBS"; }

} // namespace

std::string_view upos_name(Upos upos) { return kUposNames[static_cast<std::size_t>(upos)]; }

Upos parse_upos(std::string_view name) {
  for (std::size_t i = 0; i < kUposNames.size(); ++i)
    if (kUposNames[i] == name) return static_cast<Upos>(i);
  throw Error("unknown UPOS value '" + std::string(name) + "'");
}

std::string_view tense_name(Tense tense) {
  switch (tense) {
  case Tense::Past: return "Past";
  case Tense::Present: return "Pres";
  case Tense::Future: return "Fut";
  }
  return "?";
}

std::span<const std::string_view> ptb_tagset() { return kTagset; }

bool is_ptb_tag(std::string_view ptb) {
  return std::find(kTagset.begin(), kTagset.end(), ptb) != kTagset.end();
}

Upos ptb_to_upos(std::string_view ptb) {
  for (const auto& e : kPtbTable)
    if (e.ptb == ptb) return e.upos;
  throw Error("unknown PTB tag '" + std::string(ptb) + "'");
}

std::optional<PronounMorph> pronoun_morph(std::string_view form, std::string_view ptb) {
  if (ptb != "PRP" && ptb != "PRP$") return std::nullopt;
  const std::string key = lower(form);
  for (const auto& e : kPronouns)
    if (e.form == key) return PronounMorph{e.person, e.number};
  return std::nullopt;
}

std::vector<std::optional<Tense>> assign_tense(std::span<const std::string> ptb_sequence,
                                               const MorphologyOptions& options) {
  std::vector<std::optional<Tense>> out(ptb_sequence.size());
  // Tag preceding the current one, ignoring adverbs unless strict.
  std::string_view previous;
  for (std::size_t i = 0; i < ptb_sequence.size(); ++i) {
    const std::string& t = ptb_sequence[i];
    if (t == "VBD" || t == "VBN") {
      out[i] = Tense::Past;
    } else if (t == "VBG" || t == "VBZ" || t == "VBP") {
      out[i] = Tense::Present;
    } else if (t == "VB") {
      out[i] = previous == "MD" ? Tense::Future : Tense::Present;
    }
    if (t == ".") {
      previous = {};
    } else if (options.strict_md_adjacency || !is_adverb_tag(t)) {
      previous = t;
    }
  }
  return out;
}

std::vector<TaggedToken> annotate(std::span<const std::string> forms,
                                  std::span<const std::string> ptb,
                                  std::span<const Upos> upos,
                                  const MorphologyOptions& options) {
  if (forms.size() != ptb.size() || (!upos.empty() && upos.size() != forms.size()))
    throw Error("annotate: forms, PTB tags and UPOS tags differ in length");
  const auto tenses = assign_tense(ptb, options);
  std::vector<TaggedToken> out;
  out.reserve(forms.size());
  for (std::size_t i = 0; i < forms.size(); ++i) {
    TaggedToken tok;
    tok.form = forms[i];
    tok.ptb = ptb[i];
    tok.upos = upos.empty() ? ptb_to_upos(ptb[i]) : upos[i];
    if (tok.upos == Upos::VERB || tok.upos == Upos::AUX) tok.tense = tenses[i];
    if (tok.upos == Upos::PRON) {
      if (auto m = pronoun_morph(tok.form, tok.ptb)) {
        tok.pron_person = m->person;
        tok.pron_number = m->number;
      }
    }
    out.push_back(std::move(tok));
  }
  return out;
}

} // namespace posmark
