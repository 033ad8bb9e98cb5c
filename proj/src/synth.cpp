#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include <json.hpp>

#include "posmark/error.hpp"
#include "posmark/forest.hpp"
#include "posmark/synth.hpp"

namespace posmark {

namespace {

// ---------------------------------------------------------------------------
// Lexicon

struct NounEntry {
  std::string_view singular;
  std::string_view plural; // empty for mass nouns
};

constexpr NounEntry kNouns[] = {
    {"dog", "dogs"}, {"house", "houses"}, {"job", "jobs"}, {"friend", "friends"},
    {"day", "days"}, {"time", "times"}, {"life", "lives"}, {"doctor", "doctors"},
    {"game", "games"}, {"car", "cars"}, {"book", "books"}, {"night", "nights"},
    {"movie", "movies"}, {"city", "cities"}, {"therapist", "therapists"},
    {"relationship", "relationships"}, {"boyfriend", "boyfriends"},
    {"girlfriend", "girlfriends"}, {"mom", "moms"}, {"dad", "dads"},
    {"family", "families"}, {"school", "schools"}, {"class", "classes"},
    {"problem", "problems"}, {"thing", "things"}, {"government", "governments"},
    {"president", "presidents"}, {"election", "elections"}, {"team", "teams"},
    {"season", "seasons"}, {"song", "songs"}, {"phone", "phones"},
    {"computer", "computers"}, {"week", "weeks"}, {"year", "years"}, {"idea", "ideas"},
    {"story", "stories"}, {"country", "countries"}, {"picture", "pictures"},
    {"question", "questions"}, {"apple", "apples"}, {"office", "offices"},
    {"walk", "walks"}, {"call", "calls"}, {"run", "runs"}, {"plan", "plans"},
    {"talk", "talks"}, {"vote", "votes"}, {"show", "shows"}, {"watch", "watches"},
    {"play", "plays"}, {"anxiety", ""}, {"depression", ""}, {"news", ""},
    {"money", ""}, {"music", ""}, {"medication", ""}, {"weather", ""},
    {"love", ""}, {"help", ""}, {"work", ""}, {"sleep", ""}, {"hope", ""},
};

constexpr std::string_view kAdjectives[] = {
    "sad", "happy", "good", "bad", "tired", "new", "old", "big", "great", "lonely",
    "political", "hard", "awful", "nice", "small", "long", "little", "whole", "real",
    "important", "anxious", "empty", "busy", "free"};
constexpr std::string_view kComparatives[] = {"better", "worse", "bigger"};
constexpr std::string_view kSuperlatives[] = {"best", "worst"};

constexpr std::string_view kProperNouns[] = {
    "John", "Mary", "Sarah", "Mike", "Reddit", "Trump", "Obama", "London", "Texas",
    "Google", "Netflix", "Chicago", "Emma", "Alex", "Facebook", "Twitter", "Canada",
    "Europe", "Jake", "Lisa", "Amazon", "Hillary", "Spotify", "Boston"};

enum Frame : unsigned { Trans = 1, Intrans = 2, Comp = 4, Ling = 8, ToInf = 16 };

struct Verb {
  std::string_view base, third, past, participle, gerund;
  unsigned frames;
};

constexpr Verb kVerbs[] = {
    {"love", "loves", "loved", "loved", "loving", Trans},
    {"hate", "hates", "hated", "hated", "hating", Trans},
    {"like", "likes", "liked", "liked", "liking", Trans},
    {"see", "sees", "saw", "seen", "seeing", Trans},
    {"watch", "watches", "watched", "watched", "watching", Trans},
    {"call", "calls", "called", "called", "calling", Trans},
    {"help", "helps", "helped", "helped", "helping", Trans},
    {"make", "makes", "made", "made", "making", Trans},
    {"take", "takes", "took", "taken", "taking", Trans},
    {"get", "gets", "got", "gotten", "getting", Trans},
    {"read", "reads", "read", "read", "reading", Trans | Intrans},
    {"find", "finds", "found", "found", "finding", Trans},
    {"lose", "loses", "lost", "lost", "losing", Trans},
    {"miss", "misses", "missed", "missed", "missing", Trans},
    {"play", "plays", "played", "played", "playing", Trans | Intrans},
    {"visit", "visits", "visited", "visited", "visiting", Trans},
    {"lead", "leads", "led", "led", "leading", Trans},
    {"show", "shows", "showed", "shown", "showing", Trans},
    {"create", "creates", "created", "created", "creating", Trans},
    {"begin", "begins", "began", "begun", "beginning", Trans},
    {"tell", "tells", "told", "told", "telling", Trans},
    {"buy", "buys", "bought", "bought", "buying", Trans},
    {"meet", "meets", "met", "met", "meeting", Trans},
    {"leave", "leaves", "left", "left", "leaving", Trans | Intrans},
    {"hit", "hits", "hit", "hit", "hitting", Trans},
    {"need", "needs", "needed", "needed", "needing", Trans | ToInf},
    {"want", "wants", "wanted", "wanted", "wanting", Trans | ToInf},
    {"sleep", "sleeps", "slept", "slept", "sleeping", Intrans},
    {"go", "goes", "went", "gone", "going", Intrans},
    {"work", "works", "worked", "worked", "working", Intrans},
    {"run", "runs", "ran", "run", "running", Intrans},
    {"talk", "talks", "talked", "talked", "talking", Intrans},
    {"cry", "cries", "cried", "cried", "crying", Intrans},
    {"walk", "walks", "walked", "walked", "walking", Intrans},
    {"vote", "votes", "voted", "voted", "voting", Intrans},
    {"live", "lives", "lived", "lived", "living", Intrans},
    {"sit", "sits", "sat", "sat", "sitting", Intrans},
    {"come", "comes", "came", "come", "coming", Intrans},
    {"wait", "waits", "waited", "waited", "waiting", Intrans},
    {"laugh", "laughs", "laughed", "laughed", "laughing", Intrans},
    {"think", "thinks", "thought", "thought", "thinking", Comp},
    {"know", "knows", "knew", "known", "knowing", Comp | Trans},
    {"say", "says", "said", "said", "saying", Comp},
    {"believe", "believes", "believed", "believed", "believing", Comp},
    {"guess", "guesses", "guessed", "guessed", "guessing", Comp},
    {"hope", "hopes", "hoped", "hoped", "hoping", Comp | ToInf},
    {"feel", "feels", "felt", "felt", "feeling", Ling | Comp},
    {"seem", "seems", "seemed", "seemed", "seeming", Ling},
    {"look", "looks", "looked", "looked", "looking", Ling},
    {"become", "becomes", "became", "become", "becoming", Ling},
    {"try", "tries", "tried", "tried", "trying", ToInf},
    {"decide", "decides", "decided", "decided", "deciding", ToInf},
    {"start", "starts", "started", "started", "starting", ToInf | Trans},
};

constexpr std::string_view kModals[] = {"will", "would", "can", "could", "should", "might", "must"};
constexpr std::string_view kPreAdverbs[] = {"really", "never", "always", "just", "often", "still"};
constexpr std::string_view kModalAdverbs[] = {"never", "really", "not", "always", "probably"};
constexpr std::string_view kDegreeAdverbs[] = {"so", "very", "really", "too", "pretty"};
constexpr std::string_view kFinalAdverbs[] = {"again", "now", "here", "too", "anymore", "hard", "outside"};
constexpr std::string_view kPrepositions[] = {"in", "on", "at", "with", "about", "for",
                                              "from", "after", "before", "like", "without"};
constexpr std::string_view kInterjections[] = {"oh", "well", "yeah", "wow", "ok", "lol"};
constexpr std::string_view kCoordinators[] = {"and", "but", "or"};
constexpr std::string_view kNumbers[] = {"two", "three", "five", "10", "100"};

struct Agreement {
  int person = 3;
  bool plural = false;
};

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <typename T, std::size_t N>
const T& pick(std::mt19937_64& rng, const T (&items)[N]) {
  return items[uniform_index(rng, N)];
}

bool starts_with_vowel(std::string_view w) {
  return !w.empty() && std::string_view("aeiou").find(w[0]) != std::string_view::npos;
}

// ---------------------------------------------------------------------------

class SentenceBuilder {
public:
  SentenceBuilder(const GroupProfile& profile, std::mt19937_64& rng) : p_(profile), rng_(rng) {}

  TrainingSentence sentence() {
    out_.clear();
    if (chance(p_.interjection)) {
      emit(pick(rng_, kInterjections), "UH");
      emit(",", ",");
    }
    clause(0);
    if (chance(0.18)) {
      emit(pick(rng_, kCoordinators), "CC");
      clause(1);
    }
    emit(chance(0.12) ? "!" : ".", ".");
    auto& first = out_.front().form;
    first[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(first[0])));
    return std::move(out_);
  }

private:
  bool chance(double p) { return uniform01(rng_) < p; }

  void emit(std::string_view form, std::string_view tag) {
    out_.push_back({std::string(form), std::string(tag)});
  }

  enum class Case { Subject, Object };

  enum class Tense3 { Past, Present, Future };

  Tense3 draw_tense() {
    const double r = uniform01(rng_);
    if (r < p_.tense_mix[0]) return Tense3::Past;
    if (r < p_.tense_mix[0] + p_.tense_mix[1]) return Tense3::Present;
    return Tense3::Future;
  }

  std::string_view possessive_determiner() {
    const double other = p_.other_pronoun / 5.0;
    const double total = p_.first_singular + p_.first_plural + 5 * other;
    double r = uniform01(rng_) * total;
    if ((r -= p_.first_singular) < 0) return "my";
    if ((r -= p_.first_plural) < 0) return "our";
    constexpr std::string_view others[] = {"your", "his", "her", "their", "its"};
    return pick(rng_, others);
  }

  Agreement common_np() {
    const auto& noun = pick(rng_, kNouns);
    const bool plural = !noun.plural.empty() && chance(0.35);
    const std::string_view head = plural ? noun.plural : noun.singular;
    std::string_view adjective;
    std::string_view adjective_tag = "JJ";
    if (chance(p_.adjective)) {
      const double r = uniform01(rng_);
      if (r < 0.85) {
        adjective = pick(rng_, kAdjectives);
      } else if (r < 0.95) {
        adjective = pick(rng_, kComparatives);
        adjective_tag = "JJR";
      } else {
        adjective = pick(rng_, kSuperlatives);
        adjective_tag = "JJS";
      }
    }
    const std::string_view next = adjective.empty() ? head : adjective;

    const double d = uniform01(rng_);
    if (d < 0.25) {
      emit(possessive_determiner(), "PRP$");
    } else if (plural && d < 0.35) {
      // bare plural
    } else if (plural && d < 0.40) {
      emit(pick(rng_, kNumbers), "CD");
    } else if (chance(p_.article)) {
      if (plural || chance(0.5))
        emit("the", "DT");
      else
        emit(starts_with_vowel(next) ? "an" : "a", "DT");
    } else {
      constexpr std::string_view singular_dt[] = {"this", "that", "every", "each", "no"};
      constexpr std::string_view plural_dt[] = {"these", "those", "some", "all", "no"};
      emit(plural ? pick(rng_, plural_dt) : pick(rng_, singular_dt), "DT");
    }
    if (!adjective.empty()) emit(adjective, adjective_tag);
    emit(head, plural ? "NNS" : "NN");
    return {3, plural};
  }

  Agreement nominal(Case c) {
    double r = uniform01(rng_);
    const bool subject = c == Case::Subject;
    if ((r -= p_.first_singular) < 0) {
      emit(subject ? "I" : "me", "PRP");
      return {1, false};
    }
    if ((r -= p_.first_plural) < 0) {
      emit(subject ? "we" : "us", "PRP");
      return {1, true};
    }
    if ((r -= p_.other_pronoun) < 0) {
      switch (uniform_index(rng_, 5)) {
      case 0: emit("you", "PRP"); return {2, false};
      case 1: emit(subject ? "he" : "him", "PRP"); return {3, false};
      case 2: emit(subject ? "she" : "her", "PRP"); return {3, false};
      case 3: emit(subject ? "they" : "them", "PRP"); return {3, true};
      default: emit("it", "PRP"); return {3, false};
      }
    }
    if ((r -= p_.proper_noun) < 0) {
      if (chance(0.1)) {
        emit("New", "NNP");
        emit("York", "NNP");
        return {3, false};
      }
      emit(pick(rng_, kProperNouns), "NNP");
      if (chance(0.1)) {
        emit("'s", "POS");
        const auto& noun = pick(rng_, kNouns);
        emit(noun.singular, "NN");
      }
      return {3, false};
    }
    return common_np();
  }

  bool is_pronoun_subject() const {
    return out_.size() >= 1 && out_.back().ptb == "PRP";
  }

  void be(Tense3 t, Agreement a) {
    const bool contract = is_pronoun_subject() && chance(0.3);
    if (t == Tense3::Past) {
      emit(a.plural || a.person == 2 ? "were" : "was", "VBD");
    } else if (a.person == 1 && !a.plural) {
      emit(contract ? "'m" : "am", "VBP");
    } else if (a.person == 3 && !a.plural) {
      emit(contract ? "'s" : "is", "VBZ");
    } else {
      emit(contract ? "'re" : "are", "VBP");
    }
  }

  void have(Tense3 t, Agreement a) {
    if (t == Tense3::Past) {
      emit("had", "VBD");
    } else if (a.person == 3 && !a.plural) {
      emit("has", "VBZ");
    } else {
      emit(is_pronoun_subject() && chance(0.3) ? "'ve" : "have", "VBP");
    }
  }

  void modal() {
    if (is_pronoun_subject() && chance(0.25))
      emit("'ll", "MD");
    else
      emit(pick(rng_, kModals), "MD");
    if (chance(p_.adverb)) emit(pick(rng_, kModalAdverbs), "RB");
  }

  void adjective_phrase() {
    if (chance(p_.adverb)) emit(pick(rng_, kDegreeAdverbs), "RB");
    emit(pick(rng_, kAdjectives), "JJ");
  }

  void prep_phrase() {
    emit(pick(rng_, kPrepositions), "IN");
    nominal(Case::Object);
  }

  void copular(Agreement a) {
    const Tense3 t = draw_tense();
    if (t == Tense3::Future) {
      modal();
      emit("be", "VB");
    } else {
      be(t, a);
    }
    adjective_phrase();
  }

  void existential() {
    emit("there", "EX");
    const Tense3 t = draw_tense();
    Agreement a{3, chance(0.4)};
    if (t == Tense3::Future) {
      modal();
      emit("be", "VB");
    } else if (t == Tense3::Past) {
      emit(a.plural ? "were" : "was", "VBD");
    } else {
      emit(a.plural ? "are" : "is", a.plural ? "VBP" : "VBZ");
    }
    a = common_np();
    if (chance(p_.prep_phrase)) prep_phrase();
  }

  /// Finite verb group for `verb`; returns with the main verb emitted.
  void verb_group(const Verb& verb, Agreement a) {
    const Tense3 t = draw_tense();
    const bool third_singular = a.person == 3 && !a.plural;
    const double aspect = uniform01(rng_);
    if (t == Tense3::Future) {
      modal();
      emit(verb.base, "VB");
    } else if (aspect < 0.12) {
      be(t, a);
      emit(verb.gerund, "VBG");
    } else if (aspect < 0.22) {
      have(t, a);
      emit(verb.participle, "VBN");
    } else if (aspect < 0.32) {
      if (t == Tense3::Past)
        emit("did", "VBD");
      else
        emit(third_singular ? "does" : "do", third_singular ? "VBZ" : "VBP");
      emit("n't", "RB");
      emit(verb.base, "VB");
    } else {
      if (chance(p_.adverb)) emit(pick(rng_, kPreAdverbs), "RB");
      if (t == Tense3::Past)
        emit(verb.past, "VBD");
      else if (third_singular)
        emit(verb.third, "VBZ");
      else
        emit(verb.base, "VBP");
    }
  }

  void clause(int depth) {
    const double r = uniform01(rng_);
    if (r < 0.07) {
      existential();
      return;
    }
    const Agreement subject = nominal(Case::Subject);
    if (r < 0.25) {
      copular(subject);
      if (chance(p_.prep_phrase)) prep_phrase();
      return;
    }
    const Verb& verb = pick(rng_, kVerbs);
    verb_group(verb, subject);

    std::vector<Frame> frames;
    for (Frame f : {Trans, Intrans, Comp, Ling, ToInf})
      if (verb.frames & f) frames.push_back(f);
    switch (frames[uniform_index(rng_, frames.size())]) {
    case Trans: nominal(Case::Object); break;
    case Intrans: break;
    case Comp:
      if (depth < 1) {
        if (chance(0.6)) emit("that", "IN");
        clause(depth + 1);
        return;
      }
      nominal(Case::Object);
      break;
    case Ling: adjective_phrase(); break;
    case ToInf: {
      emit("to", "TO");
      const Verb* inner = &pick(rng_, kVerbs);
      while (!(inner->frames & Trans)) inner = &pick(rng_, kVerbs);
      emit(inner->base, "VB");
      nominal(Case::Object);
      break;
    }
    }
    if (chance(p_.prep_phrase)) prep_phrase();
    if (chance(p_.adverb * 0.5)) emit(pick(rng_, kFinalAdverbs), "RB");
  }

  const GroupProfile& p_;
  std::mt19937_64& rng_;
  TrainingSentence out_;
};

void validate(const GroupProfile& p, std::string_view who) {
  auto in_unit = [&](double v, std::string_view name) {
    if (!(v >= 0.0 && v <= 1.0))
      throw Error("synth: " + std::string(who) + " " + std::string(name) + " must lie in [0, 1]");
  };
  in_unit(p.first_singular, "first_singular");
  in_unit(p.first_plural, "first_plural");
  in_unit(p.other_pronoun, "other_pronoun");
  in_unit(p.proper_noun, "proper_noun");
  in_unit(p.adjective, "adjective");
  in_unit(p.adverb, "adverb");
  in_unit(p.prep_phrase, "prep_phrase");
  in_unit(p.interjection, "interjection");
  in_unit(p.article, "article");
  if (p.first_singular + p.first_plural + p.other_pronoun + p.proper_noun > 1.0 + 1e-12)
    throw Error("synth: " + std::string(who) + " nominal-slot rates sum above 1");
  double sum = 0;
  for (double t : p.tense_mix) {
    in_unit(t, "tense_mix entry");
    sum += t;
  }
  if (std::fabs(sum - 1.0) > 1e-9) throw Error("synth: " + std::string(who) + " tense_mix must sum to 1");
}

nlohmann::ordered_json profile_json(const GroupProfile& p) {
  return {{"first_singular", p.first_singular},
          {"first_plural", p.first_plural},
          {"other_pronoun", p.other_pronoun},
          {"proper_noun", p.proper_noun},
          {"tense_past", p.tense_mix[0]},
          {"tense_present", p.tense_mix[1]},
          {"tense_future", p.tense_mix[2]},
          {"adjective", p.adjective},
          {"adverb", p.adverb},
          {"prep_phrase", p.prep_phrase},
          {"interjection", p.interjection},
          {"article", p.article}};
}

nlohmann::ordered_json realized_json(const std::vector<std::vector<TrainingSentence>>& posts) {
  std::size_t tokens = 0, first_singular = 0, pronouns = 0, proper = 0;
  for (const auto& post : posts)
    for (const auto& s : post)
      for (const auto& t : s) {
        ++tokens;
        if (t.ptb == "NNP" || t.ptb == "NNPS") ++proper;
        if (t.ptb == "PRP" || t.ptb == "PRP$") {
          ++pronouns;
          auto m = pronoun_morph(t.form, t.ptb);
          if (m && m->person == Person::First && m->number == Number::Singular) ++first_singular;
        }
      }
  auto share = [&](std::size_t c) { return tokens ? static_cast<double>(c) / static_cast<double>(tokens) : 0.0; };
  return {{"tokens", tokens},
          {"first_singular_token_share", share(first_singular)},
          {"personal_pronoun_token_share", share(pronouns)},
          {"proper_noun_token_share", share(proper)}};
}

} // namespace

// ---------------------------------------------------------------------------

SynthConfig default_synth_config() {
  SynthConfig c;
  c.target.first_singular = 0.15;
  c.target.first_plural = 0.02;
  c.target.proper_noun = 0.02;
  c.target.tense_mix = {0.38, 0.47, 0.15};
  c.target.adjective = 0.30;
  c.target.adverb = 0.25;
  c.target.prep_phrase = 0.35;
  c.target.interjection = 0.06;
  c.target.article = 0.65;

  c.control.first_singular = 0.08;
  c.control.first_plural = 0.04;
  c.control.proper_noun = 0.06;
  return c;
}

SynthConfig zero_separation(SynthConfig config) {
  config.target = config.control;
  return config;
}

SynthResult synth_corpus(const SynthConfig& config) {
  validate(config.target, "target");
  validate(config.control, "control");
  if (config.users_per_group == 0 && config.posts_per_group > 0)
    throw Error("synth: users_per_group must be positive");
  if (config.sentences_per_post == 0) throw Error("synth: sentences_per_post must be positive");

  SynthResult result;
  std::mt19937_64 rng(config.seed);
  nlohmann::ordered_json realized;
  for (Label label : {Label::Target, Label::Control}) {
    const GroupProfile& profile = label == Label::Target ? config.target : config.control;
    std::vector<std::vector<TrainingSentence>> group;
    for (std::size_t i = 0; i < config.posts_per_group; ++i) {
      const std::size_t lo = std::max<std::size_t>(1, config.sentences_per_post * 3 / 4);
      const std::size_t n = lo + uniform_index(rng, config.sentences_per_post / 2 + 1);
      std::vector<TrainingSentence> post;
      std::string text;
      for (std::size_t s = 0; s < n; ++s) {
        post.push_back(SentenceBuilder(profile, rng).sentence());
        std::vector<std::string> forms;
        for (const auto& t : post.back()) forms.push_back(t.form);
        if (!text.empty()) text += ' ';
        text += detokenize(forms);
      }
      Document doc;
      char user[64];
      std::snprintf(user, sizeof user, "%s_u%04zu", std::string(label_name(label)).c_str(),
                    i % config.users_per_group);
      doc.user_id = user;
      doc.label = label;
      doc.body = std::move(text);
      result.corpus.add(std::move(doc));
      group.push_back(std::move(post));
    }
    realized[std::string(label_name(label))] = realized_json(group);
    std::move(group.begin(), group.end(), std::back_inserter(result.gold));
  }

  nlohmann::ordered_json manifest;
  manifest["generator"] = "posmark synth";
  manifest["seed"] = config.seed;
  manifest["posts_per_group"] = config.posts_per_group;
  manifest["users_per_group"] = config.users_per_group;
  manifest["sentences_per_post"] = config.sentences_per_post;
  manifest["rate_semantics"] =
      "pronoun and proper-noun rates are probabilities per noun-phrase slot; tense_mix is per finite "
      "verb group; adjective per common noun phrase; adverb per verb phrase; prep_phrase per clause; "
      "interjection per sentence; article per determiner";
  const auto target = profile_json(config.target);
  const auto control = profile_json(config.control);
  manifest["profiles"] = {{"target", target}, {"control", control}};
  nlohmann::ordered_json deltas;
  for (auto it = target.begin(); it != target.end(); ++it)
    deltas[it.key()] = it.value().get<double>() - control[it.key()].get<double>();
  manifest["planted_deltas"] = deltas;
  manifest["realized"] = realized;
  result.manifest_json = manifest.dump(2) + "\n";
  return result;
}

std::vector<TrainingSentence> synth_treebank(std::size_t sentences, std::uint64_t seed) {
  const SynthConfig defaults = default_synth_config();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<TrainingSentence> out;
  out.reserve(sentences);
  for (std::size_t i = 0; i < sentences; ++i) {
    const GroupProfile& p = uniform01(rng) < 0.5 ? defaults.target : defaults.control;
    out.push_back(SentenceBuilder(p, rng).sentence());
  }
  return out;
}

std::string detokenize(std::span<const std::string> tokens) {
  static constexpr std::string_view attached[] = {".", ",", "!", "?", "n't", "'s", "'m",
                                                  "'re", "'ve", "'ll", "'d"};
  std::string out;
  for (const auto& t : tokens) {
    const bool glue = std::find(std::begin(attached), std::end(attached), t) != std::end(attached);
    if (!out.empty() && !glue) out += ' ';
    out += t;
  }
  return out;
}

std::string treebank_to_conllu(std::span<const TrainingSentence> sentences) {
  TaggedDocument doc{"treebank", Label::Control, {}};
  std::vector<std::string> forms, tags;
  for (const auto& s : sentences) {
    forms.clear();
    tags.clear();
    for (const auto& t : s) {
      forms.push_back(t.form);
      tags.push_back(t.ptb);
    }
    doc.sentences.push_back(annotate(forms, tags));
  }
  return to_conllu({doc});
}

std::vector<TrainingSentence> treebank_from_conllu(std::string_view content) {
  std::vector<TrainingSentence> out;
  std::size_t sentence_no = 0;
  for (const auto& doc : parse_conllu(content, Label::Control, "treebank")) {
    for (const auto& s : doc.sentences) {
      ++sentence_no;
      TrainingSentence sentence;
      for (const auto& t : s) {
        if (t.ptb.empty())
          throw Error("training sentence " + std::to_string(sentence_no) + " lacks XPOS tags");
        sentence.push_back({t.form, t.ptb});
      }
      out.push_back(std::move(sentence));
    }
  }
  return out;
}

} // namespace posmark
