#include <doctest.h>

#include <algorithm>
#include <map>

#include "posmark/error.hpp"
#include "posmark/synth.hpp"
#include "posmark/tagger.hpp"
#include "test_util.hpp"

using namespace posmark;
using V = std::vector<std::string>;

namespace {

std::vector<std::string> tags_of(std::string_view spaced) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : spaced) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

TrainingSentence gold(std::initializer_list<const char*> pairs) {
  TrainingSentence s;
  for (std::string p : pairs) {
    const auto slash = p.rfind('/');
    s.push_back({p.substr(0, slash), p.substr(slash + 1)});
  }
  return s;
}

std::vector<TrainingSentence> toy_treebank() {
  return {gold({"I/PRP", "slept/VBD", "./."}),
          gold({"The/DT", "dog/NN", "slept/VBD", "./."}),
          gold({"We/PRP", "saw/VBD", "the/DT", "dog/NN", "./."}),
          gold({"I/PRP", "will/MD", "go/VB", "home/NN", "./."}),
          gold({"She/PRP", "likes/VBZ", "the/DT", "game/NN", "!/."}),
          gold({"They/PRP", "slept/VBD", "in/IN", "the/DT", "car/NN", "./."})};
}

} // namespace

TEST_SUITE("tagger") {

TEST_CASE("tokenizer examples") {
  CHECK(tokenize("I'm sad.") == V{"I", "'m", "sad", "."});
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \n\t ").empty());
  CHECK(tokenize("don't go") == V{"do", "n't", "go"});
  CHECK(tokenize("can't stop, won't stop!") == V{"ca", "n't", "stop", ",", "wo", "n't", "stop", "!"});
  CHECK(tokenize("John's dog (the big one) said \"hi\"...") ==
        V{"John", "'s", "dog", "(", "the", "big", "one", ")", "said", "\"", "hi", "\"", "..."});
  CHECK(tokenize("see https://example.com/a?b=c, now") == V{"see", "https://example.com/a?b=c", ",", "now"});
  CHECK(tokenize("Mr. Smith met Dr. Who in the U.S. today.") ==
        V{"Mr.", "Smith", "met", "Dr.", "Who", "in", "the", "U.S.", "today", "."});
  CHECK(tokenize("they\xE2\x80\x99re here") == V{"they", "'re", "here"});
  CHECK(tokenize("we'll see, you've been") == V{"we", "'ll", "see", ",", "you", "'ve", "been"});
}

TEST_CASE("sentence splitting") {
  const auto s = split_sentences(tokenize("I slept. Then I woke up!! Why? ok"));
  REQUIRE(s.size() == 4);
  CHECK(s[0] == V{"I", "slept", "."});
  CHECK(s[1] == V{"Then", "I", "woke", "up", "!", "!"});
  CHECK(s[3] == V{"ok"});
  CHECK(split_sentences(V{}).empty());
}

TEST_CASE("PTB to UPOS mapping") {
  CHECK(ptb_to_upos("NN") == Upos::NOUN);
  CHECK(ptb_to_upos("MD") == Upos::AUX);
  CHECK(ptb_to_upos("IN") == Upos::ADP);
  CHECK(ptb_to_upos("NNPS") == Upos::PROPN);
  CHECK(ptb_to_upos("PRP$") == Upos::PRON);
  CHECK(ptb_to_upos("TO") == Upos::PART);
  CHECK(ptb_to_upos("WRB") == Upos::ADV);
  CHECK(ptb_to_upos("CD") == Upos::NUM);
  CHECK(ptb_to_upos("-LRB-") == Upos::PUNCT);
  CHECK(ptb_to_upos("SYM") == Upos::SYM);
  CHECK(ptb_to_upos("XX") == Upos::X);
  CHECK_THROWS_WITH_AS(ptb_to_upos("ZZZ"), doctest::Contains("ZZZ"), Error);
  // total and pure over the tagset
  for (auto t : ptb_tagset()) {
    CHECK(is_ptb_tag(t));
    CHECK(ptb_to_upos(t) == ptb_to_upos(t));
  }
  for (std::size_t i = 0; i < kUposCount; ++i) {
    const auto u = static_cast<Upos>(i);
    CHECK(parse_upos(upos_name(u)) == u);
  }
}

TEST_CASE("tense assignment") {
  using T = std::optional<Tense>;
  CHECK(assign_tense(tags_of("PRP MD VB")) == std::vector<T>{{}, {}, Tense::Future});
  CHECK(assign_tense(tags_of("PRP VBD")) == std::vector<T>{{}, Tense::Past});
  CHECK(assign_tense(tags_of("PRP MD RB VB")) == std::vector<T>{{}, {}, {}, Tense::Future});
  CHECK(assign_tense(tags_of("PRP MD RB VB"), {true}) == std::vector<T>{{}, {}, {}, Tense::Present});
  CHECK(assign_tense(tags_of("VBN VBG VBZ VBP")) ==
        std::vector<T>{Tense::Past, Tense::Present, Tense::Present, Tense::Present});
  CHECK(assign_tense(tags_of("TO VB")) == std::vector<T>{{}, Tense::Present});
  // the modal context does not leak across a sentence boundary
  CHECK(assign_tense(tags_of("MD . VB")) == std::vector<T>{{}, {}, Tense::Present});
  // a verb between the modal and VB breaks the link
  CHECK(assign_tense(tags_of("MD VB VB")) == std::vector<T>{{}, Tense::Future, Tense::Present});
}

TEST_CASE("pronoun morphology") {
  CHECK(pronoun_morph("I", "PRP") == PronounMorph{Person::First, Number::Singular});
  CHECK(pronoun_morph("ourselves", "PRP") == PronounMorph{Person::First, Number::Plural});
  CHECK(pronoun_morph("My", "PRP$") == PronounMorph{Person::First, Number::Singular});
  CHECK(pronoun_morph("you", "PRP") == PronounMorph{Person::Second, std::nullopt});
  CHECK(pronoun_morph("themselves", "PRP") == PronounMorph{Person::Third, Number::Plural});
  CHECK_FALSE(pronoun_morph("cat", "NN"));
  CHECK_FALSE(pronoun_morph("I", "NN"));
  CHECK_FALSE(pronoun_morph("who", "WP"));
  CHECK_FALSE(pronoun_morph("someone", "PRP"));
}

TEST_CASE("annotate keeps tense on verbs and morphology on pronouns only") {
  const auto s = testutil::sentence({"I/PRP", "will/MD", "go/VB", "./."});
  CHECK(s[0].pron_person == Person::First);
  CHECK_FALSE(s[1].tense);
  CHECK(s[2].tense == Tense::Future);
  // pre-tagged UPOS that is not VERB/AUX drops the tense
  const V forms{"running", "fast"};
  const V ptb{"VBG", "RB"};
  const std::vector<Upos> upos{Upos::NOUN, Upos::ADV};
  const auto t = annotate(forms, ptb, upos);
  CHECK(t[0].upos == Upos::NOUN);
  CHECK_FALSE(t[0].tense);
  for (const auto& tok : testutil::sentence({"They/PRP", "are/VBP", "n't/RB", "here/RB"}))
    if (tok.tense) CHECK((tok.upos == Upos::VERB || tok.upos == Upos::AUX));
}

TEST_CASE("training validates its input") {
  CHECK_THROWS_AS(train_tagger(std::vector<TrainingSentence>{}, 5, 0), Error);
  CHECK_THROWS_AS(train_tagger(std::vector<TrainingSentence>{gold({"x/BOGUS"})}, 5, 0), Error);
}

TEST_CASE("zero epochs predicts the most frequent training tag") {
  const auto tb = toy_treebank();
  const auto model = train_tagger(tb, 0, 1);
  std::map<std::string, int> freq;
  for (const auto& s : tb)
    for (const auto& t : s) ++freq[t.ptb];
  const auto top = std::max_element(freq.begin(), freq.end(),
                                    [](const auto& a, const auto& b) { return a.second < b.second; });
  for (const auto& tag : model.predict(V{"I", "slept", "zebra", "."})) CHECK(tag == top->first);
}

TEST_CASE("training fits its own data and is deterministic") {
  const auto tb = synth_treebank(50, 11);
  const auto model = train_tagger(tb, 5, 3);
  CHECK(tagging_accuracy(model, tb) >= 0.99);
  CHECK(train_tagger(tb, 5, 3).serialize() == model.serialize());
  CHECK(train_tagger(tb, 5, 3) == model);
  CHECK(model.epochs() == 5);
  CHECK(model.seed() == 3);
}

TEST_CASE("model persistence round trip") {
  const auto tb = synth_treebank(200, 5);
  const auto model = train_tagger(tb, 3, 9);
  testutil::TempDir dir;
  model.save(dir / "m.model");
  const auto back = TaggerModel::load(dir / "m.model");
  CHECK(back == model);
  const V words{"I", "really", "hope", "that", "the", "zorblax", "helps", "."};
  CHECK(back.predict(words) == model.predict(words));
  CHECK_THROWS_AS(TaggerModel::deserialize("not a model\n"), Error);
}

TEST_CASE("tagging composes tagger, mapping and morphology") {
  const auto tb = toy_treebank();
  const auto model = train_tagger(tb, 5, 0);
  CHECK(tag(model, V{}).empty());
  const auto t = tag(model, V{"I", "slept"});
  REQUIRE(t.size() == 2);
  CHECK(t[0].upos == Upos::PRON);
  CHECK(t[0].pron_person == Person::First);
  CHECK(t[0].pron_number == Number::Singular);
  CHECK(t[1].upos == Upos::VERB);
  CHECK(t[1].tense == Tense::Past);

  const auto big = train_tagger(synth_treebank(2000, 1), 5, 0);
  CHECK(tag(big, V{"the"})[0].upos == Upos::DET);
  const auto words = tokenize("I will never forget my dog. She was great!");
  const auto tagged = tag(big, words);
  CHECK(tagged.size() == words.size());
  CHECK(tag(big, words) == tagged);
  const auto sents = tag_sentences(big, words);
  CHECK(sents.size() == 2);
  CHECK(tagged[3].tense == Tense::Future);
}

} // TEST_SUITE
