#include <doctest.h>

#include "posmark/corpus.hpp"
#include "posmark/csv.hpp"
#include "test_util.hpp"

using namespace posmark;
using testutil::TempDir;

namespace {

void write(const std::filesystem::path& p, std::string_view s) { csv::write_file(p, s); }

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

} // namespace

TEST_SUITE("corpus") {

TEST_CASE("jsonl with two target and one control record") {
  TempDir dir;
  write(dir / "c.jsonl",
        R"({"user_id":"u1","label":"target","text":"I slept."})" "\n"
        R"({"user_id":"u1","label":"Target","text":"Again.","title":"Night","date":"2018-01-01"})" "\n"
        R"({"user_id":"u2","label":"CONTROL","text":"Nice game."})" "\n");
  const Corpus c = load_jsonl(dir / "c.jsonl");
  CHECK(c.size() == 3);
  CHECK(c.counts(Label::Target) == LabelCounts{2, 1});
  CHECK(c.counts(Label::Control) == LabelCounts{1, 1});
  CHECK(c.documents()[1].title == "Night");
  CHECK(c.documents()[1].timestamp == "2018-01-01");
  CHECK(c.documents()[1].text() == "Night\nAgain.");
  CHECK(c.documents()[0].text() == "I slept.");
}

TEST_CASE("empty jsonl file gives an empty corpus") {
  TempDir dir;
  write(dir / "e.jsonl", "");
  CHECK(load_jsonl(dir / "e.jsonl").empty());
}

TEST_CASE("unknown label is rejected by name") {
  TempDir dir;
  write(dir / "b.jsonl", R"({"user_id":"u","label":"depressed","text":"x"})" "\n");
  const auto msg = error_of([&] { load_jsonl(dir / "b.jsonl"); });
  CHECK(msg.find("unknown label") != std::string::npos);
  CHECK(msg.find("depressed") != std::string::npos);
}

TEST_CASE("malformed line is reported with its number") {
  TempDir dir;
  write(dir / "m.jsonl", R"({"user_id":"u","label":"target","text":"x"})" "\n{oops\n");
  CHECK(error_of([&] { load_jsonl(dir / "m.jsonl"); }).find("line 2") != std::string::npos);
  write(dir / "n.jsonl", R"({"user_id":"u","label":"target"})" "\n");
  CHECK(error_of([&] { load_jsonl(dir / "n.jsonl"); }).find("line 1") != std::string::npos);
}

TEST_CASE("a user cannot belong to both groups") {
  Corpus c;
  c.add({"u", Label::Target, {}, {}, "a"});
  CHECK_THROWS_AS(c.add({"u", Label::Control, {}, {}, "b"}), Error);
  CHECK_THROWS_AS(c.add({"", Label::Control, {}, {}, "b"}), Error);
}

TEST_CASE("jsonl round trip is field-for-field and deterministic") {
  Corpus c;
  c.add({"u1", Label::Target, "2018-02-03T10:00:00", "Title, \"quoted\"", "Body\nwith ünïcode"});
  c.add({"u2", Label::Control, {}, {}, ""});
  c.add({"u1", Label::Target, {}, std::string(""), "empty title"});
  TempDir dir;
  write_jsonl(c, dir / "c.jsonl");
  const Corpus back = load_jsonl(dir / "c.jsonl");
  CHECK(back == c);
  CHECK(to_jsonl(back) == to_jsonl(c));
  CHECK(back.counts(Label::Target).documents + back.counts(Label::Control).documents == back.size());
}

TEST_CASE("eRisk subject file with two writings") {
  TempDir dir;
  write(dir / "subject_1.xml",
        "<INDIVIDUAL>\n<ID> subject1 </ID>\n"
        "<WRITING><TITLE>  Hello </TITLE><DATE> 2018-01-01 </DATE><INFO>reddit post</INFO>"
        "<TEXT> I feel bad. </TEXT></WRITING>\n"
        "<WRITING><TITLE> </TITLE><DATE>2018-01-02</DATE><TEXT>Me too.</TEXT></WRITING>\n"
        "</INDIVIDUAL>\n");
  const Corpus c = load_erisk_xml(dir.path(), Label::Target);
  REQUIRE(c.size() == 2);
  CHECK(c.documents()[0].user_id == "subject1");
  CHECK(c.documents()[1].user_id == "subject1");
  CHECK(c.documents()[0].title == "Hello");
  CHECK(c.documents()[0].body == "I feel bad.");
  CHECK(c.documents()[0].timestamp == "2018-01-01");
  CHECK_FALSE(c.documents()[1].title.has_value());
  CHECK(c.counts(Label::Target) == LabelCounts{2, 1});
}

TEST_CASE("eRisk edge cases") {
  TempDir dir;
  CHECK(load_erisk_xml(dir.path(), Label::Control).empty());

  write(dir / "a.xml",
        "<INDIVIDUAL><ID>s</ID><WRITING><TITLE></TITLE><TEXT></TEXT></WRITING>"
        "<WRITING><TITLE>no text</TITLE></WRITING></INDIVIDUAL>");
  std::vector<std::string> warnings;
  const Corpus c = load_erisk_xml(dir.path(), Label::Control,
                                  [&](const std::string& w) { warnings.push_back(w); });
  REQUIRE(c.size() == 1);
  CHECK(c.documents()[0].body.empty());
  CHECK(c.documents()[0].text().empty());
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("no TEXT") != std::string::npos);

  write(dir / "b.xml", "<INDIVIDUAL><ID>t</ID><WRITING>");
  CHECK(error_of([&] { load_erisk_xml(dir.path(), Label::Control, [](const std::string&) {}); })
            .find("b.xml") != std::string::npos);
}

TEST_CASE("CoNLL-U sentence is read from its columns") {
  const auto docs = parse_conllu("1\tI\t_\tPRON\tPRP\t_\t_\t_\t_\t_\n"
                                 "2\tsleep\tsleep\tVERB\tVBP\t_\t_\t_\t_\t_\n\n",
                                 Label::Target, "u");
  REQUIRE(docs.size() == 1);
  const auto toks = docs[0].tokens();
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].upos == Upos::PRON);
  CHECK(toks[0].pron_person == Person::First);
  CHECK(toks[0].pron_number == Number::Singular);
  CHECK(toks[1].upos == Upos::VERB);
  CHECK(toks[1].tense == Tense::Present);
  CHECK(toks[1].lemma == "sleep");
  CHECK(docs[0].user_id == "u");
  CHECK(docs[0].label == Label::Target);
}

TEST_CASE("CoNLL-U documents, metadata and errors") {
  const std::string two = "# newdoc id = a\n# user_id = x\n# label = target\n"
                          "1\tHi\t_\tINTJ\tUH\t_\t_\t_\t_\t_\n\n"
                          "# newdoc id = b\n"
                          "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n"
                          "1\tdo\t_\tAUX\tVBP\t_\t_\t_\t_\t_\n"
                          "2\tn't\t_\tPART\tRB\t_\t_\t_\t_\t_\n\n";
  const auto docs = parse_conllu(two, Label::Control, "default");
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].user_id == "x");
  CHECK(docs[0].label == Label::Target);
  CHECK(docs[1].user_id == "default");
  CHECK(docs[1].label == Label::Control);
  CHECK(docs[1].token_count() == 2);

  auto bad_upos = error_of([] { parse_conllu("1\tx\t_\tNOUNX\tNN\t_\t_\t_\t_\t_\n", Label::Control, "u"); });
  CHECK(bad_upos.find("NOUNX") != std::string::npos);
  CHECK(bad_upos.find("line 1") != std::string::npos);
  auto bad_cols = error_of([] { parse_conllu("\n1\tx\tNOUN\n", Label::Control, "u"); });
  CHECK(bad_cols.find("line 2") != std::string::npos);
}

TEST_CASE("CoNLL-U write and re-read preserve tokens") {
  std::vector<TaggedDocument> docs{
      {"u1", Label::Target, {testutil::sentence({"I/PRP", "will/MD", "never/RB", "go/VB", "./."})}},
      {"u2", Label::Control, {testutil::sentence({"They/PRP", "left/VBD"}), testutil::sentence({"Ok/UH"})}}};
  const auto text = to_conllu(docs);
  CHECK(text.find("Tense=Fut") != std::string::npos);
  CHECK(text.find("Number=Sing|Person=1") != std::string::npos);
  const auto back = parse_conllu(text, Label::Control, "ignored");
  REQUIRE(back.size() == 2);
  for (std::size_t d = 0; d < 2; ++d) {
    CHECK(back[d].user_id == docs[d].user_id);
    CHECK(back[d].label == docs[d].label);
    CHECK(back[d].sentences == docs[d].sentences);
  }
  CHECK(to_conllu(back) == text);
}

} // TEST_SUITE
