#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <json.hpp>

#include "posmark/corpus.hpp"
#include "posmark/csv.hpp"

namespace posmark {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

using csv::read_file;
using csv::write_file;

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> cols;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    cols.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cols;
}

std::string feats_column(const TaggedToken& t) {
  std::vector<std::string> feats;
  if (t.pron_number) feats.push_back(*t.pron_number == Number::Singular ? "Number=Sing" : "Number=Plur");
  if (t.pron_person)
    feats.push_back("Person=" + std::to_string(static_cast<int>(*t.pron_person) + 1));
  if (t.tense) feats.push_back("Tense=" + std::string(tense_name(*t.tense)));
  if (feats.empty()) return "_";
  std::string out;
  for (std::size_t i = 0; i < feats.size(); ++i) out += (i ? "|" : "") + feats[i];
  return out;
}

} // namespace

std::string_view label_name(Label label) {
  return label == Label::Target ? "target" : "control";
}

Label parse_label(std::string_view text) {
  std::string low(text);
  for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (low == "target") return Label::Target;
  if (low == "control") return Label::Control;
  throw Error("unknown label '" + std::string(text) + "'");
}

std::string Document::text() const {
  if (title && !title->empty()) return body.empty() ? *title : *title + "\n" + body;
  return body;
}

void stderr_warning(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

// ---------------------------------------------------------------------------

void Corpus::add(Document doc) {
  if (doc.user_id.empty()) throw Error("document with empty user_id");
  auto [it, inserted] = users_.try_emplace(doc.user_id, doc.label);
  if (!inserted && it->second != doc.label)
    throw Error("user '" + doc.user_id + "' appears in both groups");
  auto& c = counts_[static_cast<std::size_t>(doc.label)];
  ++c.documents;
  if (inserted) ++c.users;
  documents_.push_back(std::move(doc));
}

void Corpus::append(const Corpus& other) {
  for (const auto& d : other.documents_) add(d);
}

// ---------------------------------------------------------------------------

Corpus load_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  Corpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error&) {
      throw Error("malformed record at line " + std::to_string(lineno) + " (" + where + ")");
    }
    auto str = [&](const char* key) -> std::optional<std::string> {
      auto it = rec.find(key);
      if (it == rec.end() || it->is_null()) return std::nullopt;
      if (!it->is_string())
        throw Error("malformed record at line " + std::to_string(lineno) + ": field '" + key +
                    "' is not a string");
      return it->get<std::string>();
    };
    if (!rec.is_object()) throw Error("malformed record at line " + std::to_string(lineno));
    auto user = str("user_id");
    auto label = str("label");
    auto text = str("text");
    if (!user || !label || !text)
      throw Error("malformed record at line " + std::to_string(lineno) +
                  ": user_id, label and text are required");
    Document doc;
    doc.user_id = *user;
    doc.label = parse_label(*label);
    doc.body = *text;
    doc.title = str("title");
    doc.timestamp = str("date");
    try {
      corpus.add(std::move(doc));
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " at line " + std::to_string(lineno));
    }
  }
  return corpus;
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& d : corpus.documents()) {
    ordered_json rec;
    rec["user_id"] = d.user_id;
    rec["label"] = label_name(d.label);
    if (d.title) rec["title"] = *d.title;
    if (d.timestamp) rec["date"] = *d.timestamp;
    rec["text"] = d.body;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const Corpus& corpus, const fs::path& path) { write_file(path, to_jsonl(corpus)); }

// ---------------------------------------------------------------------------

Corpus load_erisk_xml(const fs::path& directory, Label label, const WarningSink& warn) {
  namespace pt = boost::property_tree;
  if (!fs::is_directory(directory))
    throw Error("not a directory: '" + directory.string() + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".xml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Corpus corpus;
  for (const auto& file : files) {
    pt::ptree tree;
    try {
      std::istringstream in(read_file(file));
      pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
      throw Error("unparseable XML in '" + file.string() + "': " + e.message());
    }
    const auto individual = tree.get_child_optional("INDIVIDUAL");
    if (!individual) throw Error("no INDIVIDUAL element in '" + file.string() + "'");
    const std::string user = trim(individual->get<std::string>("ID", ""));
    if (user.empty()) throw Error("no ID element in '" + file.string() + "'");
    std::size_t writing_no = 0;
    for (const auto& [name, writing] : *individual) {
      if (name != "WRITING") continue;
      ++writing_no;
      const auto text = writing.get_optional<std::string>("TEXT");
      if (!text) {
        warn("writing " + std::to_string(writing_no) + " of '" + file.string() +
             "' has no TEXT; skipped");
        continue;
      }
      Document doc;
      doc.user_id = user;
      doc.label = label;
      doc.body = trim(*text);
      if (auto title = writing.get_optional<std::string>("TITLE")) {
        auto t = trim(*title);
        if (!t.empty()) doc.title = std::move(t);
      }
      if (auto date = writing.get_optional<std::string>("DATE")) {
        auto t = trim(*date);
        if (!t.empty()) doc.timestamp = std::move(t);
      }
      corpus.add(std::move(doc));
    }
  }
  return corpus;
}

// ---------------------------------------------------------------------------

std::vector<TaggedToken> TaggedDocument::tokens() const {
  std::vector<TaggedToken> out;
  out.reserve(token_count());
  for (const auto& s : sentences) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::size_t TaggedDocument::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

std::vector<TaggedDocument> parse_conllu(std::string_view content, Label label,
                                         const std::string& user_id,
                                         const MorphologyOptions& options) {
  std::vector<TaggedDocument> docs;
  bool doc_open = false;
  std::vector<std::string> forms, ptb, lemmas;
  std::vector<Upos> upos;

  auto open_doc = [&] {
    docs.push_back(TaggedDocument{user_id, label, {}});
    doc_open = true;
  };
  auto flush_sentence = [&] {
    if (forms.empty()) return;
    if (!doc_open) open_doc();
    auto tokens = annotate(forms, ptb, upos, options);
    for (std::size_t i = 0; i < tokens.size(); ++i) tokens[i].lemma = lemmas[i];
    docs.back().sentences.push_back(std::move(tokens));
    forms.clear();
    ptb.clear();
    lemmas.clear();
    upos.clear();
  };

  std::size_t lineno = 0, pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string_view line = content.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (line.empty()) {
      flush_sentence();
      if (nl == content.size()) break;
      continue;
    }
    if (line.front() == '#') {
      const std::string comment = trim(line.substr(1));
      if (comment.rfind("newdoc", 0) == 0) {
        flush_sentence();
        open_doc();
      } else if (auto eq = comment.find('='); eq != std::string::npos) {
        const std::string key = trim(std::string_view(comment).substr(0, eq));
        const std::string value = trim(std::string_view(comment).substr(eq + 1));
        if (key == "user_id" || key == "label") {
          if (!doc_open) open_doc();
          if (key == "user_id")
            docs.back().user_id = value;
          else
            docs.back().label = parse_label(value);
        }
      }
      continue;
    }
    const auto cols = split_tabs(line);
    if (cols.size() != 10)
      throw Error("CoNLL-U line " + std::to_string(lineno) + ": expected 10 columns, found " +
                  std::to_string(cols.size()));
    if (cols[0].find_first_of("-.") != std::string::npos) continue; // multiword / empty node
    Upos u;
    try {
      u = parse_upos(cols[3]);
    } catch (const Error& e) {
      throw Error("CoNLL-U line " + std::to_string(lineno) + ": " + e.what());
    }
    forms.push_back(cols[1]);
    lemmas.push_back(cols[2] == "_" ? std::string() : cols[2]);
    upos.push_back(u);
    ptb.push_back(cols[4] == "_" ? std::string() : cols[4]);
  }
  flush_sentence();
  return docs;
}

std::vector<TaggedDocument> load_conllu(const fs::path& path, Label label,
                                        const std::string& user_id,
                                        const MorphologyOptions& options) {
  return parse_conllu(read_file(path), label, user_id, options);
}

std::string to_conllu(const std::vector<TaggedDocument>& documents) {
  std::ostringstream os;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    const auto& doc = documents[d];
    os << "# newdoc id = " << d << '\n';
    os << "# user_id = " << doc.user_id << '\n';
    os << "# label = " << label_name(doc.label) << '\n';
    for (const auto& sentence : doc.sentences) {
      for (std::size_t i = 0; i < sentence.size(); ++i) {
        const auto& t = sentence[i];
        os << i + 1 << '\t' << t.form << '\t' << (t.lemma.empty() ? "_" : t.lemma) << '\t'
           << upos_name(t.upos) << '\t' << (t.ptb.empty() ? "_" : t.ptb) << '\t'
           << feats_column(t) << "\t_\t_\t_\t_\n";
      }
      os << '\n';
    }
  }
  return os.str();
}

void write_conllu(const std::vector<TaggedDocument>& documents, const fs::path& path) {
  write_file(path, to_conllu(documents));
}

} // namespace posmark
