#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "posmark/error.hpp"
#include "posmark/tagger.hpp"

namespace posmark {

/// The two corpus groups. Target holds users with a self-reported
/// diagnosis, Control holds everybody else.
enum class Label { Control = 0, Target = 1 };

inline constexpr std::array<Label, 2> kLabels = {Label::Control, Label::Target};

std::string_view label_name(Label label);
/// Case-insensitive "target"/"control"; anything else throws.
Label parse_label(std::string_view text);

struct Document {
  std::string user_id;
  Label label = Label::Control;
  std::optional<std::string> timestamp;
  std::optional<std::string> title;
  std::string body;

  /// Title and body joined by a single newline; the unit that gets tagged.
  std::string text() const;

  bool operator==(const Document&) const = default;
};

struct LabelCounts {
  std::size_t documents = 0;
  std::size_t users = 0;

  bool operator==(const LabelCounts&) const = default;
};

/// Ordered document collection. Every user belongs to exactly one group;
/// adding a document that would put a user in both groups throws.
class Corpus {
public:
  Corpus() = default;

  void add(Document doc);
  /// Appends all documents of `other`, preserving its order.
  void append(const Corpus& other);

  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const LabelCounts& counts(Label label) const {
    return counts_[static_cast<std::size_t>(label)];
  }

  bool operator==(const Corpus& other) const { return documents_ == other.documents_; }

private:
  std::vector<Document> documents_;
  std::array<LabelCounts, 2> counts_{};
  std::map<std::string, Label> users_;
};

using WarningSink = std::function<void(const std::string&)>;
/// Writes "warning: <msg>" to stderr.
void stderr_warning(const std::string& message);

Corpus load_jsonl(const std::filesystem::path& path);
void write_jsonl(const Corpus& corpus, const std::filesystem::path& path);
std::string to_jsonl(const Corpus& corpus);

/// Reads every *.xml subject file of `directory` (sorted by file name).
/// Writings without a TEXT child are skipped and reported to `warn`.
Corpus load_erisk_xml(const std::filesystem::path& directory, Label label,
                      const WarningSink& warn = stderr_warning);

/// A document whose tokens were tagged elsewhere (or by `tag`).
struct TaggedDocument {
  std::string user_id;
  Label label = Label::Control;
  std::vector<std::vector<TaggedToken>> sentences;

  std::vector<TaggedToken> tokens() const;
  std::size_t token_count() const;
};

/// Reads CoNLL-U. `# newdoc` starts a new document; `# user_id = ...` and
/// `# label = ...` comments override the defaults for the current document.
/// Tense and pronoun morphology are recomputed from the XPOS column.
std::vector<TaggedDocument> load_conllu(const std::filesystem::path& path, Label label,
                                        const std::string& user_id,
                                        const MorphologyOptions& options = {});
std::vector<TaggedDocument> parse_conllu(std::string_view content, Label label,
                                         const std::string& user_id,
                                         const MorphologyOptions& options = {});

/// Serializes documents as CoNLL-U with document metadata comments and the
/// derived morphology in the FEATS column.
std::string to_conllu(const std::vector<TaggedDocument>& documents);
void write_conllu(const std::vector<TaggedDocument>& documents,
                  const std::filesystem::path& path);

} // namespace posmark
