#include <algorithm>
#include <array>
#include <cctype>

#include "posmark/tagger.hpp"

namespace posmark {

namespace {

constexpr std::array<std::string_view, 6> kClitics = {"'s", "'m", "'d", "'re", "'ve", "'ll"};
constexpr std::array<std::string_view, 14> kAbbreviations = {
    "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "vs", "etc", "inc", "ltd", "co", "no"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool iequals_suffix(std::string_view s, std::string_view suffix) {
  if (s.size() < suffix.size()) return false;
  auto tail = s.substr(s.size() - suffix.size());
  return std::equal(tail.begin(), tail.end(), suffix.begin(), [](char a, char b) {
    return std::tolower(static_cast<unsigned char>(a)) == b;
  });
}

bool istarts_with(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), s.begin(), [](char a, char b) {
    return a == std::tolower(static_cast<unsigned char>(b));
  });
}

bool is_url(std::string_view s) {
  return istarts_with(s, "http://") || istarts_with(s, "https://") || istarts_with(s, "www.");
}

bool is_clitic(std::string_view s) {
  if (iequals_suffix(s, "n't") && s.size() == 3) return true;
  return std::any_of(kClitics.begin(), kClitics.end(), [&](std::string_view c) {
    return s.size() == c.size() && iequals_suffix(s, c);
  });
}

bool is_abbreviation(std::string_view core) {
  // core includes the trailing period
  std::string_view stem = core.substr(0, core.size() - 1);
  if (stem.empty()) return false;
  if (stem.find('.') != std::string_view::npos) return true; // U.S., e.g.
  std::string low(stem);
  for (auto& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), low) != kAbbreviations.end();
}

constexpr std::string_view kLeading = "([{\"'`";
constexpr std::string_view kTrailing = ".,!?;:)]}\"'";

void split_core(std::string_view core, std::vector<std::string>& out) {
  if (core.empty()) return;
  if (iequals_suffix(core, "n't") && core.size() > 3) {
    out.emplace_back(core.substr(0, core.size() - 3));
    out.emplace_back(core.substr(core.size() - 3));
    return;
  }
  for (auto clitic : kClitics) {
    if (core.size() > clitic.size() && iequals_suffix(core, clitic)) {
      out.emplace_back(core.substr(0, core.size() - clitic.size()));
      out.emplace_back(core.substr(core.size() - clitic.size()));
      return;
    }
  }
  out.emplace_back(core);
}

void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
  if (is_url(chunk)) {
    std::size_t end = chunk.size();
    while (end > 0 && std::string_view(".,!?;:)\"'").find(chunk[end - 1]) != std::string_view::npos)
      --end;
    out.emplace_back(chunk.substr(0, end));
    for (std::size_t i = end; i < chunk.size(); ++i) out.emplace_back(1, chunk[i]);
    return;
  }
  if (is_clitic(chunk)) {
    out.emplace_back(chunk);
    return;
  }

  std::size_t begin = 0;
  while (begin < chunk.size() && kLeading.find(chunk[begin]) != std::string_view::npos)
    out.emplace_back(1, chunk[begin++]);

  std::vector<std::string> trailing; // collected right to left
  std::size_t end = chunk.size();
  while (end > begin) {
    std::string_view rest = chunk.substr(begin, end - begin);
    if (rest.size() >= 3 && rest.substr(rest.size() - 3) == "...") {
      trailing.emplace_back("...");
      end -= 3;
      continue;
    }
    const char c = chunk[end - 1];
    if (kTrailing.find(c) == std::string_view::npos) break;
    if (c == '.' && is_abbreviation(rest)) break;
    trailing.emplace_back(1, c);
    --end;
  }

  split_core(chunk.substr(begin, end - begin), out);
  out.insert(out.end(), trailing.rbegin(), trailing.rend());
}

std::string normalize_apostrophes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.compare(i, 3, "\xE2\x80\x99") == 0) { // U+2019
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

bool is_terminal(std::string_view tok) {
  return tok == "." || tok == "!" || tok == "?" || tok == "...";
}

bool is_closer(std::string_view tok) {
  return tok == "\"" || tok == "'" || tok == ")" || tok == "]" || tok == "}";
}

} // namespace

std::vector<std::string> tokenize(std::string_view text) {
  const std::string normalized = normalize_apostrophes(text);
  std::string_view s = normalized;
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    if (j > i) tokenize_chunk(s.substr(i, j - i), out);
    i = j;
  }
  return out;
}

std::vector<std::vector<std::string>> split_sentences(std::span<const std::string> tokens) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> current;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    current.push_back(tokens[i]);
    if (!is_terminal(tokens[i])) continue;
    while (i + 1 < tokens.size() && (is_terminal(tokens[i + 1]) || is_closer(tokens[i + 1])))
      current.push_back(tokens[++i]);
    out.push_back(std::move(current));
    current.clear();
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

} // namespace posmark
