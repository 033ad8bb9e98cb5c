#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "posmark/csv.hpp"
#include "posmark/tagger.hpp"

namespace testutil {

/// Scratch directory removed on destruction.
class TempDir {
public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("posmark_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

/// One sentence from "form/TAG" pairs, e.g. {"I/PRP", "slept/VBD"}.
inline std::vector<posmark::TaggedToken> sentence(const std::vector<std::string>& pairs,
                                                  const posmark::MorphologyOptions& opts = {}) {
  std::vector<std::string> forms, tags;
  for (const auto& p : pairs) {
    const auto slash = p.rfind('/');
    forms.push_back(p.substr(0, slash));
    tags.push_back(p.substr(slash + 1));
  }
  return posmark::annotate(forms, tags, {}, opts);
}

inline std::string slurp(const std::filesystem::path& p) { return posmark::csv::read_file(p); }

} // namespace testutil
