#ifndef CARDEX_TESTS_TEST_UTIL_HPP
#define CARDEX_TESTS_TEST_UTIL_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cardex/corpus.hpp"
#include "cardex/numtag.hpp"

namespace cardex::testutil {

/// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("cardex-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Sentence classified_sentence(const std::string& text) {
  Sentence s = make_sentence(text);
  classify_numbers(s);
  return s;
}

inline Document classified_document(const std::string& subject, const std::string& predicate,
                                    const std::string& text) {
  Document doc;
  doc.subject_id = subject;
  doc.predicate_id = predicate;
  for (const std::string& stext : split_sentences(text)) {
    doc.sentences.push_back(make_sentence(stext));
  }
  classify_document(doc);
  return doc;
}

}  // namespace cardex::testutil

#endif  // CARDEX_TESTS_TEST_UTIL_HPP
