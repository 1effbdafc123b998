#pragma once

#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace bugtriage {

/// Lowercase alphabetic stems, in summary order.
struct TokenSequence {
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  /// Space-joined form, as sent to the sidecar embedder.
  std::string joined() const;
  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

class StopwordList {
 public:
  /// The list shipped in resources/stopwords_en.txt, compiled in.
  static const StopwordList& bundled();
  /// One word per line; blank lines and lines starting with '#' are skipped,
  /// entries are lowercased. A leading "# <name>" comment names the source.
  static StopwordList parse(std::string_view text, std::string source);
  static StopwordList load(const std::string& path);

  StopwordList() = default;
  StopwordList(std::vector<std::string> words, std::string source);

  bool contains(std::string_view word) const { return words_.count(std::string(word)) != 0; }
  const std::string& source() const noexcept { return source_; }
  std::size_t size() const noexcept { return words_.size(); }
  /// Sorted entries.
  std::vector<std::string> words() const;

 private:
  std::unordered_set<std::string> words_;
  std::string source_;
};

/// Lowers every cased character. ASCII, Latin-1, Latin Extended-A, Greek and
/// Cyrillic are folded; everything else passes through unchanged.
std::string normalize_case(std::string_view text);

/// Replaces punctuation with spaces, deletes digits, splits on whitespace.
/// Punctuation is any code point that is not a letter, digit or whitespace.
/// Tokens containing non-ASCII letters are dropped since the stemmer is
/// defined over ASCII only. Invalid UTF-8 bytes count as punctuation.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stopwords);

/// Porter (1980) stemmer, following the ANSI C reference release.
std::string stem(std::string_view token);

/// normalize_case -> tokenize -> remove_stopwords -> stem. A stem that lands
/// on a stopword (e.g. "owning" -> "own") is dropped as well.
TokenSequence preprocess(std::string_view text,
                         const StopwordList& stopwords = StopwordList::bundled());

}  // namespace bugtriage
