#include "bugtriage/preprocess.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "bugtriage/error.hpp"
#include "text.hpp"

namespace bugtriage {

namespace detail {
extern const std::string_view kBundledStopwords;
}

std::string TokenSequence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

StopwordList::StopwordList(std::vector<std::string> words, std::string source)
    : source_(std::move(source)) {
  for (auto& w : words) {
    if (!w.empty()) words_.insert(normalize_case(w));
  }
}

StopwordList StopwordList::parse(std::string_view text, std::string source) {
  std::vector<std::string> words;
  std::istringstream in{std::string(text)};
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
      first = false;
      continue;
    }
    const auto e = line.find_last_not_of(" \t\r");
    std::string word = line.substr(b, e - b + 1);
    if (word.front() == '#') {
      if (first) {
        const auto name = word.find_first_not_of("# \t");
        if (name != std::string::npos) source = word.substr(name);
      }
    } else {
      words.push_back(std::move(word));
    }
    first = false;
  }
  return StopwordList(std::move(words), std::move(source));
}

StopwordList StopwordList::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open stopword list " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

const StopwordList& StopwordList::bundled() {
  static const StopwordList list = parse(detail::kBundledStopwords, "bundled");
  return list;
}

std::vector<std::string> StopwordList::words() const {
  std::vector<std::string> out(words_.begin(), words_.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string normalize_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t cp = detail::decode_utf8(text, pos);
    if (cp == detail::kInvalidCodePoint) {
      out.append(text.substr(start, pos - start));  // keep undecodable bytes verbatim
    } else {
      detail::append_utf8(out, detail::to_lower(cp));
    }
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  bool non_ascii = false;
  auto flush = [&] {
    if (!current.empty() && !non_ascii) tokens.push_back(std::move(current));
    current.clear();
    non_ascii = false;
  };
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char32_t cp = detail::decode_utf8(text, pos);
    switch (detail::classify(cp)) {
      case detail::CharClass::Letter:
        if (cp >= 0x80) non_ascii = true;
        detail::append_utf8(current, cp);
        break;
      case detail::CharClass::Digit:
        break;
      case detail::CharClass::Space:
      case detail::CharClass::Punctuation:
        flush();
        break;
    }
  }
  flush();
  return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const StopwordList& stopwords) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stopwords.contains(t)) out.push_back(t);
  }
  return out;
}

TokenSequence preprocess(std::string_view text, const StopwordList& stopwords) {
  TokenSequence seq;
  for (const auto& token : remove_stopwords(tokenize(normalize_case(text)), stopwords)) {
    std::string s = stem(token);
    if (!stopwords.contains(s)) seq.tokens.push_back(std::move(s));
  }
  return seq;
}

}  // namespace bugtriage
