// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef BGMTTS_CORPUS_TEXT_H_
#define BGMTTS_CORPUS_TEXT_H_

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bgmtts::corpus {

// Lowercase, NFC, whitespace runs collapsed to one space, trimmed.
std::string NormalizeText(const std::string& utf8);

// Splits normalized UTF-8 text into code points (one string each).
std::vector<std::string> SplitCodePoints(const std::string& utf8);

// Index 0 is padding, 1 is end-of-sequence; characters follow in code point
// order.
class CharVocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kEos = 1;

  CharVocabulary();
  // Collects every character of the normalized transcripts.
  static CharVocabulary FromTranscripts(const std::vector<std::string>& transcripts);
  static CharVocabulary FromSymbols(const std::vector<std::string>& symbols);

  // Normalizes, maps each character, appends kEos. Throws DataError naming
  // every character outside the vocabulary.
  std::vector<int> Encode(const std::string& text) const;
  // Inverse of Encode up to normalization; stops at kEos, skips kPad.
  std::string Decode(const std::vector<int>& ids) const;

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  int IndexOf(const std::string& symbol) const;  // -1 if absent

  nlohmann::json ToJson() const { return symbols_; }
  static CharVocabulary FromJson(const nlohmann::json& j);

  bool operator==(const CharVocabulary& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int> index_;
};

}  // namespace bgmtts::corpus

#endif  // BGMTTS_CORPUS_TEXT_H_
