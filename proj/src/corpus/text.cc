// Copyright 2026 The bgmtts Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "bgmtts/corpus/text.h"

#include <set>

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "bgmtts/base/error.h"

namespace bgmtts::corpus {

namespace {

const char* kPadSymbol = "<pad>";
const char* kEosSymbol = "<eos>";

}  // namespace

std::string NormalizeText(const std::string& utf8) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(utf8);
  text.toLower(icu::Locale::getRoot());
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw DataError("ICU NFC normalizer unavailable");
  icu::UnicodeString normalized = nfc->normalize(text, status);
  if (U_FAILURE(status)) throw DataError("text normalization failed");

  icu::UnicodeString collapsed;
  bool pending_space = false;
  for (int32_t i = 0; i < normalized.length();) {
    const UChar32 c = normalized.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = collapsed.length() > 0;
      continue;
    }
    if (pending_space) collapsed.append(static_cast<UChar>(' '));
    pending_space = false;
    collapsed.append(c);
  }
  std::string out;
  collapsed.toUTF8String(out);
  return out;
}

std::vector<std::string> SplitCodePoints(const std::string& utf8) {
  const icu::UnicodeString text = icu::UnicodeString::fromUTF8(utf8);
  std::vector<std::string> out;
  for (int32_t i = 0; i < text.length();) {
    const UChar32 c = text.char32At(i);
    i += U16_LENGTH(c);
    std::string s;
    icu::UnicodeString(c).toUTF8String(s);
    out.push_back(std::move(s));
  }
  return out;
}

CharVocabulary::CharVocabulary()
    : symbols_{kPadSymbol, kEosSymbol}, index_{{kPadSymbol, kPad}, {kEosSymbol, kEos}} {}

CharVocabulary CharVocabulary::FromSymbols(const std::vector<std::string>& symbols) {
  CharVocabulary v;
  for (const auto& s : symbols) {
    if (v.index_.count(s)) throw DataError("duplicate vocabulary symbol '" + s + "'");
    v.index_[s] = static_cast<int>(v.symbols_.size());
    v.symbols_.push_back(s);
  }
  return v;
}

CharVocabulary CharVocabulary::FromTranscripts(const std::vector<std::string>& transcripts) {
  std::set<UChar32> chars;
  for (const auto& t : transcripts) {
    const icu::UnicodeString text = icu::UnicodeString::fromUTF8(NormalizeText(t));
    for (int32_t i = 0; i < text.length();) {
      const UChar32 c = text.char32At(i);
      i += U16_LENGTH(c);
      chars.insert(c);
    }
  }
  std::vector<std::string> symbols;
  for (UChar32 c : chars) {
    std::string s;
    icu::UnicodeString(c).toUTF8String(s);
    symbols.push_back(std::move(s));
  }
  return FromSymbols(symbols);
}

std::vector<int> CharVocabulary::Encode(const std::string& text) const {
  std::vector<int> ids;
  std::string unknown;
  for (const auto& ch : SplitCodePoints(NormalizeText(text))) {
    const auto it = index_.find(ch);
    if (it == index_.end() || it->second < 2) {
      if (unknown.find("'" + ch + "'") == std::string::npos)
        unknown += (unknown.empty() ? "'" : ", '") + ch + "'";
      continue;
    }
    ids.push_back(it->second);
  }
  if (!unknown.empty()) throw DataError("characters outside the vocabulary: " + unknown);
  ids.push_back(kEos);
  return ids;
}

std::string CharVocabulary::Decode(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) {
    if (id == kEos) break;
    if (id == kPad) continue;
    if (id < 0 || id >= size()) throw DataError("id outside the vocabulary");
    out += symbols_[id];
  }
  return out;
}

int CharVocabulary::IndexOf(const std::string& symbol) const {
  const auto it = index_.find(symbol);
  return it == index_.end() ? -1 : it->second;
}

CharVocabulary CharVocabulary::FromJson(const nlohmann::json& j) {
  const auto all = j.get<std::vector<std::string>>();
  if (all.size() < 2 || all[0] != kPadSymbol || all[1] != kEosSymbol)
    throw DataError("vocabulary must start with the padding and end symbols");
  return FromSymbols(std::vector<std::string>(all.begin() + 2, all.end()));
}

}  // namespace bgmtts::corpus
