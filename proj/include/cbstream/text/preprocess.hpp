#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cbstream/core/types.hpp"
#include "cbstream/text/lexicon.hpp"

namespace cbstream::text {

struct TokenizedPost {
  std::string post_id;
  std::string cleaned_text;
  std::vector<std::string> tokens;  // lemmas
};

/// URL, number, punctuation and special-character removal followed by
/// whitespace collapse, trim and lowercasing. Characters outside ASCII letters
/// and whitespace that survive the pattern cascade (emoji, '!', '?', '#', ...)
/// become separators. Output alphabet is [a-z ].
std::string clean_text(std::string_view raw);

/// Whitespace split, then drops effective stop words and tokens of length <= 2
/// other than the retained terms ("no").
std::vector<std::string> tokenize_and_filter(std::string_view cleaned, const Lexicons& lex = Lexicons::bundled());

/// Table lookup with suffix-rule fallback, iterated to a fixed point so that
/// lemma_of(lemma_of(w)) == lemma_of(w).
std::string lemma_of(std::string_view token, const Lexicons& lex = Lexicons::bundled());

/// Maps tokens to lemmas; lemmas shorter than three characters are dropped
/// unless they are retained terms.
std::vector<std::string> lemmatize(const std::vector<std::string>& tokens, const Lexicons& lex = Lexicons::bundled());

/// clean_text -> tokenize_and_filter -> lemmatize, with the stop/length filter
/// re-applied to lemmas (e.g. "having" -> "have").
TokenizedPost preprocess(const RawPost& post, const Lexicons& lex = Lexicons::bundled());

}  // namespace cbstream::text
