#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbstream/core/binary_io.hpp"
#include "cbstream/text/lexicon.hpp"
#include "cbstream/text/preprocess.hpp"

namespace cbstream::text {

struct EmotionScores {
  double anger = 0, fear = 0, happiness = 0, sadness = 0, surprise = 0;
};

struct PosRatios {
  double adjective = 0, determiner = 0, noun = 0, pronoun = 0, punctuation = 0, verb = 0;
};

struct SideFeatures {
  std::size_t difficult_words = 0;
  EmotionScores emotion;
  double flesch = 0;
  double mcalpine_eflaw = 0;
  double polarity = 0;
  PosRatios pos;
  double reading_time_s = 0;
  std::size_t word_count = 0;
};

inline constexpr double kSecondsPerCharacter = 0.01469;

// Readability primitives. A word is a whitespace-delimited chunk containing at
// least one ASCII letter; its letters (lowercased) are the word form.
std::vector<std::string> readability_words(std::string_view text);
/// Vowel-group count with silent-e adjustment; at least 1 for any word.
int syllable_count(std::string_view word);
/// Segments between runs of [.!?] that contain a word; at least 1.
std::size_t sentence_count(std::string_view text);

std::size_t word_count(std::string_view cleaned);
/// Flesch reading ease; 0 for text without words.
double flesch_score(std::string_view text);
/// (words + mini-words) / sentences, mini-words having at most 3 letters; 0 for empty text.
double mcalpine_eflaw(std::string_view text);
std::size_t difficult_word_count(std::string_view text, const Lexicons& lex = Lexicons::bundled());
EmotionScores emotion_load(std::string_view text, const Lexicons& lex = Lexicons::bundled());
double polarity(std::string_view text, const Lexicons& lex = Lexicons::bundled());
PosTag tag_word(std::string_view lower_word, const Lexicons& lex = Lexicons::bundled());
PosRatios pos_ratios(std::string_view raw_text, const Lexicons& lex = Lexicons::bundled());
double reading_time(std::string_view text);

/// Readability, POS and reading time read the raw post (they need sentence
/// punctuation); word count, emotion and polarity read the cleaned text.
SideFeatures side_features(std::string_view raw_text, const TokenizedPost& pre,
                           const Lexicons& lex = Lexicons::bundled());

/// Sparse term-index -> occurrence count. Unseen terms are absent.
using NgramCounts = std::map<std::size_t, std::size_t>;

/// Unigram vocabulary fitted once on the cold-start buffer, frozen afterwards.
class NgramVocabulary {
 public:
  static constexpr double kDefaultMinDf = 0.01;
  static constexpr double kDefaultMaxDf = 0.7;

  /// Keeps terms whose document-frequency fraction lies in [min_df, max_df].
  /// Throws std::invalid_argument("cold start required") on an empty corpus.
  static NgramVocabulary fit(std::span<const TokenizedPost> corpus, double min_df = kDefaultMinDf,
                             double max_df = kDefaultMaxDf);

  const std::vector<std::string>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  std::optional<std::size_t> index_of(std::string_view term) const;
  std::size_t fitted_on() const { return fitted_on_; }
  double min_df() const { return min_df_; }
  double max_df() const { return max_df_; }

  void save(BinaryWriter& out) const;
  static NgramVocabulary load(BinaryReader& in);

  friend bool operator==(const NgramVocabulary&, const NgramVocabulary&) = default;

 private:
  std::vector<std::string> terms_;  // lexicographic
  std::size_t fitted_on_ = 0;
  double min_df_ = kDefaultMinDf;
  double max_df_ = kDefaultMaxDf;
};

NgramCounts transform_ngrams(const TokenizedPost& post, const NgramVocabulary& vocab);

}  // namespace cbstream::text
