#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace cbstream::text {

enum class Emotion : std::uint8_t { anger, fear, happiness, sadness, surprise };
inline constexpr std::size_t kNumEmotions = 5;
std::string_view to_string(Emotion e);
std::optional<Emotion> parse_emotion(std::string_view s);

/// Coarse tag set of the lexicon tagger. `adverb` and `other` are tagged but
/// not reported as ratios.
enum class PosTag : std::uint8_t { adjective, determiner, noun, pronoun, punctuation, verb, adverb, other };
std::optional<PosTag> parse_pos_tag(std::string_view s);

/// Stop words from the standard English list that are kept because they carry
/// negation or intensity.
inline constexpr std::array<std::string_view, 9> kRetainedStopWords = {
    "no", "yes", "more", "but", "very", "without", "much", "little", "nothing"};

/// One entry per non-empty line; '#' starts a comment line; surrounding
/// whitespace is trimmed.
std::vector<std::string> parse_word_list(std::string_view content);
/// Two-column TAB-separated records with the same comment rules.
std::vector<std::pair<std::string, std::string>> parse_tsv(std::string_view content);

/// Word lists and tables used by preprocessing and the NLP side features.
struct Lexicons {
  std::unordered_set<std::string> stop_words;  // effective list, retained terms removed
  std::unordered_map<std::string, std::string> lemmas;
  std::unordered_set<std::string> easy_words;
  std::unordered_map<std::string, Emotion> emotions;
  std::unordered_map<std::string, double> polarity;
  std::unordered_map<std::string, PosTag> pos;

  /// Builds the lexicons from file contents in the bundled formats.
  static Lexicons from_contents(std::string_view stop_words, std::string_view lemmas, std::string_view easy_words,
                                std::string_view emotions, std::string_view polarity, std::string_view pos);

  /// The versioned snapshot compiled into the library.
  static const Lexicons& bundled();
};

}  // namespace cbstream::text
