#include "cbstream/text/lexicon.hpp"

#include <stdexcept>
#include <string>

#include "cbstream/core/data.hpp"

namespace cbstream::text {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename F>
void for_each_line(std::string_view content, F&& f) {
  while (!content.empty()) {
    const auto nl = content.find('\n');
    auto line = content.substr(0, nl);
    content = nl == std::string_view::npos ? std::string_view{} : content.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty() || trim(line).front() == '#') continue;
    f(line);
  }
}

}  // namespace

std::string_view to_string(Emotion e) {
  switch (e) {
    case Emotion::anger: return "anger";
    case Emotion::fear: return "fear";
    case Emotion::happiness: return "happiness";
    case Emotion::sadness: return "sadness";
    case Emotion::surprise: return "surprise";
  }
  return "unknown";
}

std::optional<Emotion> parse_emotion(std::string_view s) {
  for (std::size_t i = 0; i < kNumEmotions; ++i) {
    const auto e = static_cast<Emotion>(i);
    if (to_string(e) == s) return e;
  }
  return std::nullopt;
}

std::optional<PosTag> parse_pos_tag(std::string_view s) {
  if (s == "ADJ") return PosTag::adjective;
  if (s == "DET") return PosTag::determiner;
  if (s == "NOUN") return PosTag::noun;
  if (s == "PRON") return PosTag::pronoun;
  if (s == "PUNCT") return PosTag::punctuation;
  if (s == "VERB") return PosTag::verb;
  if (s == "ADV") return PosTag::adverb;
  if (s == "OTHER") return PosTag::other;
  return std::nullopt;
}

std::vector<std::string> parse_word_list(std::string_view content) {
  std::vector<std::string> out;
  for_each_line(content, [&](std::string_view line) { out.emplace_back(trim(line)); });
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_tsv(std::string_view content) {
  std::vector<std::pair<std::string, std::string>> out;
  for_each_line(content, [&](std::string_view line) {
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw std::runtime_error("tsv line without TAB: " + std::string(line));
    out.emplace_back(std::string(trim(line.substr(0, tab))), std::string(trim(line.substr(tab + 1))));
  });
  return out;
}

Lexicons Lexicons::from_contents(std::string_view stop_words, std::string_view lemmas, std::string_view easy_words,
                                 std::string_view emotions, std::string_view polarity, std::string_view pos) {
  Lexicons lex;
  for (auto& w : parse_word_list(stop_words)) lex.stop_words.insert(std::move(w));
  for (auto keep : kRetainedStopWords) lex.stop_words.erase(std::string(keep));
  for (auto& [surface, lemma] : parse_tsv(lemmas)) lex.lemmas.emplace(std::move(surface), std::move(lemma));
  for (auto& w : parse_word_list(easy_words)) lex.easy_words.insert(std::move(w));
  for (auto& [word, cls] : parse_tsv(emotions)) {
    auto e = parse_emotion(cls);
    if (!e) throw std::runtime_error("unknown emotion class: " + cls);
    lex.emotions.emplace(std::move(word), *e);
  }
  for (auto& [word, valence] : parse_tsv(polarity)) {
    const double v = std::stod(valence);
    if (v < -1.0 || v > 1.0) throw std::runtime_error("valence out of [-1, 1] for " + word);
    lex.polarity.emplace(std::move(word), v);
  }
  for (auto& [word, tag] : parse_tsv(pos)) {
    auto t = parse_pos_tag(tag);
    if (!t) throw std::runtime_error("unknown POS tag: " + tag);
    lex.pos.emplace(std::move(word), *t);
  }
  return lex;
}

const Lexicons& Lexicons::bundled() {
  static const Lexicons lex = from_contents(
      data::bundled_file("stopwords_en.txt"), data::bundled_file("lemmas_en.tsv"),
      data::bundled_file("easy_words_en.txt"), data::bundled_file("emotion_lexicon_en.tsv"),
      data::bundled_file("polarity_lexicon_en.tsv"), data::bundled_file("pos_lexicon_en.tsv"));
  return lex;
}

}  // namespace cbstream::text
