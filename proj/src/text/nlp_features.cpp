#include "cbstream/text/nlp_features.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cbstream::text {
namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }
bool is_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_ascii_punct(unsigned char c) { return c > 0x20 && c < 0x7f && !is_alpha(c) && !is_digit(c); }
char lower(unsigned char c) { return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c); }
bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y'; }

// Lowercased runs of ASCII letters; the lexical unit for emotion and polarity.
std::vector<std::string> letter_runs(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : text) {
    if (is_alpha(c)) {
      cur.push_back(lower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

template <typename Map>
auto lookup_with_lemma(const Map& map, const std::string& word, const Lexicons& lex) -> decltype(map.find(word)) {
  if (auto it = map.find(word); it != map.end()) return it;
  return map.find(lemma_of(word, lex));
}

bool ends_with_any(std::string_view w, std::initializer_list<std::string_view> suffixes) {
  return std::any_of(suffixes.begin(), suffixes.end(),
                     [&](std::string_view s) { return w.size() > s.size() + 1 && w.ends_with(s); });
}

}  // namespace

std::vector<std::string> readability_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::string letters;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) {
      const auto c = static_cast<unsigned char>(text[i++]);
      if (is_alpha(c)) letters.push_back(lower(c));
    }
    if (!letters.empty()) out.push_back(std::move(letters));
  }
  return out;
}

int syllable_count(std::string_view word) {
  std::string w;
  for (unsigned char c : word)
    if (is_alpha(c)) w.push_back(lower(c));
  if (w.empty()) return 0;
  int groups = 0;
  bool in_vowel = false;
  for (char c : w) {
    const bool v = is_vowel(c);
    if (v && !in_vowel) ++groups;
    in_vowel = v;
  }
  const auto n = w.size();
  const bool consonant_le = n >= 3 && w[n - 1] == 'e' && w[n - 2] == 'l' && !is_vowel(w[n - 3]);
  if (groups > 1 && w.back() == 'e' && !consonant_le) --groups;
  return std::max(groups, 1);
}

std::size_t sentence_count(std::string_view text) {
  std::size_t sentences = 0;
  bool has_word = false;
  for (unsigned char c : text) {
    if (c == '.' || c == '!' || c == '?') {
      if (has_word) ++sentences;
      has_word = false;
    } else if (is_alpha(c)) {
      has_word = true;
    }
  }
  if (has_word) ++sentences;
  return std::max<std::size_t>(sentences, 1);
}

std::size_t word_count(std::string_view cleaned) {
  std::size_t n = 0;
  bool in_word = false;
  for (unsigned char c : cleaned) {
    const bool sp = is_space(c);
    if (!sp && !in_word) ++n;
    in_word = !sp;
  }
  return n;
}

double flesch_score(std::string_view text) {
  const auto words = readability_words(text);
  if (words.empty()) return 0.0;
  double syllables = 0;
  for (const auto& w : words) syllables += syllable_count(w);
  const double n_words = static_cast<double>(words.size());
  const double n_sentences = static_cast<double>(sentence_count(text));
  return 206.835 - 1.015 * (n_words / n_sentences) - 84.6 * (syllables / n_words);
}

double mcalpine_eflaw(std::string_view text) {
  const auto words = readability_words(text);
  if (words.empty()) return 0.0;
  const auto mini = std::count_if(words.begin(), words.end(), [](const std::string& w) { return w.size() <= 3; });
  return static_cast<double>(words.size() + static_cast<std::size_t>(mini)) /
         static_cast<double>(sentence_count(text));
}

std::size_t difficult_word_count(std::string_view text, const Lexicons& lex) {
  std::size_t n = 0;
  for (const auto& w : readability_words(text))
    if (syllable_count(w) >= 3 && !lex.easy_words.contains(w)) ++n;
  return n;
}

EmotionScores emotion_load(std::string_view text, const Lexicons& lex) {
  std::array<double, kNumEmotions> counts{};
  double total = 0;
  for (const auto& w : letter_runs(text)) {
    if (auto it = lookup_with_lemma(lex.emotions, w, lex); it != lex.emotions.end()) {
      counts[static_cast<std::size_t>(it->second)] += 1;
      total += 1;
    }
  }
  EmotionScores s;
  if (total == 0) return s;
  s.anger = counts[0] / total;
  s.fear = counts[1] / total;
  s.happiness = counts[2] / total;
  s.sadness = counts[3] / total;
  s.surprise = counts[4] / total;
  return s;
}

double polarity(std::string_view text, const Lexicons& lex) {
  double sum = 0;
  std::size_t hits = 0;
  for (const auto& w : letter_runs(text)) {
    if (auto it = lookup_with_lemma(lex.polarity, w, lex); it != lex.polarity.end()) {
      sum += it->second;
      ++hits;
    }
  }
  return hits ? std::clamp(sum / static_cast<double>(hits), -1.0, 1.0) : 0.0;
}

PosTag tag_word(std::string_view lower_word, const Lexicons& lex) {
  const std::string w(lower_word);
  if (auto it = lookup_with_lemma(lex.pos, w, lex); it != lex.pos.end()) return it->second;
  if (std::all_of(w.begin(), w.end(), [](unsigned char c) { return is_digit(c); })) return PosTag::other;
  if (ends_with_any(w, {"ly"})) return PosTag::adverb;
  if (ends_with_any(w, {"ing", "ed"})) return PosTag::verb;
  if (ends_with_any(w, {"ous", "ful", "ive", "able", "ible", "less", "ish"})) return PosTag::adjective;
  return PosTag::noun;
}

PosRatios pos_ratios(std::string_view raw_text, const Lexicons& lex) {
  std::array<double, 8> counts{};
  double total = 0;
  std::string word;
  auto flush = [&] {
    if (word.empty()) return;
    counts[static_cast<std::size_t>(tag_word(word, lex))] += 1;
    total += 1;
    word.clear();
  };
  for (unsigned char c : raw_text) {
    if (is_alpha(c) || is_digit(c) || (c == '\'' && !word.empty())) {
      word.push_back(lower(c));
    } else {
      flush();
      if (is_ascii_punct(c)) {
        counts[static_cast<std::size_t>(PosTag::punctuation)] += 1;
        total += 1;
      }
    }
  }
  flush();
  PosRatios r;
  if (total == 0) return r;
  r.adjective = counts[static_cast<std::size_t>(PosTag::adjective)] / total;
  r.determiner = counts[static_cast<std::size_t>(PosTag::determiner)] / total;
  r.noun = counts[static_cast<std::size_t>(PosTag::noun)] / total;
  r.pronoun = counts[static_cast<std::size_t>(PosTag::pronoun)] / total;
  r.punctuation = counts[static_cast<std::size_t>(PosTag::punctuation)] / total;
  r.verb = counts[static_cast<std::size_t>(PosTag::verb)] / total;
  return r;
}

double reading_time(std::string_view text) {
  std::size_t chars = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) == 0x80) continue;  // UTF-8 continuation byte
    if (!is_space(c)) ++chars;
  }
  return static_cast<double>(chars) * kSecondsPerCharacter;
}

SideFeatures side_features(std::string_view raw_text, const TokenizedPost& pre, const Lexicons& lex) {
  SideFeatures f;
  f.difficult_words = difficult_word_count(raw_text, lex);
  f.emotion = emotion_load(pre.cleaned_text, lex);
  f.flesch = flesch_score(raw_text);
  f.mcalpine_eflaw = mcalpine_eflaw(raw_text);
  f.polarity = polarity(pre.cleaned_text, lex);
  f.pos = pos_ratios(raw_text, lex);
  f.reading_time_s = reading_time(raw_text);
  f.word_count = word_count(pre.cleaned_text);
  return f;
}

NgramVocabulary NgramVocabulary::fit(std::span<const TokenizedPost> corpus, double min_df, double max_df) {
  if (corpus.empty()) throw std::invalid_argument("cold start required");
  std::map<std::string, std::size_t> df;
  for (const auto& post : corpus) {
    std::set<std::string_view> seen(post.tokens.begin(), post.tokens.end());
    for (auto t : seen) ++df[std::string(t)];
  }
  const double n = static_cast<double>(corpus.size());
  NgramVocabulary v;
  v.fitted_on_ = corpus.size();
  v.min_df_ = min_df;
  v.max_df_ = max_df;
  for (const auto& [term, count] : df) {
    const double c = static_cast<double>(count);
    if (c >= min_df * n && c <= max_df * n) v.terms_.push_back(term);
  }
  return v;
}

std::optional<std::size_t> NgramVocabulary::index_of(std::string_view term) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term);
  if (it == terms_.end() || *it != term) return std::nullopt;
  return static_cast<std::size_t>(it - terms_.begin());
}

void NgramVocabulary::save(BinaryWriter& out) const {
  out.u64(fitted_on_);
  out.f64(min_df_);
  out.f64(max_df_);
  out.u64(terms_.size());
  for (const auto& t : terms_) out.str(t);
}

NgramVocabulary NgramVocabulary::load(BinaryReader& in) {
  NgramVocabulary v;
  v.fitted_on_ = in.u64();
  v.min_df_ = in.f64();
  v.max_df_ = in.f64();
  const auto n = in.u64();
  v.terms_.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) v.terms_.push_back(in.str());
  return v;
}

NgramCounts transform_ngrams(const TokenizedPost& post, const NgramVocabulary& vocab) {
  NgramCounts counts;
  for (const auto& t : post.tokens)
    if (auto k = vocab.index_of(t)) ++counts[*k];
  return counts;
}

}  // namespace cbstream::text
