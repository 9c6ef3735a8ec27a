#include "cbstream/pipeline/features.hpp"

#include <algorithm>
#include <stdexcept>

namespace cbstream::pipeline {

std::optional<Scenario> parse_scenario(std::string_view s) {
  if (s == "1") return Scenario::side_only;
  if (s == "2") return Scenario::side_and_content;
  return std::nullopt;
}

FeatureExtractor::FeatureExtractor(Scenario scenario, llm::TraitExtractor& traits, const text::Lexicons& lexicons)
    : scenario_(scenario), traits_(traits), lexicons_(lexicons) {}

const std::vector<std::string>& FeatureExtractor::side_feature_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (auto key : llm::LlmTraits::kKeys) n.push_back("llm." + std::string(key));
    for (auto s : {"difficult_words", "emotion.anger", "emotion.fear", "emotion.happiness", "emotion.sadness",
                   "emotion.surprise", "flesch", "mcalpine_eflaw", "polarity", "pos.adjective", "pos.determiner",
                   "pos.noun", "pos.pronoun", "pos.punctuation", "pos.verb", "reading_time", "word_count"})
      n.push_back("nlp." + std::string(s));
    std::sort(n.begin(), n.end());
    return n;
  }();
  return names;
}

FeatureSpace FeatureExtractor::universe() const {
  auto names = side_feature_names();
  if (vocab_)
    for (const auto& t : vocab_->terms()) names.push_back("ngram." + t);
  std::sort(names.begin(), names.end());
  return FeatureSpace(std::move(names));
}

ExtractedPost FeatureExtractor::assemble(const RawPost& post, const llm::TraitResult& traits) const {
  ExtractedPost e;
  e.traits = traits.traits;
  e.degraded = traits.degraded;
  e.tokens = text::preprocess(post, lexicons_);
  auto& f = e.features;
  for (std::size_t i = 0; i < llm::LlmTraits::kKeys.size(); ++i)
    f["llm." + std::string(llm::LlmTraits::kKeys[i])] = traits.traits.flags[i] ? 1.0 : 0.0;
  const auto side = text::side_features(post.text, e.tokens, lexicons_);
  f["nlp.difficult_words"] = static_cast<double>(side.difficult_words);
  f["nlp.emotion.anger"] = side.emotion.anger;
  f["nlp.emotion.fear"] = side.emotion.fear;
  f["nlp.emotion.happiness"] = side.emotion.happiness;
  f["nlp.emotion.sadness"] = side.emotion.sadness;
  f["nlp.emotion.surprise"] = side.emotion.surprise;
  f["nlp.flesch"] = side.flesch;
  f["nlp.mcalpine_eflaw"] = side.mcalpine_eflaw;
  f["nlp.polarity"] = side.polarity;
  f["nlp.pos.adjective"] = side.pos.adjective;
  f["nlp.pos.determiner"] = side.pos.determiner;
  f["nlp.pos.noun"] = side.pos.noun;
  f["nlp.pos.pronoun"] = side.pos.pronoun;
  f["nlp.pos.punctuation"] = side.pos.punctuation;
  f["nlp.pos.verb"] = side.pos.verb;
  f["nlp.reading_time"] = side.reading_time_s;
  f["nlp.word_count"] = static_cast<double>(side.word_count);
  if (vocab_) add_ngrams(e);
  return e;
}

void FeatureExtractor::add_ngrams(ExtractedPost& post) const {
  if (scenario_ != Scenario::side_and_content) throw std::logic_error("n-gram features are scenario 2 only");
  for (const auto& [index, count] : text::transform_ngrams(post.tokens, *vocab_))
    post.features["ngram." + vocab_->terms()[index]] = static_cast<double>(count);
}

std::vector<ExtractedPost> FeatureExtractor::extract_all(std::span<const RawPost> posts) {
  const auto traits = traits_.extract_all(posts);
  std::vector<ExtractedPost> out;
  out.reserve(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) out.push_back(assemble(posts[i], traits[i]));
  return out;
}

ExtractedPost FeatureExtractor::extract(const RawPost& post) { return assemble(post, traits_.extract(post.text)); }

void FeatureExtractor::fit_vocabulary(std::span<ExtractedPost> cold_start) {
  if (scenario_ != Scenario::side_and_content) throw std::logic_error("n-gram features are scenario 2 only");
  std::vector<text::TokenizedPost> corpus;
  corpus.reserve(cold_start.size());
  for (const auto& p : cold_start) corpus.push_back(p.tokens);
  vocab_ = text::NgramVocabulary::fit(corpus);
  for (auto& p : cold_start) add_ngrams(p);
}

void FeatureExtractor::set_vocabulary(text::NgramVocabulary vocab) {
  if (scenario_ != Scenario::side_and_content) throw std::logic_error("n-gram features are scenario 2 only");
  vocab_ = std::move(vocab);
}

}  // namespace cbstream::pipeline
