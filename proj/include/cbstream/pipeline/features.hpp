#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cbstream/core/types.hpp"
#include "cbstream/llm/traits.hpp"
#include "cbstream/text/lexicon.hpp"
#include "cbstream/text/nlp_features.hpp"
#include "cbstream/text/preprocess.hpp"

namespace cbstream::pipeline {

/// 1: LLM traits and NLP side features. 2: side features plus unigram counts.
enum class Scenario : int { side_only = 1, side_and_content = 2 };

std::optional<Scenario> parse_scenario(std::string_view s);

struct ExtractedPost {
  FeatureVector features;
  llm::LlmTraits traits;
  bool degraded = false;
  text::TokenizedPost tokens;
};

/// Feature names: "llm.<trait>", "nlp.<side feature>", and in scenario 2
/// "ngram.<term>". N-gram counts are sparse: absent names mean 0.
class FeatureExtractor {
 public:
  FeatureExtractor(Scenario scenario, llm::TraitExtractor& traits,
                   const text::Lexicons& lexicons = text::Lexicons::bundled());

  Scenario scenario() const { return scenario_; }

  /// Side features for every post, LLM calls batched. N-gram counts are added
  /// as well once a vocabulary is fitted.
  std::vector<ExtractedPost> extract_all(std::span<const RawPost> posts);
  ExtractedPost extract(const RawPost& post);

  /// Scenario 2 only (std::logic_error otherwise). Fits on the given posts'
  /// tokens and adds n-gram counts to them.
  void fit_vocabulary(std::span<ExtractedPost> cold_start);
  void set_vocabulary(text::NgramVocabulary vocab);
  const std::optional<text::NgramVocabulary>& vocabulary() const { return vocab_; }

  /// Every feature name this extractor can emit, sorted.
  FeatureSpace universe() const;
  static const std::vector<std::string>& side_feature_names();

 private:
  ExtractedPost assemble(const RawPost& post, const llm::TraitResult& traits) const;
  void add_ngrams(ExtractedPost& post) const;

  Scenario scenario_;
  llm::TraitExtractor& traits_;
  const text::Lexicons& lexicons_;
  std::optional<text::NgramVocabulary> vocab_;
};

}  // namespace cbstream::pipeline
