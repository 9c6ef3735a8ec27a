#pragma once

#include <array>
#include <string>
#include <string_view>

#include "cbstream/core/types.hpp"
#include "cbstream/llm/traits.hpp"

namespace cbstream::explain {

inline constexpr std::size_t kMaxExplanationChars = 500;

/// Trait names as they appear in the explanation prompt, in flag order.
inline constexpr std::array<std::string_view, 7> kPromptTraitNames = {
    "derogatory", "humiliation", "racist", "sarcasm", "sexual", "threatening", "violence"};

struct ExplanationRequest {
  Label predicted = Label::absent;
  double confidence_pct = 50.0;  // 100 * max class probability
  llm::LlmTraits traits;
  std::string raw_text;

  static ExplanationRequest from_prediction(const Prediction& p, const llm::LlmTraits& traits, std::string raw_text);
};

struct Explanation {
  std::string text;
  Timestamp generated_at{};
  bool degraded = false;
};

/// "cyberbullying" or "no-cyberbullying".
std::string_view class_phrase(Label y);

std::string build_explanation_prompt(const ExplanationRequest& req);

/// "Classified as <class> with <p>% confidence; flagged traits: <list>".
std::string fallback_explanation(const ExplanationRequest& req);

/// Cuts to at most `max_chars` code points, at the last whitespace when there
/// is one, and trims surrounding whitespace.
std::string truncate_on_word(std::string_view text, std::size_t max_chars = kMaxExplanationChars);

/// Never throws: backend failures and empty replies give the fallback text
/// with degraded = true.
Explanation generate_explanation(const ExplanationRequest& req, llm::ChatBackend& backend, int max_retries = 2);

}  // namespace cbstream::explain
