#include "cbstream/explain/explanation.hpp"

#include <chrono>
#include <cstdio>

namespace cbstream::explain {
namespace {

std::string percent(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", pct);
  return buf;
}

bool is_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

ExplanationRequest ExplanationRequest::from_prediction(const Prediction& p, const llm::LlmTraits& traits,
                                                       std::string raw_text) {
  return ExplanationRequest{p.label, 100.0 * p.proba.max(), traits, std::move(raw_text)};
}

std::string_view class_phrase(Label y) { return y == Label::present ? "cyberbullying" : "no-cyberbullying"; }

std::string build_explanation_prompt(const ExplanationRequest& req) {
  const auto flag = [&](std::size_t i) { return req.traits.flags[i] ? "1" : "0"; };
  std::string p;
  p += "Generate an explanation in less than 500 characters \n";
  p += "that indicates why this post was categorized as \n";
  p += std::string(class_phrase(req.predicted)) + " with " + percent(req.confidence_pct) + "% confidence. Note \n";
  p += "that the features used by the model that generated \n";
  p += "the prediction are: derogatory=" + std::string(flag(0)) + ", \n";
  p += "humiliation=" + std::string(flag(1)) + ",racist=" + flag(2) + ", sarcasm=" + flag(3) + ", \n";
  p += "sexual=" + std::string(flag(4)) + ",threatening=" + flag(5) + " and violence=" + flag(6) + ".\n";
  p += req.raw_text;
  return p;
}

std::string fallback_explanation(const ExplanationRequest& req) {
  std::string list;
  for (std::size_t i = 0; i < kPromptTraitNames.size(); ++i) {
    if (!req.traits.flags[i]) continue;
    if (!list.empty()) list += ", ";
    list += kPromptTraitNames[i];
  }
  if (list.empty()) list = "none";
  return "Classified as " + std::string(class_phrase(req.predicted)) + " with " + percent(req.confidence_pct) +
         "% confidence; flagged traits: " + list;
}

std::string truncate_on_word(std::string_view text, std::size_t max_chars) {
  text = trim(text);
  std::size_t chars = 0;
  std::size_t cut = text.size();
  for (std::size_t i = 0; i < text.size(); ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) continue;  // continuation byte
    if (chars == max_chars) {
      cut = i;
      break;
    }
    ++chars;
  }
  if (cut == text.size()) return std::string(text);
  auto head = text.substr(0, cut);
  if (!is_space(text[cut])) {
    const auto space = head.find_last_of(" \n\t\r");
    if (space != std::string_view::npos && space > 0) head = head.substr(0, space);
  }
  return std::string(trim(head));
}

Explanation generate_explanation(const ExplanationRequest& req, llm::ChatBackend& backend, int max_retries) {
  const auto prompt = build_explanation_prompt(req);
  Explanation e;
  e.generated_at = std::chrono::system_clock::now();
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    try {
      auto text = truncate_on_word(backend.complete(prompt));
      if (!text.empty()) {
        e.text = std::move(text);
        return e;
      }
    } catch (const std::exception&) {
      // retried below, then the fallback
    }
  }
  e.text = truncate_on_word(fallback_explanation(req));
  e.degraded = true;
  return e;
}

}  // namespace cbstream::explain
