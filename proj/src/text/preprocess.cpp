#include "cbstream/text/preprocess.hpp"

#include <algorithm>

namespace cbstream::text {
namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_alpha(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
// Non-ASCII bytes stand in for Unicode word characters.
bool is_word(unsigned char c) { return is_alpha(c) || is_digit(c) || c == '_' || c >= 0x80; }

// (?:(pic.|http|www|\w+)?\:(//)*)\S+  -- returns match length at `i`, 0 if none.
std::size_t url_match_at(std::string_view s, std::size_t i) {
  auto tail_after_colon = [&](std::size_t colon) -> std::size_t {
    std::size_t j = colon + 1;
    if (j >= s.size() || is_space(static_cast<unsigned char>(s[j]))) return 0;
    while (j < s.size() && !is_space(static_cast<unsigned char>(s[j]))) ++j;
    return j - i;
  };
  std::size_t k = i;
  while (k < s.size() && is_word(static_cast<unsigned char>(s[k]))) ++k;
  if (k < s.size() && s[k] == ':') {
    if (auto n = tail_after_colon(k)) return n;
  }
  if (s.substr(i, 3) == "pic" && i + 4 < s.size() && s[i + 3] != '\n' && s[i + 4] == ':') {
    if (auto n = tail_after_colon(i + 4)) return n;
  }
  return 0;
}

std::string remove_urls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (auto n = url_match_at(s, i)) {
      i += n;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

// \d+[A-Za-z]*
std::string remove_numbers(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (is_digit(static_cast<unsigned char>(s[i]))) {
      while (i < s.size() && is_digit(static_cast<unsigned char>(s[i]))) ++i;
      while (i < s.size() && is_alpha(static_cast<unsigned char>(s[i]))) ++i;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

constexpr std::string_view kEmDash = "\xE2\x80\x94";
constexpr std::string_view kEuro = "\xE2\x82\xAC";
constexpr std::string_view kPound = "\xC2\xA3";
constexpr std::string_view kDegree = "\xC2\xB0";

std::string remove_class(std::string_view s, std::string_view ascii, std::initializer_list<std::string_view> multibyte) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size();) {
    if (ascii.find(s[i]) != std::string_view::npos) {
      ++i;
      continue;
    }
    bool matched = false;
    for (auto mb : multibyte) {
      if (s.substr(i, mb.size()) == mb) {
        i += mb.size();
        matched = true;
        break;
      }
    }
    if (!matched) out.push_back(s[i++]);
  }
  return out;
}

bool has_vowel(std::string_view s) { return s.find_first_of("aeiouy") != std::string_view::npos; }
bool ends_with(std::string_view s, std::string_view suffix) { return s.ends_with(suffix); }

std::string undouble(std::string s) {
  const auto n = s.size();
  if (n >= 2 && s[n - 1] == s[n - 2] && std::string_view("aeioulsz").find(s[n - 1]) == std::string_view::npos)
    s.pop_back();
  return s;
}

std::string suffix_rule(std::string_view w) {
  const auto n = w.size();
  if (n > 4 && ends_with(w, "ies")) return std::string(w.substr(0, n - 3)) + "y";
  if (n > 4 && ends_with(w, "sses")) return std::string(w.substr(0, n - 2));
  if (n > 4 && (ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes") || ends_with(w, "zzes")))
    return std::string(w.substr(0, n - 2));
  if (n > 3 && ends_with(w, "s") && !ends_with(w, "ss") && !ends_with(w, "us") && !ends_with(w, "is"))
    return std::string(w.substr(0, n - 1));
  if (n > 4 && ends_with(w, "ied")) return std::string(w.substr(0, n - 3)) + "y";
  if (ends_with(w, "ing")) {
    auto stem = w.substr(0, n - 3);
    if (stem.size() >= 3 && has_vowel(stem)) return undouble(std::string(stem));
  }
  if (ends_with(w, "ed")) {
    auto stem = w.substr(0, n - 2);
    if (stem.size() >= 3 && has_vowel(stem)) return undouble(std::string(stem));
  }
  return std::string(w);
}

bool retained(std::string_view t) {
  return std::find(kRetainedStopWords.begin(), kRetainedStopWords.end(), t) != kRetainedStopWords.end();
}

// "no" is the one retained term short enough to fall to the length filter.
bool long_enough(std::string_view t) { return t.size() > 2 || retained(t); }

bool keep_token(std::string_view t, const Lexicons& lex) {
  return long_enough(t) && !lex.stop_words.contains(std::string(t));
}

}  // namespace

std::string clean_text(std::string_view raw) {
  std::string s = remove_urls(raw);
  s = remove_numbers(s);
  s = remove_class(s, ",|.':;-", {kEmDash});
  s = remove_class(s, "*[]=()\\$\"}{+&/", {kEuro, kPound, kDegree});

  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (is_alpha(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> tokenize_and_filter(std::string_view cleaned, const Lexicons& lex) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && is_space(static_cast<unsigned char>(cleaned[i]))) ++i;
    const auto start = i;
    while (i < cleaned.size() && !is_space(static_cast<unsigned char>(cleaned[i]))) ++i;
    auto tok = cleaned.substr(start, i - start);
    if (!tok.empty() && keep_token(tok, lex)) out.emplace_back(tok);
  }
  return out;
}

std::string lemma_of(std::string_view token, const Lexicons& lex) {
  std::string current(token);
  for (int step = 0; step < 8; ++step) {
    std::string next;
    if (auto it = lex.lemmas.find(current); it != lex.lemmas.end()) {
      next = it->second;
    } else {
      next = suffix_rule(current);
    }
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::vector<std::string> lemmatize(const std::vector<std::string>& tokens, const Lexicons& lex) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto l = lemma_of(t, lex);
    if (long_enough(l)) out.push_back(std::move(l));
  }
  return out;
}

TokenizedPost preprocess(const RawPost& post, const Lexicons& lex) {
  TokenizedPost out;
  out.post_id = post.id;
  out.cleaned_text = clean_text(post.text);
  auto lemmas = lemmatize(tokenize_and_filter(out.cleaned_text, lex), lex);
  std::erase_if(lemmas, [&](const std::string& t) { return !keep_token(t, lex); });
  out.tokens = std::move(lemmas);
  return out;
}

}  // namespace cbstream::text
