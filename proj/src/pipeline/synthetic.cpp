#include "cbstream/pipeline/synthetic.hpp"

#include <array>
#include <cctype>
#include <cstdio>
#include <string_view>

#include "cbstream/core/random.hpp"

namespace cbstream::pipeline {
namespace {

// Filler vocabulary. None of these contain a trait phrase as a substring.
constexpr std::array<std::string_view, 14> kSubjects = {
    "the weather", "my sister",  "our team",     "this recipe",   "the new phone", "my neighbor", "the concert",
    "that movie",  "the library", "our teacher", "the morning bus", "this game",   "the garden",  "my cousin"};
constexpr std::array<std::string_view, 6> kVerbs = {"was", "seems", "looked", "felt", "turned out", "is"};
constexpr std::array<std::string_view, 14> kComplements = {
    "really nice today",   "a bit late again",    "better than expected", "quite boring honestly",
    "full of surprises",   "worth the wait",      "very relaxing",        "hard to find",
    "surprisingly cheap",  "too loud for me",     "absolutely wonderful", "a little confusing",
    "exactly what we needed", "pretty average"};
constexpr std::array<std::string_view, 12> kExtras = {
    "see you tomorrow",          "anyone watching the match tonight", "happy friday everyone",
    "cannot wait for the weekend", "just finished my homework",       "coffee first",
    "the traffic is terrible",   "loved every minute",                "thanks for the help",
    "long day at work",          "what do you think",                 "new episode comes out on monday"};

// Trait phrases per base class. Sarcasm is drawn independently of the class.
constexpr std::array<std::array<std::string_view, 5>, 6> kTraitPhrases = {{
    {"idiot", "loser", "stupid", "moron", "pathetic"},
    {"nobody likes you", "you are worthless", "disgrace", "embarrassment to", "laughing stock"},
    {"go back to your country", "your kind", "inferior race", "racial slur", "dirty immigrant"},
    {"sexy", "nudes", "slut", "send pics", "hook up"},
    {"i will find you", "watch your back", "you will regret", "or else", "coming for you"},
    {"kill", "beat you up", "punch", "shoot", "stab"},
}};
constexpr std::array<std::string_view, 5> kSarcasm = {"yeah right", "oh great", "what a genius", "sure you are",
                                                      "slow clap"};
constexpr std::array<std::string_view, 4> kEndings = {".", "!", "...", "?"};

template <typename A>
std::string_view pick(Rng& rng, const A& items) {
  return items[rng.index(items.size())];
}

std::string filler_sentence(Rng& rng) {
  std::string s;
  if (rng.bernoulli(0.3)) {
    s = pick(rng, kExtras);
  } else {
    s.append(pick(rng, kSubjects)).append(" ").append(pick(rng, kVerbs)).append(" ").append(pick(rng, kComplements));
  }
  if (rng.bernoulli(0.15)) s.append(" ").append(std::to_string(1 + rng.index(99)));
  return s;
}

std::string trait_sentence(Rng& rng, std::string_view phrase) {
  switch (rng.index(3)) {
    case 0: return "you " + std::string(phrase);
    case 1: return std::string(phrase) + " " + std::string(pick(rng, kSubjects));
    default: return std::string(phrase);
  }
}

}  // namespace

std::vector<RawPost> make_synthetic_stream(const SyntheticOptions& options) {
  Rng rng(options.seed);
  std::vector<RawPost> out;
  out.reserve(options.n);
  for (std::size_t i = 0; i < options.n; ++i) {
    const Label base = rng.bernoulli(0.5) ? Label::present : Label::absent;
    std::vector<std::string> sentences;
    const auto n_filler = 1 + rng.index(3);
    for (std::uint64_t k = 0; k < n_filler; ++k) sentences.push_back(filler_sentence(rng));
    std::vector<std::string> planted;
    if (base == Label::present) {
      const auto first = rng.index(kTraitPhrases.size());
      planted.push_back(trait_sentence(rng, pick(rng, kTraitPhrases[first])));
      if (rng.bernoulli(0.4)) {
        auto second = rng.index(kTraitPhrases.size() - 1);
        if (second >= first) ++second;
        planted.push_back(trait_sentence(rng, pick(rng, kTraitPhrases[second])));
      }
    }
    if (rng.bernoulli(0.25)) planted.push_back(std::string(pick(rng, kSarcasm)));
    for (auto& p : planted) {
      const auto at = rng.index(sentences.size() + 1);
      sentences.insert(sentences.begin() + static_cast<std::ptrdiff_t>(at), std::move(p));
    }
    std::string text;
    for (auto& s : sentences) {
      if (rng.bernoulli(0.5)) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
      if (!text.empty()) text.push_back(' ');
      text.append(s).append(pick(rng, kEndings));
    }
    if (rng.bernoulli(0.05)) text.append(" https://t.co/" + std::to_string(rng.index(100000)));

    Label y = base;
    if (options.drift_at && i >= *options.drift_at) y = y == Label::present ? Label::absent : Label::present;
    if (rng.bernoulli(options.label_noise)) y = y == Label::present ? Label::absent : Label::present;

    char id[32];
    std::snprintf(id, sizeof id, "syn-%06zu", i + 1);
    out.push_back(RawPost{id, std::move(text), Timestamp{} + std::chrono::seconds(i), y});
  }
  return out;
}

}  // namespace cbstream::pipeline
