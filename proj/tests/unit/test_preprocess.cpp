#include <doctest.h>

#include <json.hpp>

#include "cbstream/core/random.hpp"
#include "cbstream/text/preprocess.hpp"
#include "support.hpp"

using namespace cbstream;
using namespace cbstream::text;

namespace {

RawPost post(std::string text) {
  RawPost p;
  p.id = "t";
  p.text = std::move(text);
  return p;
}

std::string random_text(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "hello", "World", "the", "no", "dogs", "running", "a", "I", " ", "  ", "\t", "\n", ",", ".", "!!", "?", "'",
      "-", ":", ";", "|", "*", "[", "]", "(", ")", "{", "}", "=", "+", "&", "/", "\\", "$", "\"", "#", "@", "%",
      "42", "3dogs", "7pm", "https://t.co/x", "www:abc", "pic.twitter", "time:now", "\xE2\x80\x94", "\xE2\x82\xAC",
      "\xC2\xA3", "\xC2\xB0", "caf\xC3\xA9", "\xF0\x9F\x98\x82", "studies", "having", "HATED", "_x_", "nothing"};
  std::string s;
  const auto n = rng.index(20);
  for (std::uint64_t i = 0; i < n; ++i) s += pieces[rng.index(pieces.size())];
  return s;
}

}  // namespace

TEST_SUITE("preprocess") {
  TEST_CASE("golden fixture") {
    const auto fixture = nlohmann::json::parse(testsupport::read_file(testsupport::source_path("tests/data/preprocess_golden.json")));
    REQUIRE(fixture.size() == 30);
    for (const auto& c : fixture) {
      const auto raw = c["raw"].get<std::string>();
      CAPTURE(raw);
      const auto out = preprocess(post(raw));
      CHECK(out.cleaned_text == c["cleaned"].get<std::string>());
      CHECK(out.tokens == c["tokens"].get<std::vector<std::string>>());
    }
  }

  TEST_CASE("clean_text examples") {
    CHECK(clean_text("") == "");
    CHECK(clean_text("Check https://t.co/abc NOW!!") == "check now");
    CHECK(clean_text("I saw 3dogs, really...") == "i saw really");
  }

  TEST_CASE("tokenize_and_filter examples") {
    CHECK(tokenize_and_filter("the cat is no good") == std::vector<std::string>{"cat", "no", "good"});
    CHECK(tokenize_and_filter("").empty());
    CHECK(tokenize_and_filter("a bb ccc") == std::vector<std::string>{"ccc"});
  }

  TEST_CASE("retained stop words survive") {
    for (auto w : kRetainedStopWords) CHECK(tokenize_and_filter(w) == std::vector<std::string>{std::string(w)});
    CHECK(tokenize_and_filter("not nor") .empty());
  }

  TEST_CASE("lemmatize examples") {
    CHECK(lemmatize({"dogs"}) == std::vector<std::string>{"dog"});
    CHECK(lemmatize({"dog"}) == std::vector<std::string>{"dog"});
    CHECK(lemmatize({}).empty());
    CHECK(lemma_of("studies") == "study");
    CHECK(lemma_of("hopping") == "hop");
    CHECK(lemma_of("classes") == "class");
  }

  TEST_CASE("preprocess examples") {
    const auto empty = preprocess(post(""));
    CHECK(empty.cleaned_text.empty());
    CHECK(empty.tokens.empty());
    CHECK(preprocess(post("Dogs!!! https://x.co/q")).tokens == std::vector<std::string>{"dog"});
    CHECK(preprocess(post("abc")).post_id == "t");
  }

  TEST_CASE("cleaning properties over random strings") {
    Rng rng(2024);
    const auto& lex = Lexicons::bundled();
    for (int i = 0; i < 2000; ++i) {
      const auto raw = random_text(rng);
      CAPTURE(raw);
      const auto cleaned = clean_text(raw);
      CHECK(clean_text(cleaned) == cleaned);
      CHECK(clean_text(raw) == cleaned);
      for (char c : cleaned) CHECK(((c >= 'a' && c <= 'z') || c == ' '));
      CHECK(cleaned.find("  ") == std::string::npos);
      if (!cleaned.empty()) {
        CHECK(cleaned.front() != ' ');
        CHECK(cleaned.back() != ' ');
      }
      for (const auto& t : preprocess(post(raw)).tokens) {
        CHECK((t.size() >= 3 || t == "no"));
        CHECK_FALSE(lex.stop_words.contains(t));
        CHECK(lemma_of(t) == t);
      }
    }
  }
}
