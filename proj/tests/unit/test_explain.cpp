#include <doctest.h>

#include "cbstream/explain/explanation.hpp"
#include "cbstream/llm/traits.hpp"

using namespace cbstream;
using namespace cbstream::explain;

namespace {

class FixedBackend final : public llm::ChatBackend {
 public:
  explicit FixedBackend(std::string reply, bool fail = false) : reply_(std::move(reply)), fail_(fail) {}
  std::string complete(std::string_view) override {
    ++calls;
    if (fail_) throw llm::BackendError("down");
    return reply_;
  }
  int calls = 0;

 private:
  std::string reply_;
  bool fail_;
};

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

std::size_t code_points(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) n += (c & 0xC0) != 0x80;
  return n;
}

}  // namespace

TEST_SUITE("explain") {
  TEST_CASE("prompt substitution") {
    ExplanationRequest req;
    req.predicted = Label::absent;
    req.confidence_pct = 87.5;
    req.raw_text = "Nice game!";
    const auto p = build_explanation_prompt(req);
    CHECK(p.find("no-cyberbullying") != std::string::npos);
    CHECK(p.find("87.5") != std::string::npos);
    CHECK(count(p, "=0") == 7);
    CHECK(p.ends_with("Nice game!"));
    CHECK(build_explanation_prompt(req) == p);

    req.predicted = Label::present;
    req.traits.flags[1] = true;
    const auto q = build_explanation_prompt(req);
    CHECK(q.find("as \ncyberbullying with") != std::string::npos);
    CHECK(q.find("humiliation=1") != std::string::npos);
    CHECK(count(q, "=0") == 6);
  }

  TEST_CASE("from_prediction uses the winning probability") {
    Prediction p;
    p.label = Label::present;
    p.proba = ClassDistribution(0.054, 0.946);
    const auto req = ExplanationRequest::from_prediction(p, {}, "x");
    CHECK(req.confidence_pct == doctest::Approx(94.6));
    CHECK(req.predicted == Label::present);
  }

  TEST_CASE("fallback lists each flagged trait once") {
    ExplanationRequest req;
    req.predicted = Label::present;
    req.confidence_pct = 70;
    CHECK(fallback_explanation(req) == "Classified as cyberbullying with 70.0% confidence; flagged traits: none");
    for (std::size_t i = 0; i < 7; ++i) req.traits.flags[i] = i % 2 == 0;
    const auto text = fallback_explanation(req);
    for (std::size_t i = 0; i < 7; ++i) CHECK(count(text, std::string(kPromptTraitNames[i])) == (i % 2 == 0 ? 1u : 0u));
  }

  TEST_CASE("mock backend gives deterministic text") {
    llm::MockChatBackend mock;
    ExplanationRequest req;
    req.predicted = Label::present;
    req.confidence_pct = 91.2;
    req.traits.flags[5] = true;
    const auto a = generate_explanation(req, mock);
    const auto b = generate_explanation(req, mock);
    CHECK(a.text == b.text);
    CHECK_FALSE(a.degraded);
    CHECK(a.text.find("threatening") != std::string::npos);
  }

  TEST_CASE("failing backend falls back") {
    FixedBackend down("", true);
    ExplanationRequest req;
    req.confidence_pct = 55;
    const auto e = generate_explanation(req, down, 2);
    CHECK(e.degraded);
    CHECK(e.text == fallback_explanation(req));
    CHECK(down.calls == 3);
    FixedBackend empty("   ");
    CHECK(generate_explanation(req, empty).degraded);
  }

  TEST_CASE("long replies are cut to 500 characters") {
    std::string reply;
    while (reply.size() < 600) reply += "word ";
    FixedBackend b(reply);
    const auto e = generate_explanation({}, b);
    CHECK(e.text.size() <= kMaxExplanationChars);
    CHECK(e.text.size() >= 490);
    CHECK(e.text.back() == 'd');
    CHECK(truncate_on_word(std::string(600, 'x')).size() == 500);
    std::string accented;
    for (int i = 0; i < 300; ++i) accented += "\xC3\xA9";
    const auto cut = truncate_on_word(accented);
    CHECK(code_points(cut) == 300);
    CHECK(truncate_on_word("  short  ") == "short");
  }
}
