#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "director/eval.hpp"
#include "director/rng.hpp"
#include "director/strings.hpp"

#include "support.hpp"

using namespace director;

TEST_CASE("ttr on small hand-checked inputs") {
    CHECK(ttr({"a b a c"}) == doctest::Approx(0.75));
    CHECK(ttr({"dog dog dog"}) == doctest::Approx(1.0 / 3.0));
    CHECK(ttr({"every word here is unique"}) == doctest::Approx(1.0));
    CHECK(ttr({"first part", "second part"}) == doctest::Approx(0.75)); // part repeats
    CHECK_THROWS_WITH_AS(ttr({"", "  ...  "}), doctest::Contains("empty"), Error);
}

TEST_CASE("ttr matches a brute-force set oracle on random sequences") {
    Rng rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 1 + static_cast<int>(rng.next_below(60));
        std::string text;
        std::vector<std::string> tokens;
        for (int i = 0; i < n; ++i) {
            std::string word = testsupport::random_word(rng);
            tokens.push_back(word);
            text += word + (rng.next_below(2) ? " " : ", ");
        }
        std::set<std::string> types(tokens.begin(), tokens.end());
        double expected = static_cast<double>(types.size()) / tokens.size();
        CHECK(ttr({text}) == doctest::Approx(expected));
    }
}

TEST_CASE("ttr is invariant under token order and case") {
    CHECK(ttr({"Sun sea SAND sun"}) == ttr({"sand sun sun sea"}));
    CHECK(ttr({"Alpha Beta"}) == ttr({"beta alpha"}));
}

TEST_CASE("mean_ttr") {
    CHECK(mean_ttr({0.5, 1.0}) == doctest::Approx(0.75));
    CHECK(mean_ttr({0.42}) == doctest::Approx(0.42));
    CHECK_THROWS_AS(mean_ttr({}), Error);
}

TEST_CASE("plan-driven corpora outscore repeated-description corpora") {
    Rng rng(11);
    std::vector<double> diverse, repeated;
    for (int v = 0; v < 20; ++v) {
        diverse.push_back(ttr({testsupport::random_sentence(rng, 40)}));
        std::string one = testsupport::random_word(rng) + " scene";
        std::string echoed;
        for (int i = 0; i < 10; ++i) echoed += one + " ";
        repeated.push_back(ttr({echoed}));
    }
    CHECK(mean_ttr(diverse) > mean_ttr(repeated));
}

TEST_CASE("judge prompt carries the rubric and the script") {
    std::string prompt = build_judge_prompt("A quiet film about lakes.", {"f1.ppm"});
    CHECK(prompt.find("impartial judge tasked with evaluating") != std::string::npos);
    CHECK(prompt.find("Consistency of text and video: Rate the") != std::string::npos);
    CHECK(prompt.find("Logicality: Evaluate the logical flow") != std::string::npos);
    CHECK(prompt.find("scoring it from 1 to 5 individually on each aspect") !=
          std::string::npos);
    CHECK(prompt.find("A quiet film about lakes.") != std::string::npos);
    CHECK(prompt.find("Frame 1: f1.ppm") != std::string::npos);
    CHECK_THROWS_AS(build_judge_prompt("", {}), Error);
}

TEST_CASE("judge prompt tolerates zero frames with a warning") {
    Warnings warnings;
    std::string prompt = build_judge_prompt("script", {}, &warnings);
    CHECK(prompt.find("(no frames provided)") != std::string::npos);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("zero frames") != std::string::npos);
}

TEST_CASE("script braces are escaped before substitution") {
    std::string prompt = build_judge_prompt("uses {braces} inside", {"f"});
    CHECK(prompt.find("\\{braces\\}") != std::string::npos);
}

TEST_CASE("parse_judge_response on the reference fixture averages 4.25") {
    JudgeScores ref;
    ref.consistency = 5;
    ref.logicality = 4;
    ref.vividness = 4;
    ref.aesthetic = 3;
    ref.overall = 4;
    ref.reasons["logicality"] = "flows well";
    std::string body = serialize_judge_scores(ref);

    JudgeScores parsed = parse_judge_response(body);
    CHECK(parsed.consistency == 5);
    CHECK(parsed.logicality == 4);
    CHECK(parsed.vividness == 4);
    CHECK(parsed.aesthetic == 3);
    CHECK(parsed.overall == 4);
    CHECK(parsed.average() == doctest::Approx(4.25)); // aesthetic excluded
    CHECK(parsed.reasons.at("logicality") == "flows well");
}

TEST_CASE("judge responses wrapped in prose and code fences still parse") {
    JudgeScores ref;
    ref.consistency = 3;
    ref.logicality = 2;
    ref.vividness = 5;
    ref.aesthetic = 1;
    ref.overall = 4;
    std::string wrapped = "Sure! Here is my evaluation:\n```json\n" +
                          serialize_judge_scores(ref) + "\n```\nHope that helps.";
    JudgeScores parsed = parse_judge_response(wrapped);
    CHECK(parsed.vividness == 5);
    CHECK(parsed.average() == doctest::Approx((3 + 2 + 5 + 4) / 4.0));
}

TEST_CASE("out-of-range and missing aspects are named in errors") {
    std::string bad =
        "{\"consistency of text and video\": {\"score\": \"4\"},"
        " \"logicality\": {\"score\": \"4\"},"
        " \"vividness\": {\"score\": \"6\"},"
        " \"aesthetic\": {\"score\": \"3\"},"
        " \"overall\": {\"score\": \"4\"}}";
    CHECK_THROWS_WITH_AS(parse_judge_response(bad),
                         doctest::Contains("vividness out of range"), Error);

    std::string missing =
        "{\"consistency of text and video\": {\"score\": \"4\"},"
        " \"logicality\": {\"score\": \"4\"},"
        " \"aesthetic\": {\"score\": \"3\"},"
        " \"overall\": {\"score\": \"4\"}}";
    CHECK_THROWS_WITH_AS(parse_judge_response(missing),
                         doctest::Contains("vividness missing"), Error);
}

TEST_CASE("serialize/parse round-trips random scores") {
    Rng rng(55);
    for (int i = 0; i < 30; ++i) {
        JudgeScores s;
        s.consistency = 1 + static_cast<int>(rng.next_below(5));
        s.logicality = 1 + static_cast<int>(rng.next_below(5));
        s.vividness = 1 + static_cast<int>(rng.next_below(5));
        s.aesthetic = 1 + static_cast<int>(rng.next_below(5));
        s.overall = 1 + static_cast<int>(rng.next_below(5));
        JudgeScores back = parse_judge_response(serialize_judge_scores(s));
        CHECK(back.consistency == s.consistency);
        CHECK(back.logicality == s.logicality);
        CHECK(back.vividness == s.vividness);
        CHECK(back.aesthetic == s.aesthetic);
        CHECK(back.overall == s.overall);
    }
}
