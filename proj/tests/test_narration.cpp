#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "director/narration.hpp"
#include "director/rng.hpp"

#include "support.hpp"

using namespace director;

namespace {

class EchoCaptioner : public CaptionAdapter {
public:
    std::string describe(const std::string&, const Frame&) override {
        return "scene-" + std::to_string(++calls_);
    }
    int calls() const { return calls_; }

private:
    int calls_ = 0;
};

class FlakyCaptioner : public CaptionAdapter {
public:
    explicit FlakyCaptioner(int failing_call) : failing_(failing_call) {}
    std::string describe(const std::string& question, const Frame&) override {
        last_question = question;
        if (++calls_ == failing_) throw Error("simulated outage");
        return "scene-" + std::to_string(calls_);
    }
    std::string last_question;

private:
    int calls_ = 0;
    int failing_;
};

std::vector<MediaAsset> fixture_assets(int images, int videos) {
    std::vector<MediaAsset> assets;
    int id = 1;
    for (int i = 0; i < images; ++i) {
        MediaAsset a;
        a.id = id++;
        a.kind = AssetKind::Image;
        a.width = 64;
        a.height = 48;
        assets.push_back(a);
    }
    for (int v = 0; v < videos; ++v) {
        MediaAsset a;
        a.id = id++;
        a.kind = AssetKind::Video;
        a.width = 64;
        a.height = 48;
        a.duration = 2.0;
        a.frame_rate = 10.0;
        assets.push_back(a);
    }
    return assets;
}

FrameProvider solid_provider() {
    return [](const MediaAsset&, int) { return make_solid(16, 16, 90, 90, 90); };
}

DirectorPlan random_plan(Rng& rng, int n_assets) {
    DirectorPlan plan;
    for (int i = 1; i <= n_assets; ++i) plan.order.push_back(i);
    rng.shuffle(plan.order);
    plan.title = testsupport::random_sentence(rng, 3);
    for (int i = 1; i <= n_assets; ++i)
        plan.captions[i] = testsupport::random_sentence(rng, 4 + rng.next_below(5));
    plan.closing = testsupport::random_sentence(rng, 3);
    plan.music_name = testsupport::random_sentence(rng, 3);
    return plan;
}

} // namespace

TEST_CASE("describe_assets produces one description per image and keyframe") {
    auto assets = fixture_assets(3, 1);
    std::map<int, std::vector<VideoSegment>> segments;
    segments[4] = {{0, 9, 5}, {10, 19, 15}};

    EchoCaptioner captioner;
    Warnings warnings;
    auto descriptions =
        describe_assets(assets, segments, captioner, solid_provider(), warnings);

    REQUIRE(descriptions.size() == 4);
    CHECK(descriptions[0].lines == std::vector<std::string>{"scene-1"});
    CHECK(descriptions[3].lines.size() == 2);
    CHECK(descriptions[3].lines[0] == "key frame 1: scene-4");
    CHECK(descriptions[3].lines[1] == "key frame 2: scene-5");
    CHECK(captioner.calls() == 5);
    CHECK(warnings.empty());
}

TEST_CASE("a failing captioner yields the placeholder and one warning") {
    auto assets = fixture_assets(3, 0);
    FlakyCaptioner captioner(2);
    Warnings warnings;
    auto descriptions =
        describe_assets(assets, {}, captioner, solid_provider(), warnings);
    REQUIRE(descriptions.size() == 3);
    CHECK(descriptions[1].lines == std::vector<std::string>{kCaptionFallback});
    CHECK(warnings.size() == 1);
    CHECK(captioner.last_question == std::string(kCaptionQuestion));
}

TEST_CASE("a video without keyframes is an error") {
    auto assets = fixture_assets(0, 1);
    EchoCaptioner captioner;
    Warnings warnings;
    CHECK_THROWS_WITH_AS(
        describe_assets(assets, {}, captioner, solid_provider(), warnings),
        doctest::Contains("no keyframes"), Error);
}

TEST_CASE("build_prompt substitutes the theme and omits empty carriers") {
    UserRequirements reqs;
    reqs.theme = "trip";
    std::vector<AssetDescription> descriptions = {
        {1, AssetKind::Image, {"a lake in the middle of a forest"}}};

    std::string prompt = build_prompt(reqs, descriptions);
    CHECK(prompt.find("centered around the theme trip") != std::string::npos);
    CHECK(prompt.find("The photos and videos were taken at") == std::string::npos);
    CHECK(prompt.find("They were captured at") == std::string::npos);
    CHECK(prompt.find("I have a collection of photos and videos") != std::string::npos);

    reqs.location = "Lisbon";
    reqs.time = "summer 2019";
    std::string full = build_prompt(reqs, descriptions);
    CHECK(full.find("The photos and videos were taken at Lisbon.") != std::string::npos);
    CHECK(full.find("They were captured at summer 2019") != std::string::npos);
}

TEST_CASE("build_prompt keeps the numbered requirements block verbatim") {
    UserRequirements reqs; // all slots empty
    std::vector<AssetDescription> descriptions = {
        {1, AssetKind::Image, {"a stream running through a lush green forest"}}};
    std::string prompt = build_prompt(reqs, descriptions);
    CHECK(prompt.find("I need you to do two things") != std::string::npos);
    CHECK(prompt.find("(1) Rearrange the materials, grouping similar images together") !=
          std::string::npos);
    CHECK(prompt.find("(2) Write a script according to the adjusted material sequence") !=
          std::string::npos);
    CHECK(prompt.find("Music Recommendation: (Only provide the name of the music, "
                      "no other words)") != std::string::npos);
    // empty requirement slot: its carrier sentence is gone
    CHECK(prompt.find("meets the following requirements") == std::string::npos);
    // and the video must still be "centered around the theme"-free but intact
    CHECK(prompt.find("to create a video.") != std::string::npos);
}

TEST_CASE("build_prompt formats the input block one labeled line per entry") {
    UserRequirements reqs;
    std::vector<AssetDescription> descriptions = {
        {1, AssetKind::Image, {"a lake"}},
        {2, AssetKind::Image, {"a stream"}},
        {3, AssetKind::Video, {"key frame 1: a waterfall"}}};
    std::string prompt = build_prompt(reqs, descriptions);
    CHECK(prompt.find("Image 1: a lake\nImage 2: a stream\nVideo 3: key frame 1: a "
                      "waterfall\n") != std::string::npos);
}

TEST_CASE("build_prompt is injective over distinct descriptions") {
    UserRequirements reqs;
    Rng rng(5);
    std::set<std::string> prompts;
    for (int i = 0; i < 20; ++i) {
        std::vector<AssetDescription> descriptions = {
            {1, AssetKind::Image, {testsupport::random_sentence(rng, 6) +
                                   " " + std::to_string(i)}}};
        prompts.insert(build_prompt(reqs, descriptions));
    }
    CHECK(prompts.size() == 20);
}

TEST_CASE("plan_story passes the adapter text through and logs the exchange") {
    testsupport::TempDir tmp("planlog");
    MockChat chat(std::string("Order: 1\nCaptions:\n1: x\n"));
    std::string response = plan_story("prompt text", chat, tmp.path());
    CHECK(response == "Order: 1\nCaptions:\n1: x\n");
    CHECK(std::filesystem::exists(tmp.path() / "chat_prompt.txt"));
    CHECK(std::filesystem::exists(tmp.path() / "chat_response.txt"));
}

TEST_CASE("plan_story failure paths are fatal") {
    class DownAdapter : public ChatAdapter {
        std::string complete(const std::string&) override {
            throw Error("HTTP 500");
        }
    } down;
    CHECK_THROWS_WITH_AS(plan_story("p", down), doctest::Contains("500"), Error);

    MockChat empty_chat(std::string("   \n"));
    CHECK_THROWS_WITH_AS(plan_story("p", empty_chat), doctest::Contains("empty plan"),
                         Error);
}

TEST_CASE("parse_plan handles a well-formed response") {
    std::string response =
        "Order: 2, 1, 3, 4\n"
        "Title: Forest Journey\n"
        "Materials: Image 2, Image 1, Image 3, Video 4\n"
        "Captions:\n"
        "2: A stream winds through the woods\n"
        "1: A quiet lake at dawn\n"
        "3: The waterfall thunders down\n"
        "4: Drifting along the shore\n"
        "Closing: The forest rests.\n"
        "Music Recommendation: \"River Flows in You\"\n";
    DirectorPlan plan = parse_plan(response, {1, 2, 3, 4});
    CHECK(plan.order == std::vector<int>{2, 1, 3, 4});
    CHECK(plan.title == "Forest Journey");
    CHECK(plan.captions.at(1) == "A quiet lake at dawn");
    CHECK(plan.captions.at(4) == "Drifting along the shore");
    CHECK(plan.closing == "The forest rests.");
    CHECK(plan.music_name == "River Flows in You");
    CHECK(plan.warnings.empty());
}

TEST_CASE("parse_plan tolerates bullets, casing, and a missing Materials echo") {
    std::string response =
        "Here is my plan!\n"
        "**ORDER:** 2, 1\n"
        "- title: Two Scenes\n"
        "CAPTIONS:\n"
        "  1. first caption\n"
        "  2. second caption\n"
        "closing: Bye for now\n"
        "Music: Clair de Lune\n";
    DirectorPlan plan = parse_plan(response, {1, 2});
    CHECK(plan.order == std::vector<int>{2, 1});
    CHECK(plan.title == "Two Scenes");
    CHECK(plan.captions.at(1) == "first caption");
    CHECK(plan.captions.at(2) == "second caption");
    CHECK(plan.music_name == "Clair de Lune");
}

TEST_CASE("parse_plan repairs a duplicated and incomplete order") {
    std::string response =
        "Order: 1, 1, 3\n"
        "Title: t\n"
        "Captions:\n1: a\n2: b\n3: c\n"
        "Closing: end\n"
        "Music Recommendation: m\n";
    DirectorPlan plan = parse_plan(response, {1, 2, 3});
    CHECK(plan.order == std::vector<int>{1, 3, 2});
    CHECK(plan.warnings.size() == 1);
    CHECK(plan.warnings[0].find("order repaired") != std::string::npos);
}

TEST_CASE("parse_plan errors only when order or captions are missing outright") {
    CHECK_THROWS_WITH_AS(parse_plan("Title: x\nCaptions:\n1: a\n", {1}),
                         doctest::Contains("missing order"), Error);
    CHECK_THROWS_WITH_AS(parse_plan("Order: 1\nTitle: x\n", {1}),
                         doctest::Contains("missing captions"), Error);
}

TEST_CASE("captions for unknown assets become warnings, missing ones are filled") {
    std::string response =
        "Order: 1, 2\n"
        "Title: t\n"
        "Captions:\n1: one\n9: stray\n"
        "Closing: c\nMusic Recommendation: m\n";
    DirectorPlan plan = parse_plan(response, {1, 2});
    CHECK(plan.captions.at(1) == "one");
    CHECK(plan.captions.at(2) == "");
    bool unknown = false, missing = false;
    for (const std::string& w : plan.warnings) {
        unknown = unknown || w.find("unknown asset 9") != std::string::npos;
        missing = missing || w.find("missing caption for asset 2") != std::string::npos;
    }
    CHECK(unknown);
    CHECK(missing);
}

TEST_CASE("word-limit excursions warn but do not fail") {
    std::string response =
        "Order: 1\n"
        "Title: one two three four five six\n"
        "Captions:\n1: a\n"
        "Closing: this closing statement runs well past eight words in total\n"
        "Music Recommendation: m\n";
    DirectorPlan plan = parse_plan(response, {1});
    bool title_warn = false, closing_warn = false;
    for (const std::string& w : plan.warnings) {
        title_warn = title_warn || w.find("title exceeds") != std::string::npos;
        closing_warn = closing_warn || w.find("closing exceeds") != std::string::npos;
    }
    CHECK(title_warn);
    CHECK(closing_warn);
}

TEST_CASE("parse_plan round-trips synthesized plans") {
    Rng rng(99);
    for (int i = 0; i < 50; ++i) {
        int n = 2 + static_cast<int>(rng.next_below(9));
        DirectorPlan plan = random_plan(rng, n);
        std::vector<int> ids;
        for (int id = 1; id <= n; ++id) ids.push_back(id);
        DirectorPlan parsed = parse_plan(format_plan_response(plan), ids);
        CHECK(parsed.order == plan.order);
        CHECK(parsed.title == plan.title);
        CHECK(parsed.captions == plan.captions);
        CHECK(parsed.closing == plan.closing);
        CHECK(parsed.music_name == plan.music_name);
        CHECK(parsed.warnings.empty());
    }
}

TEST_CASE("repair always yields a true permutation under adversarial orders") {
    Rng rng(4242);
    for (int i = 0; i < 100; ++i) {
        int n = 3 + static_cast<int>(rng.next_below(8));
        DirectorPlan plan = random_plan(rng, n);

        // Corrupt the order: drop, duplicate, and inject out-of-range entries.
        std::vector<int> corrupt = plan.order;
        for (int op = 0; op < 3; ++op) {
            switch (rng.next_below(3)) {
                case 0:
                    if (corrupt.size() > 1)
                        corrupt.erase(corrupt.begin() +
                                      static_cast<long>(rng.next_below(corrupt.size())));
                    break;
                case 1:
                    corrupt.push_back(corrupt[rng.next_below(corrupt.size())]);
                    break;
                default:
                    corrupt.push_back(n + 1 + static_cast<int>(rng.next_below(90)));
                    break;
            }
        }
        plan.order = corrupt;

        std::vector<int> ids;
        for (int id = 1; id <= n; ++id) ids.push_back(id);
        DirectorPlan parsed = parse_plan(format_plan_response(plan), ids);

        std::set<int> expected(ids.begin(), ids.end());
        std::set<int> got(parsed.order.begin(), parsed.order.end());
        CHECK(parsed.order.size() == ids.size());
        CHECK(got == expected);
    }
}
