#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "director/adapters.hpp"
#include "director/narration.hpp"
#include "director/render.hpp"
#include "director/strings.hpp"

#include "support.hpp"

using namespace director;
using nlohmann::json;

namespace {

// Serves the adapter wire protocol for the duration of a test.
class AdapterServer {
public:
    explicit AdapterServer(std::function<json(const json&)> handler)
        : handler_(std::move(handler)) {
        server_.Post("/adapter", [this](const httplib::Request& req,
                                        httplib::Response& res) {
            json request = json::parse(req.body);
            json response = handler_(request);
            res.set_content(response.dump() + "\n", "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~AdapterServer() {
        server_.stop();
        thread_.join();
    }

    std::string url() const {
        return "http://127.0.0.1:" + std::to_string(port_) + "/adapter";
    }

private:
    httplib::Server server_;
    std::function<json(const json&)> handler_;
    int port_ = 0;
    std::thread thread_;
};

} // namespace

TEST_CASE("mock captioner is deterministic and reflects image statistics") {
    MockCaptioner captioner;
    Frame dark = make_solid(16, 16, 10, 10, 10);
    Frame bright_blue = make_solid(16, 16, 40, 60, 230);
    std::string a = captioner.describe(kCaptionQuestion, dark);
    std::string b = captioner.describe(kCaptionQuestion, dark);
    CHECK(a == b);
    CHECK(a.find("dark") != std::string::npos);
    std::string c = captioner.describe(kCaptionQuestion, bright_blue);
    CHECK(c.find("azure") != std::string::npos);
    CHECK(a != c);
}

TEST_CASE("mock chat replays a fixture verbatim") {
    testsupport::TempDir tmp("chatfix");
    std::string canned = "Order: 1\nCaptions:\n1: from the fixture\n";
    {
        std::ofstream out(tmp.path() / "fixture.txt", std::ios::binary);
        out << canned;
    }
    MockChat chat(tmp.path() / "fixture.txt");
    CHECK(chat.complete("anything") == canned);
}

TEST_CASE("mock chat synthesizes a parseable plan from the prompt") {
    UserRequirements reqs;
    reqs.theme = "harbor mornings";
    std::vector<AssetDescription> descriptions = {
        {1, AssetKind::Image, {"a pier at dawn"}},
        {2, AssetKind::Image, {"gulls over the water"}},
        {3, AssetKind::Video, {"key frame 1: a ferry departing",
                               "key frame 2: wake trailing the ferry"}}};
    std::string prompt = build_prompt(reqs, descriptions);

    MockChat chat;
    DirectorPlan plan = parse_plan(chat.complete(prompt), {1, 2, 3});
    CHECK(plan.order == std::vector<int>{1, 2, 3});
    CHECK(plan.captions.at(1).find("pier") != std::string::npos);
    CHECK(plan.captions.at(3).find("ferry") != std::string::npos);
    CHECK(plan.music_name == "River Flows in You");
    CHECK(plan.warnings.empty());
}

TEST_CASE("http captioner round-trips the wire format") {
    AdapterServer server([](const json& req) {
        REQUIRE(req.contains("question"));
        REQUIRE(req.contains("image"));
        auto bytes = base64_decode(req["image"].get<std::string>());
        REQUIRE(static_cast<int>(bytes.size()) ==
                req["width"].get<int>() * req["height"].get<int>() * 3);
        return json{{"text", "a tiny test scene"}};
    });
    auto captioner = make_caption_adapter(server.url());
    std::string text = captioner->describe(kCaptionQuestion, make_solid(8, 6, 1, 2, 3));
    CHECK(text == "a tiny test scene");
}

TEST_CASE("http chat surfaces HTTP and protocol errors") {
    AdapterServer server([](const json& req) {
        std::string prompt = req["prompt"].get<std::string>();
        if (prompt == "boom") return json{{"error", "model exploded"}};
        return json{{"text", "ok: " + prompt}};
    });
    auto chat = make_chat_adapter(server.url());
    CHECK(chat->complete("hello") == "ok: hello");
    CHECK_THROWS_WITH_AS(chat->complete("boom"), doctest::Contains("model exploded"),
                         Error);

    auto unreachable = make_chat_adapter("http://127.0.0.1:1/adapter");
    CHECK_THROWS_AS(unreachable->complete("x"), Error);
}

TEST_CASE("external style round-trips frames over the wire") {
    AdapterServer server([](const json& req) {
        auto bytes = base64_decode(req["frame"].get<std::string>());
        for (auto& b : bytes) b = static_cast<unsigned char>(255 - b); // invert
        return json{{"frame", base64_encode(bytes.data(), bytes.size())}};
    });
    auto style = make_external_style(server.url());
    Frame in = make_solid(4, 4, 10, 20, 30);
    Frame out = style->apply(in);
    REQUIRE(out.width == 4);
    CHECK(out.at(0, 0)[0] == 245);
    CHECK(out.at(0, 0)[1] == 235);
    CHECK(out.at(0, 0)[2] == 225);
}

TEST_CASE("subprocess adapter exchanges one JSON line per call") {
    // A line-oriented child that answers every request with a fixed record.
    std::string cmd =
        "cmd:while read line; do echo '{\"text\": \"pong from child\"}'; done";
    auto chat = make_chat_adapter(cmd);
    CHECK(chat->complete("ping") == "pong from child");
    CHECK(chat->complete("ping again") == "pong from child");
}

TEST_CASE("subprocess adapter reports a dead child") {
    auto chat = make_chat_adapter("cmd:true"); // exits immediately
    CHECK_THROWS_AS(chat->complete("ping"), Error);
}

TEST_CASE("adapter factories parse endpoint specs") {
    CHECK(dynamic_cast<MockCaptioner*>(make_caption_adapter("mock").get()) != nullptr);
    CHECK(dynamic_cast<MockChat*>(make_chat_adapter("mock").get()) != nullptr);
}
