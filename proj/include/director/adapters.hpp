#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "director/frame.hpp"

namespace director {

// Adapters speak newline-delimited JSON records, one request and one response
// per call, either POSTed to a local HTTP endpoint or exchanged over a child
// process's stdin/stdout. Responses carry {"text": ...} (or {"frame": ...}
// for style) and may carry {"error": ...} instead.

class CaptionAdapter {
public:
    virtual ~CaptionAdapter() = default;
    virtual std::string describe(const std::string& question, const Frame& image) = 0;
};

class ChatAdapter {
public:
    virtual ~ChatAdapter() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

class StyleTransform {
public:
    virtual ~StyleTransform() = default;
    virtual Frame apply(const Frame& frame) = 0;
    virtual std::string name() const = 0;
};

// Deterministic in-tree captioner: fills a template from simple image
// statistics (overall tone and dominant hue).
class MockCaptioner : public CaptionAdapter {
public:
    explicit MockCaptioner(std::string text_template = "a {tone} {hue} scene");
    std::string describe(const std::string& question, const Frame& image) override;

private:
    std::string template_;
};

// Deterministic in-tree chat model. With a fixture it replays the file
// verbatim; otherwise it synthesizes a well-formed plan from the prompt's
// labeled description lines.
class MockChat : public ChatAdapter {
public:
    MockChat() = default;
    explicit MockChat(const std::filesystem::path& fixture);
    explicit MockChat(std::string canned_response);

    std::string complete(const std::string& prompt) override;

    void set_music_name(std::string name) { music_name_ = std::move(name); }

private:
    std::string canned_;
    std::string music_name_ = "River Flows in You";
};

// Endpoint specs:
//   "mock" / "mock:<fixture>"  in-tree deterministic adapters
//   "http://host:port/path"    HTTP POST of one JSON record
//   "cmd:<shell command>"      child process, one JSON line in, one out
std::unique_ptr<CaptionAdapter> make_caption_adapter(const std::string& spec);
std::unique_ptr<ChatAdapter> make_chat_adapter(const std::string& spec);
std::unique_ptr<StyleTransform> make_external_style(const std::string& spec);

} // namespace director
