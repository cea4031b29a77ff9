#include "director/adapters.hpp"

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "director/common.hpp"
#include "director/strings.hpp"

namespace director {

using nlohmann::json;

namespace {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open fixture: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string frame_to_b64(const Frame& frame) {
    return base64_encode(frame.pixels.data(), frame.pixels.size());
}

json caption_request(const std::string& question, const Frame& image) {
    return json{{"question", question},
                {"image", frame_to_b64(image)},
                {"width", image.width},
                {"height", image.height}};
}

std::string extract_text(const json& response) {
    if (response.contains("error"))
        throw Error("adapter error: " + response["error"].get<std::string>());
    if (!response.contains("text")) throw Error("adapter response missing text field");
    return response["text"].get<std::string>();
}

Frame extract_frame(const json& response, int width, int height) {
    if (response.contains("error"))
        throw Error("adapter error: " + response["error"].get<std::string>());
    if (!response.contains("frame")) throw Error("adapter response missing frame field");
    std::vector<unsigned char> bytes = base64_decode(response["frame"].get<std::string>());
    Frame out(width, height);
    if (bytes.size() != out.pixels.size())
        throw Error("adapter returned frame of wrong size");
    std::copy(bytes.begin(), bytes.end(), out.pixels.begin());
    return out;
}

// ---------------------------------------------------------------------------
// HTTP transport

struct HttpEndpoint {
    std::string base; // scheme://host:port
    std::string path;
};

HttpEndpoint split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("invalid adapter URL: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpTransport {
public:
    explicit HttpTransport(const std::string& url) : endpoint_(split_url(url)) {}

    json roundtrip(const json& request) {
        httplib::Client client(endpoint_.base);
        client.set_connection_timeout(5, 0);
        client.set_read_timeout(120, 0);
        auto res = client.Post(endpoint_.path, request.dump() + "\n", "application/json");
        if (!res) throw Error("adapter unreachable: " + endpoint_.base + endpoint_.path);
        if (res->status != 200)
            throw Error("adapter HTTP " + std::to_string(res->status) + ": " +
                        endpoint_.base + endpoint_.path);
        return json::parse(res->body);
    }

private:
    HttpEndpoint endpoint_;
};

// ---------------------------------------------------------------------------
// Subprocess transport: a persistent child, one JSON line per call.

class SubprocessTransport {
public:
    explicit SubprocessTransport(const std::string& command) {
        int to_child[2];
        int from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0)
            throw Error("cannot create adapter pipes");
        pid_ = fork();
        if (pid_ < 0) throw Error("cannot fork adapter process");
        if (pid_ == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        write_fd_ = to_child[1];
        reader_ = fdopen(from_child[0], "r");
        if (!reader_) throw Error("cannot open adapter stdout");
    }

    ~SubprocessTransport() {
        if (write_fd_ >= 0) close(write_fd_);
        if (reader_) fclose(reader_);
        if (pid_ > 0) waitpid(pid_, nullptr, 0);
    }

    SubprocessTransport(const SubprocessTransport&) = delete;
    SubprocessTransport& operator=(const SubprocessTransport&) = delete;

    json roundtrip(const json& request) {
        std::lock_guard<std::mutex> lock(mutex_);
        std::string line = request.dump() + "\n";
        const char* data = line.data();
        std::size_t remaining = line.size();
        while (remaining > 0) {
            ssize_t n = write(write_fd_, data, remaining);
            if (n <= 0) throw Error("adapter process not accepting input");
            data += n;
            remaining -= static_cast<std::size_t>(n);
        }
        char* buf = nullptr;
        std::size_t cap = 0;
        ssize_t len = getline(&buf, &cap, reader_);
        if (len < 0) {
            free(buf);
            throw Error("adapter process closed its output");
        }
        std::string response(buf, static_cast<std::size_t>(len));
        free(buf);
        return json::parse(response);
    }

private:
    pid_t pid_ = -1;
    int write_fd_ = -1;
    FILE* reader_ = nullptr;
    std::mutex mutex_;
};

// ---------------------------------------------------------------------------
// Wire adapters

class WireCaptioner : public CaptionAdapter {
public:
    explicit WireCaptioner(const std::string& spec) {
        if (starts_with_ci(spec, "cmd:"))
            proc_ = std::make_unique<SubprocessTransport>(spec.substr(4));
        else
            http_ = std::make_unique<HttpTransport>(spec);
    }

    std::string describe(const std::string& question, const Frame& image) override {
        json req = caption_request(question, image);
        json res = http_ ? http_->roundtrip(req) : proc_->roundtrip(req);
        return extract_text(res);
    }

private:
    std::unique_ptr<HttpTransport> http_;
    std::unique_ptr<SubprocessTransport> proc_;
};

class WireChat : public ChatAdapter {
public:
    explicit WireChat(const std::string& spec) {
        if (starts_with_ci(spec, "cmd:"))
            proc_ = std::make_unique<SubprocessTransport>(spec.substr(4));
        else
            http_ = std::make_unique<HttpTransport>(spec);
    }

    std::string complete(const std::string& prompt) override {
        json req{{"prompt", prompt}};
        json res = http_ ? http_->roundtrip(req) : proc_->roundtrip(req);
        return extract_text(res);
    }

private:
    std::unique_ptr<HttpTransport> http_;
    std::unique_ptr<SubprocessTransport> proc_;
};

class WireStyle : public StyleTransform {
public:
    explicit WireStyle(const std::string& spec) {
        if (starts_with_ci(spec, "cmd:"))
            proc_ = std::make_unique<SubprocessTransport>(spec.substr(4));
        else
            http_ = std::make_unique<HttpTransport>(spec);
    }

    Frame apply(const Frame& frame) override {
        json req{{"frame", frame_to_b64(frame)}, {"width", frame.width},
                 {"height", frame.height}};
        json res = http_ ? http_->roundtrip(req) : proc_->roundtrip(req);
        return extract_frame(res, frame.width, frame.height);
    }

    std::string name() const override { return "external"; }

private:
    std::unique_ptr<HttpTransport> http_;
    std::unique_ptr<SubprocessTransport> proc_;
};

struct ImageStats {
    double mean_luma = 0.0;
    int dominant = 0; // 0=r 1=g 2=b
};

ImageStats image_stats(const Frame& image) {
    double sums[3] = {0, 0, 0};
    double luma = 0.0;
    std::size_t n = image.pixels.size() / 3;
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t* p = image.pixels.data() + i * 3;
        sums[0] += p[0];
        sums[1] += p[1];
        sums[2] += p[2];
        luma += luma601(p[0], p[1], p[2]);
    }
    ImageStats stats;
    stats.mean_luma = n ? luma / n : 0.0;
    stats.dominant = 0;
    if (sums[1] > sums[stats.dominant]) stats.dominant = 1;
    if (sums[2] > sums[stats.dominant]) stats.dominant = 2;
    return stats;
}

} // namespace

MockCaptioner::MockCaptioner(std::string text_template)
    : template_(std::move(text_template)) {}

std::string MockCaptioner::describe(const std::string&, const Frame& image) {
    ImageStats stats = image_stats(image);
    const char* tone = stats.mean_luma < 64    ? "dark"
                       : stats.mean_luma < 128 ? "dim"
                       : stats.mean_luma < 192 ? "bright"
                                               : "radiant";
    const char* hue = stats.dominant == 0 ? "crimson" : stats.dominant == 1 ? "verdant" : "azure";

    std::string out = template_;
    auto replace_all = [&out](const std::string& from, const std::string& to) {
        for (std::size_t pos = 0; (pos = out.find(from, pos)) != std::string::npos;
             pos += to.size())
            out.replace(pos, from.size(), to);
    };
    replace_all("{tone}", tone);
    replace_all("{hue}", hue);
    replace_all("{width}", std::to_string(image.width));
    replace_all("{height}", std::to_string(image.height));
    return out;
}

MockChat::MockChat(const std::filesystem::path& fixture) : canned_(read_text_file(fixture)) {}

MockChat::MockChat(std::string canned_response) : canned_(std::move(canned_response)) {}

std::string MockChat::complete(const std::string& prompt) {
    if (!canned_.empty()) return canned_;

    // Synthesize a plan from the prompt's labeled description lines.
    struct Entry {
        int id;
        std::string text;
    };
    std::vector<Entry> entries;
    for (const std::string& raw : split_lines(prompt)) {
        std::string line = trim(raw);
        bool image = starts_with_ci(line, "Image ");
        bool video = starts_with_ci(line, "Video ");
        if (!image && !video) continue;
        std::size_t pos = 6;
        std::size_t start = pos;
        while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
        if (pos == start || pos >= line.size() || line[pos] != ':') continue;
        int id = std::atoi(line.substr(start, pos - start).c_str());
        std::string text = trim(line.substr(pos + 1));
        if (video) {
            // keep only the first keyframe's text for the caption
            if (starts_with_ci(text, "key frame")) {
                auto colon = text.find(':');
                if (colon != std::string::npos) text = trim(text.substr(colon + 1));
            }
            bool seen = false;
            for (const Entry& e : entries) seen = seen || e.id == id;
            if (seen) continue;
        }
        entries.push_back({id, text});
    }

    std::ostringstream out;
    out << "Order: ";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i) out << ", ";
        out << entries[i].id;
    }
    out << "\n";
    out << "Title: A Small Story\n";
    out << "Materials: arranged as listed above\n";
    out << "Captions:\n";
    for (const Entry& e : entries) {
        out << e.id << ": Here we see " << e.text << ".\n";
    }
    out << "Closing: Until the next journey.\n";
    out << "Music Recommendation: " << music_name_ << "\n";
    return out.str();
}

std::unique_ptr<CaptionAdapter> make_caption_adapter(const std::string& spec) {
    if (spec == "mock") return std::make_unique<MockCaptioner>();
    if (starts_with_ci(spec, "mock:"))
        return std::make_unique<MockCaptioner>(spec.substr(5));
    return std::make_unique<WireCaptioner>(spec);
}

std::unique_ptr<ChatAdapter> make_chat_adapter(const std::string& spec) {
    if (spec == "mock") return std::make_unique<MockChat>();
    if (starts_with_ci(spec, "mock:"))
        return std::make_unique<MockChat>(std::filesystem::path(spec.substr(5)));
    return std::make_unique<WireChat>(spec);
}

std::unique_ptr<StyleTransform> make_external_style(const std::string& spec) {
    return std::make_unique<WireStyle>(spec);
}

} // namespace director
