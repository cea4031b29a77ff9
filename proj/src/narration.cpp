#include "director/narration.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "director/strings.hpp"

namespace director {

namespace {

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

std::string describe_one(CaptionAdapter& captioner, const FrameProvider& frame_at,
                         const MediaAsset& asset, int frame_index,
                         const std::string& label, Warnings& warnings) {
    try {
        std::string text = collapse_whitespace(
            captioner.describe(kCaptionQuestion, frame_at(asset, frame_index)));
        if (text.empty()) throw Error("empty caption");
        return text;
    } catch (const std::exception& e) {
        warnings.push_back("captioner failed on " + label + " (" + e.what() +
                           "); using placeholder");
        return kCaptionFallback;
    }
}

} // namespace

std::vector<AssetDescription> describe_assets(
    const std::vector<MediaAsset>& assets,
    const std::map<int, std::vector<VideoSegment>>& segments_by_asset,
    CaptionAdapter& captioner, const FrameProvider& frame_at, Warnings& warnings) {
    std::vector<AssetDescription> descriptions;
    descriptions.reserve(assets.size());
    for (const MediaAsset& asset : assets) {
        AssetDescription desc;
        desc.asset_id = asset.id;
        desc.kind = asset.kind;
        if (asset.kind == AssetKind::Image) {
            desc.lines.push_back(describe_one(captioner, frame_at, asset, 0,
                                              "image " + std::to_string(asset.id),
                                              warnings));
        } else {
            auto it = segments_by_asset.find(asset.id);
            if (it == segments_by_asset.end() || it->second.empty())
                throw Error("no keyframes for asset " + std::to_string(asset.id));
            int k = 1;
            for (const VideoSegment& seg : it->second) {
                std::string text = describe_one(
                    captioner, frame_at, asset, seg.keyframe_index,
                    "video " + std::to_string(asset.id) + " key frame " + std::to_string(k),
                    warnings);
                desc.lines.push_back("key frame " + std::to_string(k) + ": " + text);
                ++k;
            }
        }
        descriptions.push_back(std::move(desc));
    }
    return descriptions;
}

std::string build_prompt(const UserRequirements& reqs,
                         const std::vector<AssetDescription>& descriptions) {
    if (descriptions.empty()) throw Error("build_prompt: no descriptions");

    std::ostringstream out;

    // --- task description ---
    out << "I have a collection of photos and videos, but their order is chaotic. "
           "I hope you can help me arrange these materials in a certain order to "
           "create a video";
    if (!reqs.theme.empty()) out << " centered around the theme " << reqs.theme;
    out << ". Additionally, I'd like you to provide a smoothly written script that "
           "connects these images and videos into a cohesive story.\n";
    if (!reqs.location.empty())
        out << "The photos and videos were taken at " << reqs.location << ".\n";
    if (!reqs.time.empty()) out << "They were captured at " << reqs.time << "\n";
    out << "I will provide descriptions for each image or video to give you an "
           "understanding of their content.\n";
    out << "\n";

    // --- input descriptions ---
    for (const AssetDescription& desc : descriptions) {
        const char* label = desc.kind == AssetKind::Image ? "Image " : "Video ";
        for (const std::string& line : desc.lines) {
            out << label << desc.asset_id << ": " << line << "\n";
        }
    }
    out << "\n";

    // --- detailed requirements ---
    out << "I need you to do two things:\n";
    out << "(1) Rearrange the materials, grouping similar images together. If "
           "there's a clear timeline, arrange them in chronological order, "
           "otherwise, organize them based on your logical sequence.\n";
    out << "(2) Write a script according to the adjusted material sequence.";
    if (!reqs.requirement.empty())
        out << " I hope your script meets the following requirements: "
            << reqs.requirement << ".";
    out << " It should be concise, fluent, vivid, and the transitions between "
           "different materials should be natural. Each caption for the materials "
           "should not exceed 20 words.\n";
    out << "Also, please recommend a piece of instrumental music that suits this "
           "video.\n";
    out << "Finally, you should first rearrange the materials and then write "
           "corresponding captions based on the rearranged sequence. Below is an "
           "example output format:\n";
    out << "Order: (A sequence of Arabic numbers separated by commas, indicating "
           "the adjusted order of materials in your script)\n";
    out << "Title: A title for the beginning of the video, not exceeding 5 words\n";
    out << "Materials: Content of the materials rearranged in order\n";
    out << "Captions: A specific Arabic number (indicating the corresponding "
           "section of the material): The specific content of the caption\n";
    out << "Closing: A closing statement at the end of the video, not exceeding 8 "
           "words\n";
    out << "Music Recommendation: (Only provide the name of the music, no other "
           "words)\n";
    return out.str();
}

std::string plan_story(const std::string& prompt, ChatAdapter& chat,
                       const std::filesystem::path& log_dir) {
    if (!log_dir.empty()) {
        std::filesystem::create_directories(log_dir);
        write_text_file(log_dir / "chat_prompt.txt", prompt);
    }
    std::string response;
    try {
        response = chat.complete(prompt);
    } catch (const std::exception& e) {
        throw Error(std::string("story planning failed: ") + e.what());
    }
    if (!log_dir.empty()) write_text_file(log_dir / "chat_response.txt", response);
    if (trim(response).empty()) throw Error("empty plan");
    return response;
}

namespace {

// Strips list markers ("-", "*", "1.", "(2)") from a candidate header line.
std::string strip_bullet(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() &&
           (line[i] == '-' || line[i] == '*' || line[i] == '#' || line[i] == '>' ||
            std::isspace(static_cast<unsigned char>(line[i]))))
        ++i;
    std::size_t j = i;
    if (j < line.size() && line[j] == '(') ++j;
    std::size_t digits = j;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits])))
        ++digits;
    if (digits > j && digits < line.size() &&
        (line[digits] == '.' || line[digits] == ')')) {
        i = digits + 1;
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    }
    return line.substr(i);
}

bool match_section(const std::string& line, std::string& label, std::string& rest) {
    std::string stripped = strip_bullet(line);
    auto colon = stripped.find(':');
    if (colon == std::string::npos) return false;
    std::string head = to_lower(trim(stripped.substr(0, colon)));
    while (!head.empty() && (head.back() == '*' || head.back() == '#')) head.pop_back();
    head = trim(head);
    static const char* kSections[] = {"order",   "title",   "materials",
                                      "captions", "caption", "closing",
                                      "music recommendation", "music"};
    for (const char* s : kSections) {
        if (head == s) {
            label = s;
            if (label == "caption") label = "captions";
            if (label == "music") label = "music recommendation";
            rest = trim(stripped.substr(colon + 1));
            return true;
        }
    }
    return false;
}

std::vector<int> extract_integers(const std::string& text) {
    std::vector<int> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isdigit(static_cast<unsigned char>(text[i]))) {
            std::size_t j = i;
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j])))
                ++j;
            out.push_back(std::atoi(text.substr(i, j - i).c_str()));
            i = j;
        } else {
            ++i;
        }
    }
    return out;
}

std::string strip_quotes_and_punct(const std::string& s) {
    static const std::string kStrip = "\"'`.,!?;:()[]{}<>";
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && kStrip.find(s[b]) != std::string::npos) ++b;
    while (e > b && kStrip.find(s[e - 1]) != std::string::npos) --e;
    return trim(s.substr(b, e - b));
}

std::size_t word_count(const std::string& s) {
    return tokenize_words(s).size();
}

} // namespace

DirectorPlan parse_plan(const std::string& response, const std::vector<int>& expected_ids) {
    if (expected_ids.empty()) throw Error("parse_plan: no expected ids");

    // Collect section bodies line by line.
    std::map<std::string, std::vector<std::string>> sections;
    std::string current;
    for (const std::string& line : split_lines(response)) {
        std::string label, rest;
        if (match_section(line, label, rest)) {
            current = label;
            sections[current]; // ensure present even if body stays empty
            if (!rest.empty()) sections[current].push_back(rest);
        } else if (!current.empty()) {
            std::string body = trim(line);
            if (!body.empty()) sections[current].push_back(body);
        }
    }

    if (!sections.count("order")) throw Error("plan missing order");
    if (!sections.count("captions")) throw Error("plan missing captions");

    DirectorPlan plan;
    const std::set<int> expected(expected_ids.begin(), expected_ids.end());

    // --- order, with repair (one consolidated warning per repaired plan) ---
    std::string order_text;
    for (const std::string& l : sections["order"]) order_text += l + " ";
    std::set<int> seen;
    std::vector<int> dropped, appended;
    for (int id : extract_integers(order_text)) {
        if (!expected.count(id) || seen.count(id)) {
            dropped.push_back(id);
            continue;
        }
        seen.insert(id);
        plan.order.push_back(id);
    }
    for (int id : expected_ids) {
        if (!seen.count(id)) {
            appended.push_back(id);
            plan.order.push_back(id);
        }
    }
    if (!dropped.empty() || !appended.empty()) {
        std::string note = "order repaired:";
        if (!dropped.empty()) {
            note += " dropped";
            for (int id : dropped) note += " " + std::to_string(id);
            note += ";";
        }
        if (!appended.empty()) {
            note += " appended missing";
            for (int id : appended) note += " " + std::to_string(id);
        }
        plan.warnings.push_back(note);
    }

    // --- captions, matched by leading integer (which is the asset id, so
    // only non-numeric list markers may be stripped here) ---
    for (const std::string& line : sections["captions"]) {
        std::string stripped = line;
        {
            std::size_t skip = 0;
            while (skip < stripped.size() &&
                   (stripped[skip] == '-' || stripped[skip] == '*' ||
                    stripped[skip] == '>' || stripped[skip] == '#' ||
                    std::isspace(static_cast<unsigned char>(stripped[skip]))))
                ++skip;
            stripped = stripped.substr(skip);
        }
        std::size_t i = 0;
        while (i < stripped.size() && std::isdigit(static_cast<unsigned char>(stripped[i])))
            ++i;
        if (i == 0) continue; // no leading integer; not a caption entry
        int id = std::atoi(stripped.substr(0, i).c_str());
        while (i < stripped.size() &&
               (stripped[i] == ':' || stripped[i] == '.' || stripped[i] == ')' ||
                stripped[i] == '-' || std::isspace(static_cast<unsigned char>(stripped[i]))))
            ++i;
        std::string text = trim(stripped.substr(i));
        if (!expected.count(id)) {
            plan.warnings.push_back("caption for unknown asset " + std::to_string(id) +
                                    ": " + text);
            continue;
        }
        if (plan.captions.count(id)) {
            plan.warnings.push_back("duplicate caption for asset " + std::to_string(id) +
                                    "; kept the first");
            continue;
        }
        plan.captions[id] = text;
        if (word_count(text) > 20)
            plan.warnings.push_back("caption for asset " + std::to_string(id) +
                                    " exceeds 20 words");
    }
    for (int id : expected_ids) {
        if (!plan.captions.count(id)) {
            plan.captions[id] = "";
            plan.warnings.push_back("missing caption for asset " + std::to_string(id));
        }
    }

    // --- remaining scalar sections ---
    auto join = [&sections](const char* key) {
        std::string out;
        auto it = sections.find(key);
        if (it == sections.end()) return out;
        for (const std::string& l : it->second) {
            if (!out.empty()) out += " ";
            out += l;
        }
        return trim(out);
    };
    plan.title = join("title");
    plan.closing = join("closing");
    plan.music_name = strip_quotes_and_punct(join("music recommendation"));

    if (plan.title.empty()) plan.warnings.push_back("plan has no title");
    else if (word_count(plan.title) > 5) plan.warnings.push_back("title exceeds 5 words");
    if (plan.closing.empty()) plan.warnings.push_back("plan has no closing");
    else if (word_count(plan.closing) > 8)
        plan.warnings.push_back("closing exceeds 8 words");
    if (plan.music_name.empty()) plan.warnings.push_back("plan has no music recommendation");

    return plan;
}

std::string format_plan_response(const DirectorPlan& plan) {
    std::ostringstream out;
    out << "Order: ";
    for (std::size_t i = 0; i < plan.order.size(); ++i) {
        if (i) out << ", ";
        out << plan.order[i];
    }
    out << "\n";
    out << "Title: " << plan.title << "\n";
    out << "Captions:\n";
    for (const auto& [id, text] : plan.captions) {
        out << id << ": " << text << "\n";
    }
    out << "Closing: " << plan.closing << "\n";
    out << "Music Recommendation: " << plan.music_name << "\n";
    return out.str();
}

} // namespace director
