#include "director/eval.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "director/strings.hpp"

namespace director {

double ttr(const std::vector<std::string>& texts) {
    std::set<std::string> types;
    std::size_t total = 0;
    for (const std::string& text : texts) {
        for (std::string& token : tokenize_words(text)) {
            types.insert(std::move(token));
            ++total;
        }
    }
    if (total == 0) throw Error("empty text");
    return static_cast<double>(types.size()) / static_cast<double>(total);
}

double mean_ttr(const std::vector<double>& per_video) {
    if (per_video.empty()) throw Error("mean_ttr: no values");
    double sum = 0.0;
    for (double v : per_video) sum += v;
    return sum / static_cast<double>(per_video.size());
}

namespace {

std::string escape_braces(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '{' || c == '}') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

} // namespace

std::string build_judge_prompt(const std::string& script,
                               const std::vector<std::string>& frame_refs,
                               Warnings* warnings) {
    if (script.empty()) throw Error("build_judge_prompt: empty script");

    std::ostringstream out;
    out << "You are an impartial judge tasked with evaluating the quality of edited "
           "video based on textual and visual elements. Your assessment should "
           "consider the overall coherence, creativity, and effectiveness of the "
           "content. You will rate the quality of the output on multiple aspects "
           "such as Consistency of text and video, Logicality, Vividness, and "
           "Overall.\n";
    out << "\n";
    out << "Evaluate\n";
    out << "\n";
    out << "Aspects\n";
    out << "\n";
    out << "Consistency of text and video: Rate the Consistency of text and video on "
           "how well the text aligns with the visuals in the video clip, according "
           "to the consistency between what is described in the text and what is "
           "presented visually. A score of 5 indicates complete alignment, while a "
           "score of 1 suggests significant inconsistency.\n";
    out << "\n";
    out << "Logicality: Evaluate the logical flow of the text, examining how it "
           "contributes to a cohesive and sensible storyline. A score of 5 "
           "indicates a text that is logically sound, while a score of 1 suggests "
           "a lack of coherence and logic.\n";
    out << "\n";
    out << "Vividness: Rate the Vividness on how well the text brings the video to "
           "life and enhances the viewer's experience. A score of 5 indicates "
           "highly vivid text, while a score of 1 suggests a lack of vividness and "
           "engagement.\n";
    out << "\n";
    out << "Overall: Rate the overall assessment on how effectively the text and "
           "visuals work together to create a compelling and coherent story. A "
           "score of 5 indicates good integration, while a score of 1 suggests "
           "poor integration.\n";
    out << "\n";
    out << "Format\n";
    out << "Please rate the quality of the edited video by scoring it from 1 to 5 "
           "individually on each aspect.\n";
    out << "- 1: strongly disagree\n";
    out << "- 2: disagree\n";
    out << "- 3: neutral\n";
    out << "- 4: agree\n";
    out << "- 5: strongly agree\n";
    out << "\n";
    out << "Now, please output your scores and a short rationale below in a json "
           "format by filling in the placeholders in []:\n";
    out << "\n";
    out << "{\n";
    const char* aspects[] = {"consistency of text and video", "logicality", "vividness",
                             "aesthetic", "overall"};
    for (std::size_t i = 0; i < 5; ++i) {
        out << "    \"" << aspects[i] << "\": {\n";
        out << "        \"reason\": \"[your rationale]\",\n";
        out << "        \"score\": \"[score from 1 to 5]\"\n";
        out << "    }" << (i + 1 < 5 ? "," : "") << "\n";
    }
    out << "}\n";
    out << "\n";
    out << "Material\n";
    out << "\n";
    out << "The following is provided for your evaluation: an edited video, "
           "encompassing both the script within the video and a series of video "
           "frames.\n";
    out << "\n";
    out << "Text Script:\n";
    out << escape_braces(script) << "\n";
    out << "\n";
    out << "Video Frames:\n";
    out << "Video Frames are shown below.\n";
    if (frame_refs.empty()) {
        out << "(no frames provided)\n";
        if (warnings) warnings->push_back("judge prompt built with zero frames");
    } else {
        for (std::size_t i = 0; i < frame_refs.size(); ++i) {
            out << "Frame " << (i + 1) << ": " << frame_refs[i] << "\n";
        }
    }
    return out.str();
}

namespace {

struct AspectSpec {
    const char* key;      // canonical JSON key
    const char* needle;   // lowercase fragment for the tolerant scan
    const char* label;    // error message name
};

constexpr AspectSpec kAspects[] = {
    {"consistency of text and video", "consistency", "consistency"},
    {"logicality", "logicality", "logicality"},
    {"vividness", "vividness", "vividness"},
    {"aesthetic", "aesthetic", "aesthetic"},
    {"overall", "overall", "overall"},
};

std::string strip_code_fences(const std::string& text) {
    std::string out;
    for (const std::string& line : split_lines(text)) {
        if (starts_with_ci(trim(line), "```")) continue;
        out += line;
        out += "\n";
    }
    return out;
}

int score_from_field(const nlohmann::json& value) {
    if (value.is_number_integer()) return value.get<int>();
    if (value.is_string()) {
        for (char c : value.get<std::string>()) {
            if (std::isdigit(static_cast<unsigned char>(c))) return c - '0';
        }
    }
    return -1;
}

// Fallback when the blob is not parseable JSON: scan for the aspect name,
// then its score field, then the first digit. Reasons are recovered only on
// the JSON path.
bool scan_aspect(const std::string& lower_text, const std::string& text,
                 const AspectSpec& aspect, int& score) {
    std::size_t pos = lower_text.find(aspect.needle);
    if (pos == std::string::npos) return false;
    std::size_t score_pos = lower_text.find("score", pos);
    if (score_pos == std::string::npos) return false;
    for (std::size_t i = score_pos; i < lower_text.size() && i < score_pos + 40; ++i) {
        if (std::isdigit(static_cast<unsigned char>(lower_text[i]))) {
            score = text[i] - '0';
            return true;
        }
    }
    return false;
}

} // namespace

JudgeScores parse_judge_response(const std::string& text) {
    std::string cleaned = strip_code_fences(text);

    JudgeScores scores;
    bool found[5] = {false, false, false, false, false};
    int values[5] = {0, 0, 0, 0, 0};
    std::string reasons[5];

    // Preferred path: the outermost JSON object.
    auto open = cleaned.find('{');
    auto close = cleaned.rfind('}');
    if (open != std::string::npos && close != std::string::npos && close > open) {
        nlohmann::json doc =
            nlohmann::json::parse(cleaned.substr(open, close - open + 1), nullptr, false);
        if (doc.is_object()) {
            for (auto& [key, value] : doc.items()) {
                std::string lower_key = to_lower(key);
                for (std::size_t i = 0; i < 5; ++i) {
                    if (lower_key.find(kAspects[i].needle) == std::string::npos) continue;
                    if (found[i]) continue;
                    if (value.is_object() && value.contains("score")) {
                        values[i] = score_from_field(value["score"]);
                        if (value.contains("reason") && value["reason"].is_string())
                            reasons[i] = value["reason"].get<std::string>();
                    } else {
                        values[i] = score_from_field(value);
                    }
                    found[i] = true;
                }
            }
        }
    }

    // Tolerant scan for anything the JSON path missed.
    std::string lower = to_lower(cleaned);
    for (std::size_t i = 0; i < 5; ++i) {
        if (found[i]) continue;
        int score = 0;
        if (scan_aspect(lower, cleaned, kAspects[i], score)) {
            values[i] = score;
            found[i] = true;
        }
    }

    for (std::size_t i = 0; i < 5; ++i) {
        if (!found[i])
            throw Error(std::string(kAspects[i].label) + " missing from judge response");
        if (values[i] < 1 || values[i] > 5)
            throw Error(std::string(kAspects[i].label) + " out of range");
    }

    scores.consistency = values[0];
    scores.logicality = values[1];
    scores.vividness = values[2];
    scores.aesthetic = values[3];
    scores.overall = values[4];
    for (std::size_t i = 0; i < 5; ++i) {
        if (!reasons[i].empty()) scores.reasons[kAspects[i].key] = reasons[i];
    }
    return scores;
}

std::string serialize_judge_scores(const JudgeScores& scores) {
    nlohmann::json doc;
    auto put = [&](const char* key, int score) {
        auto it = scores.reasons.find(key);
        doc[key] = {{"reason", it != scores.reasons.end() ? it->second : ""},
                    {"score", std::to_string(score)}};
    };
    put("consistency of text and video", scores.consistency);
    put("logicality", scores.logicality);
    put("vividness", scores.vividness);
    put("aesthetic", scores.aesthetic);
    put("overall", scores.overall);
    return doc.dump(4);
}

} // namespace director
