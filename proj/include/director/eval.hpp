#pragma once

#include <map>
#include <string>
#include <vector>

#include "director/common.hpp"

namespace director {

// Type-token ratio over the concatenated texts: distinct lowercase
// alphanumeric tokens divided by total tokens. Errors on token-free input.
double ttr(const std::vector<std::string>& texts);

double mean_ttr(const std::vector<double>& per_video);

// Judge prompt with the script substituted (braces in the script are
// escaped) and the frame attachments referenced in order. A missing frame
// list is tolerated with a warning.
std::string build_judge_prompt(const std::string& script,
                               const std::vector<std::string>& frame_refs,
                               Warnings* warnings = nullptr);

struct JudgeScores {
    int consistency = 0;
    int logicality = 0;
    int vividness = 0;
    int aesthetic = 0;
    int overall = 0;
    std::map<std::string, std::string> reasons;

    // Mean of the four reported aspects; aesthetic is parsed but excluded.
    double average() const {
        return (consistency + logicality + vividness + overall) / 4.0;
    }
};

// Extracts the five keyed score objects, tolerating surrounding prose and
// code fences. Errors name the missing or out-of-range aspect.
JudgeScores parse_judge_response(const std::string& text);

// The response shape parse_judge_response understands; round-trip safe.
std::string serialize_judge_scores(const JudgeScores& scores);

} // namespace director
