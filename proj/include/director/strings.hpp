#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace director {

std::string trim(const std::string& s);
std::string to_lower(const std::string& s);

// Collapse runs of whitespace to single spaces and trim the ends.
std::string collapse_whitespace(const std::string& s);

// Canonical form for music-title matching: lowercase, punctuation stripped,
// whitespace collapsed.
std::string normalize_title(const std::string& s);

// Lowercased tokens split on runs of non-alphanumeric bytes.
std::vector<std::string> tokenize_words(const std::string& text);

std::size_t levenshtein(const std::string& a, const std::string& b);

// levenshtein / max(len a, len b); 0.0 for two empty strings.
double normalized_levenshtein(const std::string& a, const std::string& b);

std::string base64_encode(const unsigned char* data, std::size_t len);
std::string base64_encode(const std::string& data);
std::vector<unsigned char> base64_decode(const std::string& text);

std::uint64_t fnv1a64(const std::string& data);

bool starts_with_ci(const std::string& s, const std::string& prefix);

std::vector<std::string> split_lines(const std::string& text);

} // namespace director
