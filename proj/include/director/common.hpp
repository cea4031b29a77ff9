#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace director {

// Fatal pipeline errors. Recoverable conditions are reported as warnings
// instead and the run continues.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Warnings = std::vector<std::string>;

inline void merge_warnings(Warnings& dst, const Warnings& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

} // namespace director
