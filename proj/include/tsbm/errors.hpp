#pragma once

#include <stdexcept>
#include <string>

namespace tsbm {

// Problems with user-supplied data (malformed rows, out-of-range indices,
// inconsistent metadata). The CLI maps these to exit code 2; programming
// errors keep using std::invalid_argument / assert.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tsbm
