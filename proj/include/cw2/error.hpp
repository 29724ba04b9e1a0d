#pragma once

#include <stdexcept>
#include <string>

namespace cw2 {

// Precondition violated by caller-supplied parameters (CLI exit code 2).
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical routine could not reach its requested accuracy (CLI exit code 1).
class numerical_failure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw invalid_input(what);
}

} // namespace cw2
