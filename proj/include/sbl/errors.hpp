#pragma once

#include <stdexcept>
#include <string>

namespace sbl {

// Bad input: violated preconditions, infeasible parameters, malformed files.
// The CLI maps this to exit code 2.
class parameter_error : public std::invalid_argument {
public:
    explicit parameter_error(const std::string& what) : std::invalid_argument(what) {}
};

// A mathematical invariant that is a theorem for valid inputs failed.
// This signals an implementation bug, never bad data. CLI exit code 3.
class lemma_violation : public std::runtime_error {
public:
    explicit lemma_violation(const std::string& what) : std::runtime_error(what) {}
};

// A randomized generator exhausted its retry budget.
class generation_error : public std::runtime_error {
public:
    generation_error(const std::string& what, int retries)
        : std::runtime_error(what + " (retries used: " + std::to_string(retries) + ")"),
          retries_used(retries) {}
    int retries_used;
};

} // namespace sbl
