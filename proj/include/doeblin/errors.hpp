#pragma once

#include <stdexcept>
#include <string>

namespace doeblin {

// Malformed or out-of-contract input. Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Solver or eigensolver failure. Maps to CLI exit code 1.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace doeblin
