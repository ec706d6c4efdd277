#pragma once

#include <stdexcept>
#include <string>

namespace episim {

// Error taxonomy shared by the library and the CLI. The CLI maps each
// class to a distinct process exit code (see tools/episim.cpp).
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text: config JSON, edge lists, CSV.
class parse_error : public error {
public:
    explicit parse_error(const std::string& msg) : error(msg) {}
};

// Structurally valid input that violates a model constraint
// (parameter ranges, shape mismatches, topology rules, size caps).
class validation_error : public error {
public:
    explicit validation_error(const std::string& msg) : error(msg) {}
};

// Numerical failure at run time: non-convergence, integrator
// instability, probability-mass drift, non-finite values.
class numerical_error : public error {
public:
    explicit numerical_error(const std::string& msg) : error(msg) {}
};

class io_error : public error {
public:
    explicit io_error(const std::string& msg) : error(msg) {}
};

} // namespace episim
