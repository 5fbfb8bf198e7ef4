#pragma once

#include <stdexcept>
#include <string>

namespace pacdisp {

// Base for every error raised by the library. `code()` is a stable machine
// name (used in CLI messages and HTTP error bodies).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Input data or schema problems (exit code 1 in the CLI).
class DataError : public Error {
public:
    using Error::Error;
};

// Model fitting / scoring / persistence problems (exit code 1 in the CLI).
class ModelError : public Error {
public:
    using Error::Error;
};

} // namespace pacdisp
