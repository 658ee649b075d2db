#ifndef PLSTOMO_ERRORS_HPP
#define PLSTOMO_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace plstomo {

// Malformed input file. Message carries "path:line: what".
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& path, int line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          path_(path), line_(line) {}

    const std::string& path() const { return path_; }
    int line() const { return line_; }

private:
    std::string path_;
    int line_;
};

// Bad experiment configuration (unknown key, missing field, invalid value).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite objective or other numerical breakdown inside the solver.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Damped normal matrix unsolvable even after damping escalation.
class SingularSystemError : public NumericalError {
public:
    explicit SingularSystemError(const std::string& what) : NumericalError(what) {}
};

} // namespace plstomo

#endif
