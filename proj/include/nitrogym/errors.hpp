#pragma once

#include <stdexcept>
#include <string>

namespace nitrogym {

// Invalid scenario/experiment configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Input outside an operation's domain (negative amounts, broken invariants).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

class EpisodeFinishedError : public std::logic_error {
public:
    explicit EpisodeFinishedError(const std::string& what) : std::logic_error(what) {}
};

class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

class MaskError : public std::invalid_argument {
public:
    explicit MaskError(const std::string& what) : std::invalid_argument(what) {}
};

class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Output files could not be written.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace nitrogym
