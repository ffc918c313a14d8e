#pragma once

#include <stdexcept>
#include <string>

namespace relhyper {

// Malformed input files (embeddings, relation files, configs).
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Native cache files that cannot be read back.
class CacheError : public std::runtime_error {
public:
    explicit CacheError(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate numerical situations (zero vectors, divergence, rank collapse).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace relhyper
