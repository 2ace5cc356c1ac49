#pragma once

#include <stdexcept>
#include <string>

namespace beamgraph {

// Every failure raised by the library derives from Error. The CLI maps the
// concrete type onto its exit code.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Malformed input file or value. Carries the 1-based line number when known.
class ParseError : public Error {
  public:
    ParseError(const std::string& what, std::size_t line = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}

    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

class DuplicateError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class ArgumentError : public Error {
  public:
    using Error::Error;
};

class GeometryError : public Error {
  public:
    using Error::Error;
};

class SizeError : public Error {
  public:
    using Error::Error;
};

class ConsistencyError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    IoError(const std::string& what, const std::string& path)
        : Error(what + ": " + path), path_(path) {}

    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

}  // namespace beamgraph
