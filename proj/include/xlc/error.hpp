#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace xlc {

/// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class MissingFile : public Error {
  public:
    explicit MissingFile(std::string path)
        : Error("missing file: " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

  private:
    std::string path_;
};

/// Schema violation in an input file. `line` is 1-based, 0 when not line-bound.
class SchemaError : public Error {
  public:
    SchemaError(std::string file, std::size_t line, const std::string& what)
        : Error(file + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
          file_(std::move(file)), line_(line) {}
    const std::string& file() const noexcept { return file_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string file_;
    std::size_t line_;
};

/// A reference to an id that does not resolve.
class ReferenceError : public Error {
  public:
    explicit ReferenceError(std::string id, const std::string& context = {})
        : Error("unresolved reference '" + id + "'" + (context.empty() ? "" : " (" + context + ")")),
          id_(std::move(id)) {}
    const std::string& id() const noexcept { return id_; }

  private:
    std::string id_;
};

class PreconditionError : public Error {
  public:
    using Error::Error;
};

class ProviderError : public Error {
  public:
    ProviderError(int status, const std::string& what)
        : Error("provider error (status " + std::to_string(status) + "): " + what), status_(status) {}
    /// HTTP status, or 0 for transport failures.
    int status() const noexcept { return status_; }

  private:
    int status_;
};

class FixtureMiss : public Error {
  public:
    explicit FixtureMiss(std::string hash)
        : Error("no replay fixture for prompt hash " + hash), hash_(std::move(hash)) {}
    const std::string& hash() const noexcept { return hash_; }

  private:
    std::string hash_;
};

class PromptTooLarge : public Error {
  public:
    PromptTooLarge(std::size_t estimated, std::size_t budget)
        : Error("prompt too large: ~" + std::to_string(estimated) + " tokens exceeds budget of " +
                std::to_string(budget)),
          estimated_(estimated), budget_(budget) {}
    std::size_t estimated_tokens() const noexcept { return estimated_; }
    std::size_t budget() const noexcept { return budget_; }

  private:
    std::size_t estimated_;
    std::size_t budget_;
};

class MissingExamples : public Error {
  public:
    using Error::Error;
};

enum class ParseErrorKind { no_json, missing_field, bad_label };

inline const char* to_string(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::no_json: return "no_json";
        case ParseErrorKind::missing_field: return "missing_field";
        case ParseErrorKind::bad_label: return "bad_label";
    }
    return "unknown";
}

class ParseError : public Error {
  public:
    ParseError(ParseErrorKind kind, const std::string& what)
        : Error(std::string("parse error (") + to_string(kind) + "): " + what), kind_(kind) {}
    ParseErrorKind kind() const noexcept { return kind_; }

  private:
    ParseErrorKind kind_;
};

class SpecError : public Error {
  public:
    using Error::Error;
};

/// Evaluation input inconsistency, e.g. a record without a truth label.
class EvalError : public Error {
  public:
    using Error::Error;
};

/// Raised by batch runners when every record in a non-empty batch failed.
class BatchError : public Error {
  public:
    using Error::Error;
};

}  // namespace xlc
