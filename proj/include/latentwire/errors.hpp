#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace latentwire {

// Every failure raised by the library derives from Error so callers (and the
// CLI exit-code mapping) can dispatch on category.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* code() const noexcept { return "error"; }
};

class ShapeError : public Error {
public:
    using Error::Error;
    const char* code() const noexcept override { return "shape"; }
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column = npos)
        : Error(what), row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }
    const char* code() const noexcept override { return "parse"; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t row_;
    std::size_t column_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& what)
        : Error(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }
    const char* code() const noexcept override { return "config"; }

private:
    std::string field_;
};

class DivergedError : public Error {
public:
    DivergedError(std::size_t epoch, std::size_t batch, const std::string& what)
        : Error(what + " (epoch " + std::to_string(epoch) + ", batch " + std::to_string(batch) + ")"),
          epoch_(epoch), batch_(batch) {}
    std::size_t epoch() const noexcept { return epoch_; }
    std::size_t batch() const noexcept { return batch_; }
    const char* code() const noexcept override { return "diverged"; }

private:
    std::size_t epoch_;
    std::size_t batch_;
};

enum class LoadFailure { io, version, shape, corrupt_payload, fingerprint };

class LoadError : public Error {
public:
    LoadError(LoadFailure kind, const std::string& what) : Error(what), kind_(kind) {}
    LoadFailure kind() const noexcept { return kind_; }
    const char* code() const noexcept override { return "load"; }

private:
    LoadFailure kind_;
};

class ProtocolError : public Error {
public:
    ProtocolError(std::uint8_t reject_code, const std::string& what) : Error(what), reject_code_(reject_code) {}
    std::uint8_t reject_code() const noexcept { return reject_code_; }
    const char* code() const noexcept override { return "protocol"; }

private:
    std::uint8_t reject_code_;
};

}  // namespace latentwire
