#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uavmd {

// Error taxonomy. The CLI maps each kind onto a fixed exit code.
enum class ErrorKind { parameter, config, io, format, numerical, detection, estimation, unsupported };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ParameterError : Error {
    explicit ParameterError(const std::string& w) : Error(ErrorKind::parameter, w) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error(ErrorKind::config, w) {}
};

struct IoError : Error {
    explicit IoError(const std::string& w) : Error(ErrorKind::io, w) {}
};

class FormatError : public Error {
public:
    FormatError(const std::string& w, std::uint64_t offset)
        : Error(ErrorKind::format, w + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& w) : Error(ErrorKind::numerical, w) {}
};

struct DetectionError : Error {
    explicit DetectionError(const std::string& w) : Error(ErrorKind::detection, w) {}
};

struct EstimationError : Error {
    explicit EstimationError(const std::string& w) : Error(ErrorKind::estimation, w) {}
};

struct UnsupportedModeError : Error {
    explicit UnsupportedModeError(const std::string& w) : Error(ErrorKind::unsupported, w) {}
};

int exit_code(ErrorKind kind) noexcept;

} // namespace uavmd
