#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace beamsm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t kNoSnapshot = std::numeric_limits<std::size_t>::max();

// Raised when a recursion denominator collapses. Carries the snapshot index
// once the algorithm layer knows it.
class SingularUpdateError : public Error {
public:
    explicit SingularUpdateError(const std::string& what, std::size_t snapshot = kNoSnapshot)
        : Error(snapshot == kNoSnapshot ? what : what + " at snapshot " + std::to_string(snapshot)),
          reason_(what), snapshot_(snapshot) {}

    [[nodiscard]] std::size_t snapshot() const noexcept { return snapshot_; }
    [[nodiscard]] const std::string& reason() const noexcept { return reason_; }

    [[nodiscard]] SingularUpdateError at(std::size_t snapshot) const { return SingularUpdateError(reason_, snapshot); }

private:
    std::string reason_;
    std::size_t snapshot_;
};

// a^H P a (or its reduced-rank counterpart) vanished; the run cannot continue.
class SingularConstraintError : public Error {
public:
    explicit SingularConstraintError(const std::string& what, std::size_t snapshot = kNoSnapshot)
        : Error(snapshot == kNoSnapshot ? what : what + " at snapshot " + std::to_string(snapshot)),
          snapshot_(snapshot) {}

    [[nodiscard]] std::size_t snapshot() const noexcept { return snapshot_; }

private:
    std::size_t snapshot_;
};

} // namespace beamsm
