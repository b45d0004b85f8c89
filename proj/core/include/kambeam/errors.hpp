#pragma once

#include <stdexcept>
#include <string>

namespace kambeam {

// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define KAMBEAM_DEFINE_ERROR(Name)                        \
    class Name : public Error {                           \
    public:                                               \
        explicit Name(const std::string& what)            \
            : Error(std::string(#Name ": ") + what) {}    \
    }

KAMBEAM_DEFINE_ERROR(DegenerateInput);
KAMBEAM_DEFINE_ERROR(BadCardinality);
KAMBEAM_DEFINE_ERROR(BadSeed);
KAMBEAM_DEFINE_ERROR(SiteInS);
KAMBEAM_DEFINE_ERROR(WrongKind);
KAMBEAM_DEFINE_ERROR(DomainError);
KAMBEAM_DEFINE_ERROR(NonResonantLeftover);
KAMBEAM_DEFINE_ERROR(DivergentLieSeries);
KAMBEAM_DEFINE_ERROR(ZeroK);
KAMBEAM_DEFINE_ERROR(SiteOutsideWindow);
KAMBEAM_DEFINE_ERROR(BlowUp);
KAMBEAM_DEFINE_ERROR(NoPeak);
KAMBEAM_DEFINE_ERROR(PreconditionError);

#undef KAMBEAM_DEFINE_ERROR

// Raised when a homological-equation block determinant falls below gamma/|k|^tau.
class SmallDivisor : public Error {
public:
    SmallDivisor(const std::string& where, double det, double threshold)
        : Error("SmallDivisor: " + where + " |det|=" + std::to_string(det) +
                " < " + std::to_string(threshold)),
          det_(det), threshold_(threshold) {}
    double det() const noexcept { return det_; }
    double threshold() const noexcept { return threshold_; }

private:
    double det_;
    double threshold_;
};

// Configuration problems, with the offending key and (when known) line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& key, const std::string& message, int line = 0)
        : Error("ConfigError: " + (line > 0 ? "line " + std::to_string(line) + ": " : std::string()) +
                (key.empty() ? std::string() : "'" + key + "': ") + message),
          key_(key), line_(line) {}
    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

}  // namespace kambeam
