#pragma once

#include <stdexcept>
#include <string>

namespace gna {

// Error taxonomy shared by all modules.  Each category maps to a stable
// process exit code so scripted callers can dispatch on failures.
enum class ErrorCategory {
    config = 2,        // bad parameter values, unknown model/family names
    schema = 3,        // structurally invalid input data
    parse = 4,         // unreadable file / bad syntax
    domain = 5,        // argument outside mathematical domain
    stale_event = 6,   // event does not match the configuration it is applied to
    trace = 7,         // inconsistent trajectory (broken node identity, time order)
    replacement_miss = 8,  // no applicable rewrite rule and no fallback allowed
    init = 9,          // population/network initialization cannot satisfy its quota
    io = 10,           // filesystem failure
};

class GnaError : public std::runtime_error {
public:
    GnaError(ErrorCategory cat, const std::string& msg)
        : std::runtime_error(msg), category_(cat) {}
    ErrorCategory category() const { return category_; }
    int exit_code() const { return static_cast<int>(category_); }

private:
    ErrorCategory category_;
};

class ConfigError : public GnaError {
public:
    explicit ConfigError(const std::string& msg) : GnaError(ErrorCategory::config, msg) {}
};

class SchemaError : public GnaError {
public:
    explicit SchemaError(const std::string& msg) : GnaError(ErrorCategory::schema, msg) {}
};

class ParseError : public GnaError {
public:
    explicit ParseError(const std::string& msg) : GnaError(ErrorCategory::parse, msg) {}
};

class DomainError : public GnaError {
public:
    explicit DomainError(const std::string& msg) : GnaError(ErrorCategory::domain, msg) {}
};

class StaleEventError : public GnaError {
public:
    explicit StaleEventError(const std::string& msg) : GnaError(ErrorCategory::stale_event, msg) {}
};

class TraceError : public GnaError {
public:
    explicit TraceError(const std::string& msg) : GnaError(ErrorCategory::trace, msg) {}
};

class ReplacementMissError : public GnaError {
public:
    explicit ReplacementMissError(const std::string& msg)
        : GnaError(ErrorCategory::replacement_miss, msg) {}
};

class InitError : public GnaError {
public:
    explicit InitError(const std::string& msg) : GnaError(ErrorCategory::init, msg) {}
};

class IoError : public GnaError {
public:
    explicit IoError(const std::string& msg) : GnaError(ErrorCategory::io, msg) {}
};

}  // namespace gna
