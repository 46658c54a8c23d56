#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sandk {

enum class ErrorKind {
    BadParameters,
    UnknownVertex,
    ParseError,
    NoSink,
    MultipleSinks,
    UnreachableSink,
    SinkHintMismatch,
    NotHereditarySaturated,
    NotVertexWeighted,
    ConfigurationMismatch,
    Overflow,
    SinkHasNoTransform,
    SinkCannotTopple,
    VertexStable,
    BudgetExhausted,
    NotFoundWithinBudget,
    SizeOverBudget,
    Inconclusive,
    NotSubmonoid,
    NotConical,
    NotReduced,
    GoldenMismatch,
    InternalInvariant,
};

constexpr std::string_view kind_name(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::BadParameters: return "BadParameters";
    case ErrorKind::UnknownVertex: return "UnknownVertex";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NoSink: return "NoSink";
    case ErrorKind::MultipleSinks: return "MultipleSinks";
    case ErrorKind::UnreachableSink: return "UnreachableSink";
    case ErrorKind::SinkHintMismatch: return "SinkHintMismatch";
    case ErrorKind::NotHereditarySaturated: return "NotHereditarySaturated";
    case ErrorKind::NotVertexWeighted: return "NotVertexWeighted";
    case ErrorKind::ConfigurationMismatch: return "ConfigurationMismatch";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::SinkHasNoTransform: return "SinkHasNoTransform";
    case ErrorKind::SinkCannotTopple: return "SinkCannotTopple";
    case ErrorKind::VertexStable: return "VertexStable";
    case ErrorKind::BudgetExhausted: return "BudgetExhausted";
    case ErrorKind::NotFoundWithinBudget: return "NotFoundWithinBudget";
    case ErrorKind::SizeOverBudget: return "SizeOverBudget";
    case ErrorKind::Inconclusive: return "Inconclusive";
    case ErrorKind::NotSubmonoid: return "NotSubmonoid";
    case ErrorKind::NotConical: return "NotConical";
    case ErrorKind::NotReduced: return "NotReduced";
    case ErrorKind::GoldenMismatch: return "GoldenMismatch";
    case ErrorKind::InternalInvariant: return "InternalInvariant";
    }
    return "Unknown";
}

/// Every domain failure in the library is reported as an Error carrying a
/// typed kind; the CLI maps it to exit code 1 and prints the kind name.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(kind_name(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

namespace detail {

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

inline void ensure(bool condition, const std::string& what) {
    if (!condition) fail(ErrorKind::InternalInvariant, what);
}

}  // namespace detail
}  // namespace sandk
