#include "tracecause/error.hpp"

namespace tracecause {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::parse: return "parse";
    case Errc::unsupported_version: return "unsupported-version";
    case Errc::empty_signature: return "empty-signature";
    case Errc::duplicate_name: return "duplicate-name";
    case Errc::undeclared_variable: return "undeclared-variable";
    case Errc::cyclic_dependency: return "cyclic-dependency";
    case Errc::malformed_domain: return "malformed-domain";
    case Errc::missing_column: return "missing-column";
    case Errc::unknown_column: return "unknown-column";
    case Errc::duplicate_step: return "duplicate-step";
    case Errc::non_contiguous_steps: return "non-contiguous-steps";
    case Errc::out_of_domain: return "out-of-domain";
    case Errc::empty_trace: return "empty-trace";
    case Errc::unknown_variable: return "unknown-variable";
    case Errc::discrete_variable: return "discrete-variable";
    case Errc::syntax: return "syntax";
    case Errc::comparator_not_allowed: return "comparator-not-allowed";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::empty_log: return "empty-log";
    case Errc::exhausted: return "exhausted";
    case Errc::no_split: return "no-split";
    case Errc::timeout: return "timeout";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message,
             std::optional<std::size_t> location)
    : std::runtime_error(message), code_(code), location_(location) {}

}  // namespace tracecause
