#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tracecause {

enum class Errc {
  parse,
  unsupported_version,
  empty_signature,
  duplicate_name,
  undeclared_variable,
  cyclic_dependency,
  malformed_domain,
  missing_column,
  unknown_column,
  duplicate_step,
  non_contiguous_steps,
  out_of_domain,
  empty_trace,
  unknown_variable,
  discrete_variable,
  syntax,
  comparator_not_allowed,
  index_out_of_range,
  invalid_argument,
  empty_log,
  exhausted,
  no_split,
  timeout,
};

std::string_view to_string(Errc code);

// Every failure raised by the library. `location()` is a line number for
// file parsers and a character offset for the formula parser.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message,
        std::optional<std::size_t> location = std::nullopt);

  Errc code() const noexcept { return code_; }
  std::optional<std::size_t> location() const noexcept { return location_; }

 private:
  Errc code_;
  std::optional<std::size_t> location_;
};

}  // namespace tracecause
