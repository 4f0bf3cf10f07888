#ifndef CARDEX_ERRORS_HPP
#define CARDEX_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cardex {

/// Malformed input files or violated data contracts. The CLI maps this to
/// exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cardex

#endif  // CARDEX_ERRORS_HPP
