#pragma once

#include <stdexcept>
#include <string>

namespace posmark {

/// Raised for every recoverable failure in the toolkit (bad input, violated
/// precondition). Messages are single-line so the CLI can print them as-is.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace posmark
