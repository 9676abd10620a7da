#pragma once

#include <stdexcept>
#include <string>

namespace ccrm {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IOError : public Error {
 public:
  using Error::Error;
};

}  // namespace ccrm
