#ifndef RECAL_ERROR_HPP
#define RECAL_ERROR_HPP

#include <stdexcept>
#include <string>

namespace recal {

// Scenario/config file could not be parsed at all.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Input parsed but violates a documented bound or invariant.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace recal

#endif
