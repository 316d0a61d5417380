#ifndef STAKIT_ERRORS_HPP
#define STAKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace stakit {

/// Thrown when an enumeration or table would exceed its admissible size.
class capacity_error : public std::runtime_error {
  public:
    explicit capacity_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when an iterative solver fails to reach its tolerance, or when two
/// algebraically equivalent routes to the same value disagree beyond tolerance.
class convergence_error : public std::runtime_error {
  public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stakit

#endif
