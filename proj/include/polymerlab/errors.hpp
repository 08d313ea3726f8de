#pragma once

#include <stdexcept>
#include <string>

namespace polymerlab {

// Argument outside an operation's domain (u not in (0,1), t <= 1, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Parameters fall outside the regime a theorem or rule covers.
struct UnsupportedRegime : std::domain_error {
  using std::domain_error::domain_error;
};

// Requested moment E[w_+^i] does not exist (i >= alpha).
struct DivergentMoment : std::domain_error {
  using std::domain_error::domain_error;
};

// Refused because the work would be exponential or unreasonably large.
struct CostGuard : std::length_error {
  using std::length_error::length_error;
};

}  // namespace polymerlab
