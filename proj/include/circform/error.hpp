#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace circform {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An interval operation produced a set shape the protocol can never reach.
class MoreThanTwoPieces : public Error {
 public:
  using Error::Error;
};

class EmptyHull : public Error {
 public:
  using Error::Error;
};

// The follower pair's corrected set became empty: the noise bound or one of
// the standing assumptions does not hold for the simulated data.
class EstimatorInconsistency : public Error {
 public:
  using Error::Error;
};

class AmbiguousFollower : public Error {
 public:
  using Error::Error;
};

class InfeasibleInit : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  InvalidConfig(std::vector<std::string> clauses, const std::string& what)
      : Error(what), clauses_(std::move(clauses)) {}

  const std::vector<std::string>& clauses() const noexcept { return clauses_; }

 private:
  std::vector<std::string> clauses_;
};

}  // namespace circform
