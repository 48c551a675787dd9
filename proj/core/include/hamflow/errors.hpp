#pragma once

#include <stdexcept>
#include <string>

namespace hamflow {

/// Point outside the domain of the holomorphic symplectic form
/// (sphere antidiagonal 1 + z u = 0) or of a chart.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Integration of the complexified flow failed. `last_good_time` is the
/// last time the trajectory was known to be finite and in the domain.
class FlowDivergence : public std::runtime_error {
 public:
  FlowDivergence(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

/// The transported leaf no longer meets the real locus transversally, or
/// Newton did not converge: the time has left the interval on which the
/// transported foliation fibres over M.
class LeafDegeneracy : public std::runtime_error {
 public:
  LeafDegeneracy(const std::string& what, double last_good_time, double residual)
      : std::runtime_error(what), last_good_time_(last_good_time), residual_(residual) {}
  double last_good_time() const noexcept { return last_good_time_; }
  double residual() const noexcept { return residual_; }

 private:
  double last_good_time_;
  double residual_;
};

}  // namespace hamflow
