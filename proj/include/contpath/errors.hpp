#ifndef CONTPATH_ERRORS_HPP
#define CONTPATH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace contpath {

// Dual point violates the l1 constraint set beyond tolerance.
class infeasible_dual_error : public std::domain_error {
 public:
  infeasible_dual_error(const std::string& what, double max_violation)
      : std::domain_error(what), max_violation_(max_violation) {}
  double max_violation() const noexcept { return max_violation_; }

 private:
  double max_violation_;
};

// Malformed or unreadable dataset / trace files.
class data_error : public std::runtime_error {
 public:
  explicit data_error(const std::string& what, long line = -1)
      : std::runtime_error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace contpath

#endif  // CONTPATH_ERRORS_HPP
