#ifndef CONTPATH_VALIDATE_HPP
#define CONTPATH_VALIDATE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace contpath {

// Randomized self-checks of the library's certified inequalities: warm-start
// sandwich, stepwise descent slack, fast-path contraction, screening safety
// and active-set membership bounds. Violations carry the seed that reproduces
// them.
struct validation_suite {
  std::string name;
  long trials = 0;
  long violations = 0;
  std::vector<std::string> messages;
};

struct validation_report {
  std::vector<validation_suite> suites;
  long total_violations() const;
};

validation_report run_validation(int trials, std::uint64_t seed, std::ostream* log = nullptr);

}  // namespace contpath

#endif  // CONTPATH_VALIDATE_HPP
