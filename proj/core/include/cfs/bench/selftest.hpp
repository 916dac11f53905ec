#pragma once

#include <ostream>
#include <string>

namespace cfs::bench {

// Runs the library-wide invariant suite, printing one [PASS]/[FAIL] line per
// invariant. `only` restricts to invariants whose name starts with the given
// prefix (e.g. "smoothing"). Returns the number of failures.
int runSelftest(std::ostream& out, int workers = 1, const std::string& only = "");

} // namespace cfs::bench
