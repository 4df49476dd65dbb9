#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace irsnoma {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelftestReport {
  std::vector<SelftestCheck> checks;

  int passed() const;
  int failed() const;
};

/// Fast invariant suite over randomly drawn instances. Each check is
/// independent; an exception inside one check marks only that check failed.
SelftestReport run_selftest(std::uint64_t seed = 1);

/// One line per check followed by a "passed N, failed M" summary.
void print_selftest(std::ostream& os, const SelftestReport& report);

}  // namespace irsnoma
