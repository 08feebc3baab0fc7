// Localized battery for a few catalog functionals.
#include <cstdio>

#include "losssense/losssense.hpp"

int main() {
  using namespace losssense;
  const FunctionalSpec specs[] = {FunctionalSpec::var(0.05), FunctionalSpec::es(0.05), FunctionalSpec::entropic(1.0),
                                  FunctionalSpec::expected_utility(power_s_utility(0.5, 0.5)),
                                  FunctionalSpec::oce(oce_remark_utility())};
  std::printf("%-28s %-12s %-12s %-12s %-12s\n", "functional", "sure", "pure", "expected", "full");
  for (const auto& s : specs) {
    auto rep = localized_battery(s);
    std::printf("%-28s", s.name().c_str());
    for (const auto& row : rep.rows) std::printf(" %-12s", status_name(row.status));
    std::printf("\n");
  }
}
