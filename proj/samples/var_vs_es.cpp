// VaR and ES on a position that loses 1 on a 5% event, scaled up.
#include <cstdio>

#include "losssense/losssense.hpp"

int main() {
  using namespace losssense;
  Position x = binary_position(0.05, -1.0, 0.0);
  std::printf("%10s %12s %12s\n", "lambda", "VaR_0.1", "ES_0.1");
  for (double l : {1.0, 10.0, 100.0, 1000.0}) std::printf("%10g %12g %12g\n", l, var(l * x, 0.1), es(l * x, 0.1));
  for (const auto& spec : {FunctionalSpec::var(0.1), FunctionalSpec::es(0.1)}) {
    auto v = sll_certify(spec, DomainSpec::full());
    std::printf("%s on the full space: %s (%s)\n", spec.name().c_str(), status_name(v.status), method_name(v.method));
  }
}
