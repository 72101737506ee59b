#include <cstring>
#include <iostream>

#include "conclab/selftest.hpp"

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;
  const auto results = conclab::run_acceptance(quick, std::cout);
  int failed = 0;
  for (const auto& r : results)
    if (!r.pass) ++failed;
  if (failed) std::cout << failed << " criterion(s) failed\n";
  else std::cout << "all criteria passed\n";
  return failed == 0 ? 0 : 1;
}
