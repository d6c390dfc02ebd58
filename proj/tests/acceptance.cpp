#include <iostream>

#include "selftest.hpp"

int main() {
  const auto outcomes = polyvol::selftest::runAll(std::cout);
  int failed = 0;
  for (const auto& o : outcomes) failed += !o.pass;
  std::cout << (failed == 0 ? "ALL PASS" : "FAILED " + std::to_string(failed)) << std::endl;
  return failed == 0 ? 0 : 1;
}
