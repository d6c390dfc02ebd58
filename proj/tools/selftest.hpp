#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace polyvol::selftest {

struct Outcome {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the acceptance criteria in order, printing one PASS/FAIL line each.
std::vector<Outcome> runAll(std::ostream& out, std::uint64_t seed = 20240601);

// Single criterion, 1..9.
Outcome run(int id, std::uint64_t seed = 20240601);

}  // namespace polyvol::selftest
