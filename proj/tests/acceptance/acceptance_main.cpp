// Prints one pass/fail line per acceptance criterion; exit status 0 iff all pass.
#include <cstdlib>
#include <iostream>
#include <string>

#include "omlevy/acceptance.hpp"

int main(int argc, char** argv) {
  omlevy::acceptance::Options opts;
  if (argc > 1) opts.seed = std::stoull(argv[1]);
  if (argc > 2) opts.threads = std::stoi(argv[2]);
  const auto results = omlevy::acceptance::run_all(opts);
  std::cout << omlevy::acceptance::render(results);
  const bool ok = omlevy::acceptance::all_passed(results);
  std::cout << (ok ? "ALL PASS" : "FAILURES") << "\n";
  return ok ? EXIT_SUCCESS : EXIT_FAILURE;
}
