// Runs the acceptance criteria and prints one line per criterion.

#include <iostream>

#include "hearcorners/corpus.hpp"

int main() {
  using namespace hearcorners::corpus;
  Context ctx;
  int failed = 0;
  for (const auto& check : acceptance_checks()) {
    const Row row = run_check(check, ctx);
    std::cout << format_row(row) << std::endl;
    if (!row.passed) ++failed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
