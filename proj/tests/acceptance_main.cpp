// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite runner. With no arguments every criterion runs; otherwise
// the arguments select criteria by number (1..12). One PASS/FAIL line is
// printed per criterion; the exit code is the number of failures capped at 1.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "mrrlink/validate.hpp"

int main(int argc, char** argv) {
  mrrlink::CheckContext ctx;
  ctx.rng.master_seed = 1;
  ctx.scratch_dir = "acceptance_scratch";
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id < 1 || id > 12) {
      std::fprintf(stderr, "usage: %s [criterion 1..12 ...]\n", argv[0]);
      return 2;
    }
    ids.push_back(id);
  }
  const int failures = mrrlink::run_acceptance(ctx, ids);
  return failures > 0 ? 1 : 0;
}
