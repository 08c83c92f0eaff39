// Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero when
// any criterion fails. `--quick` skips the criteria reserved for full runs.

#include <cstdio>
#include <cstring>
#include <exception>

#include "tiedown/validation.hpp"

int main(int argc, char** argv) {
  tiedown::ValidationConfig cfg;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) cfg.quick = true;
  tiedown::Validator v(cfg);
  int failed = 0;
  for (int id = 1; id <= tiedown::criterion_count; ++id) {
    tiedown::CriterionResult r;
    try {
      r = v.run(id);
    } catch (const std::exception& e) {
      r.id = id;
      r.title = tiedown::Validator::title(id);
      r.passed = false;
      r.detail = std::string("error: ") + e.what();
    }
    const char* tag = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
    std::printf("[%s] criterion %2d  %-36s %8.2fs  %s\n", tag, id, r.title.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  }
  std::printf("%d of %d criteria failed\n", failed, tiedown::criterion_count);
  return failed == 0 ? 0 : 1;
}
