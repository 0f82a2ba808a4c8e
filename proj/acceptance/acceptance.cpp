#include <cstdio>
#include <cstdlib>

#include "willmore/verify.hpp"

int main(int argc, char** argv) {
  willmore::VerifyOptions opts;
  for (int i = 1; i < argc; ++i) opts.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  willmore::run_acceptance(opts, [&](const willmore::CriterionResult& r) {
    std::printf("[%s] %2d %s | value %.6g tol %.3g | %.1f s | %s\n", r.passed ? "PASS" : "FAIL", r.id,
                r.name.c_str(), r.value, r.tolerance, r.seconds, r.detail.c_str());
    std::fflush(stdout);
    if (!r.passed) ++failed;
  });
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
