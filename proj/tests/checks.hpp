#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>

// assert() disappears under NDEBUG, so tests use their own macro.
#define CHECK(cond)                                                      \
  do {                                                                   \
    if (!(cond)) {                                                       \
      std::fprintf(stderr, "CHECK failed %s:%d: %s\n", __FILE__,         \
                   __LINE__, #cond);                                     \
      std::abort();                                                      \
    }                                                                    \
  } while (0)

#define CHECK_NEAR(a, b, tol)                                            \
  do {                                                                   \
    const double check_a = (a);                                          \
    const double check_b = (b);                                          \
    if (!(std::fabs(check_a - check_b) <= (tol))) {                      \
      std::fprintf(stderr, "CHECK_NEAR failed %s:%d: %s=%.17g %s=%.17g\n", \
                   __FILE__, __LINE__, #a, check_a, #b, check_b);        \
      std::abort();                                                      \
    }                                                                    \
  } while (0)
