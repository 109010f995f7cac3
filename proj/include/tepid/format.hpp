#pragma once

// Deterministic number formatting shared by every serialized artifact (CSV,
// run documents, circuit dumps). %.17g round-trips doubles exactly and is
// locale-independent under the default "C" locale, which the CLI never
// changes — byte-identical reruns depend on this.

#include <cstdio>
#include <string>

namespace tepid {

inline std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace tepid
