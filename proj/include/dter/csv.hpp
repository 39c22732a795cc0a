#pragma once

#include <cstdio>
#include <string>

namespace dter {

/// Locale-independent number formatting shared by every CSV writer.
inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace dter
