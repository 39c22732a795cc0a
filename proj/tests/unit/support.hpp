#pragma once

#include <cmath>
#include <functional>

#include "doctest.h"
#include "dter/error.hpp"

inline dter::ErrorCode error_code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const dter::Error& e) {
    return e.code();
  }
  FAIL("expected a dter::Error");
  return dter::ErrorCode::ConfigInvalid;
}

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}
