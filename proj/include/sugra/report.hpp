#pragma once

// Verification reports in text and JSON form.

#include <cstdint>
#include <string>

#include "sugra/sugra.hpp"

namespace sugra {

inline constexpr const char* kVersion = "1.0.0";

struct Report {
  std::string id;
  std::string description;
  std::uint64_t seed = 42;
  std::size_t points = 100;
  double tolerance = 1e-8;
  ResidualReport residuals;
  long long millis = 0;
};

// Human-readable table, one line per residual row and a verdict line.
std::string format_text(const Report& r, const Chart& chart);

// {version, id, seed, points, tolerance, rows, verdict, millis}; non-finite
// numbers are written as null.
std::string format_json(const Report& r);

}  // namespace sugra
