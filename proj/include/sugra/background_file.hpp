#pragma once

// Line-oriented background files.
//
//   [background]        id = ..., description = ...
//   [chart]             lorentz = u, x1, x2, x3, v
//                       riemann = y1, y2, y3, y4, y5, y6
//   [metric.lorentz]    signature = 1, 4
//                       g(u, v) = 1          (symmetric; unset entries are 0)
//                       singular = z         (one expression per line)
//   [metric.riemann]    signature = 0, 6
//   [flux]              phi = sin(y1)
//                       alpha = exp(x1) ^ u x1 x2 x3   (lines for one piece sum)
//   [sample]            box(y1) = -1, 1      (default box is [-1, 1])
//                       avoid = L - y1, margin = 0.05
//                       points = 100, seed = 42, tolerance = 1e-8
//
// '#' starts a comment. The chart is the Lorentzian names followed by the
// Riemannian ones.

#include <cstdint>
#include <optional>
#include <string>

#include "sugra/sugra.hpp"

namespace sugra {

class BackgroundFileError : public InputError {
 public:
  BackgroundFileError(std::size_t line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct BackgroundFile {
  Background background;
  std::optional<std::size_t> points;
  std::optional<std::uint64_t> seed;
  std::optional<double> tolerance;
};

BackgroundFile parse_background_text(const std::string& text);
BackgroundFile parse_background_file(const std::string& path);

}  // namespace sugra
