#pragma once

#include <string>
#include <vector>

namespace tepid {

enum class FitKind { power, exponential };
std::string fit_kind_name(FitKind kind);

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
};

struct FitResult {
  FitKind kind = FitKind::power;
  double a = 0.0;
  double b = 0.0;
  double mse = 0.0;  // mean squared residual in linear space
  bool ok = true;
  std::string diagnostic;  // set when ok is false
};

// Least-squares fit of y = a*x^b (log-space linear solve; requires positive
// x and y) or y = a*(e^{b*x} - 1) (1-dim scan over b with the closed-form
// optimal a per b, then local refinement; robust down to |b| ~ 1e-6).
// Fewer than 3 points, or non-positive data for the power fit, violate the
// contract; a degenerate design (e.g. identical abscissae) yields a result
// with ok = false and a diagnostic instead.
FitResult fit_curve(const std::vector<FitPoint>& points, FitKind kind);

}  // namespace tepid
