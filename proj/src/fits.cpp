#include "tepid/fits.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace tepid {

namespace {

double mse_against(const std::vector<FitPoint>& pts, double a, double b, bool exponential) {
  double acc = 0.0;
  for (const FitPoint& p : pts) {
    const double model = exponential ? a * std::expm1(b * p.x) : a * std::pow(p.x, b);
    const double r = model - p.y;
    acc += r * r;
  }
  return acc / static_cast<double>(pts.size());
}

FitResult fail(FitKind kind, std::string why) {
  FitResult r;
  r.kind = kind;
  r.ok = false;
  r.diagnostic = std::move(why);
  r.mse = std::numeric_limits<double>::infinity();
  return r;
}

FitResult fit_power(const std::vector<FitPoint>& pts) {
  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const FitPoint& p : pts) {
    mx += std::log(p.x);
    my += std::log(p.y);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const FitPoint& p : pts) {
    const double dx = std::log(p.x) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(p.y) - my);
  }
  if (sxx < 1e-300)
    return fail(FitKind::power, "degenerate design matrix: identical abscissae in log space");
  FitResult r;
  r.kind = FitKind::power;
  r.b = sxy / sxx;
  r.a = std::exp(my - r.b * mx);
  r.mse = mse_against(pts, r.a, r.b, false);
  return r;
}

// Closed-form least-squares amplitude for y = a*(e^{bx}-1) at fixed b;
// returns false when the basis column vanishes or overflows.
bool amplitude_for(const std::vector<FitPoint>& pts, double b, double* a_out) {
  double num = 0.0, den = 0.0;
  for (const FitPoint& p : pts) {
    const double g = std::expm1(b * p.x);
    num += p.y * g;
    den += g * g;
  }
  if (!std::isfinite(num) || !std::isfinite(den) || den < 1e-300) return false;
  *a_out = num / den;
  return std::isfinite(*a_out);
}

FitResult fit_exponential(const std::vector<FitPoint>& pts) {
  double best_b = 0.0, best_a = 0.0;
  double best_mse = std::numeric_limits<double>::infinity();
  auto consider = [&](double b) {
    double a = 0.0;
    if (!amplitude_for(pts, b, &a)) return;
    const double m = mse_against(pts, a, b, true);
    if (std::isfinite(m) && m < best_mse) {
      best_mse = m;
      best_a = a;
      best_b = b;
    }
  };

  // Log-spaced magnitude scan, both signs: covers the near-linear tiny-b
  // regime through steep growth without seeding assumptions.
  constexpr int kPerDecade = 40;
  constexpr double kMagLo = 1e-8, kMagHi = 10.0;
  const double step = std::pow(10.0, 1.0 / kPerDecade);
  for (double mag = kMagLo; mag <= kMagHi * (1.0 + 1e-12); mag *= step) {
    consider(mag);
    consider(-mag);
  }
  if (!std::isfinite(best_mse))
    return fail(FitKind::exponential, "degenerate design matrix: basis column vanished");

  // Golden-section refinement of b around the best grid cell; the tracked
  // best-seen candidate is returned, so a flat or noisy cell cannot regress.
  const double width = best_b * (step - 1.0);
  double lo = best_b - std::abs(width) * 2.0;
  double hi = best_b + std::abs(width) * 2.0;
  constexpr double kInvPhi = 0.6180339887498949;
  double c = hi - (hi - lo) * kInvPhi;
  double d = lo + (hi - lo) * kInvPhi;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    auto probe = [&](double b) {
      double a = 0.0;
      if (!amplitude_for(pts, b, &a)) return std::numeric_limits<double>::infinity();
      const double m = mse_against(pts, a, b, true);
      if (std::isfinite(m) && m < best_mse) {
        best_mse = m;
        best_a = a;
        best_b = b;
      }
      return m;
    };
    if (probe(c) < probe(d)) {
      hi = d;
    } else {
      lo = c;
    }
    c = hi - (hi - lo) * kInvPhi;
    d = lo + (hi - lo) * kInvPhi;
  }

  FitResult r;
  r.kind = FitKind::exponential;
  r.a = best_a;
  r.b = best_b;
  r.mse = best_mse;
  return r;
}

}  // namespace

std::string fit_kind_name(FitKind kind) {
  return kind == FitKind::power ? "power" : "exponential";
}

FitResult fit_curve(const std::vector<FitPoint>& points, FitKind kind) {
  if (points.size() < 3) throw std::invalid_argument("fit_curve needs at least 3 points");
  if (kind == FitKind::power) {
    for (const FitPoint& p : points)
      if (!(p.x > 0.0) || !(p.y > 0.0))
        throw std::invalid_argument("power fit requires positive coordinates");
    return fit_power(points);
  }
  return fit_exponential(points);
}

}  // namespace tepid
