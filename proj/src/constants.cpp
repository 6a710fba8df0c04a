#include "migrationlab/constants.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace migrationlab {
namespace {

double find_root(const std::function<double(double)>& f, const std::function<double(double)>& df,
                 double lo, double hi) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) throw std::logic_error("root bracket has no sign change");
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-14) break;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    double fx = f(x);
    double dfx = df(x);
    if (dfx == 0.0) break;
    double next = x - fx / dfx;
    if (!std::isfinite(next)) break;
    x = next;
  }
  return x;
}

PaperConstants compute() {
  // c0: only positive root of 3c^3 - 8c - 4; bracket of the positive root.
  double c0 = find_root([](double c) { return 3 * c * c * c - 8 * c - 4; },
                        [](double c) { return 9 * c * c - 8; }, 1.0, 3.0);
  // R0: largest real root of R^3 - 5R^2 + 3R + 3 (the other two lie below 2).
  double R0 = find_root([](double r) { return r * r * r - 5 * r * r + 3 * r + 3; },
                        [](double r) { return 3 * r * r - 10 * r + 3; }, 3.5, 5.0);
  PaperConstants pc;
  pc.c0 = c0;
  pc.R0 = R0;
  pc.alpha = 1.0 / (R0 - 1.0);
  pc.cT = 2.0 * (R0 + 1.0) / (R0 * R0 - 2.0 * R0 - 1.0);
  pc.tLin = 1.0 + 1.0 / R0;
  pc.c0_residual = std::abs(3 * c0 * c0 * c0 - 8 * c0 - 4);
  pc.R0_residual = std::abs(R0 * R0 * R0 - 5 * R0 * R0 + 3 * R0 + 3);
  return pc;
}

}  // namespace

const PaperConstants& paper_constants() {
  static const PaperConstants pc = compute();
  return pc;
}

}  // namespace migrationlab
