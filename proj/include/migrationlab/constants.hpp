#pragma once

namespace migrationlab {

/// Numeric constants of the migration model, all derived from the two cubic
/// roots c0 and R0.
struct PaperConstants {
  double c0;     ///< positive root of 3c^3 - 8c - 4 = 0 (MTLM phase factor)
  double R0;     ///< largest real root of R^3 - 5R^2 + 3R + 3 = 0 (MTLM ratio)
  double alpha;  ///< 1 / (R0 - 1)
  double cT;     ///< 2 (R0 + 1) / (R0^2 - 2 R0 - 1)
  double tLin;   ///< 1 + 1/R0, request split point of the linear play

  double c0_residual;  ///< |3 c0^3 - 8 c0 - 4|
  double R0_residual;  ///< |R0^3 - 5 R0^2 + 3 R0 + 3|
};

/// Root-finds both cubics (bisection then Newton polish) and evaluates the
/// closed forms. Residuals are <= 1e-9; the result is cached.
const PaperConstants& paper_constants();

}  // namespace migrationlab
