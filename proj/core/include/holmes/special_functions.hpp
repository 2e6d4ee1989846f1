#pragma once

namespace holmes {

/// Bessel function of the first kind, order 0 or 1, for |x| <= 50.
/// Miller backward recurrence normalized by J0 + 2 sum J_2k = 1; absolute error below 1e-13.
double bessel_j(int order, double x);
inline double bessel_j0(double x) { return bessel_j(0, x); }
inline double bessel_j1(double x) { return bessel_j(1, x); }

}  // namespace holmes
