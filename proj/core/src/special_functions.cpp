#include "holmes/special_functions.hpp"

#include "holmes/common.hpp"

#include <cmath>

namespace holmes {

double bessel_j(int order, double x) {
    HOLMES_REQUIRE(order == 0 || order == 1, InvalidArgument, "bessel_j: order must be 0 or 1");
    HOLMES_REQUIRE(std::isfinite(x) && std::abs(x) <= 50.0, InvalidArgument, "bessel_j: |x| must not exceed 50");
    const double ax = std::abs(x);
    if (ax == 0.0) return order == 0 ? 1.0 : 0.0;
    // Start well above x; the recurrence is stable downwards and the surplus terms decay super-exponentially.
    const int start = 2 * ((static_cast<int>(ax) + 40) / 2);
    double next = 0.0, cur = 1e-300, j0 = 0.0, j1 = 0.0, norm = 0.0;
    for (int k = start; k >= 1; --k) {
        const double prev = 2.0 * k / ax * cur - next;  // J_{k-1}
        next = cur;
        cur = prev;
        if (k - 1 == 1) j1 = cur;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
        if (std::abs(cur) > 1e250) {
            next *= 1e-250;
            cur *= 1e-250;
            j1 *= 1e-250;
            norm *= 1e-250;
        }
    }
    j0 = cur;
    norm += j0;
    if (order == 0) return j0 / norm;
    return (x < 0 ? -1.0 : 1.0) * j1 / norm;
}

}  // namespace holmes
