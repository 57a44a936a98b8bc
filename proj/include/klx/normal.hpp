#pragma once

#include <cmath>

#include "klx/types.hpp"

namespace klx {

inline double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi);
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Inverse standard normal CDF, rational approximation plus one Newton step.
double normal_quantile(double p);

}  // namespace klx
