#include "mbio/hw/fixed_point.hpp"

#include <algorithm>

#include "mbio/error.hpp"
#include "mbio/filters.hpp"

namespace mbio::hw {

std::vector<std::int32_t> quantize_kernel(const std::vector<double>& kernel, int frac) {
    if (kernel.empty() || frac < 1 || frac > 30) {
        throw Error(ErrorCode::Contract, "kernel quantization needs taps and 1..30 fraction bits");
    }
    const std::int64_t one = std::int64_t{1} << frac;
    std::vector<std::int32_t> q(kernel.size());
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < kernel.size(); ++i) {
        q[i] = static_cast<std::int32_t>(std::llround(std::ldexp(kernel[i], frac)));
        sum += q[i];
    }
    const auto peak = std::max_element(kernel.begin(), kernel.end()) - kernel.begin();
    q[static_cast<std::size_t>(peak)] += static_cast<std::int32_t>(one - sum);
    return q;
}

std::vector<std::int32_t> quantized_gaussian(double sigma, int radius, int frac) {
    return quantize_kernel(gaussian_kernel(sigma, radius), frac);
}

}  // namespace mbio::hw
