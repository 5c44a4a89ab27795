#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace iotprice {

// Deterministic sample source. The engine (mt19937_64) and both variate
// transforms are pinned here, rather than going through the standard
// distribution templates, because the standard leaves distribution
// algorithms implementation-defined; this way a seed reproduces the same
// stream on every platform and compiler.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : eng_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Zero-mean gaussian via Box-Muller; the pair is consumed in a fixed
    // order and the spare value cached.
    double gaussian(double sd) {
        if (has_spare_) {
            has_spare_ = false;
            return sd * spare_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1]: keeps log finite
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return sd * r * std::cos(a);
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace iotprice
