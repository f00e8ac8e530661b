#pragma once

// Test-only random data built on std::mt19937_64 raw output so values are
// identical across standard libraries.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace sdde::testing {

class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : engine_(seed) {}
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() {
        const double u1 = std::max(uniform(), 1e-300);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    std::vector<double> normals(std::size_t n, double scale = 1.0) {
        std::vector<double> out(n);
        for (double& x : out) x = scale * normal();
        return out;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace sdde::testing
