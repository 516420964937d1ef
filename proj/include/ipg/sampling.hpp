#pragma once

// Deterministic random sampling for variable instantiation.
//
// The generator derives one Rng per (session seed, stream index) pair, so a
// seed corpus always reproduces bit-identically under the same session seed
// regardless of how work is interleaved. uniform01 is built directly from
// mt19937_64 output rather than std::uniform_real_distribution, whose
// sequences are implementation-defined.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "ipg/errors.hpp"
#include "ipg/units.hpp"

namespace ipg {

class Rng {
public:
    explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

    // Derives an independent child stream; mixing uses splitmix64 so nearby
    // indices do not correlate.
    Rng child(uint64_t index) const {
        uint64_t z = seed_ + 0x9E3779B97F4A7C15ull * (index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return Rng(z ^ (z >> 31));
    }

    uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi]; degenerate ranges return the point.
    double uniform(double lo, double hi) {
        if (lo == hi) return lo;
        return lo + (hi - lo) * uniform01();
    }

    // Uniform integer in [0, n).
    size_t pick(size_t n) {
        if (n == 0) throw PreconditionError("pick from empty range");
        return static_cast<size_t>(engine_() % n);
    }

private:
    uint64_t seed_;
    std::mt19937_64 engine_;
};

// Rounds to `digits` significant decimal digits (default contract: 4).
inline double round_sig_digits(double v, int digits = 4) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, v);
    return std::strtod(buf, nullptr);
}

// One entry of a variable dictionary: a name, its unit, and the sampling
// range proposed by analysis.
struct VariableSpec {
    std::string name;
    std::string unit;
    double min = 0.0;
    double max = 0.0;
};

// Draws a value uniformly from the spec's range and rounds it to 4
// significant digits for readability. Rounding at an interval edge could
// escape the range, so the result is clamped back; range containment is the
// stronger contract.
inline double sample_value(const VariableSpec& spec, Rng& rng) {
    if (spec.min > spec.max)
        throw PreconditionError("variable " + spec.name + " has min > max");
    double v = rng.uniform(spec.min, spec.max);
    v = round_sig_digits(v, 4);
    if (v < spec.min) v = spec.min;
    if (v > spec.max) v = spec.max;
    return v;
}

} // namespace ipg
