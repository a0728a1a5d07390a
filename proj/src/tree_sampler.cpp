#include "mtjrng/tree_sampler.hpp"

#include "mtjrng/errors.hpp"

namespace mtjrng {

double coin_weight(const CdfFn& F, double x0, double x1, double x2) {
    if (!(x0 < x1 && x1 < x2)) throw OutOfRange("coin_weight requires x0 < x1 < x2");
    const double f0 = F(x0);
    const double f1 = F(x1);
    const double f2 = F(x2);
    const double span = f2 - f0;
    if (span <= 0.0) throw ZeroMassInterval("no probability mass between x0 and x2");
    return (f2 - f1) / span;
}

SampleResult sample(const CdfFn& F, double a, double b, int k, CoinSource& coins) {
    if (k < 1 || k > 30) throw OutOfRange("sample requires 1 <= k <= 30");
    if (!(a < b)) throw OutOfRange("sample requires a < b");
    double x0 = a;
    double x2 = b;
    // Carry the interval's endpoint CDF values so each level costs one new
    // evaluation of F (at the midpoint) instead of three.
    double f0 = F(x0);
    double f2 = F(x2);
    if (!(f2 - f0 > 0.0)) throw ZeroMassInterval("no probability mass between x0 and x2");
    std::uint64_t index = 0;
    for (int level = 0; level < k; ++level) {
        const double x1 = 0.5 * (x0 + x2);
        const double f1 = F(x1);
        const double span = f2 - f0;
        if (span <= 0.0) throw ZeroMassInterval("interval mass vanished during traversal");
        const double weight = (f2 - f1) / span;
        const int bit = coins.flip(weight);
        index = (index << 1) | static_cast<std::uint64_t>(bit);
        if (bit == 1) {
            x0 = x1;
            f0 = f1;
        } else {
            x2 = x1;
            f2 = f1;
        }
    }
    return {index, 0.5 * (x0 + x2)};
}

SampleStats sample_many(const CdfFn& F, double a, double b, int k, CoinSource& coins,
                        std::uint64_t n) {
    if (k < 1 || k > 30) throw OutOfRange("sample_many requires 1 <= k <= 30");
    SampleStats stats;
    stats.counts.assign(std::size_t{1} << k, 0);
    const double e0 = coins.energy();
    const std::uint64_t flips0 = coins.flips();
    for (std::uint64_t i = 0; i < n; ++i) {
        const SampleResult r = sample(F, a, b, k, coins);
        ++stats.counts[r.bin_index];
    }
    stats.energy = coins.energy() - e0;
    stats.flips = coins.flips() - flips0;
    return stats;
}

} // namespace mtjrng
