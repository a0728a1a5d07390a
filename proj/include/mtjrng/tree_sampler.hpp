#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mtjrng/rng.hpp"

namespace mtjrng {

using CdfFn = std::function<double(double)>;

// A supplier of tunable biased coinflips. Device-backed implementations map
// the requested weight to a bias current and pay energy; the ideal source is
// a free PRNG Bernoulli draw.
class CoinSource {
  public:
    virtual ~CoinSource() = default;
    // Returns 1 with probability p_target (up to source imperfection).
    virtual int flip(double p_target) = 0;
    // Joule cost accumulated so far.
    virtual double energy() const = 0;
    virtual std::uint64_t flips() const = 0;
};

// Perfect coin from a PRNG stream; zero energy.
class IdealCoin final : public CoinSource {
  public:
    explicit IdealCoin(std::uint64_t seed) : master_(seed) {}
    int flip(double p_target) override {
        Rng rng = Rng::substream(master_, count_);
        ++count_;
        return rng.uniform() < p_target ? 1 : 0;
    }
    double energy() const override { return 0.0; }
    std::uint64_t flips() const override { return count_; }

  private:
    std::uint64_t master_;
    std::uint64_t count_ = 0;
};

// Always returns the same bit; test double for deterministic paths.
class ForcedCoin final : public CoinSource {
  public:
    explicit ForcedCoin(int bit) : bit_(bit) {}
    int flip(double) override {
        ++count_;
        return bit_;
    }
    double energy() const override { return 0.0; }
    std::uint64_t flips() const override { return count_; }

  private:
    int bit_;
    std::uint64_t count_ = 0;
};

// Probability that the next bit is 1 given the current interval [x0, x2]
// with midpoint x1: mass above the midpoint over mass of the interval.
double coin_weight(const CdfFn& F, double x0, double x1, double x2);

struct SampleResult {
    std::uint64_t bin_index = 0;
    double value = 0.0;
};

// One k-bit traversal: k weighted flips refine [a, b] to a width-(b-a)/2^k
// bin; returns the MSB-first bin index and the bin midpoint.
SampleResult sample(const CdfFn& F, double a, double b, int k, CoinSource& coins);

struct SampleStats {
    std::vector<std::uint64_t> counts; // 2^k bins
    double energy = 0.0;               // J, total over all flips
    std::uint64_t flips = 0;
};

// n independent traversals; flips == n*k exactly.
SampleStats sample_many(const CdfFn& F, double a, double b, int k, CoinSource& coins,
                        std::uint64_t n);

} // namespace mtjrng
