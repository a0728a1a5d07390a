#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mtjrng/errors.hpp"
#include "mtjrng/gamma_dist.hpp"
#include "mtjrng/metrics.hpp"
#include "mtjrng/tree_sampler.hpp"

using namespace mtjrng;

namespace {

// Plays back a fixed bit string; extra flips are an error in the test logic.
class ScriptCoin final : public CoinSource {
  public:
    explicit ScriptCoin(std::vector<int> bits) : bits_(std::move(bits)) {}
    int flip(double) override {
        REQUIRE(pos_ < bits_.size());
        return bits_[pos_++];
    }
    double energy() const override { return 0.0; }
    std::uint64_t flips() const override { return pos_; }

  private:
    std::vector<int> bits_;
    std::size_t pos_ = 0;
};

// Ideal coin that charges a fixed price per flip.
class PricedCoin final : public CoinSource {
  public:
    PricedCoin(std::uint64_t seed, double price) : inner_(seed), price_(price) {}
    int flip(double p) override { return inner_.flip(p); }
    double energy() const override { return price_ * static_cast<double>(inner_.flips()); }
    std::uint64_t flips() const override { return inner_.flips(); }

  private:
    IdealCoin inner_;
    double price_;
};

const CdfFn uniform01 = [](double x) { return x; };

} // namespace

TEST_CASE("coin weight is the mass above the midpoint over the interval mass") {
    CHECK(coin_weight(uniform01, 0.0, 0.5, 1.0) == doctest::Approx(0.5));
    CHECK(coin_weight(uniform01, 0.0, 0.25, 1.0) == doctest::Approx(0.75));
    // exponential CDF, hand-evaluated
    const CdfFn expcdf = [](double x) { return 1.0 - std::exp(-x); };
    const double want = (std::exp(-1.0) - std::exp(-2.0)) / (std::exp(-0.5) - std::exp(-2.0));
    CHECK(coin_weight(expcdf, 0.5, 1.0, 2.0) == doctest::Approx(want).epsilon(1e-12));

    CHECK_THROWS_AS(coin_weight(uniform01, 0.5, 0.5, 1.0), OutOfRange);
    CHECK_THROWS_AS(coin_weight(uniform01, 0.9, 0.5, 1.0), OutOfRange);
    const CdfFn flat = [](double) { return 0.3; };
    CHECK_THROWS_AS(coin_weight(flat, 0.0, 0.5, 1.0), ZeroMassInterval);
}

TEST_CASE("scripted traversals land in the hand-computed bin") {
    // 1 refines upward, 0 downward; the index collects bits MSB-first.
    ScriptCoin c101({1, 0, 1});
    const SampleResult r = sample(uniform01, 0.0, 8.0, 3, c101);
    CHECK(r.bin_index == 5);
    CHECK(r.value == doctest::Approx(5.5));

    ScriptCoin ones({1, 1, 1, 1});
    const SampleResult top = sample(uniform01, 0.0, 1.0, 4, ones);
    CHECK(top.bin_index == 15);
    CHECK(top.value == doctest::Approx(1.0 - 0.5 / 16.0));

    ScriptCoin zeros({0, 0, 0, 0});
    const SampleResult bottom = sample(uniform01, 0.0, 1.0, 4, zeros);
    CHECK(bottom.bin_index == 0);
    CHECK(bottom.value == doctest::Approx(0.5 / 16.0));
}

TEST_CASE("bin index and value stay consistent for random traversals") {
    IdealCoin coin(2024);
    const double a = 0.10, b = 0.24;
    const int k = 7;
    for (int i = 0; i < 200; ++i) {
        const SampleResult r = sample(uniform01, a, b, k, coin);
        CHECK(r.bin_index < (std::uint64_t{1} << k));
        const double mid =
            a + (b - a) * ((static_cast<double>(r.bin_index) + 0.5) / std::pow(2.0, k));
        CHECK(r.value == doctest::Approx(mid).epsilon(1e-12));
    }
}

TEST_CASE("one-level tree realizes exactly the requested coin weight") {
    // For k = 1 the bit IS the sample; the 1-frequency must match the
    // analytic weight within a 4-sigma binomial band.
    TruncatedDistribution td(GammaSpec{50.0, 311.44}, 0.10, 0.24);
    const CdfFn F = td.cdf_fn();
    const double w = coin_weight(F, 0.10, 0.17, 0.24);
    IdealCoin coin(99);
    const std::uint64_t n = 40000;
    SampleStats st = sample_many(F, 0.10, 0.24, 1, coin, n);
    const double phat = static_cast<double>(st.counts[1]) / static_cast<double>(n);
    const double sigma = std::sqrt(w * (1.0 - w) / static_cast<double>(n));
    CHECK(std::abs(phat - w) < 4.0 * sigma);
}

TEST_CASE("ideal-coin histogram converges on the truncated-gamma masses") {
    TruncatedDistribution td(GammaSpec{50.0, 311.44}, 0.10, 0.24);
    const int k = 6;
    IdealCoin coin(7);
    const std::uint64_t n = 5000;
    SampleStats st = sample_many(td.cdf_fn(), td.a(), td.b(), k, coin, n);

    std::uint64_t total = 0;
    for (std::uint64_t c : st.counts) total += c;
    CHECK(total == n);
    CHECK(st.flips == n * k);
    CHECK(st.energy == 0.0);

    // 2n*KL is asymptotically chi-square with 2^k - 1 dof; 92.01 is the 99th
    // percentile at 63 dof.
    const double kl = kl_divergence(st.counts, td.bin_probs(k));
    CHECK(kl < 92.01 / (2.0 * static_cast<double>(n)));

    // the empirical mode must land on a near-maximal-mass bin (the analytic
    // peak is flat, so exact argmax agreement is not expected at this n)
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < st.counts.size(); ++i)
        if (st.counts[i] > st.counts[argmax]) argmax = i;
    const std::vector<double> q = td.bin_probs(k);
    double qmax = 0.0;
    for (double qi : q) qmax = std::max(qmax, qi);
    CHECK(q[argmax] > 0.9 * qmax);
}

TEST_CASE("flip count is exact and the energy meter integrates the coin cost") {
    const double price = 0.37e-12;
    PricedCoin coin(5, price);
    const std::uint64_t n = 1234;
    const int k = 9;
    SampleStats st = sample_many(uniform01, 0.0, 1.0, k, coin, n);
    CHECK(st.flips == n * static_cast<std::uint64_t>(k));
    CHECK(st.energy == doctest::Approx(price * static_cast<double>(n * k)).epsilon(1e-12));
}

TEST_CASE("same seed reproduces the histogram, different seed does not") {
    TruncatedDistribution td(GammaSpec{50.0, 311.44}, 0.10, 0.24);
    IdealCoin c1(31), c2(31), c3(32);
    SampleStats a = sample_many(td.cdf_fn(), td.a(), td.b(), 5, c1, 2000);
    SampleStats b = sample_many(td.cdf_fn(), td.a(), td.b(), 5, c2, 2000);
    SampleStats c = sample_many(td.cdf_fn(), td.a(), td.b(), 5, c3, 2000);
    CHECK(a.counts == b.counts);
    CHECK(a.counts != c.counts);
}

TEST_CASE("degenerate inputs are rejected") {
    IdealCoin coin(1);
    CHECK_THROWS_AS(sample(uniform01, 0.0, 1.0, 0, coin), OutOfRange);
    CHECK_THROWS_AS(sample(uniform01, 0.0, 1.0, 31, coin), OutOfRange);
    CHECK_THROWS_AS(sample(uniform01, 1.0, 1.0, 3, coin), OutOfRange);
    CHECK_THROWS_AS(sample(uniform01, 2.0, 1.0, 3, coin), OutOfRange);

    // mass that vanishes mid-traversal: the upper half is flat, and a forced
    // descent into it has nothing left to split
    const CdfFn halfflat = [](double x) { return std::min(2.0 * x, 1.0); };
    ForcedCoin up(1);
    CHECK_THROWS_AS(sample(halfflat, 0.0, 1.0, 3, up), ZeroMassInterval);

    const CdfFn empty = [](double) { return 0.4; };
    CHECK_THROWS_AS(sample(empty, 0.0, 1.0, 3, coin), ZeroMassInterval);
}

TEST_CASE("forced coins pin the traversal to the support edges") {
    TruncatedDistribution td(GammaSpec{50.0, 311.44}, 0.10, 0.24);
    ForcedCoin up(1), down(0);
    const SampleResult hi = sample(td.cdf_fn(), td.a(), td.b(), 8, up);
    const SampleResult lo = sample(td.cdf_fn(), td.a(), td.b(), 8, down);
    CHECK(hi.bin_index == 255);
    CHECK(lo.bin_index == 0);
    CHECK(hi.value > 0.2397);
    CHECK(lo.value < 0.1003);
}
