#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mtjrng/gamma_dist.hpp"
#include "mtjrng/param_space.hpp"
#include "mtjrng/tree_sampler.hpp"

namespace mtjrng {

// Both objectives are minimized: mean Joule cost per coinflip and the KL
// divergence of the sampled histogram against the target bin masses.
struct ObjectivePair {
    double energy = 0.0; // J per coinflip
    double kl = 0.0;     // nats
};

// Invalid configurations carry this sentinel in both objectives and as score.
inline constexpr double k_invalid_objective = 1e6;

inline ObjectivePair invalid_objectives() {
    return {k_invalid_objective, k_invalid_objective};
}

// True when a is no worse in both objectives and strictly better in one.
bool dominates(const ObjectivePair& a, const ObjectivePair& b);

// KL(Phat || Q) in nats from bin counts against model bin masses. Zero-count
// bins contribute nothing; a count in a zero-mass bin gives +inf. Throws
// EmptyHistogram when the counts sum to zero and OutOfRange on a size
// mismatch.
double kl_divergence(const std::vector<std::uint64_t>& counts, const std::vector<double>& q);

// Scalarization used for ranking and rewards: w1 * (energy / 1 pJ) + w2 * kl.
double config_score(double energy_joules, double kl, double w1, double w2);

struct EvalSettings {
    long n_samples = 2500; // tree traversals per evaluation
    int k = 8;             // tree depth, 2^k bins
    double w1 = 0.2;       // score weight on energy (per pJ)
    double w2 = 1.0;       // score weight on KL
    unsigned threads = 1;
};

struct CheckResult {
    bool valid = false;
    std::string reason; // empty when valid
};

// Seam between the evaluation pipeline and the coin implementation. The
// physics factory validates and calibrates real devices; test doubles skip
// straight to an analytic coin.
class CoinFactory {
  public:
    virtual ~CoinFactory() = default;
    virtual CheckResult check(std::uint64_t seed, unsigned n_threads) const = 0;
    virtual std::unique_ptr<CoinSource> make_coin(std::uint64_t seed,
                                                  unsigned n_threads) const = 0;
};

struct EvalOutcome {
    bool valid = false;
    ObjectivePair objectives = invalid_objectives();
    double score = k_invalid_objective;
    std::string reason;       // failure description for invalid outcomes
    std::uint64_t flips = 0;  // coinflips spent (0 when invalid)
};

// Full pipeline for one configuration: device check, coin construction,
// n_samples tree traversals, then objectives and score. Every failure mode
// (span, monotonicity, reset, simulation blowup, inversion range) folds into
// an invalid outcome with the sentinel objectives.
EvalOutcome evaluate_config(const CoinFactory& factory, const TruncatedDistribution& target,
                            const EvalSettings& es, std::uint64_t seed);

// Genome in, outcome out; the interface the optimizers run against.
class GenomeEvaluator {
  public:
    virtual ~GenomeEvaluator() = default;
    virtual std::size_t dim() const = 0;
    virtual EvalOutcome evaluate(const std::vector<double>& genome,
                                 std::uint64_t eval_seed) const = 0;
};

// CoinFactory backed by the LLG device simulation.
class PhysicsCoinFactory final : public CoinFactory {
  public:
    PhysicsCoinFactory(DeviceParams params, Protocol proto, SimConfig sim,
                       ValidationSettings validation = {}, int calib_points = 21,
                       int calib_per_point = 500);

    CheckResult check(std::uint64_t seed, unsigned n_threads) const override;
    std::unique_ptr<CoinSource> make_coin(std::uint64_t seed,
                                          unsigned n_threads) const override;

  private:
    DeviceParams params_;
    Protocol proto_;
    SimConfig sim_;
    ValidationSettings validation_;
    int calib_points_;
    int calib_per_point_;
};

// Decodes genomes through a ParamSpace and evaluates them on the physics
// pipeline.
class PhysicsGenomeEvaluator final : public GenomeEvaluator {
  public:
    PhysicsGenomeEvaluator(ParamSpace space, TruncatedDistribution target, EvalSettings es,
                           SimConfig sim);

    std::size_t dim() const override { return space_.dim(); }
    EvalOutcome evaluate(const std::vector<double>& genome,
                         std::uint64_t eval_seed) const override;
    const ParamSpace& space() const { return space_; }

  private:
    ParamSpace space_;
    TruncatedDistribution target_;
    EvalSettings es_;
    SimConfig sim_;
};

} // namespace mtjrng
