#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mtjrng/archive.hpp"
#include "mtjrng/metrics.hpp"

namespace mtjrng {

// Observation returned to the agent: the genome last acted on, its score,
// the best score seen this episode, and step count. Before any step the
// scores are +inf.
struct EnvState {
    std::vector<double> genome;
    double score = 0.0;
    double best = 0.0;
    bool valid = false;
    int step = 0;
};

struct StepResult {
    EnvState state;
    double reward = 0.0; // +1 new best, 0 valid but not improving, -1 invalid
    EvalOutcome outcome;
};

// Sequential tuning loop around a GenomeEvaluator: an action is a genome
// (components clamped to [0, 1]), evaluated on the spot; rewards track
// validity and record-breaking scores.
class Environment {
  public:
    explicit Environment(const GenomeEvaluator& eval, RunArchive* archive = nullptr);

    // Starts an episode: a fresh random genome, nothing evaluated, best = +inf.
    EnvState reset(std::uint64_t seed);
    StepResult step(const std::vector<double>& action);

    const EnvState& state() const { return state_; }
    std::uint64_t evaluations() const { return eval_count_; }

  private:
    const GenomeEvaluator& eval_;
    RunArchive* archive_;
    EnvState state_;
    std::uint64_t seed_ = 0;
    std::uint64_t eval_count_ = 0;
    bool ready_ = false;
};

struct CemConfig {
    int batch = 50;
    int elites = 10;
    double init_sigma = 0.25;
    double sigma_floor = 0.02;   // keeps the search from collapsing early
    std::uint64_t budget = 6000; // total environment steps
    std::uint64_t seed = 7;
    // Called after every batch with the running step count; hosts progress
    // lines and periodic archive saves.
    std::function<void(std::uint64_t steps_done)> on_batch;
};

struct CemResult {
    std::vector<double> best_genome;
    double best_score = k_invalid_objective;
    bool found_valid = false;
    std::uint64_t steps = 0;
    std::vector<double> mean; // final sampling distribution
    std::vector<double> sigma;
};

// Cross-entropy method driving the environment: sample a batch around the
// current mean, step the environment on each action, refit mean/sigma to the
// lowest-score elites. Runs until the step budget is spent.
CemResult cem_agent(Environment& env, std::size_t dim, const CemConfig& cfg);

} // namespace mtjrng
