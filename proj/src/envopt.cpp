#include "mtjrng/envopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mtjrng/errors.hpp"

namespace mtjrng {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
} // namespace

Environment::Environment(const GenomeEvaluator& eval, RunArchive* archive)
    : eval_(eval), archive_(archive) {}

EnvState Environment::reset(std::uint64_t seed) {
    seed_ = seed;
    state_ = EnvState{};
    state_.genome.resize(eval_.dim());
    Rng rng = Rng::substream(seed, 0);
    for (double& g : state_.genome) g = rng.uniform();
    state_.score = inf;
    state_.best = inf; // first valid action always beats this
    ready_ = true;
    return state_;
}

StepResult Environment::step(const std::vector<double>& action) {
    if (!ready_) throw ConfigError("environment used before reset");
    if (action.size() != eval_.dim())
        throw OutOfRange("action length does not match the search space");
    std::vector<double> genome(action.size());
    for (std::size_t i = 0; i < action.size(); ++i)
        genome[i] = std::clamp(action[i], 0.0, 1.0);

    std::uint64_t idx = eval_count_++;
    EvalOutcome out = eval_.evaluate(genome, derive_seed(seed_, idx));

    StepResult res;
    res.outcome = out;
    if (!out.valid) {
        res.reward = -1.0;
    } else if (out.score < state_.best) {
        res.reward = 1.0;
        state_.best = out.score;
    } else {
        res.reward = 0.0;
    }
    state_.genome = genome;
    state_.score = out.valid ? out.score : inf;
    state_.valid = out.valid;
    ++state_.step;
    res.state = state_;

    if (archive_) {
        ArchiveRecord rec;
        rec.eval_index = idx;
        rec.generation = state_.step;
        rec.source = "env";
        rec.genome = genome;
        rec.valid = out.valid;
        rec.objectives = out.objectives;
        rec.score = out.score;
        rec.reason = out.reason;
        archive_->append(std::move(rec));
    }
    return res;
}

CemResult cem_agent(Environment& env, std::size_t dim, const CemConfig& cfg) {
    if (cfg.batch < 2 || cfg.elites < 1 || cfg.elites > cfg.batch)
        throw ConfigError("cem needs 2 <= elites <= batch");
    env.reset(cfg.seed);
    Rng rng = Rng::substream(cfg.seed, 0xce);

    CemResult res;
    res.mean.assign(dim, 0.5);
    res.sigma.assign(dim, cfg.init_sigma);

    std::vector<std::vector<double>> actions(static_cast<std::size_t>(cfg.batch));
    std::vector<double> scores(static_cast<std::size_t>(cfg.batch));
    while (res.steps < cfg.budget) {
        std::size_t batch = std::min<std::uint64_t>(static_cast<std::uint64_t>(cfg.batch),
                                                    cfg.budget - res.steps);
        for (std::size_t b = 0; b < batch; ++b) {
            actions[b].resize(dim);
            for (std::size_t g = 0; g < dim; ++g)
                actions[b][g] = std::clamp(res.mean[g] + res.sigma[g] * rng.gauss(), 0.0, 1.0);
            StepResult sr = env.step(actions[b]);
            scores[b] = sr.outcome.valid ? sr.outcome.score : inf;
            ++res.steps;
            if (sr.outcome.valid && sr.outcome.score < res.best_score) {
                res.best_score = sr.outcome.score;
                res.best_genome = actions[b];
                res.found_valid = true;
            }
        }
        if (cfg.on_batch) cfg.on_batch(res.steps);
        if (batch < static_cast<std::size_t>(cfg.elites)) break; // tail too small to refit
        std::vector<std::size_t> order(batch);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return scores[a] != scores[b] ? scores[a] < scores[b] : a < b;
        });
        std::size_t n_el = static_cast<std::size_t>(cfg.elites);
        for (std::size_t g = 0; g < dim; ++g) {
            double m = 0.0;
            for (std::size_t e = 0; e < n_el; ++e) m += actions[order[e]][g];
            m /= static_cast<double>(n_el);
            double v = 0.0;
            for (std::size_t e = 0; e < n_el; ++e) {
                double d = actions[order[e]][g] - m;
                v += d * d;
            }
            res.mean[g] = m;
            res.sigma[g] = std::max(std::sqrt(v / static_cast<double>(n_el)), cfg.sigma_floor);
        }
    }
    if (!res.found_valid) res.best_genome = res.mean; // nothing valid found
    return res;
}

} // namespace mtjrng
