#include "mtjrng/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mtjrng/errors.hpp"
#include "mtjrng/parallel.hpp"

namespace mtjrng {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
} // namespace

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::vector<Individual>& pop) {
    std::size_t n = pop.size();
    std::vector<std::vector<std::size_t>> dominated(n); // i -> set i dominates
    std::vector<int> dom_count(n, 0);                   // how many dominate i
    std::vector<std::vector<std::size_t>> fronts(1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            if (dominates(pop[i].objectives, pop[j].objectives))
                dominated[i].push_back(j);
            else if (dominates(pop[j].objectives, pop[i].objectives))
                ++dom_count[i];
        }
        if (dom_count[i] == 0) {
            pop[i].rank = 0;
            fronts[0].push_back(i);
        }
    }
    while (!fronts.back().empty()) {
        std::vector<std::size_t> next;
        for (std::size_t i : fronts.back()) {
            for (std::size_t j : dominated[i]) {
                if (--dom_count[j] == 0) {
                    pop[j].rank = static_cast<int>(fronts.size());
                    next.push_back(j);
                }
            }
        }
        fronts.push_back(std::move(next));
    }
    fronts.pop_back(); // drop the empty terminator
    return fronts;
}

void crowding_distance(std::vector<Individual>& pop, const std::vector<std::size_t>& front) {
    for (std::size_t i : front) pop[i].crowding = 0.0;
    if (front.size() < 2) {
        for (std::size_t i : front) pop[i].crowding = inf;
        return;
    }
    auto accumulate = [&](auto key) {
        std::vector<std::size_t> order = front;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            double ka = key(pop[a]), kb = key(pop[b]);
            return ka != kb ? ka < kb : a < b;
        });
        double lo = key(pop[order.front()]), hi = key(pop[order.back()]);
        pop[order.front()].crowding = inf;
        pop[order.back()].crowding = inf;
        if (hi - lo <= 0.0) return; // degenerate objective, no spread signal
        for (std::size_t s = 1; s + 1 < order.size(); ++s) {
            double gap = key(pop[order[s + 1]]) - key(pop[order[s - 1]]);
            pop[order[s]].crowding += gap / (hi - lo);
        }
    };
    accumulate([](const Individual& ind) { return ind.objectives.energy; });
    accumulate([](const Individual& ind) { return ind.objectives.kl; });
}

namespace {

// Lower rank wins; within a rank, more crowding wins; ties keep `a`.
std::size_t tournament(const std::vector<Individual>& pop, Rng& rng) {
    std::size_t a = rng.below(pop.size());
    std::size_t b = rng.below(pop.size());
    if (pop[b].rank < pop[a].rank) return b;
    if (pop[b].rank == pop[a].rank && pop[b].crowding > pop[a].crowding) return b;
    return a;
}

} // namespace

Nsga2Result nsga2_run(const GenomeEvaluator& eval, const Nsga2Config& cfg,
                      RunArchive* archive) {
    if (cfg.pop_size < 2 || cfg.pop_size % 2 != 0)
        throw ConfigError("population size must be even and at least 2");
    if (cfg.generations < 0) throw ConfigError("negative generation count");
    std::size_t dim = eval.dim();
    double pm = cfg.mutation_prob >= 0.0 ? cfg.mutation_prob : 1.0 / static_cast<double>(dim);

    Rng ga_rng = Rng::substream(cfg.seed, 0x9a);
    std::uint64_t next_eval = 0;

    auto run_batch = [&](std::vector<Individual>& batch, int generation) {
        std::vector<EvalOutcome> outs(batch.size());
        parallel_for(batch.size(), cfg.threads, [&](std::size_t i) {
            outs[i] = eval.evaluate(batch[i].genome, derive_seed(cfg.seed, next_eval + i));
        });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            batch[i].objectives = outs[i].objectives;
            batch[i].valid = outs[i].valid;
            batch[i].score = outs[i].score;
            if (archive) {
                ArchiveRecord rec;
                rec.eval_index = next_eval + i;
                rec.generation = generation;
                rec.source = "nsga2";
                rec.genome = batch[i].genome;
                rec.valid = outs[i].valid;
                rec.objectives = outs[i].objectives;
                rec.score = outs[i].score;
                rec.reason = outs[i].reason;
                archive->append(std::move(rec));
            }
        }
        next_eval += batch.size();
    };

    // generation 0: uniform random population
    std::vector<Individual> pop(static_cast<std::size_t>(cfg.pop_size));
    for (Individual& ind : pop) {
        ind.genome.resize(dim);
        for (double& g : ind.genome) g = ga_rng.uniform();
    }
    run_batch(pop, 0);
    if (cfg.on_generation) cfg.on_generation(0);
    auto fronts = fast_nondominated_sort(pop);
    for (const auto& f : fronts) crowding_distance(pop, f);

    for (int gen = 1; gen <= cfg.generations; ++gen) {
        // variation: tournament parents, uniform crossover, Gaussian mutation
        std::vector<Individual> children;
        children.reserve(pop.size());
        while (children.size() < pop.size()) {
            const Individual& pa = pop[tournament(pop, ga_rng)];
            const Individual& pb = pop[tournament(pop, ga_rng)];
            Individual ca, cb;
            ca.genome = pa.genome;
            cb.genome = pb.genome;
            if (ga_rng.uniform() < cfg.crossover_prob) {
                for (std::size_t g = 0; g < dim; ++g)
                    if (ga_rng.uniform() < 0.5) std::swap(ca.genome[g], cb.genome[g]);
            }
            for (Individual* child : {&ca, &cb}) {
                for (double& g : child->genome) {
                    if (ga_rng.uniform() < pm)
                        g = std::clamp(g + cfg.mutation_sigma * ga_rng.gauss(), 0.0, 1.0);
                }
            }
            children.push_back(std::move(ca));
            if (children.size() < pop.size()) children.push_back(std::move(cb));
        }
        run_batch(children, gen);
        if (cfg.on_generation) cfg.on_generation(gen);

        // (mu + lambda) environmental selection
        std::vector<Individual> combined = pop;
        combined.insert(combined.end(), children.begin(), children.end());
        auto cfronts = fast_nondominated_sort(combined);
        std::vector<Individual> next;
        next.reserve(pop.size());
        for (const auto& front : cfronts) {
            crowding_distance(combined, front);
            if (next.size() + front.size() <= pop.size()) {
                for (std::size_t i : front) next.push_back(combined[i]);
                if (next.size() == pop.size()) break;
                continue;
            }
            // partial front: keep the best scalar score alive, then fill the
            // remaining slots by descending crowding
            std::size_t best = front.front();
            for (std::size_t i : front)
                if (combined[i].score < combined[best].score) best = i;
            combined[best].crowding = inf;
            std::vector<std::size_t> order = front;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                if (combined[a].crowding != combined[b].crowding)
                    return combined[a].crowding > combined[b].crowding;
                return a < b;
            });
            for (std::size_t s = 0; next.size() < pop.size(); ++s)
                next.push_back(combined[order[s]]);
            break;
        }
        pop = std::move(next);
        fronts = fast_nondominated_sort(pop);
        for (const auto& f : fronts) crowding_distance(pop, f);
    }

    std::vector<std::size_t> order(pop.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank;
        if (pop[a].crowding != pop[b].crowding) return pop[a].crowding > pop[b].crowding;
        return a < b;
    });
    Nsga2Result res;
    res.population.reserve(pop.size());
    for (std::size_t i : order) res.population.push_back(std::move(pop[i]));
    res.evaluations = next_eval;
    return res;
}

} // namespace mtjrng
