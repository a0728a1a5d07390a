#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mtjrng/archive.hpp"
#include "mtjrng/metrics.hpp"

namespace mtjrng {

struct Individual {
    std::vector<double> genome;
    ObjectivePair objectives = invalid_objectives();
    bool valid = false;
    double score = k_invalid_objective;
    int rank = -1;        // non-domination front index, 0 is best
    double crowding = 0.0;
};

// Deb's fast non-dominated sort: indices grouped into fronts (front 0 first,
// every individual in exactly one front); ranks are written back into pop.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::vector<Individual>& pop);

// Crowding distances for one front, written into pop: objective-boundary
// members get +inf, interior members the normalized neighbour gap summed over
// objectives. A zero objective range contributes nothing.
void crowding_distance(std::vector<Individual>& pop, const std::vector<std::size_t>& front);

struct Nsga2Config {
    int pop_size = 50;
    int generations = 50;
    double crossover_prob = 0.8;  // per pair, uniform gene exchange
    double mutation_sigma = 0.1;  // Gaussian step in normalized coordinates
    double mutation_prob = -1.0;  // per gene; negative means 1/dim
    std::uint64_t seed = 1;
    unsigned threads = 1;
    // Called after each generation's evaluations land (0 is the random
    // initial population); hosts progress lines and periodic archive saves.
    std::function<void(int generation)> on_generation;
};

struct Nsga2Result {
    std::vector<Individual> population; // final, ordered by (rank, crowding)
    std::uint64_t evaluations = 0;
};

// Elitist (mu + lambda) NSGA-II over [0,1]^dim with binary-tournament
// selection. Every evaluation is appended to `archive` when provided.
// Identical results for a given (config, evaluator) at any thread count.
Nsga2Result nsga2_run(const GenomeEvaluator& eval, const Nsga2Config& cfg,
                      RunArchive* archive = nullptr);

} // namespace mtjrng
