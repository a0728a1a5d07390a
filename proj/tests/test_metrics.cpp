#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mtjrng/errors.hpp"
#include "mtjrng/metrics.hpp"
#include "mtjrng/surrogate.hpp"

using namespace mtjrng;

namespace {

TruncatedDistribution shipped_target() {
    return TruncatedDistribution(GammaSpec{50.0, 311.44}, 0.10, 0.24);
}

// Comfortably inside validity: moderate damping, full K_i, low M_s.
const std::vector<double> good_genome{0.2, 1.0, 0.3, 0.5, 0.5, 0.5, 0.5, 0.5};

} // namespace

TEST_CASE("kl divergence matches hand-computed values and conventions") {
    const std::vector<std::uint64_t> c{30, 70};
    const std::vector<double> u{0.5, 0.5};
    const double want = 0.3 * std::log(0.3 / 0.5) + 0.7 * std::log(0.7 / 0.5);
    CHECK(kl_divergence(c, u) == doctest::Approx(want).epsilon(1e-12));

    // zero-count bins contribute nothing
    CHECK(kl_divergence({0, 100}, u) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(kl_divergence({0, 100}, {0.0, 1.0}) == doctest::Approx(0.0));

    // exact agreement has zero divergence
    CHECK(kl_divergence({25, 75}, {0.25, 0.75}) == doctest::Approx(0.0));

    // mass observed where the model has none
    CHECK(std::isinf(kl_divergence({1, 99}, {0.0, 1.0})));

    CHECK_THROWS_AS(kl_divergence({0, 0}, u), EmptyHistogram);
    CHECK_THROWS_AS(kl_divergence({1, 2, 3}, u), OutOfRange);

    // non-negativity on a spread of lopsided histograms
    for (std::uint64_t a = 1; a < 100; a += 7)
        CHECK(kl_divergence({a, 100 - a}, {0.3, 0.7}) >= -1e-12);
}

TEST_CASE("the score blends energy per picojoule with divergence") {
    CHECK(config_score(2e-12, 0.3, 0.2, 1.0) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(config_score(0.0, 0.42, 0.2, 1.0) == doctest::Approx(0.42).epsilon(1e-12));
    CHECK(config_score(1e-12, 0.0, 0.2, 1.0) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(config_score(3e-12, 0.1, 0.0, 2.0) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("dominance requires strict improvement in at least one objective") {
    const ObjectivePair a{1.0, 1.0};
    const ObjectivePair b{2.0, 2.0};
    CHECK(dominates(a, b));
    CHECK_FALSE(dominates(b, a));
    CHECK_FALSE(dominates(a, a)); // equal pairs never dominate

    const ObjectivePair c{1.0, 3.0};
    CHECK_FALSE(dominates(c, b));
    CHECK_FALSE(dominates(b, c));

    const ObjectivePair d{1.0, 2.0};
    CHECK(dominates(a, d));
    CHECK_FALSE(dominates(d, a));

    CHECK(dominates({1e-12, 0.05}, invalid_objectives()));
}

TEST_CASE("a valid surrogate pipeline yields calibrated objectives") {
    const TruncatedDistribution td = shipped_target();
    EvalSettings es;
    es.n_samples = 2500;
    es.k = 6;

    const SurrogateDevice dev(good_genome);
    CHECK(dev.keff() > 0.0);
    CHECK(dev.check(1, 1).valid);

    const EvalOutcome o = evaluate_config(dev, td, es, 42);
    REQUIRE(o.valid);
    CHECK(o.flips == 15000); // n_samples * k exactly
    // 2n*KL ~ chi-square(63): 92.01 is the 99th percentile
    CHECK(o.objectives.kl < 92.01 / (2.0 * 2500.0));
    CHECK(o.objectives.energy * 1e12 > 0.05);
    CHECK(o.objectives.energy * 1e12 < 0.6);
    CHECK(o.score ==
          doctest::Approx(config_score(o.objectives.energy, o.objectives.kl, es.w1, es.w2))
              .epsilon(1e-15));
    CHECK(o.reason.empty());

    // same seed replays bit-for-bit; a different seed resamples
    const EvalOutcome again = evaluate_config(dev, td, es, 42);
    CHECK(again.objectives.kl == o.objectives.kl);
    CHECK(again.objectives.energy == o.objectives.energy);
    CHECK(evaluate_config(dev, td, es, 43).objectives.kl != o.objectives.kl);
}

TEST_CASE("the ideal surrogate sits at the multinomial floor for free") {
    EvalSettings es;
    es.n_samples = 2500;
    es.k = 6;
    const SurrogateGenomeEvaluator ideal(shipped_target(), es, true);
    CHECK(ideal.dim() == 8);
    const EvalOutcome o = ideal.evaluate(good_genome, 42);
    REQUIRE(o.valid);
    CHECK(o.objectives.energy == 0.0);
    CHECK(o.objectives.kl < 92.01 / (2.0 * 2500.0));
    CHECK(o.score == doctest::Approx(es.w2 * o.objectives.kl).epsilon(1e-15));
}

TEST_CASE("failures fold into sentinel outcomes that name the cause") {
    EvalSettings es;
    es.n_samples = 500;
    es.k = 6;
    const SurrogateGenomeEvaluator eval(shipped_target(), es);

    // demag eats the anisotropy: no retention
    std::vector<double> noret = good_genome;
    noret[2] = 1.0;
    const EvalOutcome o1 = eval.evaluate(noret, 7);
    CHECK_FALSE(o1.valid);
    CHECK(o1.objectives.energy == k_invalid_objective);
    CHECK(o1.objectives.kl == k_invalid_objective);
    CHECK(o1.score == k_invalid_objective);
    CHECK(o1.flips == 0);
    CHECK(o1.reason.find("retention") != std::string::npos);

    // heavy damping flattens the S-curve below the 10/90 span
    std::vector<double> shallow = good_genome;
    shallow[0] = 0.9;
    const EvalOutcome o2 = eval.evaluate(shallow, 7);
    CHECK_FALSE(o2.valid);
    CHECK(o2.reason.find("span") != std::string::npos);

    // passes the static check but cannot invert the deepest tree weight
    std::vector<double> marginal = good_genome;
    marginal[0] = 0.425;
    CHECK(SurrogateDevice(marginal).check(1, 1).valid);
    const EvalOutcome o3 = eval.evaluate(marginal, 7);
    CHECK_FALSE(o3.valid);
    CHECK(o3.reason.find("calibrated span") != std::string::npos);

    // malformed genomes are caught, not propagated
    CHECK_FALSE(eval.evaluate({0.5, 0.5}, 7).valid);
    std::vector<double> nan_genome = good_genome;
    nan_genome[4] = std::nan("");
    CHECK_FALSE(eval.evaluate(nan_genome, 7).valid);
}

TEST_CASE("the physics-backed factory drives the same pipeline") {
    const TruncatedDistribution td = shipped_target();
    DeviceParams p;
    SimConfig sim;
    sim.seed = 9;
    EvalSettings es;
    es.n_samples = 300;
    es.k = 5;

    // trimmed sweep and calibration keep this a smoke-sized run
    ValidationSettings vs;
    vs.sweep = {-3e11, 3e11, 11, 100};
    const PhysicsCoinFactory fac(p, Protocol{ProtocolSOT{}}, sim, vs, 11, 100);
    const EvalOutcome o = evaluate_config(fac, td, es, 4242);
    REQUIRE(o.valid);
    CHECK(o.flips == 1500);
    CHECK(o.objectives.kl < 0.15);
    CHECK(o.objectives.energy * 1e12 > 0.1);
    CHECK(o.objectives.energy * 1e12 < 5.0);

    // a sweep that cannot steer the coin is rejected before any sampling
    ValidationSettings nv;
    nv.sweep = {-1e9, 1e9, 7, 100};
    const PhysicsCoinFactory bad(p, Protocol{ProtocolSOT{}}, sim, nv, 11, 100);
    const EvalOutcome ob = evaluate_config(bad, td, es, 4242);
    CHECK_FALSE(ob.valid);
    CHECK(ob.flips == 0);
    CHECK(ob.score == k_invalid_objective);
    CHECK(ob.reason.find("low probabilities") != std::string::npos);
}

TEST_CASE("the physics genome evaluator rejects malformed genomes cheaply") {
    EvalSettings es;
    es.n_samples = 100;
    es.k = 4;
    SimConfig sim;
    const PhysicsGenomeEvaluator eval(ParamSpace::sot(), shipped_target(), es, sim);
    CHECK(eval.dim() == 8);
    const EvalOutcome o = eval.evaluate({0.5, 0.5, 0.5}, 1);
    CHECK_FALSE(o.valid);
    CHECK_FALSE(o.reason.empty());
    CHECK(o.score == k_invalid_objective);
}
