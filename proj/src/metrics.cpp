#include "mtjrng/metrics.hpp"

#include <cmath>
#include <limits>

#include "mtjrng/errors.hpp"

namespace mtjrng {

bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
    bool no_worse = a.energy <= b.energy && a.kl <= b.kl;
    bool better = a.energy < b.energy || a.kl < b.kl;
    return no_worse && better;
}

double kl_divergence(const std::vector<std::uint64_t>& counts, const std::vector<double>& q) {
    if (counts.size() != q.size())
        throw OutOfRange("histogram and model bin counts differ");
    std::uint64_t total = 0;
    for (std::uint64_t c : counts) total += c;
    if (total == 0) throw EmptyHistogram("cannot compute KL of an empty histogram");
    double kl = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue; // 0*log(0) = 0 by convention
        double p = static_cast<double>(counts[i]) / static_cast<double>(total);
        if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
        kl += p * std::log(p / q[i]);
    }
    return kl;
}

double config_score(double energy_joules, double kl, double w1, double w2) {
    return w1 * (energy_joules / 1e-12) + w2 * kl;
}

EvalOutcome evaluate_config(const CoinFactory& factory, const TruncatedDistribution& target,
                            const EvalSettings& es, std::uint64_t seed) {
    EvalOutcome out;
    try {
        CheckResult cr = factory.check(derive_seed(seed, 1), es.threads);
        if (!cr.valid) {
            out.reason = cr.reason;
            return out;
        }
        auto coin = factory.make_coin(derive_seed(seed, 2), es.threads);
        SampleStats st = sample_many(target.cdf_fn(), target.a(), target.b(), es.k, *coin,
                                     static_cast<std::uint64_t>(es.n_samples));
        out.valid = true;
        out.flips = st.flips;
        out.objectives.energy = st.flips > 0 ? st.energy / static_cast<double>(st.flips) : 0.0;
        out.objectives.kl = kl_divergence(st.counts, target.bin_probs(es.k));
        out.score = config_score(out.objectives.energy, out.objectives.kl, es.w1, es.w2);
    } catch (const Error& e) {
        out = EvalOutcome{};
        out.reason = e.what();
    }
    return out;
}

PhysicsCoinFactory::PhysicsCoinFactory(DeviceParams params, Protocol proto, SimConfig sim,
                                       ValidationSettings validation, int calib_points,
                                       int calib_per_point)
    : params_(params), proto_(proto), sim_(sim), validation_(validation),
      calib_points_(calib_points), calib_per_point_(calib_per_point) {}

CheckResult PhysicsCoinFactory::check(std::uint64_t seed, unsigned n_threads) const {
    SimConfig cfg = sim_;
    cfg.seed = seed;
    ValidityReport vr = validate_device(params_, proto_, cfg, n_threads, validation_);
    return {vr.valid, vr.valid ? std::string{} : vr.message};
}

std::unique_ptr<CoinSource> PhysicsCoinFactory::make_coin(std::uint64_t seed,
                                                          unsigned n_threads) const {
    SimConfig cfg = sim_;
    cfg.seed = derive_seed(seed, 0);
    SCurve curve = calibrate_coin_curve(params_, proto_, cfg, calib_points_, calib_per_point_,
                                        n_threads);
    SimConfig flip_cfg = sim_;
    flip_cfg.seed = derive_seed(seed, 1);
    return std::make_unique<DeviceCoin>(params_, proto_, std::move(curve), flip_cfg);
}

PhysicsGenomeEvaluator::PhysicsGenomeEvaluator(ParamSpace space, TruncatedDistribution target,
                                               EvalSettings es, SimConfig sim)
    : space_(std::move(space)), target_(std::move(target)), es_(es), sim_(sim) {}

EvalOutcome PhysicsGenomeEvaluator::evaluate(const std::vector<double>& genome,
                                             std::uint64_t eval_seed) const {
    EvalOutcome out;
    try {
        DecodedConfig dc = space_.decode_config(genome);
        dc.params.validate();
        PhysicsCoinFactory factory(dc.params, dc.proto, sim_);
        return evaluate_config(factory, target_, es_, eval_seed);
    } catch (const Error& e) {
        out = EvalOutcome{};
        out.reason = e.what();
    }
    return out;
}

} // namespace mtjrng
