#include "mtjrng/surrogate.hpp"

#include <algorithm>
#include <cmath>

#include "mtjrng/constants.hpp"
#include "mtjrng/errors.hpp"

namespace mtjrng {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Same coin contract as the device-backed one: invert a tabulated S-curve,
// apply the realized probability, pay Joule cost per flip.
class SurrogateCoin final : public CoinSource {
  public:
    SurrogateCoin(double width, std::uint64_t seed, bool ideal)
        : width_(width), master_(seed), ideal_(ideal) {
        j_grid_.resize(SurrogateDevice::n_grid);
        p_grid_.resize(SurrogateDevice::n_grid);
        double jmax = SurrogateDevice::j_max;
        for (int i = 0; i < SurrogateDevice::n_grid; ++i) {
            j_grid_[i] = -jmax + 2.0 * jmax * i / (SurrogateDevice::n_grid - 1);
            p_grid_[i] = logistic(j_grid_[i] / width_);
        }
    }

    int flip(double p_target) override {
        double realized = p_target;
        if (!ideal_) {
            double j = invert(p_target);
            realized = logistic(j / width_);
            energy_ += flip_energy(j);
        }
        Rng rng = Rng::substream(master_, count_);
        ++count_;
        return rng.uniform() < realized ? 1 : 0;
    }

    double energy() const override { return energy_; }
    std::uint64_t flips() const override { return count_; }

  private:
    double invert(double p) const {
        if (p < p_grid_.front() || p > p_grid_.back())
            throw OutOfRange("requested weight outside the calibrated span");
        auto hi = std::lower_bound(p_grid_.begin(), p_grid_.end(), p);
        if (hi == p_grid_.begin()) return j_grid_.front();
        std::size_t i = static_cast<std::size_t>(hi - p_grid_.begin());
        double frac = (p - p_grid_[i - 1]) / (p_grid_[i] - p_grid_[i - 1]);
        return j_grid_[i - 1] + frac * (j_grid_[i] - j_grid_[i - 1]);
    }

    // Quadratic-in-current cost with a floor, scaled by curve width: shallow
    // curves need more drive per unit of bias, so they cost more.
    double flip_energy(double j) const {
        double u = j / SurrogateDevice::j_max;
        return (0.05 + 0.95 * u * u) * (width_ / 5e10) * 1e-12;
    }

    double width_;
    std::uint64_t master_;
    bool ideal_;
    std::vector<double> j_grid_, p_grid_;
    double energy_ = 0.0;
    std::uint64_t count_ = 0;
};

} // namespace

SurrogateDevice::SurrogateDevice(std::vector<double> genome, bool ideal) : ideal_(ideal) {
    ParamSpace space = ParamSpace::sot();
    std::vector<double> v = space.decode_values(genome); // validates length
    double alpha = v[0], k_i = v[1], m_s = v[2];
    const double t_f = 1.1e-9; // matches the device default free layer
    keff_ = k_i / t_f - 0.5 * constants::mu0 * m_s * m_s;
    // Damping broadens the transition; range tuned so roughly half the alpha
    // axis can still reach the 10/90 span at the grid edges.
    width_ = 5e10 * (1.0 + 4.0 * (alpha - 0.01) / 0.09);
}

CheckResult SurrogateDevice::check(std::uint64_t, unsigned) const {
    if (keff_ <= 0.0)
        return {false, "free layer loses retention: K_eff <= 0"};
    double p_high = logistic(j_max / width_);
    if (p_high < 0.90 || 1.0 - p_high > 0.10)
        return {false, "attainable span narrower than [0.10, 0.90]"};
    return {true, {}};
}

std::unique_ptr<CoinSource> SurrogateDevice::make_coin(std::uint64_t seed, unsigned) const {
    return std::make_unique<SurrogateCoin>(width_, seed, ideal_);
}

SurrogateGenomeEvaluator::SurrogateGenomeEvaluator(TruncatedDistribution target,
                                                   EvalSettings es, bool ideal)
    : target_(std::move(target)), es_(es), ideal_(ideal) {}

std::size_t SurrogateGenomeEvaluator::dim() const { return ParamSpace::sot().dim(); }

EvalOutcome SurrogateGenomeEvaluator::evaluate(const std::vector<double>& genome,
                                               std::uint64_t eval_seed) const {
    EvalOutcome out;
    try {
        SurrogateDevice dev(genome, ideal_);
        return evaluate_config(dev, target_, es_, eval_seed);
    } catch (const Error& e) {
        out = EvalOutcome{};
        out.reason = e.what();
    }
    return out;
}

} // namespace mtjrng
