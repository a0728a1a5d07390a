#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mtjrng/metrics.hpp"

namespace mtjrng {

// Physics-free stand-in for the device pipeline: an analytic logistic
// S-curve, a closed-form per-flip energy, and the same failure modes
// (retention loss, narrow span, out-of-span weights). Lets the optimizers
// and the evaluation seam run without integrating any dynamics.
class SurrogateDevice final : public CoinFactory {
  public:
    // Genome uses the SOT search-space layout (dim 8), components in [0, 1].
    // `ideal` swaps in a perfect zero-energy coin that realizes every
    // requested weight exactly; validity rules still apply.
    explicit SurrogateDevice(std::vector<double> genome, bool ideal = false);

    CheckResult check(std::uint64_t seed, unsigned n_threads) const override;
    std::unique_ptr<CoinSource> make_coin(std::uint64_t seed,
                                          unsigned n_threads) const override;

    double width() const { return width_; }
    double keff() const { return keff_; }

    static constexpr double j_max = 3e11; // A/m^2, grid edge
    static constexpr int n_grid = 21;     // calibration-grid points

  private:
    bool ideal_;
    double width_ = 0.0; // logistic scale, A/m^2; grows with damping
    double keff_ = 0.0;  // retention margin, J/m^3
};

// GenomeEvaluator over SurrogateDevice; same dimensionality as the SOT
// physics space so optimizer code paths are interchangeable.
class SurrogateGenomeEvaluator final : public GenomeEvaluator {
  public:
    SurrogateGenomeEvaluator(TruncatedDistribution target, EvalSettings es,
                             bool ideal = false);

    std::size_t dim() const override;
    EvalOutcome evaluate(const std::vector<double>& genome,
                         std::uint64_t eval_seed) const override;

  private:
    TruncatedDistribution target_;
    EvalSettings es_;
    bool ideal_;
};

} // namespace mtjrng
