#pragma once

#include <cstdint>
#include <string>

#include "mtjrng/device.hpp"
#include "mtjrng/envopt.hpp"
#include "mtjrng/gamma_dist.hpp"
#include "mtjrng/metrics.hpp"
#include "mtjrng/nsga2.hpp"

namespace mtjrng {

// Resolved settings for one CLI run. Sources merge as flags > config file >
// built-in defaults; JSON parsing is strict (unknown keys are errors) and
// partial files are fine, absent keys keep their defaults.
struct RunConfig {
    std::uint64_t seed = 1;
    unsigned threads = 1;

    DeviceParams device;
    std::string protocol_kind = "sot"; // "sot" | "stt"
    ProtocolSOT sot;
    ProtocolSTT stt;
    SimConfig sim; // sim.seed is ignored; the top-level seed rules

    GammaSpec target{50.0, 311.44};
    double trunc_a = 0.10;
    double trunc_b = 0.24;

    long n_samples = 2500;
    int k = 8;
    double w1 = 0.2;
    double w2 = 1.0;

    SweepSettings sweep; // j_min == j_max means protocol default sweep

    std::string algo = "nsga2"; // "nsga2" | "cem"
    bool surrogate = false;     // optimize on the analytic stand-in device
    Nsga2Config nsga;
    CemConfig cem;

    Protocol protocol() const;
    TruncatedDistribution target_dist() const;
    EvalSettings eval_settings() const;

    void validate() const; // throws ConfigError on any out-of-range field

    std::string to_json_string() const;
    static RunConfig from_json_string(const std::string& text);
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
};

} // namespace mtjrng
