#include "mtjrng/device.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "mtjrng/constants.hpp"
#include "mtjrng/csv.hpp"
#include "mtjrng/errors.hpp"
#include "mtjrng/parallel.hpp"

namespace mtjrng {

namespace c = constants;

double keff(const DeviceParams& p) { return p.k_u() - 0.5 * c::mu0 * p.M_s * p.M_s; }

double h_k_eff(const DeviceParams& p) { return 2.0 * keff(p) / (c::mu0 * p.M_s); }

namespace {

// Anti-damping rotation rate per unit current density (before polarization
// or Hall-angle efficiency), 1/s per A/m^2.
double torque_rate_per_j(const DeviceParams& p) {
    return c::gamma_ll * c::hbar / (2.0 * c::e_charge * c::mu0 * p.M_s * p.t_f);
}

double thermal_stability(const DeviceParams& p) {
    return keff(p) * p.volume() / (c::k_B * std::max(p.T, 1.0));
}

} // namespace

double j_critical_stt(const DeviceParams& p) {
    return 2.0 * c::e_charge * c::mu0 * p.M_s * p.t_f * p.alpha * h_k_eff(p) /
           (c::hbar * p.P_spin);
}

double j_switch_estimate(const DeviceParams& p, double t_pulse) {
    const double delta = thermal_stability(p);
    if (delta <= 0.0) return j_critical_stt(p); // inverted well; estimate moot
    const double theta0 = std::sqrt(1.0 / std::max(delta, 1.5));
    const double tau_d =
        (1.0 + p.alpha * p.alpha) / (p.alpha * c::gamma_ll * h_k_eff(p));
    return j_critical_stt(p) * (1.0 + tau_d / t_pulse * std::log(M_PI / (2.0 * theta0)));
}

double j_reset_auto(const DeviceParams& p, double t_reset) {
    const double delta = thermal_stability(p);
    double pin = 0.0;
    if (delta > 0.0) {
        // Hold the thermal cone near <theta^2> ~ 0.01 so the end-of-reset
        // m_z < -0.9 tail stays negligible even for shallow wells; measured
        // exceedance at the looser 0.02 target was ~1e-3 per reset.
        const double rate_needed = p.alpha * c::gamma_ll * h_k_eff(p) /
                                   (1.0 + p.alpha * p.alpha) *
                                   std::max(0.0, 1.0 / (0.01 * delta) - 1.0);
        pin = rate_needed / (torque_rate_per_j(p) * p.P_spin);
    }
    return -std::max(3.0 * j_switch_estimate(p, t_reset), pin);
}

FlipResult flip_sot(const DeviceParams& p, const ProtocolSOT& proto, const SimConfig& cfg,
                    Rng& rng, Trajectory* record) {
    FlipResult out;
    const Vec3 m0{0.0, 0.0, 1.0};
    const DriveSegment pulse{proto.J_sot, proto.J_stt_bias, proto.t_pulse, {}};
    const SegmentResult r1 = run_segment(m0, p, pulse, cfg, rng, record, 0.0);
    const DriveSegment relax{0.0, 0.0, proto.t_relax, {}};
    const SegmentResult r2 = run_segment(r1.m, p, relax, cfg, rng, record, proto.t_pulse);
    out.bit = r2.m.z > 0.0 ? 1 : 0;
    out.energy.e_mtj = r1.e_mtj; // relax carries no current
    out.energy.e_hm = r1.e_hm;
    out.pulse_mean_abs_mz = r1.mean_abs_mz;
    return out;
}

FlipResult flip_stt(const DeviceParams& p, const ProtocolSTT& proto, const SimConfig& cfg,
                    Rng& rng, Trajectory* record) {
    FlipResult out;
    const double j_reset = proto.J_reset != 0.0 ? proto.J_reset : j_reset_auto(p, proto.t_reset);
    const Vec3 m0{0.0, 0.0, 1.0};
    const DriveSegment reset{0.0, j_reset, proto.t_reset, {}};
    const SegmentResult r0 = run_segment(m0, p, reset, cfg, rng, record, 0.0);
    if (r0.m.z > -0.9)
        throw ResetFailed("reset left m_z above -0.9; reset current too weak");
    const DriveSegment pulse{0.0, proto.J_stt, proto.t_pulse, {}};
    const SegmentResult r1 = run_segment(r0.m, p, pulse, cfg, rng, record, proto.t_reset);
    const DriveSegment relax{0.0, 0.0, proto.t_relax, {}};
    const SegmentResult r2 =
        run_segment(r1.m, p, relax, cfg, rng, record, proto.t_reset + proto.t_pulse);
    out.bit = r2.m.z > 0.0 ? 1 : 0;
    out.energy.e_mtj = r0.e_mtj + r1.e_mtj;
    out.energy.e_hm = 0.0;
    out.pulse_mean_abs_mz = r1.mean_abs_mz;
    return out;
}

EnergyRecord energy_of_trace(const Trajectory& trace, const DeviceParams& p,
                             const DriveSegment& seg) {
    if (trace.size() < 2) throw OutOfRange("trace needs at least two samples");
    const double span = trace.t.back() - trace.t.front();
    if (std::abs(span - seg.duration) > seg.duration * 1e-6 + 1e-15)
        throw OutOfRange("trace span does not match segment duration");
    EnergyRecord e;
    const double a_hm = p.hm_thickness * p.hm_width;
    for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
        const double dt = trace.t[i + 1] - trace.t[i];
        // The step from sample i to i+1 runs under the currents of row i+1.
        const double i_stt = trace.J_stt[i + 1] * p.area();
        const double p0 = i_stt * i_stt * p.resistance(trace.m[i].z);
        const double p1 = i_stt * i_stt * p.resistance(trace.m[i + 1].z);
        e.e_mtj += 0.5 * (p0 + p1) * dt;
        const double i_sot = trace.J_sot[i + 1] * a_hm;
        e.e_hm += i_sot * i_sot * p.r_hm() * dt;
    }
    return e;
}

SweepSettings default_sweep_sot() { return {-3e11, 3e11, 11, 200}; }

SweepSettings default_sweep_stt(const DeviceParams& p, const ProtocolSTT& proto) {
    return {0.0, 6.0 * j_switch_estimate(p, proto.t_pulse), 11, 200};
}

namespace {

struct SweepOutcome {
    SCurve curve;
    double mean_pulse_abs_mz = 0.0;
};

// Shared Monte Carlo sweep. Flip f of point k draws its stream from
// (cfg.seed, k*n_per_point + f) so any thread count gives identical curves.
SweepOutcome run_sweep(const DeviceParams& p, const Protocol& proto, const SweepSettings& sweep,
                       const SimConfig& cfg, unsigned n_threads) {
    if (!(sweep.j_min < sweep.j_max)) throw OutOfRange("sweep requires j_min < j_max");
    if (sweep.n_points < 1) throw OutOfRange("sweep requires at least one point");
    if (sweep.n_per_point < 100) throw OutOfRange("sweep requires >= 100 flips per point");
    p.validate();

    const std::size_t total =
        static_cast<std::size_t>(sweep.n_points) * static_cast<std::size_t>(sweep.n_per_point);
    std::vector<std::uint8_t> bits(total, 0);
    std::vector<float> diag(total, 0.0f);

    parallel_for(total, n_threads, [&](std::size_t idx) {
        const int point = static_cast<int>(idx / static_cast<std::size_t>(sweep.n_per_point));
        const double j =
            sweep.n_points == 1
                ? sweep.j_min
                : sweep.j_min + (sweep.j_max - sweep.j_min) * point / (sweep.n_points - 1.0);
        Rng rng = Rng::substream(cfg.seed, idx);
        FlipResult r;
        if (const auto* sot = std::get_if<ProtocolSOT>(&proto)) {
            ProtocolSOT biased = *sot;
            biased.J_stt_bias = j;
            r = flip_sot(p, biased, cfg, rng);
        } else {
            ProtocolSTT biased = std::get<ProtocolSTT>(proto);
            biased.J_stt = j;
            r = flip_stt(p, biased, cfg, rng);
        }
        bits[idx] = static_cast<std::uint8_t>(r.bit);
        diag[idx] = static_cast<float>(r.pulse_mean_abs_mz);
    });

    SweepOutcome out;
    out.curve.params = p;
    out.curve.points.resize(sweep.n_points);
    double diag_sum = 0.0;
    for (int k = 0; k < sweep.n_points; ++k) {
        long ones = 0;
        for (int f = 0; f < sweep.n_per_point; ++f) {
            const std::size_t idx =
                static_cast<std::size_t>(k) * sweep.n_per_point + static_cast<std::size_t>(f);
            ones += bits[idx];
            diag_sum += diag[idx];
        }
        auto& pt = out.curve.points[k];
        pt.J = sweep.n_points == 1
                   ? sweep.j_min
                   : sweep.j_min + (sweep.j_max - sweep.j_min) * k / (sweep.n_points - 1.0);
        pt.p_one = static_cast<double>(ones) / sweep.n_per_point;
        pt.n = sweep.n_per_point;
    }
    out.mean_pulse_abs_mz = diag_sum / static_cast<double>(total);
    return out;
}

// Pool-adjacent-violators: weighted isotonic fit of the p values.
std::vector<double> isotonic_fit(const SCurve& sc) {
    struct Block {
        double sum, weight;
        int count;
    };
    std::vector<Block> blocks;
    blocks.reserve(sc.points.size());
    for (const auto& pt : sc.points) {
        blocks.push_back({pt.p_one * pt.n, static_cast<double>(pt.n), 1});
        while (blocks.size() > 1) {
            auto& prev = blocks[blocks.size() - 2];
            auto& cur = blocks.back();
            if (prev.sum / prev.weight <= cur.sum / cur.weight) break;
            prev.sum += cur.sum;
            prev.weight += cur.weight;
            prev.count += cur.count;
            blocks.pop_back();
        }
    }
    std::vector<double> fitted;
    fitted.reserve(sc.points.size());
    for (const auto& b : blocks) {
        const double level = b.sum / b.weight;
        for (int i = 0; i < b.count; ++i) fitted.push_back(level);
    }
    return fitted;
}

} // namespace

SCurve build_scurve(const DeviceParams& p, const Protocol& proto, const SweepSettings& sweep,
                    const SimConfig& cfg, unsigned n_threads) {
    return run_sweep(p, proto, sweep, cfg, n_threads).curve;
}

double invert_scurve(const SCurve& sc, double p_target) {
    if (sc.points.size() < 2)
        throw OutOfRange("inversion needs an S-curve with at least two points");
    const std::vector<double> fit = isotonic_fit(sc);
    if (p_target < fit.front() || p_target > fit.back())
        throw OutOfRange("target probability outside the attainable S-curve span");
    for (std::size_t i = 0; i + 1 < fit.size(); ++i) {
        if (p_target > fit[i + 1]) continue;
        if (fit[i + 1] > fit[i]) {
            const double frac = (p_target - fit[i]) / (fit[i + 1] - fit[i]);
            return sc.points[i].J + frac * (sc.points[i + 1].J - sc.points[i].J);
        }
        return sc.points[i].J; // flat stretch at exactly p_target
    }
    return sc.points.back().J;
}

ValidityReport validate_device(const DeviceParams& p, const Protocol& proto,
                               const SimConfig& cfg, unsigned n_threads,
                               const ValidationSettings& vs) {
    ValidityReport report;
    SweepSettings sweep = vs.sweep;
    if (!(sweep.j_min < sweep.j_max)) {
        const SweepSettings def = std::holds_alternative<ProtocolSTT>(proto)
                                      ? default_sweep_stt(p, std::get<ProtocolSTT>(proto))
                                      : default_sweep_sot();
        sweep.j_min = def.j_min;
        sweep.j_max = def.j_max;
    }

    SweepOutcome outcome;
    try {
        outcome = run_sweep(p, proto, sweep, cfg, n_threads);
    } catch (const Error& e) {
        report.valid = false;
        report.reason = InvalidReason::sim_error;
        report.message = e.what();
        return report;
    }

    const SCurve& sc = outcome.curve;
    report.p_low = sc.p_low();
    report.p_high = sc.p_high();
    if (std::holds_alternative<ProtocolSOT>(proto)) {
        report.stochastic_regime = outcome.mean_pulse_abs_mz > 0.5;
    }

    for (std::size_t i = 0; i + 1 < sc.points.size(); ++i) {
        const auto& lo = sc.points[i];
        const auto& hi = sc.points[i + 1];
        const double pooled =
            (lo.p_one * lo.n + hi.p_one * hi.n) / static_cast<double>(lo.n + hi.n);
        const double sigma =
            std::sqrt(std::max(pooled * (1.0 - pooled), 0.0) * (1.0 / lo.n + 1.0 / hi.n));
        if (lo.p_one - hi.p_one > 3.0 * sigma && lo.p_one > hi.p_one) {
            ++report.monotonicity_violations;
        }
    }

    if (report.p_low > vs.p_low_max) {
        report.reason = InvalidReason::span_low;
        report.message = "cannot reach low probabilities at the sweep minimum";
    } else if (report.p_high < vs.p_high_min) {
        report.reason = InvalidReason::span_high;
        report.message = "cannot reach high probabilities at the sweep maximum";
    } else if (report.monotonicity_violations > vs.max_violations) {
        report.reason = InvalidReason::monotonicity;
        report.message = "S-curve is not monotone within binomial tolerance";
    } else {
        report.reason = InvalidReason::ok;
    }
    report.valid = report.reason == InvalidReason::ok;
    return report;
}

std::vector<SCurve> scurve_variation(const DeviceParams& p, double spread, int n_devices,
                                     const Protocol& proto, const SweepSettings& sweep,
                                     const SimConfig& cfg, unsigned n_threads) {
    if (n_devices < 1) throw OutOfRange("need at least one device");
    if (spread < 0.0) throw OutOfRange("spread must be non-negative");
    std::vector<SCurve> curves;
    curves.reserve(static_cast<std::size_t>(n_devices));
    for (int d = 0; d < n_devices; ++d) {
        Rng rng = Rng::substream(cfg.seed, 0xbeef0000ULL + static_cast<std::uint64_t>(d));
        DeviceParams q = p;
        q.alpha *= 1.0 + rng.uniform(-spread, spread);
        q.K_i *= 1.0 + rng.uniform(-spread, spread);
        q.M_s *= 1.0 + rng.uniform(-spread, spread);
        q.R_p *= 1.0 + rng.uniform(-spread, spread);
        q.eta *= 1.0 + rng.uniform(-spread, spread);
        SimConfig sub = cfg;
        sub.seed = derive_seed(cfg.seed, 0xdead0000ULL + static_cast<std::uint64_t>(d));
        curves.push_back(build_scurve(q, proto, sweep, sub, n_threads));
    }
    return curves;
}

double temperature_sensitivity(const DeviceParams& p, const ProtocolSTT& proto, double dT,
                               const SimConfig& cfg, int n_measure, unsigned n_threads) {
    const SweepSettings sweep = default_sweep_stt(p, proto);
    const SCurve sc = build_scurve(p, Protocol{proto}, sweep, cfg, n_threads);
    const double j50 = invert_scurve(sc, 0.5);

    DeviceParams warmed = p;
    warmed.T = p.T + dT;
    SimConfig sub = cfg;
    sub.seed = derive_seed(cfg.seed, 0x7e39a5ULL);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_measure), 0);
    parallel_for(bits.size(), n_threads, [&](std::size_t i) {
        Rng rng = Rng::substream(sub.seed, i);
        ProtocolSTT biased = proto;
        biased.J_stt = j50;
        // Reset amplitude stays fixed at the calibration temperature's value
        // so only the stochastic switching responds to dT.
        if (biased.J_reset == 0.0) biased.J_reset = j_reset_auto(p, proto.t_reset);
        bits[i] = static_cast<std::uint8_t>(flip_stt(warmed, biased, sub, rng).bit);
    });
    long ones = 0;
    for (const auto b : bits) ones += b;
    return static_cast<double>(ones) / n_measure - 0.5;
}

DeviceCoin::DeviceCoin(DeviceParams p, Protocol proto, SCurve calibration, SimConfig cfg)
    : params_(std::move(p)), proto_(std::move(proto)), curve_(std::move(calibration)),
      cfg_(cfg) {}

int DeviceCoin::flip(double p_target) {
    const double j = invert_scurve(curve_, p_target);
    Rng rng = Rng::substream(cfg_.seed, count_);
    ++count_;
    FlipResult r;
    if (const auto* sot = std::get_if<ProtocolSOT>(&proto_)) {
        ProtocolSOT biased = *sot;
        biased.J_stt_bias = j;
        r = flip_sot(params_, biased, cfg_, rng);
    } else {
        ProtocolSTT biased = std::get<ProtocolSTT>(proto_);
        biased.J_stt = j;
        r = flip_stt(params_, biased, cfg_, rng);
    }
    energy_ += r.energy.e_total();
    return r.bit;
}

SCurve calibrate_coin_curve(const DeviceParams& p, const Protocol& proto, const SimConfig& cfg,
                            int n_points, int n_per_point, unsigned n_threads) {
    SweepSettings coarse_sweep;
    if (const auto* stt = std::get_if<ProtocolSTT>(&proto)) {
        coarse_sweep = default_sweep_stt(p, *stt);
    } else {
        coarse_sweep = default_sweep_sot();
    }
    SimConfig coarse_cfg = cfg;
    coarse_cfg.seed = derive_seed(cfg.seed, 0xca11b7a7e0ULL);
    const SCurve coarse = build_scurve(p, proto, coarse_sweep, coarse_cfg, n_threads);

    // Narrow onto the transition so the fine grid resolves the region the
    // tree's coin weights actually use.
    SweepSettings fine = coarse_sweep;
    fine.n_points = n_points;
    fine.n_per_point = n_per_point;
    try {
        const double lo_p = std::max(0.02, coarse.p_low() + 1e-9);
        const double hi_p = std::min(0.98, coarse.p_high() - 1e-9);
        if (hi_p > lo_p) {
            const double j_lo = invert_scurve(coarse, lo_p);
            const double j_hi = invert_scurve(coarse, hi_p);
            if (j_hi > j_lo) {
                const double pad = 0.05 * (j_hi - j_lo);
                fine.j_min = std::max(coarse_sweep.j_min, j_lo - pad);
                fine.j_max = std::min(coarse_sweep.j_max, j_hi + pad);
            }
        }
    } catch (const OutOfRange&) {
        // Degenerate coarse curve: keep the default range.
    }
    SimConfig fine_cfg = cfg;
    fine_cfg.seed = derive_seed(cfg.seed, 0xf19e5eedULL);
    return build_scurve(p, proto, fine, fine_cfg, n_threads);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    CsvWriter csv(path, {"t", "m_x", "m_y", "m_z", "J_sot", "J_stt"});
    for (std::size_t i = 0; i < traj.size(); ++i) {
        csv.row({traj.t[i], traj.m[i].x, traj.m[i].y, traj.m[i].z, traj.J_sot[i],
                 traj.J_stt[i]});
    }
}

} // namespace mtjrng
