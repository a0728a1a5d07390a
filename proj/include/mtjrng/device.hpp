#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "mtjrng/llg.hpp"
#include "mtjrng/tree_sampler.hpp"

namespace mtjrng {

// SOT coinflip: J_sot rotates the free layer in-plane for t_pulse (with the
// J_stt_bias stack current tilting the outcome), then everything is switched
// off for t_relax and the settled pole is read out.
struct ProtocolSOT {
    double J_sot = -5e11;     // A/m^2 (applied sign; Table magnitude 0.5e12)
    double t_pulse = 10e-9;   // s
    double t_relax = 15e-9;   // s
    double J_stt_bias = 0.0;  // A/m^2, the biasing knob
};

// STT coinflip: deterministic reset to -z, then a J_stt pulse switches with
// bias-dependent probability, then relaxation and readout.
struct ProtocolSTT {
    double J_stt = 0.0;      // A/m^2, switching/bias knob
    double t_pulse = 1e-9;   // s
    double t_relax = 10e-9;  // s
    double t_reset = 10e-9;  // s
    double J_reset = 0.0;    // A/m^2; 0 means auto (see j_reset_auto)
};

using Protocol = std::variant<ProtocolSOT, ProtocolSTT>;

struct EnergyRecord {
    double e_mtj = 0.0; // J, stack Joule heating
    double e_hm = 0.0;  // J, heavy-metal Joule heating (SOT only)
    double e_total() const { return e_mtj + e_hm; }
};

struct FlipResult {
    int bit = 0;
    EnergyRecord energy;
    double pulse_mean_abs_mz = 0.0; // diagnostic: |m_z| time-average in pulse
};

struct ScurvePoint {
    double J = 0.0;      // A/m^2
    double p_one = 0.0;  // empirical probability of bit 1
    int n = 0;           // flips behind the estimate
};

struct SCurve {
    std::vector<ScurvePoint> points; // strictly increasing in J
    DeviceParams params;             // device snapshot the curve belongs to
    double p_low() const { return points.front().p_one; }
    double p_high() const { return points.back().p_one; }
};

enum class InvalidReason { ok, span_low, span_high, monotonicity, sim_error };

struct ValidityReport {
    bool valid = false;
    int monotonicity_violations = 0;
    double p_low = 0.0;
    double p_high = 0.0;
    InvalidReason reason = InvalidReason::ok;
    // Non-fatal: pulse-time |m_z| average > 0.5 means the device is biased by
    // full stochastic switching rather than in-plane SOT rotation.
    bool stochastic_regime = false;
    std::string message;
};

// K_eff = K_i/t_f - mu0*M_s^2/2; the PMA-retention border is K_eff = 0.
double keff(const DeviceParams& p);

// Effective anisotropy field 2*K_eff/(mu0*M_s), A/m.
double h_k_eff(const DeviceParams& p);

// Zero-temperature STT instability threshold current density.
double j_critical_stt(const DeviceParams& p);

// Finite-pulse switching-current estimate (ballistic overdrive of the
// critical current, seeded by the thermal cone angle).
double j_switch_estimate(const DeviceParams& p, double t_pulse);

// Reset amplitude: -3x the switching estimate for the reset duration, with a
// floor that pins the state against thermal spread in shallow wells.
double j_reset_auto(const DeviceParams& p, double t_reset);

FlipResult flip_sot(const DeviceParams& p, const ProtocolSOT& proto, const SimConfig& cfg,
                    Rng& rng, Trajectory* record = nullptr);
// Throws ResetFailed if the reset segment leaves m_z > -0.9.
FlipResult flip_stt(const DeviceParams& p, const ProtocolSTT& proto, const SimConfig& cfg,
                    Rng& rng, Trajectory* record = nullptr);

// Recomputes Joule heating from a recorded trajectory (trapezoid over the
// recorded resistance states). `seg` must match the recorded drive.
EnergyRecord energy_of_trace(const Trajectory& trace, const DeviceParams& p,
                             const DriveSegment& seg);

struct SweepSettings {
    double j_min = 0.0;
    double j_max = 0.0;
    int n_points = 11;
    int n_per_point = 200;
};

// Default validation sweeps calibrated for the shipped device defaults:
// SOT biases symmetrically; STT sweeps up to well past the switching knee.
SweepSettings default_sweep_sot();
SweepSettings default_sweep_stt(const DeviceParams& p, const ProtocolSTT& proto);

// Monte Carlo S-curve: p_one at n_points evenly spaced currents (J is the
// J_stt_bias for SOT, J_stt for STT). Flip streams derive from (cfg.seed,
// global flip index), so results are scheduling-independent.
SCurve build_scurve(const DeviceParams& p, const Protocol& proto, const SweepSettings& sweep,
                    const SimConfig& cfg, unsigned n_threads = 1);

// Monotone inversion: isotonic-regression smoothing then piecewise-linear
// interpolation. Throws OutOfRange when p_target is outside the attainable
// span or the curve has fewer than two points.
double invert_scurve(const SCurve& sc, double p_target);

struct ValidationSettings {
    SweepSettings sweep;        // j_min == j_max means "use the default sweep"
    double p_low_max = 0.10;
    double p_high_min = 0.90;
    int max_violations = 1;
};

ValidityReport validate_device(const DeviceParams& p, const Protocol& proto,
                               const SimConfig& cfg, unsigned n_threads = 1,
                               const ValidationSettings& vs = {});

// Rebuilds S-curves for n_devices copies with (alpha, K_i, M_s, R_p, eta)
// independently perturbed uniformly within +-spread.
std::vector<SCurve> scurve_variation(const DeviceParams& p, double spread, int n_devices,
                                     const Protocol& proto, const SweepSettings& sweep,
                                     const SimConfig& cfg, unsigned n_threads = 1);

// p(bit 1) shift at the 50% bias current when operating dT kelvin away from
// the calibration temperature.
double temperature_sensitivity(const DeviceParams& p, const ProtocolSTT& proto, double dT,
                               const SimConfig& cfg, int n_measure = 2000,
                               unsigned n_threads = 1);

// Device-backed coin: maps requested weights to bias currents through a
// calibration S-curve, then runs the full flip protocol per coinflip.
class DeviceCoin final : public CoinSource {
  public:
    DeviceCoin(DeviceParams p, Protocol proto, SCurve calibration, SimConfig cfg);

    int flip(double p_target) override;
    double energy() const override { return energy_; }
    std::uint64_t flips() const override { return count_; }
    const SCurve& calibration() const { return curve_; }

  private:
    DeviceParams params_;
    Protocol proto_;
    SCurve curve_;
    SimConfig cfg_;
    double energy_ = 0.0;
    std::uint64_t count_ = 0;
};

// Calibration curve for a DeviceCoin: a coarse pass over the default sweep
// followed by a refined pass concentrated on the sigmoid transition, so the
// inversion is accurate where the tree's coin weights live.
SCurve calibrate_coin_curve(const DeviceParams& p, const Protocol& proto,
                            const SimConfig& cfg, int n_points = 21, int n_per_point = 500,
                            unsigned n_threads = 1);

// CSV export with columns t(s), m_x, m_y, m_z, J_sot(A/m^2), J_stt(A/m^2).
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

} // namespace mtjrng
