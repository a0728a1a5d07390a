#pragma once

#include <cstdint>
#include <vector>

#include "mtjrng/rng.hpp"
#include "mtjrng/vec3.hpp"

namespace mtjrng {

// Material, device, and stack parameters. Table symbols plus geometry; the
// geometry defaults are invented (literature-typical) and configurable.
struct DeviceParams {
    double alpha = 0.03;       // Gilbert damping
    double K_i = 1e-3;         // surface anisotropy energy, J/m^2
    double M_s = 1.2e6;        // saturation magnetization, A/m
    double R_p = 5000.0;       // parallel resistance, ohm
    double eta = 0.3;          // spin Hall angle (SOT only)
    double t_f = 1.1e-9;       // free-layer thickness, m
    double d_mtj = 50e-9;      // pillar diameter, m
    double hm_thickness = 3e-9; // heavy-metal channel, m
    double hm_width = 100e-9;
    double hm_length = 100e-9;
    double rho_hm = 2e-7;      // heavy-metal resistivity, ohm*m
    double tmr = 1.0;          // TMR ratio, R_AP = R_p * (1 + tmr)
    double P_spin = 0.6;       // spin polarization
    double T = 300.0;          // K
    Vec3 demag = {0.0, 0.0, 1.0}; // thin-film demag factors, sum to 1

    void validate() const; // throws OutOfRange on violated bounds

    double volume() const;  // free-layer volume, pi*(d/2)^2 * t_f
    double area() const;    // pillar cross-section
    double k_u() const;     // uniaxial anisotropy energy density K_i / t_f, J/m^3
    double r_hm() const;    // heavy-metal channel resistance
    // MTJ resistance as a function of m_z: conductance-interpolated between
    // R_p (parallel, m_z = +1) and R_AP (antiparallel, m_z = -1).
    double resistance(double m_z) const;
};

// Piecewise-constant drive applied to the stack for `duration` seconds.
struct DriveSegment {
    double J_sot = 0.0; // A/m^2, heavy-metal charge current density
    double J_stt = 0.0; // A/m^2, current density through the stack
    double duration = 0.0;
    Vec3 H_ext = {0.0, 0.0, 0.0}; // A/m
};

struct SimConfig {
    double dt = 1e-12;       // s; hard guard at 10 ps
    std::uint64_t seed = 0;
    int renorm_every = 1;    // renormalize m every this many steps
};

// Time series of (t, m, applied currents), for bitstream/trajectory export.
struct Trajectory {
    std::vector<double> t;
    std::vector<Vec3> m;
    std::vector<double> J_sot;
    std::vector<double> J_stt;

    void append(double time, const Vec3& mag, double j_sot, double j_stt) {
        t.push_back(time);
        m.push_back(mag);
        J_sot.push_back(j_sot);
        J_stt.push_back(j_stt);
    }
    std::size_t size() const { return t.size(); }
};

// Per-axis standard deviation of the thermal fluctuation field (A/m) for one
// integration step of length dt.
double thermal_sigma(const DeviceParams& p, double dt);

// H_eff = H_anis + H_demag + H_thermal + H_ext, in A/m.
Vec3 effective_field(const Vec3& m, const DeviceParams& p, const Vec3& h_thermal,
                     const Vec3& H_ext);

// Magnetic energy of state m (anisotropy + demag + Zeeman), in J. Used by
// the zero-temperature dissipation checks.
double magnetic_energy(const Vec3& m, const DeviceParams& p, const Vec3& H_ext);

// One stochastic Heun step of the LLG equation with STT/SOT torques and the
// thermal field; returns the renormalized state. Throws NonFiniteState.
Vec3 llg_step(const Vec3& m, const DeviceParams& p, const DriveSegment& seg,
              const SimConfig& cfg, Rng& rng);

struct SegmentResult {
    Vec3 m;                    // state at segment end
    double e_mtj = 0.0;        // J, trapezoid of I_stt^2 * R(m_z)
    double e_hm = 0.0;         // J, I_sot^2 * R_hm * time
    double mean_abs_mz = 0.0;  // time average of |m_z| over the segment
    std::uint64_t steps = 0;
};

// Integrates ceil(duration/dt) steps; optionally appends (t, m, J) rows to
// `record` (including the initial state when the trajectory is empty).
SegmentResult run_segment(const Vec3& m0, const DeviceParams& p, const DriveSegment& seg,
                          const SimConfig& cfg, Rng& rng, Trajectory* record = nullptr,
                          double t_start = 0.0);

} // namespace mtjrng
