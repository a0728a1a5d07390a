#include "mtjrng/llg.hpp"

#include <cmath>

#include "mtjrng/constants.hpp"
#include "mtjrng/errors.hpp"

namespace mtjrng {

namespace c = constants;

void DeviceParams::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw OutOfRange("alpha must lie in (0, 1)");
    if (!(K_i > 0.0)) throw OutOfRange("K_i must be positive");
    if (!(M_s > 0.0)) throw OutOfRange("M_s must be positive");
    if (!(R_p > 0.0)) throw OutOfRange("R_p must be positive");
    if (!(eta > 0.0)) throw OutOfRange("eta must be positive");
    if (!(t_f > 0.0 && d_mtj > 0.0)) throw OutOfRange("free-layer geometry must be positive");
    if (!(hm_thickness > 0.0 && hm_width > 0.0 && hm_length > 0.0 && rho_hm > 0.0))
        throw OutOfRange("heavy-metal geometry must be positive");
    if (!(tmr >= 0.0)) throw OutOfRange("tmr must be non-negative");
    if (!(P_spin > 0.0 && P_spin <= 1.0)) throw OutOfRange("P_spin must lie in (0, 1]");
    if (!(T >= 0.0)) throw OutOfRange("temperature must be non-negative");
    const double n_sum = demag.x + demag.y + demag.z;
    if (demag.x < 0.0 || demag.y < 0.0 || demag.z < 0.0 || std::abs(n_sum - 1.0) > 1e-9)
        throw OutOfRange("demag factors must be non-negative and sum to 1");
}

double DeviceParams::volume() const { return area() * t_f; }

double DeviceParams::area() const {
    const double r = d_mtj / 2.0;
    return M_PI * r * r;
}

double DeviceParams::k_u() const { return K_i / t_f; }

double DeviceParams::r_hm() const { return rho_hm * hm_length / (hm_thickness * hm_width); }

double DeviceParams::resistance(double m_z) const {
    return R_p * (1.0 + tmr) / (1.0 + tmr * (1.0 + m_z) / 2.0);
}

double thermal_sigma(const DeviceParams& p, double dt) {
    if (p.T == 0.0) return 0.0;
    const double var = 2.0 * p.alpha * c::k_B * p.T /
                       (c::gamma_e * c::mu0 * c::mu0 * p.M_s * p.volume() * dt);
    return std::sqrt(var);
}

Vec3 effective_field(const Vec3& m, const DeviceParams& p, const Vec3& h_thermal,
                     const Vec3& H_ext) {
    const double h_anis_z = 2.0 * p.k_u() / (c::mu0 * p.M_s) * m.z;
    const Vec3 h_demag = {-p.M_s * p.demag.x * m.x, -p.M_s * p.demag.y * m.y,
                          -p.M_s * p.demag.z * m.z};
    return Vec3{h_demag.x + h_thermal.x + H_ext.x, h_demag.y + h_thermal.y + H_ext.y,
                h_anis_z + h_demag.z + h_thermal.z + H_ext.z};
}

double magnetic_energy(const Vec3& m, const DeviceParams& p, const Vec3& H_ext) {
    const double e_anis = -p.k_u() * m.z * m.z;
    const double e_demag = 0.5 * c::mu0 * p.M_s * p.M_s *
                           (p.demag.x * m.x * m.x + p.demag.y * m.y * m.y +
                            p.demag.z * m.z * m.z);
    const double e_zeeman = -c::mu0 * p.M_s * H_ext.dot(m);
    return p.volume() * (e_anis + e_demag + e_zeeman);
}

namespace {

struct StepContext {
    const DeviceParams& p;
    const DriveSegment& seg;
    double gamma_prime;   // gamma_ll / (1 + alpha^2)
    double c_stt;         // anti-damping STT rate toward +z, 1/s
    double c_sot;         // anti-damping SOT rate toward +y, 1/s
    Vec3 h_thermal;
};

inline Vec3 llg_rhs(const Vec3& m, const StepContext& ctx) {
    const Vec3 h = effective_field(m, ctx.p, ctx.h_thermal, ctx.seg.H_ext);
    const Vec3 mxh = m.cross(h);
    const Vec3 mxmxh = m.cross(mxh);
    Vec3 dmdt = -ctx.gamma_prime * mxh - (ctx.gamma_prime * ctx.p.alpha) * mxmxh;
    if (ctx.c_stt != 0.0) {
        // m x (z x m) = z - m*m_z: damping-like torque pulling m toward +z
        // for positive J_stt.
        dmdt += ctx.c_stt * Vec3{-m.x * m.z, -m.y * m.z, 1.0 - m.z * m.z};
    }
    if (ctx.c_sot != 0.0) {
        // m x (y x m) = y - m*m_y: spin Hall polarization along +y.
        dmdt += ctx.c_sot * Vec3{-m.x * m.y, 1.0 - m.y * m.y, -m.z * m.y};
    }
    return dmdt;
}

inline double torque_rate(const DeviceParams& p, double j_eff) {
    return c::gamma_ll * c::hbar * j_eff / (2.0 * c::e_charge * c::mu0 * p.M_s * p.t_f);
}

inline StepContext make_context(const DeviceParams& p, const DriveSegment& seg) {
    StepContext ctx{p, seg, 0.0, 0.0, 0.0, {}};
    ctx.gamma_prime = c::gamma_ll / (1.0 + p.alpha * p.alpha);
    ctx.c_stt = torque_rate(p, p.P_spin * seg.J_stt);
    ctx.c_sot = torque_rate(p, p.eta * seg.J_sot);
    return ctx;
}

// One Heun (predictor-corrector) step with the thermal field frozen across
// the substeps; no renormalization here.
inline Vec3 heun_step(const Vec3& m, StepContext& ctx, double dt, double sigma, Rng& rng) {
    if (sigma > 0.0) {
        ctx.h_thermal = {sigma * rng.gauss(), sigma * rng.gauss(), sigma * rng.gauss()};
    }
    const Vec3 f0 = llg_rhs(m, ctx);
    const Vec3 pred = m + dt * f0;
    const Vec3 f1 = llg_rhs(pred, ctx);
    return m + (0.5 * dt) * (f0 + f1);
}

inline void check_dt(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || cfg.dt > 10e-12)
        throw OutOfRange("dt must lie in (0, 10 ps]");
    if (cfg.renorm_every < 1) throw OutOfRange("renorm_every must be >= 1");
}

} // namespace

Vec3 llg_step(const Vec3& m, const DeviceParams& p, const DriveSegment& seg,
              const SimConfig& cfg, Rng& rng) {
    check_dt(cfg);
    StepContext ctx = make_context(p, seg);
    const double sigma = thermal_sigma(p, cfg.dt);
    Vec3 next = heun_step(m, ctx, cfg.dt, sigma, rng);
    if (!next.finite()) throw NonFiniteState("magnetization became non-finite");
    return next.normalized();
}

SegmentResult run_segment(const Vec3& m0, const DeviceParams& p, const DriveSegment& seg,
                          const SimConfig& cfg, Rng& rng, Trajectory* record, double t_start) {
    check_dt(cfg);
    if (!(seg.duration >= cfg.dt)) throw OutOfRange("segment shorter than one timestep");

    // ceil with a relative tolerance so e.g. 10 ns / 1 ps is exactly 10,000
    // steps despite binary rounding of the quotient.
    const double ratio = seg.duration / cfg.dt;
    const auto n_steps = static_cast<std::uint64_t>(std::ceil(ratio * (1.0 - 1e-12)));

    StepContext ctx = make_context(p, seg);
    const double sigma = thermal_sigma(p, cfg.dt);
    const double i_stt = seg.J_stt * p.area();
    const double i_sot = seg.J_sot * p.hm_thickness * p.hm_width;

    SegmentResult out;
    out.steps = n_steps;
    Vec3 m = m0;
    double power_prev = i_stt * i_stt * p.resistance(m.z);
    double abs_mz_sum = 0.0;

    if (record && record->size() == 0) record->append(t_start, m, seg.J_sot, seg.J_stt);

    for (std::uint64_t i = 0; i < n_steps; ++i) {
        m = heun_step(m, ctx, cfg.dt, sigma, rng);
        if ((i + 1) % static_cast<std::uint64_t>(cfg.renorm_every) == 0 || i + 1 == n_steps) {
            if (!m.finite()) throw NonFiniteState("magnetization became non-finite");
            m = m.normalized();
        }
        const double power = i_stt * i_stt * p.resistance(m.z);
        out.e_mtj += 0.5 * (power_prev + power) * cfg.dt;
        power_prev = power;
        abs_mz_sum += std::abs(m.z);
        if (record) {
            record->append(t_start + static_cast<double>(i + 1) * cfg.dt, m, seg.J_sot,
                           seg.J_stt);
        }
    }
    out.m = m;
    out.e_hm = i_sot * i_sot * p.r_hm() * (static_cast<double>(n_steps) * cfg.dt);
    out.mean_abs_mz = abs_mz_sum / static_cast<double>(n_steps);
    return out;
}

} // namespace mtjrng
