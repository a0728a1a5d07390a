#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "mtjrng/constants.hpp"
#include "mtjrng/errors.hpp"
#include "mtjrng/llg.hpp"
#include "mtjrng/rng.hpp"

using namespace mtjrng;
namespace c = constants;

namespace {

// Strongly perpendicular stack: deep well, fast relaxation, clean analytics.
DeviceParams strong_pma() {
    DeviceParams p;
    p.M_s = 1.0e6;
    p.T = 0.0;
    return p;
}

double keff_of(const DeviceParams& p) {
    return p.K_i / p.t_f - 0.5 * c::mu0 * p.M_s * p.M_s;
}

double hk_of(const DeviceParams& p) { return 2.0 * keff_of(p) / (c::mu0 * p.M_s); }

} // namespace

TEST_CASE("effective field assembles anisotropy, demag, thermal, and applied terms") {
    DeviceParams p = strong_pma();
    const Vec3 m{0.3, -0.4, std::sqrt(1.0 - 0.25)};
    const Vec3 h_th{11.0, -7.0, 3.0};
    const Vec3 h_ext{100.0, 200.0, -50.0};
    const Vec3 h = effective_field(m, p, h_th, h_ext);
    const double k_u = p.K_i / p.t_f;
    CHECK(h.x == doctest::Approx(-p.M_s * 0.0 * m.x + h_th.x + h_ext.x));
    CHECK(h.y == doctest::Approx(h_th.y + h_ext.y));
    CHECK(h.z ==
          doctest::Approx((2.0 * k_u / (c::mu0 * p.M_s) - p.M_s) * m.z + h_th.z + h_ext.z));

    // all-axis demag splits the field componentwise
    DeviceParams q = p;
    q.demag = {0.2, 0.3, 0.5};
    const Vec3 hq = effective_field(m, q, {}, {});
    CHECK(hq.x == doctest::Approx(-q.M_s * 0.2 * m.x));
    CHECK(hq.y == doctest::Approx(-q.M_s * 0.3 * m.y));
}

TEST_CASE("thermal field amplitude follows the fluctuation-dissipation scalings") {
    DeviceParams p; // table defaults, T = 300 K
    const double dt = 1e-12;
    const double s0 = thermal_sigma(p, dt);
    CHECK(s0 > 0.0);
    // direct formula value
    const double var = 2.0 * p.alpha * c::k_B * p.T /
                       (c::gamma_e * c::mu0 * c::mu0 * p.M_s * p.volume() * dt);
    CHECK(s0 == doctest::Approx(std::sqrt(var)).epsilon(1e-12));

    // scaling laws: sqrt in alpha and T, inverse sqrt in dt, M_s and volume
    DeviceParams q = p;
    q.alpha *= 2.0;
    CHECK(thermal_sigma(q, dt) == doctest::Approx(s0 * std::sqrt(2.0)).epsilon(1e-12));
    q = p;
    q.T *= 4.0;
    CHECK(thermal_sigma(q, dt) == doctest::Approx(2.0 * s0).epsilon(1e-12));
    CHECK(thermal_sigma(p, 4.0 * dt) == doctest::Approx(s0 / 2.0).epsilon(1e-12));
    q = p;
    q.M_s *= 2.0;
    CHECK(thermal_sigma(q, dt) == doctest::Approx(s0 / std::sqrt(2.0)).epsilon(1e-12));
    q = p;
    q.T = 0.0;
    CHECK(thermal_sigma(q, dt) == 0.0);
}

TEST_CASE("zero-temperature relaxation matches the closed-form macrospin solution") {
    // With only the uniaxial z-field, tan(theta) decays exponentially with
    // rate alpha*gamma'*H_k and the phase advances by gamma'*H_k*cos(theta).
    DeviceParams p = strong_pma();
    const double hk = hk_of(p);
    REQUIRE(hk > 0.0);
    const double gp = c::gamma_ll / (1.0 + p.alpha * p.alpha);
    const double theta0 = 0.2;

    SimConfig cfg;
    cfg.dt = 0.5e-12;
    Rng rng(1);
    Trajectory traj;
    const DriveSegment seg{0.0, 0.0, 2e-9, {}};
    run_segment({std::sin(theta0), 0.0, std::cos(theta0)}, p, seg, cfg, rng, &traj);

    const double tau_inv = p.alpha * gp * hk;
    for (std::size_t i = 200; i < traj.size(); i += 400) {
        const double t = traj.t[i];
        const double theta_ref = std::atan(std::tan(theta0) * std::exp(-tau_inv * t));
        CHECK(traj.m[i].z == doctest::Approx(std::cos(theta_ref)).epsilon(2e-4));
    }

    // phase: unwrap atan2 and compare with the quadrature of gamma'*H_k*cos(theta_ref)
    double phase = 0.0, prev = std::atan2(traj.m[0].y, traj.m[0].x);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        double a = std::atan2(traj.m[i].y, traj.m[i].x);
        double d = a - prev;
        while (d > M_PI) d -= 2.0 * M_PI;
        while (d < -M_PI) d += 2.0 * M_PI;
        phase += d;
        prev = a;
    }
    double phase_ref = 0.0;
    const std::size_t slices = 20000;
    const double t_end = traj.t.back();
    for (std::size_t s = 0; s < slices; ++s) {
        const double t = (static_cast<double>(s) + 0.5) * t_end / slices;
        const double theta_ref = std::atan(std::tan(theta0) * std::exp(-tau_inv * t));
        phase_ref += gp * hk * std::cos(theta_ref) * (t_end / slices);
    }
    CHECK(phase > 0.0); // precession sense fixed by the equation of motion
    CHECK(phase == doctest::Approx(phase_ref).epsilon(2e-3));
}

TEST_CASE("zero-temperature dynamics never gain magnetic energy") {
    DeviceParams p = strong_pma();
    SimConfig cfg;
    Rng rng(3);
    Vec3 m = Vec3{1.0, 0.4, 0.8}.normalized();
    const DriveSegment seg{0.0, 0.0, 1e-9, {0.0, 0.0, 2e4}};
    double e_prev = magnetic_energy(m, p, seg.H_ext);
    for (int i = 0; i < 1000; ++i) {
        m = llg_step(m, p, seg, cfg, rng);
        const double e = magnetic_energy(m, p, seg.H_ext);
        CHECK(e <= e_prev + 1e-25); // slack for rounding only
        e_prev = e;
    }
    CHECK(std::abs(m.norm() - 1.0) < 1e-12);
}

TEST_CASE("integrator error drops quadratically with the timestep") {
    // Richardson self-convergence: a dt/16 run serves as the reference, and
    // the end-state error (phase included) must shrink fourfold per halving.
    DeviceParams p = strong_pma();
    const double theta0 = 0.3;
    const double t_end = 0.5e-9;

    auto end_state = [&](double dt) {
        SimConfig cfg;
        cfg.dt = dt;
        Rng rng(5);
        const DriveSegment seg{0.0, 0.0, t_end, {}};
        return run_segment({std::sin(theta0), 0.0, std::cos(theta0)}, p, seg, cfg, rng).m;
    };
    const Vec3 ref = end_state(0.0625e-12);
    const double e1 = (end_state(0.5e-12) - ref).norm();
    const double e2 = (end_state(1.0e-12) - ref).norm();
    CHECK(e2 > 1e-7); // error is resolvable, not rounding noise
    CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(0.35));
}

TEST_CASE("finite-temperature stationary spread matches the Boltzmann well") {
    // Deep-well equipartition: E = Delta*kT*(m_x^2 + m_y^2) to leading order,
    // so each transverse component has variance 1/(2*Delta).
    DeviceParams p = strong_pma();
    p.T = 300.0;
    const double delta = keff_of(p) * p.volume() / (c::k_B * p.T);
    REQUIRE(delta > 100.0); // deep well needed for the harmonic approximation

    SimConfig cfg;
    Rng rng(7);
    Vec3 m{0.0, 0.0, 1.0};
    const DriveSegment seg{0.0, 0.0, 1.0, {}};
    const int warmup = 20000, n = 200000;
    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (int i = 0; i < warmup + n; ++i) {
        m = llg_step(m, p, seg, cfg, rng);
        if (i >= warmup) {
            sx += m.x * m.x;
            sy += m.y * m.y;
            sz += m.z;
        }
    }
    const double want = 1.0 / (2.0 * delta);
    CHECK(sx / n == doctest::Approx(want).epsilon(0.25));
    CHECK(sy / n == doctest::Approx(want).epsilon(0.25));
    CHECK(sz / n > 0.99);
}

TEST_CASE("spin-transfer torque drives the pole monotonically") {
    // Positive stack current pushes the state toward +z, negative holds -z.
    DeviceParams p = strong_pma();
    SimConfig cfg;
    Rng rng(11);
    const Vec3 m0 = Vec3{0.05, 0.0, -1.0}.normalized(); // slight tilt seeds the switch
    const double j_big = 3e12;

    const SegmentResult up = run_segment(m0, p, {0.0, j_big, 5e-9, {}}, cfg, rng);
    CHECK(up.m.z > 0.95);
    const SegmentResult down = run_segment(m0, p, {0.0, -j_big, 5e-9, {}}, cfg, rng);
    CHECK(down.m.z < -0.95);
}

TEST_CASE("spin-orbit torque rotates the free layer in plane") {
    DeviceParams p; // table defaults
    p.T = 0.0;
    SimConfig cfg;
    Rng rng(13);
    const Vec3 m0 = Vec3{0.02, 0.02, 1.0}.normalized();
    const SegmentResult r = run_segment(m0, p, {-5e11, 0.0, 10e-9, {}}, cfg, rng);
    CHECK(std::abs(r.m.y) > 0.95); // settled along the spin polarization axis
    CHECK(std::abs(r.m.z) < 0.3);
}

TEST_CASE("identical seeds reproduce trajectories exactly") {
    DeviceParams p;
    SimConfig cfg;
    const DriveSegment seg{-3e11, 1e10, 2e-9, {}};
    Rng r1(99), r2(99), r3(100);
    Trajectory t1, t2;
    run_segment({0.0, 0.0, 1.0}, p, seg, cfg, r1, &t1);
    run_segment({0.0, 0.0, 1.0}, p, seg, cfg, r2, &t2);
    REQUIRE(t1.size() == t2.size());
    bool same = true;
    for (std::size_t i = 0; i < t1.size(); ++i)
        same = same && t1.m[i].x == t2.m[i].x && t1.m[i].y == t2.m[i].y &&
               t1.m[i].z == t2.m[i].z;
    CHECK(same);
    const SegmentResult other = run_segment({0.0, 0.0, 1.0}, p, seg, cfg, r3);
    CHECK(other.m.z != t1.m.back().z); // different stream, different path
}

TEST_CASE("renormalization cadence keeps the state on the unit sphere") {
    DeviceParams p;
    SimConfig cfg;
    cfg.renorm_every = 7;
    Rng rng(17);
    Trajectory traj;
    run_segment({0.0, 0.0, 1.0}, p, {-3e11, 0.0, 1e-9, {}}, cfg, rng, &traj);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        CHECK(std::abs(traj.m[i].norm() - 1.0) < 1e-3); // drift between renorms is tiny
        if (i % 7 == 0) CHECK(std::abs(traj.m[i].norm() - 1.0) < 1e-12);
    }
}

TEST_CASE("segment bookkeeping: steps, rows, currents, Joule heating") {
    DeviceParams p = strong_pma();
    SimConfig cfg; // 1 ps
    Rng rng(23);
    Trajectory traj;
    const double j_stt = 1e9; // far below threshold; the state barely moves
    const double j_sot = 2e10;
    const DriveSegment seg{j_sot, j_stt, 10e-9, {}};
    const SegmentResult r = run_segment({0.0, 0.0, 1.0}, p, seg, cfg, rng, &traj, 5e-9);

    CHECK(r.steps == 10000); // exact despite binary rounding of the quotient
    CHECK(traj.size() == 10001);
    CHECK(traj.t.front() == doctest::Approx(5e-9));
    CHECK(traj.t.back() == doctest::Approx(15e-9).epsilon(1e-9));
    CHECK(traj.J_sot.back() == j_sot);
    CHECK(traj.J_stt.back() == j_stt);

    // m pinned at +z: both heating terms reduce to I^2 R t
    const double i_stt = j_stt * p.area();
    const double i_sot = j_sot * p.hm_thickness * p.hm_width;
    CHECK(r.e_mtj == doctest::Approx(i_stt * i_stt * p.resistance(1.0) * 10e-9).epsilon(1e-4));
    CHECK(r.e_hm == doctest::Approx(i_sot * i_sot * p.r_hm() * 10e-9).epsilon(1e-9));
    CHECK(r.mean_abs_mz == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("resistance interpolates between parallel and antiparallel") {
    DeviceParams p;
    CHECK(p.resistance(1.0) == doctest::Approx(p.R_p));
    CHECK(p.resistance(-1.0) == doctest::Approx(p.R_p * (1.0 + p.tmr)));
    CHECK(p.resistance(0.0) > p.resistance(1.0));
    CHECK(p.resistance(0.0) < p.resistance(-1.0));
}

TEST_CASE("guards: timestep bounds, degenerate segments, non-finite states") {
    DeviceParams p;
    Rng rng(29);
    SimConfig bad;
    bad.dt = 11e-12;
    CHECK_THROWS_AS(llg_step({0, 0, 1}, p, {}, bad, rng), OutOfRange);
    bad.dt = 0.0;
    CHECK_THROWS_AS(llg_step({0, 0, 1}, p, {}, bad, rng), OutOfRange);

    SimConfig cfg;
    CHECK_THROWS_AS(run_segment({0, 0, 1}, p, {0.0, 0.0, 1e-13, {}}, cfg, rng), OutOfRange);

    const double nan = std::nan("");
    const DriveSegment poison{0.0, 0.0, 1e-10, {nan, 0.0, 0.0}};
    CHECK_THROWS_AS(run_segment({0, 0, 1}, p, poison, cfg, rng), NonFiniteState);

    DeviceParams negative = p;
    negative.alpha = -0.1;
    CHECK_THROWS_AS(negative.validate(), OutOfRange);
    negative = p;
    negative.demag = {0.5, 0.5, 0.5};
    CHECK_THROWS_AS(negative.validate(), OutOfRange);
}
