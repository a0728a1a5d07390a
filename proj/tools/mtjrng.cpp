// Command-line frontend: device simulation, S-curve characterization,
// tree sampling against the truncated-gamma target, parameter-space
// optimization, archive analysis, and the colloidal-particle posterior demo.
//
// Every run creates <out>/run_<command>_<seed> (an existing directory is an
// error), stores resolved_config.json, and writes only deterministic
// artifacts: reruns with the same flags reproduce every byte regardless of
// --threads.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mtjrng/archive.hpp"
#include "mtjrng/csv.hpp"
#include "mtjrng/device.hpp"
#include "mtjrng/envopt.hpp"
#include "mtjrng/errors.hpp"
#include "mtjrng/metrics.hpp"
#include "mtjrng/nsga2.hpp"
#include "mtjrng/param_space.hpp"
#include "mtjrng/particle.hpp"
#include "mtjrng/run_config.hpp"
#include "mtjrng/surrogate.hpp"
#include "mtjrng/tree_sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mtjrng;

namespace {

struct CommonFlags {
    std::optional<std::string> config;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string out = ".";
    std::optional<double> alpha, k_i, m_s, r_p, eta, temperature, dt;
    std::optional<std::string> protocol;
    std::optional<double> j_sot, j_stt, t_pulse, t_relax;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "JSON config file (flags win over file values)");
    cmd->add_option("--seed", f.seed, "master seed; also names the run directory");
    cmd->add_option("--threads", f.threads, "worker threads (results do not depend on this)");
    cmd->add_option("--out", f.out, "parent directory for the run folder");
    cmd->add_option("--alpha", f.alpha, "Gilbert damping");
    cmd->add_option("--k-i", f.k_i, "interfacial anisotropy, J/m^2");
    cmd->add_option("--m-s", f.m_s, "saturation magnetization, A/m");
    cmd->add_option("--r-p", f.r_p, "parallel resistance, ohm");
    cmd->add_option("--eta", f.eta, "spin Hall angle");
    cmd->add_option("--temperature", f.temperature, "bath temperature, K");
    cmd->add_option("--dt", f.dt, "integration step, s");
    cmd->add_option("--protocol", f.protocol, "flip protocol: sot or stt");
    cmd->add_option("--j-sot", f.j_sot, "SOT drive current density, A/m^2");
    cmd->add_option("--j-stt", f.j_stt, "STT current density (bias for sot), A/m^2");
    cmd->add_option("--t-pulse", f.t_pulse, "pulse duration for the active protocol, s");
    cmd->add_option("--t-relax", f.t_relax, "relax duration for the active protocol, s");
}

RunConfig resolve(const CommonFlags& f) {
    RunConfig c = f.config ? RunConfig::load(*f.config) : RunConfig{};
    if (f.seed) c.seed = *f.seed;
    if (f.threads) c.threads = *f.threads;
    if (f.protocol) c.protocol_kind = *f.protocol;
    if (f.alpha) c.device.alpha = *f.alpha;
    if (f.k_i) c.device.K_i = *f.k_i;
    if (f.m_s) c.device.M_s = *f.m_s;
    if (f.r_p) c.device.R_p = *f.r_p;
    if (f.eta) c.device.eta = *f.eta;
    if (f.temperature) c.device.T = *f.temperature;
    if (f.dt) c.sim.dt = *f.dt;
    if (f.j_sot) c.sot.J_sot = *f.j_sot;
    if (f.j_stt) {
        c.sot.J_stt_bias = *f.j_stt;
        c.stt.J_stt = *f.j_stt;
    }
    if (f.t_pulse) (c.protocol_kind == "stt" ? c.stt.t_pulse : c.sot.t_pulse) = *f.t_pulse;
    if (f.t_relax) (c.protocol_kind == "stt" ? c.stt.t_relax : c.sot.t_relax) = *f.t_relax;
    return c;
}

// Creates <out>/run_<command>_<seed>; an existing directory aborts the run
// rather than mixing artifacts from different invocations.
fs::path make_run_dir(const std::string& out, const std::string& command, std::uint64_t seed) {
    fs::path dir = fs::path(out) / ("run_" + command + "_" + std::to_string(seed));
    if (fs::exists(dir))
        throw ConfigError("run directory already exists: " + dir.string());
    fs::create_directories(dir);
    return dir;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    out << j.dump(2) << '\n';
}

const char* reason_name(InvalidReason r) {
    switch (r) {
        case InvalidReason::ok: return "ok";
        case InvalidReason::span_low: return "span_low";
        case InvalidReason::span_high: return "span_high";
        case InvalidReason::monotonicity: return "monotonicity";
        case InvalidReason::sim_error: return "sim_error";
    }
    return "unknown";
}

SweepSettings pick_sweep(const RunConfig& c) {
    if (c.sweep.j_min != c.sweep.j_max) return c.sweep;
    SweepSettings sw = c.protocol_kind == "stt" ? default_sweep_stt(c.device, c.stt)
                                                : default_sweep_sot();
    sw.n_points = c.sweep.n_points;
    sw.n_per_point = c.sweep.n_per_point;
    return sw;
}

void cmd_simulate(const RunConfig& c, const fs::path& dir) {
    Trajectory traj;
    Rng rng = Rng::substream(c.seed, 0);
    SimConfig sim = c.sim;
    sim.seed = c.seed;
    FlipResult fr = c.protocol_kind == "stt" ? flip_stt(c.device, c.stt, sim, rng, &traj)
                                             : flip_sot(c.device, c.sot, sim, rng, &traj);
    write_trajectory_csv((dir / "trajectory.csv").string(), traj);
    write_json(dir / "result.json", json{{"bit", fr.bit},
                                         {"e_mtj_j", fr.energy.e_mtj},
                                         {"e_hm_j", fr.energy.e_hm},
                                         {"e_total_j", fr.energy.e_total()},
                                         {"pulse_mean_abs_mz", fr.pulse_mean_abs_mz},
                                         {"trajectory_rows", traj.size()}});
    std::cout << "bit " << fr.bit << ", energy " << fr.energy.e_total() * 1e12 << " pJ, "
              << traj.size() << " trajectory rows -> " << dir.string() << "\n";
}

void cmd_scurve(const RunConfig& c, const fs::path& dir) {
    SimConfig sim = c.sim;
    sim.seed = c.seed;
    Protocol proto = c.protocol();
    SweepSettings sw = pick_sweep(c);
    SCurve sc = build_scurve(c.device, proto, sw, sim, c.threads);
    CsvWriter csv((dir / "scurve.csv").string(), {"j_a_m2", "p_one", "n_flips"});
    for (const ScurvePoint& pt : sc.points)
        csv.row({pt.J, pt.p_one, static_cast<double>(pt.n)});

    ValidationSettings vs;
    vs.sweep = sw;
    ValidityReport vr = validate_device(c.device, proto, sim, c.threads, vs);
    write_json(dir / "validity.json",
               json{{"valid", vr.valid},
                    {"reason", reason_name(vr.reason)},
                    {"p_low", vr.p_low},
                    {"p_high", vr.p_high},
                    {"monotonicity_violations", vr.monotonicity_violations},
                    {"stochastic_regime", vr.stochastic_regime},
                    {"message", vr.message}});
    std::cout << (vr.valid ? "valid" : "invalid") << " device, span [" << vr.p_low << ", "
              << vr.p_high << "] -> " << dir.string() << "\n";
}

void cmd_sample(const RunConfig& c, bool ideal_coin, const fs::path& dir) {
    SimConfig sim = c.sim;
    sim.seed = c.seed;
    TruncatedDistribution target = c.target_dist();

    std::unique_ptr<CoinSource> coin;
    if (ideal_coin) {
        coin = std::make_unique<IdealCoin>(derive_seed(c.seed, 2));
    } else {
        PhysicsCoinFactory factory(c.device, c.protocol(), sim);
        CheckResult cr = factory.check(derive_seed(c.seed, 1), c.threads);
        if (!cr.valid) throw ConfigError("device failed validation: " + cr.reason);
        coin = factory.make_coin(derive_seed(c.seed, 2), c.threads);
    }

    const int k = c.k;
    const auto n_bins = std::size_t{1} << k;
    std::vector<std::uint64_t> counts(n_bins, 0);
    CdfFn cdf = target.cdf_fn();
    CsvWriter samples((dir / "samples.csv").string(), {"draw", "bin", "value"});
    for (long i = 0; i < c.n_samples; ++i) {
        SampleResult s = sample(cdf, target.a(), target.b(), k, *coin);
        ++counts[s.bin_index];
        samples.row({static_cast<double>(i), static_cast<double>(s.bin_index), s.value});
    }

    std::vector<double> q = target.bin_probs(k);
    CsvWriter hist((dir / "histogram.csv").string(), {"bin", "x_mid", "count", "p_model"});
    for (std::size_t b = 0; b < n_bins; ++b) {
        double mid = target.a() + (target.b() - target.a()) *
                                      ((static_cast<double>(b) + 0.5) / static_cast<double>(n_bins));
        hist.row({static_cast<double>(b), mid, static_cast<double>(counts[b]), q[b]});
    }

    double kl = kl_divergence(counts, q);
    double e_per_flip = coin->flips() ? coin->energy() / static_cast<double>(coin->flips()) : 0.0;
    double score = config_score(e_per_flip, kl, c.w1, c.w2);
    write_json(dir / "metrics.json", json{{"n_samples", c.n_samples},
                                          {"k", k},
                                          {"coin", ideal_coin ? "ideal" : "device"},
                                          {"kl", kl},
                                          {"flips", coin->flips()},
                                          {"energy_total_j", coin->energy()},
                                          {"energy_per_flip_j", e_per_flip},
                                          {"score", score}});
    std::cout << "kl " << kl << ", energy/flip " << e_per_flip * 1e12 << " pJ, score " << score
              << " -> " << dir.string() << "\n";
}

void write_record_csv(const fs::path& path, const RunArchive& ar,
                      const std::vector<std::size_t>& idx) {
    std::size_t dim = ar.empty() ? 0 : ar.records().front().genome.size();
    std::vector<std::string> header{"eval_index", "generation", "source"};
    for (std::size_t g = 0; g < dim; ++g) header.push_back("gene_" + std::to_string(g));
    for (const char* col : {"valid", "energy_j", "kl", "score"}) header.push_back(col);
    CsvWriter csv(path.string(), header);
    for (std::size_t i : idx) {
        const ArchiveRecord& r = ar.records()[i];
        std::vector<std::string> cells{std::to_string(r.eval_index),
                                       std::to_string(r.generation), r.source};
        for (double g : r.genome) cells.push_back(fmt_double(g));
        cells.push_back(r.valid ? "1" : "0");
        cells.push_back(fmt_double(r.objectives.energy));
        cells.push_back(fmt_double(r.objectives.kl));
        cells.push_back(fmt_double(r.score));
        csv.row_raw(cells);
    }
}

void cmd_optimize(const RunConfig& c, long reeval_n, const fs::path& dir) {
    SimConfig sim = c.sim;
    TruncatedDistribution target = c.target_dist();
    EvalSettings es = c.eval_settings();
    ParamSpace space = ParamSpace::for_kind(c.protocol_kind == "stt" ? DeviceKind::stt
                                                                     : DeviceKind::sot);
    std::unique_ptr<GenomeEvaluator> ev;
    if (c.surrogate)
        ev = std::make_unique<SurrogateGenomeEvaluator>(target, es);
    else
        ev = std::make_unique<PhysicsGenomeEvaluator>(space, target, es, sim);

    RunArchive archive;
    const std::string archive_path = (dir / "archive.jsonl").string();
    json summary;
    if (c.algo == "nsga2") {
        Nsga2Config nc = c.nsga;
        nc.seed = c.seed;
        nc.threads = c.threads;
        // Flushing each generation bounds the loss on interrupt to one
        // generation; the progress line goes to stderr to keep stdout terse.
        nc.on_generation = [&](int gen) {
            std::cerr << "generation " << gen << "/" << nc.generations << ", archive "
                      << archive.size() << "\n";
            archive.save_jsonl(archive_path);
        };
        Nsga2Result res = nsga2_run(*ev, nc, &archive);
        summary["algo"] = "nsga2";
        summary["evaluations"] = res.evaluations;
    } else {
        Environment env(*ev, &archive);
        CemConfig cc = c.cem;
        cc.seed = c.seed;
        cc.on_batch = [&](std::uint64_t steps) {
            std::cerr << "cem step " << steps << "/" << cc.budget << ", archive "
                      << archive.size() << "\n";
            archive.save_jsonl(archive_path);
        };
        CemResult res = cem_agent(env, ev->dim(), cc);
        summary["algo"] = "cem";
        summary["evaluations"] = res.steps;
        summary["found_valid"] = res.found_valid;
        summary["best_score"] = res.best_score;
    }

    archive.save_jsonl((dir / "archive.jsonl").string());
    archive_to_csv(archive, (dir / "archive.csv").string());
    std::vector<std::size_t> front = pareto_front(archive);
    write_record_csv(dir / "pareto.csv", archive, front);

    // survivors get a long confirmation run at a bigger sample budget
    std::vector<std::size_t> best = top_k(archive, 5);
    EvalSettings es_long = es;
    es_long.n_samples = reeval_n;
    std::unique_ptr<GenomeEvaluator> ev_long;
    if (c.surrogate)
        ev_long = std::make_unique<SurrogateGenomeEvaluator>(target, es_long);
    else
        ev_long = std::make_unique<PhysicsGenomeEvaluator>(space, target, es_long, sim);
    std::size_t dim = ev->dim();
    std::vector<std::string> header{"rank", "eval_index"};
    for (std::size_t g = 0; g < dim; ++g) header.push_back("gene_" + std::to_string(g));
    for (const char* col : {"valid", "energy_j", "kl", "score"}) header.push_back(col);
    CsvWriter top_csv((dir / "top5.csv").string(), header);
    for (std::size_t r = 0; r < best.size(); ++r) {
        const ArchiveRecord& rec = archive.records()[best[r]];
        EvalOutcome out = ev_long->evaluate(rec.genome, derive_seed(c.seed, 0x700000 + r));
        std::vector<std::string> cells{std::to_string(r), std::to_string(rec.eval_index)};
        for (double g : rec.genome) cells.push_back(fmt_double(g));
        cells.push_back(out.valid ? "1" : "0");
        cells.push_back(fmt_double(out.objectives.energy));
        cells.push_back(fmt_double(out.objectives.kl));
        cells.push_back(fmt_double(out.score));
        top_csv.row_raw(cells);
    }

    std::size_t n_valid = 0;
    for (const ArchiveRecord& r : archive.records()) n_valid += r.valid ? 1 : 0;
    summary["archive_records"] = archive.size();
    summary["valid_records"] = n_valid;
    summary["pareto_size"] = front.size();
    summary["reeval_n"] = reeval_n;
    write_json(dir / "summary.json", summary);
    std::cout << archive.size() << " evaluations (" << n_valid << " valid), front "
              << front.size() << " -> " << dir.string() << "\n";
}

void cmd_analyze(const std::string& archive_path, int top_n, int bins, const fs::path& dir) {
    RunArchive ar = RunArchive::load_jsonl(archive_path);
    std::vector<std::size_t> front = pareto_front(ar);
    write_record_csv(dir / "pareto.csv", ar, front);
    std::vector<std::size_t> best = top_k(ar, static_cast<std::size_t>(top_n));
    write_record_csv(dir / "top.csv", ar, best);

    auto hist = exploration_hist(ar, bins);
    CsvWriter hist_csv((dir / "hist.csv").string(), {"gene", "bin", "count"});
    for (std::size_t g = 0; g < hist.size(); ++g)
        for (std::size_t b = 0; b < hist[g].size(); ++b)
            hist_csv.row({static_cast<double>(g), static_cast<double>(b),
                          static_cast<double>(hist[g][b])});

    std::size_t n_valid = 0;
    double best_score = k_invalid_objective;
    for (const ArchiveRecord& r : ar.records()) {
        if (r.valid) {
            ++n_valid;
            best_score = std::min(best_score, r.score);
        }
    }
    write_json(dir / "summary.json", json{{"records", ar.size()},
                                          {"valid_records", n_valid},
                                          {"pareto_size", front.size()},
                                          {"best_score", best_score}});
    std::cout << ar.size() << " records (" << n_valid << " valid), front " << front.size()
              << ", best score " << best_score << " -> " << dir.string() << "\n";
}

void cmd_particle(double x0, double alpha_true, double kbt, double pdt, int n_steps,
                  std::uint64_t seed, const fs::path& dir) {
    ParticleTrace tr = simulate_particle(x0, alpha_true, kbt, pdt, n_steps, seed);
    CsvWriter csv((dir / "trace.csv").string(), {"i", "t_s", "x_um"});
    for (std::size_t i = 0; i < tr.positions.size(); ++i)
        csv.row({static_cast<double>(i), static_cast<double>(i) * tr.dt, tr.positions[i]});
    GammaSpec post = posterior_gamma(tr);
    write_json(dir / "posterior.json",
               json{{"shape", post.shape},
                    {"rate", post.rate},
                    {"posterior_mean", post.shape / post.rate},
                    {"n_increments", tr.positions.size() - 1},
                    {"alpha_true", alpha_true}});
    std::cout << "posterior gamma(shape " << post.shape << ", rate " << post.rate
              << "), mean " << post.shape / post.rate << " -> " << dir.string() << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic magnetic-tunnel-junction random-number toolkit"};
    app.require_subcommand(1);

    CommonFlags f_sim, f_scurve, f_sample, f_opt;
    auto* sim_cmd =
        app.add_subcommand("simulate", "run one coinflip protocol and export the trajectory");
    add_common(sim_cmd, f_sim);

    auto* scurve_cmd =
        app.add_subcommand("scurve", "sweep the bias current and report device validity");
    add_common(scurve_cmd, f_scurve);
    std::optional<double> sw_jmin, sw_jmax;
    std::optional<int> sw_points, sw_flips;
    scurve_cmd->add_option("--j-min", sw_jmin, "sweep start, A/m^2");
    scurve_cmd->add_option("--j-max", sw_jmax, "sweep end, A/m^2");
    scurve_cmd->add_option("--points", sw_points, "sweep points");
    scurve_cmd->add_option("--flips", sw_flips, "flips per sweep point");

    auto* sample_cmd = app.add_subcommand(
        "sample", "draw from the truncated-gamma target through the coinflip tree");
    add_common(sample_cmd, f_sample);
    std::optional<long> opt_n;
    std::optional<int> opt_k;
    bool ideal_coin = false;
    sample_cmd->add_option("--n", opt_n, "number of samples");
    sample_cmd->add_option("--depth", opt_k, "tree depth (2^k bins)");
    sample_cmd->add_flag("--ideal-coin", ideal_coin, "use a perfect PRNG coin instead of devices");

    auto* opt_cmd =
        app.add_subcommand("optimize", "search the device parameter space for the target");
    add_common(opt_cmd, f_opt);
    std::optional<std::string> opt_algo;
    bool opt_surrogate = false;
    std::optional<int> opt_pop, opt_gens;
    std::optional<std::uint64_t> opt_budget;
    long reeval_n = 100000;
    opt_cmd->add_option("--algo", opt_algo, "nsga2 or cem");
    opt_cmd->add_flag("--surrogate", opt_surrogate, "optimize the analytic stand-in device");
    opt_cmd->add_option("--pop", opt_pop, "nsga2 population size");
    opt_cmd->add_option("--generations", opt_gens, "nsga2 generations");
    opt_cmd->add_option("--budget", opt_budget, "cem step budget");
    opt_cmd->add_option("--reeval-n", reeval_n, "sample count for the top-5 confirmation runs");

    auto* an_cmd = app.add_subcommand("analyze", "pareto front, top-k, and exploration stats");
    std::string an_archive;
    std::uint64_t an_seed = 1;
    std::string an_out = ".";
    int an_top = 5, an_bins = 20;
    an_cmd->add_option("--archive", an_archive, "archive.jsonl from an optimize run")->required();
    an_cmd->add_option("--seed", an_seed, "names the run directory");
    an_cmd->add_option("--out", an_out, "parent directory for the run folder");
    an_cmd->add_option("--top", an_top, "top-k size");
    an_cmd->add_option("--bins", an_bins, "histogram bins per gene");

    auto* pg_cmd = app.add_subcommand(
        "particle-gamma", "drag-coefficient posterior from a synthetic particle trace");
    double pg_x0 = 0.0, pg_alpha = 50.0 / 311.44, pg_kbt = 4.1e-3, pg_dt = 0.01;
    int pg_n = 100;
    std::uint64_t pg_seed = 1;
    std::string pg_out = ".";
    pg_cmd->add_option("--x0", pg_x0, "initial position, um");
    pg_cmd->add_option("--alpha-true", pg_alpha, "true drag coefficient, pN*s/um");
    pg_cmd->add_option("--kbt", pg_kbt, "thermal energy, pN*um");
    pg_cmd->add_option("--pdt", pg_dt, "trace time step, s");
    pg_cmd->add_option("--n-steps", pg_n, "number of increments");
    pg_cmd->add_option("--seed", pg_seed, "trace seed; names the run directory");
    pg_cmd->add_option("--out", pg_out, "parent directory for the run folder");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim_cmd->parsed()) {
            RunConfig c = resolve(f_sim);
            c.validate();
            fs::path dir = make_run_dir(f_sim.out, "simulate", c.seed);
            c.save((dir / "resolved_config.json").string());
            cmd_simulate(c, dir);
        } else if (scurve_cmd->parsed()) {
            RunConfig c = resolve(f_scurve);
            if (sw_jmin) c.sweep.j_min = *sw_jmin;
            if (sw_jmax) c.sweep.j_max = *sw_jmax;
            if (sw_points) c.sweep.n_points = *sw_points;
            if (sw_flips) c.sweep.n_per_point = *sw_flips;
            c.validate();
            fs::path dir = make_run_dir(f_scurve.out, "scurve", c.seed);
            c.save((dir / "resolved_config.json").string());
            cmd_scurve(c, dir);
        } else if (sample_cmd->parsed()) {
            RunConfig c = resolve(f_sample);
            if (opt_n) c.n_samples = *opt_n;
            if (opt_k) c.k = *opt_k;
            c.validate();
            fs::path dir = make_run_dir(f_sample.out, "sample", c.seed);
            c.save((dir / "resolved_config.json").string());
            cmd_sample(c, ideal_coin, dir);
        } else if (opt_cmd->parsed()) {
            RunConfig c = resolve(f_opt);
            if (opt_algo) c.algo = *opt_algo;
            if (opt_surrogate) c.surrogate = true;
            if (opt_pop) c.nsga.pop_size = *opt_pop;
            if (opt_gens) c.nsga.generations = *opt_gens;
            if (opt_budget) c.cem.budget = *opt_budget;
            c.validate();
            if (reeval_n < 1) throw ConfigError("--reeval-n must be positive");
            fs::path dir = make_run_dir(f_opt.out, "optimize", c.seed);
            c.save((dir / "resolved_config.json").string());
            cmd_optimize(c, reeval_n, dir);
        } else if (an_cmd->parsed()) {
            fs::path dir = make_run_dir(an_out, "analyze", an_seed);
            cmd_analyze(an_archive, an_top, an_bins, dir);
        } else if (pg_cmd->parsed()) {
            fs::path dir = make_run_dir(pg_out, "particle-gamma", pg_seed);
            cmd_particle(pg_x0, pg_alpha, pg_kbt, pg_dt, pg_n, pg_seed, dir);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
