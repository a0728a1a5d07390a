#include "mtjrng/run_config.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include <json.hpp>

#include "mtjrng/errors.hpp"

namespace mtjrng {

using nlohmann::json;

namespace {

void expect_keys(const json& j, const char* ctx, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(std::string(ctx) + " must be a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known)
            throw ConfigError("unknown key in " + std::string(ctx) + ": " + item.key());
    }
}

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void parse_device(const json& j, DeviceParams& d) {
    expect_keys(j, "device",
                {"alpha", "k_i", "m_s", "r_p", "eta", "t_f", "d_mtj", "hm_thickness",
                 "hm_width", "hm_length", "rho_hm", "tmr", "p_spin", "temperature", "demag"});
    get_if(j, "alpha", d.alpha);
    get_if(j, "k_i", d.K_i);
    get_if(j, "m_s", d.M_s);
    get_if(j, "r_p", d.R_p);
    get_if(j, "eta", d.eta);
    get_if(j, "t_f", d.t_f);
    get_if(j, "d_mtj", d.d_mtj);
    get_if(j, "hm_thickness", d.hm_thickness);
    get_if(j, "hm_width", d.hm_width);
    get_if(j, "hm_length", d.hm_length);
    get_if(j, "rho_hm", d.rho_hm);
    get_if(j, "tmr", d.tmr);
    get_if(j, "p_spin", d.P_spin);
    get_if(j, "temperature", d.T);
    if (j.contains("demag")) {
        auto v = j.at("demag").get<std::vector<double>>();
        if (v.size() != 3) throw ConfigError("demag must have three components");
        d.demag = {v[0], v[1], v[2]};
    }
}

json device_json(const DeviceParams& d) {
    return json{{"alpha", d.alpha},
                {"k_i", d.K_i},
                {"m_s", d.M_s},
                {"r_p", d.R_p},
                {"eta", d.eta},
                {"t_f", d.t_f},
                {"d_mtj", d.d_mtj},
                {"hm_thickness", d.hm_thickness},
                {"hm_width", d.hm_width},
                {"hm_length", d.hm_length},
                {"rho_hm", d.rho_hm},
                {"tmr", d.tmr},
                {"p_spin", d.P_spin},
                {"temperature", d.T},
                {"demag", {d.demag.x, d.demag.y, d.demag.z}}};
}

} // namespace

Protocol RunConfig::protocol() const {
    if (protocol_kind == "sot") return sot;
    if (protocol_kind == "stt") return stt;
    throw ConfigError("protocol kind must be sot or stt, got: " + protocol_kind);
}

TruncatedDistribution RunConfig::target_dist() const {
    return TruncatedDistribution(target, trunc_a, trunc_b);
}

EvalSettings RunConfig::eval_settings() const {
    EvalSettings es;
    es.n_samples = n_samples;
    es.k = k;
    es.w1 = w1;
    es.w2 = w2;
    es.threads = threads;
    return es;
}

void RunConfig::validate() const {
    try {
        device.validate();
    } catch (const Error& e) {
        throw ConfigError(std::string("device: ") + e.what());
    }
    if (protocol_kind != "sot" && protocol_kind != "stt")
        throw ConfigError("protocol kind must be sot or stt, got: " + protocol_kind);
    if (!(sot.t_pulse > 0.0) || sot.t_relax < 0.0)
        throw ConfigError("sot pulse/relax durations out of range");
    if (!(stt.t_pulse > 0.0) || stt.t_relax < 0.0 || !(stt.t_reset > 0.0))
        throw ConfigError("stt pulse/relax/reset durations out of range");
    if (!(sim.dt > 0.0) || sim.dt > 10e-12)
        throw ConfigError("dt must lie in (0, 10 ps]");
    if (sim.renorm_every < 1) throw ConfigError("renorm_every must be at least 1");
    if (!(target.shape > 0.0) || !(target.rate > 0.0))
        throw ConfigError("target shape and rate must be positive");
    if (!(trunc_a >= 0.0) || !(trunc_b > trunc_a))
        throw ConfigError("truncation must satisfy 0 <= a < b");
    if (n_samples < 1) throw ConfigError("n_samples must be at least 1");
    if (k < 1 || k > 30) throw ConfigError("tree depth k must lie in [1, 30]");
    if (w1 < 0.0 || w2 < 0.0) throw ConfigError("score weights must be non-negative");
    if (sweep.j_min > sweep.j_max) throw ConfigError("sweep j_min exceeds j_max");
    if (sweep.j_min != sweep.j_max && sweep.n_points < 2)
        throw ConfigError("sweep needs at least two points");
    if (sweep.n_per_point < 1) throw ConfigError("sweep n_per_point must be positive");
    if (algo != "nsga2" && algo != "cem")
        throw ConfigError("optimizer algo must be nsga2 or cem, got: " + algo);
    if (nsga.pop_size < 2 || nsga.pop_size % 2 != 0)
        throw ConfigError("nsga2 population must be even and at least 2");
    if (nsga.generations < 0) throw ConfigError("nsga2 generations must be non-negative");
    if (!(nsga.crossover_prob >= 0.0 && nsga.crossover_prob <= 1.0))
        throw ConfigError("crossover probability must lie in [0, 1]");
    if (!(nsga.mutation_sigma >= 0.0)) throw ConfigError("mutation sigma must be non-negative");
    if (cem.batch < 2 || cem.elites < 1 || cem.elites > cem.batch)
        throw ConfigError("cem needs 2 <= elites <= batch");
    if (!(cem.init_sigma > 0.0) || !(cem.sigma_floor >= 0.0))
        throw ConfigError("cem sigmas out of range");
    if (cem.budget < 1) throw ConfigError("cem budget must be positive");
    if (threads < 1) throw ConfigError("threads must be at least 1");
}

std::string RunConfig::to_json_string() const {
    json j;
    j["seed"] = seed; // threads are an execution detail, never serialized
    j["device"] = device_json(device);
    j["protocol"] = json{{"kind", protocol_kind},
                         {"j_sot", sot.J_sot},
                         {"sot_t_pulse", sot.t_pulse},
                         {"sot_t_relax", sot.t_relax},
                         {"j_stt_bias", sot.J_stt_bias},
                         {"j_stt", stt.J_stt},
                         {"stt_t_pulse", stt.t_pulse},
                         {"stt_t_relax", stt.t_relax},
                         {"t_reset", stt.t_reset},
                         {"j_reset", stt.J_reset}};
    j["sim"] = json{{"dt", sim.dt}, {"renorm_every", sim.renorm_every}};
    j["target"] = json{{"shape", target.shape}, {"rate", target.rate}, {"a", trunc_a}, {"b", trunc_b}};
    j["sampling"] = json{{"n_samples", n_samples}, {"k", k}};
    j["score"] = json{{"w1", w1}, {"w2", w2}};
    j["sweep"] = json{{"j_min", sweep.j_min},
                      {"j_max", sweep.j_max},
                      {"n_points", sweep.n_points},
                      {"n_per_point", sweep.n_per_point}};
    j["optimizer"] = json{{"algo", algo},
                          {"surrogate", surrogate},
                          {"pop_size", nsga.pop_size},
                          {"generations", nsga.generations},
                          {"crossover_prob", nsga.crossover_prob},
                          {"mutation_sigma", nsga.mutation_sigma},
                          {"mutation_prob", nsga.mutation_prob},
                          {"batch", cem.batch},
                          {"elites", cem.elites},
                          {"init_sigma", cem.init_sigma},
                          {"sigma_floor", cem.sigma_floor},
                          {"budget", cem.budget}};
    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    expect_keys(j, "config",
                {"seed", "device", "protocol", "sim", "target", "sampling", "score", "sweep",
                 "optimizer"});
    RunConfig c; // defaults, overridden by whatever the file carries
    try {
        get_if(j, "seed", c.seed);
        if (j.contains("device")) parse_device(j.at("device"), c.device);
        if (j.contains("protocol")) {
            const json& p = j.at("protocol");
            expect_keys(p, "protocol",
                        {"kind", "j_sot", "sot_t_pulse", "sot_t_relax", "j_stt_bias", "j_stt",
                         "stt_t_pulse", "stt_t_relax", "t_reset", "j_reset"});
            get_if(p, "kind", c.protocol_kind);
            get_if(p, "j_sot", c.sot.J_sot);
            get_if(p, "sot_t_pulse", c.sot.t_pulse);
            get_if(p, "sot_t_relax", c.sot.t_relax);
            get_if(p, "j_stt_bias", c.sot.J_stt_bias);
            get_if(p, "j_stt", c.stt.J_stt);
            get_if(p, "stt_t_pulse", c.stt.t_pulse);
            get_if(p, "stt_t_relax", c.stt.t_relax);
            get_if(p, "t_reset", c.stt.t_reset);
            get_if(p, "j_reset", c.stt.J_reset);
        }
        if (j.contains("sim")) {
            const json& s = j.at("sim");
            expect_keys(s, "sim", {"dt", "renorm_every"});
            get_if(s, "dt", c.sim.dt);
            get_if(s, "renorm_every", c.sim.renorm_every);
        }
        if (j.contains("target")) {
            const json& t = j.at("target");
            expect_keys(t, "target", {"shape", "rate", "a", "b"});
            get_if(t, "shape", c.target.shape);
            get_if(t, "rate", c.target.rate);
            get_if(t, "a", c.trunc_a);
            get_if(t, "b", c.trunc_b);
        }
        if (j.contains("sampling")) {
            const json& s = j.at("sampling");
            expect_keys(s, "sampling", {"n_samples", "k"});
            get_if(s, "n_samples", c.n_samples);
            get_if(s, "k", c.k);
        }
        if (j.contains("score")) {
            const json& s = j.at("score");
            expect_keys(s, "score", {"w1", "w2"});
            get_if(s, "w1", c.w1);
            get_if(s, "w2", c.w2);
        }
        if (j.contains("sweep")) {
            const json& s = j.at("sweep");
            expect_keys(s, "sweep", {"j_min", "j_max", "n_points", "n_per_point"});
            get_if(s, "j_min", c.sweep.j_min);
            get_if(s, "j_max", c.sweep.j_max);
            get_if(s, "n_points", c.sweep.n_points);
            get_if(s, "n_per_point", c.sweep.n_per_point);
        }
        if (j.contains("optimizer")) {
            const json& o = j.at("optimizer");
            expect_keys(o, "optimizer",
                        {"algo", "surrogate", "pop_size", "generations", "crossover_prob",
                         "mutation_sigma", "mutation_prob", "batch", "elites", "init_sigma",
                         "sigma_floor", "budget"});
            get_if(o, "algo", c.algo);
            get_if(o, "surrogate", c.surrogate);
            get_if(o, "pop_size", c.nsga.pop_size);
            get_if(o, "generations", c.nsga.generations);
            get_if(o, "crossover_prob", c.nsga.crossover_prob);
            get_if(o, "mutation_sigma", c.nsga.mutation_sigma);
            get_if(o, "mutation_prob", c.nsga.mutation_prob);
            get_if(o, "batch", c.cem.batch);
            get_if(o, "elites", c.cem.elites);
            get_if(o, "init_sigma", c.cem.init_sigma);
            get_if(o, "sigma_floor", c.cem.sigma_floor);
            get_if(o, "budget", c.cem.budget);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_string(ss.str());
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << to_json_string();
    if (!out) throw ConfigError("failed writing config: " + path);
}

} // namespace mtjrng
