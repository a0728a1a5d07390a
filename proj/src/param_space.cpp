#include "mtjrng/param_space.hpp"

#include <algorithm>
#include <cmath>

#include "mtjrng/errors.hpp"

namespace mtjrng {

namespace {

std::vector<Gene> sot_genes() {
    return {
        {"alpha", 0.01, 0.10},
        {"k_i", 0.2e-3, 1.0e-3},
        {"m_s", 0.3e6, 2.0e6},
        {"r_p", 500.0, 50.0e3},
        {"eta", 0.1, 2.0},
        {"j_sot_mag", 0.01e12, 5.0e12},
        {"t_pulse", 0.5e-9, 75.0e-9},
        {"t_relax", 0.5e-9, 75.0e-9},
    };
}

std::vector<Gene> stt_genes() {
    return {
        {"alpha", 0.01, 0.10},
        {"k_i", 0.2e-3, 1.0e-3},
        {"m_s", 0.3e6, 2.0e6},
        {"r_p", 500.0, 50.0e3},
        {"t_pulse", 0.5e-9, 75.0e-9},
        {"t_relax", 0.5e-9, 75.0e-9},
    };
}

} // namespace

ParamSpace ParamSpace::sot() { return ParamSpace(DeviceKind::sot, sot_genes()); }

ParamSpace ParamSpace::stt() { return ParamSpace(DeviceKind::stt, stt_genes()); }

ParamSpace ParamSpace::for_kind(DeviceKind kind) {
    return kind == DeviceKind::sot ? sot() : stt();
}

std::vector<double> ParamSpace::decode_values(const std::vector<double>& genome) const {
    if (genome.size() != genes_.size())
        throw OutOfRange("genome length does not match parameter space");
    std::vector<double> out(genes_.size());
    for (std::size_t i = 0; i < genes_.size(); ++i) {
        double g = std::clamp(genome[i], 0.0, 1.0);
        if (!std::isfinite(genome[i])) throw OutOfRange("non-finite gene value");
        out[i] = genes_[i].min + g * (genes_[i].max - genes_[i].min);
    }
    return out;
}

std::vector<double> ParamSpace::encode(const std::vector<double>& values) const {
    if (values.size() != genes_.size())
        throw OutOfRange("value vector length does not match parameter space");
    std::vector<double> out(genes_.size());
    for (std::size_t i = 0; i < genes_.size(); ++i) {
        const Gene& g = genes_[i];
        if (values[i] < g.min || values[i] > g.max)
            throw OutOfRange("value outside gene range: " + g.name);
        out[i] = (values[i] - g.min) / (g.max - g.min);
    }
    return out;
}

DecodedConfig ParamSpace::decode_config(const std::vector<double>& genome) const {
    std::vector<double> v = decode_values(genome);
    DecodedConfig dc;
    dc.params = DeviceParams{}; // non-optimized fields keep module defaults
    dc.params.alpha = v[0];
    dc.params.K_i = v[1];
    dc.params.M_s = v[2];
    dc.params.R_p = v[3];
    if (kind_ == DeviceKind::sot) {
        dc.params.eta = v[4];
        ProtocolSOT p;
        p.J_sot = -v[5]; // gene stores the magnitude; drive current is negative
        p.t_pulse = v[6];
        p.t_relax = v[7];
        dc.proto = p;
    } else {
        ProtocolSTT p;
        p.t_pulse = v[4];
        p.t_relax = v[5];
        dc.proto = p;
    }
    return dc;
}

} // namespace mtjrng
