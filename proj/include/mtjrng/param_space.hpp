#pragma once

#include <string>
#include <vector>

#include "mtjrng/device.hpp"
#include "mtjrng/llg.hpp"

namespace mtjrng {

enum class DeviceKind { sot, stt };

struct Gene {
    std::string name;
    double min = 0.0;
    double max = 1.0;
};

struct DecodedConfig {
    DeviceParams params;
    Protocol proto;
};

// Normalized [0,1]^d search space over the optimizable device parameters.
// Ranges follow the published parameter table; pulse/relax windows share the
// same span.
class ParamSpace {
  public:
    static ParamSpace sot();
    static ParamSpace stt();
    static ParamSpace for_kind(DeviceKind kind);

    DeviceKind kind() const { return kind_; }
    std::size_t dim() const { return genes_.size(); }
    const std::vector<Gene>& genes() const { return genes_; }

    // Linear unnormalization per gene; inputs clamped to [0, 1].
    std::vector<double> decode_values(const std::vector<double>& genome) const;
    // Inverse of decode_values for in-range physical values.
    std::vector<double> encode(const std::vector<double>& values) const;

    // Full device configuration: decoded genes overlaid on module defaults.
    DecodedConfig decode_config(const std::vector<double>& genome) const;

  private:
    ParamSpace(DeviceKind kind, std::vector<Gene> genes)
        : kind_(kind), genes_(std::move(genes)) {}
    DeviceKind kind_;
    std::vector<Gene> genes_;
};

} // namespace mtjrng
