#pragma once

#include <cmath>
#include <vector>

#include "malvol/model.hpp"
#include "malvol/noise.hpp"
#include "malvol/path.hpp"

namespace malvol::test {

inline OUParams ref_ou() { return {1.0, 0.5, 0.0, 100.0, 0.05, 0.05, 1.0}; }
inline CIRParams ref_cir() { return {1.0, 0.25, 1.0, 100.0, 0.05, 0.05, 1.0}; }
inline VolFunctionSpec ref_vol() { return reference_vol_family(0.1, 0.1); }

inline ValidatedOUModel ou_model(const OUParams& p = ref_ou()) { return *validate_ou(p, ref_vol()).model; }
inline ValidatedCIRModel cir_model(const CIRParams& p = ref_cir()) { return *validate_cir(p, true).model; }

inline std::vector<double> normals(std::uint64_t seed, std::uint64_t path, std::size_t n) {
    std::vector<double> z(n);
    NoiseStream(seed, path, StreamPurpose::Volatility).fill_normals(z);
    return z;
}

/// CIR bundle with Z frozen at z and no noise.
inline PathBundle frozen_cir_path(const TimeGrid& grid, double z) {
    PathBundle p;
    p.model = ModelTag::CIR;
    p.grid = grid;
    p.dW_tilde.assign(grid.n_steps, 0.0);
    p.states.assign(grid.n_nodes(), z);
    p.recip_integral.resize(grid.n_nodes());
    for (std::size_t i = 0; i < grid.n_nodes(); ++i) p.recip_integral[i] = grid.time(i) / z;
    p.avg_variance = z;
    p.ito_prefix.assign(grid.n_nodes(), 0.0);
    return p;
}

}  // namespace malvol::test
