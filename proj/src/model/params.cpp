#include "fppc/model/params.hpp"

#include <cmath>

#include "fppc/model/errors.hpp"

namespace fppc {

void ModelParams::validate() const
{
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be positive");
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ConfigError("rho must be nonnegative");
    if (topology == Topology::Tree) {
        if (d < 3 || d > 255) throw ConfigError("tree degree d must lie in [3, 255]");
        if (clock_mode == ClockMode::Resample)
            throw ConfigError("Resample clock mode applies only to the lattice");
    } else {
        if (d < 1 || d > 8) throw ConfigError("lattice dimension d must lie in [1, 8]");
    }
    if (truncation) {
        if (!(truncation->cutoff > 0.0)) throw ConfigError("truncation cutoff K must be positive");
        if (!(truncation->semi_mark_prob >= 0.0 && truncation->semi_mark_prob <= 1.0))
            throw ConfigError("semi-mark probability q must lie in [0, 1]");
    }
}

ModelParams ModelParams::tree(int d, double lambda, double rho)
{
    ModelParams p;
    p.d = d;
    p.lambda = lambda;
    p.rho = rho;
    p.topology = Topology::Tree;
    return p;
}

ModelParams ModelParams::lattice(int d, double lambda, double rho, ClockMode mode)
{
    ModelParams p;
    p.d = d;
    p.lambda = lambda;
    p.rho = rho;
    p.topology = Topology::Lattice;
    p.clock_mode = mode;
    return p;
}

std::string to_string(Topology t) { return t == Topology::Tree ? "tree" : "lattice"; }

std::string to_string(ClockMode m) { return m == ClockMode::Static ? "static" : "resample"; }

}  // namespace fppc
