#include "fppc/model/clock.hpp"

#include <cstdlib>
#include <string>

#include "fppc/model/errors.hpp"

namespace fppc {

const char* to_string(ClockKind k)
{
    switch (k) {
    case ClockKind::T1: return "T1";
    case ClockKind::Tu: return "Tu";
    case ClockKind::Td: return "Td";
    case ClockKind::T2: return "T2";
    case ClockKind::T3: return "T3";
    case ClockKind::Conv: return "Conv";
    case ClockKind::SemiMark: return "SemiMark";
    case ClockKind::SeedMark: return "SeedMark";
    }
    return "?";
}

ClockKey edge_key(ClockKind kind, const TreeSite& child)
{
    if (kind != ClockKind::T1 && kind != ClockKind::Tu && kind != ClockKind::Td &&
        kind != ClockKind::SemiMark)
        throw ConfigError(std::string("clock kind ") + to_string(kind) +
                          " is not a tree edge clock");
    if (child.is_root()) throw DomainError("the root is not the lower end of any edge");
    return {kind, Topology::Tree, child.key()};
}

ClockKey edge_key(ClockKind kind, const LatticeSite& a, const LatticeSite& b)
{
    if (kind != ClockKind::T1 && kind != ClockKind::T2 && kind != ClockKind::T3 &&
        kind != ClockKind::SemiMark)
        throw ConfigError(std::string("clock kind ") + to_string(kind) +
                          " is not a lattice edge clock");
    if (!adjacent(a, b)) throw PathError("edge_key: sites " + a.str() + " and " + b.str() +
                                         " are not adjacent");
    int axis = 0;
    while (a[axis] == b[axis]) ++axis;
    const LatticeSite& lower = a[axis] < b[axis] ? a : b;
    return {kind, Topology::Lattice, lattice_edge_id(lower.key(), axis)};
}

ClockKey conv_key(const TreeSite& s) { return {ClockKind::Conv, Topology::Tree, s.key()}; }

ClockKey conv_key(const LatticeSite& s)
{
    return {ClockKind::Conv, Topology::Lattice, s.key()};
}

std::optional<double> ClockOverrides::find(ClockKind kind, Topology topo,
                                           std::uint64_t id) const
{
    if (!values.empty()) {
        auto it = values.find(ClockKey{kind, topo, id});
        if (it != values.end()) return it->second;
    }
    return defaults[static_cast<int>(kind)];
}

RandomField::RandomField(const ModelParams& params, std::uint64_t master_seed,
                         std::uint64_t trial_index)
    : master_seed_(master_seed),
      trial_index_(trial_index),
      stream_(stream_word(master_seed, trial_index)),
      topology_(params.topology),
      lambda_(params.lambda),
      rho_(params.rho),
      truncation_(params.truncation)
{
    if (!(lambda_ > 0.0)) throw ConfigError("lambda must be positive");
    if (!(rho_ >= 0.0)) throw ConfigError("rho must be nonnegative");
}

double RandomField::rate(ClockKind kind) const noexcept
{
    switch (kind) {
    case ClockKind::T1: return 1.0;
    case ClockKind::Tu:
    case ClockKind::Td:
    case ClockKind::T2:
    case ClockKind::T3: return lambda_;
    case ClockKind::Conv: return rho_;
    default: return 1.0;
    }
}

double RandomField::sample(const ClockKey& key) const
{
    if (key.topology != topology_)
        throw ConfigError(std::string("clock key for the ") + to_string(key.topology) +
                          " sampled from a " + to_string(topology_) + " field");
    bool tree = topology_ == Topology::Tree;
    switch (key.kind) {
    case ClockKind::Tu:
    case ClockKind::Td:
        if (!tree) throw ConfigError("Tu/Td clocks exist only on the tree");
        break;
    case ClockKind::T2:
    case ClockKind::T3:
        if (tree) throw ConfigError("T2/T3 clocks exist only on the lattice");
        break;
    case ClockKind::SemiMark:
    case ClockKind::SeedMark:
        throw ConfigError("marks are uniform draws; use RandomField::uniform");
    default: break;
    }
    return value(key.kind, key.id);
}

RandomField RandomField::with_rates(double lambda, double rho) const
{
    RandomField f = *this;
    if (!(lambda > 0.0) || !(rho >= 0.0)) throw ConfigError("invalid rates");
    f.lambda_ = lambda;
    f.rho_ = rho;
    return f;
}

double path_time(const RandomField& field, std::span<const TreeSite> path, ClockKind kind)
{
    if (field.topology() != Topology::Tree) throw ConfigError("tree path on a lattice field");
    if (kind != ClockKind::T1 && kind != ClockKind::Tu && kind != ClockKind::Td)
        throw ConfigError("tree path_time kind must be T1, Tu or Td");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const TreeSite& a = path[i];
        const TreeSite& b = path[i + 1];
        bool down = a.is_parent_of(b);
        if (!down && !b.is_parent_of(a))
            throw PathError("path_time: " + a.str() + " and " + b.str() + " are not adjacent");
        const TreeSite& child = down ? b : a;
        ClockKind k = kind == ClockKind::T1 ? ClockKind::T1
                                            : (down ? ClockKind::Td : ClockKind::Tu);
        total += field.sample(edge_key(k, child));
    }
    return total;
}

double path_time(const RandomField& field, std::span<const LatticeSite> path, ClockKind kind)
{
    if (field.topology() != Topology::Lattice)
        throw ConfigError("lattice path on a tree field");
    if (kind != ClockKind::T1 && kind != ClockKind::T2 && kind != ClockKind::T3)
        throw ConfigError("lattice path_time kind must be T1, T2 or T3");
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!adjacent(path[i], path[i + 1]))
            throw PathError("path_time: " + path[i].str() + " and " + path[i + 1].str() +
                            " are not adjacent");
        total += field.sample(edge_key(kind, path[i], path[i + 1]));
    }
    return total;
}

}  // namespace fppc
