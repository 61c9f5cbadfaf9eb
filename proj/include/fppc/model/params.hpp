#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace fppc {

enum class Topology : std::uint8_t { Tree, Lattice };

/// Lattice type-2 construction. Resample re-draws a type-2 attempt that was
/// overtaken by a type-1 occupation of its target (memoryless restart).
enum class ClockMode : std::uint8_t { Static, Resample };

/// Truncated type-1 clocks: on semi-marked edges a candidate value above
/// `cutoff` is replaced by +inf. Semi-marks are i.i.d. with probability
/// `semi_mark_prob`.
struct Truncation {
    double cutoff = 1.0;
    double semi_mark_prob = 0.0;
};

struct ModelParams {
    int d = 3;
    double lambda = 1.0;
    double rho = 0.0;
    Topology topology = Topology::Tree;
    ClockMode clock_mode = ClockMode::Static;
    std::optional<Truncation> truncation;

    /// Throws ConfigError. The lattice accepts d = 1 as a degenerate test case.
    void validate() const;

    static ModelParams tree(int d, double lambda, double rho);
    static ModelParams lattice(int d, double lambda, double rho,
                               ClockMode mode = ClockMode::Static);
};

std::string to_string(Topology t);
std::string to_string(ClockMode m);

}  // namespace fppc
