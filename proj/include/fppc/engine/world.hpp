#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "fppc/engine/topology.hpp"
#include "fppc/model/clock.hpp"
#include "fppc/model/params.hpp"

namespace fppc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Occupant : std::uint8_t { Vacant, Type1, Type2 };

/// Per-site occupation record. `parent1` is the neighbour whose type-1
/// attempt occupied the site; `parent2` the neighbour whose type-2 attempt
/// did, or the site itself after its own conversion.
struct SiteRecord {
    double tau1 = kInf;
    double tau2 = kInf;
    Node parent1 = kNoNode;
    Node parent2 = kNoNode;
    Occupant state = Occupant::Vacant;

    std::optional<double> first_type1() const
    {
        return tau1 < kInf ? std::optional<double>(tau1) : std::nullopt;
    }
    std::optional<double> first_type2() const
    {
        return tau2 < kInf ? std::optional<double>(tau2) : std::nullopt;
    }
    /// The most recent occupier (type-2 occupier once the site is type 2).
    Node parent() const { return state == Occupant::Type2 ? parent2 : parent1; }
};

/// Ordered so that ties in time resolve Convert < Arrive2 < Arrive1.
enum class EventKind : std::uint8_t { Convert = 0, Arrive2 = 1, Arrive1 = 2 };

struct Event {
    double time = 0.0;
    double scheduled_at = 0.0;
    std::uint64_t edge = 0;
    Node target = kNoNode;
    Node source = kNoNode;
    EventKind kind = EventKind::Convert;
    Step step = Step::Flat;
    bool resampled = false;
};

struct EventOrder {
    bool operator()(const Event& a, const Event& b) const noexcept
    {
        // std::priority_queue is a max-heap; "a after b" puts the earliest on top.
        if (a.time != b.time) return a.time > b.time;
        if (a.kind != b.kind) return a.kind > b.kind;
        if (a.target != b.target) return a.target > b.target;
        if (a.source != b.source) return a.source > b.source;
        return a.scheduled_at > b.scheduled_at;
    }
};

enum class Effect : std::uint8_t {
    Occupied1,    // Arrive1 at a vacant site
    Suppressed,   // Arrive1 at an occupied site
    Occupied2,    // Arrive2 at a vacant or type-1 site
    Converted,    // Convert at a type-1 site
    NoOp,         // Arrive2 or Convert at a type-2 site
    Rescheduled,  // Resample mode: attempt overtaken by type 1, redrawn
    Pruned,       // frontier-tube mode dropped the attempt
};

const char* to_string(Effect e);

struct EventEffect {
    Event event;
    Effect effect = Effect::NoOp;
};

struct Caps {
    std::uint64_t max_sites = 20'000'000;
    std::uint64_t max_events = 100'000'000;
    double horizon = 1.0e4;
};

/// Confined: the queue emptied while type 1 is still present, which can only
/// happen in a finite box with rho = 0 or with infinite (truncated) clocks.
enum class Verdict : std::uint8_t { SurvivedToTarget, Extinct, Capped, Confined };

const char* to_string(Verdict v);

struct TrialOutcome {
    Verdict verdict = Verdict::Capped;
    double stop_time = 0.0;
    int max_distance = 0;  // deepest depth / largest radius ever reached by type 1
    std::uint64_t events_processed = 0;
    std::uint64_t conversions = 0;
    bool approximate = false;  // frontier-tube mode was active

    friend bool operator==(const TrialOutcome&, const TrialOutcome&) = default;
};

struct EngineOptions {
    /// Lattice only: radius of the simulated box; negative means "= target".
    int box_radius = -1;
    /// Frontier-tube pruning depth G (tree); 0 disables. Results become approximate.
    int tube_generations = 0;
    /// Tree: skip type-2 attempts into a vacant child that no pending type-1
    /// attempt targets. Such a subtree can never host type 1 again, so type-1
    /// dynamics and outcomes are unchanged; only its type-2 records stay vacant.
    bool skip_dead_subtrees = true;
};

/// Event-driven competition process on one topology. Constructing a World is
/// the trial initialisation: the root (origin) is type 1 at time 0 with its
/// conversion and its type-1 attempts scheduled.
template <class Topo>
class World {
  public:
    World(const ModelParams& params, const RandomField& field, int target, Caps caps = {},
          EngineOptions opts = {});

    bool has_pending() const noexcept { return !queue_.empty(); }
    std::size_t pending() const noexcept { return queue_.size(); }
    const Event& peek() const { return queue_.top(); }

    /// Processes the earliest pending event.
    EventEffect step();

    /// Runs until a stopping rule fires.
    TrialOutcome run();

    /// Current verdict if a stopping rule holds now.
    std::optional<Verdict> stopping_verdict() const;

    double clock() const noexcept { return clock_; }
    std::uint64_t live_type1() const noexcept { return live1_; }
    std::uint64_t occupied() const noexcept { return occupied_; }
    std::uint64_t events_processed() const noexcept { return events_; }
    std::uint64_t conversions() const noexcept { return conversions_; }
    std::uint64_t pending_arrive1_to_vacant() const noexcept { return pending_to_vacant_; }
    int max_distance() const noexcept { return max_distance_; }
    bool reached_target() const noexcept { return reached_; }
    int target() const noexcept { return target_; }

    const Topo& topology() const noexcept { return topo_; }
    const RandomField& field() const noexcept { return field_; }
    std::size_t node_count() const noexcept { return topo_.size(); }
    const SiteRecord& record(Node n) const { return records_.at(n); }

    /// Progenitor: follow type-2 parents back to a self-converted site.
    /// Throws DomainError unless n is type 2. `chain_length` receives the number
    /// of spread steps walked.
    Node progenitor(Node n, int* chain_length = nullptr) const;

    /// Pending event counts by kind (diagnostics and tests).
    std::size_t pending_of_kind(EventKind k) const;

  private:
    void push(const Event& e);
    void occupy1(Node x, double t, Node src);
    void occupy2(Node x, double t, Node src);
    void grow_records();

    ModelParams params_;
    RandomField field_;
    Topo topo_;
    int target_;
    Caps caps_;
    EngineOptions opts_;

    std::vector<SiteRecord> records_;
    std::vector<std::uint32_t> pending_a1_;  // pending Arrive1 events per target
    std::priority_queue<Event, std::vector<Event>, EventOrder> queue_;

    double clock_ = 0.0;
    std::uint64_t live1_ = 0;
    std::uint64_t occupied_ = 0;
    std::uint64_t events_ = 0;
    std::uint64_t conversions_ = 0;
    std::uint64_t pending_to_vacant_ = 0;
    int max_distance_ = 0;
    bool reached_ = false;
};

using TreeWorld = World<TreeTopology>;
using LatticeWorld = World<LatticeTopology>;

extern template class World<TreeTopology>;
extern template class World<LatticeTopology>;

/// Runs one trial to a target depth (tree) or box radius (lattice).
TrialOutcome run_trial(const ModelParams& params, const RandomField& field, int target,
                       Caps caps = {}, EngineOptions opts = {});

/// Progenitor of a site in a finished world, addressed by site id.
TreeSite progenitor_of(const TreeWorld& w, const TreeSite& s);
LatticeSite progenitor_of(const LatticeWorld& w, const LatticeSite& s);

}  // namespace fppc
