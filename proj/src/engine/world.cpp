#include "fppc/engine/world.hpp"

#include <algorithm>
#include <type_traits>

#include "fppc/model/errors.hpp"

namespace fppc {

const char* to_string(Effect e)
{
    switch (e) {
    case Effect::Occupied1: return "occupied1";
    case Effect::Suppressed: return "suppressed";
    case Effect::Occupied2: return "occupied2";
    case Effect::Converted: return "converted";
    case Effect::NoOp: return "noop";
    case Effect::Rescheduled: return "rescheduled";
    case Effect::Pruned: return "pruned";
    }
    return "?";
}

const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::SurvivedToTarget: return "survived";
    case Verdict::Extinct: return "extinct";
    case Verdict::Capped: return "capped";
    case Verdict::Confined: return "confined";
    }
    return "?";
}

namespace {

template <class Topo>
Topo make_topology(const ModelParams& p, int target, const EngineOptions& opts)
{
    if constexpr (std::is_same_v<Topo, TreeTopology>) {
        if (p.topology != Topology::Tree) throw ConfigError("tree world needs tree params");
        return TreeTopology(p.d);
    } else {
        if (p.topology != Topology::Lattice)
            throw ConfigError("lattice world needs lattice params");
        int r = opts.box_radius >= 0 ? opts.box_radius : target;
        return LatticeTopology(p.d, r);
    }
}

}  // namespace

template <class Topo>
World<Topo>::World(const ModelParams& params, const RandomField& field, int target, Caps caps,
                   EngineOptions opts)
    : params_(params),
      field_(field),
      topo_(make_topology<Topo>(params, target, opts)),
      target_(target),
      caps_(caps),
      opts_(opts)
{
    params_.validate();
    if (target < 0) throw ConfigError("target must be nonnegative");
    if (caps.max_sites == 0 || caps.max_events == 0 || !(caps.horizon > 0.0))
        throw ConfigError("caps must be positive");
    if (field.topology() != params.topology)
        throw ConfigError("field topology does not match params");
    if (opts.tube_generations < 0) throw ConfigError("tube generations must be >= 0");
    grow_records();
    occupy1(topo_.root(), 0.0, topo_.root());
}

template <class Topo>
void World<Topo>::grow_records()
{
    if (records_.size() < topo_.size()) {
        records_.resize(topo_.size());
        pending_a1_.resize(topo_.size(), 0);
    }
}

template <class Topo>
void World<Topo>::push(const Event& e)
{
    queue_.push(e);
}

template <class Topo>
void World<Topo>::occupy1(Node x, double t, Node src)
{
    SiteRecord& r = records_[x];
    r.state = Occupant::Type1;
    r.tau1 = t;
    r.parent1 = src;
    ++live1_;
    ++occupied_;
    pending_to_vacant_ -= pending_a1_[x];
    int dist = topo_.distance(x);
    max_distance_ = std::max(max_distance_, dist);
    if (dist >= target_) reached_ = true;

    double conv = topo_.conv(field_, x);
    if (conv < kInf) push({t + conv, t, 0, x, x, EventKind::Convert, Step::Flat, false});

    topo_.for_each_neighbor(x, [&](Node nb, std::uint64_t edge, Step step) {
        if constexpr (std::is_same_v<Topo, TreeTopology>) grow_records();
        if (records_[nb].state != Occupant::Vacant) return;
        double dt = topo_.t1(field_, edge, step);
        if (!(dt < kInf)) return;
        push({t + dt, t, edge, nb, x, EventKind::Arrive1, step, false});
        ++pending_a1_[nb];
        ++pending_to_vacant_;
    });

    // Resample: pending type-2 attempts into x are replaced now by a fresh
    // attempt at t + t3. The stale events are dropped when they fire.
    if (params_.clock_mode != ClockMode::Resample) return;
    topo_.for_each_neighbor(x, [&](Node nb, std::uint64_t edge, Step step) {
        const SiteRecord& y = records_[nb];
        if (y.state != Occupant::Type2 || !(y.tau2 < t)) return;
        if (!(y.tau2 + topo_.t2(field_, edge, step) > t)) return;
        double dt = topo_.t3(field_, edge, step);
        if (dt < kInf) push({t + dt, y.tau2, edge, x, nb, EventKind::Arrive2, step, true});
    });
}

template <class Topo>
void World<Topo>::occupy2(Node x, double t, Node src)
{
    SiteRecord& r = records_[x];
    if (r.state == Occupant::Vacant) {
        ++occupied_;
        pending_to_vacant_ -= pending_a1_[x];
    } else {
        --live1_;
    }
    r.state = Occupant::Type2;
    r.tau2 = t;
    r.parent2 = src;

    topo_.for_each_neighbor(x, [&](Node nb, std::uint64_t edge, Step step) {
        if constexpr (std::is_same_v<Topo, TreeTopology>) grow_records();
        if (records_[nb].state == Occupant::Type2) return;
        if constexpr (std::is_same_v<Topo, TreeTopology>) {
            if (opts_.skip_dead_subtrees && step == Step::Down &&
                records_[nb].state == Occupant::Vacant && pending_a1_[nb] == 0)
                return;
        }
        double dt = topo_.t2(field_, edge, step);
        if (!(dt < kInf)) return;
        push({t + dt, t, edge, nb, x, EventKind::Arrive2, step, false});
    });
}

template <class Topo>
EventEffect World<Topo>::step()
{
    if (queue_.empty()) throw DomainError("process_next_event on an empty queue");
    Event e = queue_.top();
    queue_.pop();
    if (e.time < clock_) throw InvariantViolation("event time precedes the clock");
    clock_ = e.time;
    ++events_;
    SiteRecord& r = records_[e.target];

    switch (e.kind) {
    case EventKind::Arrive1: {
        --pending_a1_[e.target];
        if (r.state != Occupant::Vacant) return {e, Effect::Suppressed};
        --pending_to_vacant_;
        if (opts_.tube_generations > 0 &&
            topo_.distance(e.target) + opts_.tube_generations < max_distance_)
            return {e, Effect::Pruned};
        occupy1(e.target, e.time, e.source);
        return {e, Effect::Occupied1};
    }
    case EventKind::Arrive2: {
        if (r.state == Occupant::Type2) return {e, Effect::NoOp};
        if (params_.clock_mode == ClockMode::Resample && !e.resampled &&
            r.state == Occupant::Type1 && r.tau1 > e.scheduled_at)
            return {e, Effect::Rescheduled};
        occupy2(e.target, e.time, e.source);
        return {e, Effect::Occupied2};
    }
    case EventKind::Convert: {
        if (r.state == Occupant::Type2) return {e, Effect::NoOp};
        if (r.state == Occupant::Vacant)
            throw InvariantViolation("conversion scheduled at a vacant site");
        ++conversions_;
        occupy2(e.target, e.time, e.target);
        return {e, Effect::Converted};
    }
    }
    throw InvariantViolation("unknown event kind");
}

template <class Topo>
std::optional<Verdict> World<Topo>::stopping_verdict() const
{
    if (reached_) return Verdict::SurvivedToTarget;
    if (live1_ == 0 && pending_to_vacant_ == 0) return Verdict::Extinct;
    if (queue_.empty()) return Verdict::Confined;
    if (events_ >= caps_.max_events || occupied_ >= caps_.max_sites ||
        queue_.top().time > caps_.horizon)
        return Verdict::Capped;
    return std::nullopt;
}

template <class Topo>
TrialOutcome World<Topo>::run()
{
    std::optional<Verdict> v;
    while (!(v = stopping_verdict())) step();
    TrialOutcome out;
    out.verdict = *v;
    out.stop_time = clock_;
    out.max_distance = max_distance_;
    out.events_processed = events_;
    out.conversions = conversions_;
    out.approximate = opts_.tube_generations > 0;
    return out;
}

template <class Topo>
Node World<Topo>::progenitor(Node n, int* chain_length) const
{
    if (n >= records_.size() || records_[n].state != Occupant::Type2)
        throw DomainError("progenitor_of: site is not occupied by type 2");
    int steps = 0;
    Node cur = n;
    while (records_[cur].parent2 != cur) {
        cur = records_[cur].parent2;
        if (cur == kNoNode || records_[cur].state != Occupant::Type2)
            throw InvariantViolation("broken type-2 ancestry chain");
        ++steps;
    }
    if (chain_length) *chain_length = steps;
    return cur;
}

template <class Topo>
std::size_t World<Topo>::pending_of_kind(EventKind k) const
{
    auto copy = queue_;
    std::size_t n = 0;
    while (!copy.empty()) {
        if (copy.top().kind == k) ++n;
        copy.pop();
    }
    return n;
}

template class World<TreeTopology>;
template class World<LatticeTopology>;

TrialOutcome run_trial(const ModelParams& params, const RandomField& field, int target, Caps caps,
                       EngineOptions opts)
{
    if (params.topology == Topology::Tree) return TreeWorld(params, field, target, caps, opts).run();
    return LatticeWorld(params, field, target, caps, opts).run();
}

TreeSite progenitor_of(const TreeWorld& w, const TreeSite& s)
{
    auto n = w.topology().find(s);
    if (!n) throw DomainError("progenitor_of: site never visited");
    return w.topology().site(w.progenitor(*n));
}

LatticeSite progenitor_of(const LatticeWorld& w, const LatticeSite& s)
{
    auto n = w.topology().find(s);
    if (!n) throw DomainError("progenitor_of: site outside the box");
    return w.topology().site(w.progenitor(*n));
}

}  // namespace fppc
