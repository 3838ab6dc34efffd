#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alwibp/precedence.hpp"
#include "alwibp/solution.hpp"

namespace alwibp {

enum class RuleKind { MaxTime, MaxPW, MaxIF, MaxF };

// MaxTime defaults to the classical longest-processing-time order; the
// ascending direction is selectable.
struct PriorityRule {
    RuleKind kind = RuleKind::MaxPW;
    bool time_ascending = false;
};

inline const char* rule_name(PriorityRule r) {
    switch (r.kind) {
        case RuleKind::MaxTime: return r.time_ascending ? "MaxTime-asc" : "MaxTime";
        case RuleKind::MaxPW: return "MaxPW";
        case RuleKind::MaxIF: return "MaxIF";
        case RuleKind::MaxF: return "MaxF";
    }
    return "?";
}

// Total order over tasks under the rule's key, ties by ascending task id.
// With a worker, MaxTime and MaxPW use the worker's times; tasks the worker
// cannot execute sort last (they are filtered out at worker stations anyway).
inline std::vector<int> priority_order(const Instance& inst, const PrecedenceClosure& pc,
                                       PriorityRule rule, const WorkerProfile* worker = nullptr) {
    const int n = inst.task_count();
    std::vector<long long> key(static_cast<std::size_t>(n), 0);
    bool descending = true;
    switch (rule.kind) {
        case RuleKind::MaxTime:
            for (int i = 0; i < n; ++i)
                key[i] = (worker && !worker->incompatible(i)) ? worker->time(i)
                         : worker                            ? -1
                                                             : inst.time(i);
            descending = !rule.time_ascending;
            break;
        case RuleKind::MaxPW:
            key = positional_weights(inst, pc, worker);
            break;
        case RuleKind::MaxIF:
            for (int i = 0; i < n; ++i) key[i] = static_cast<long long>(inst.successors(i).size());
            break;
        case RuleKind::MaxF:
            for (int i = 0; i < n; ++i) key[i] = pc.successor_count(i);
            break;
    }
    if (worker) {
        // keep infeasible tasks at the tail in every worker-specific order
        long long worst = descending ? std::numeric_limits<long long>::min()
                                     : std::numeric_limits<long long>::max();
        for (int i = 0; i < n; ++i)
            if (worker->incompatible(i)) key[i] = worst;
    }
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (key[a] != key[b]) return descending ? key[a] > key[b] : key[a] < key[b];
        return a < b;
    });
    return order;
}

namespace detail {

// Station-oriented fill over a chosen subset of tasks. Stations are appended
// one at a time and each is loaded maximally: among the unassigned region
// tasks whose predecessors are all assigned (earlier stations or the station
// under construction) and which fit the remaining capacity, the one ranked
// best by the priority rule enters. At a worker station the worker's times
// apply, the worker's infeasible tasks are skipped, and both the worker-time
// and the conventional-time load must stay within the cycle.
class FillEngine {
public:
    FillEngine(const Instance& inst, const PrecedenceClosure& pc, PriorityRule rule)
        : inst_(inst), pc_(pc), rule_(rule) {
        conv_rank_ = ranks(priority_order(inst, pc, rule, nullptr));
        worker_rank_.assign(static_cast<std::size_t>(inst.worker_count()), {});
    }

    const Instance& instance() const { return inst_; }
    const PrecedenceClosure& closure() const { return pc_; }
    PriorityRule rule() const { return rule_; }

    // Fills stations onto `stations` until every region task is placed.
    // `assigned` covers all tasks already sitting in `stations`.
    // worker_station is the 1-based absolute index that must host `worker`
    // (-1 for a plain fill). Returns false iff the worker's station ends up
    // without a task, i.e. the (worker, station) request is not realizable.
    bool run(std::vector<Station>& stations, std::vector<char> assigned,
             const std::vector<char>& region, int worker = -1, int worker_station = -1) {
        const int n = inst_.task_count();
        std::vector<int> pending(static_cast<std::size_t>(n), 0);
        int remaining = 0;
        for (int i = 0; i < n; ++i) {
            if (!region[i]) continue;
            ++remaining;
            for (int p : inst_.predecessors(i))
                if (!assigned[p]) ++pending[i];
        }
        std::vector<int> avail;
        for (int i = 0; i < n; ++i)
            if (region[i] && pending[i] == 0) avail.push_back(i);

        const std::vector<int>* wrank = nullptr;
        if (worker >= 0) wrank = &worker_ranks(worker);

        const long long cycle = inst_.cycle_time();
        bool worker_done = worker < 0;
        while (remaining > 0 || !worker_done) {
            const int s = static_cast<int>(stations.size()) + 1;
            if (remaining == 0 && !worker_done) return false;  // never reached its station
            Station st;
            const bool at_worker = worker >= 0 && s == worker_station;
            if (at_worker) st.worker = worker;
            long long wload = 0, cload = 0;
            const WorkerProfile* wp = at_worker ? &inst_.worker(worker) : nullptr;
            for (;;) {
                int pick = -1;
                std::size_t pick_pos = 0;
                const std::vector<int>& rank = at_worker ? *wrank : conv_rank_;
                for (std::size_t a = 0; a < avail.size(); ++a) {
                    int i = avail[a];
                    if (at_worker) {
                        if (wp->incompatible(i)) continue;
                        if (wload + wp->time(i) > cycle) continue;
                        if (cload + inst_.time(i) > cycle) continue;
                    } else {
                        if (cload + inst_.time(i) > cycle) continue;
                    }
                    if (pick < 0 || rank[i] < rank[pick]) {
                        pick = i;
                        pick_pos = a;
                    }
                }
                if (pick < 0) break;
                st.tasks.push_back(pick);
                if (at_worker) wload += wp->time(pick);
                cload += inst_.time(pick);
                avail[pick_pos] = avail.back();
                avail.pop_back();
                assigned[pick] = 1;
                --remaining;
                for (int nxt : inst_.successors(pick))
                    if (region[nxt] && !assigned[nxt] && --pending[nxt] == 0) avail.push_back(nxt);
            }
            if (at_worker) {
                if (st.tasks.empty()) return false;
                worker_done = true;
            } else if (st.tasks.empty()) {
                // region tasks blocked by predecessors outside region+assigned
                throw std::logic_error("station fill stalled: region not closed under predecessors");
            }
            stations.push_back(std::move(st));
        }
        return true;
    }

    const std::vector<int>& worker_ranks(int w) {
        auto& slot = worker_rank_[static_cast<std::size_t>(w)];
        if (slot.empty())
            slot = ranks(priority_order(inst_, pc_, rule_, &inst_.worker(w)));
        return slot;
    }

private:
    static std::vector<int> ranks(const std::vector<int>& order) {
        std::vector<int> r(order.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos) r[order[pos]] = static_cast<int>(pos);
        return r;
    }

    const Instance& inst_;
    const PrecedenceClosure& pc_;
    PriorityRule rule_;
    std::vector<int> conv_rank_;
    std::vector<std::vector<int>> worker_rank_;
};

inline std::vector<char> assigned_in(const Instance& inst, const std::vector<Station>& stations) {
    std::vector<char> assigned(static_cast<std::size_t>(inst.task_count()), 0);
    for (const Station& st : stations)
        for (int i : st.tasks) assigned[i] = 1;
    return assigned;
}

}  // namespace detail

struct StationWorker {
    int worker;
    int station;  // 1-based
};

struct BuildResult {
    bool ok = false;
    LineSolution solution;
};

// Completes `fixed_prefix` into a full line, rebuilding from start_station on.
// With station_worker=(w,s), the worker occupies exactly station s and must
// receive at least one task there; otherwise ok=false is returned so the
// caller can skip the pair. Throws on an infeasible or inconsistent prefix.
inline BuildResult build_salbp1(const Instance& inst, const PrecedenceClosure& pc,
                                PriorityRule rule, int start_station,
                                const LineSolution& fixed_prefix,
                                std::optional<StationWorker> station_worker = {}) {
    if (start_station != fixed_prefix.station_count() + 1)
        throw std::invalid_argument("start_station must follow the fixed prefix");
    if (station_worker && station_worker->station != start_station)
        throw std::invalid_argument("the forced worker must sit at start_station");

    // prefix sanity: unique tasks, predecessors inside, loads within cycle
    std::vector<char> assigned(static_cast<std::size_t>(inst.task_count()), 0);
    for (int s = 0; s < fixed_prefix.station_count(); ++s) {
        const Station& st = fixed_prefix.stations[s];
        for (int i : st.tasks) {
            if (i < 0 || i >= inst.task_count() || assigned[i])
                throw ValidationError("prefix assigns task twice or out of range");
            assigned[i] = 1;
        }
        if (conventional_load(inst, st) > inst.cycle_time() ||
            station_load(inst, st) > inst.cycle_time())
            throw ValidationError("prefix station " + std::to_string(s + 1) + " overloaded");
    }
    std::vector<int> where = station_of_task(inst, fixed_prefix);
    for (auto [i, j] : inst.arcs()) {
        bool ai = assigned[i], aj = assigned[j];
        if (aj && !ai) throw ValidationError("prefix breaks precedence: task " +
                                             std::to_string(j + 1) + " placed before task " +
                                             std::to_string(i + 1));
        if (ai && aj && where[i] > where[j])
            throw ValidationError("prefix breaks precedence between tasks " +
                                  std::to_string(i + 1) + " and " + std::to_string(j + 1));
    }

    std::vector<char> region(static_cast<std::size_t>(inst.task_count()), 0);
    for (int i = 0; i < inst.task_count(); ++i) region[i] = !assigned[i];

    detail::FillEngine engine(inst, pc, rule);
    LineSolution out;
    out.stations = fixed_prefix.stations;
    BuildResult res;
    res.ok = engine.run(out.stations, std::move(assigned), region,
                        station_worker ? station_worker->worker : -1,
                        station_worker ? station_worker->station : -1);
    if (res.ok) res.solution = std::move(out);
    return res;
}

// Convenience: plain SALBP-1 build from scratch.
inline LineSolution build_salbp1(const Instance& inst, const PrecedenceClosure& pc,
                                 PriorityRule rule) {
    return build_salbp1(inst, pc, rule, 1, LineSolution{}, {}).solution;
}

}  // namespace alwibp
