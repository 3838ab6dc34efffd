#pragma once

#include <algorithm>
#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "alwibp/instance.hpp"
#include "alwibp/oracle.hpp"
#include "alwibp/precedence.hpp"
#include "alwibp/salbp.hpp"
#include "alwibp/solution.hpp"

namespace alwibp {

enum class CihVariant { Forward, Backward };
enum class GraphForm { Normal, Reversed };

inline const char* variant_name(CihVariant v) {
    return v == CihVariant::Forward ? "forward" : "backward";
}

inline const char* form_name(GraphForm f) {
    return f == GraphForm::Normal ? "normal" : "reversed";
}

// 1-based inclusive station range scanned for worker insertions.
struct Segment {
    int first = 1;
    int last = 0;

    bool empty() const { return first > last; }
    int size() const { return empty() ? 0 : last - first + 1; }

    friend bool operator==(const Segment&, const Segment&) = default;
};

// First segment of a line with m_c stations and w_a unassigned workers. A
// single remaining worker gets the whole line; otherwise the forward variant
// scans the leading ceil(m_c/w_a) stations and the backward variant the range
// from station ceil(m_c/w_a) to the end.
inline Segment initial_segment(int m_c, int w_a, CihVariant variant = CihVariant::Forward) {
    if (m_c < 1 || w_a < 1)
        throw std::invalid_argument("initial_segment requires m_c >= 1 and w_a >= 1");
    if (w_a == 1) return {1, m_c};
    const int split = (m_c + w_a - 1) / w_a;
    if (variant == CihVariant::Forward) return {1, split};
    return {split, m_c};
}

// Segment that follows border station s_b: the last fixed station for the
// forward variant, the first frozen one for the backward variant. The raw
// range is clipped to the line; one remaining worker again gets everything
// still open.
inline Segment next_segment(int s_b, int m_c, int w_a, CihVariant variant = CihVariant::Forward) {
    if (w_a < 1) throw std::invalid_argument("next_segment requires w_a >= 1");
    if (variant == CihVariant::Forward)
        return {s_b + 1, std::min(m_c, s_b + 1 + (m_c - s_b) / w_a)};
    if (w_a == 1) return {1, s_b - 1};
    return {std::max(1, (s_b - 1) / w_a), s_b - 1};
}

// a orders before b when it uses fewer stations; on equal counts the solution
// whose tie-break station keeps more idle time wins. Forward runs look at the
// last station of the line, backward runs at the last station left of the
// frozen suffix (fixed_suffix is 0 on final solutions, so both collapse to
// the last station there).
inline std::weak_ordering compare_solutions(const Instance& inst, const LineSolution& a,
                                            const LineSolution& b, CihVariant variant) {
    if (a.station_count() != b.station_count())
        return a.station_count() < b.station_count() ? std::weak_ordering::less
                                                     : std::weak_ordering::greater;
    auto tie_idle = [&](const LineSolution& sol) -> long long {
        if (sol.stations.empty()) return 0;
        int idx = sol.station_count() - 1;
        if (variant == CihVariant::Backward) idx -= sol.fixed_suffix;
        idx = std::clamp(idx, 0, sol.station_count() - 1);
        return station_idle(inst, sol.stations[static_cast<std::size_t>(idx)]);
    };
    const long long ia = tie_idle(a);
    const long long ib = tie_idle(b);
    if (ia != ib) return ia > ib ? std::weak_ordering::less : std::weak_ordering::greater;
    return std::weak_ordering::equivalent;
}

enum class ReferenceMode { Auto, Heuristic, Oracle };

struct ReferenceChoice {
    LineSolution solution;
    PriorityRule rule;  // rule that produced it; MaxPW when the oracle did
    bool from_oracle = false;
};

// Station-minimal worker-free start line: the best of the four priority-rule
// builds, replaced by the exact optimum for small instances (or when forced).
inline ReferenceChoice reference_salbp1(const Instance& inst, const PrecedenceClosure& pc,
                                        ReferenceMode mode = ReferenceMode::Auto,
                                        int oracle_threshold = 12) {
    if (mode == ReferenceMode::Oracle ||
        (mode == ReferenceMode::Auto && inst.task_count() <= oracle_threshold)) {
        OracleResult exact = exact_salbp1(inst);
        if (exact.proven && exact.solution)
            return {std::move(*exact.solution), PriorityRule{RuleKind::MaxPW}, true};
    }
    const PriorityRule rules[] = {
        {RuleKind::MaxTime}, {RuleKind::MaxPW}, {RuleKind::MaxIF}, {RuleKind::MaxF}};
    std::optional<ReferenceChoice> best;
    for (PriorityRule rule : rules) {
        LineSolution sol = build_salbp1(inst, pc, rule);
        if (!best || sol.station_count() < best->solution.station_count())
            best = ReferenceChoice{std::move(sol), rule, false};
    }
    return std::move(*best);
}

// One candidate-enumeration pass of the insertion loop. A regular pass scans
// workers_remaining x segment-size (worker, station) pairs; an extended pass
// rescans the whole open part of the line after a segment produced nothing; a
// fallback entry records a direct construction without candidate rebuilds.
struct CihIteration {
    Segment segment;
    int workers_remaining = 0;
    long long rebuild_calls = 0;
    bool extended = false;
    bool fallback = false;
    long long chosen_worker = -1;  // worker id; -1 when the pass selected nothing
    int chosen_station = 0;        // 1-based; 0 when the pass selected nothing
};

struct CihResult {
    LineSolution solution;
    std::vector<CihIteration> iterations;
    long long rebuild_calls = 0;
    bool used_fallback = false;
    PriorityRule rule;
    CihVariant variant = CihVariant::Forward;
    GraphForm form = GraphForm::Normal;
    int reference_stations = 0;
    bool reference_from_oracle = false;
};

namespace detail {

class CihEngine {
public:
    CihEngine(const Instance& inst, const PrecedenceClosure& pc, PriorityRule rule,
              CihVariant variant)
        : inst_(inst), pc_(pc), rule_(rule), variant_(variant) {
        conv_rank_ = to_ranks(priority_order(inst, pc, rule, nullptr));
        worker_rank_.assign(static_cast<std::size_t>(inst.worker_count()), {});
    }

    CihResult run(const LineSolution& reference) {
        CihResult res;
        res.rule = rule_;
        res.variant = variant_;
        res.reference_stations = reference.station_count();

        LineSolution cur = reference;
        cur.fixed_prefix = 0;
        cur.fixed_suffix = 0;

        std::vector<int> avail = inst_.workers_by_id();
        bool first_pass = true;
        int border = 0;

        while (!avail.empty()) {
            const int m_c = cur.station_count();
            const int w_a = static_cast<int>(avail.size());
            Segment seg = first_pass ? initial_segment(m_c, w_a, variant_)
                                     : next_segment(border, m_c, w_a, variant_);
            first_pass = false;

            std::optional<Candidate> best;
            {
                CihIteration it;
                it.segment = seg;
                it.workers_remaining = w_a;
                if (!seg.empty()) best = scan(cur, avail, seg, it.rebuild_calls);
                note_choice(it, best);
                res.iterations.push_back(it);
            }
            if (!best) {
                const Segment whole = open_range(cur);
                if (!whole.empty() && !(whole.first == seg.first && whole.last == seg.last)) {
                    CihIteration it;
                    it.segment = whole;
                    it.workers_remaining = w_a;
                    it.extended = true;
                    best = scan(cur, avail, whole, it.rebuild_calls);
                    note_choice(it, best);
                    res.iterations.push_back(it);
                }
            }
            if (!best) {
                res.used_fallback = true;
                best = insert_with_reserved(cur, avail);
                CihIteration it;
                it.workers_remaining = w_a;
                it.fallback = true;
                if (!best) {
                    // nothing open suits any remaining worker; rebuild the
                    // whole line from scratch with every worker pinned to a
                    // distinct task it can execute
                    res.iterations.push_back(it);
                    cur = rebuild_everyone();
                    avail.clear();
                    continue;
                }
                note_choice(it, best);
                res.iterations.push_back(it);
            }

            cur = std::move(best->solution);
            if (variant_ == CihVariant::Forward) {
                cur.fixed_prefix = best->station;
                cur.fixed_suffix = 0;
            } else {
                cur.fixed_suffix = cur.station_count() - best->station + 1;
                cur.fixed_prefix = 0;
            }
            border = best->station;
            avail.erase(std::find(avail.begin(), avail.end(), best->worker));
        }

        cur.fixed_prefix = 0;
        cur.fixed_suffix = 0;
        res.solution = std::move(cur);
        for (const CihIteration& it : res.iterations) res.rebuild_calls += it.rebuild_calls;

        const std::vector<Violation> bad = validate(inst_, res.solution);
        if (!bad.empty())
            throw std::logic_error("insertion heuristic produced an infeasible line: " +
                                   bad.front().detail);
        return res;
    }

private:
    struct Candidate {
        LineSolution solution;
        int worker = -1;  // worker index
        int station = 0;  // 1-based station hosting the worker
    };

    void note_choice(CihIteration& it, const std::optional<Candidate>& best) const {
        if (!best) return;
        it.chosen_worker = inst_.worker(best->worker).id;
        it.chosen_station = best->station;
    }

    Segment open_range(const LineSolution& cur) const {
        if (variant_ == CihVariant::Forward) return {cur.fixed_prefix + 1, cur.station_count()};
        return {1, cur.station_count() - cur.fixed_suffix};
    }

    std::optional<Candidate> scan(const LineSolution& ref, const std::vector<int>& avail,
                                  Segment seg, long long& calls) const {
        std::optional<Candidate> best;
        for (int w : avail) {
            for (int s = seg.first; s <= seg.last; ++s) {
                ++calls;
                std::optional<Candidate> cand = try_pair(ref, w, s);
                if (!cand) continue;
                if (!best || compare_solutions(inst_, cand->solution, best->solution, variant_) ==
                                 std::weak_ordering::less)
                    best = std::move(cand);
            }
        }
        return best;
    }

    std::optional<Candidate> try_pair(const LineSolution& ref, int w, int s) const {
        Candidate cand;
        cand.worker = w;
        cand.station = s;
        if (variant_ == CihVariant::Forward) {
            LineSolution prefix;
            prefix.stations.assign(ref.stations.begin(), ref.stations.begin() + (s - 1));
            BuildResult built = build_salbp1(inst_, pc_, rule_, s, prefix, StationWorker{w, s});
            if (!built.ok) return std::nullopt;
            cand.solution = std::move(built.solution);
            cand.solution.fixed_prefix = s - 1;
            cand.solution.fixed_suffix = 0;
            return cand;
        }

        // backward: stations s+1..m of ref stay frozen; the tasks of stations
        // 1..s are refilled from the line start with the worker pinned to
        // station s, and any overflow stations land just before the suffix
        const int m = ref.station_count();
        const int n = inst_.task_count();
        std::vector<char> region(static_cast<std::size_t>(n), 0);
        std::vector<char> assigned(static_cast<std::size_t>(n), 0);
        for (int j = 0; j < s; ++j)
            for (int i : ref.stations[static_cast<std::size_t>(j)].tasks) region[i] = 1;
        for (int j = s; j < m; ++j)
            for (int i : ref.stations[static_cast<std::size_t>(j)].tasks) assigned[i] = 1;

        FillEngine engine(inst_, pc_, rule_);
        std::vector<Station> stations;
        if (!engine.run(stations, std::move(assigned), region, w, s)) return std::nullopt;
        cand.solution.stations = std::move(stations);
        for (int j = s; j < m; ++j)
            cand.solution.stations.push_back(ref.stations[static_cast<std::size_t>(j)]);
        cand.solution.fixed_prefix = 0;
        cand.solution.fixed_suffix = ref.fixed_suffix;
        return cand;
    }

    // Direct construction for the lowest-id worker that can still execute a
    // task of the open part: refill that part conventionally, holding the
    // chosen task back until its predecessors are placed, then open the
    // worker's station with it.
    std::optional<Candidate> insert_with_reserved(const LineSolution& ref,
                                                  const std::vector<int>& avail) {
        const int n = inst_.task_count();
        std::vector<char> region(static_cast<std::size_t>(n), 0);
        std::vector<char> assigned(static_cast<std::size_t>(n), 0);
        int base = 0;
        int cut = ref.station_count();
        if (variant_ == CihVariant::Forward) {
            base = ref.fixed_prefix;
            for (int j = 0; j < base; ++j)
                for (int i : ref.stations[static_cast<std::size_t>(j)].tasks) assigned[i] = 1;
        } else {
            cut = ref.station_count() - ref.fixed_suffix;
            for (int j = cut; j < ref.station_count(); ++j)
                for (int i : ref.stations[static_cast<std::size_t>(j)].tasks) assigned[i] = 1;
        }
        for (int i = 0; i < n; ++i) region[i] = !assigned[i];

        for (int w : avail) {
            const WorkerProfile& wp = inst_.worker(w);
            int reserved = -1;
            for (int i = 0; i < n; ++i) {
                if (!region[i] || wp.incompatible(i)) continue;
                if (wp.time(i) > inst_.cycle_time()) continue;
                reserved = i;
                break;
            }
            if (reserved < 0) continue;

            std::vector<int> spot;
            std::vector<Station> built =
                eager_fill(region, assigned, {{w, reserved}}, spot);

            Candidate cand;
            cand.worker = w;
            if (variant_ == CihVariant::Forward) {
                cand.solution.stations.assign(ref.stations.begin(), ref.stations.begin() + base);
                for (Station& st : built) cand.solution.stations.push_back(std::move(st));
                cand.station = base + spot[0];
            } else {
                cand.solution.stations = std::move(built);
                for (int j = cut; j < ref.station_count(); ++j)
                    cand.solution.stations.push_back(ref.stations[static_cast<std::size_t>(j)]);
                cand.station = spot[0];
                cand.solution.fixed_suffix = ref.fixed_suffix;
            }
            return cand;
        }
        return std::nullopt;
    }

    // Last resort: drop everything built so far and refill the entire line,
    // giving each worker its own station seeded with a distinct task it can
    // execute. The task assignment comes from a maximum bipartite matching;
    // if no complete matching exists the instance cannot host all workers on
    // separate stations at all.
    LineSolution rebuild_everyone() {
        const int n = inst_.task_count();
        std::vector<int> owner(static_cast<std::size_t>(n), -1);
        for (int w : inst_.workers_by_id()) {
            std::vector<char> seen(static_cast<std::size_t>(n), 0);
            if (!match_worker(w, seen, owner))
                throw ValidationError(
                    "workers cannot occupy distinct stations: no assignment of "
                    "distinct compatible tasks exists");
        }
        std::vector<std::pair<int, int>> specs;
        for (int w : inst_.workers_by_id())
            for (int i = 0; i < n; ++i)
                if (owner[i] == w) specs.emplace_back(w, i);

        std::vector<char> region(static_cast<std::size_t>(n), 1);
        std::vector<char> assigned(static_cast<std::size_t>(n), 0);
        std::vector<int> spots;
        LineSolution out;
        out.stations = eager_fill(region, assigned, specs, spots);
        return out;
    }

    bool match_worker(int w, std::vector<char>& seen, std::vector<int>& owner) const {
        const WorkerProfile& wp = inst_.worker(w);
        for (int i = 0; i < inst_.task_count(); ++i) {
            if (seen[i] || wp.incompatible(i)) continue;
            if (wp.time(i) > inst_.cycle_time()) continue;
            seen[i] = 1;
            if (owner[i] < 0 || match_worker(owner[i], seen, owner)) {
                owner[i] = w;
                return true;
            }
        }
        return false;
    }

    // Fills the region into fresh stations. Reserved tasks are withheld from
    // ordinary picks; the moment one has all predecessors placed, its
    // worker's station opens with it, topped up with compatible ready tasks.
    // spots receives each worker's 1-based station index within the result.
    std::vector<Station> eager_fill(const std::vector<char>& region, std::vector<char> assigned,
                                    const std::vector<std::pair<int, int>>& specs,
                                    std::vector<int>& spots) {
        const int n = inst_.task_count();
        const long long cycle = inst_.cycle_time();
        std::vector<int> pending(static_cast<std::size_t>(n), 0);
        int remaining = 0;
        for (int i = 0; i < n; ++i) {
            if (!region[i]) continue;
            ++remaining;
            for (int p : inst_.predecessors(i))
                if (!assigned[p]) ++pending[i];
        }
        std::vector<char> reserved(static_cast<std::size_t>(n), 0);
        for (const auto& [w, t] : specs) reserved[t] = 1;
        std::vector<char> placed(specs.size(), 0);
        spots.assign(specs.size(), 0);

        std::vector<int> ready;
        for (int i = 0; i < n; ++i)
            if (region[i] && pending[i] == 0) ready.push_back(i);

        auto place = [&](Station& st, int i) {
            st.tasks.push_back(i);
            assigned[i] = 1;
            --remaining;
            ready.erase(std::find(ready.begin(), ready.end(), i));
            for (int nxt : inst_.successors(i))
                if (region[nxt] && !assigned[nxt] && --pending[nxt] == 0) ready.push_back(nxt);
        };

        std::vector<Station> out;
        while (remaining > 0) {
            std::size_t due = specs.size();
            for (std::size_t k = 0; k < specs.size(); ++k)
                if (!placed[k] && pending[specs[k].second] == 0) {
                    due = k;
                    break;
                }

            Station st;
            long long cload = 0;
            long long wload = 0;
            if (due < specs.size()) {
                const auto [w, task] = specs[due];
                const WorkerProfile& wp = inst_.worker(w);
                st.worker = w;
                cload = inst_.time(task);
                wload = wp.time(task);
                place(st, task);
                placed[due] = 1;
                spots[due] = static_cast<int>(out.size()) + 1;
                const std::vector<int>& rank = worker_ranks(w);
                for (;;) {
                    int pick = -1;
                    for (int i : ready) {
                        if (reserved[i] || wp.incompatible(i)) continue;
                        if (wload + wp.time(i) > cycle || cload + inst_.time(i) > cycle) continue;
                        if (pick < 0 || rank[i] < rank[pick]) pick = i;
                    }
                    if (pick < 0) break;
                    cload += inst_.time(pick);
                    wload += wp.time(pick);
                    place(st, pick);
                }
            } else {
                for (;;) {
                    int pick = -1;
                    for (int i : ready) {
                        if (reserved[i]) continue;
                        if (cload + inst_.time(i) > cycle) continue;
                        if (pick < 0 || conv_rank_[i] < conv_rank_[pick]) pick = i;
                    }
                    if (pick < 0) break;
                    cload += inst_.time(pick);
                    place(st, pick);
                }
                if (st.tasks.empty())
                    throw std::logic_error("direct fill stalled with tasks remaining");
            }
            out.push_back(std::move(st));
        }
        return out;
    }

    const std::vector<int>& worker_ranks(int w) {
        auto& slot = worker_rank_[static_cast<std::size_t>(w)];
        if (slot.empty()) slot = to_ranks(priority_order(inst_, pc_, rule_, &inst_.worker(w)));
        return slot;
    }

    static std::vector<int> to_ranks(const std::vector<int>& order) {
        std::vector<int> r(order.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            r[order[pos]] = static_cast<int>(pos);
        return r;
    }

    const Instance& inst_;
    const PrecedenceClosure& pc_;
    PriorityRule rule_;
    CihVariant variant_;
    std::vector<int> conv_rank_;
    std::vector<std::vector<int>> worker_rank_;
};

}  // namespace detail

// Rejects references that assign workers, miss or repeat tasks, overload a
// station, or break precedence.
inline void require_reference(const Instance& inst, const LineSolution& ref) {
    std::vector<char> seen(static_cast<std::size_t>(inst.task_count()), 0);
    for (const Station& st : ref.stations) {
        if (st.worker != -1)
            throw std::invalid_argument("reference solution must not assign workers");
        for (int i : st.tasks) {
            if (i < 0 || i >= inst.task_count() || seen[i])
                throw std::invalid_argument("reference solution repeats a task or leaves range");
            seen[i] = 1;
        }
        if (conventional_load(inst, st) > inst.cycle_time())
            throw std::invalid_argument("reference solution overloads a station");
    }
    for (int i = 0; i < inst.task_count(); ++i)
        if (!seen[i])
            throw std::invalid_argument("reference solution misses task " + std::to_string(i + 1));
    const std::vector<int> where = station_of_task(inst, ref);
    for (auto [i, j] : inst.arcs())
        if (where[i] > where[j])
            throw std::invalid_argument("reference solution breaks precedence between tasks " +
                                        std::to_string(i + 1) + " and " + std::to_string(j + 1));
}

// Inserts every worker into the reference line, segment by segment, rebuilding
// the open part for each (worker, station) candidate and keeping the best
// line per pass. With no workers the reference is returned unchanged.
inline CihResult run_cih(const Instance& inst, const PrecedenceClosure& pc,
                         const LineSolution& reference, CihVariant variant,
                         PriorityRule rule = {}) {
    require_reference(inst, reference);
    detail::CihEngine engine(inst, pc, rule, variant);
    return engine.run(reference);
}

// Runs forward and backward insertion on the normal and the reversed
// precedence graph and keeps the best of the four lines. Reversed-form
// results are mapped back by reversing the station order.
inline CihResult run_best_of_four(const Instance& inst, ReferenceMode mode = ReferenceMode::Auto,
                                  int oracle_threshold = 12) {
    const PrecedenceClosure pc = PrecedenceClosure::build(inst);
    const ReferenceChoice ref = reference_salbp1(inst, pc, mode, oracle_threshold);

    if (inst.worker_count() == 0) {
        CihResult res;
        res.solution = ref.solution;
        res.rule = ref.rule;
        res.reference_stations = ref.solution.station_count();
        res.reference_from_oracle = ref.from_oracle;
        return res;
    }

    std::optional<CihResult> best;
    auto consider = [&](CihResult r) {
        if (!best || compare_solutions(inst, r.solution, best->solution, CihVariant::Forward) ==
                         std::weak_ordering::less)
            best = std::move(r);
    };

    for (CihVariant variant : {CihVariant::Forward, CihVariant::Backward}) {
        CihResult r = run_cih(inst, pc, ref.solution, variant, ref.rule);
        r.reference_from_oracle = ref.from_oracle;
        consider(std::move(r));
    }

    const Instance rev = inst.reversed();
    const PrecedenceClosure pc_rev = PrecedenceClosure::build(rev);
    const ReferenceChoice ref_rev = reference_salbp1(rev, pc_rev, mode, oracle_threshold);
    for (CihVariant variant : {CihVariant::Forward, CihVariant::Backward}) {
        CihResult r = run_cih(rev, pc_rev, ref_rev.solution, variant, ref_rev.rule);
        r.form = GraphForm::Reversed;
        r.reference_from_oracle = ref_rev.from_oracle;
        std::reverse(r.solution.stations.begin(), r.solution.stations.end());
        r.solution.fixed_prefix = 0;
        r.solution.fixed_suffix = 0;
        const std::vector<Violation> bad = validate(inst, r.solution);
        if (!bad.empty())
            throw std::logic_error("reversed-form line failed validation after mapping: " +
                                   bad.front().detail);
        consider(std::move(r));
    }
    return std::move(*best);
}

}  // namespace alwibp
