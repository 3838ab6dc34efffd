#pragma once

#include <bit>
#include <chrono>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "alwibp/solution.hpp"

namespace alwibp {

struct SearchLimits {
    std::uint64_t max_nodes = 10'000'000;
    double max_seconds = 60.0;
};

struct OracleResult {
    bool feasible = false;
    bool proven = false;
    int stations = -1;
    long long worker_idle = -1;  // total idle over worker stations; set by the smin search
    std::optional<LineSolution> solution;
    std::uint64_t nodes = 0;
};

namespace detail {

// Depth-first station-by-station enumeration. Stations are generated as
// precedence-closed task subsets in topological-position order, so each
// subset appears exactly once. Plain SALBP stations are restricted to
// maximal loads (the classical dominance rule); while workers are still
// unplaced every nonempty subset is considered, because forcing maximal
// loads can starve a later worker station of its last compatible task.
class ExactSearch {
public:
    ExactSearch(const Instance& inst, SearchLimits lim) : inst_(inst), lim_(lim) {
        n_ = inst.task_count();
        if (n_ > 62) throw std::invalid_argument("exact search supports at most 62 tasks");
        full_ = (n_ == 62) ? ~0ull >> 2 : (1ull << n_) - 1;
        pred_mask_.assign(n_, 0);
        for (auto [i, j] : inst.arcs()) pred_mask_[j] |= 1ull << i;
        topo_ = topo_order();
        min_exec_.assign(n_, 0);
        for (int i = 0; i < n_; ++i) {
            long long m = inst.time(i);
            for (const WorkerProfile& wp : inst.workers())
                if (!wp.incompatible(i) && wp.time(i) < m) m = wp.time(i);
            min_exec_[i] = m;
        }
        deadline_ = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(lim.max_seconds));
    }

    OracleResult salbp1() {
        best_m_ = std::numeric_limits<int>::max();
        memo_.clear();
        cur_.clear();
        salbp_dfs(0ull, 0);
        return finish(-1);
    }

    OracleResult alwibp1() {
        if (n_ > 48) throw std::invalid_argument("worker-aware exact search supports at most 48 tasks");
        best_m_ = std::numeric_limits<int>::max();
        wmemo_.clear();
        cur_.clear();
        wfull_ = (1u << inst_.worker_count()) - 1;
        worker_order_ = inst_.workers_by_id();
        alwibp_dfs(0ull, 0u, 0);
        return finish(-1);
    }

    // lexicographic (station count, total worker-station idle)
    OracleResult smin() {
        OracleResult first = alwibp1();
        if (!first.feasible || !first.proven) {
            if (first.solution) first.worker_idle = total_worker_idle(*first.solution);
            return first;
        }
        budget_ = first.stations;
        best_idle_ = std::numeric_limits<long long>::max();
        imemo_.clear();
        cur_.clear();
        best_sol_.reset();
        smin_dfs(0ull, 0u, 0, 0);
        OracleResult res = finish(best_idle_);
        res.stations = budget_;
        res.feasible = true;  // phase one already produced a solution
        if (!res.solution) res.solution = first.solution;
        if (res.worker_idle < 0 && res.solution) res.worker_idle = total_worker_idle(*res.solution);
        return res;
    }

    std::uint64_t nodes() const { return nodes_; }

    long long total_worker_idle(const LineSolution& sol) const {
        long long idle = 0;
        for (const Station& st : sol.stations)
            if (st.worker >= 0) idle += inst_.cycle_time() - station_load(inst_, st);
        return idle;
    }

private:
    bool tick() {
        if (stopped_) return false;
        if (++nodes_ >= lim_.max_nodes) stopped_ = true;
        if ((nodes_ & 0xfff) == 0 && std::chrono::steady_clock::now() > deadline_) stopped_ = true;
        return !stopped_;
    }

    std::vector<int> topo_order() const {
        std::vector<int> indeg(n_, 0), order;
        for (auto [i, j] : inst_.arcs()) ++indeg[j];
        std::vector<char> done(n_, 0);
        for (int step = 0; step < n_; ++step) {
            for (int i = 0; i < n_; ++i) {
                if (done[i] || indeg[i] != 0) continue;
                done[i] = 1;
                order.push_back(i);
                for (int j : inst_.successors(i)) --indeg[j];
                break;
            }
        }
        return order;
    }

    long long remaining(std::uint64_t mask, const std::vector<long long>& exec) const {
        long long sum = 0;
        for (int i = 0; i < n_; ++i)
            if (!(mask >> i & 1)) sum += exec[i];
        return sum;
    }

    // ---- station subset enumeration ----------------------------------------

    // Calls fn(subset, load) for every nonempty precedence-closed subset of
    // unassigned tasks that fits; when maximal_only, only subsets to which no
    // further unassigned task can be added. Worker stations (wp != nullptr)
    // use worker times, skip incompatible tasks, and respect both capacities.
    template <class Fn>
    void stations_from(std::uint64_t mask, const WorkerProfile* wp, bool maximal_only, Fn&& fn) {
        grow(mask, 0ull, 0, 0, 0, wp, maximal_only, fn);
    }

    template <class Fn>
    void grow(std::uint64_t mask, std::uint64_t cur, long long load, long long cload, int pos,
              const WorkerProfile* wp, bool maximal_only, Fn& fn) {
        if (stopped_) return;
        if ((++grow_steps_ & 0x3fff) == 0 && std::chrono::steady_clock::now() > deadline_)
            stopped_ = true;
        for (int idx = pos; idx < n_; ++idx) {
            int i = topo_[idx];
            std::uint64_t bit = 1ull << i;
            if ((mask | cur) & bit) continue;
            if ((pred_mask_[i] & ~(mask | cur)) != 0) continue;
            if (wp && wp->incompatible(i)) continue;
            long long ti = wp ? wp->time(i) : inst_.time(i);
            if (load + ti > inst_.cycle_time()) continue;
            if (wp && cload + inst_.time(i) > inst_.cycle_time()) continue;
            grow(mask, cur | bit, load + ti, cload + inst_.time(i), idx + 1, wp, maximal_only, fn);
            if (stopped_) return;
        }
        if (cur == 0) return;
        if (maximal_only) {
            for (int i = 0; i < n_; ++i) {
                std::uint64_t bit = 1ull << i;
                if ((mask | cur) & bit) continue;
                if ((pred_mask_[i] & ~(mask | cur)) != 0) continue;
                if (wp && wp->incompatible(i)) continue;
                long long ti = wp ? wp->time(i) : inst_.time(i);
                if (load + ti > inst_.cycle_time()) continue;
                if (wp && cload + inst_.time(i) > inst_.cycle_time()) continue;
                return;  // extendable, not maximal
            }
        }
        fn(cur, load);
    }

    // ---- plain SALBP-1 ------------------------------------------------------

    void salbp_dfs(std::uint64_t mask, int used) {
        if (!tick()) return;
        if (mask == full_) {
            if (used < best_m_) {
                best_m_ = used;
                record();
            }
            return;
        }
        long long rem = remaining(mask, inst_.times());
        int bound = used + static_cast<int>((rem + inst_.cycle_time() - 1) / inst_.cycle_time());
        if (bound >= best_m_) return;
        auto it = memo_.find(mask);
        if (it != memo_.end() && it->second <= used) return;
        memo_[mask] = used;
        stations_from(mask, nullptr, true, [&](std::uint64_t sub, long long) {
            push_station(sub, -1);
            salbp_dfs(mask | sub, used + 1);
            cur_.pop_back();
        });
    }

    // ---- ALWIBP-1 -----------------------------------------------------------

    void alwibp_dfs(std::uint64_t mask, unsigned wmask, int used) {
        if (!tick()) return;
        if (mask == full_) {
            if (wmask == wfull_ && used < best_m_) {
                best_m_ = used;
                record();
            }
            return;
        }
        int unplaced = std::popcount(wfull_ & ~wmask);
        long long rem = remaining(mask, unplaced ? min_exec_ : inst_.times());
        int need = static_cast<int>((rem + inst_.cycle_time() - 1) / inst_.cycle_time());
        if (need < unplaced) need = unplaced;
        if (used + need >= best_m_) return;
        // exact packing: task mask in bits 0..47, worker mask above (n <= 48)
        std::uint64_t key = mask | (static_cast<std::uint64_t>(wmask) << 48);
        auto it = wmemo_.find(key);
        if (it != wmemo_.end() && it->second <= used) return;
        wmemo_[key] = used;

        if (wmask == wfull_) {
            stations_from(mask, nullptr, true, [&](std::uint64_t sub, long long) {
                push_station(sub, -1);
                alwibp_dfs(mask | sub, wmask, used + 1);
                cur_.pop_back();
            });
            return;
        }
        stations_from(mask, nullptr, false, [&](std::uint64_t sub, long long) {
            push_station(sub, -1);
            alwibp_dfs(mask | sub, wmask, used + 1);
            cur_.pop_back();
        });
        for (int w : worker_order_) {
            if (wmask >> w & 1) continue;
            if (stopped_) return;
            stations_from(mask, &inst_.worker(w), false, [&](std::uint64_t sub, long long) {
                push_station(sub, w);
                alwibp_dfs(mask | sub, wmask | (1u << w), used + 1);
                cur_.pop_back();
            });
        }
    }

    // ---- smin second phase --------------------------------------------------

    void smin_dfs(std::uint64_t mask, unsigned wmask, int used, long long idle) {
        if (!tick()) return;
        if (idle >= best_idle_) return;
        if (mask == full_) {
            if (wmask == wfull_) {
                best_idle_ = idle;
                record();
            }
            return;
        }
        int unplaced = std::popcount(wfull_ & ~wmask);
        long long rem = remaining(mask, unplaced ? min_exec_ : inst_.times());
        int need = static_cast<int>((rem + inst_.cycle_time() - 1) / inst_.cycle_time());
        if (need < unplaced) need = unplaced;
        if (used + need > budget_) return;
        std::uint64_t key = mask | (static_cast<std::uint64_t>(wmask) << 48) |
                            (static_cast<std::uint64_t>(used) << 52);
        auto it = imemo_.find(key);
        if (it != imemo_.end() && it->second <= idle) return;
        imemo_[key] = idle;

        bool placed_all = wmask == wfull_;
        stations_from(mask, nullptr, placed_all, [&](std::uint64_t sub, long long) {
            push_station(sub, -1);
            smin_dfs(mask | sub, wmask, used + 1, idle);
            cur_.pop_back();
        });
        if (placed_all) return;
        for (int w : worker_order_) {
            if (wmask >> w & 1) continue;
            if (stopped_) return;
            stations_from(mask, &inst_.worker(w), false, [&](std::uint64_t sub, long long load) {
                push_station(sub, w);
                smin_dfs(mask | sub, wmask | (1u << w), used + 1,
                         idle + inst_.cycle_time() - load);
                cur_.pop_back();
            });
        }
    }

    // ---- bookkeeping --------------------------------------------------------

    void push_station(std::uint64_t sub, int worker) {
        Station st;
        st.worker = worker;
        for (int i = 0; i < n_; ++i)
            if (sub >> i & 1) st.tasks.push_back(i);
        cur_.push_back(std::move(st));
    }

    void record() {
        LineSolution sol;
        sol.stations = cur_;
        best_sol_ = std::move(sol);
    }

    OracleResult finish(long long idle) {
        OracleResult res;
        res.nodes = nodes_;
        res.proven = !stopped_;
        if (best_sol_) {
            res.feasible = true;
            res.stations = best_sol_->station_count();
            res.solution = best_sol_;
            res.worker_idle = idle >= 0 && idle != std::numeric_limits<long long>::max()
                                  ? idle
                                  : total_worker_idle(*best_sol_);
        }
        return res;
    }

    const Instance& inst_;
    SearchLimits lim_;
    int n_ = 0;
    std::uint64_t full_ = 0;
    unsigned wfull_ = 0;
    std::vector<std::uint64_t> pred_mask_;
    std::vector<int> topo_;
    std::vector<long long> min_exec_;
    std::vector<int> worker_order_;
    std::chrono::steady_clock::time_point deadline_;
    std::uint64_t nodes_ = 0;
    std::uint64_t grow_steps_ = 0;
    bool stopped_ = false;

    int best_m_ = 0;
    int budget_ = 0;
    long long best_idle_ = 0;
    std::vector<Station> cur_;
    std::optional<LineSolution> best_sol_;
    std::unordered_map<std::uint64_t, int> memo_;
    std::unordered_map<std::uint64_t, int> wmemo_;
    std::unordered_map<std::uint64_t, long long> imemo_;
};

}  // namespace detail

// Optimal station count for the instance ignoring its workers.
inline OracleResult exact_salbp1(const Instance& inst, SearchLimits lim = {}) {
    detail::ExactSearch search(inst, lim);
    return search.salbp1();
}

// Optimal station count with every worker employed at its own station.
inline OracleResult exact_alwibp1(const Instance& inst, SearchLimits lim = {}) {
    if (inst.worker_count() == 0) return exact_salbp1(inst, lim);
    detail::ExactSearch search(inst, lim);
    return search.alwibp1();
}

// Lexicographic optimum: minimal station count, then minimal total idle time
// over the worker stations.
inline OracleResult exact_smin(const Instance& inst, SearchLimits lim = {}) {
    if (inst.worker_count() == 0) {
        OracleResult res = exact_salbp1(inst, lim);
        res.worker_idle = 0;
        return res;
    }
    detail::ExactSearch search(inst, lim);
    return search.smin();
}

}  // namespace alwibp
