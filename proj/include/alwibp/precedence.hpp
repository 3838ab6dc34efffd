#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "alwibp/instance.hpp"

namespace alwibp {

// Transitive closure of the precedence graph plus the artificial sink task q.
// q is identified by index task_count (0-based) and is a successor of exactly
// the tasks without followers; it never appears in instances or solutions.
class PrecedenceClosure {
public:
    static PrecedenceClosure build(const Instance& inst) {
        PrecedenceClosure pc;
        const int n = inst.task_count();
        pc.n_ = n;
        pc.words_ = (n + 63) / 64;
        pc.bits_.assign(static_cast<std::size_t>(n) * pc.words_, 0);

        // reverse topological order: successors before predecessors
        std::vector<int> outdeg(n, 0);
        for (int i = 0; i < n; ++i) outdeg[i] = static_cast<int>(inst.successors(i).size());
        std::vector<int> stack;
        for (int i = 0; i < n; ++i)
            if (outdeg[i] == 0) stack.push_back(i);
        std::vector<int> order;
        order.reserve(n);
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (int p : inst.predecessors(v))
                if (--outdeg[p] == 0) stack.push_back(p);
        }

        for (int v : order) {
            std::uint64_t* row = pc.row(v);
            for (int s : inst.successors(v)) {
                row[s >> 6] |= 1ull << (s & 63);
                const std::uint64_t* srow = pc.row(s);
                for (int wordidx = 0; wordidx < pc.words_; ++wordidx) row[wordidx] |= srow[wordidx];
            }
        }

        pc.succ_count_.assign(n, 0);
        for (int i = 0; i < n; ++i) {
            int c = 0;
            const std::uint64_t* row = pc.row(i);
            for (int wordidx = 0; wordidx < pc.words_; ++wordidx)
                c += std::popcount(row[wordidx]);
            pc.succ_count_[i] = c;
            if (inst.successors(i).empty()) pc.sink_preds_.push_back(i);
        }
        return pc;
    }

    int task_count() const { return n_; }
    int sink_task() const { return n_; }

    // true when i precedes j through at least one arc chain
    bool reaches(int i, int j) const {
        return (row(i)[j >> 6] >> (j & 63)) & 1ull;
    }

    int successor_count(int i) const { return succ_count_[static_cast<std::size_t>(i)]; }

    // tasks with no followers; exactly these feed the sink q
    const std::vector<int>& sink_predecessors() const { return sink_preds_; }

    const std::uint64_t* row(int i) const { return bits_.data() + static_cast<std::size_t>(i) * words_; }

private:
    std::uint64_t* row(int i) { return bits_.data() + static_cast<std::size_t>(i) * words_; }

    int n_ = 0;
    int words_ = 0;
    std::vector<std::uint64_t> bits_;
    std::vector<int> succ_count_;
    std::vector<int> sink_preds_;
};

// Positional weight of a task: its own time plus the times of all transitive
// followers. With a worker profile, worker times replace conventional ones and
// only the worker's feasible tasks contribute; entries for tasks the worker
// cannot execute are -1.
inline std::vector<long long> positional_weights(const Instance& inst,
                                                 const PrecedenceClosure& pc,
                                                 const WorkerProfile* worker = nullptr) {
    const int n = inst.task_count();
    std::vector<long long> pw(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        if (worker && worker->incompatible(i)) {
            pw[i] = -1;
            continue;
        }
        long long sum = worker ? worker->time(i) : inst.time(i);
        for (int j = 0; j < n; ++j) {
            if (!pc.reaches(i, j)) continue;
            if (worker) {
                if (!worker->incompatible(j)) sum += worker->time(j);
            } else {
                sum += inst.time(j);
            }
        }
        pw[i] = sum;
    }
    return pw;
}

}  // namespace alwibp
