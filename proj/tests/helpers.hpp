#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "alwibp/instance.hpp"
#include "alwibp/random.hpp"

namespace testutil {

using namespace alwibp;

// three tasks, 300/400/600, both short tasks before the long one, cycle 1000
inline Instance t1() {
    return Instance::create("t1", {300, 400, 600}, {{0, 2}, {1, 2}}, {}, 1000);
}

// t1 plus one worker: slower on tasks 1 and 2, cannot do task 3
inline Instance t1_worker() {
    WorkerProfile w;
    w.id = 1;
    w.times = {500, 1000, -1};
    return Instance::create("t1w", t1().times(), t1().arcs(), {w}, 1000);
}

// Three tasks where two longer ones feed a short final task, cycle 1000.
inline Instance trio() {
    return Instance::create("trio", {400, 500, 300}, {{0, 2}, {1, 2}}, {}, 1000);
}

// trio plus one worker who needs twice the time on every task, all of it
// still within the cycle
inline Instance trio_worker() {
    WorkerProfile w;
    w.id = 1;
    w.times = {800, 1000, 600};
    return Instance::create("triow", trio().times(), trio().arcs(), {w}, 1000);
}

// Random solvable instance: every unmarked worker time is capped at the
// cycle, so each worker has only feasible-or-marked entries and at least one
// usable task.
inline Instance random_instance(Rng& rng, int n, int workers, long long cycle = 600) {
    std::vector<long long> t;
    for (int i = 0; i < n; ++i) t.push_back(uniform_int(rng, 50, std::min<long long>(500, cycle)));
    std::vector<std::pair<int, int>> arcs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (bernoulli(rng, 0.3)) arcs.emplace_back(i, j);
    std::vector<WorkerProfile> ws;
    for (int k = 0; k < workers; ++k) {
        WorkerProfile w;
        w.id = k + 1;
        bool any = false;
        for (int i = 0; i < n; ++i) {
            if (bernoulli(rng, 0.2)) {
                w.times.push_back(-1);
            } else {
                w.times.push_back(uniform_int(rng, t[i], std::min(cycle, t[i] * 3)));
                any = true;
            }
        }
        if (!any) w.times[0] = t[0];
        ws.push_back(std::move(w));
    }
    return Instance::create("rnd", std::move(t), std::move(arcs), std::move(ws), cycle);
}

inline Instance random_sized(Rng& rng, int max_n, int max_w, long long cycle = 600) {
    const int n = 1 + static_cast<int>(uniform_int(rng, 0, max_n - 1));
    const int w = static_cast<int>(uniform_int(rng, 0, std::min(n, max_w)));
    return random_instance(rng, n, w, cycle);
}

inline std::filesystem::path data_dir() { return ALWIBP_TEST_DATA; }

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace testutil
