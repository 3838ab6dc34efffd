#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "alwibp/instance.hpp"

namespace alwibp {

// One station of the line. worker is an index into Instance::workers(), -1
// when the station has no disabled worker. Task order inside a station is the
// build order; it carries no scheduling meaning.
struct Station {
    std::vector<int> tasks;
    int worker = -1;
};

struct LineSolution {
    std::vector<Station> stations;
    // Stations frozen at the front/back while the constructive heuristic is
    // mid-run; both are zero on finished solutions.
    int fixed_prefix = 0;
    int fixed_suffix = 0;

    int station_count() const { return static_cast<int>(stations.size()); }
};

// Load of a station under the times that actually apply there: the hosted
// worker's times at a worker station, conventional times elsewhere.
inline long long station_load(const Instance& inst, const Station& st) {
    long long load = 0;
    if (st.worker >= 0) {
        const WorkerProfile& wp = inst.worker(st.worker);
        for (int i : st.tasks) load += wp.incompatible(i) ? 0 : wp.time(i);
    } else {
        for (int i : st.tasks) load += inst.time(i);
    }
    return load;
}

inline long long conventional_load(const Instance& inst, const Station& st) {
    long long load = 0;
    for (int i : st.tasks) load += inst.time(i);
    return load;
}

inline long long station_idle(const Instance& inst, const Station& st) {
    return inst.cycle_time() - station_load(inst, st);
}

// station index (0-based) per task, -1 if unassigned
inline std::vector<int> station_of_task(const Instance& inst, const LineSolution& sol) {
    std::vector<int> where(static_cast<std::size_t>(inst.task_count()), -1);
    for (int s = 0; s < sol.station_count(); ++s)
        for (int i : sol.stations[s].tasks)
            if (i >= 0 && i < inst.task_count() && where[i] < 0) where[i] = s;
    return where;
}

inline int station_of_worker(const LineSolution& sol, int worker) {
    for (int s = 0; s < sol.station_count(); ++s)
        if (sol.stations[s].worker == worker) return s;
    return -1;
}

struct Violation {
    std::string rule;
    std::string detail;
};

// Semantic validator. Accepts exactly the assignments the assignment model
// accepts: every task on one station (c2), every worker on one station with
// at least one task (c3, cemploy), precedence order (c5), conventional
// capacity everywhere (c6), worker-time capacity at worker stations (c7),
// no incompatible task at a worker's station (c8).
inline std::vector<Violation> validate(const Instance& inst, const LineSolution& sol) {
    std::vector<Violation> out;
    const int n = inst.task_count();

    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    std::vector<int> wseen(static_cast<std::size_t>(inst.worker_count()), 0);
    for (int s = 0; s < sol.station_count(); ++s) {
        const Station& st = sol.stations[s];
        for (int i : st.tasks) {
            if (i < 0 || i >= n) {
                out.push_back({"c2", "station " + std::to_string(s + 1) + " references unknown task"});
                continue;
            }
            ++seen[i];
        }
        if (st.worker != -1) {
            if (st.worker < 0 || st.worker >= inst.worker_count()) {
                out.push_back({"c3", "station " + std::to_string(s + 1) + " references unknown worker"});
                continue;
            }
            ++wseen[st.worker];
            if (st.tasks.empty())
                out.push_back({"cemploy", "worker " + std::to_string(inst.worker(st.worker).id) +
                                              " is at empty station " + std::to_string(s + 1)});
            const WorkerProfile& wp = inst.worker(st.worker);
            for (int i : st.tasks)
                if (i >= 0 && i < n && wp.incompatible(i))
                    out.push_back({"c8", "task " + std::to_string(i + 1) + " is infeasible for worker " +
                                             std::to_string(wp.id) + " at station " + std::to_string(s + 1)});
        }
    }
    for (int i = 0; i < n; ++i) {
        if (seen[i] == 0)
            out.push_back({"c2", "task " + std::to_string(i + 1) + " is unassigned"});
        else if (seen[i] > 1)
            out.push_back({"c2", "task " + std::to_string(i + 1) + " assigned " +
                                     std::to_string(seen[i]) + " times"});
    }
    for (int w = 0; w < inst.worker_count(); ++w) {
        if (wseen[w] == 0)
            out.push_back({"c3", "worker " + std::to_string(inst.worker(w).id) + " is unassigned"});
        else if (wseen[w] > 1)
            out.push_back({"c3", "worker " + std::to_string(inst.worker(w).id) + " assigned " +
                                     std::to_string(wseen[w]) + " times"});
    }

    std::vector<int> where = station_of_task(inst, sol);
    for (auto [i, j] : inst.arcs()) {
        if (where[i] < 0 || where[j] < 0) continue;
        if (where[i] > where[j])
            out.push_back({"c5", "task " + std::to_string(i + 1) + " (station " +
                                     std::to_string(where[i] + 1) + ") must precede task " +
                                     std::to_string(j + 1) + " (station " +
                                     std::to_string(where[j] + 1) + ")"});
    }

    for (int s = 0; s < sol.station_count(); ++s) {
        const Station& st = sol.stations[s];
        long long conv = conventional_load(inst, st);
        if (conv > inst.cycle_time())
            out.push_back({"c6", "station " + std::to_string(s + 1) + " load " + std::to_string(conv) +
                                     " exceeds cycle time " + std::to_string(inst.cycle_time())});
        if (st.worker >= 0 && st.worker < inst.worker_count()) {
            long long wload = station_load(inst, st);
            if (wload > inst.cycle_time())
                out.push_back({"c7", "station " + std::to_string(s + 1) + " worker load " +
                                         std::to_string(wload) + " exceeds cycle time " +
                                         std::to_string(inst.cycle_time())});
        }
    }
    return out;
}

inline bool is_feasible(const Instance& inst, const LineSolution& sol) {
    return validate(inst, sol).empty();
}

// One line per station:
//   STATION <s> [WORKER <id>] TASKS <i1> <i2> ...
// with stations 1..m in order and all ids 1-based. Tasks are written sorted.
inline void save_solution(const Instance& inst, const LineSolution& sol, std::ostream& out) {
    for (int s = 0; s < sol.station_count(); ++s) {
        const Station& st = sol.stations[s];
        out << "STATION " << s + 1;
        if (st.worker >= 0) out << " WORKER " << inst.worker(st.worker).id;
        out << " TASKS";
        std::vector<int> ts = st.tasks;
        std::sort(ts.begin(), ts.end());
        for (int i : ts) out << " " << i + 1;
        out << "\n";
    }
}

inline void save_solution(const Instance& inst, const LineSolution& sol,
                          const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    save_solution(inst, sol, out);
}

inline LineSolution parse_solution(const Instance& inst, std::istream& in, const std::string& origin) {
    detail::LineSource src(in, origin);
    std::vector<std::optional<Station>> stations;
    std::string line;
    while (src.next(line)) {
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word != "STATION") src.fail("expected STATION line");
        long long s = detail::parse_ll(src, ls, "station index");
        if (s < 1) src.fail("station index must be positive");
        Station st;
        ls >> word;
        if (word == "WORKER") {
            long long wid = detail::parse_ll(src, ls, "worker id");
            int widx = -1;
            for (int w = 0; w < inst.worker_count(); ++w)
                if (inst.worker(w).id == wid) widx = w;
            if (widx < 0) src.fail("unknown worker id " + std::to_string(wid));
            st.worker = widx;
            ls >> word;
        }
        if (word != "TASKS") src.fail("expected TASKS");
        long long id;
        while (ls >> id) {
            if (id < 1 || id > inst.task_count())
                src.fail("unknown task id " + std::to_string(id));
            st.tasks.push_back(static_cast<int>(id - 1));
        }
        if (stations.size() < static_cast<std::size_t>(s)) stations.resize(static_cast<std::size_t>(s));
        if (stations[s - 1].has_value()) src.fail("station " + std::to_string(s) + " listed twice");
        stations[s - 1] = std::move(st);
    }
    LineSolution sol;
    for (std::size_t s = 0; s < stations.size(); ++s) {
        if (!stations[s].has_value())
            throw ParseError(origin + ": station " + std::to_string(s + 1) + " missing");
        sol.stations.push_back(std::move(*stations[s]));
    }
    return sol;
}

inline LineSolution load_solution(const Instance& inst, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse_solution(inst, in, path.filename().string());
}

}  // namespace alwibp
