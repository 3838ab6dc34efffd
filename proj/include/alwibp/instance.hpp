#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alwibp {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Task execution profile of one disabled worker. times[i] < 0 marks task i as
// infeasible for the worker (written as -1 in files); otherwise times[i] is the
// worker-specific execution time.
struct WorkerProfile {
    long long id = 0;
    std::vector<long long> times;

    bool incompatible(int task) const { return times[static_cast<std::size_t>(task)] < 0; }
    long long time(int task) const { return times[static_cast<std::size_t>(task)]; }
};

// Immutable problem instance. Tasks are 0-based internally; file formats use
// 1-based ids. Precedence arcs (i,j) mean i must be finished no later than the
// station of j.
class Instance {
public:
    Instance() = default;

    static Instance create(std::string name,
                           std::vector<long long> task_times,
                           std::vector<std::pair<int, int>> arcs,
                           std::vector<WorkerProfile> workers,
                           long long cycle_time) {
        Instance inst;
        inst.name_ = std::move(name);
        inst.times_ = std::move(task_times);
        inst.arcs_ = std::move(arcs);
        inst.workers_ = std::move(workers);
        inst.cycle_ = cycle_time;
        std::sort(inst.arcs_.begin(), inst.arcs_.end());
        inst.arcs_.erase(std::unique(inst.arcs_.begin(), inst.arcs_.end()), inst.arcs_.end());
        inst.validate();
        inst.build_adjacency();
        return inst;
    }

    const std::string& name() const { return name_; }
    int task_count() const { return static_cast<int>(times_.size()); }
    long long time(int task) const { return times_[static_cast<std::size_t>(task)]; }
    const std::vector<long long>& times() const { return times_; }
    long long cycle_time() const { return cycle_; }
    const std::vector<std::pair<int, int>>& arcs() const { return arcs_; }
    const std::vector<int>& successors(int task) const { return succ_[static_cast<std::size_t>(task)]; }
    const std::vector<int>& predecessors(int task) const { return pred_[static_cast<std::size_t>(task)]; }
    int worker_count() const { return static_cast<int>(workers_.size()); }
    const WorkerProfile& worker(int w) const { return workers_[static_cast<std::size_t>(w)]; }
    const std::vector<WorkerProfile>& workers() const { return workers_; }

    long long total_time() const {
        long long s = 0;
        for (long long t : times_) s += t;
        return s;
    }

    // Worker indices ordered by ascending worker id; used wherever ties are
    // broken by "lowest worker id".
    std::vector<int> workers_by_id() const {
        std::vector<int> order(workers_.size());
        for (std::size_t w = 0; w < workers_.size(); ++w) order[w] = static_cast<int>(w);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return workers_[a].id < workers_[b].id; });
        return order;
    }

    // Tasks ordered so every arc tail comes before its head; lowest index
    // first among the currently unconstrained tasks.
    std::vector<int> topological_order() const {
        const int n = task_count();
        std::vector<int> indeg(static_cast<std::size_t>(n), 0);
        for (auto [i, j] : arcs_) ++indeg[static_cast<std::size_t>(j)];
        std::vector<int> order;
        order.reserve(static_cast<std::size_t>(n));
        std::set<int> ready;
        for (int i = 0; i < n; ++i)
            if (indeg[static_cast<std::size_t>(i)] == 0) ready.insert(i);
        while (!ready.empty()) {
            const int v = *ready.begin();
            ready.erase(ready.begin());
            order.push_back(v);
            for (int u : succ_[static_cast<std::size_t>(v)])
                if (--indeg[static_cast<std::size_t>(u)] == 0) ready.insert(u);
        }
        return order;
    }

    // Same tasks and workers, every precedence arc flipped.
    Instance reversed() const {
        std::vector<std::pair<int, int>> rev;
        rev.reserve(arcs_.size());
        for (auto [i, j] : arcs_) rev.emplace_back(j, i);
        return create(name_, times_, std::move(rev), workers_, cycle_);
    }

private:
    void validate() const {
        const int n = task_count();
        if (n < 1) throw ValidationError("instance has no tasks");
        if (cycle_ < 1) throw ValidationError("cycle time must be positive");
        for (int i = 0; i < n; ++i) {
            if (times_[i] < 0)
                throw ValidationError("task " + std::to_string(i + 1) + " has negative time");
            if (times_[i] > cycle_)
                throw ValidationError("task " + std::to_string(i + 1) + " time " +
                                      std::to_string(times_[i]) + " exceeds cycle time " +
                                      std::to_string(cycle_));
        }
        for (auto [i, j] : arcs_) {
            if (i < 0 || i >= n || j < 0 || j >= n)
                throw ValidationError("precedence arc references unknown task");
        }
        check_acyclic();
        if (static_cast<int>(workers_.size()) > n)
            throw ValidationError("more workers than tasks");
        for (std::size_t w = 0; w < workers_.size(); ++w) {
            const WorkerProfile& wp = workers_[w];
            if (static_cast<int>(wp.times.size()) != n)
                throw ValidationError("worker " + std::to_string(wp.id) +
                                      " has wrong number of task times");
            bool feasible = false;
            for (int i = 0; i < n; ++i) {
                long long t = wp.times[i];
                if (t < -1)
                    throw ValidationError("worker " + std::to_string(wp.id) + " task " +
                                          std::to_string(i + 1) + " time is invalid");
                if (t >= 0 && t <= cycle_) feasible = true;
            }
            if (!feasible)
                throw ValidationError("worker " + std::to_string(wp.id) +
                                      " has no feasible task within the cycle time");
            for (std::size_t v = 0; v < w; ++v)
                if (workers_[v].id == wp.id)
                    throw ValidationError("duplicate worker id " + std::to_string(wp.id));
        }
    }

    void check_acyclic() const {
        const int n = task_count();
        std::vector<int> indeg(n, 0);
        std::vector<std::vector<int>> adj(n);
        for (auto [i, j] : arcs_) {
            adj[i].push_back(j);
            ++indeg[j];
        }
        std::vector<int> queue;
        queue.reserve(n);
        for (int i = 0; i < n; ++i)
            if (indeg[i] == 0) queue.push_back(i);
        int seen = 0;
        while (!queue.empty()) {
            int v = queue.back();
            queue.pop_back();
            ++seen;
            for (int u : adj[v])
                if (--indeg[u] == 0) queue.push_back(u);
        }
        if (seen != n) throw ValidationError("cycle detected in precedence graph");
    }

    void build_adjacency() {
        const int n = task_count();
        succ_.assign(n, {});
        pred_.assign(n, {});
        for (auto [i, j] : arcs_) {
            succ_[i].push_back(j);
            pred_[j].push_back(i);
        }
    }

    std::string name_;
    std::vector<long long> times_;
    std::vector<std::pair<int, int>> arcs_;
    std::vector<WorkerProfile> workers_;
    long long cycle_ = 0;
    std::vector<std::vector<int>> succ_;
    std::vector<std::vector<int>> pred_;
};

// Deactivation constant for worker capacity rows: the summed absolute gap
// between worker and conventional times over the worker's feasible tasks.
// Zero exactly when the worker matches the conventional times everywhere.
inline long long big_m(const Instance& inst, int w) {
    const WorkerProfile& wp = inst.worker(w);
    long long m = 0;
    for (int i = 0; i < inst.task_count(); ++i) {
        if (wp.incompatible(i)) continue;
        long long d = wp.time(i) - inst.time(i);
        m += d < 0 ? -d : d;
    }
    return m;
}

namespace detail {

// Line reader that strips '#' comments and blank lines, tracking line numbers
// for error messages.
class LineSource {
public:
    LineSource(std::istream& in, std::string origin) : in_(in), origin_(std::move(origin)) {}

    bool next(std::string& out) {
        std::string raw;
        while (std::getline(in_, raw)) {
            ++line_;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            bool blank = true;
            for (char c : raw)
                if (!std::isspace(static_cast<unsigned char>(c))) {
                    blank = false;
                    break;
                }
            if (blank) continue;
            out = raw;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(origin_ + ":" + std::to_string(line_) + ": " + what);
    }

    std::string require(const std::string& what) {
        std::string s;
        if (!next(s)) fail("unexpected end of file, expected " + what);
        return s;
    }

private:
    std::istream& in_;
    std::string origin_;
    int line_ = 0;
};

inline long long parse_ll(LineSource& src, std::istringstream& in, const std::string& what) {
    long long v;
    if (!(in >> v)) src.fail("expected " + what);
    return v;
}

}  // namespace detail

// Text format, sections in fixed order, '#' starts a comment:
//   TASKS <n>
//   <task id> <time>            (n lines, ids 1..n in any order)
//   PRECEDENCE <k>
//   <i> <j>                     (k lines, arc i -> j)
//   CYCLE <c>
//   WORKERS <w>
//   <worker id> <t_1> ... <t_n> (-1 marks an infeasible task)
inline Instance parse_instance(std::istream& in, const std::string& origin) {
    detail::LineSource src(in, origin);

    auto expect_header = [&](const std::string& key) {
        std::string line = src.require(key + " header");
        std::istringstream ls(line);
        std::string word;
        ls >> word;
        if (word != key) src.fail("expected '" + key + "', got '" + word + "'");
        long long v = detail::parse_ll(src, ls, "count after " + key);
        return v;
    };

    long long n = expect_header("TASKS");
    if (n < 1) src.fail("task count must be positive");
    std::vector<long long> times(static_cast<std::size_t>(n), -1);
    for (long long k = 0; k < n; ++k) {
        std::string line = src.require("task line");
        std::istringstream ls(line);
        long long id = detail::parse_ll(src, ls, "task id");
        long long t = detail::parse_ll(src, ls, "task time");
        if (id < 1 || id > n) src.fail("task id " + std::to_string(id) + " out of range");
        if (times[id - 1] >= 0) src.fail("duplicate task id " + std::to_string(id));
        times[id - 1] = t;
    }

    long long arc_count = expect_header("PRECEDENCE");
    std::vector<std::pair<int, int>> arcs;
    arcs.reserve(static_cast<std::size_t>(arc_count));
    for (long long k = 0; k < arc_count; ++k) {
        std::string line = src.require("precedence arc");
        std::istringstream ls(line);
        long long i = detail::parse_ll(src, ls, "arc tail");
        long long j = detail::parse_ll(src, ls, "arc head");
        if (i < 1 || i > n || j < 1 || j > n) src.fail("arc references unknown task");
        arcs.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
    }

    long long cycle = expect_header("CYCLE");
    long long worker_count = expect_header("WORKERS");
    std::vector<WorkerProfile> workers;
    workers.reserve(static_cast<std::size_t>(worker_count));
    for (long long k = 0; k < worker_count; ++k) {
        std::string line = src.require("worker line");
        std::istringstream ls(line);
        WorkerProfile wp;
        wp.id = detail::parse_ll(src, ls, "worker id");
        wp.times.resize(static_cast<std::size_t>(n));
        for (long long i = 0; i < n; ++i)
            wp.times[i] = detail::parse_ll(src, ls, "worker time for task " + std::to_string(i + 1));
        workers.push_back(std::move(wp));
    }

    std::string extra;
    if (src.next(extra)) src.fail("trailing content after the worker section");

    try {
        return Instance::create(origin, std::move(times), std::move(arcs), std::move(workers), cycle);
    } catch (const ValidationError& e) {
        throw ValidationError(origin + ": " + e.what());
    }
}

inline Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    Instance inst = parse_instance(in, path.stem().string());
    return inst;
}

inline void save_instance(const Instance& inst, std::ostream& out) {
    out << "TASKS " << inst.task_count() << "\n";
    for (int i = 0; i < inst.task_count(); ++i) out << i + 1 << " " << inst.time(i) << "\n";
    out << "PRECEDENCE " << inst.arcs().size() << "\n";
    for (auto [i, j] : inst.arcs()) out << i + 1 << " " << j + 1 << "\n";
    out << "CYCLE " << inst.cycle_time() << "\n";
    out << "WORKERS " << inst.worker_count() << "\n";
    for (const WorkerProfile& wp : inst.workers()) {
        out << wp.id;
        for (long long t : wp.times) out << " " << t;
        out << "\n";
    }
}

inline void save_instance(const Instance& inst, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    save_instance(inst, out);
}

}  // namespace alwibp
