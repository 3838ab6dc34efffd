#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "alwibp/instance.hpp"
#include "alwibp/solution.hpp"

namespace alwibp {

inline constexpr double kSolutionTolerance = 1e-6;

enum class VarKind { Binary, Continuous };  // continuous means nonnegative
enum class Rel { Le, Eq, Ge };

struct MipVar {
    std::string name;
    VarKind kind = VarKind::Binary;
};

struct LinTerm {
    int var = -1;
    double coef = 0.0;
};

struct MipConstraint {
    std::string name;
    std::vector<LinTerm> terms;
    Rel rel = Rel::Le;
    double rhs = 0.0;
};

// Minimization model over binary and nonnegative continuous variables.
// Variable and constraint names are unique; variables carry their indices in
// the name (x_<station>_<task>, y_<station>_<worker id>, l_<station>_<worker
// id>, delta_<worker id>) so solutions survive a round trip through text.
class MipModel {
public:
    std::vector<MipVar> variables;
    std::vector<MipConstraint> constraints;
    std::vector<LinTerm> objective;

    int add_var(std::string name, VarKind kind) {
        auto [it, fresh] = index_.emplace(name, static_cast<int>(variables.size()));
        if (!fresh) throw std::logic_error("duplicate variable name: " + name);
        variables.push_back({std::move(name), kind});
        return it->second;
    }

    void add_constraint(std::string name, std::vector<LinTerm> terms, Rel rel, double rhs) {
        if (!row_names_.insert(name).second)
            throw std::logic_error("duplicate constraint name: " + name);
        constraints.push_back({std::move(name), std::move(terms), rel, rhs});
    }

    // index of a declared variable, -1 if absent
    int var(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? -1 : it->second;
    }

private:
    std::unordered_map<std::string, int> index_;
    std::unordered_set<std::string> row_names_;
};

enum class LsMode { LS1, LS2 };
enum class ObjectiveMode { Stations, Smin };

struct SolverSolution {
    std::map<std::string, double> values;
    std::optional<double> objective;
};

struct CheckIssue {
    std::string constraint;
    double violation = 0.0;
};

struct CheckReport {
    std::vector<CheckIssue> violations;
    double objective = 0.0;
    std::optional<double> reported;
    bool objective_matches = true;

    bool ok() const { return violations.empty() && objective_matches; }
};

namespace detail {

// Decomposed variable name; kind is 'x', 'y', 'l' or 'd'.
struct VarRef {
    char kind = 0;
    int station = 0;
    int task = 0;         // 1-based, n+1 for the sink ('x' only)
    long long worker = 0;  // worker id ('y', 'l', 'd')
};

inline std::optional<long long> parse_name_int(const std::string& s) {
    if (s.empty()) return std::nullopt;
    long long v = 0;
    for (char c : s) {
        if (c < '0' || c > '9') return std::nullopt;
        v = v * 10 + (c - '0');
        if (v > 1'000'000'000'000LL) return std::nullopt;
    }
    return v;
}

inline std::optional<VarRef> parse_var_name(const std::string& name) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= name.size()) {
        std::size_t next = name.find('_', pos);
        if (next == std::string::npos) {
            parts.push_back(name.substr(pos));
            break;
        }
        parts.push_back(name.substr(pos, next - pos));
        pos = next + 1;
    }
    VarRef ref;
    if (parts.size() == 2 && parts[0] == "delta") {
        auto w = parse_name_int(parts[1]);
        if (!w) return std::nullopt;
        ref.kind = 'd';
        ref.worker = *w;
        return ref;
    }
    if (parts.size() != 3) return std::nullopt;
    auto s = parse_name_int(parts[1]);
    auto last = parse_name_int(parts[2]);
    if (!s || !last) return std::nullopt;
    ref.station = static_cast<int>(*s);
    if (parts[0] == "x") {
        ref.kind = 'x';
        ref.task = static_cast<int>(*last);
        return ref;
    }
    if (parts[0] == "y" || parts[0] == "l") {
        ref.kind = parts[0][0];
        ref.worker = *last;
        return ref;
    }
    return std::nullopt;
}

// Shared variable/constraint factory for all model flavors.
class ModelBuilder {
public:
    ModelBuilder(const Instance& inst, int max_stations) : inst_(inst), S_(max_stations) {
        const long long need =
            (inst.total_time() + inst.cycle_time() - 1) / inst.cycle_time();
        if (S_ < need)
            throw std::invalid_argument("max_stations " + std::to_string(S_) +
                                        " is below the capacity bound " + std::to_string(need));
        n_ = inst.task_count();
        order_ = inst.workers_by_id();
    }

    void add_task_vars() {
        x_.assign(static_cast<std::size_t>(S_) + 1, {});
        for (int s = 1; s <= S_; ++s) {
            auto& row = x_[static_cast<std::size_t>(s)];
            row.resize(static_cast<std::size_t>(n_) + 1);
            for (int i = 0; i <= n_; ++i)
                row[static_cast<std::size_t>(i)] = model.add_var(
                    "x_" + std::to_string(s) + "_" + std::to_string(i + 1), VarKind::Binary);
        }
    }

    void add_worker_vars() {
        y_.assign(static_cast<std::size_t>(S_) + 1, {});
        for (int s = 1; s <= S_; ++s)
            for (int w : order_)
                y_[static_cast<std::size_t>(s)].push_back(model.add_var(
                    "y_" + std::to_string(s) + "_" + wid(w), VarKind::Binary));
    }

    void add_slack_vars() {
        l_.assign(static_cast<std::size_t>(S_) + 1, {});
        for (int s = 1; s <= S_; ++s)
            for (int w : order_)
                l_[static_cast<std::size_t>(s)].push_back(model.add_var(
                    "l_" + std::to_string(s) + "_" + wid(w), VarKind::Continuous));
    }

    void add_idle_vars() {
        for (int w : order_)
            d_.push_back(model.add_var("delta_" + wid(w), VarKind::Continuous));
    }

    // every task, the sink included, sits on exactly one station
    void rows_assignment() {
        for (int i = 0; i <= n_; ++i) {
            std::vector<LinTerm> terms;
            for (int s = 1; s <= S_; ++s) terms.push_back({x(s, i), 1.0});
            model.add_constraint("c2_i" + std::to_string(i + 1), std::move(terms), Rel::Eq, 1.0);
        }
    }

    // every worker staffs exactly one station, stations take at most one
    void rows_worker_assignment() {
        for (std::size_t k = 0; k < order_.size(); ++k) {
            std::vector<LinTerm> terms;
            for (int s = 1; s <= S_; ++s) terms.push_back({y(s, k), 1.0});
            model.add_constraint("c3_w" + wid(order_[k]), std::move(terms), Rel::Eq, 1.0);
        }
        for (int s = 1; s <= S_; ++s) {
            std::vector<LinTerm> terms;
            for (std::size_t k = 0; k < order_.size(); ++k) terms.push_back({y(s, k), 1.0});
            model.add_constraint("c4_s" + std::to_string(s), std::move(terms), Rel::Le, 1.0);
        }
    }

    // cumulative ordering rows per arc: a successor cannot sit later than
    // its predecessor allows, expressed through tail sums from station k on
    void rows_precedence() {
        auto emit = [&](int i, int j) {
            for (int k = 2; k <= S_; ++k) {
                std::vector<LinTerm> terms;
                for (int s = k; s <= S_; ++s) terms.push_back({x(s, i), 1.0});
                for (int s = k; s <= S_; ++s) terms.push_back({x(s, j), -1.0});
                model.add_constraint("c5_i" + std::to_string(i + 1) + "_j" +
                                         std::to_string(j + 1) + "_k" + std::to_string(k),
                                     std::move(terms), Rel::Le, 0.0);
            }
        };
        for (auto [i, j] : inst_.arcs()) emit(i, j);
        for (int i = 0; i < n_; ++i)
            if (inst_.successors(i).empty()) emit(i, n_);
    }

    void rows_conventional_capacity() {
        for (int s = 1; s <= S_; ++s) {
            std::vector<LinTerm> terms;
            for (int i = 0; i < n_; ++i)
                terms.push_back({x(s, i), static_cast<double>(inst_.time(i))});
            model.add_constraint("c6_s" + std::to_string(s), std::move(terms), Rel::Le,
                                 static_cast<double>(inst_.cycle_time()));
        }
    }

    // worker-time capacity, deactivated by L_w when the worker is elsewhere
    void rows_worker_capacity() {
        for (int s = 1; s <= S_; ++s)
            for (std::size_t k = 0; k < order_.size(); ++k) {
                const WorkerProfile& wp = inst_.worker(order_[k]);
                const long long L = big_m(inst_, order_[k]);
                std::vector<LinTerm> terms;
                for (int i = 0; i < n_; ++i)
                    if (!wp.incompatible(i))
                        terms.push_back({x(s, i), static_cast<double>(wp.time(i))});
                terms.push_back({y(s, k), static_cast<double>(L)});
                model.add_constraint("c7_s" + std::to_string(s) + "_w" + wid(order_[k]),
                                     std::move(terms), Rel::Le,
                                     static_cast<double>(inst_.cycle_time() + L));
            }
    }

    // equality variant of the worker capacity with an explicit slack, plus
    // the link lifting each worker's idle variable to its station slack
    void rows_slack_capacity() {
        for (int s = 1; s <= S_; ++s)
            for (std::size_t k = 0; k < order_.size(); ++k) {
                const WorkerProfile& wp = inst_.worker(order_[k]);
                const long long L = big_m(inst_, order_[k]);
                std::vector<LinTerm> terms;
                for (int i = 0; i < n_; ++i)
                    if (!wp.incompatible(i))
                        terms.push_back({x(s, i), static_cast<double>(wp.time(i))});
                terms.push_back({l(s, k), 1.0});
                terms.push_back({y(s, k), static_cast<double>(L)});
                model.add_constraint("c12_s" + std::to_string(s) + "_w" + wid(order_[k]),
                                     std::move(terms), Rel::Eq,
                                     static_cast<double>(inst_.cycle_time() + L));
            }
        for (int s = 1; s <= S_; ++s)
            for (std::size_t k = 0; k < order_.size(); ++k) {
                const double M =
                    static_cast<double>(big_m(inst_, order_[k]) + inst_.total_time());
                std::vector<LinTerm> terms;
                terms.push_back({d_[k], 1.0});
                terms.push_back({l(s, k), -1.0});
                terms.push_back({y(s, k), -M});
                model.add_constraint("c13_s" + std::to_string(s) + "_w" + wid(order_[k]),
                                     std::move(terms), Rel::Ge, -M);
            }
    }

    // a worker never staffs a station holding a task it cannot execute
    void rows_incompatibility() {
        for (int s = 1; s <= S_; ++s)
            for (std::size_t k = 0; k < order_.size(); ++k) {
                const WorkerProfile& wp = inst_.worker(order_[k]);
                for (int i = 0; i < n_; ++i) {
                    if (!wp.incompatible(i)) continue;
                    model.add_constraint(
                        "c8_s" + std::to_string(s) + "_w" + wid(order_[k]) + "_i" +
                            std::to_string(i + 1),
                        {{y(s, k), 1.0}, {x(s, i), 1.0}}, Rel::Le, 1.0);
                }
            }
    }

    // workers stay within the part of the line the sink closes off
    void rows_worker_before_sink() {
        for (std::size_t k = 0; k < order_.size(); ++k)
            for (int c = 2; c <= S_; ++c) {
                std::vector<LinTerm> terms;
                for (int s = c; s <= S_; ++s) terms.push_back({y(s, k), 1.0});
                for (int s = c; s <= S_; ++s) terms.push_back({x(s, n_), -1.0});
                model.add_constraint("c9_w" + wid(order_[k]) + "_k" + std::to_string(c),
                                     std::move(terms), Rel::Le, 0.0);
            }
    }

    // a staffed station holds at least one real task
    void rows_employment() {
        for (int s = 1; s <= S_; ++s)
            for (std::size_t k = 0; k < order_.size(); ++k) {
                std::vector<LinTerm> terms;
                terms.push_back({y(s, k), 1.0});
                for (int i = 0; i < n_; ++i) terms.push_back({x(s, i), -1.0});
                model.add_constraint("cemploy_s" + std::to_string(s) + "_w" + wid(order_[k]),
                                     std::move(terms), Rel::Le, 0.0);
            }
    }

    void rows_fix_workers(const LineSolution& start) {
        for (std::size_t k = 0; k < order_.size(); ++k) {
            const int s = station_of_worker(start, order_[k]);
            model.add_constraint("c15_w" + wid(order_[k]), {{y(s + 1, k), 1.0}}, Rel::Eq, 1.0);
        }
    }

    // each real task may only stay put or move to a neighboring station
    void rows_station_windows(const LineSolution& start) {
        const std::vector<int> where = station_of_task(inst_, start);
        for (int i = 0; i < n_; ++i) {
            const int s0 = where[i] + 1;
            std::vector<LinTerm> terms;
            const char* family = "c17_i";
            if (S_ == 1) {
                family = "c18_i";
                terms.push_back({x(1, i), 1.0});
            } else if (s0 == 1) {
                family = "c18_i";
                terms.push_back({x(1, i), 1.0});
                terms.push_back({x(2, i), 1.0});
            } else if (s0 == S_) {
                family = "c19_i";
                terms.push_back({x(S_ - 1, i), 1.0});
                terms.push_back({x(S_, i), 1.0});
            } else {
                terms.push_back({x(s0 - 1, i), 1.0});
                terms.push_back({x(s0, i), 1.0});
                terms.push_back({x(s0 + 1, i), 1.0});
            }
            model.add_constraint(family + std::to_string(i + 1), std::move(terms), Rel::Eq, 1.0);
        }
    }

    // with workers pinned, their station loads plus idle equal the cycle
    void rows_fixed_station_idle(const LineSolution& start) {
        for (std::size_t k = 0; k < order_.size(); ++k) {
            const WorkerProfile& wp = inst_.worker(order_[k]);
            const int s = station_of_worker(start, order_[k]) + 1;
            std::vector<LinTerm> terms;
            for (int i = 0; i < n_; ++i)
                if (!wp.incompatible(i))
                    terms.push_back({x(s, i), static_cast<double>(wp.time(i))});
            terms.push_back({d_[k], 1.0});
            model.add_constraint("c20_w" + wid(order_[k]), std::move(terms), Rel::Eq,
                                 static_cast<double>(inst_.cycle_time()));
        }
    }

    void objective_stations() {
        for (int s = 1; s <= S_; ++s)
            model.objective.push_back({x(s, n_), static_cast<double>(s)});
    }

    void objective_with_idle() {
        objective_stations();
        const double weight =
            1.0 / (static_cast<double>(inst_.cycle_time()) *
                   static_cast<double>(inst_.worker_count()));
        for (std::size_t k = 0; k < order_.size(); ++k)
            model.objective.push_back({d_[k], weight});
    }

    MipModel model;

private:
    int x(int s, int i) const { return x_[static_cast<std::size_t>(s)][static_cast<std::size_t>(i)]; }
    int y(int s, std::size_t k) const { return y_[static_cast<std::size_t>(s)][k]; }
    int l(int s, std::size_t k) const { return l_[static_cast<std::size_t>(s)][k]; }
    std::string wid(int w) const { return std::to_string(inst_.worker(w).id); }

    const Instance& inst_;
    int S_ = 0;
    int n_ = 0;
    std::vector<int> order_;
    std::vector<std::vector<int>> x_;
    std::vector<std::vector<int>> y_;
    std::vector<std::vector<int>> l_;
    std::vector<int> d_;
};

}  // namespace detail

// Station-minimization model over max_stations stations: an artificial sink
// task with zero time trails every task without followers, and the objective
// minimizes the index of the station hosting it. Workers get assignment,
// capacity, incompatibility and employment rows.
inline MipModel build_alwibp1(const Instance& inst, int max_stations) {
    detail::ModelBuilder b(inst, max_stations);
    b.add_task_vars();
    const bool workers = inst.worker_count() > 0;
    if (workers) b.add_worker_vars();
    b.rows_assignment();
    if (workers) b.rows_worker_assignment();
    b.rows_precedence();
    b.rows_conventional_capacity();
    if (workers) {
        b.rows_worker_capacity();
        b.rows_incompatibility();
        b.rows_worker_before_sink();
        b.rows_employment();
    }
    b.objective_stations();
    return std::move(b.model);
}

// Variant with a hierarchical objective: station count first, then the summed
// idle time of the workers' stations, scaled by 1/(cycle * |W|) so the
// secondary term stays below one station. Worker capacity rows become
// equalities with explicit slack, linked to one idle variable per worker.
inline MipModel build_smin(const Instance& inst, int max_stations) {
    if (inst.worker_count() == 0)
        throw std::invalid_argument("the idle-minimizing model needs at least one worker");
    detail::ModelBuilder b(inst, max_stations);
    b.add_task_vars();
    b.add_worker_vars();
    b.add_slack_vars();
    b.add_idle_vars();
    b.rows_assignment();
    b.rows_worker_assignment();
    b.rows_precedence();
    b.rows_conventional_capacity();
    b.rows_slack_capacity();
    b.rows_incompatibility();
    b.rows_worker_before_sink();
    b.rows_employment();
    b.objective_with_idle();
    return std::move(b.model);
}

inline SolverSolution encode_solution(const MipModel& model, const Instance& inst,
                                      const LineSolution& sol);
inline CheckReport check_solution(const MipModel& model, const SolverSolution& sol);

// Post-optimization neighborhood around a feasible start line. LS1 pins every
// worker to its start station; LS2 additionally confines each task to its
// start station or a direct neighbor. With ObjectiveMode::Smin the worker
// stations are fixed anyway, so each worker's idle is tied directly to its
// station load and the slack/capacity machinery drops out.
inline MipModel build_ls(const Instance& inst, const LineSolution& start, LsMode mode,
                         ObjectiveMode objective_mode) {
    if (inst.worker_count() == 0 && objective_mode == ObjectiveMode::Smin)
        throw std::invalid_argument("the idle-minimizing objective needs at least one worker");
    const int S = start.station_count();

    {
        MipModel base = build_alwibp1(inst, S);
        const SolverSolution enc = encode_solution(base, inst, start);
        const CheckReport rep = check_solution(base, enc);
        if (!rep.violations.empty())
            throw ValidationError("start solution violates " + rep.violations.front().constraint);
    }

    detail::ModelBuilder b(inst, S);
    b.add_task_vars();
    const bool workers = inst.worker_count() > 0;
    if (workers) b.add_worker_vars();
    if (objective_mode == ObjectiveMode::Smin) b.add_idle_vars();
    b.rows_assignment();
    if (workers) b.rows_worker_assignment();
    b.rows_precedence();
    b.rows_conventional_capacity();
    if (workers) {
        if (objective_mode == ObjectiveMode::Stations) b.rows_worker_capacity();
        b.rows_incompatibility();
        b.rows_worker_before_sink();
        b.rows_employment();
        b.rows_fix_workers(start);
    }
    if (mode == LsMode::LS2) b.rows_station_windows(start);
    if (objective_mode == ObjectiveMode::Smin) {
        b.rows_fixed_station_idle(start);
        b.objective_with_idle();
    } else {
        b.objective_stations();
    }
    return std::move(b.model);
}

// Expresses a line as values for every model variable. Idle and slack
// variables get the smallest values the rows admit, so a feasible line maps
// to a violation-free solution.
inline SolverSolution encode_solution(const MipModel& model, const Instance& inst,
                                      const LineSolution& sol) {
    const int n = inst.task_count();
    const int m = sol.station_count();
    const std::vector<int> task_station = station_of_task(inst, sol);

    std::unordered_map<long long, int> by_id;
    for (int w = 0; w < inst.worker_count(); ++w) by_id.emplace(inst.worker(w).id, w);
    std::vector<int> worker_station(static_cast<std::size_t>(inst.worker_count()), -1);
    for (int w = 0; w < inst.worker_count(); ++w)
        worker_station[static_cast<std::size_t>(w)] = station_of_worker(sol, w);

    // worker-time load per (station, worker) over that worker's executable tasks
    auto worker_load = [&](int s, int w) {
        const WorkerProfile& wp = inst.worker(w);
        long long load = 0;
        if (s - 1 < m)
            for (int i : sol.stations[static_cast<std::size_t>(s - 1)].tasks)
                if (!wp.incompatible(i)) load += wp.time(i);
        return load;
    };

    SolverSolution out;
    double objective = 0.0;
    std::vector<double> values(model.variables.size(), 0.0);
    for (std::size_t v = 0; v < model.variables.size(); ++v) {
        const std::string& name = model.variables[v].name;
        auto ref = detail::parse_var_name(name);
        if (!ref) throw std::logic_error("unrecognized model variable: " + name);
        double val = 0.0;
        switch (ref->kind) {
            case 'x': {
                const int i = ref->task - 1;
                if (i == n)
                    val = (ref->station == m) ? 1.0 : 0.0;
                else
                    val = (task_station[static_cast<std::size_t>(i)] == ref->station - 1) ? 1.0
                                                                                         : 0.0;
                break;
            }
            case 'y': {
                const int w = by_id.at(ref->worker);
                val = (worker_station[static_cast<std::size_t>(w)] == ref->station - 1) ? 1.0
                                                                                        : 0.0;
                break;
            }
            case 'l': {
                const int w = by_id.at(ref->worker);
                const long long L = big_m(inst, w);
                const bool here = worker_station[static_cast<std::size_t>(w)] == ref->station - 1;
                const long long slack = inst.cycle_time() + (here ? 0 : L) -
                                        worker_load(ref->station, w);
                val = static_cast<double>(slack);
                break;
            }
            case 'd': {
                const int w = by_id.at(ref->worker);
                const int s = worker_station[static_cast<std::size_t>(w)];
                double best = static_cast<double>(inst.cycle_time() - worker_load(s + 1, w));
                if (model.var("l_1_" + std::to_string(ref->worker)) >= 0) {
                    // the idle link runs over every station; with a small
                    // total task time the pushed-down bound of a foreign
                    // station can exceed the worker's own idle
                    const double M = static_cast<double>(big_m(inst, w) + inst.total_time());
                    for (int st = 1;; ++st) {
                        if (model.var("l_" + std::to_string(st) + "_" +
                                      std::to_string(ref->worker)) < 0)
                            break;
                        if (st - 1 == s) continue;
                        const double bound =
                            static_cast<double>(inst.cycle_time() + big_m(inst, w) -
                                                worker_load(st, w)) -
                            M;
                        best = std::max(best, bound);
                    }
                }
                val = std::max(best, 0.0);
                break;
            }
            default:
                throw std::logic_error("unrecognized model variable: " + name);
        }
        values[v] = val;
        out.values.emplace(name, val);
    }
    for (const LinTerm& t : model.objective)
        objective += t.coef * values[static_cast<std::size_t>(t.var)];
    out.objective = objective;
    return out;
}

// Reads a station layout back from model variable values: the sink's station
// closes the line, tasks and workers land where their variables are set.
// Interior empty stations survive; stations past the sink are dropped.
inline LineSolution decode_solution(const Instance& inst, const MipModel& model,
                                    const SolverSolution& sol) {
    const int n = inst.task_count();
    std::unordered_map<long long, int> by_id;
    for (int w = 0; w < inst.worker_count(); ++w) by_id.emplace(inst.worker(w).id, w);

    auto value = [&](const std::string& name) {
        auto it = sol.values.find(name);
        return it == sol.values.end() ? 0.0 : it->second;
    };

    int sink_station = -1;
    std::vector<int> task_station(static_cast<std::size_t>(n), -1);
    std::vector<std::pair<int, int>> worker_station;  // (worker index, station)
    for (const MipVar& mv : model.variables) {
        if (value(mv.name) < 0.5) continue;
        auto ref = detail::parse_var_name(mv.name);
        if (!ref) throw std::logic_error("unrecognized model variable: " + mv.name);
        if (ref->kind == 'x') {
            const int i = ref->task - 1;
            if (i == n) {
                if (sink_station > 0)
                    throw ValidationError("solution places the sink on two stations");
                sink_station = ref->station;
            } else {
                if (task_station[static_cast<std::size_t>(i)] > 0)
                    throw ValidationError("solution places task " + std::to_string(i + 1) +
                                          " on two stations");
                task_station[static_cast<std::size_t>(i)] = ref->station;
            }
        } else if (ref->kind == 'y') {
            worker_station.emplace_back(by_id.at(ref->worker), ref->station);
        }
    }
    if (sink_station < 0) throw ValidationError("no station hosts the sink");
    for (int i = 0; i < n; ++i)
        if (task_station[static_cast<std::size_t>(i)] < 0)
            throw ValidationError("solution leaves task " + std::to_string(i + 1) + " unassigned");

    int last = sink_station;
    for (int i = 0; i < n; ++i) last = std::max(last, task_station[static_cast<std::size_t>(i)]);
    for (auto [w, s] : worker_station) last = std::max(last, s);

    LineSolution out;
    out.stations.resize(static_cast<std::size_t>(last));
    for (int i = 0; i < n; ++i)
        out.stations[static_cast<std::size_t>(task_station[static_cast<std::size_t>(i)] - 1)]
            .tasks.push_back(i);
    for (auto& st : out.stations) std::sort(st.tasks.begin(), st.tasks.end());
    for (auto [w, s] : worker_station) {
        Station& st = out.stations[static_cast<std::size_t>(s - 1)];
        if (st.worker != -1) throw ValidationError("solution staffs a station twice");
        st.worker = w;
    }
    return out;
}

// Evaluates every constraint and domain at tolerance 1e-6; missing variables
// count as zero, unknown names are rejected.
inline CheckReport check_solution(const MipModel& model, const SolverSolution& sol) {
    for (const auto& [name, v] : sol.values)
        if (model.var(name) < 0)
            throw ValidationError("solution names unknown variable '" + name + "'");

    std::vector<double> values(model.variables.size(), 0.0);
    for (std::size_t v = 0; v < model.variables.size(); ++v) {
        auto it = sol.values.find(model.variables[v].name);
        if (it != sol.values.end()) values[v] = it->second;
    }

    CheckReport rep;
    for (std::size_t v = 0; v < model.variables.size(); ++v) {
        const double val = values[v];
        double off = 0.0;
        if (model.variables[v].kind == VarKind::Binary)
            off = std::min(std::abs(val), std::abs(val - 1.0));
        else if (val < 0.0)
            off = -val;
        if (off > kSolutionTolerance)
            rep.violations.push_back({"domain_" + model.variables[v].name, off});
    }
    for (const MipConstraint& c : model.constraints) {
        double lhs = 0.0;
        for (const LinTerm& t : c.terms) lhs += t.coef * values[static_cast<std::size_t>(t.var)];
        double off = 0.0;
        switch (c.rel) {
            case Rel::Le: off = lhs - c.rhs; break;
            case Rel::Ge: off = c.rhs - lhs; break;
            case Rel::Eq: off = std::abs(lhs - c.rhs); break;
        }
        if (off > kSolutionTolerance) rep.violations.push_back({c.name, off});
    }
    for (const LinTerm& t : model.objective)
        rep.objective += t.coef * values[static_cast<std::size_t>(t.var)];
    rep.reported = sol.objective;
    if (sol.objective)
        rep.objective_matches = std::abs(rep.objective - *sol.objective) <= kSolutionTolerance;
    return rep;
}

namespace detail {

// Shortest decimal text that parses back to the same double; integral values
// print without a decimal point.
inline std::string format_number(double v) {
    if (v == 0.0) return "0";
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.0f", v);
        return buf;
    }
    char buf[64];
    for (int p = 1; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

inline void lp_token(std::string& out, std::string& line, const std::string& tok) {
    if (line.empty()) {
        line = " " + tok;
        return;
    }
    if (line.size() + tok.size() + 1 > 72) {
        out += line;
        out += '\n';
        line = "   " + tok;
        return;
    }
    line += ' ';
    line += tok;
}

inline void lp_terms(std::string& out, std::string& line, const MipModel& model,
                     const std::vector<LinTerm>& terms) {
    if (terms.empty()) {
        lp_token(out, line, "0 " + model.variables.front().name);
        return;
    }
    bool first = true;
    for (const LinTerm& t : terms) {
        const std::string& name = model.variables[static_cast<std::size_t>(t.var)].name;
        const double mag = std::abs(t.coef);
        std::string body = (mag == 1.0) ? name : format_number(mag) + " " + name;
        std::string tok;
        if (first)
            tok = (t.coef < 0 ? "- " : "") + body;
        else
            tok = (t.coef < 0 ? "- " : "+ ") + body;
        lp_token(out, line, tok);
        first = false;
    }
}

}  // namespace detail

// Deterministic LP text: objective, named rows, bounds for the continuous
// variables and the binary list.
inline std::string emit_lp(const MipModel& model) {
    std::string out;
    out += "Minimize\n";
    {
        std::string line = " obj:";
        detail::lp_terms(out, line, model, model.objective);
        out += line;
        out += '\n';
    }
    out += "Subject To\n";
    for (const MipConstraint& c : model.constraints) {
        std::string line = " " + c.name + ":";
        detail::lp_terms(out, line, model, c.terms);
        const char* rel = c.rel == Rel::Le ? "<=" : (c.rel == Rel::Ge ? ">=" : "=");
        detail::lp_token(out, line, rel);
        detail::lp_token(out, line, detail::format_number(c.rhs));
        out += line;
        out += '\n';
    }
    bool any_continuous = false;
    for (const MipVar& v : model.variables) any_continuous |= v.kind == VarKind::Continuous;
    if (any_continuous) {
        out += "Bounds\n";
        for (const MipVar& v : model.variables)
            if (v.kind == VarKind::Continuous) out += " 0 <= " + v.name + "\n";
    }
    bool any_binary = false;
    for (const MipVar& v : model.variables) any_binary |= v.kind == VarKind::Binary;
    if (any_binary) {
        out += "Binary\n";
        std::string line;
        for (const MipVar& v : model.variables)
            if (v.kind == VarKind::Binary) detail::lp_token(out, line, v.name);
        out += line;
        out += '\n';
    }
    out += "End\n";
    return out;
}

// Plain `<name> <value>` lines; '#' or '\' start a comment, an optional
// "=obj= <value>" line carries the objective.
inline SolverSolution parse_solver_solution(std::istream& in, const std::string& origin) {
    detail::LineSource src(in, origin);
    SolverSolution out;
    std::string line;
    while (src.next(line)) {
        if (!line.empty() && line.front() == '\\') continue;
        std::istringstream parts(line);
        std::string name;
        parts >> name;
        if (name.empty()) continue;
        if (name == "=obj=") {
            double v = 0.0;
            if (!(parts >> v)) src.fail("expected a value after =obj=");
            out.objective = v;
        } else {
            double v = 0.0;
            if (!(parts >> v)) src.fail("expected a value after variable '" + name + "'");
            if (!out.values.emplace(name, v).second)
                src.fail("duplicate variable '" + name + "'");
        }
        std::string rest;
        if (parts >> rest) src.fail("trailing text '" + rest + "'");
    }
    return out;
}

inline SolverSolution load_solver_solution(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse_solver_solution(in, path.filename().string());
}

inline void save_solver_solution(const SolverSolution& sol, std::ostream& out) {
    if (sol.objective) out << "=obj= " << detail::format_number(*sol.objective) << "\n";
    for (const auto& [name, v] : sol.values)
        out << name << " " << detail::format_number(v) << "\n";
}

}  // namespace alwibp
