#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "alwibp/mip.hpp"

namespace alwibp {

struct EnumLimits {
    long long max_nodes = 10'000'000;
    double max_seconds = 60.0;
};

struct EnumResult {
    bool feasible = false;
    bool proven = false;
    double objective = 0.0;
    std::vector<double> values;  // indexed like model.variables
    long long nodes = 0;
};

namespace detail {

// Depth-first search over a model's binary choices. Constraints of the shape
// "sum of distinct binaries = 1" become branching groups (pick the member);
// leftover binaries branch 0/1; every other row prunes through running
// lower/upper bounds. Continuous variables are resolved at the leaves: first
// by equalities that pin a single one, then by the tightest lower bound their
// inequality rows impose, which is optimal here because continuous objective
// coefficients are nonnegative.
class ModelEnumerator {
public:
    ModelEnumerator(const MipModel& model, EnumLimits lim) : model_(model), lim_(lim) {
        prepare();
    }

    EnumResult solve() {
        EnumResult res;
        deadline_ = std::chrono::steady_clock::now() +
                    std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                        std::chrono::duration<double>(lim_.max_seconds));
        bool root_ok = true;
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (row_dead(r)) root_ok = false;
        if (root_ok) dfs(0);
        res.feasible = have_best_;
        res.proven = !stopped_;
        res.objective = best_obj_;
        res.values = best_values_;
        res.nodes = nodes_;
        return res;
    }

private:
    struct Group {
        std::vector<int> vars;
        bool exactly_one = true;  // false: single binary branched 1 then 0
        double min_obj = 0.0;
    };

    struct Row {
        double fixed = 0.0;    // contribution of decided binaries
        double bin_min = 0.0;  // minimum over undecided binaries
        double bin_max = 0.0;
        bool pos_inf = false;  // an unresolved continuous can push up
        bool neg_inf = false;  // or down
    };

    void prepare() {
        const std::size_t nv = model_.variables.size();
        obj_coef_.assign(nv, 0.0);
        for (const LinTerm& t : model_.objective)
            obj_coef_[static_cast<std::size_t>(t.var)] += t.coef;
        value_.assign(nv, 0.0);
        decided_.assign(nv, 0);

        cont_obj_nonneg_ = true;
        for (std::size_t v = 0; v < nv; ++v)
            if (model_.variables[v].kind == VarKind::Continuous && obj_coef_[v] < 0.0)
                cont_obj_nonneg_ = false;

        var_rows_.assign(nv, {});
        rows_.assign(model_.constraints.size(), {});
        for (std::size_t r = 0; r < model_.constraints.size(); ++r) {
            for (const LinTerm& t : model_.constraints[r].terms) {
                const std::size_t v = static_cast<std::size_t>(t.var);
                var_rows_[v].push_back({static_cast<int>(r), t.coef});
                if (model_.variables[v].kind == VarKind::Binary) {
                    rows_[r].bin_max += std::max(0.0, t.coef);
                    rows_[r].bin_min += std::min(0.0, t.coef);
                } else {
                    if (t.coef > 0.0) rows_[r].pos_inf = true;
                    if (t.coef < 0.0) rows_[r].neg_inf = true;
                }
            }
        }

        std::vector<char> claimed(nv, 0);
        for (const MipConstraint& c : model_.constraints) {
            if (c.rel != Rel::Eq || c.rhs != 1.0 || c.terms.empty()) continue;
            bool fits = true;
            for (const LinTerm& t : c.terms) {
                const std::size_t v = static_cast<std::size_t>(t.var);
                if (t.coef != 1.0 || claimed[v] ||
                    model_.variables[v].kind != VarKind::Binary) {
                    fits = false;
                    break;
                }
            }
            if (!fits) continue;
            Group g;
            for (const LinTerm& t : c.terms) {
                claimed[static_cast<std::size_t>(t.var)] = 1;
                g.vars.push_back(t.var);
            }
            g.min_obj = obj_coef_[static_cast<std::size_t>(g.vars.front())];
            for (int v : g.vars) g.min_obj = std::min(g.min_obj, obj_coef_[static_cast<std::size_t>(v)]);
            groups_.push_back(std::move(g));
        }
        for (std::size_t v = 0; v < nv; ++v) {
            if (claimed[v] || model_.variables[v].kind != VarKind::Binary) continue;
            Group g;
            g.vars = {static_cast<int>(v)};
            g.exactly_one = false;
            g.min_obj = std::min(0.0, obj_coef_[v]);
            groups_.push_back(std::move(g));
        }

        suffix_min_obj_.assign(groups_.size() + 1, 0.0);
        for (std::size_t g = groups_.size(); g-- > 0;)
            suffix_min_obj_[g] = suffix_min_obj_[g + 1] + groups_[g].min_obj;

        touched_stamp_.assign(rows_.size(), 0);
    }

    bool row_dead(std::size_t r) const {
        const Row& st = rows_[r];
        const MipConstraint& c = model_.constraints[r];
        const double lo = st.neg_inf ? -1e300 : st.fixed + st.bin_min;
        const double hi = st.pos_inf ? 1e300 : st.fixed + st.bin_max;
        switch (c.rel) {
            case Rel::Le: return lo > c.rhs + kSolutionTolerance;
            case Rel::Ge: return hi < c.rhs - kSolutionTolerance;
            case Rel::Eq:
                return lo > c.rhs + kSolutionTolerance || hi < c.rhs - kSolutionTolerance;
        }
        return false;
    }

    void apply(int v, double val, std::vector<int>& touched) {
        value_[static_cast<std::size_t>(v)] = val;
        decided_[static_cast<std::size_t>(v)] = 1;
        for (const auto& [r, coef] : var_rows_[static_cast<std::size_t>(v)]) {
            Row& st = rows_[static_cast<std::size_t>(r)];
            st.fixed += coef * val;
            st.bin_max -= std::max(0.0, coef);
            st.bin_min -= std::min(0.0, coef);
            if (touched_stamp_[static_cast<std::size_t>(r)] != stamp_) {
                touched_stamp_[static_cast<std::size_t>(r)] = stamp_;
                touched.push_back(r);
            }
        }
        obj_fixed_ += obj_coef_[static_cast<std::size_t>(v)] * val;
    }

    void revert(int v) {
        const double val = value_[static_cast<std::size_t>(v)];
        decided_[static_cast<std::size_t>(v)] = 0;
        for (const auto& [r, coef] : var_rows_[static_cast<std::size_t>(v)]) {
            Row& st = rows_[static_cast<std::size_t>(r)];
            st.fixed -= coef * val;
            st.bin_max += std::max(0.0, coef);
            st.bin_min += std::min(0.0, coef);
        }
        obj_fixed_ -= obj_coef_[static_cast<std::size_t>(v)] * val;
        value_[static_cast<std::size_t>(v)] = 0.0;
    }

    void dfs(std::size_t g) {
        if (stopped_) return;
        ++nodes_;
        if ((nodes_ & 0xfff) == 0 && std::chrono::steady_clock::now() > deadline_) {
            stopped_ = true;
            return;
        }
        if (nodes_ > lim_.max_nodes) {
            stopped_ = true;
            return;
        }
        if (have_best_ && cont_obj_nonneg_ &&
            obj_fixed_ + suffix_min_obj_[g] >= best_obj_ - 1e-9)
            return;
        if (g == groups_.size()) {
            leaf();
            return;
        }
        const Group& grp = groups_[g];
        const std::size_t options = grp.exactly_one ? grp.vars.size() : 2;
        for (std::size_t o = 0; o < options; ++o) {
            ++stamp_;
            std::vector<int> touched;
            if (grp.exactly_one) {
                for (std::size_t k = 0; k < grp.vars.size(); ++k)
                    apply(grp.vars[k], k == o ? 1.0 : 0.0, touched);
            } else {
                apply(grp.vars[0], o == 0 ? 1.0 : 0.0, touched);
            }
            bool ok = true;
            for (int r : touched)
                if (row_dead(static_cast<std::size_t>(r))) {
                    ok = false;
                    break;
                }
            if (ok) dfs(g + 1);
            if (grp.exactly_one)
                for (int v : grp.vars) revert(v);
            else
                revert(grp.vars[0]);
            if (stopped_) return;
        }
    }

    void leaf() {
        const std::size_t nv = model_.variables.size();
        std::vector<double> vals = value_;
        std::vector<char> done(nv, 0);
        for (std::size_t v = 0; v < nv; ++v)
            done[v] = model_.variables[v].kind == VarKind::Binary || decided_[v];

        // equalities that still contain exactly one open continuous pin it
        bool progress = true;
        while (progress) {
            progress = false;
            for (const MipConstraint& c : model_.constraints) {
                if (c.rel != Rel::Eq) continue;
                int open = -1;
                double open_coef = 0.0;
                double rest = 0.0;
                bool multi = false;
                for (const LinTerm& t : c.terms) {
                    const std::size_t v = static_cast<std::size_t>(t.var);
                    if (done[v]) {
                        rest += t.coef * vals[v];
                    } else if (open < 0) {
                        open = t.var;
                        open_coef = t.coef;
                    } else {
                        multi = true;
                    }
                }
                if (open < 0 || multi || open_coef == 0.0) continue;
                double pinned = (c.rhs - rest) / open_coef;
                if (pinned < 0.0) {
                    if (pinned < -kSolutionTolerance) return;  // domain breach
                    pinned = 0.0;
                }
                vals[static_cast<std::size_t>(open)] = pinned;
                done[static_cast<std::size_t>(open)] = 1;
                progress = true;
            }
        }

        // remaining continuous take the largest lower bound their resolved
        // inequality rows impose; nonnegative objective coefficients make
        // that the optimal completion
        for (std::size_t v = 0; v < nv; ++v) {
            if (done[v]) continue;
            double lb = 0.0;
            for (const auto& [r, coef] : var_rows_[v]) {
                const MipConstraint& c = model_.constraints[static_cast<std::size_t>(r)];
                if (c.rel == Rel::Eq) continue;
                double rest = 0.0;
                bool open_other = false;
                for (const LinTerm& t : c.terms) {
                    const std::size_t u = static_cast<std::size_t>(t.var);
                    if (u == v) continue;
                    if (!done[u]) {
                        open_other = true;
                        break;
                    }
                    rest += t.coef * vals[u];
                }
                if (open_other) continue;
                if (c.rel == Rel::Ge && coef > 0.0) lb = std::max(lb, (c.rhs - rest) / coef);
                if (c.rel == Rel::Le && coef < 0.0) lb = std::max(lb, (c.rhs - rest) / coef);
            }
            vals[v] = lb;
            done[v] = 1;
        }

        for (const MipConstraint& c : model_.constraints) {
            double lhs = 0.0;
            for (const LinTerm& t : c.terms) lhs += t.coef * vals[static_cast<std::size_t>(t.var)];
            switch (c.rel) {
                case Rel::Le:
                    if (lhs > c.rhs + kSolutionTolerance) return;
                    break;
                case Rel::Ge:
                    if (lhs < c.rhs - kSolutionTolerance) return;
                    break;
                case Rel::Eq:
                    if (std::abs(lhs - c.rhs) > kSolutionTolerance) return;
                    break;
            }
        }

        double obj = 0.0;
        for (std::size_t v = 0; v < nv; ++v) obj += obj_coef_[v] * vals[v];
        if (!have_best_ || obj < best_obj_ - 1e-9) {
            have_best_ = true;
            best_obj_ = obj;
            best_values_ = std::move(vals);
        }
    }

    const MipModel& model_;
    EnumLimits lim_;
    std::vector<double> obj_coef_;
    std::vector<double> value_;
    std::vector<char> decided_;
    std::vector<std::vector<std::pair<int, double>>> var_rows_;
    std::vector<Row> rows_;
    std::vector<Group> groups_;
    std::vector<double> suffix_min_obj_;
    std::vector<long long> touched_stamp_;
    long long stamp_ = 0;
    bool cont_obj_nonneg_ = true;

    std::chrono::steady_clock::time_point deadline_;
    long long nodes_ = 0;
    bool stopped_ = false;
    bool have_best_ = false;
    double best_obj_ = 0.0;
    double obj_fixed_ = 0.0;
    std::vector<double> best_values_;
};

}  // namespace detail

// Exhaustively solves a small model; proven=false when a limit cut the
// search short (the incumbent, if any, is still returned).
inline EnumResult enumerate_best(const MipModel& model, EnumLimits lim = {}) {
    detail::ModelEnumerator e(model, lim);
    return e.solve();
}

inline SolverSolution to_solver_solution(const MipModel& model, const EnumResult& res) {
    SolverSolution out;
    for (std::size_t v = 0; v < model.variables.size() && v < res.values.size(); ++v)
        out.values.emplace(model.variables[v].name, res.values[v]);
    out.objective = res.objective;
    return out;
}

}  // namespace alwibp
