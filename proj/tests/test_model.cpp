#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>

#include "alwibp/cih.hpp"
#include "alwibp/mip.hpp"
#include "alwibp/mip_solve.hpp"
#include "alwibp/oracle.hpp"
#include "helpers.hpp"

using namespace alwibp;
using testutil::t1;
using testutil::t1_worker;
using testutil::trio;
using testutil::trio_worker;

namespace {

std::set<std::string> row_names(const MipModel& m) {
    std::set<std::string> out;
    for (const MipConstraint& c : m.constraints) out.insert(c.name);
    return out;
}

}  // namespace

TEST_CASE("worker-free model has one assignment block plus precedence and capacity") {
    const MipModel m = build_alwibp1(t1(), 3);
    CHECK(m.variables.size() == 12);  // 4 tasks (incl. sink) x 3 stations
    CHECK(m.constraints.size() == 13);
    const auto names = row_names(m);
    CHECK(names.count("c2_i4") == 1);
    CHECK(names.count("c5_i1_j3_k2") == 1);
    CHECK(names.count("c6_s3") == 1);
    CHECK(names.count("c3_w1") == 0);
}

TEST_CASE("model construction rejects a station bound below the capacity bound") {
    CHECK_THROWS_AS(build_alwibp1(t1(), 1), std::invalid_argument);
}

TEST_CASE("hierarchical model needs at least one worker") {
    CHECK_THROWS_AS(build_smin(t1(), 2), std::invalid_argument);
}

TEST_CASE("model text matches the frozen station snapshot") {
    const MipModel m = build_alwibp1(t1(), 3);
    CHECK(emit_lp(m) == testutil::slurp(testutil::data_dir() / "t1_stations.lp"));
}

TEST_CASE("model text matches the frozen hierarchical snapshot") {
    const MipModel m = build_smin(t1_worker(), 2);
    CHECK(emit_lp(m) == testutil::slurp(testutil::data_dir() / "t1w_smin.lp"));
}

TEST_CASE("duplicate names are rejected when assembling a model") {
    MipModel m;
    const int x = m.add_var("x", VarKind::Binary);
    CHECK_THROWS_AS(m.add_var("x", VarKind::Binary), std::logic_error);
    m.add_constraint("r1", {{x, 1.0}}, Rel::Le, 1.0);
    CHECK_THROWS_AS(m.add_constraint("r1", {{x, 1.0}}, Rel::Le, 1.0), std::logic_error);
    CHECK(m.var("x") == 0);
    CHECK(m.var("nope") == -1);
}

TEST_CASE("number formatting picks the shortest exact form") {
    CHECK(detail::format_number(2.0) == "2");
    CHECK(detail::format_number(-3.0) == "-3");
    CHECK(detail::format_number(0.001) == "0.001");
    CHECK(detail::format_number(0.5) == "0.5");
    for (double v : {1.0 / 3.0, 1e-9, 123456.789, 2.0000000001}) {
        const std::string s = detail::format_number(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("long rows wrap below the column limit") {
    std::vector<long long> times(40, 10);
    const Instance wide = Instance::create("wide", times, {}, {}, 1000);
    const MipModel m = build_alwibp1(wide, 2);
    const std::string text = emit_lp(m);
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) CHECK(line.size() <= 72);
}

TEST_CASE("solver listing round trips with objective") {
    SolverSolution sol;
    sol.values = {{"x_1_1", 1.0}, {"y_1_1", 0.0}};
    sol.objective = 2.5;
    std::ostringstream out;
    save_solver_solution(sol, out);
    std::istringstream in(out.str());
    const SolverSolution again = parse_solver_solution(in, "mem");
    CHECK(again.values == sol.values);
    REQUIRE(again.objective);
    CHECK(*again.objective == 2.5);
}

TEST_CASE("solver listing parser flags duplicates and junk") {
    auto bad = [](const char* text) {
        std::istringstream in(text);
        return parse_solver_solution(in, "mem");
    };
    CHECK_THROWS_AS(bad("x 1\nx 0\n"), ParseError);
    CHECK_THROWS_AS(bad("x 1 trailing\n"), ParseError);
    CHECK_THROWS_AS(bad("x notanumber\n"), ParseError);
    const SolverSolution ok = [] {
        std::istringstream in("\\ comment line\nx 1\n# plain comment\n=obj= 4\n");
        return parse_solver_solution(in, "mem");
    }();
    CHECK(ok.values.at("x") == 1.0);
    CHECK(ok.objective == 4.0);
}

TEST_CASE("checking a consistent assignment reports no violations") {
    const Instance inst = t1_worker();
    const MipModel m = build_smin(inst, 2);
    const OracleResult exact = exact_smin(inst);
    REQUIRE(exact.solution);
    const SolverSolution enc = encode_solution(m, inst, *exact.solution);
    const CheckReport rep = check_solution(m, enc);
    CHECK(rep.violations.empty());
    CHECK(rep.objective_matches);
    CHECK(rep.ok());
    CHECK(rep.objective == Catch::Approx(2.0));
}

TEST_CASE("check flags violated rows by name") {
    const Instance inst = t1_worker();
    const MipModel m = build_alwibp1(inst, 2);
    SolverSolution sol;
    sol.values = {{"x_1_3", 1.0}, {"x_2_1", 1.0}, {"x_1_2", 1.0},
                  {"x_2_4", 1.0}, {"y_2_1", 1.0}};
    const CheckReport rep = check_solution(m, sol);
    REQUIRE_FALSE(rep.violations.empty());
    bool found = false;
    for (const CheckIssue& v : rep.violations) found = found || v.constraint == "c5_i1_j3_k2";
    CHECK(found);
}

TEST_CASE("check rejects unknown variables and off-domain values") {
    const MipModel m = build_alwibp1(t1(), 2);
    SolverSolution unknown;
    unknown.values = {{"zz", 1.0}};
    CHECK_THROWS_AS(check_solution(m, unknown), ValidationError);
    SolverSolution off;
    off.values = {{"x_1_1", 0.4}};
    const CheckReport rep = check_solution(m, off);
    bool domain = false;
    for (const CheckIssue& v : rep.violations)
        domain = domain || v.constraint.rfind("domain_", 0) == 0;
    CHECK(domain);
}

TEST_CASE("objective mismatch is reported") {
    const MipModel m = build_alwibp1(t1(), 2);
    SolverSolution sol;
    sol.values = {{"x_1_1", 1.0}, {"x_1_2", 1.0}, {"x_2_3", 1.0}, {"x_2_4", 1.0}};
    sol.objective = 7.0;
    const CheckReport rep = check_solution(m, sol);
    CHECK(rep.violations.empty());
    CHECK_FALSE(rep.objective_matches);
    CHECK_FALSE(rep.ok());
}

TEST_CASE("decoding rebuilds the station line") {
    const Instance inst = t1_worker();
    const MipModel m = build_alwibp1(inst, 2);
    SolverSolution sol;
    sol.values = {{"x_1_2", 1.0}, {"x_2_1", 1.0}, {"x_2_3", 1.0},
                  {"x_2_4", 1.0}, {"y_1_1", 1.0}};
    const LineSolution line = decode_solution(inst, m, sol);
    REQUIRE(line.station_count() == 2);
    CHECK(line.stations[0].worker == 0);
    CHECK(line.stations[0].tasks == std::vector<int>{1});
    CHECK(is_feasible(inst, line));
}

TEST_CASE("decoding rejects incomplete assignments") {
    const Instance inst = t1();
    const MipModel m = build_alwibp1(inst, 2);
    SolverSolution nosink;
    nosink.values = {{"x_1_1", 1.0}, {"x_1_2", 1.0}, {"x_2_3", 1.0}};
    CHECK_THROWS_AS(decode_solution(inst, m, nosink), ValidationError);
    SolverSolution dup;
    dup.values = {{"x_1_1", 1.0}, {"x_2_1", 1.0}, {"x_1_2", 1.0}, {"x_2_3", 1.0},
                  {"x_2_4", 1.0}};
    CHECK_THROWS_AS(decode_solution(inst, m, dup), ValidationError);
}

TEST_CASE("encode and decode are inverse on oracle lines") {
    Rng rng(31);
    for (int k = 0; k < 40; ++k) {
        const Instance inst = testutil::random_sized(rng, 7, 2);
        const OracleResult exact = exact_alwibp1(inst);
        if (!exact.feasible || !exact.solution) continue;
        const MipModel m = build_alwibp1(inst, exact.stations);
        const SolverSolution enc = encode_solution(m, inst, *exact.solution);
        const CheckReport rep = check_solution(m, enc);
        CHECK(rep.ok());
        const LineSolution back = decode_solution(inst, m, enc);
        REQUIRE(back.station_count() == exact.solution->station_count());
        for (int s = 0; s < back.station_count(); ++s) {
            std::vector<int> a = back.stations[s].tasks;
            std::vector<int> b = exact.solution->stations[s].tasks;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
            CHECK(back.stations[s].worker == exact.solution->stations[s].worker);
        }
    }
}

TEST_CASE("exhaustive model evaluation agrees with the combinatorial search") {
    Rng rng(64);
    int compared = 0;
    for (int k = 0; k < 60; ++k) {
        const Instance inst = testutil::random_sized(rng, 7, 2);
        const OracleResult exact = exact_alwibp1(inst);
        const int bound = exact.feasible ? run_best_of_four(inst).solution.station_count()
                                         : inst.task_count();
        const MipModel m = build_alwibp1(inst, bound);
        const EnumResult res = enumerate_best(m);
        REQUIRE(res.proven);
        CHECK(res.feasible == exact.feasible);
        if (exact.feasible && res.feasible) {
            CHECK(std::llround(res.objective) == exact.stations);
            ++compared;
        }
    }
    CHECK(compared > 20);
}

TEST_CASE("enumerated assignments satisfy their own model") {
    const Instance inst = t1_worker();
    const MipModel m = build_smin(inst, 2);
    const EnumResult res = enumerate_best(m);
    REQUIRE(res.feasible);
    CHECK(res.proven);
    CHECK(res.objective == Catch::Approx(2.0));
    const CheckReport rep = check_solution(m, to_solver_solution(m, res));
    CHECK(rep.ok());
}

TEST_CASE("enumeration respects limits") {
    const Instance inst = t1();
    const MipModel m = build_alwibp1(inst, 3);
    EnumLimits lim;
    lim.max_nodes = 1;
    const EnumResult res = enumerate_best(m, lim);
    CHECK_FALSE(res.proven);
}

TEST_CASE("neighborhood models keep the start assignment feasible") {
    const Instance inst = t1_worker();
    const CihResult heur = run_best_of_four(inst);
    for (LsMode mode : {LsMode::LS1, LsMode::LS2}) {
        const MipModel m = build_ls(inst, heur.solution, mode, ObjectiveMode::Stations);
        const SolverSolution enc = encode_solution(m, inst, heur.solution);
        const CheckReport rep = check_solution(m, enc);
        CHECK(rep.ok());
    }
}

TEST_CASE("station-window model contains every row of the worker-fixing model") {
    const Instance inst = t1_worker();
    const CihResult heur = run_best_of_four(inst);
    const MipModel ls1 = build_ls(inst, heur.solution, LsMode::LS1, ObjectiveMode::Stations);
    const MipModel ls2 = build_ls(inst, heur.solution, LsMode::LS2, ObjectiveMode::Stations);
    const auto names2 = row_names(ls2);
    for (const MipConstraint& c : ls1.constraints) {
        INFO(c.name);
        CHECK(names2.count(c.name) == 1);
    }
    CHECK(ls2.constraints.size() > ls1.constraints.size());
}

TEST_CASE("window rows for the fixture line") {
    const Instance inst = t1_worker();
    const CihResult heur = run_best_of_four(inst);
    const MipModel ls2 = build_ls(inst, heur.solution, LsMode::LS2, ObjectiveMode::Stations);
    const auto names = row_names(ls2);
    CHECK(names.count("c15_w1") == 1);
    CHECK(names.count("c19_i1") == 1);
    CHECK(names.count("c18_i2") == 1);  // worker task is pinned to its station
    CHECK(names.count("c19_i3") == 1);
    CHECK(names.count("c18_i4") == 0);  // no window for the sink
    CHECK(ls2.constraints.size() == 23);
}

TEST_CASE("neighborhood construction rejects an infeasible start") {
    const Instance inst = t1_worker();
    LineSolution bad;
    bad.stations.push_back({{0, 1}, 0});  // worker time 1500 over cycle
    bad.stations.push_back({{2}, -1});
    CHECK_THROWS_AS(build_ls(inst, bad, LsMode::LS1, ObjectiveMode::Stations), ValidationError);
}

TEST_CASE("hierarchical neighborhood drops the big-M capacity rows") {
    const Instance inst = t1_worker();
    const CihResult heur = run_best_of_four(inst);
    const MipModel m = build_ls(inst, heur.solution, LsMode::LS2, ObjectiveMode::Smin);
    for (const MipConstraint& c : m.constraints) {
        CHECK(c.name.rfind("c7_", 0) != 0);
        CHECK(c.name.rfind("c12_", 0) != 0);
    }
    bool has_fixed_idle = false;
    for (const MipConstraint& c : m.constraints)
        has_fixed_idle = has_fixed_idle || c.name == "c20_w1";
    CHECK(has_fixed_idle);
    const EnumResult res = enumerate_best(m);
    REQUIRE(res.feasible);
    const CheckReport rep = check_solution(m, to_solver_solution(m, res));
    CHECK(rep.ok());
}

TEST_CASE("optimizing the neighborhood never adds stations") {
    Rng rng(909);
    for (int k = 0; k < 25; ++k) {
        const Instance inst = testutil::random_sized(rng, 7, 2);
        CihResult heur;
        try {
            heur = run_best_of_four(inst);
        } catch (const ValidationError&) {
            continue;  // workers cannot take distinct stations
        }
        for (LsMode mode : {LsMode::LS1, LsMode::LS2}) {
            const MipModel m = build_ls(inst, heur.solution, mode, ObjectiveMode::Stations);
            const EnumResult res = enumerate_best(m);
            REQUIRE(res.feasible);
            const LineSolution line = decode_solution(inst, m, to_solver_solution(m, res));
            CHECK(is_feasible(inst, line));
            CHECK(line.station_count() <= heur.solution.station_count());
        }
    }
}

TEST_CASE("hierarchical objective weights idle by cycle and worker count") {
    const Instance inst = t1_worker();
    const MipModel m = build_smin(inst, 2);
    double delta_coef = 0.0;
    for (const LinTerm& t : m.objective)
        if (m.variables[static_cast<std::size_t>(t.var)].name == "delta_1") delta_coef = t.coef;
    CHECK(delta_coef == Catch::Approx(1.0 / 1000.0));
}

TEST_CASE("trio model optima match the combinatorial search") {
    const EnumResult plain = enumerate_best(build_alwibp1(trio(), 3));
    REQUIRE(plain.feasible);
    CHECK(plain.proven);
    CHECK(plain.objective == Catch::Approx(2.0));

    const MipModel ms = build_smin(trio_worker(), 2);
    const EnumResult smin = enumerate_best(ms);
    REQUIRE(smin.feasible);
    CHECK(smin.objective == Catch::Approx(2.0));  // zero worker idle leaves no fraction
    CHECK(check_solution(ms, to_solver_solution(ms, smin)).ok());

    WorkerProfile same;
    same.id = 1;
    same.times = trio().times();
    const Instance alike = Instance::create("alike", trio().times(), trio().arcs(), {same}, 1000);
    const EnumResult res = enumerate_best(build_alwibp1(alike, 3));
    REQUIRE(res.feasible);
    CHECK(res.objective == Catch::Approx(2.0));
}

TEST_CASE("a lone task and worker occupy the only station") {
    WorkerProfile w;
    w.id = 1;
    w.times = {700};
    const Instance inst = Instance::create("solo", {700}, {}, {w}, 1000);
    const MipModel m = build_alwibp1(inst, 1);
    const EnumResult res = enumerate_best(m);
    REQUIRE(res.feasible);
    CHECK(res.objective == Catch::Approx(1.0));
    const SolverSolution sol = to_solver_solution(m, res);
    CHECK(sol.values.at("x_1_1") == 1.0);
    CHECK(sol.values.at("y_1_1") == 1.0);
}

TEST_CASE("idle weight halves with a second worker") {
    WorkerProfile a, b;
    a.id = 1;
    a.times = {400, 500};
    b.id = 2;
    b.times = {400, 500};
    const Instance inst = Instance::create("two", {400, 500}, {}, {a, b}, 1000);
    const std::string lp = emit_lp(build_smin(inst, 2));
    CHECK(lp.find("0.0005 delta_1") != std::string::npos);
    CHECK(lp.find("0.0005 delta_2") != std::string::npos);
}

TEST_CASE("deactivation constants cover every under-cycle task subset") {
    Rng rng(4242);
    for (int k = 0; k < 30; ++k) {
        const Instance inst = testutil::random_instance(
            rng, 4 + (int)uniform_int(rng, 0, 5), 1 + (int)uniform_int(rng, 0, 1));
        const int n = inst.task_count();
        for (int w = 0; w < inst.worker_count(); ++w) {
            const WorkerProfile& wp = inst.worker(w);
            const long long cap = inst.cycle_time() + big_m(inst, w);
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                long long conv = 0;
                long long mine = 0;
                bool usable = true;
                for (int i = 0; i < n && usable; ++i) {
                    if (!(mask & (1u << i))) continue;
                    if (wp.times[static_cast<std::size_t>(i)] < 0) usable = false;
                    conv += inst.time(i);
                    mine += wp.times[static_cast<std::size_t>(i)];
                }
                if (!usable || conv > inst.cycle_time()) continue;
                if (mine > cap) {
                    CAPTURE(inst.name(), w, mask, conv, mine, cap);
                    REQUIRE(mine <= cap);
                }
            }
        }
    }
    SUCCEED();
}

TEST_CASE("the idle tie-break never disturbs the station count") {
    Rng rng(909);
    int checked = 0;
    for (int k = 0; k < 40 && checked < 12; ++k) {
        const Instance inst = testutil::random_sized(rng, 6, 2);
        if (inst.worker_count() == 0) continue;
        const OracleResult exact = exact_alwibp1(inst);
        if (!exact.feasible || !exact.proven) continue;
        const EnumResult res = enumerate_best(build_smin(inst, exact.stations));
        REQUIRE(res.feasible);
        CHECK(std::llround(std::floor(res.objective + 1e-9)) == exact.stations);
        CHECK(res.objective < exact.stations + 1.0);
        ++checked;
    }
    CHECK(checked >= 12);
}

TEST_CASE("an empty assignment violates every task placement row") {
    const MipModel m = build_alwibp1(trio(), 3);
    SolverSolution sol;
    for (const MipVar& v : m.variables) sol.values.emplace(v.name, 0.0);
    const CheckReport rep = check_solution(m, sol);
    int placement = 0;
    for (const CheckIssue& v : rep.violations)
        if (v.constraint.rfind("c2_", 0) == 0) ++placement;
    CHECK(placement == 4);  // three tasks plus the sink
}
