// End-to-end checks over the whole toolkit: every block prints one PASS or
// FAIL line and the process exits with the number of failures. Runs are
// seeded, so a failure reproduces exactly.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "alwibp/benchgen.hpp"
#include "alwibp/cih.hpp"
#include "alwibp/mip.hpp"
#include "alwibp/mip_solve.hpp"
#include "alwibp/oracle.hpp"
#include "helpers.hpp"

using namespace alwibp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << "\n";
    std::cout.flush();
    if (!pass) ++failures;
}

long long line_worker_idle(const Instance& inst, const LineSolution& sol) {
    long long idle = 0;
    for (const Station& st : sol.stations)
        if (st.worker >= 0) idle += inst.cycle_time() - station_load(inst, st);
    return idle;
}

char detail_buf[256];

// ---- 1: the model enumerator and the combinatorial search agree -----------

void criterion1() {
    const auto t0 = Clock::now();
    Rng rng(101);
    int mismatches = 0;
    int unproven = 0;
    for (int k = 0; k < 200; ++k) {
        const Instance inst = testutil::random_sized(rng, 8, 2);
        const OracleResult exact = exact_alwibp1(inst);
        int bound = inst.task_count();
        if (exact.feasible) {
            try {
                bound = run_best_of_four(inst).solution.station_count();
            } catch (const ValidationError&) {
            }
        }
        const EnumResult res = enumerate_best(build_alwibp1(inst, bound));
        if (!res.proven || !exact.proven) {
            ++unproven;
            continue;
        }
        if (res.feasible != exact.feasible)
            ++mismatches;
        else if (exact.feasible && std::llround(res.objective) != exact.stations)
            ++mismatches;
    }
    const double dt = seconds_since(t0);
    std::snprintf(detail_buf, sizeof detail_buf,
                  "station model enumeration vs direct search on 200 instances: "
                  "%d mismatches, %d unproven, %.1fs (limit 600s)",
                  mismatches, unproven, dt);
    report(1, mismatches == 0 && unproven == 0 && dt < 600.0, detail_buf);
}

// ---- 2 and 3: heuristic quality, then post-optimization never hurts -------

struct HeurSample {
    Instance inst;
    CihResult heur;
    int exact_m = 0;
};

std::vector<HeurSample> collect_samples() {
    Rng rng(202);
    std::vector<HeurSample> out;
    while (out.size() < 200) {
        Instance inst = testutil::random_sized(rng, 10, 2);
        const OracleResult exact = exact_alwibp1(inst);
        if (!exact.feasible || !exact.proven) continue;
        try {
            CihResult heur = run_best_of_four(inst);
            out.push_back({std::move(inst), std::move(heur), exact.stations});
        } catch (const ValidationError&) {
        }
    }
    return out;
}

void criterion2(const std::vector<HeurSample>& samples) {
    int within = 0;
    int negative = 0;
    for (const HeurSample& s : samples) {
        const int gap = s.heur.solution.station_count() - s.exact_m;
        if (gap < 0) ++negative;
        if (gap == 0 || gap == 1) ++within;
    }
    std::snprintf(detail_buf, sizeof detail_buf,
                  "insertion heuristic within one station of the optimum on %d/200 "
                  "(needs 180), %d below the optimum (needs 0)",
                  within, negative);
    report(2, within >= 180 && negative == 0, detail_buf);
}

bool same_rows(const MipModel& small, const MipModel& big) {
    auto key = [](const MipModel& m, const MipConstraint& c) {
        std::vector<std::pair<std::string, double>> terms;
        for (const LinTerm& t : c.terms)
            terms.emplace_back(m.variables[static_cast<std::size_t>(t.var)].name, t.coef);
        std::sort(terms.begin(), terms.end());
        std::ostringstream s;
        s << static_cast<int>(c.rel) << '|' << c.rhs;
        for (const auto& [n, v] : terms) s << '|' << n << ':' << v;
        return s.str();
    };
    std::map<std::string, std::string> rows;
    for (const MipConstraint& c : big.constraints) rows[c.name] = key(big, c);
    for (const MipConstraint& c : small.constraints) {
        auto it = rows.find(c.name);
        if (it == rows.end() || it->second != key(small, c)) return false;
    }
    return true;
}

void criterion3(const std::vector<HeurSample>& samples) {
    int grew = 0;
    int stuck = 0;
    int not_nested = 0;
    for (const HeurSample& s : samples) {
        MipModel models[2] = {
            build_ls(s.inst, s.heur.solution, LsMode::LS1, ObjectiveMode::Stations),
            build_ls(s.inst, s.heur.solution, LsMode::LS2, ObjectiveMode::Stations)};
        if (!same_rows(models[0], models[1])) ++not_nested;
        for (MipModel& m : models) {
            const EnumResult res = enumerate_best(m);
            if (!res.feasible) {
                ++stuck;
                continue;
            }
            const LineSolution line = decode_solution(s.inst, m, to_solver_solution(m, res));
            if (line.station_count() > s.heur.solution.station_count()) ++grew;
        }
    }
    std::snprintf(detail_buf, sizeof detail_buf,
                  "restricted re-optimization on 200 heuristic lines: %d grew, "
                  "%d lost the start line, %d wider models missing narrow rows",
                  grew, stuck, not_nested);
    report(3, grew == 0 && stuck == 0 && not_nested == 0, detail_buf);
}

// ---- 4: the hierarchical search keeps the station optimum -----------------

void criterion4() {
    Rng rng(404);
    int done = 0;
    int station_drift = 0;
    int idle_worse = 0;
    int unsolved = 0;
    while (done < 100) {
        const int n = 2 + static_cast<int>(uniform_int(rng, 0, 5));
        const int w = 1 + static_cast<int>(uniform_int(rng, 0, 1));
        if (w > n) continue;
        const Instance inst = testutil::random_instance(rng, n, w);
        long long total = 0;
        for (int i = 0; i < n; ++i) total += inst.time(i);
        if (total < inst.cycle_time()) continue;
        const OracleResult plain = exact_alwibp1(inst);
        if (!plain.feasible || !plain.proven || !plain.solution) continue;
        const OracleResult smin = exact_smin(inst);
        if (!smin.feasible || !smin.proven || !smin.solution) {
            ++unsolved;
            ++done;
            continue;
        }
        if (smin.stations != plain.stations) ++station_drift;
        if (smin.worker_idle > line_worker_idle(inst, *plain.solution)) ++idle_worse;
        ++done;
    }
    std::snprintf(detail_buf, sizeof detail_buf,
                  "idle-minimizing search on 100 solvable instances: %d changed the "
                  "station count, %d exceeded the plain line's idle, %d unsolved",
                  station_drift, idle_worse, unsolved);
    report(4, station_drift == 0 && idle_worse == 0 && unsolved == 0, detail_buf);
}

// ---- 5: generated worker profiles hit the configured mark rate ------------

void criterion5() {
    Rng rng(505);
    std::vector<long long> times;
    for (int i = 0; i < 500; ++i) times.push_back(uniform_int(rng, 50, 500));
    const Instance base = Instance::create("ratebase", times, {}, {}, 1000);
    double worst = 0.0;
    long long out_of_range = 0;
    long long fewest = 1 << 30;
    for (const GenConfig& cfg : default_grid(7)) {
        long long pairs = 0;
        long long marks = 0;
        const long long k = variability_factor(cfg.variability);
        for (int call = 0; pairs < 100000; ++call) {
            GenConfig c = cfg;
            c.seed = 1000 + static_cast<std::uint64_t>(call);
            for (const WorkerProfile& wp : derive_workers(base, c))
                for (int i = 0; i < base.task_count(); ++i) {
                    ++pairs;
                    const long long t = wp.times[static_cast<std::size_t>(i)];
                    if (t == -1) {
                        ++marks;
                    } else if (t < base.time(i) || t > k * base.time(i)) {
                        ++out_of_range;
                    }
                }
        }
        fewest = std::min(fewest, pairs);
        const double rate = static_cast<double>(marks) / static_cast<double>(pairs);
        worst = std::max(worst, std::abs(rate - cfg.incompat_rate));
    }
    std::snprintf(detail_buf, sizeof detail_buf,
                  "mark rate over >=%lld pairs per grid cell: worst deviation %.4f "
                  "(limit 0.01), %lld values outside the drawing range",
                  fewest, worst, out_of_range);
    report(5, worst <= 0.01 && out_of_range == 0, detail_buf);
}

// ---- 6: the heuristic stays fast on a thousand-task line ------------------

void criterion6() {
    const Instance base = synthetic_base(1000, 77, 1000);
    const Instance inst =
        with_workers(base, derive_workers(base, {4, Variability::Low, 0.10, 77}), "big1000");
    const auto t0 = Clock::now();
    bool feasible = false;
    int stations = 0;
    try {
        const CihResult res = run_best_of_four(inst);
        feasible = is_feasible(inst, res.solution);
        stations = res.solution.station_count();
    } catch (const std::exception&) {
    }
    const double dt = seconds_since(t0);
    std::snprintf(detail_buf, sizeof detail_buf,
                  "1000 tasks, 4 workers, cycle 1000: %s line with %d stations in "
                  "%.1fs (limit 300s)",
                  feasible ? "feasible" : "no", stations, dt);
    report(6, feasible && dt < 300.0, detail_buf);
}

// ---- 7: repeated runs write identical artifacts ---------------------------

int run_cli(const std::string& args, const fs::path& dir) {
    const std::string cmd = "cd " + dir.string() + " && " + std::string(ALWIBP_CLI_PATH) + " " +
                            args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion7() {
    const fs::path dir = fs::temp_directory_path() / "alwibp_accept7";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "t1w.txt", std::ios::binary);
        save_instance(testutil::t1_worker(), f);
    }
    int bad_exit = 0;
    int differing = 0;
    std::string first_sol;
    std::map<std::string, std::string> first_suite;
    for (int run = 0; run < 5; ++run) {
        const std::string tag = std::to_string(run);
        if (run_cli("solve --instance t1w.txt --method cih-ls2 --out sol" + tag + ".txt", dir))
            ++bad_exit;
        if (run_cli("generate --out suite" + tag + " --synthetic 6 --seed 3", dir)) ++bad_exit;
        const std::string sol = read_bytes(dir / ("sol" + tag + ".txt"));
        std::map<std::string, std::string> suite;
        for (const auto& entry : fs::directory_iterator(dir / ("suite" + tag)))
            suite[entry.path().filename().string()] = read_bytes(entry.path());
        if (run == 0) {
            first_sol = sol;
            first_suite = std::move(suite);
            if (first_sol.empty() || first_suite.size() != 17) ++differing;
        } else {
            if (sol != first_sol) ++differing;
            if (suite != first_suite) ++differing;
        }
    }
    fs::remove_all(dir);
    std::snprintf(detail_buf, sizeof detail_buf,
                  "five runs of solve and generate: %d nonzero exits, %d artifact "
                  "sets differing from the first run",
                  bad_exit, differing);
    report(7, bad_exit == 0 && differing == 0, detail_buf);
}

// ---- 8: exported models, enumerated assignments and the checker agree -----

void criterion8() {
    Rng rng(808);
    int done = 0;
    int empty_lp = 0;
    int violated = 0;
    int off_objective = 0;
    while (done < 20) {
        const Instance inst = testutil::random_sized(rng, 7, 2);
        const OracleResult exact = exact_alwibp1(inst);
        if (!exact.feasible || !exact.proven) continue;
        const bool smin = inst.worker_count() > 0 && done % 2 == 1;
        const MipModel model = smin ? build_smin(inst, exact.stations)
                                    : build_alwibp1(inst, exact.stations);
        if (emit_lp(model).find("Minimize") != 0) ++empty_lp;
        const EnumResult res = enumerate_best(model);
        if (!res.feasible) {
            ++violated;
            ++done;
            continue;
        }
        const SolverSolution sol = to_solver_solution(model, res);
        const CheckReport rep = check_solution(model, sol);
        if (!rep.violations.empty()) ++violated;
        if (!sol.objective || std::abs(rep.objective - *sol.objective) > 1e-6)
            ++off_objective;
        ++done;
    }
    std::snprintf(detail_buf, sizeof detail_buf,
                  "20 exported models re-checked: %d malformed exports, %d checker "
                  "violations, %d objectives off by more than 1e-6",
                  empty_lp, violated, off_objective);
    report(8, empty_lp == 0 && violated == 0 && off_objective == 0, detail_buf);
}

}  // namespace

int main() {
    criterion1();
    const std::vector<HeurSample> samples = collect_samples();
    criterion2(samples);
    criterion3(samples);
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    return failures;
}
