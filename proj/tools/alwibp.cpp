#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "alwibp/benchgen.hpp"
#include "alwibp/cih.hpp"
#include "alwibp/instance.hpp"
#include "alwibp/mip.hpp"
#include "alwibp/mip_solve.hpp"
#include "alwibp/oracle.hpp"
#include "alwibp/report.hpp"
#include "alwibp/solution.hpp"

namespace fs = std::filesystem;
using namespace alwibp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

int thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("ALWIBP_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, hw));
    }
    return static_cast<int>(hw);
}

ReferenceMode ref_mode(const std::string& s) {
    if (s == "heuristic") return ReferenceMode::Heuristic;
    if (s == "oracle") return ReferenceMode::Oracle;
    return ReferenceMode::Auto;
}

// What one method produced for one instance.
struct Outcome {
    enum Kind { Solved, Infeasible, Exported } kind = Infeasible;
    LineSolution solution;
    bool proven = false;  // solution is an exact optimum of its model
    int salbp_m = 0;
    bool ref_oracle = false;
    std::string message;
};

struct MethodSpec {
    std::string name;  // the --method value
    bool ls1 = false;
    bool ls2 = false;
    bool oracle = false;
    bool smin = false;
};

MethodSpec parse_method(const std::string& m, const std::string& objective) {
    MethodSpec spec;
    spec.name = m;
    spec.ls1 = m == "cih-ls1";
    spec.ls2 = m == "cih-ls2";
    spec.oracle = m == "oracle";
    spec.smin = objective == "smin";
    if (spec.smin && m != "cih") spec.name += "-smin";
    return spec;
}

CihResult run_heuristic(const Instance& inst, const std::string& variant, ReferenceMode mode) {
    if (variant == "auto") return run_best_of_four(inst, mode);
    const PrecedenceClosure pc = PrecedenceClosure::build(inst);
    const ReferenceChoice ref = reference_salbp1(inst, pc, mode);
    CihResult res = run_cih(inst, pc, ref.solution,
                            variant == "backward" ? CihVariant::Backward : CihVariant::Forward,
                            ref.rule);
    res.reference_from_oracle = ref.from_oracle;
    return res;
}

// Post-optimizes a heuristic line through the restricted model. Small models
// are solved in-process; larger ones are exported as LP next to lp_path and
// left for an external solver.
Outcome post_optimize(const Instance& inst, const CihResult& start, bool ls2, bool smin,
                      double time_limit, long long ls_threshold, const fs::path& lp_path) {
    Outcome out;
    out.salbp_m = start.reference_stations;
    out.ref_oracle = start.reference_from_oracle;
    const int S = start.solution.station_count();
    const long long size = static_cast<long long>(inst.task_count() + 1) * S;
    MipModel model = build_ls(inst, start.solution, ls2 ? LsMode::LS2 : LsMode::LS1,
                              smin ? ObjectiveMode::Smin : ObjectiveMode::Stations);
    if (size > ls_threshold) {
        std::ofstream f(lp_path, std::ios::binary);
        if (!f) throw ParseError("cannot write " + lp_path.string());
        f << emit_lp(model);
        out.kind = Outcome::Exported;
        out.solution = start.solution;
        out.message = "model exported to " + lp_path.string() + ", external solve required";
        return out;
    }
    EnumLimits lim;
    lim.max_seconds = time_limit;
    EnumResult res = enumerate_best(model, lim);
    const SolverSolution start_enc = encode_solution(model, inst, start.solution);
    out.kind = Outcome::Solved;
    if (res.feasible &&
        (!start_enc.objective || res.objective < *start_enc.objective + kSolutionTolerance)) {
        out.solution = decode_solution(inst, model, to_solver_solution(model, res));
        out.proven = res.proven;
    } else {
        out.solution = start.solution;  // truncated search lost to the start line
        out.proven = false;
    }
    return out;
}

Outcome run_method(const Instance& inst, const MethodSpec& spec, const std::string& variant,
                   ReferenceMode mode, double time_limit, long long ls_threshold,
                   const fs::path& lp_path) {
    Outcome out;
    if (spec.oracle) {
        SearchLimits lim;
        lim.max_seconds = time_limit;
        OracleResult res = spec.smin ? exact_smin(inst, lim) : exact_alwibp1(inst, lim);
        if (!res.feasible || !res.solution) {
            out.kind = Outcome::Infeasible;
            out.message = res.proven ? "instance is infeasible"
                                     : "search limit reached without a solution";
            return out;
        }
        out.kind = Outcome::Solved;
        out.solution = *res.solution;
        out.proven = res.proven;
        const PrecedenceClosure pc = PrecedenceClosure::build(inst);
        const ReferenceChoice ref = reference_salbp1(inst, pc, mode);
        out.salbp_m = ref.solution.station_count();
        out.ref_oracle = ref.from_oracle;
        return out;
    }
    CihResult heur = run_heuristic(inst, variant, mode);
    if (spec.ls1 || spec.ls2)
        return post_optimize(inst, heur, spec.ls2, spec.smin, time_limit, ls_threshold, lp_path);
    out.kind = Outcome::Solved;
    out.solution = std::move(heur.solution);
    out.salbp_m = heur.reference_stations;
    out.ref_oracle = heur.reference_from_oracle;
    return out;
}

RunRecord make_record(const Instance& inst, const Outcome& out, const std::string& method,
                      double seconds) {
    RunRecord r = compute_metrics(inst, out.solution, out.salbp_m);
    r.method = method;
    r.proven = out.proven;
    r.seconds = seconds;
    return r;
}

int cmd_solve(const std::string& instance_path, const std::string& method,
              const std::string& variant, const std::string& objective,
              const std::string& salbp_ref, double time_limit, long long ls_threshold,
              const std::string& out_path) {
    if (method == "cih" && objective == "smin") {
        std::cerr << "alwibp: method cih cannot target the smin objective; use cih-ls1, "
                     "cih-ls2, or oracle\n";
        return kExitUsage;
    }
    const Instance inst = load_instance(instance_path);
    const MethodSpec spec = parse_method(method, objective);
    fs::path lp_path = out_path.empty() ? fs::path(instance_path).replace_extension(".lp")
                                        : fs::path(out_path).replace_extension(".lp");
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out = run_method(inst, spec, variant, ref_mode(salbp_ref), time_limit, ls_threshold,
                             lp_path);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out.kind == Outcome::Infeasible) {
        std::cerr << "alwibp: " << out.message << "\n";
        return kExitFail;
    }
    if (out.kind == Outcome::Exported) {
        std::cout << out.message << "\n";
        return kExitOk;
    }
    const RunRecord rec = make_record(inst, out, spec.name, secs);
    std::ostringstream metrics;
    write_record_csv({rec}, metrics);
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ParseError("cannot write " + out_path);
        save_solution(inst, out.solution, f);
        std::cout << metrics.str();
    } else {
        save_solution(inst, out.solution, std::cout);
        std::istringstream lines(metrics.str());
        for (std::string line; std::getline(lines, line);) std::cout << "# " << line << "\n";
    }
    return kExitOk;
}

// Station bound for the full models: an explicit override, otherwise the
// heuristic line's station count (a valid upper bound on the optimum).
int model_stations(const Instance& inst, int stations_flag) {
    if (stations_flag > 0) return stations_flag;
    return run_best_of_four(inst).solution.station_count();
}

int cmd_export_lp(const std::string& instance_path, const std::string& objective,
                  int stations_flag, const std::string& out_path) {
    const Instance inst = load_instance(instance_path);
    const int S = model_stations(inst, stations_flag);
    const MipModel model =
        objective == "smin" ? build_smin(inst, S) : build_alwibp1(inst, S);
    const std::string text = emit_lp(model);
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ParseError("cannot write " + out_path);
        f << text;
    }
    return kExitOk;
}

int cmd_import_solution(const std::string& instance_path, const std::string& solution_path,
                        const std::string& objective, int stations_flag,
                        const std::string& out_path) {
    const Instance inst = load_instance(instance_path);
    const int S = model_stations(inst, stations_flag);
    const MipModel model =
        objective == "smin" ? build_smin(inst, S) : build_alwibp1(inst, S);
    const SolverSolution sol = load_solver_solution(solution_path);
    const CheckReport report = check_solution(model, sol);
    for (const CheckIssue& issue : report.violations)
        std::cout << issue.constraint << " violated by " << issue.violation << "\n";
    if (!report.objective_matches)
        std::cout << "objective mismatch: computed " << report.objective << "\n";
    if (!report.ok()) return kExitFail;
    std::cout << "solution consistent, objective " << report.objective << "\n";
    if (!out_path.empty()) {
        const LineSolution line = decode_solution(inst, model, sol);
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ParseError("cannot write " + out_path);
        save_solution(inst, line, f);
    }
    return kExitOk;
}

int cmd_check(const std::string& instance_path, const std::string& solution_path) {
    const Instance inst = load_instance(instance_path);
    const LineSolution sol = load_solution(inst, solution_path);
    const auto issues = validate(inst, sol);
    for (const Violation& v : issues) std::cout << v.rule << " " << v.detail << "\n";
    if (!issues.empty()) return kExitFail;
    std::cout << "ok m=" << sol.station_count() << "\n";
    return kExitOk;
}

int cmd_generate(const std::string& out_dir, const std::string& bases_dir,
                 const std::vector<int>& synthetic_sizes, std::uint64_t seed, long long cycle) {
    Manifest manifest;
    if (!bases_dir.empty()) {
        manifest = generate_suite(fs::path(bases_dir), default_grid(seed), out_dir, cycle);
    } else {
        std::vector<Instance> bases;
        for (std::size_t i = 0; i < synthetic_sizes.size(); ++i)
            bases.push_back(synthetic_base(synthetic_sizes[i], seed + i, cycle));
        manifest = generate_suite(bases, default_grid(seed), out_dir, cycle);
    }
    std::cout << "generated " << manifest.entries.size() << " instances into " << out_dir
              << "\n";
    return kExitOk;
}

int cmd_bench(const std::string& dir, std::vector<std::string> methods,
              const std::string& variant, const std::string& objective,
              const std::string& salbp_ref, double time_limit, long long ls_threshold,
              std::string out_path) {
    if (methods.empty()) methods.push_back("cih");
    const fs::path suite(dir);
    const Manifest manifest = load_manifest(suite / "manifest.txt");
    if (manifest.entries.empty()) {
        std::cerr << "alwibp: empty manifest\n";
        return kExitFail;
    }

    // each listed method runs with the plain objective; under --objective
    // smin the oracle/LS methods run a second time on the smin model so both
    // column families of the report are filled
    std::vector<MethodSpec> specs;
    for (const std::string& m : methods) {
        specs.push_back(parse_method(m, "stations"));
        if (objective == "smin" && m != "cih") specs.push_back(parse_method(m, "smin"));
    }

    std::vector<std::vector<RunRecord>> per_entry(manifest.entries.size());
    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    std::mutex log_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= manifest.entries.size()) return;
            const ManifestEntry& entry = manifest.entries[idx];
            try {
                const Instance inst = load_instance(suite / entry.file);
                std::vector<RunRecord> recs;
                std::optional<int> exact_m;
                for (const MethodSpec& spec : specs) {
                    const auto t0 = std::chrono::steady_clock::now();
                    Outcome out =
                        run_method(inst, spec, variant, ref_mode(salbp_ref), time_limit,
                                   ls_threshold, suite / (entry.file + "." + spec.name + ".lp"));
                    const double secs =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
                    if (out.kind != Outcome::Solved) {
                        std::lock_guard<std::mutex> lock(log_mutex);
                        std::cerr << entry.file << " " << spec.name << ": " << out.message
                                  << "\n";
                        continue;
                    }
                    RunRecord rec = make_record(inst, out, spec.name, secs);
                    rec.workers = entry.config.worker_count;
                    rec.variability = variability_name(entry.config.variability);
                    rec.incompat = incompat_percent(entry.config);
                    if (spec.oracle && !spec.smin && out.proven)
                        exact_m = out.solution.station_count();
                    recs.push_back(std::move(rec));
                }
                if (exact_m)
                    for (RunRecord& rec : recs)
                        if (rec.method.rfind("cih", 0) == 0) rec.ties = rec.stations == *exact_m;
                per_entry[idx] = std::move(recs);
            } catch (const std::exception& e) {
                failures.fetch_add(1);
                std::lock_guard<std::mutex> lock(log_mutex);
                std::cerr << entry.file << ": " << e.what() << "\n";
            }
        }
    };
    const int pool = std::max(1, std::min<int>(thread_budget(),
                                               static_cast<int>(manifest.entries.size())));
    std::vector<std::thread> threads;
    for (int i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();

    std::vector<RunRecord> records;
    for (auto& recs : per_entry)
        for (RunRecord& r : recs) records.push_back(std::move(r));
    if (records.empty()) {
        std::cerr << "alwibp: no instance produced a record\n";
        return kExitFail;
    }
    if (out_path.empty()) out_path = (suite / "records.csv").string();
    {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ParseError("cannot write " + out_path);
        write_record_csv(records, f);
    }
    const AggregateTable table = aggregate(records);
    {
        const fs::path agg = fs::path(out_path).replace_extension(".aggregate.csv");
        std::ofstream f(agg, std::ios::binary);
        if (!f) throw ParseError("cannot write " + agg.string());
        write_aggregate_csv(table, f);
    }
    write_aggregate_text(table, std::cout);
    std::cout << records.size() << " records -> " << out_path << "\n";
    return failures.load() == 0 ? kExitOk : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"assembly line balancing with worker integration"};
    app.require_subcommand(1);

    std::string instance_path, solution_path, out_path, bases_dir, suite_dir;
    std::string method = "cih", variant = "auto", objective = "stations", salbp_ref = "auto";
    std::vector<std::string> bench_methods;
    std::vector<int> synthetic_sizes{20, 50};
    double time_limit = 60.0;
    long long ls_threshold = 400;
    int stations_flag = 0;
    std::uint64_t seed = 1;
    long long cycle = 1000;

    const auto method_check = CLI::IsMember({"cih", "cih-ls1", "cih-ls2", "oracle"});
    const auto variant_check = CLI::IsMember({"forward", "backward", "auto"});
    const auto objective_check = CLI::IsMember({"stations", "smin"});
    const auto ref_check = CLI::IsMember({"auto", "heuristic", "oracle"});

    CLI::App* solve = app.add_subcommand("solve", "solve one instance and write the line");
    solve->add_option("--instance", instance_path, "instance file")->required();
    solve->add_option("--method", method, "solution method")->check(method_check);
    solve->add_option("--variant", variant, "insertion direction")->check(variant_check);
    solve->add_option("--objective", objective, "objective function")->check(objective_check);
    solve->add_option("--salbp-ref", salbp_ref, "reference line source")->check(ref_check);
    solve->add_option("--time-limit", time_limit, "seconds for exact searches");
    solve->add_option("--ls-threshold", ls_threshold,
                      "largest (tasks+1)*stations solved in-process");
    solve->add_option("--out", out_path, "solution file (default: stdout)");

    CLI::App* exp = app.add_subcommand("export-lp", "write a model as an LP file");
    exp->add_option("--instance", instance_path, "instance file")->required();
    exp->add_option("--objective", objective, "objective function")->check(objective_check);
    exp->add_option("--stations", stations_flag, "station bound (default: heuristic)");
    exp->add_option("--out", out_path, "LP file (default: stdout)");

    CLI::App* imp = app.add_subcommand("import-solution", "check an external solver solution");
    imp->add_option("--instance", instance_path, "instance file")->required();
    imp->add_option("--solution", solution_path, "solver variable listing")->required();
    imp->add_option("--objective", objective, "objective function")->check(objective_check);
    imp->add_option("--stations", stations_flag, "station bound (default: heuristic)");
    imp->add_option("--out", out_path, "write the decoded line solution here");

    CLI::App* gen = app.add_subcommand("generate", "derive a benchmark suite with workers");
    gen->add_option("--out", out_path, "output directory")->required();
    gen->add_option("--bases", bases_dir, "directory of base instances (.alb or .txt)");
    gen->add_option("--synthetic", synthetic_sizes,
                    "synthetic base sizes when no --bases given");
    gen->add_option("--seed", seed, "suite seed");
    gen->add_option("--cycle", cycle, "cycle time forced on every base");

    CLI::App* bench = app.add_subcommand("bench", "run methods over a generated suite");
    bench->add_option("--dir", suite_dir, "suite directory with manifest.txt")->required();
    bench->add_option("--method", bench_methods, "methods to run (repeatable)")
        ->check(method_check);
    bench->add_option("--variant", variant, "insertion direction")->check(variant_check);
    bench->add_option("--objective", objective,
                      "stations, or smin to add hierarchical runs")
        ->check(objective_check);
    bench->add_option("--salbp-ref", salbp_ref, "reference line source")->check(ref_check);
    bench->add_option("--time-limit", time_limit, "seconds per exact search");
    bench->add_option("--ls-threshold", ls_threshold,
                      "largest (tasks+1)*stations solved in-process");
    bench->add_option("--out", out_path, "records CSV (default: <dir>/records.csv)");

    CLI::App* check = app.add_subcommand("check", "validate a line solution file");
    check->add_option("--instance", instance_path, "instance file")->required();
    check->add_option("--solution", solution_path, "line solution file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed())
            return cmd_solve(instance_path, method, variant, objective, salbp_ref, time_limit,
                             ls_threshold, out_path);
        if (exp->parsed()) return cmd_export_lp(instance_path, objective, stations_flag, out_path);
        if (imp->parsed())
            return cmd_import_solution(instance_path, solution_path, objective, stations_flag,
                                       out_path);
        if (gen->parsed())
            return cmd_generate(out_path, bases_dir, synthetic_sizes, seed, cycle);
        if (bench->parsed())
            return cmd_bench(suite_dir, bench_methods, variant, objective, salbp_ref, time_limit,
                             ls_threshold, out_path);
        if (check->parsed()) return cmd_check(instance_path, solution_path);
    } catch (const std::exception& e) {
        std::cerr << "alwibp: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
