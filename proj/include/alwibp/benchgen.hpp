#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "alwibp/instance.hpp"
#include "alwibp/random.hpp"

namespace alwibp {

enum class Variability { Low, High };

inline const char* variability_name(Variability v) {
    return v == Variability::Low ? "low" : "high";
}

// multiplier on the conventional time for the upper end of worker time draws
inline long long variability_factor(Variability v) {
    return v == Variability::Low ? 2 : 5;
}

struct GenConfig {
    int worker_count = 1;
    Variability variability = Variability::Low;
    double incompat_rate = 0.10;
    std::uint64_t seed = 0;
};

inline int incompat_percent(const GenConfig& cfg) {
    return static_cast<int>(std::llround(cfg.incompat_rate * 100.0));
}

// "w2_low_10" style suffix; doubles as the per-instance stream tag
inline std::string config_tag(const GenConfig& cfg) {
    return "w" + std::to_string(cfg.worker_count) + "_" + variability_name(cfg.variability) + "_" +
           std::to_string(incompat_percent(cfg));
}

// Draws worker_count profiles on top of a worker-free base: each (worker,
// task) pair is first marked infeasible with probability incompat_rate,
// otherwise the time is an integer uniform on [t_i, K*t_i]. A worker left
// without any task that fits the cycle time is redrawn wholesale, at most
// 100 times.
inline std::vector<WorkerProfile> derive_workers(const Instance& base, const GenConfig& cfg) {
    if (base.worker_count() != 0)
        throw std::invalid_argument("worker derivation needs a worker-free base instance");
    if (!(cfg.incompat_rate > 0.0 && cfg.incompat_rate < 1.0))
        throw std::invalid_argument("incompatibility rate must lie strictly between 0 and 1");
    if (cfg.worker_count < 1) throw std::invalid_argument("worker count must be at least 1");
    const int n = base.task_count();
    for (int i = 0; i < n; ++i)
        if (base.time(i) <= 0)
            throw std::invalid_argument("worker derivation needs strictly positive task times");

    Rng rng(mix_seed(cfg.seed, base.name() + "|" + config_tag(cfg)));
    const long long k = variability_factor(cfg.variability);
    std::vector<WorkerProfile> out;
    out.reserve(static_cast<std::size_t>(cfg.worker_count));
    for (int w = 1; w <= cfg.worker_count; ++w) {
        WorkerProfile wp;
        wp.id = w;
        for (int attempt = 0;; ++attempt) {
            if (attempt >= 100)
                throw ValidationError("no feasible worker profile found in 100 attempts for " +
                                      base.name() + " (" + config_tag(cfg) + ")");
            wp.times.clear();
            bool usable = false;
            for (int i = 0; i < n; ++i) {
                if (bernoulli(rng, cfg.incompat_rate)) {
                    wp.times.push_back(-1);
                } else {
                    const long long t = base.time(i);
                    const long long v = uniform_int(rng, t, k * t);
                    wp.times.push_back(v);
                    if (v <= base.cycle_time()) usable = true;
                }
            }
            if (usable) break;
        }
        out.push_back(std::move(wp));
    }
    return out;
}

inline Instance with_workers(const Instance& base, std::vector<WorkerProfile> workers,
                             const std::string& name) {
    return Instance::create(name, base.times(), base.arcs(), std::move(workers),
                            base.cycle_time());
}

inline Instance derive_instance(const Instance& base, const GenConfig& cfg) {
    return with_workers(base, derive_workers(base, cfg), base.name() + "_" + config_tag(cfg));
}

// Worker-free random base: a handful of chains laced with occasional
// bottleneck tasks and sparse cross arcs, times bimodal so stations mix one
// long task with short filler. Total time is topped up to at least one full
// cycle so hierarchical-objective comparisons stay meaningful.
inline Instance synthetic_base(int n, std::uint64_t seed, long long cycle = 1000) {
    if (n < 1) throw std::invalid_argument("synthetic base needs at least one task");
    if (cycle < 1) throw std::invalid_argument("cycle time must be positive");
    Rng rng(mix_seed(seed, "synthbase" + std::to_string(n)));

    std::vector<long long> times(static_cast<std::size_t>(n));
    for (auto& t : times) {
        if (bernoulli(rng, 0.30))
            t = uniform_int(rng, 400, std::min<long long>(900, cycle));
        else
            t = uniform_int(rng, std::min<long long>(20, cycle), std::min<long long>(300, cycle));
    }
    long long total = 0;
    for (long long t : times) total += t;
    while (total < cycle) {
        auto& t = times[static_cast<std::size_t>(uniform_int(rng, 0, n - 1))];
        const long long bump = std::min(cycle - t, uniform_int(rng, 50, 300));
        t += bump;
        total += bump;
    }

    std::vector<std::pair<int, int>> arcs;
    if (n > 1) {
        const int chains = std::max(1, std::min(n / 4, 6));
        for (int i = chains; i < n; ++i) arcs.emplace_back(i - chains, i);  // parallel chains
        for (int i = 0; i < n; ++i) {
            if (i > 2 && bernoulli(rng, 0.08)) {  // bottleneck: fan-in from recent tasks
                const int fan = static_cast<int>(uniform_int(rng, 2, 3));
                for (int f = 1; f <= fan && i - f >= 0; ++f) arcs.emplace_back(i - f, i);
            }
            if (i + 1 < n && bernoulli(rng, 0.10))  // sparse forward cross arc
                arcs.emplace_back(i, static_cast<int>(uniform_int(rng, i + 1, n - 1)));
        }
    }
    return Instance::create("synth" + std::to_string(n) + "_s" + std::to_string(seed),
                            std::move(times), std::move(arcs), {}, cycle);
}

// Reads assembly line precedence files in the common layout: a task count, a
// time per task, then dotted task pairs. Both the tagged variant (section
// headers in angle brackets, id-prefixed times) and the bare legacy variant
// (plain numbers, pair list closed by -1,-1) are accepted. Cycle time is
// taken from the file when present, otherwise the largest task time.
inline Instance parse_alb(std::istream& in, const std::string& origin) {
    detail::LineSource src(in, origin);
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    auto to_ll = [&](const std::string& s, const char* what) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(s, &used);
            if (used != s.size()) src.fail(std::string("bad ") + what + " '" + s + "'");
            return v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            src.fail(std::string("bad ") + what + " '" + s + "'");
        }
    };
    std::string first = trim(src.require("task count"));

    long long n = 0;
    long long cycle = 0;
    std::vector<long long> times;
    std::vector<std::pair<int, int>> arcs;

    auto parse_pair = [&](const std::string& line, long long& i, long long& j) {
        const auto comma = line.find(',');
        if (comma == std::string::npos) return false;
        try {
            i = std::stoll(trim(line.substr(0, comma)));
            j = std::stoll(trim(line.substr(comma + 1)));
        } catch (const std::exception&) {
            return false;
        }
        return true;
    };

    if (!first.empty() && first.front() == '<') {
        std::string section = first;
        std::string line;
        bool done = false;
        while (!done) {
            if (section == "<end>") break;
            if (section == "<number of tasks>") {
                n = to_ll(trim(src.require("task count")), "task count");
                if (n < 1) src.fail("task count must be positive");
                times.assign(static_cast<std::size_t>(n), -1);
            } else if (section == "<cycle time>") {
                cycle = to_ll(trim(src.require("cycle time")), "cycle time");
            } else if (section == "<task times>") {
                if (n == 0) src.fail("task times before task count");
                for (long long k = 0; k < n; ++k) {
                    std::istringstream ls(src.require("task time"));
                    long long id = 0, t = 0;
                    if (!(ls >> id >> t) || id < 1 || id > n) src.fail("bad task time line");
                    times[static_cast<std::size_t>(id - 1)] = t;
                }
            } else if (section == "<precedence relations>") {
                for (;;) {
                    if (!src.next(line)) {
                        done = true;
                        break;
                    }
                    line = trim(line);
                    if (!line.empty() && line.front() == '<') {
                        section = line;
                        break;
                    }
                    long long i = 0, j = 0;
                    if (!parse_pair(line, i, j)) src.fail("bad precedence pair");
                    if (i < 1 || i > n || j < 1 || j > n) src.fail("arc references unknown task");
                    arcs.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
                }
                continue;
            }
            // skip unrecognized sections' content until the next header
            for (;;) {
                if (!src.next(line)) {
                    done = true;
                    break;
                }
                line = trim(line);
                if (!line.empty() && line.front() == '<') {
                    section = line;
                    break;
                }
            }
        }
        for (long long t : times)
            if (t < 0) src.fail("missing task time");
    } else {
        n = to_ll(first, "task count");
        if (n < 1) src.fail("task count must be positive");
        times.reserve(static_cast<std::size_t>(n));
        for (long long k = 0; k < n; ++k)
            times.push_back(to_ll(trim(src.require("task time")), "task time"));
        std::string line;
        while (src.next(line)) {
            long long i = 0, j = 0;
            if (!parse_pair(trim(line), i, j)) src.fail("bad precedence pair");
            if (i == -1 && j == -1) break;
            if (i < 1 || i > n || j < 1 || j > n) src.fail("arc references unknown task");
            arcs.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1));
        }
    }

    if (cycle <= 0)
        for (long long t : times) cycle = std::max(cycle, t);
    std::string name = std::filesystem::path(origin).stem().string();
    if (name.empty()) name = origin;
    try {
        return Instance::create(name, std::move(times), std::move(arcs), {}, cycle);
    } catch (const ValidationError& e) {
        throw ValidationError(origin + ": " + e.what());
    }
}

inline Instance load_alb(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse_alb(in, path.string());
}

struct ManifestEntry {
    std::string file;
    std::string base;
    GenConfig config;
    std::uint64_t checksum = 0;
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

inline std::uint64_t checksum_bytes(std::string_view bytes) { return fnv1a64(bytes); }

inline std::uint64_t checksum_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return checksum_bytes(buf.str());
}

namespace detail {

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace detail

inline void write_manifest(const Manifest& m, std::ostream& out) {
    out << "entries " << m.entries.size() << "\n";
    for (const ManifestEntry& e : m.entries) {
        out << "file " << e.file << "\n";
        out << "base " << e.base << "\n";
        out << "workers " << e.config.worker_count << "\n";
        out << "variability " << variability_name(e.config.variability) << "\n";
        out << "incompat " << incompat_percent(e.config) << "\n";
        out << "seed " << e.config.seed << "\n";
        out << "checksum " << detail::hex64(e.checksum) << "\n";
    }
}

inline Manifest parse_manifest(std::istream& in, const std::string& origin) {
    detail::LineSource src(in, origin);
    auto field = [&](const std::string& key, const std::string& line) {
        if (line.size() < key.size() + 2 || line.compare(0, key.size(), key) != 0 ||
            line[key.size()] != ' ')
            src.fail("expected '" + key + " <value>'");
        return line.substr(key.size() + 1);
    };
    auto to_ull = [&](const std::string& s, int base_radix) {
        try {
            std::size_t used = 0;
            const std::uint64_t v = std::stoull(s, &used, base_radix);
            if (used != s.size()) src.fail("bad number '" + s + "'");
            return v;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            src.fail("bad number '" + s + "'");
        }
    };
    Manifest m;
    const std::uint64_t count = to_ull(field("entries", src.require("entry count")), 10);
    for (std::uint64_t k = 0; k < count; ++k) {
        ManifestEntry e;
        e.file = field("file", src.require("file"));
        e.base = field("base", src.require("base"));
        e.config.worker_count =
            static_cast<int>(to_ull(field("workers", src.require("workers")), 10));
        const std::string var = field("variability", src.require("variability"));
        if (var == "low")
            e.config.variability = Variability::Low;
        else if (var == "high")
            e.config.variability = Variability::High;
        else
            src.fail("unknown variability '" + var + "'");
        e.config.incompat_rate =
            static_cast<double>(to_ull(field("incompat", src.require("incompat")), 10)) / 100.0;
        e.config.seed = to_ull(field("seed", src.require("seed")), 10);
        e.checksum = to_ull(field("checksum", src.require("checksum")), 16);
        m.entries.push_back(std::move(e));
    }
    std::string extra;
    if (src.next(extra)) src.fail("trailing content after last entry");
    return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    return parse_manifest(in, path.string());
}

// Returns the files whose on-disk bytes no longer match the manifest.
inline std::vector<std::string> verify_manifest(const Manifest& m,
                                                const std::filesystem::path& dir) {
    std::vector<std::string> bad;
    for (const ManifestEntry& e : m.entries) {
        const auto p = dir / e.file;
        std::error_code ec;
        if (!std::filesystem::exists(p, ec) || checksum_file(p) != e.checksum)
            bad.push_back(e.file);
    }
    return bad;
}

// Full grid of the benchmark family: 1..4 workers x {low,high} x {10%,20%}.
inline std::vector<GenConfig> default_grid(std::uint64_t seed) {
    std::vector<GenConfig> grid;
    for (int w = 1; w <= 4; ++w)
        for (Variability v : {Variability::Low, Variability::High})
            for (double rate : {0.10, 0.20}) grid.push_back({w, v, rate, seed});
    return grid;
}

// Derives every (base, config) instance, writes the files plus manifest.txt
// into out_dir, and returns the manifest. cycle_override > 0 replaces each
// base's cycle time before derivation (the benchmark family uses 1000).
inline Manifest generate_suite(const std::vector<Instance>& bases,
                               const std::vector<GenConfig>& configs,
                               const std::filesystem::path& out_dir,
                               long long cycle_override = 1000) {
    std::filesystem::create_directories(out_dir);
    Manifest m;
    std::vector<std::string> seen;
    for (const Instance& raw : bases) {
        Instance base = cycle_override > 0 && raw.cycle_time() != cycle_override
                            ? Instance::create(raw.name(), raw.times(), raw.arcs(), {},
                                               cycle_override)
                            : raw;
        for (const GenConfig& cfg : configs) {
            Instance inst = derive_instance(base, cfg);
            const std::string fname = inst.name() + ".txt";
            if (std::find(seen.begin(), seen.end(), fname) != seen.end())
                throw ValidationError("manifest collision on " + fname);
            seen.push_back(fname);
            std::ostringstream buf;
            save_instance(inst, buf);
            const std::string bytes = buf.str();
            std::ofstream out(out_dir / fname, std::ios::binary);
            if (!out) throw ParseError("cannot write " + (out_dir / fname).string());
            out << bytes;
            ManifestEntry e;
            e.file = fname;
            e.base = base.name();
            e.config = cfg;
            e.checksum = checksum_bytes(bytes);
            m.entries.push_back(std::move(e));
        }
    }
    std::ofstream mf(out_dir / "manifest.txt", std::ios::binary);
    if (!mf) throw ParseError("cannot write " + (out_dir / "manifest.txt").string());
    write_manifest(m, mf);
    return m;
}

// Directory flavor: every *.alb is read through the precedence-file reader,
// every *.txt through the native instance reader, in lexicographic order.
inline Manifest generate_suite(const std::filesystem::path& base_dir,
                               const std::vector<GenConfig>& configs,
                               const std::filesystem::path& out_dir,
                               long long cycle_override = 1000) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(base_dir)) {
        if (!entry.is_regular_file()) continue;
        const auto ext = entry.path().extension().string();
        if (ext == ".alb" || ext == ".txt") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<Instance> bases;
    bases.reserve(files.size());
    for (const auto& f : files)
        bases.push_back(f.extension() == ".alb" ? load_alb(f) : load_instance(f));
    return generate_suite(bases, configs, out_dir, cycle_override);
}

}  // namespace alwibp
