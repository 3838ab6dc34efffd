#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "alwibp/instance.hpp"
#include "alwibp/solution.hpp"

namespace alwibp {

// One solved instance. The config fields (workers/variability/incompat) come
// from the generator manifest and key the aggregation; tau/eta are absent
// for worker-free runs and eta additionally when no station is purely
// conventional.
struct RunRecord {
    std::string instance;
    std::string method;
    int workers = 0;
    std::string variability;  // "low" / "high" / "" when not from the suite
    int incompat = 0;         // percent
    int stations = 0;
    int salbp_m = 0;
    bool proven = false;  // solved to optimality
    double seconds = 0.0;
    int m_up = 0;
    double m_up_pct = 0.0;
    std::optional<double> tau;
    std::optional<double> eta_pct;
    double beta_pct = 0.0;
    bool theta = false;
    bool ties = false;  // heuristic matched the exact station count
};

// Per-instance quality figures of a feasible line against the station count
// the conventional-only relaxation needs.
inline RunRecord compute_metrics(const Instance& inst, const LineSolution& sol, int salbp_m) {
    if (salbp_m < 1) throw std::invalid_argument("reference station count must be at least 1");
    {
        auto issues = validate(inst, sol);
        if (!issues.empty())
            throw ValidationError("metrics need a feasible solution: " + issues.front().rule +
                                  " " + issues.front().detail);
    }
    RunRecord r;
    r.instance = inst.name();
    r.workers = inst.worker_count();
    r.stations = sol.station_count();
    r.salbp_m = salbp_m;
    r.m_up = r.stations - salbp_m;
    r.m_up_pct = 100.0 * static_cast<double>(r.m_up) / static_cast<double>(salbp_m);
    r.theta = r.m_up == 0;
    if (inst.worker_count() > 0) {
        double idle = 0.0;
        double worker_tasks = 0.0;
        double conv_tasks = 0.0;
        int conv_stations = 0;
        for (int s = 0; s < sol.station_count(); ++s) {
            const Station& st = sol.stations[static_cast<std::size_t>(s)];
            if (st.worker >= 0) {
                idle += static_cast<double>(inst.cycle_time() - station_load(inst, st));
                worker_tasks += static_cast<double>(st.tasks.size());
            } else {
                conv_tasks += static_cast<double>(st.tasks.size());
                ++conv_stations;
            }
        }
        r.tau = idle / inst.worker_count();
        if (conv_stations > 0) {
            const double mean_worker = worker_tasks / inst.worker_count();
            const double mean_conv = conv_tasks / conv_stations;
            if (mean_conv > 0.0) r.eta_pct = 100.0 * mean_worker / mean_conv;
        }
        r.beta_pct = 100.0 * static_cast<double>(inst.worker_count()) /
                     static_cast<double>(r.stations);
    }
    return r;
}

struct AggregateRow {
    int workers = 0;
    std::string variability;
    int incompat = 0;
    int delta = 0;  // records solved to optimality
    double seconds_mean = 0.0;
    double m_up_mean = 0.0;
    double m_up_sd = 0.0;
    double m_up_pct_mean = 0.0;
    double m_up_pct_sd = 0.0;
    std::optional<double> tau;
    std::optional<double> tau_smin;
    std::optional<double> eta_pct;
    std::optional<double> eta_smin_pct;
    double beta_pct_mean = 0.0;
    double beta_pct_sd = 0.0;
    int theta = 0;
    int ties = 0;
    int count = 0;  // primary records in the cell
};

struct AggregateTable {
    std::vector<AggregateRow> rows;
    std::vector<std::string> warnings;
};

namespace detail {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

// sample standard deviation (n-1); a single observation reports 0
inline MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    double sum = 0.0;
    for (double x : xs) sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double acc = 0.0;
        for (double x : xs) acc += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(acc / static_cast<double>(xs.size() - 1));
    }
    return out;
}

inline bool smin_method(const std::string& method) {
    return method.find("smin") != std::string::npos;
}

}  // namespace detail

// Cells keyed (workers, variability, incompat). Records of smin methods feed
// only the tau_smin/eta_smin_pct columns; everything else summarizes the
// plain records. Cells with no plain records are dropped with a warning.
inline AggregateTable aggregate(const std::vector<RunRecord>& records) {
    using Key = std::tuple<int, std::string, int>;
    std::map<Key, std::vector<const RunRecord*>> plain, smin;
    for (const RunRecord& r : records) {
        Key key{r.workers, r.variability, r.incompat};
        (detail::smin_method(r.method) ? smin : plain)[key].push_back(&r);
    }
    AggregateTable table;
    std::map<Key, bool> keys;
    for (const auto& [k, v] : plain) keys[k] = true;
    for (const auto& [k, v] : smin) keys.emplace(k, false);
    for (const auto& [key, has_plain] : keys) {
        const auto& [w, var, inc] = key;
        if (!has_plain) {
            table.warnings.push_back("cell w=" + std::to_string(w) + " var=" + var +
                                     " inc=" + std::to_string(inc) +
                                     " has only smin records, row omitted");
            continue;
        }
        const auto& cell = plain[key];
        AggregateRow row;
        row.workers = w;
        row.variability = var;
        row.incompat = inc;
        row.count = static_cast<int>(cell.size());
        std::vector<double> mups, mup_pcts, betas, taus, etas, secs;
        for (const RunRecord* r : cell) {
            mups.push_back(static_cast<double>(r->m_up));
            mup_pcts.push_back(r->m_up_pct);
            betas.push_back(r->beta_pct);
            secs.push_back(r->seconds);
            if (r->tau) taus.push_back(*r->tau);
            if (r->eta_pct) etas.push_back(*r->eta_pct);
            if (r->proven) ++row.delta;
            if (r->theta) ++row.theta;
            if (r->ties) ++row.ties;
        }
        auto ms = detail::mean_sd(mups);
        row.m_up_mean = ms.mean;
        row.m_up_sd = ms.sd;
        ms = detail::mean_sd(mup_pcts);
        row.m_up_pct_mean = ms.mean;
        row.m_up_pct_sd = ms.sd;
        ms = detail::mean_sd(betas);
        row.beta_pct_mean = ms.mean;
        row.beta_pct_sd = ms.sd;
        row.seconds_mean = detail::mean_sd(secs).mean;
        if (!taus.empty()) row.tau = detail::mean_sd(taus).mean;
        if (!etas.empty()) row.eta_pct = detail::mean_sd(etas).mean;
        if (auto it = smin.find(key); it != smin.end()) {
            std::vector<double> staus, setas;
            for (const RunRecord* r : it->second) {
                if (r->tau) staus.push_back(*r->tau);
                if (r->eta_pct) setas.push_back(*r->eta_pct);
            }
            if (!staus.empty()) row.tau_smin = detail::mean_sd(staus).mean;
            if (!setas.empty()) row.eta_smin_pct = detail::mean_sd(setas).mean;
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

namespace detail {

inline std::string one_decimal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

inline std::string opt_one_decimal(const std::optional<double>& v) {
    return v ? one_decimal(*v) : std::string();
}

}  // namespace detail

inline const char* aggregate_csv_header() {
    return "W,Var,Inc,Delta,t_s,m_up_mean,m_up_sd,m_up_pct_mean,m_up_pct_sd,tau,tau_smin,"
           "eta_pct,eta_smin_pct,beta_pct_mean,beta_pct_sd,theta,ties";
}

inline void write_aggregate_csv(const AggregateTable& table, std::ostream& out) {
    out << aggregate_csv_header() << "\n";
    for (const AggregateRow& r : table.rows) {
        out << r.workers << ',' << r.variability << ',' << r.incompat << ',' << r.delta << ','
            << detail::one_decimal(r.seconds_mean) << ',' << detail::one_decimal(r.m_up_mean)
            << ',' << detail::one_decimal(r.m_up_sd) << ','
            << detail::one_decimal(r.m_up_pct_mean) << ',' << detail::one_decimal(r.m_up_pct_sd)
            << ',' << detail::opt_one_decimal(r.tau) << ',' << detail::opt_one_decimal(r.tau_smin)
            << ',' << detail::opt_one_decimal(r.eta_pct) << ','
            << detail::opt_one_decimal(r.eta_smin_pct) << ','
            << detail::one_decimal(r.beta_pct_mean) << ',' << detail::one_decimal(r.beta_pct_sd)
            << ',' << r.theta << ',' << r.ties << "\n";
    }
}

inline const char* record_csv_header() {
    return "instance,method,W,Var,Inc,m,salbp_m,proven,t_s,m_up,m_up_pct,tau,eta_pct,beta_pct,"
           "theta,ties";
}

inline void write_record_csv(const std::vector<RunRecord>& records, std::ostream& out) {
    out << record_csv_header() << "\n";
    for (const RunRecord& r : records) {
        out << r.instance << ',' << r.method << ',' << r.workers << ',' << r.variability << ','
            << r.incompat << ',' << r.stations << ',' << r.salbp_m << ',' << (r.proven ? 1 : 0)
            << ',' << detail::one_decimal(r.seconds) << ',' << r.m_up << ','
            << detail::one_decimal(r.m_up_pct) << ',' << detail::opt_one_decimal(r.tau) << ','
            << detail::opt_one_decimal(r.eta_pct) << ',' << detail::one_decimal(r.beta_pct) << ','
            << (r.theta ? 1 : 0) << ',' << (r.ties ? 1 : 0) << "\n";
    }
}

// Fixed-width rendering of the aggregate table; absent cells show "-".
inline void write_aggregate_text(const AggregateTable& table, std::ostream& out) {
    static const char* headers[] = {"W",       "Var",      "Inc",      "Delta",   "t_s",
                                    "m_up",    "sd",       "m_up%",    "sd",      "tau",
                                    "tau_smin", "eta%",    "eta_smin%", "beta%",  "sd",
                                    "theta",   "ties"};
    constexpr int ncol = 17;
    std::vector<std::vector<std::string>> cells;
    for (const AggregateRow& r : table.rows) {
        auto dash = [](std::string s) { return s.empty() ? std::string("-") : s; };
        cells.push_back({std::to_string(r.workers), r.variability, std::to_string(r.incompat),
                         std::to_string(r.delta), detail::one_decimal(r.seconds_mean),
                         detail::one_decimal(r.m_up_mean), detail::one_decimal(r.m_up_sd),
                         detail::one_decimal(r.m_up_pct_mean), detail::one_decimal(r.m_up_pct_sd),
                         dash(detail::opt_one_decimal(r.tau)),
                         dash(detail::opt_one_decimal(r.tau_smin)),
                         dash(detail::opt_one_decimal(r.eta_pct)),
                         dash(detail::opt_one_decimal(r.eta_smin_pct)),
                         detail::one_decimal(r.beta_pct_mean), detail::one_decimal(r.beta_pct_sd),
                         std::to_string(r.theta), std::to_string(r.ties)});
    }
    std::size_t width[ncol];
    for (int c = 0; c < ncol; ++c) {
        width[c] = std::string(headers[c]).size();
        for (const auto& row : cells) width[c] = std::max(width[c], row[static_cast<std::size_t>(c)].size());
    }
    auto pad = [&](const std::string& s, int c) {
        std::string p(width[c] - s.size(), ' ');
        return c == 1 ? s + p : p + s;  // variability column is left-aligned
    };
    for (int c = 0; c < ncol; ++c) out << (c ? "  " : "") << pad(headers[c], c);
    out << "\n";
    for (const auto& row : cells) {
        for (int c = 0; c < ncol; ++c) out << (c ? "  " : "") << pad(row[static_cast<std::size_t>(c)], c);
        out << "\n";
    }
    for (const std::string& w : table.warnings) out << "# " << w << "\n";
}

}  // namespace alwibp
