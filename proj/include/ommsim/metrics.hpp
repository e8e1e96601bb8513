#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ommsim/config.hpp"
#include "ommsim/errors.hpp"
#include "ommsim/trace.hpp"
#include "ommsim/vehicle.hpp"

namespace ommsim {

enum class MovePattern {
    LeftToRight,
    Random,
};

inline const char* pattern_name(MovePattern p) {
    return p == MovePattern::LeftToRight ? "LR" : "Rand";
}

/// Identity of one simulated scenario: which factorial cell and trial it is.
struct ScenarioDescriptor {
    int cars = 0;
    int obstacles = 0;
    MovePattern pattern = MovePattern::LeftToRight;
    int config_index = 1;
    int trial = 0;
    std::uint64_t seed = 0;

    bool same_cell(const ScenarioDescriptor& other) const {
        return cars == other.cars && obstacles == other.obstacles && pattern == other.pattern &&
               trial == other.trial && seed == other.seed;
    }

    bool operator==(const ScenarioDescriptor&) const = default;
};

/// Result of one scenario run: per-vehicle stats, aggregates, and the full
/// event trace.
struct ScenarioResult {
    ScenarioDescriptor descriptor;
    std::string config_label;
    std::vector<VehicleStats> per_vehicle;
    double avg_travel_time = 0.0;
    double avg_wait_time = 0.0;
    double avg_recalculations = 0.0;
    double success_rate = 0.0;
    std::vector<Event> trace;
};

/// Computes the aggregate fields from per-vehicle stats in ascending vehicle
/// order. Timed-out vehicles must already carry travel_time = cutoff.
inline void aggregate(const std::vector<VehicleStats>& per_vehicle, std::size_t fleet_size,
                      ScenarioResult& out) {
    if (fleet_size == 0 || per_vehicle.size() != fleet_size) {
        throw ParameterError("aggregate requires a nonempty fleet matching the stats list");
    }
    double travel = 0.0, wait = 0.0, recalc = 0.0;
    std::size_t arrived = 0;
    for (const VehicleStats& s : per_vehicle) {
        travel += s.travel_time;
        wait += s.wait_time;
        recalc += static_cast<double>(s.recalculations);
        if (s.arrived) ++arrived;
    }
    const double n = static_cast<double>(fleet_size);
    out.per_vehicle = per_vehicle;
    out.avg_travel_time = travel / n;
    out.avg_wait_time = wait / n;
    out.avg_recalculations = recalc / n;
    out.success_rate = static_cast<double>(arrived) / n;
}

inline ScenarioResult aggregate(const std::vector<VehicleStats>& per_vehicle,
                                std::size_t fleet_size) {
    ScenarioResult out;
    aggregate(per_vehicle, fleet_size, out);
    return out;
}

// One decimal, half away from zero (the table convention).
inline double round_percent(double v) {
    return std::round(v * 10.0) / 10.0;
}

/// Percentage deltas of `other` relative to `base`. A zero baseline makes the
/// delta undefined rather than infinite.
struct ComparisonDeltas {
    std::optional<double> travel_pct;
    std::optional<double> wait_pct;
    std::optional<double> recalc_pct;
};

inline ComparisonDeltas compare(const ScenarioResult& base, const ScenarioResult& other) {
    if (!base.descriptor.same_cell(other.descriptor)) {
        throw ComparisonError("results compare only within the same scenario cell");
    }
    auto delta = [](double b, double o) -> std::optional<double> {
        if (b == 0.0) return std::nullopt;
        return round_percent((o - b) / b * 100.0);
    };
    return {delta(base.avg_travel_time, other.avg_travel_time),
            delta(base.avg_wait_time, other.avg_wait_time),
            delta(base.avg_recalculations, other.avg_recalculations)};
}

/// A node a vehicle kept returning to.
struct LoopDiagnostic {
    VehicleId vehicle = 0;
    NodeId node = kInvalidNode;
    std::size_t revisit_count = 0;
    std::pair<Seconds, Seconds> first_interval{0.0, 0.0}; // first two visit times
};

/// Flags every (vehicle, node) pair visited at least `threshold` times,
/// sorted by revisit count descending, then vehicle id, then node id.
inline std::vector<LoopDiagnostic> detect_loops(
    const std::vector<std::vector<std::pair<NodeId, Seconds>>>& visit_logs,
    std::size_t threshold = 2) {
    std::vector<LoopDiagnostic> out;
    for (std::size_t vid = 0; vid < visit_logs.size(); ++vid) {
        std::map<NodeId, std::vector<Seconds>> times;
        for (const auto& [node, t] : visit_logs[vid]) {
            times[node].push_back(t);
        }
        for (const auto& [node, ts] : times) {
            if (ts.size() >= threshold && ts.size() >= 2) {
                out.push_back({static_cast<VehicleId>(vid), node, ts.size(), {ts[0], ts[1]}});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const LoopDiagnostic& a, const LoopDiagnostic& b) {
        if (a.revisit_count != b.revisit_count) return a.revisit_count > b.revisit_count;
        if (a.vehicle != b.vehicle) return a.vehicle < b.vehicle;
        return a.node < b.node;
    });
    return out;
}

/// detect_loops over a recorded trace: arrival events reconstruct logs.
inline std::vector<LoopDiagnostic> detect_loops_in_trace(const std::vector<Event>& trace,
                                                         std::size_t threshold = 2) {
    VehicleId max_vehicle = 0;
    for (const Event& e : trace) {
        if (e.kind == EventKind::Arrival) max_vehicle = std::max(max_vehicle, e.vehicle);
    }
    std::vector<std::vector<std::pair<NodeId, Seconds>>> logs(max_vehicle + 1);
    bool any = false;
    for (const Event& e : trace) {
        if (e.kind == EventKind::Arrival) {
            logs[e.vehicle].push_back({e.node, e.t});
            any = true;
        }
    }
    if (!any) return {};
    return detect_loops(logs, threshold);
}

// ---------------------------------------------------------------------------
// CSV + summary rendering
// ---------------------------------------------------------------------------

inline constexpr const char* kMetricsCsvHeader =
    "Cars,Obs,Pattern,Config,Trial,Seed,T,W,R,SuccessRate";

inline constexpr const char* kPerVehicleCsvHeader =
    "Cars,Obs,Pattern,Config,Trial,Seed,Vehicle,T,W,R,Arrived";

/// Boxplot-ready rows: one line per vehicle of the scenario.
inline std::string per_vehicle_csv_rows(const ScenarioResult& r) {
    std::string out;
    char buf[256];
    for (std::size_t i = 0; i < r.per_vehicle.size(); ++i) {
        const VehicleStats& s = r.per_vehicle[i];
        std::snprintf(buf, sizeof(buf), "%d,%d,%s,%d,%d,%llu,%zu,%.6f,%.6f,%zu,%d\n",
                      r.descriptor.cars, r.descriptor.obstacles,
                      pattern_name(r.descriptor.pattern), r.descriptor.config_index,
                      r.descriptor.trial, static_cast<unsigned long long>(r.descriptor.seed), i,
                      s.travel_time, s.wait_time, s.recalculations, s.arrived ? 1 : 0);
        out += buf;
    }
    return out;
}

inline std::string metrics_csv_row(const ScenarioResult& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%d,%s,%d,%d,%llu,%.6f,%.6f,%.6f,%.6f",
                  r.descriptor.cars, r.descriptor.obstacles, pattern_name(r.descriptor.pattern),
                  r.descriptor.config_index, r.descriptor.trial,
                  static_cast<unsigned long long>(r.descriptor.seed), r.avg_travel_time,
                  r.avg_wait_time, r.avg_recalculations, r.success_rate);
    return buf;
}

/// Renders the whole metrics table with the canonical row order
/// (Cars, Obs, Pattern, Config, Trial).
inline std::string render_metrics_csv(std::vector<const ScenarioResult*> rows) {
    std::sort(rows.begin(), rows.end(), [](const ScenarioResult* a, const ScenarioResult* b) {
        const auto& da = a->descriptor;
        const auto& db = b->descriptor;
        return std::tie(da.cars, da.obstacles, da.pattern, da.config_index, da.trial) <
               std::tie(db.cars, db.obstacles, db.pattern, db.config_index, db.trial);
    });
    std::string out = kMetricsCsvHeader;
    out += '\n';
    for (const ScenarioResult* r : rows) {
        out += metrics_csv_row(*r);
        out += '\n';
    }
    return out;
}

inline std::string render_metrics_csv(const std::vector<ScenarioResult>& results) {
    std::vector<const ScenarioResult*> rows;
    rows.reserve(results.size());
    for (const auto& r : results) rows.push_back(&r);
    return render_metrics_csv(std::move(rows));
}

namespace metrics_detail {

inline std::string fmt(double v, const char* spec = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

inline std::string fmt_delta(const std::optional<double>& v) {
    if (!v) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.1f%%", *v);
    return buf;
}

} // namespace metrics_detail

/// Plain-text summary shaped like the per-configuration comparison table:
/// one row per configuration with mean travel/wait/recalculations across all
/// rows of that configuration, then the three standard comparison rows.
inline std::string render_summary(const std::vector<ScenarioResult>& results) {
    using metrics_detail::fmt;
    struct Acc {
        double travel = 0, wait = 0, recalc = 0, success = 0;
        std::size_t n = 0;
    };
    std::map<int, Acc> by_config;
    for (const auto& r : results) {
        Acc& a = by_config[r.descriptor.config_index];
        a.travel += r.avg_travel_time;
        a.wait += r.avg_wait_time;
        a.recalc += r.avg_recalculations;
        a.success += r.success_rate;
        a.n += 1;
    }

    std::string out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-28s %10s %10s %10s %10s\n", "Configuration",
                  "Travel(s)", "Wait(s)", "Recalc", "Success");
    out += line;
    out += std::string(72, '-') + "\n";
    std::map<int, Acc> means;
    for (const auto& [idx, acc] : by_config) {
        Acc m;
        m.travel = acc.travel / static_cast<double>(acc.n);
        m.wait = acc.wait / static_cast<double>(acc.n);
        m.recalc = acc.recalc / static_cast<double>(acc.n);
        m.success = acc.success / static_cast<double>(acc.n);
        means[idx] = m;
        std::string name = std::to_string(idx) + ". " +
                           CoordinationConfig::from_index(idx).name();
        std::snprintf(line, sizeof(line), "%-28s %10s %10s %10s %9s%%\n", name.c_str(),
                      fmt(m.travel).c_str(), fmt(m.wait).c_str(), fmt(m.recalc).c_str(),
                      fmt(m.success * 100.0, "%.1f").c_str());
        out += line;
    }

    auto pct = [](double base, double other) -> std::string {
        if (base == 0.0) return "n/a";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%+.1f%%", round_percent((other - base) / base * 100.0));
        return buf;
    };
    auto comparison_row = [&](int base, int other, bool with_recalc) {
        if (!means.count(base) || !means.count(other)) return;
        const Acc& b = means[base];
        const Acc& o = means[other];
        std::string name = "Config " + std::to_string(other) + " vs. Config " +
                           std::to_string(base);
        std::snprintf(line, sizeof(line), "%-28s %10s %10s %10s\n", name.c_str(),
                      pct(b.travel, o.travel).c_str(), pct(b.wait, o.wait).c_str(),
                      with_recalc ? pct(b.recalc, o.recalc).c_str() : "-");
        out += line;
    };
    if (!means.empty()) {
        out += std::string(72, '-') + "\n";
        out += "Comparative metrics:\n";
        comparison_row(2, 4, false);
        comparison_row(2, 6, false);
        comparison_row(4, 6, true);
    }
    return out;
}

} // namespace ommsim
