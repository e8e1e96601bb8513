#pragma once

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ommsim/comms.hpp"
#include "ommsim/errors.hpp"
#include "ommsim/graph.hpp"

namespace ommsim {

enum class EventKind {
    Arrival,   // vehicle entered a node (detail "destination" on the final one)
    Encounter, // vehicle blocked by an obstacle node
    Broadcast, // obstacle announced network-wide
    Reroute,   // route recalculation (detail carries mode/route/exclusions)
    Clearance, // vehicle resumed through an obstacle after the full wait
    Timeout,   // vehicle counted at the cutoff
};

inline const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::Arrival: return "arrival";
        case EventKind::Encounter: return "encounter";
        case EventKind::Broadcast: return "broadcast";
        case EventKind::Reroute: return "reroute";
        case EventKind::Clearance: return "clearance";
        case EventKind::Timeout: return "timeout";
    }
    return "?";
}

/// One trace record. Serialized field order is fixed (t, kind, vehicle,
/// node, detail) so traces are golden-file stable.
struct Event {
    Seconds t = 0.0;
    EventKind kind = EventKind::Arrival;
    VehicleId vehicle = 0;
    NodeId node = kInvalidNode;
    std::string detail;

    bool operator==(const Event&) const = default;
};

inline std::string to_jsonl(const Event& e) {
    char time_buf[32];
    std::snprintf(time_buf, sizeof(time_buf), "%.6f", e.t);
    std::string out = "{\"t\":";
    out += time_buf;
    out += ",\"kind\":\"";
    out += event_kind_name(e.kind);
    out += "\",\"vehicle\":";
    out += std::to_string(e.vehicle);
    out += ",\"node\":";
    out += std::to_string(e.node);
    out += ",\"detail\":\"";
    out += e.detail; // details never contain characters needing escapes
    out += "\"}";
    return out;
}

inline void write_jsonl(const std::vector<Event>& events, std::ostream& out) {
    for (const Event& e : events) {
        out << to_jsonl(e) << '\n';
    }
}

namespace trace_detail {

inline std::string extract_string(const std::string& line, const std::string& key, int line_no) {
    const std::string needle = "\"" + key + "\":\"";
    auto pos = line.find(needle);
    if (pos == std::string::npos) {
        throw ParseError("trace line " + std::to_string(line_no) + ": missing field " + key);
    }
    pos += needle.size();
    auto end = line.find('"', pos);
    if (end == std::string::npos) {
        throw ParseError("trace line " + std::to_string(line_no) + ": unterminated field " + key);
    }
    return line.substr(pos, end - pos);
}

inline double extract_number(const std::string& line, const std::string& key, int line_no) {
    const std::string needle = "\"" + key + "\":";
    auto pos = line.find(needle);
    if (pos == std::string::npos) {
        throw ParseError("trace line " + std::to_string(line_no) + ": missing field " + key);
    }
    pos += needle.size();
    return std::strtod(line.c_str() + pos, nullptr);
}

} // namespace trace_detail

/// Reads back a JSON-lines trace produced by write_jsonl.
inline std::vector<Event> read_jsonl(std::istream& in) {
    std::vector<Event> events;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Event e;
        e.t = trace_detail::extract_number(line, "t", line_no);
        std::string kind = trace_detail::extract_string(line, "kind", line_no);
        bool known = false;
        for (EventKind k : {EventKind::Arrival, EventKind::Encounter, EventKind::Broadcast,
                            EventKind::Reroute, EventKind::Clearance, EventKind::Timeout}) {
            if (kind == event_kind_name(k)) {
                e.kind = k;
                known = true;
                break;
            }
        }
        if (!known) {
            throw ParseError("trace line " + std::to_string(line_no) + ": unknown kind \"" +
                             kind + "\"");
        }
        e.vehicle = static_cast<VehicleId>(trace_detail::extract_number(line, "vehicle", line_no));
        e.node = static_cast<NodeId>(trace_detail::extract_number(line, "node", line_no));
        e.detail = trace_detail::extract_string(line, "detail", line_no);
        events.push_back(std::move(e));
    }
    return events;
}

} // namespace ommsim
