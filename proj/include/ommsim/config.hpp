#pragma once

#include <array>
#include <string>

#include "ommsim/errors.hpp"

namespace ommsim {

enum class ConfigLabel {
    NoObstacle = 1,       // baseline, no obstacles active
    ObstacleNoReroute,    // uncoordinated waiting
    CommOnly,             // informed waiting with proactive single-node dodges
    RerouteNoOMM,         // 8 s reactive trigger, no memory (the failure case)
    OMMOnly,              // persistent memory, proactive rerouting only
    RerouteOMM,           // full coordination
};

/// Flag triple plus obstacle toggle selecting one of the six tested
/// coordination configurations.
struct CoordinationConfig {
    bool obstacles_enabled = false;
    bool communication = false;
    bool reactive_reroute = false; // 8 s trigger
    bool omm = false;
    ConfigLabel label = ConfigLabel::NoObstacle;

    static CoordinationConfig from_index(int index) {
        switch (index) {
            case 1: return {false, false, false, false, ConfigLabel::NoObstacle};
            case 2: return {true, false, false, false, ConfigLabel::ObstacleNoReroute};
            case 3: return {true, true, false, false, ConfigLabel::CommOnly};
            case 4: return {true, true, true, false, ConfigLabel::RerouteNoOMM};
            case 5: return {true, true, false, true, ConfigLabel::OMMOnly};
            case 6: return {true, true, true, true, ConfigLabel::RerouteOMM};
            default:
                throw ParameterError("configuration index must be 1..6, got " +
                                     std::to_string(index));
        }
    }

    int index() const { return static_cast<int>(label); }

    void validate() const {
        if ((reactive_reroute || omm) && !communication) {
            throw ValidationError("rerouting without communication is not a tested configuration");
        }
        if (from_index(index()) != *this) {
            throw ValidationError("flag combination does not match label " + std::string(name()));
        }
    }

    const char* name() const {
        switch (label) {
            case ConfigLabel::NoObstacle: return "NoObstacle";
            case ConfigLabel::ObstacleNoReroute: return "ObstacleNoReroute";
            case ConfigLabel::CommOnly: return "CommOnly";
            case ConfigLabel::RerouteNoOMM: return "RerouteNoOMM";
            case ConfigLabel::OMMOnly: return "OMMOnly";
            case ConfigLabel::RerouteOMM: return "RerouteOMM";
        }
        return "?";
    }

    bool operator==(const CoordinationConfig&) const = default;
};

inline constexpr std::array<int, 6> kAllConfigIndices = {1, 2, 3, 4, 5, 6};

} // namespace ommsim
