#include <catch2/catch_amalgamated.hpp>

#include "ommsim/config.hpp"

using namespace ommsim;

TEST_CASE("the six configurations map one-to-one onto the flag table") {
    struct Row {
        int index;
        bool obstacles, comm, reroute, omm;
        const char* name;
    };
    const Row table[] = {
        {1, false, false, false, false, "NoObstacle"},
        {2, true, false, false, false, "ObstacleNoReroute"},
        {3, true, true, false, false, "CommOnly"},
        {4, true, true, true, false, "RerouteNoOMM"},
        {5, true, true, false, true, "OMMOnly"},
        {6, true, true, true, true, "RerouteOMM"},
    };
    for (const Row& row : table) {
        auto config = CoordinationConfig::from_index(row.index);
        REQUIRE(config.obstacles_enabled == row.obstacles);
        REQUIRE(config.communication == row.comm);
        REQUIRE(config.reactive_reroute == row.reroute);
        REQUIRE(config.omm == row.omm);
        REQUIRE(std::string(config.name()) == row.name);
        REQUIRE(config.index() == row.index);
        REQUIRE_NOTHROW(config.validate());
    }
    REQUIRE_THROWS_AS(CoordinationConfig::from_index(0), ParameterError);
    REQUIRE_THROWS_AS(CoordinationConfig::from_index(7), ParameterError);
}

TEST_CASE("rerouting or memory without communication is rejected") {
    CoordinationConfig bad;
    bad.obstacles_enabled = true;
    bad.communication = false;
    bad.reactive_reroute = true;
    bad.label = ConfigLabel::RerouteNoOMM;
    REQUIRE_THROWS_AS(bad.validate(), ValidationError);

    CoordinationConfig bad2;
    bad2.obstacles_enabled = true;
    bad2.communication = false;
    bad2.omm = true;
    bad2.label = ConfigLabel::OMMOnly;
    REQUIRE_THROWS_AS(bad2.validate(), ValidationError);
}

TEST_CASE("mislabeled flag combinations are rejected") {
    auto config = CoordinationConfig::from_index(3);
    config.label = ConfigLabel::RerouteNoOMM; // flags say CommOnly
    REQUIRE_THROWS_AS(config.validate(), ValidationError);
}
