#include <doctest.h>

#include <filesystem>

#include "qland/errors.hpp"
#include "qland/io.hpp"

using namespace qland;

namespace {

MinimaDatabase sample_db() {
    BasinHoppingConfig cfg;
    cfg.steps = 120;
    cfg.seed = 3;
    return basin_hop(*builtin_graph("G3"), "G3", 1, cfg, builtin_alternative_states("G3"));
}

}  // namespace

TEST_SUITE("io") {
    TEST_CASE("database round trip is exact") {
        const auto db = sample_db();
        const auto text = serialize_database(db);
        const auto back = parse_database(text);
        CHECK(serialize_database(back) == text);
        CHECK(back.graph_id == "G3");
        CHECK(back.graph == db.graph);
        CHECK(back.layers == 1);
        CHECK(back.alternative_states == db.alternative_states);
        REQUIRE(back.records.size() == db.records.size());
        for (std::size_t i = 0; i < db.records.size(); ++i) {
            CHECK(back.records[i].energy == db.records[i].energy);
            CHECK(back.records[i].theta == db.records[i].theta);
            CHECK(back.records[i].p_solution == db.records[i].p_solution);
            CHECK(back.records[i].p_alternative == db.records[i].p_alternative);
        }
        CHECK(back.stats.steps == db.stats.steps);
        CHECK(back.run_config.seed == 3);
    }

    TEST_CASE("network round trip") {
        const auto result = connect_database(sample_db());
        const auto& ktn = result.network;
        const auto minima = serialize_database(ktn.minima);
        const auto ts = serialize_transition_states(ktn);
        const auto back = parse_network(minima, ts);
        CHECK(back.minima.provenance == Provenance::Connected);
        CHECK(serialize_database(back.minima) == minima);
        CHECK(serialize_transition_states(back) == ts);
        CHECK(back.component_count() == ktn.component_count());
    }

    TEST_CASE("malformed files report the line") {
        auto text = serialize_database(sample_db());
        const auto pos = text.find("layers");
        auto broken = text;
        broken.replace(pos, 8, "layers x");
        try {
            parse_database(broken);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
        CHECK_THROWS_AS(parse_database("not a database\n"), InputError);
        CHECK_THROWS_AS(parse_database(text.substr(0, text.size() / 2)), InputError);
        CHECK_THROWS_AS(parse_network(text, "qland-ts 1\ngraph_id G3\nlayers 1\ntransition_states 1\n0 0 -1 0 99 0 0\n"),
                        InputError);
    }

    TEST_CASE("file helpers") {
        const auto dir = std::filesystem::temp_directory_path() / "qland_io_test";
        std::filesystem::remove_all(dir);
        const auto path = (dir / "sub" / "x.txt").string();
        write_file(path, "hello\n");
        CHECK(read_file(path) == "hello\n");
        write_file(path, "again\n");
        CHECK(read_file(path) == "again\n");
        CHECK_THROWS_AS(read_file((dir / "missing").string()), IoError);
        std::filesystem::remove_all(dir);
    }
}
