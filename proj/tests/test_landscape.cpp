#include <doctest.h>

#include <cmath>

#include "qland/errors.hpp"
#include "qland/hessian.hpp"
#include "qland/landscape.hpp"
#include "saddle_oracle.hpp"

using namespace qland;

namespace {

MinimaDatabase g2_database() {
    BasinHoppingConfig cfg;
    cfg.steps = 300;
    return basin_hop(*builtin_graph("G2"), "G2", 1, cfg);
}

}  // namespace

TEST_SUITE("landscape") {
    TEST_CASE("angle periods") {
        const double pi = M_PI;
        CHECK(angle_periods(*builtin_graph("G2"), 2) == std::vector<double>{4 * pi, 4 * pi, 2 * pi, 2 * pi});
        CHECK(angle_periods(variable_weight_graph(2.5), 1) == std::vector<double>{0, 2 * pi});
    }

    TEST_CASE("hessian helpers") {
        Evaluator ev{CostDiagonal(*builtin_graph("G3"))};
        const std::vector<double> x{0.3, -0.7, 0.2, 0.9};
        const auto h = numerical_hessian(ev, x);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK(h[i * 4 + j] == doctest::Approx(h[j * 4 + i]).epsilon(1e-9));
        const std::vector<double> v{1, 0, 0, 0};
        const auto hv = hessian_vector_product(ev, x, v);
        for (int i = 0; i < 4; ++i) CHECK(hv[i] == doctest::Approx(h[i * 4]).epsilon(1e-6));
        const auto eig = symmetric_eigen(std::vector<double>{2, 0, 0, -3}, 2);
        CHECK(eig.values[0] == doctest::Approx(-3));
        CHECK(hessian_index(eig, 1e-8) == 1);
    }

    TEST_CASE("network bookkeeping") {
        MinimaDatabase db("K3", complete_graph(3), 1);
        MinimumRecord r;
        r.theta = ParameterVector::zeros(1);
        r.energy = -1;
        insert_deduped(db, r);
        r.energy = 0;
        insert_deduped(db, r);
        KineticTransitionNetwork ktn(db);
        CHECK(ktn.component_count() == 2);
        TransitionStateRecord ts;
        ts.theta = ParameterVector::zeros(1);
        ts.energy = 1;
        ts.min_a = 0;
        ts.min_b = 1;
        CHECK(ktn.add_transition_state(ts));
        CHECK_FALSE(ktn.add_transition_state(ts));
        CHECK(ktn.component_count() == 1);
        bool inserted = false;
        r.energy = -2;
        CHECK(ktn.add_minimum(r, inserted) == 0);
        CHECK(inserted);
        CHECK(ktn.transition_states[0].min_a == 1);
        CHECK(ktn.transition_states[0].min_b == 2);
        CHECK(ktn.component_count() == 2);
        ktn.transition_states[0].min_b = 9;
        CHECK_THROWS_AS(ktn.validate(), InputError);
    }

    TEST_CASE("DNEB rejects identical endpoints") {
        const auto p = ParameterVector({0.1}, {0.2});
        CHECK_THROWS_AS(dneb_candidates(*builtin_graph("G2"), p, p), InputError);
    }

    TEST_CASE("G2 L=1 connection against the grid saddle oracle") {
        const auto db = g2_database();
        REQUIRE(db.records.size() == 3);
        const auto result = connect_database(db);
        const auto& ktn = result.network;
        CHECK(ktn.component_count() == 1);
        CHECK(ktn.minima.records.size() == 3);
        REQUIRE(ktn.transition_states.size() >= 2);

        const auto stationary = oracle::stationary_points_2d(db.graph);
        Evaluator ev{CostDiagonal(db.graph)};
        for (const auto& ts : ktn.transition_states) {
            CHECK(ts.negative_eigenvalue < 0);
            CHECK(ts.energy > ktn.minima.records[ts.min_a].energy);
            CHECK(ts.energy > ktn.minima.records[ts.min_b].energy);
            bool matched = false;
            for (const auto& s : stationary) matched |= s.index == 1 && std::fabs(s.energy - ts.energy) < 1e-4;
            CHECK(matched);
            const auto refined = refine_transition_state(ev, ts.theta);
            CHECK(refined.status == RefineStatus::Converged);
            CHECK(refined.index == 1);
        }
    }

    TEST_CASE("refinement from a minimum reports it") {
        const auto db = g2_database();
        Evaluator ev{CostDiagonal(db.graph)};
        const auto r = refine_transition_state(ev, db.records[0].theta);
        CHECK(r.status == RefineStatus::Minimum);
    }
}
