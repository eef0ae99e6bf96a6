#include <doctest.h>

#include <cmath>

#include "qland/errors.hpp"
#include "qland/minima.hpp"

using namespace qland;

namespace {

double rosenbrock(std::span<const double> x, std::span<double> g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
}

BasinHoppingConfig short_run(int steps, std::uint64_t seed = 1) {
    BasinHoppingConfig cfg;
    cfg.steps = steps;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE("optim") {
    TEST_CASE("rms of a gradient") {
        CHECK(rms_of(std::vector<double>{3, 4}) == doctest::Approx(std::sqrt(12.5)));
        CHECK(rms_of(std::vector<double>{}) == 0);
    }

    TEST_CASE("L-BFGS converges on Rosenbrock") {
        const auto r = lbfgs_minimize(Objective(rosenbrock), {-1.2, 1.0});
        CHECK(r.converged);
        CHECK(r.x[0] == doctest::Approx(1).epsilon(1e-8));
        CHECK(r.x[1] == doctest::Approx(1).epsilon(1e-8));
        CHECK(r.rms <= 1e-10);
    }

    TEST_CASE("L-BFGS step cap bounds every displacement") {
        LbfgsOptions opts;
        opts.max_step = 0.05;
        opts.max_iterations = 1;
        const auto r = lbfgs_minimize(Objective(rosenbrock), {-1.2, 1.0}, opts);
        CHECK(std::fabs(r.x[0] + 1.2) <= 0.05 + 1e-15);
        CHECK(std::fabs(r.x[1] - 1.0) <= 0.05 + 1e-15);
    }

    TEST_CASE("quadratic converges exactly") {
        Objective quad = [](std::span<const double> x, std::span<double> g) {
            double f = 0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double s = double(i + 1);
                g[i] = s * (x[i] - 0.5);
                f += 0.5 * s * (x[i] - 0.5) * (x[i] - 0.5);
            }
            return f;
        };
        const auto r = lbfgs_minimize(quad, std::vector<double>(6, 3.0));
        CHECK(r.converged);
        for (double x : r.x) CHECK(x == doctest::Approx(0.5).epsilon(1e-9));
    }

    TEST_CASE("config validation") {
        BasinHoppingConfig cfg;
        CHECK_NOTHROW(cfg.validate());
        cfg.temperature = 0;
        CHECK_THROWS_AS(cfg.validate(), InputError);
        cfg = {};
        cfg.steps = 0;
        CHECK_THROWS_AS(cfg.validate(), InputError);
    }

    TEST_CASE("dedup insertion keeps records sorted") {
        MinimaDatabase db("K3", complete_graph(3), 1);
        MinimumRecord r;
        r.theta = ParameterVector::zeros(1);
        for (double e : {-0.2, -0.5, 0.1, -0.5 + 1e-10, -0.3}) {
            r.energy = e;
            insert_deduped(db, r);
        }
        REQUIRE(db.records.size() == 4);
        for (std::size_t i = 1; i < db.records.size(); ++i) CHECK(db.records[i - 1].energy < db.records[i].energy);
        CHECK(db.find(-0.5 + 5e-10).value() == 0);
        CHECK_FALSE(db.find(0.5).has_value());
        bool inserted = true;
        CHECK(insert_or_find(db, r, inserted) == 1);
        CHECK_FALSE(inserted);
    }

    TEST_CASE("basin hopping on K3 finds a single minimum") {
        const auto db = basin_hop(complete_graph(3), "K3", 1, short_run(200));
        REQUIRE(db.records.size() == 1);
        CHECK(db.records[0].energy == doctest::Approx(-0.5).epsilon(1e-9));
        CHECK(db.records[0].p_solution == doctest::Approx(1).epsilon(1e-6));
        CHECK(db.records[0].rms_gradient <= 1e-10);
        CHECK(db.stats.steps == 200);
    }

    TEST_CASE("basin hopping invariants on G2 L=2") {
        const auto db = basin_hop(*builtin_graph("G2"), "G2", 2, short_run(400));
        REQUIRE(db.records.size() > 1);
        MinimumFactory factory(db.graph);
        for (std::size_t i = 0; i < db.records.size(); ++i) {
            const auto& r = db.records[i];
            if (i) CHECK(r.energy - db.records[i - 1].energy > db.run_config.dedup_energy);
            CHECK(r.rms_gradient <= 1e-10);
            CHECK(r.p_solution >= 0);
            CHECK(r.p_solution <= 1 + 1e-12);
            CHECK(factory.lowest_curvature(r.theta.flat()) > -1e-6);
            CHECK(factory.evaluator().energy(r.theta.flat()) == doctest::Approx(r.energy).epsilon(1e-12));
        }
        CHECK(db.stats.accepted <= db.stats.steps);
    }

    TEST_CASE("basin hopping is reproducible from the seed") {
        const auto g = *builtin_graph("G3");
        const auto a = basin_hop(g, "G3", 2, short_run(150, 4));
        const auto b = basin_hop(g, "G3", 2, short_run(150, 4));
        REQUIRE(a.records.size() == b.records.size());
        for (std::size_t i = 0; i < a.records.size(); ++i) {
            CHECK(a.records[i].energy == b.records[i].energy);
            CHECK(a.records[i].theta == b.records[i].theta);
        }
    }

    TEST_CASE("streams merge independently of thread count") {
        const auto g = *builtin_graph("G2");
        const auto one = basin_hop_streams(g, "G2", 2, short_run(80), 3, 1);
        const auto three = basin_hop_streams(g, "G2", 2, short_run(80), 3, 3);
        REQUIRE(one.records.size() == three.records.size());
        for (std::size_t i = 0; i < one.records.size(); ++i) CHECK(one.records[i].theta == three.records[i].theta);
        const auto single = basin_hop(g, "G2", 2, short_run(80));
        CHECK(one.records.size() >= single.records.size());
    }

    TEST_CASE("explicit alternative states override the second-best cut") {
        const std::vector<std::uint64_t> alt{3, 12};
        MinimumFactory factory(*builtin_graph("G3"), alt);
        CHECK(factory.solutions().alternative == alt);
        const auto db = basin_hop(*builtin_graph("G3"), "G3", 1, short_run(100), alt);
        CHECK(db.alternative_states == alt);
        for (const auto& r : db.records) CHECK(r.p_alternative.has_value());
    }
}
