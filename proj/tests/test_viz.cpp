#include <doctest.h>

#include "qland/viz.hpp"

using namespace qland;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

std::vector<TreeLeaf> leaves() {
    return {{0, -3.0, 0.9, 0.1}, {1, -2.0, 0.5, 0.3}, {2, -2.5, 0.1, std::nullopt}, {3, -1.0, 0.2, 0.2}};
}

}  // namespace

TEST_SUITE("viz") {
    TEST_CASE("tree structure follows the transition states") {
        const std::vector<TreeEdge> edges{{0, 1, -1.0}, {1, 2, 0.0}, {0, 3, 1.0}};
        const auto tree = build_disconnectivity(leaves(), edges, 0.5);
        CHECK(tree.roots.size() == 1);
        REQUIRE(tree.leaf_node.size() == 4);
        for (std::size_t i = 1; i < tree.threshold_levels.size(); ++i) {
            CHECK(tree.threshold_levels[i - 1] - tree.threshold_levels[i] == doctest::Approx(0.5));
        }
        CHECK(tree.threshold_levels.front() >= 1.0);
        std::size_t leaf_nodes = 0;
        for (const auto& n : tree.nodes) leaf_nodes += n.children.empty();
        CHECK(leaf_nodes == 4);
        // Every node's minima are the union of its children's.
        for (const auto& n : tree.nodes) {
            if (n.children.empty()) continue;
            std::size_t total = 0;
            for (int c : n.children) {
                total += tree.nodes[c].minima.size();
                CHECK(tree.nodes[c].parent >= 0);
            }
            CHECK(total == n.minima.size());
        }
        CHECK(tree.nodes[tree.roots[0]].minima.size() == 4);
    }

    TEST_CASE("disconnected minima give a forest") {
        const std::vector<TreeEdge> edges{{0, 1, -1.0}};
        const auto tree = build_disconnectivity(leaves(), edges);
        CHECK(tree.roots.size() == 3);
    }

    TEST_CASE("SVG rendering is deterministic and complete") {
        const std::vector<TreeEdge> edges{{0, 1, -1.0}, {1, 2, 0.0}, {0, 3, 1.0}};
        const auto tree = build_disconnectivity(leaves(), edges);
        RenderOptions opts;
        opts.title = "a < b";
        const auto svg = render_disconnectivity(tree, opts);
        CHECK(svg == render_disconnectivity(tree, opts));
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(svg.find("</svg>") != std::string::npos);
        CHECK(count(svg, "class=\"leaf\"") == 4);
        CHECK(svg.find("a &lt; b") != std::string::npos);
        opts.channel = ColorChannel::Alternative;
        const auto alt = render_disconnectivity(tree, opts);
        CHECK(alt != svg);
        CHECK(alt.find("#999999") != std::string::npos);
        opts.grayscale = true;
        CHECK(render_disconnectivity(tree, opts) != alt);
    }

    TEST_CASE("colormap") {
        CHECK(colormap(0.0) == "#440154");
        CHECK(colormap(1.0) == "#fde725");
        CHECK(colormap(-1.0) == colormap(0.0));
        CHECK(colormap(0.0, true) == "#c8c8c8");
        CHECK(colormap(1.0, true) == "#000000");
    }

    TEST_CASE("scatter export") {
        MinimaDatabase db("K3", complete_graph(3), 2);
        MinimumRecord r;
        r.theta = ParameterVector::zeros(2);
        r.energy = -0.5;
        r.p_solution = 1.0;
        insert_deduped(db, r);
        const auto csv = scatter_export(db);
        CHECK(csv.rfind("kind,energy,p_solution,p_alternative,layers\n", 0) == 0);
        CHECK(csv.find("minimum,-0.5,1,,2\n") != std::string::npos);
    }
}
