#include "qland/viz.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>

#include "qland/analysis.hpp"
#include "qland/errors.hpp"

namespace qland {

namespace {

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
    std::size_t find(std::size_t a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::size_t> parent;
};

std::string num(double v, const char* spec = "%.2f") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

DisconnectivityTree build_disconnectivity(const std::vector<TreeLeaf>& minima, const std::vector<TreeEdge>& edges,
                                          double spacing, std::optional<double> top) {
    if (minima.empty()) throw InputError("network has no minima");
    for (const auto& e : edges)
        if (e.a >= minima.size() || e.b >= minima.size()) throw InputError("edge refers to a missing minimum");
    double e_gm = minima.front().energy, e_hi_min = minima.front().energy;
    for (const auto& m : minima) {
        e_gm = std::min(e_gm, m.energy);
        e_hi_min = std::max(e_hi_min, m.energy);
    }
    double e_hi = e_hi_min;
    bool any_edge = false;
    double e_max_ts = e_gm;
    for (const auto& e : edges) {
        e_max_ts = any_edge ? std::max(e_max_ts, e.energy) : e.energy;
        any_edge = true;
    }
    if (any_edge) e_hi = std::max(e_hi, e_max_ts);
    if (!(spacing > 0.0)) {
        double span = (any_edge ? e_max_ts : e_hi_min) - e_gm;
        if (!(span > 0.0)) span = std::max(1.0, std::abs(e_gm));
        spacing = span / 40.0;
    }
    const double t0 = top ? *top : e_hi + spacing;

    DisconnectivityTree tree;
    for (double t = t0; t > e_gm; t -= spacing) {
        tree.threshold_levels.push_back(t);
        if (tree.threshold_levels.size() > 100000) throw InputError("threshold spacing too small");
    }
    const std::size_t m = minima.size();
    tree.leaves = minima;
    for (std::size_t i = 0; i < m; ++i) tree.leaves[i].minimum = i;
    tree.leaf_node.assign(m, -1);

    auto sorted_edges = edges;
    std::sort(sorted_edges.begin(), sorted_edges.end(),
              [](const TreeEdge& a, const TreeEdge& b) { return a.energy < b.energy; });
    std::vector<int> node_of(m, -1);  // node at the previous level
    for (int k = 0; k < static_cast<int>(tree.threshold_levels.size()); ++k) {
        const double t = tree.threshold_levels[k];
        UnionFind uf(m);
        for (const auto& e : sorted_edges) {
            if (e.energy >= t) break;
            uf.unite(e.a, e.b);
        }
        std::map<std::size_t, int> group_node;
        std::vector<int> current(m, -1);
        for (std::size_t i = 0; i < m; ++i) {
            if (!(minima[i].energy < t)) continue;
            const auto root = uf.find(i);
            auto it = group_node.find(root);
            if (it == group_node.end()) {
                TreeNode node;
                node.level = k;
                node.parent = node_of[i];
                tree.nodes.push_back(node);
                const int id = static_cast<int>(tree.nodes.size()) - 1;
                if (node.parent >= 0)
                    tree.nodes[node.parent].children.push_back(id);
                else
                    tree.roots.push_back(id);
                it = group_node.emplace(root, id).first;
            }
            tree.nodes[it->second].minima.push_back(i);
            current[i] = it->second;
            tree.leaf_node[i] = it->second;
        }
        node_of = std::move(current);
    }
    // Minima at or above every level (possible only with an explicit top).
    for (std::size_t i = 0; i < m; ++i) {
        if (tree.leaf_node[i] >= 0) continue;
        TreeNode node;
        node.level = 0;
        node.minima.push_back(i);
        tree.nodes.push_back(node);
        tree.leaf_node[i] = static_cast<int>(tree.nodes.size()) - 1;
        tree.roots.push_back(tree.leaf_node[i]);
    }
    for (auto& node : tree.nodes)
        std::sort(node.minima.begin(), node.minima.end(), [&](std::size_t a, std::size_t b) {
            return minima[a].energy < minima[b].energy || (minima[a].energy == minima[b].energy && a < b);
        });
    return tree;
}

DisconnectivityTree build_disconnectivity(const KineticTransitionNetwork& ktn, double spacing,
                                          std::optional<double> top) {
    std::vector<TreeLeaf> minima;
    for (std::size_t i = 0; i < ktn.minima.records.size(); ++i) {
        const auto& r = ktn.minima.records[i];
        minima.push_back({i, r.energy, r.p_solution, r.p_alternative});
    }
    std::vector<TreeEdge> edges;
    for (const auto& ts : ktn.transition_states) edges.push_back({ts.min_a, ts.min_b, ts.energy});
    return build_disconnectivity(minima, edges, spacing, top);
}

namespace {

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string colormap(double p, bool grayscale) {
    p = std::clamp(std::isfinite(p) ? p : 0.0, 0.0, 1.0);
    int r, g, b;
    if (grayscale) {
        r = g = b = static_cast<int>(std::lround(200.0 * (1.0 - p)));
    } else {
        // Viridis samples.
        static constexpr std::array<std::array<int, 3>, 9> stops{{{68, 1, 84},
                                                                  {71, 45, 123},
                                                                  {59, 82, 139},
                                                                  {44, 114, 142},
                                                                  {33, 145, 140},
                                                                  {40, 174, 128},
                                                                  {94, 201, 98},
                                                                  {173, 220, 48},
                                                                  {253, 231, 37}}};
        const double x = p * (stops.size() - 1);
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(x), stops.size() - 2);
        const double f = x - static_cast<double>(i);
        auto mix = [&](int c) { return static_cast<int>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c]))); };
        r = mix(0);
        g = mix(1);
        b = mix(2);
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string render_disconnectivity(const DisconnectivityTree& tree, const RenderOptions& options) {
    const auto& leaves = tree.leaves;
    auto prob = [&](std::size_t mi) -> std::optional<double> {
        if (options.channel == ColorChannel::Solution) return leaves[mi].p_solution;
        return leaves[mi].p_alternative;
    };
    auto lowest = [&](int node) { return tree.nodes[node].minima.front(); };
    auto order_key = [&](int a, int b) {
        const auto ma = lowest(a), mb = lowest(b);
        return leaves[ma].energy < leaves[mb].energy || (leaves[ma].energy == leaves[mb].energy && ma < mb);
    };

    // Horizontal layout: terminal nodes get consecutive slots.
    std::vector<double> x(tree.nodes.size(), 0.0);
    int slot = 0;
    std::function<void(int)> place = [&](int node) {
        auto kids = tree.nodes[node].children;
        if (kids.empty()) {
            x[node] = slot++;
            return;
        }
        std::sort(kids.begin(), kids.end(), order_key);
        for (int c : kids) place(c);
        x[node] = 0.5 * (x[kids.front()] + x[kids.back()]);
    };
    auto roots = tree.roots;
    std::sort(roots.begin(), roots.end(), order_key);
    for (int r : roots) {
        place(r);
        ++slot;  // gap between trees of a forest
    }
    const int slots = std::max(1, slot - 1);

    double e_lo = leaves.front().energy;
    for (const auto& l : leaves) e_lo = std::min(e_lo, l.energy);
    const double e_hi = tree.threshold_levels.empty() ? e_lo + 1.0 : tree.threshold_levels.front();
    const double spacing =
        tree.threshold_levels.size() > 1 ? tree.threshold_levels[0] - tree.threshold_levels[1] : (e_hi - e_lo) / 40.0;
    const double y_top_e = e_hi + 0.5 * spacing;
    const double y_bot_e = e_lo - 0.5 * spacing;

    const double left = 90, right = 110, top_px = 40, bottom = 30, plot_h = 480;
    const double plot_w = std::max(300.0, 14.0 * slots);
    const double width = left + plot_w + right, height = top_px + plot_h + bottom;
    auto px = [&](double xs) { return left + (xs + 0.5) / slots * plot_w; };
    auto py = [&](double e) { return top_px + (y_top_e - e) / (y_top_e - y_bot_e) * plot_h; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
    if (!options.title.empty())
        svg += "<text x=\"" + num(width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"14\">" + xml_escape(options.title) + "</text>\n";

    // Energy axis.
    svg += "<g font-family=\"sans-serif\" font-size=\"10\" stroke=\"black\">\n";
    svg += "<line x1=\"" + num(left - 20) + "\" y1=\"" + num(top_px) + "\" x2=\"" + num(left - 20) + "\" y2=\"" +
           num(top_px + plot_h) + "\"/>\n";
    const std::size_t every = std::max<std::size_t>(1, tree.threshold_levels.size() / 10);
    for (std::size_t k = 0; k < tree.threshold_levels.size(); k += every) {
        const double y = py(tree.threshold_levels[k]);
        svg += "<line x1=\"" + num(left - 24) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left - 20) + "\" y2=\"" +
               num(y) + "\"/>\n";
        svg += "<text x=\"" + num(left - 27) + "\" y=\"" + num(y + 3) + "\" text-anchor=\"end\" stroke=\"none\">" +
               num(tree.threshold_levels[k], "%.3f") + "</text>\n";
    }
    svg += "<text x=\"14\" y=\"" + num(top_px + plot_h / 2) +
           "\" text-anchor=\"middle\" stroke=\"none\" transform=\"rotate(-90 14 " + num(top_px + plot_h / 2) +
           ")\">&#x27E8;H_C&#x27E9;</text>\n";
    svg += "</g>\n";

    // Branches.
    svg += "<g stroke-width=\"1.5\" fill=\"none\" stroke-linecap=\"round\">\n";
    auto stroke = [&](int node) {
        const auto p = prob(lowest(node));
        return p ? colormap(*p, options.grayscale) : std::string("#999999");
    };
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        const auto& node = tree.nodes[n];
        const double y = py(tree.threshold_levels.empty() ? e_hi : tree.threshold_levels[node.level]);
        const std::string color = stroke(static_cast<int>(n));
        double y_up;
        double x_up;
        if (node.parent >= 0) {
            x_up = px(x[node.parent]);
            y_up = py(tree.threshold_levels[tree.nodes[node.parent].level]);
        } else {
            x_up = px(x[n]);
            y_up = py(y_top_e);
        }
        svg += "<line x1=\"" + num(px(x[n])) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x_up) + "\" y2=\"" + num(y_up) +
               "\" stroke=\"" + color + "\"/>\n";
        if (node.children.empty()) {
            const double e_bottom = leaves[node.minima.front()].energy;
            svg += "<line class=\"leaf\" x1=\"" + num(px(x[n])) + "\" y1=\"" + num(y) + "\" x2=\"" + num(px(x[n])) + "\" y2=\"" +
                   num(py(e_bottom)) + "\" stroke=\"" + color + "\"/>\n";
        }
    }
    svg += "</g>\n";

    // Colorbar.
    const double cb_x = left + plot_w + 40, cb_w = 16, cb_y = top_px, cb_h = 200;
    svg += "<defs><linearGradient id=\"cbar\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
    for (int s = 0; s <= 10; ++s)
        svg += "<stop offset=\"" + num(s / 10.0) + "\" stop-color=\"" + colormap(s / 10.0, options.grayscale) + "\"/>\n";
    svg += "</linearGradient></defs>\n";
    svg += "<rect x=\"" + num(cb_x) + "\" y=\"" + num(cb_y) + "\" width=\"" + num(cb_w) + "\" height=\"" + num(cb_h) +
           "\" fill=\"url(#cbar)\" stroke=\"black\" stroke-width=\"0.5\"/>\n";
    svg += "<g font-family=\"sans-serif\" font-size=\"10\">\n";
    for (double v : {0.0, 0.5, 1.0})
        svg += "<text x=\"" + num(cb_x + cb_w + 4) + "\" y=\"" + num(cb_y + cb_h * (1.0 - v) + 3) + "\">" +
               num(v, "%.1f") + "</text>\n";
    svg += "<text x=\"" + num(cb_x) + "\" y=\"" + num(cb_y + cb_h + 16) + "\">" +
           (options.channel == ColorChannel::Solution ? "p(s)" : "p(t)") + "</text>\n";
    svg += "</g>\n</svg>\n";
    return svg;
}

std::string scatter_export(const MinimaDatabase& db) {
    if (db.records.empty()) throw InputError("database has no minima");
    const char* g = "%.9g";
    const std::string layers = std::to_string(db.layers);
    std::string out = "kind,energy,p_solution,p_alternative,layers\n";
    for (const auto& r : db.records) {
        out += "minimum," + num(r.energy, g) + "," + num(r.p_solution, g) + "," +
               (r.p_alternative ? num(*r.p_alternative, g) : std::string()) + "," + layers + "\n";
    }
    for (const auto& v : solution_hull(db).vertices)
        out += "hull_s," + num(v.energy, g) + "," + num(v.probability, g) + ",," + layers + "\n";
    for (const auto& v : alternative_hull(db).vertices)
        out += "hull_t," + num(v.energy, g) + ",," + num(v.probability, g) + "," + layers + "\n";
    return out;
}

}  // namespace qland
