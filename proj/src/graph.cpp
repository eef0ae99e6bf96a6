#include "qland/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_set>
#include <utility>

#include "qland/errors.hpp"

namespace qland {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
        if (pos >= s.size()) break;
        std::size_t end = pos;
        while (end < s.size() && s[end] != ' ' && s[end] != '\t') ++end;
        out.push_back(s.substr(pos, end - pos));
        pos = end;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    if constexpr (std::is_floating_point_v<T>) {
        if (first != last && *first == '+') ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

int pair_index(int i, int j, int n) {
    // lexicographic rank of (i, j), i < j
    return i * n - i * (i + 1) / 2 + (j - i - 1);
}

bool is_connected(int n, const std::vector<Edge>& edges) {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    int components = n;
    for (const auto& e : edges) {
        const int a = find(e.i);
        const int b = find(e.j);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

std::vector<std::vector<int>> pair_permutation_maps(int n) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    const int pairs = n * (n - 1) / 2;
    std::vector<std::vector<int>> maps;
    do {
        std::vector<int> m(pairs);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const int a = std::min(perm[i], perm[j]);
                const int b = std::max(perm[i], perm[j]);
                m[pair_index(i, j, n)] = pair_index(a, b, n);
            }
        }
        maps.push_back(std::move(m));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return maps;
}

std::uint64_t apply_map(std::uint64_t mask, const std::vector<int>& map) {
    std::uint64_t out = 0;
    for (std::size_t b = 0; b < map.size(); ++b) {
        if (mask >> b & 1U) out |= std::uint64_t{1} << map[b];
    }
    return out;
}

std::uint64_t edge_mask(const WeightedGraph& g) {
    std::uint64_t mask = 0;
    for (const auto& e : g.edges()) mask |= std::uint64_t{1} << pair_index(e.i, e.j, g.vertex_count());
    return mask;
}

std::vector<Edge> edges_from_mask(std::uint64_t mask, int n) {
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (mask >> pair_index(i, j, n) & 1U) edges.push_back({i, j, 1.0});
        }
    }
    return edges;
}

std::string format_weight(double w) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", w);
    return buf;
}

}  // namespace

WeightedGraph::WeightedGraph(int n_vertices, std::vector<Edge> edges) : n_(n_vertices) {
    if (n_vertices < 2) throw InputError("graph needs at least 2 vertices");
    if (edges.empty()) throw InputError("graph needs at least one edge");
    for (auto& e : edges) {
        if (e.i == e.j) throw InputError("self-loop on vertex " + std::to_string(e.i));
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= n_vertices) throw InputError("edge index out of range");
        if (!std::isfinite(e.w)) throw InputError("non-finite edge weight");
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j) {
            throw InputError("duplicate edge " + std::to_string(edges[k].i) + " " +
                             std::to_string(edges[k].j));
        }
    }
    edges_ = std::move(edges);
}

double WeightedGraph::total_weight() const noexcept {
    double total = 0.0;
    for (const auto& e : edges_) total += e.w;
    return total;
}

bool WeightedGraph::has_integer_weights() const noexcept {
    return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.w == std::round(e.w); });
}

double WeightedGraph::cut_weight(std::uint64_t z) const noexcept {
    double cut = 0.0;
    for (const auto& e : edges_) {
        if (((z >> e.i) ^ (z >> e.j)) & 1U) cut += e.w;
    }
    return cut;
}

std::vector<int> WeightedGraph::degrees() const {
    std::vector<int> deg(n_, 0);
    for (const auto& e : edges_) {
        ++deg[e.i];
        ++deg[e.j];
    }
    return deg;
}

WeightedGraph parse_graph(std::string_view text) {
    std::optional<int> declared;
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> seen;
    int line_no = 0;
    bool first_content = true;
    std::size_t pos = 0;
    int max_index = -1;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (first_content && fields[0] == "n") {
            first_content = false;
            int n = 0;
            if (fields.size() != 2) throw ParseError(ParseError::Kind::Malformed, line_no, "expected 'n <count>'");
            if (!parse_number(fields[1], n)) throw ParseError(ParseError::Kind::NonNumeric, line_no, "non-numeric vertex count");
            if (n < 2) throw ParseError(ParseError::Kind::OutOfRange, line_no, "vertex count must be at least 2");
            declared = n;
            continue;
        }
        first_content = false;
        if (fields.size() != 3) throw ParseError(ParseError::Kind::Malformed, line_no, "expected 'i j w'");
        Edge e;
        if (!parse_number(fields[0], e.i) || !parse_number(fields[1], e.j)) {
            throw ParseError(ParseError::Kind::NonNumeric, line_no, "non-numeric vertex index");
        }
        if (!parse_number(fields[2], e.w) || !std::isfinite(e.w)) {
            throw ParseError(ParseError::Kind::NonNumeric, line_no, "non-numeric weight");
        }
        if (e.i < 0 || e.j < 0 || (declared && (e.i >= *declared || e.j >= *declared))) {
            throw ParseError(ParseError::Kind::OutOfRange, line_no, "vertex index out of range");
        }
        if (e.i == e.j) throw ParseError(ParseError::Kind::SelfLoop, line_no, "self-loop on vertex " + std::to_string(e.i));
        if (e.i > e.j) std::swap(e.i, e.j);
        if (!seen.insert({e.i, e.j}).second) {
            throw ParseError(ParseError::Kind::DuplicateEdge, line_no,
                             "duplicate edge " + std::to_string(e.i) + " " + std::to_string(e.j));
        }
        max_index = std::max(max_index, e.j);
        edges.push_back(e);
    }
    if (edges.empty()) throw ParseError(ParseError::Kind::Empty, line_no, "no edges");
    const int n = declared.value_or(max_index + 1);
    return WeightedGraph(n, std::move(edges));
}

std::string serialize_graph(const WeightedGraph& g) {
    std::ostringstream out;
    out << "n " << g.vertex_count() << '\n';
    for (const auto& e : g.edges()) out << e.i << ' ' << e.j << ' ' << format_weight(e.w) << '\n';
    return out.str();
}

WeightedGraph complete_graph(int n) {
    if (n < 2) throw InputError("complete graph needs n >= 2");
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) edges.push_back({i, j, 1.0});
    return WeightedGraph(n, std::move(edges));
}

std::uint64_t canonical_code(const WeightedGraph& g) {
    const int n = g.vertex_count();
    if (n > 8) throw SizeError("canonical_code supports at most 8 vertices");
    const auto maps = pair_permutation_maps(n);
    const auto mask = edge_mask(g);
    std::uint64_t best = ~std::uint64_t{0};
    for (const auto& m : maps) best = std::min(best, apply_map(mask, m));
    return best;
}

std::vector<WeightedGraph> cubic_graphs(int n) {
    if (n != 6 && n != 8) throw InputError("cubic_graphs supports n = 6 or n = 8");

    const auto maps = pair_permutation_maps(n);
    std::unordered_set<std::uint64_t> known;
    std::vector<std::uint64_t> classes;

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);

    std::vector<int> deg(n, 0);
    std::uint64_t mask = 0;
    // Pairs are visited in lexicographic order, so once pair (i, *) is passed
    // vertex i can gain no further edges.
    auto recurse = [&](auto&& self, std::size_t k) -> void {
        if (k == pairs.size()) {
            if (known.contains(mask)) return;
            if (!is_connected(n, edges_from_mask(mask, n))) return;
            std::uint64_t canon = ~std::uint64_t{0};
            for (const auto& m : maps) {
                const auto image = apply_map(mask, m);
                known.insert(image);
                canon = std::min(canon, image);
            }
            classes.push_back(canon);
            return;
        }
        const auto [i, j] = pairs[k];
        const bool closes_i = k + 1 == pairs.size() || pairs[k + 1].first != i;
        const bool closes_all = k + 1 == pairs.size();
        auto complete = [&] {
            if (closes_i && deg[i] != 3) return false;
            return !closes_all || deg[j] == 3;
        };
        if (deg[i] < 3 && deg[j] < 3) {
            ++deg[i];
            ++deg[j];
            mask |= std::uint64_t{1} << k;
            if (complete()) self(self, k + 1);
            mask &= ~(std::uint64_t{1} << k);
            --deg[i];
            --deg[j];
        }
        if (complete()) self(self, k + 1);
    };
    recurse(recurse, 0);

    std::sort(classes.begin(), classes.end());
    std::vector<WeightedGraph> out;
    for (auto code : classes) out.emplace_back(n, edges_from_mask(code, n));
    return out;
}

WeightedGraph variable_weight_graph(double x) {
    std::vector<Edge> edges{{0, 1, 3.0}, {1, 2, 2.0}, {2, 3, 1.0}, {0, 3, 4.0}};
    if (x != 0.0) edges.push_back({1, 3, x});
    return WeightedGraph(4, std::move(edges));
}

SolutionSet brute_force_maxcut(const WeightedGraph& g, bool with_alternative) {
    const int n = g.vertex_count();
    if (n > kMaxVertices) throw SizeError("brute-force Max-Cut limited to " + std::to_string(kMaxVertices) + " vertices");
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::vector<double> cuts(dim);
    double best = -std::numeric_limits<double>::infinity();
    for (std::uint64_t z = 0; z < dim; ++z) {
        cuts[z] = g.cut_weight(z);
        best = std::max(best, cuts[z]);
    }
    SolutionSet out;
    out.cut_value = best;
    double second = -std::numeric_limits<double>::infinity();
    for (std::uint64_t z = 0; z < dim; ++z) {
        if (std::abs(cuts[z] - best) <= kCutTolerance) {
            out.solutions.push_back(z);
        } else {
            second = std::max(second, cuts[z]);
        }
    }
    if (with_alternative && std::isfinite(second)) {
        out.alternative_cut = second;
        for (std::uint64_t z = 0; z < dim; ++z) {
            if (std::abs(cuts[z] - second) <= kCutTolerance) out.alternative.push_back(z);
        }
    }
    return out;
}

namespace {

// Letter labels resolved by matching basin-hopping M/HCMP signatures against the
// published tables; see docs/cubic_labels.md.
struct CubicLabel {
    const char* label;
    int n;
    int index;
};
constexpr CubicLabel kCubicLabels[] = {
    {"6a", 6, 1}, {"6b", 6, 0}, {"8a", 8, 3}, {"8b", 8, 1}, {"8c", 8, 4}, {"8d", 8, 0}, {"8e", 8, 2},
};

std::optional<int> parse_small_int(std::string_view s) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace

std::optional<WeightedGraph> builtin_graph(std::string_view name) {
    if (name.size() >= 2 && name[0] == 'K') {
        auto n = parse_small_int(name.substr(1));
        if (n && *n >= 2 && *n <= kMaxVertices) return complete_graph(*n);
        return std::nullopt;
    }
    if (name.size() == 2 && name[0] == 'G' && name[1] >= '2' && name[1] <= '5') {
        constexpr double xs[] = {0.0, 3.0, 4.0, 5.0};
        return variable_weight_graph(xs[name[1] - '2']);
    }
    for (const auto& c : kCubicLabels) {
        if (name == c.label) return cubic_graphs(c.n)[c.index];
    }
    for (int n : {6, 8}) {
        const std::string prefix = "cubic" + std::to_string(n) + "-";
        if (name.starts_with(prefix)) {
            auto k = parse_small_int(name.substr(prefix.size()));
            auto all = cubic_graphs(n);
            if (k && *k >= 0 && *k < static_cast<int>(all.size())) return all[*k];
            return std::nullopt;
        }
    }
    return std::nullopt;
}

std::vector<std::uint64_t> builtin_alternative_states(std::string_view name) {
    // abab sets bits 1 and 3, aabb sets bits 2 and 3; each with its complement.
    if (name == "G3") return {0b0011, 0b1100};
    if (name == "G5") return {0b0101, 0b1010};
    return {};
}

std::vector<std::string> builtin_graph_names() {
    std::vector<std::string> out;
    for (int n = 3; n <= 8; ++n) out.push_back("K" + std::to_string(n));
    for (int k = 2; k <= 5; ++k) out.push_back("G" + std::to_string(k));
    for (const auto& c : kCubicLabels) out.emplace_back(c.label);
    for (int n : {6, 8}) {
        const int count = n == 6 ? 2 : 5;
        for (int k = 0; k < count; ++k) out.push_back("cubic" + std::to_string(n) + "-" + std::to_string(k));
    }
    return out;
}

}  // namespace qland
