#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qland {

/// Largest vertex count handled by exact enumeration and simulation.
inline constexpr int kMaxVertices = 24;

struct Edge {
    int i = 0;
    int j = 0;
    double w = 1.0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph with canonical edge ordering (i < j, sorted).
///
/// Vertex k maps to qubit k, which is bit k (least significant first) of a
/// computational basis index.
class WeightedGraph {
public:
    /// Validates and canonicalizes. Throws InputError on self-loops,
    /// duplicates, out-of-range indices, fewer than 2 vertices or no edges.
    WeightedGraph(int n_vertices, std::vector<Edge> edges);

    int vertex_count() const noexcept { return n_; }
    std::span<const Edge> edges() const noexcept { return edges_; }
    double total_weight() const noexcept;
    bool has_integer_weights() const noexcept;

    /// Total weight of edges whose endpoints differ in bitstring z.
    double cut_weight(std::uint64_t z) const noexcept;

    std::vector<int> degrees() const;

    friend bool operator==(const WeightedGraph&, const WeightedGraph&) = default;

private:
    int n_;
    std::vector<Edge> edges_;
};

/// Maximum cut states found by exhaustive enumeration.
struct SolutionSet {
    double cut_value = 0.0;
    std::vector<std::uint64_t> solutions;  // sorted, complement-closed
    /// Second-best cut states (the competing |t> channel), when requested.
    std::optional<double> alternative_cut;
    std::vector<std::uint64_t> alternative;
};

WeightedGraph parse_graph(std::string_view text);

/// "n <count>" followed by sorted "i j w" lines, weights at 12 significant digits.
std::string serialize_graph(const WeightedGraph& g);

WeightedGraph complete_graph(int n);

/// All connected cubic graphs on n in {6, 8} vertices, one per isomorphism
/// class, ordered by canonical code.
std::vector<WeightedGraph> cubic_graphs(int n);

/// Four-vertex graph with weights (0,1)=3, (1,2)=2, (2,3)=1, (0,3)=4 and a
/// central edge (1,3)=x. x == 0 omits the central edge.
WeightedGraph variable_weight_graph(double x);

/// Canonical code: minimal edge bitmask over all vertex relabelings (n <= 8).
std::uint64_t canonical_code(const WeightedGraph& g);

/// Tolerance used to decide equality of cut weights.
inline constexpr double kCutTolerance = 1e-9;

SolutionSet brute_force_maxcut(const WeightedGraph& g, bool with_alternative = false);

/// Resolves builtin names: K3..K8, G2..G5, 6a, 6b, 8a..8e, cubic6-<k>, cubic8-<k>.
std::optional<WeightedGraph> builtin_graph(std::string_view name);

/// Explicit competing |t> states for G3 (0011/1100) and G5 (0101/1010); empty otherwise.
std::vector<std::uint64_t> builtin_alternative_states(std::string_view name);

/// Names accepted by builtin_graph, in display order.
std::vector<std::string> builtin_graph_names();

}  // namespace qland
