#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qland/landscape.hpp"

namespace qland {

struct TreeLeaf {
    std::size_t minimum = 0;  // index into the network's minima
    double energy = 0.0;
    double p_solution = 0.0;
    std::optional<double> p_alternative;
};

/// Superbasin: minima that interconvert below `level` (index into
/// threshold_levels). Leaf nodes hold a single minimum and end at its energy.
struct TreeNode {
    int level = 0;
    int parent = -1;
    std::vector<int> children;
    std::vector<std::size_t> minima;  // sorted by energy
};

struct DisconnectivityTree {
    std::vector<double> threshold_levels;  // descending, uniform spacing
    std::vector<TreeNode> nodes;
    std::vector<int> roots;
    std::vector<TreeLeaf> leaves;  // one per minimum, by minimum index
    /// Node at the lowest level containing each minimum.
    std::vector<int> leaf_node;
};

struct TreeEdge {
    std::size_t a = 0, b = 0;
    double energy = 0.0;
};

/// Builds the tree from energies alone. spacing <= 0 selects
/// (E_maxTS - E_GM) / 40; `top` defaults to one spacing above the highest TS.
DisconnectivityTree build_disconnectivity(const std::vector<TreeLeaf>& minima, const std::vector<TreeEdge>& edges,
                                          double spacing = 0.0, std::optional<double> top = std::nullopt);

DisconnectivityTree build_disconnectivity(const KineticTransitionNetwork& ktn, double spacing = 0.0,
                                          std::optional<double> top = std::nullopt);

enum class ColorChannel { Solution, Alternative };

struct RenderOptions {
    ColorChannel channel = ColorChannel::Solution;
    bool grayscale = false;
    std::string title;
};

/// SVG 1.1 drawing with an energy axis and a probability colorbar.
std::string render_disconnectivity(const DisconnectivityTree& tree, const RenderOptions& options = {});

/// Colormap value at p in [0, 1] as "#rrggbb".
std::string colormap(double p, bool grayscale = false);

/// Comma-separated rows: kind,energy,p_solution,p_alternative,layers.
/// kind is "minimum", "hull_s" or "hull_t"; floats at 9 significant digits.
std::string scatter_export(const MinimaDatabase& db);

}  // namespace qland
