#pragma once

#include <string>
#include <string_view>

#include "qland/landscape.hpp"
#include "qland/minima.hpp"

namespace qland {

/// Plain-text minima database: "key value" header lines, the embedded graph,
/// then one record per line: energy rms p_solution p_alternative angles...
/// Absent p_alternative is written as "-". Floats use 17 significant digits.
std::string serialize_database(const MinimaDatabase& db);
MinimaDatabase parse_database(std::string_view text);

/// Transition states: energy rms negative_eigenvalue min_a min_b angles...
std::string serialize_transition_states(const KineticTransitionNetwork& ktn);

/// Rebuilds a network from its minima and transition-state files.
KineticTransitionNetwork parse_network(std::string_view minima_text, std::string_view ts_text);

std::string read_file(const std::string& path);
/// Writes via a temporary file renamed into place.
void write_file(const std::string& path, std::string_view content);

}  // namespace qland
