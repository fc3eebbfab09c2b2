#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "bisbm/model.hpp"
#include "bisbm/planting.hpp"

namespace bisbm {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

// Text formats. Readers skip blank lines and lines starting with '#', and throw
// InvalidParameter on malformed input.
//
//   graph:      "bisbm n1 n2 p delta", then "u v" per edge, sorted by (u, v)
//   labeling:   one +1 / -1 per line
//   planting:   "k", then 2^k lines "x_1 ... x_k mass" with x_i in {+1, -1}
//   hypergraph: "phyp n k", then one tuple per line with an optional 0/1 label

void write_graph(std::ostream& os, const BipartiteGraph& g);
BipartiteGraph read_graph(std::istream& is);

void write_labeling(std::ostream& os, const Labeling& l);
Labeling read_labeling(std::istream& is);

void write_planting(std::ostream& os, const PlantingFunction& q);
PlantingFunction read_planting(std::istream& is);

void write_hypergraph(std::ostream& os, const PlantedHypergraph& h);
/// sigma is not part of the format and is left empty.
PlantedHypergraph read_hypergraph(std::istream& is);

void save_graph(const std::filesystem::path& path, const BipartiteGraph& g);
BipartiteGraph load_graph(const std::filesystem::path& path);
void save_labeling(const std::filesystem::path& path, const Labeling& l);
Labeling load_labeling(const std::filesystem::path& path);

}  // namespace bisbm
