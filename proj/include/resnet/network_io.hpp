#pragma once

// Text formats.
//
// Network: one edge per line, `u v c`, with c a positive decimal. Lines
// starting with `#` and blank lines are ignored. Vertices are ordered by first
// appearance; repeated edges are parallel resistors and merge.
//
// Measure: one `v m` line per vertex, same comment rules.
//
// Resistance matrix: CSV whose header row lists the vertex labels, followed by
// one row of values per vertex in header order.

#include <iosfwd>
#include <string>

#include "resnet/network.hpp"

namespace resnet {

Network read_network(std::istream& in);
Network read_network_file(const std::string& path);
void write_network(std::ostream& out, const Network& net);

// Every vertex of `net` must receive exactly one weight.
VertexMeasure read_measure(std::istream& in, const Network& net);
void write_measure(std::ostream& out, const Network& net, const VertexMeasure& mu);

void write_resistance_csv(std::ostream& out, const ResistanceMatrix& r);
ResistanceMatrix read_resistance_csv(std::istream& in);

// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace resnet
