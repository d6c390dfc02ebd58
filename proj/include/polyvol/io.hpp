#pragma once

// Text formats: graphs, plane tuples and flow traces.

#include <iosfwd>
#include <string>
#include <variant>

#include "polyvol/flow.hpp"
#include "polyvol/graph.hpp"
#include "polyvol/polyhedron.hpp"

namespace polyvol {

// 12 significant digits, '.' as decimal separator.
std::string formatNumber(double x);

// `V <count>` then `F v0 v1 ...` per face; `#` starts a comment.
PlanarGraph parseGraph(std::istream& in);
void writeGraph(std::ostream& out, const PlanarGraph& g);

// `P <face-count>`, one `N a b c d` line per face, then the skeleton.
Polyhedron parsePolyhedron(std::istream& in);
void writePolyhedron(std::ostream& out, const Polyhedron& p);

// Either format, told apart by the first keyword.
using Input = std::variant<PlanarGraph, Polyhedron>;
Input parseInput(std::istream& in);
Input readInputFile(const std::string& path);

// Header `t,volume,vol_error,event,skeleton_hash`, one row per sample.
void writeTraceCsv(std::ostream& out, const FlowTrace& trace);

}  // namespace polyvol
