#include "polyvol/io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "polyvol/rectify.hpp"

namespace polyvol {

namespace {

// Non-empty lines with comments stripped, tokenized, with line numbers.
struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> out;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (const auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream ss(text);
    Line line{number, {}};
    for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

[[noreturn]] void fail(const Line& line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line.number) + ": " + what);
}

long toInt(const Line& line, const std::string& tok) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(tok, &used);
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + tok + "'");
  }
  if (used != tok.size()) fail(line, "expected an integer, got '" + tok + "'");
  return v;
}

double toDouble(const Line& line, const std::string& tok) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + tok + "'");
  }
  if (used != tok.size()) fail(line, "expected a number, got '" + tok + "'");
  return v;
}

PlanarGraph graphFrom(const std::vector<Line>& lines, std::size_t& pos) {
  if (pos >= lines.size()) throw Error(ErrorCode::ParseError, "missing V line");
  const Line& head = lines[pos];
  if (head.tokens[0] != "V" || head.tokens.size() != 2) fail(head, "expected 'V <count>'");
  const long n = toInt(head, head.tokens[1]);
  if (n <= 0) fail(head, "vertex count must be positive");
  ++pos;
  std::vector<std::vector<int>> faces;
  for (; pos < lines.size(); ++pos) {
    const Line& line = lines[pos];
    if (line.tokens[0] != "F") fail(line, "expected 'F v0 v1 ...'");
    if (line.tokens.size() < 4) fail(line, "a face needs at least three vertices");
    std::vector<int> face;
    for (std::size_t i = 1; i < line.tokens.size(); ++i) {
      const long v = toInt(line, line.tokens[i]);
      if (v < 0 || v >= n) fail(line, "vertex " + line.tokens[i] + " out of range");
      face.push_back(static_cast<int>(v));
    }
    faces.push_back(std::move(face));
  }
  if (faces.empty()) throw Error(ErrorCode::ParseError, "no faces");
  return PlanarGraph::fromFaces(static_cast<int>(n), std::move(faces));
}

Polyhedron polyhedronFrom(const std::vector<Line>& lines, std::size_t& pos) {
  const Line& head = lines[pos];
  if (head.tokens[0] != "P" || head.tokens.size() != 2) fail(head, "expected 'P <face-count>'");
  const long count = toInt(head, head.tokens[1]);
  if (count <= 0) fail(head, "face count must be positive");
  ++pos;
  std::vector<OrientedPlane> planes;
  for (long i = 0; i < count; ++i, ++pos) {
    if (pos >= lines.size()) throw Error(ErrorCode::ParseError, "missing N lines");
    const Line& line = lines[pos];
    if (line.tokens[0] != "N" || line.tokens.size() != 5) fail(line, "expected 'N a b c d'");
    Vec4 n;
    for (int k = 0; k < 4; ++k) n[k] = toDouble(line, line.tokens[k + 1]);
    planes.push_back(OrientedPlane::fromNormal(n));
  }
  const PlanarGraph g = graphFrom(lines, pos);
  if (g.faceCount() != count) {
    throw Error(ErrorCode::ParseError, "plane count differs from the face count of the skeleton");
  }
  try {
    return buildPolyhedron(planes, g);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::EdgeMissesBall) throw;
    BuildOptions opts;
    opts.rectified = true;
    Polyhedron p = buildPolyhedron(planes, g, opts);
    if (tangencyResidual(p) > 1e-8) throw;
    return p;
  }
}

}  // namespace

std::string formatNumber(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

PlanarGraph parseGraph(std::istream& in) {
  const auto lines = tokenize(in);
  std::size_t pos = 0;
  return graphFrom(lines, pos);
}

void writeGraph(std::ostream& out, const PlanarGraph& g) {
  out << "V " << g.vertexCount() << '\n';
  for (const auto& f : g.faces()) {
    out << 'F';
    for (int v : f) out << ' ' << v;
    out << '\n';
  }
}

Polyhedron parsePolyhedron(std::istream& in) {
  const auto lines = tokenize(in);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty input");
  std::size_t pos = 0;
  return polyhedronFrom(lines, pos);
}

void writePolyhedron(std::ostream& out, const Polyhedron& p) {
  out << "P " << p.faceCount() << '\n';
  for (const auto& pl : p.planes()) {
    out << 'N';
    for (int k = 0; k < 4; ++k) out << ' ' << formatNumber(pl.normal()[k]);
    out << '\n';
  }
  writeGraph(out, p.skeleton());
}

Input parseInput(std::istream& in) {
  const auto lines = tokenize(in);
  if (lines.empty()) throw Error(ErrorCode::ParseError, "empty input");
  std::size_t pos = 0;
  if (lines[0].tokens[0] == "P") return polyhedronFrom(lines, pos);
  if (lines[0].tokens[0] == "V") return graphFrom(lines, pos);
  fail(lines[0], "expected 'V' or 'P'");
}

Input readInputFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return parseInput(in);
}

void writeTraceCsv(std::ostream& out, const FlowTrace& trace) {
  out << "t,volume,vol_error,event,skeleton_hash\n";
  for (const auto& s : trace.samples) {
    out << formatNumber(s.t) << ',' << formatNumber(s.volume.value) << ','
        << formatNumber(s.volume.error_estimate) << ',' << s.event << ',' << s.skeleton_hash << '\n';
  }
}

}  // namespace polyvol
