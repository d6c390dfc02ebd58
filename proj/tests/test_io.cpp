#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

#include "polyvol/io.hpp"
#include "polyvol/rectify.hpp"

using namespace polyvol;

namespace {

ErrorCode parseCode(const std::string& text) {
  std::istringstream in(text);
  try {
    parseInput(in);
  } catch (const Error& err) {
    return err.code();
  }
  ADD_FAILURE() << "parsed: " << text;
  return ErrorCode::ParseError;
}

}  // namespace

TEST(Format, TwelveDigits) {
  EXPECT_EQ(formatNumber(3.663862376708876), "3.66386237671");
  EXPECT_EQ(formatNumber(0.5), "0.5");
  EXPECT_EQ(formatNumber(-1e-20), "-1e-20");
  EXPECT_EQ(formatNumber(0.0), "0");
}

TEST(GraphText, RoundTrip) {
  for (const auto& g : {corpus::tetrahedron(), corpus::cube(), corpus::antiprism(5)}) {
    std::ostringstream out;
    writeGraph(out, g);
    std::istringstream in(out.str());
    const auto back = parseGraph(in);
    EXPECT_EQ(back.faces(), g.faces());
    EXPECT_EQ(back.vertexCount(), g.vertexCount());
  }
}

TEST(GraphText, CommentsAndBlankLines) {
  std::istringstream in("# K4\n\nV 4   # four vertices\nF 0 1 2\nF 0 3 1\n  F 1 3 2\nF 0 2 3\n");
  const auto g = parseGraph(in);
  EXPECT_TRUE(isomorphic(g, corpus::tetrahedron()));
}

TEST(PolyhedronText, RoundTrip) {
  const std::vector<Polyhedron> ps{shapes::regularTetrahedron(0.5), shapes::regularTetrahedron(1.6),
                                   shapes::cube(0.7), shapes::pyramid(5, 0.6, -0.3, 1.3)};
  for (const auto& p : ps) {
    std::ostringstream out;
    writePolyhedron(out, p);
    std::istringstream in(out.str());
    const auto q = parsePolyhedron(in);
    EXPECT_EQ(q.skeleton().faces(), p.skeleton().faces());
    for (int f = 0; f < p.faceCount(); ++f) {
      EXPECT_LT((q.plane(f).normal() - p.plane(f).normal()).norm(), 1e-11);
    }
  }
}

TEST(PolyhedronText, RectificationReadsBack) {
  const auto r = rectification(corpus::cube());
  std::ostringstream out;
  writePolyhedron(out, r);
  std::istringstream in(out.str());
  const auto q = parsePolyhedron(in);
  EXPECT_TRUE(q.rectified());
  EXPECT_NEAR(volume(q).value, volume(r).value, 1e-8);
}

TEST(InputText, DispatchOnKeyword) {
  std::istringstream g("V 4\nF 0 1 2\nF 0 3 1\nF 1 3 2\nF 0 2 3\n");
  EXPECT_TRUE(std::holds_alternative<PlanarGraph>(parseInput(g)));
  std::ostringstream out;
  writePolyhedron(out, shapes::cube(0.5));
  std::istringstream p(out.str());
  EXPECT_TRUE(std::holds_alternative<Polyhedron>(parseInput(p)));
}

TEST(InputText, Errors) {
  EXPECT_EQ(parseCode(""), ErrorCode::ParseError);
  EXPECT_EQ(parseCode("# nothing\n"), ErrorCode::ParseError);
  EXPECT_EQ(parseCode("Q 3\n"), ErrorCode::ParseError);
  EXPECT_EQ(parseCode("V x\nF 0 1 2\n"), ErrorCode::ParseError);
  EXPECT_EQ(parseCode("V 4\nF 0 1 9\n"), ErrorCode::ParseError);
  EXPECT_EQ(parseCode("V 4\nF 0 1\n"), ErrorCode::ParseError);
  EXPECT_EQ(parseCode("V 4\n"), ErrorCode::ParseError);
  EXPECT_EQ(parseCode("P 2\nN 0 0 0 1\n"), ErrorCode::ParseError);
  EXPECT_EQ(parseCode("P 1\nN 0 0 0 1.5e\nV 4\nF 0 1 2\n"), ErrorCode::ParseError);
  // Well-formed text with a bad face list is a domain error, not a parse error.
  EXPECT_EQ(parseCode("V 4\nF 0 1 2\nF 0 1 3\n"), ErrorCode::NotPolyhedral);
}

TEST(InputText, ErrorsCarryLineNumbers) {
  std::istringstream in("# header\nV 4\nF 0 1 2\nF 0 3 oops\n");
  try {
    parseGraph(in);
    FAIL();
  } catch (const Error& err) {
    EXPECT_NE(err.detail().find("line 4"), std::string::npos) << err.detail();
  }
}

TEST(TraceCsv, HeaderAndRows) {
  FlowOptions o;
  o.seed = 5;
  const auto trace = runFlow(shapes::regularTetrahedron(0.5), o);
  std::ostringstream a, b;
  writeTraceCsv(a, trace);
  writeTraceCsv(b, runFlow(shapes::regularTetrahedron(0.5), o));
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,volume,vol_error,event,skeleton_hash");
  std::size_t rows = 0;
  bool saw_event = false;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    saw_event |= line.find("VertexBecameIdeal") != std::string::npos;
  }
  EXPECT_EQ(rows, trace.samples.size());
  EXPECT_TRUE(saw_event);
}
