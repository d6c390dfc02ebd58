#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "polyvol/flow.hpp"
#include "polyvol/io.hpp"
#include "polyvol/rectify.hpp"
#include "polyvol/volume.hpp"
#include "selftest.hpp"

using namespace polyvol;

namespace {

struct Settings {
  std::string input;
  std::string output;
  double tolerance = 1e-5;
  double tau = kIdealTolerance;
  long budget = 10'000'000;
  std::uint64_t seed = 1;
  std::vector<double> angles;
};

Polyhedron needPolyhedron(const Input& in) {
  if (const auto* p = std::get_if<Polyhedron>(&in)) return *p;
  throw Error(ErrorCode::ParseError, "expected a polyhedron file (P ...), got a graph");
}

PlanarGraph skeletonOf(const Input& in) {
  if (const auto* g = std::get_if<PlanarGraph>(&in)) return *g;
  return std::get<Polyhedron>(in).skeleton();
}

std::string volumeLine(const VolumeResult& v) {
  return "VOL " + formatNumber(v.value) + " " + formatNumber(v.error_estimate) + "\n";
}

void checkBudget(const VolumeResult& v) {
  if (v.budget_exceeded) {
    throw Error(ErrorCode::QuadratureBudgetExceeded,
                "best estimate " + formatNumber(v.value) + " after " + std::to_string(v.evaluations) +
                    " evaluations");
  }
}

int classify(const Settings& s, std::ostream& out) {
  const Polyhedron p = needPolyhedron(readInputFile(s.input));
  const auto rep = classifyVertices(p, s.tau);
  for (int v = 0; v < p.vertexCount(); ++v) {
    out << pointKindName(rep.kinds[v]) << ' ' << vertexStatusName(rep.status[v]);
    if (rep.witness[v] >= 0) out << ' ' << rep.witness[v];
    out << '\n';
  }
  out << "OVERALL " << propernessName(rep.overall) << '\n';
  return 0;
}

int anglesCheck(const Settings& s, std::ostream& out) {
  const Input in = readInputFile(s.input);
  const PlanarGraph g = skeletonOf(in);
  AngleVector theta = s.angles;
  if (theta.empty()) {
    if (!std::holds_alternative<Polyhedron>(in)) {
      throw Error(ErrorCode::AngleOutOfRange, "a graph input needs --angles");
    }
    theta = dihedralAngles(std::get<Polyhedron>(in));
  }
  const auto r = checkBaoBonahon(g, theta);
  out << admissibilityName(r.status);
  if (r.status != AdmissibilityStatus::Admissible) {
    out << " edges";
    for (int e : r.witness_edges) out << ' ' << e;
    out << " faces";
    for (int f : r.witness_faces) out << ' ' << f;
    out << " sum " << formatNumber(r.witness_sum) << " bound " << formatNumber(r.witness_bound);
  }
  out << '\n';
  return 0;
}

VolumeOptions volumeOptions(const Settings& s) {
  VolumeOptions vo;
  vo.tolerance = s.tolerance;
  vo.max_evaluations = s.budget;
  return vo;
}

int volumeCmd(const Settings& s, std::ostream& out) {
  const Polyhedron p = needPolyhedron(readInputFile(s.input));
  const auto v = volume(p, volumeOptions(s));
  out << volumeLine(v);
  checkBudget(v);
  return 0;
}

int rectify(const Settings& s, std::ostream& out) {
  const Polyhedron p = rectification(skeletonOf(readInputFile(s.input)));
  const auto v = volume(p, volumeOptions(s));
  writePolyhedron(out, p);
  out << volumeLine(v);
  checkBudget(v);
  return 0;
}

int flow(const Settings& s, std::ostream& out) {
  Polyhedron p = needPolyhedron(readInputFile(s.input));
  if (classifyVertices(p).hasKind(PointKind::Ideal)) p = nudgeIdealVertices(p);
  FlowOptions fo;
  fo.seed = s.seed;
  fo.final_tolerance = s.tolerance;
  writeTraceCsv(out, runFlow(p, fo));
  return 0;
}

int selftestCmd(const Settings& s, std::ostream& out) {
  int failed = 0;
  for (const auto& o : selftest::runAll(out, s.seed == 1 ? 20240601 : s.seed)) failed += !o.pass;
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volumes of generalized hyperbolic polyhedra in the Klein model"};
  app.require_subcommand(1);
  Settings s;

  auto addInput = [&](CLI::App* sub) {
    sub->add_option("input", s.input, "graph or polyhedron file")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", s.output, "write here instead of stdout");
  };
  auto addVolume = [&](CLI::App* sub) {
    sub->add_option("--tolerance", s.tolerance, "volume tolerance")->capture_default_str();
    sub->add_option("--budget", s.budget, "quadrature evaluation budget")->capture_default_str();
  };

  auto* classify_cmd = app.add_subcommand("classify", "per-vertex kind and properness status");
  addInput(classify_cmd);
  classify_cmd->add_option("--tau", s.tau, "ideal tolerance")->capture_default_str();

  auto* angles_cmd = app.add_subcommand("angles-check", "Bao-Bonahon admissibility of an angle vector");
  addInput(angles_cmd);
  angles_cmd->add_option("--angles", s.angles, "dihedral angles by edge id (default: those of the polyhedron)")
      ->delimiter(',');

  auto* volume_cmd = app.add_subcommand("volume", "volume of the truncation, printed as VOL <value> <error>");
  addInput(volume_cmd);
  addVolume(volume_cmd);

  auto* rectify_cmd = app.add_subcommand("rectify", "rectification plane tuple and its volume");
  addInput(rectify_cmd);
  addVolume(rectify_cmd);

  auto* flow_cmd = app.add_subcommand("flow", "angle-scaling flow trace as CSV");
  addInput(flow_cmd);
  flow_cmd->add_option("--seed", s.seed, "perturbation seed (POLYVOL_SEED overrides)")->capture_default_str();
  flow_cmd->add_option("--tolerance", s.tolerance, "final volume tolerance")->capture_default_str();

  auto* selftest_cmd = app.add_subcommand("selftest", "acceptance criteria, one PASS/FAIL line each");
  selftest_cmd->add_option("--seed", s.seed, "random seed (POLYVOL_SEED overrides)");
  selftest_cmd->add_option("-o,--output", s.output, "write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (const char* env = std::getenv("POLYVOL_SEED")) {
    try {
      s.seed = std::stoull(env);
    } catch (const std::exception&) {
      std::cerr << "POLYVOL_SEED is not an integer: " << env << '\n';
      return 2;
    }
  }

  std::ostringstream buffer;
  int code = 0;
  try {
    if (*classify_cmd) code = classify(s, buffer);
    else if (*angles_cmd) code = anglesCheck(s, buffer);
    else if (*volume_cmd) code = volumeCmd(s, buffer);
    else if (*rectify_cmd) code = rectify(s, buffer);
    else if (*flow_cmd) code = flow(s, buffer);
    else code = selftestCmd(s, buffer);
  } catch (const Error& err) {
    std::cout << buffer.str();
    std::cout.flush();
    std::cerr << "ERR " << errorCodeName(err.code()) << ' ' << err.detail() << '\n';
    return 1;
  }
  if (s.output.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream file(s.output);
    if (!file) {
      std::cerr << "cannot write " << s.output << '\n';
      return 2;
    }
    file << buffer.str();
  }
  return code;
}
