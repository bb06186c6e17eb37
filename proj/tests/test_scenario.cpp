#include "minidx/errors.hpp"
#include "minidx/scenario.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace minidx;

namespace {
Config parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}
int error_line(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}
}  // namespace

TEST_CASE("globals, sections and comments") {
  Config c = parse(
      "seed = 7  # shared\n"
      "samples = 50\n"
      "\n"
      "[scenario]\n"
      "id = a\n"
      "ambient = sphere(3)\n"
      "hypersurface = clifford-torus\n"
      "resolution = 24, 24\n"
      "tasks = spectrum, certify\n"
      "eta = -0.5\n"
      "tol.identity = 1e-6\n"
      "[scenario]\n"
      "id = b\n"
      "ambient = cp(2)\n"
      "tasks = all\n"
      "seed = 9\n");
  REQUIRE(c.scenarios.size() == 2);
  const Scenario& a = c.scenarios[0];
  CHECK(a.seed == 7);
  CHECK(a.samples == 50);
  CHECK(a.eta == -0.5);
  CHECK(a.hypersurface->resolution == std::vector<int>{24, 24});
  CHECK(a.tasks == std::vector<Task>{Task::Spectrum, Task::Certify});
  CHECK(a.tolerance("identity") == 1e-6);
  CHECK(a.tolerance("model") == default_tolerances().at("model"));
  CHECK(c.scenarios[1].seed == 9);
  CHECK(c.scenarios[1].tasks.size() == all_tasks().size());
  CHECK(c.scenarios[1].ambient.kind == AmbientKind::ComplexProjectiveVeronese);
}

TEST_CASE("errors carry line numbers") {
  CHECK(error_line("[scenario]\nid = a\nambient = sphere(3)\nbogus = 1\n") == 4);
  CHECK(error_line("[scenario]\nid = a\nambient = sphere(3)\ntasks = spectrum\n[scenario]\nid = a\n"
                   "ambient = sphere(3)\ntasks = bounds\n") == 5);
  CHECK(error_line("id = a\n") == 1);
  CHECK(error_line("[scenario]\nid = a\nambient = sphere(3)\nseed = x\n") == 4);
  CHECK(error_line("[other]\n") == 1);
  CHECK(error_line("[scenario]\nid = a\nambient = torus(2)\n") == 3);
  CHECK(error_line("[scenario]\nid = a\nambient = sphere(3)\nthis line\n") == 4);
  CHECK_THROWS_AS(parse("# nothing\n"), ConfigError);
}

TEST_CASE("task aliases") {
  CHECK(task_from_string("q-identity") == Task::VerifyIdentity);
  CHECK(task_from_string("certificate") == Task::Certify);
  CHECK(task_from_string("bound-table") == Task::Bounds);
  for (Task t : all_tasks()) CHECK(task_from_string(to_string(t)) == t);
}

TEST_CASE("validation rejects incompatible tasks") {
  auto invalid = [](const std::string& body) {
    Config c = parse("[scenario]\nid = x\n" + body);
    CHECK_THROWS_AS(validate(c, {}), ConfigError);
  };
  invalid("ambient = sphere(3)\nhypersurface = clifford-torus\ntasks = borderline\n");
  invalid("ambient = sphere(3)\nhypersurface = equator\ntasks = certify\n");
  invalid("ambient = sphere(3)\ntasks = spectrum\n");
  invalid("ambient = cp(2)\nhypersurface = geodesic-sphere-cp\ntasks = spectrum\n");
  invalid("ambient = cp(2)\nhypersurface = clifford-torus\ntasks = identities\n");
  invalid("ambient = sphere(3)\ntasks = margins\nmargins = cross\n");
  invalid("ambient = sphere(4)\nhypersurface = generalized-clifford\nn = 3\ntasks = verify-identity\n"
          "modes = coordinates\n");
  invalid("ambient = sphere(3)\nhypersurface = clifford-torus\nresolution = 8\ntasks = spectrum\n");
  Config ok = parse("[scenario]\nid = y\nambient = cp(2)\nhypersurface = geodesic-sphere-cp\ntasks = borderline\n");
  CHECK_NOTHROW(validate(ok, {}));
}

TEST_CASE("overrides") {
  Config c = parse("[scenario]\nid = x\nambient = sphere(3)\nhypersurface = clifford-torus\n"
                   "resolution = 40 40\ntasks = spectrum\n");
  RunOptions o;
  o.resolution_scale = 0.5;
  o.seed = 99;
  o.tol_scale = 10.0;
  Scenario s = apply_overrides(c.scenarios[0], o);
  CHECK(s.hypersurface->resolution == std::vector<int>{20, 20});
  CHECK(s.seed == 99);
  CHECK(s.tolerance("identity") == doctest::Approx(10.0 * default_tolerances().at("identity")));
}

TEST_CASE("run_scenario produces the report fields") {
  Config c = parse("[scenario]\nid = t\nambient = sphere(3)\nhypersurface = clifford-torus\n"
                   "resolution = 24 24\ntasks = spectrum certify bounds\nexpect_index = 5\n");
  ScenarioResult r = run_scenario(c.scenarios[0], c.scenarios[0].tasks);
  CHECK_FALSE(r.failed);
  CHECK_FALSE(r.errored);
  CHECK(r.report["spectrum"]["index"] == 5);
  CHECK(r.report["certificate"]["required"] == 1);
  CHECK(r.report["certificate"]["actual"] == 5);
  CHECK(r.report["certificate"]["verdict"] == "pass");
  CHECK(r.report["bounds"]["bound"] == 5);
  CHECK(r.report["verdict"] == "pass");
  CHECK(r.files.count("t_spectrum.csv") == 1);
}

TEST_CASE("a failing verdict gives exit status 1; bad options give 2 and no output") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "minidx-scenario-test";
  fs::remove_all(dir);
  Config c = parse("[scenario]\nid = t\nambient = sphere(3)\nhypersurface = clifford-torus\n"
                   "resolution = 16 16\ntasks = spectrum\nexpect_index = 4\n");
  RunOptions o;
  o.out_dir = dir.string();
  std::ostringstream log;
  CHECK(run_config(c, o, log) == kExitVerdictFailed);
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "t.json"));
  fs::remove_all(dir);
  o.tol_scale = -1.0;
  CHECK(run_config(c, o, log) == kExitConfigError);
  CHECK_FALSE(fs::exists(dir));
}
