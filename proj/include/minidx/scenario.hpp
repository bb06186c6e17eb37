#pragma once

// Scenario configs and the runner behind the command-line tool.
//
// Config format: flat `key = value` lines, `#` comments, and `[scenario]`
// section headers. Keys before the first section are defaults for every
// scenario. See README.md for the key list.

#include "minidx/bounds.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace minidx {

enum class Task { Identities, Spectrum, VerifyIdentity, Certify, Margins, Borderline, Bounds };
std::string to_string(Task t);
/// Accepts the subcommand names and the aliases q-identity, certificate, bound-table.
Task task_from_string(const std::string& s);
const std::vector<Task>& all_tasks();

struct AmbientSpec {
  AmbientKind kind = AmbientKind::Sphere;
  std::vector<double> args;
  std::string text;

  AmbientPtr build() const;
};

/// `sphere(3)`, `real-projective(3)`, `cp(2)`, `hp(2)`, `circle-sphere(3)`,
/// `sphere-sphere(2,3)`, `ellipsoid(1,1,1,2)`, `radial-graph(3,0.1)`.
AmbientSpec parse_ambient_spec(const std::string& text);

struct HypersurfaceSpec {
  CatalogKind kind = CatalogKind::CliffordTorus;
  CatalogParams params;
  std::vector<int> resolution;  // empty: kind default
};

struct Scenario {
  std::string id;
  int line = 0;  // line of the section header
  AmbientSpec ambient;
  std::optional<HypersurfaceSpec> hypersurface;
  std::vector<Task> tasks;

  std::uint64_t seed = 1234;
  int samples = 1000;
  double eta = 0.0;
  CertificateMode certificate = CertificateMode::Wedge;
  Discretization discretization = Discretization::Ritz;
  ParityRestriction parity = ParityRestriction::None;
  int basis_degree = 4;
  int eigenvalues = 12;  // shown in reports
  std::optional<int> expect_index;
  std::vector<TestMode> modes;  // empty: wedge, plus coordinates on surfaces
  int combinations = 5;
  std::vector<std::string> margins;
  std::string borderline_f = "one";
  int q_grid = 2001;
  int q_plot = 201;
  std::map<std::string, double> tol;

  double tolerance(const std::string& name) const;
};

/// Default tolerances by name.
const std::map<std::string, double>& default_tolerances();

struct Config {
  std::vector<Scenario> scenarios;
};

/// Throws ConfigError (with line numbers) on syntax errors and bad values.
Config parse_config(std::istream& in);
Config load_config(const std::string& path);

struct RunOptions {
  std::string out_dir = "minidx-out";
  double resolution_scale = 1.0;
  std::optional<std::uint64_t> seed;
  double tol_scale = 1.0;
  std::optional<Task> only;  // run just this task of each scenario that lists it
};

/// Applies command-line overrides to a scenario.
Scenario apply_overrides(const Scenario& s, const RunOptions& options);

/// Kind/task compatibility; throws ConfigError before anything is computed.
void validate(const Config& config, const RunOptions& options);

struct SummaryRow {
  std::string scenario;
  std::string task;
  std::string verdict;  // pass | fail | n/a | error
  std::string detail;
};

struct ScenarioResult {
  std::string id;
  nlohmann::ordered_json report;
  std::vector<SummaryRow> rows;
  bool failed = false;   // some verdict failed
  bool errored = false;  // a solver or runtime error stopped a task
  /// Extra plain-text files: name -> contents.
  std::map<std::string, std::string> files;
};

/// Runs one (already overridden) scenario without touching the filesystem.
ScenarioResult run_scenario(const Scenario& scenario, const std::vector<Task>& tasks);

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailed = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

/// Validates, runs every scenario and writes <id>.json, summary.csv and the
/// extra files into options.out_dir. Returns one of the exit codes above.
int run_config(const Config& config, const RunOptions& options, std::ostream& log);

}  // namespace minidx
