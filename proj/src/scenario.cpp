#include "minidx/scenario.hpp"

#include "minidx/errors.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

namespace minidx {

using json = nlohmann::ordered_json;

std::string to_string(Task t) {
  switch (t) {
    case Task::Identities: return "identities";
    case Task::Spectrum: return "spectrum";
    case Task::VerifyIdentity: return "verify-identity";
    case Task::Certify: return "certify";
    case Task::Margins: return "margins";
    case Task::Borderline: return "borderline";
    case Task::Bounds: return "bounds";
  }
  return "unknown";
}

Task task_from_string(const std::string& s) {
  for (Task t : all_tasks())
    if (to_string(t) == s) return t;
  if (s == "q-identity") return Task::VerifyIdentity;
  if (s == "certificate") return Task::Certify;
  if (s == "bound-table") return Task::Bounds;
  throw IncompatibleKind("unknown task '" + s + "'");
}

const std::vector<Task>& all_tasks() {
  static const std::vector<Task> tasks{Task::Identities, Task::Spectrum,   Task::VerifyIdentity,
                                       Task::Certify,    Task::Margins,    Task::Borderline,
                                       Task::Bounds};
  return tasks;
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tol{
      {"model", 1e-8},           // ambient identities
      {"mean_curvature", 1e-6},  // minimality of the mesh nodes
      {"volume", 1e-6},          // relative, against the analytic volume
      {"identity", 1e-4},        // index-form identities, relative to int |w|^2
      {"harmonic", 1e-6},        // Bochner residual accepted as harmonic
      {"hodge", 1e-4},           // L2 distance of solver forms to the catalog span
      {"sphere", 1e-6},          // sphere integrand constant
      {"borderline", 1e-5},      // CP^m equality-case residuals
  };
  return tol;
}

double Scenario::tolerance(const std::string& name) const {
  auto it = tol.find(name);
  if (it != tol.end()) return it->second;
  return default_tolerances().at(name);
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double parse_double(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("expected a number, got '" + s + "'", line);
}

long long parse_int(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("expected an integer, got '" + s + "'", line);
}

int parse_positive(const std::string& s, int line) {
  long long v = parse_int(s, line);
  if (v < 1 || v > 1000000000) throw ConfigError("expected a positive integer, got '" + s + "'", line);
  return static_cast<int>(v);
}

struct Staging {
  Scenario s;
  std::optional<std::string> hyp_kind;
  CatalogParams params;
  std::vector<int> resolution;
  bool has_ambient = false;
};

void set_key(Staging& st, const std::string& key, const std::string& value, int line, bool global) {
  Scenario& s = st.s;
  auto scenario_only = [&] {
    if (global) throw ConfigError("key '" + key + "' must appear inside a [scenario] section", line);
  };
  try {
    if (key == "id") {
      scenario_only();
      s.id = value;
    } else if (key == "ambient") {
      scenario_only();
      s.ambient = parse_ambient_spec(value);
      st.has_ambient = true;
    } else if (key == "hypersurface") {
      scenario_only();
      catalog_kind_from_string(value);
      st.hyp_kind = value;
    } else if (key == "n") {
      st.params.n = parse_positive(value, line);
    } else if (key == "radius") {
      st.params.radius = parse_double(value, line);
    } else if (key == "axis") {
      st.params.axis_index = static_cast<int>(parse_int(value, line));
    } else if (key == "resolution") {
      st.resolution.clear();
      for (const auto& w : split_list(value)) st.resolution.push_back(parse_positive(w, line));
    } else if (key == "tasks") {
      s.tasks.clear();
      for (const auto& w : split_list(value)) {
        if (w == "all") {
          s.tasks = all_tasks();
          continue;
        }
        s.tasks.push_back(task_from_string(w));
      }
    } else if (key == "seed") {
      long long v = parse_int(value, line);
      if (v < 0) throw ConfigError("seed must be non-negative", line);
      s.seed = static_cast<std::uint64_t>(v);
    } else if (key == "samples") {
      s.samples = parse_positive(value, line);
    } else if (key == "eta") {
      s.eta = parse_double(value, line);
    } else if (key == "certificate") {
      s.certificate = certificate_mode_from_string(value);
    } else if (key == "discretization") {
      if (value == "ritz") s.discretization = Discretization::Ritz;
      else if (value == "p1") s.discretization = Discretization::P1;
      else throw ConfigError("discretization is ritz or p1", line);
    } else if (key == "parity") {
      if (value == "none") s.parity = ParityRestriction::None;
      else if (value == "even") s.parity = ParityRestriction::Even;
      else if (value == "odd") s.parity = ParityRestriction::Odd;
      else throw ConfigError("parity is none, even or odd", line);
    } else if (key == "basis_degree") {
      s.basis_degree = parse_positive(value, line);
    } else if (key == "eigenvalues") {
      s.eigenvalues = parse_positive(value, line);
    } else if (key == "expect_index") {
      s.expect_index = static_cast<int>(parse_int(value, line));
    } else if (key == "modes") {
      s.modes.clear();
      for (const auto& w : split_list(value)) s.modes.push_back(test_mode_from_string(w));
    } else if (key == "combinations") {
      long long v = parse_int(value, line);
      if (v < 0) throw ConfigError("combinations must be non-negative", line);
      s.combinations = static_cast<int>(v);
    } else if (key == "margins") {
      s.margins = split_list(value);
    } else if (key == "borderline_f") {
      borderline_field(value, 1 << 20);  // syntax only; the index is checked later
      s.borderline_f = value;
    } else if (key == "q_grid") {
      s.q_grid = parse_positive(value, line);
    } else if (key == "q_plot") {
      s.q_plot = parse_positive(value, line);
    } else if (key.rfind("tol.", 0) == 0) {
      const std::string name = key.substr(4);
      if (!default_tolerances().count(name)) throw ConfigError("unknown tolerance '" + name + "'", line);
      double v = parse_double(value, line);
      if (!(v > 0.0)) throw ConfigError("tolerances must be positive", line);
      s.tol[name] = v;
    } else {
      throw ConfigError("unknown key '" + key + "'", line);
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what(), line);
  }
}

Scenario finish(Staging& st) {
  Scenario s = st.s;
  if (s.id.empty()) throw ConfigError("scenario without id", s.line);
  for (char c : s.id)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      throw ConfigError("scenario id '" + s.id + "' may only use letters, digits, '-', '_', '.'", s.line);
  if (!st.has_ambient) throw ConfigError("scenario '" + s.id + "' has no ambient", s.line);
  if (s.tasks.empty()) throw ConfigError("scenario '" + s.id + "' has no tasks", s.line);
  if (st.hyp_kind) {
    HypersurfaceSpec h;
    h.kind = catalog_kind_from_string(*st.hyp_kind);
    h.params = st.params;
    h.resolution = st.resolution;
    s.hypersurface = h;
  } else if (!st.resolution.empty()) {
    throw ConfigError("resolution given without a hypersurface", s.line);
  }
  return s;
}

}  // namespace

AmbientSpec parse_ambient_spec(const std::string& text) {
  AmbientSpec spec;
  spec.text = trim(text);
  const auto open = spec.text.find('(');
  std::string name = spec.text;
  if (open != std::string::npos) {
    if (spec.text.back() != ')') throw IncompatibleKind("ambient '" + spec.text + "' lacks ')'");
    name = trim(spec.text.substr(0, open));
    for (const auto& w : split_list(spec.text.substr(open + 1, spec.text.size() - open - 2))) {
      try {
        std::size_t used = 0;
        double v = std::stod(w, &used);
        if (used != w.size()) throw std::invalid_argument(w);
        spec.args.push_back(v);
      } catch (const std::exception&) {
        throw IncompatibleKind("bad ambient argument '" + w + "'");
      }
    }
  }
  spec.kind = ambient_kind_from_string(name);
  return spec;
}

AmbientPtr AmbientSpec::build() const {
  auto ints = [&](std::size_t count) {
    if (args.size() != count)
      throw InvalidDimension(to_string(kind) + " takes " + std::to_string(count) + " argument(s)");
    std::vector<int> out;
    for (double a : args) {
      if (a != std::floor(a)) throw InvalidDimension("dimension arguments must be integers");
      out.push_back(static_cast<int>(a));
    }
    return out;
  };
  switch (kind) {
    case AmbientKind::Sphere: return make_sphere(ints(1)[0]);
    case AmbientKind::RealProjective: return make_real_projective(ints(1)[0]);
    case AmbientKind::ComplexProjectiveVeronese: return make_cp(ints(1)[0]);
    case AmbientKind::QuaternionicProjectiveVeronese: return make_hp(ints(1)[0]);
    case AmbientKind::CircleTimesSphere: return make_circle_times_sphere(ints(1)[0]);
    case AmbientKind::SphereTimesSphere: {
      auto d = ints(2);
      return make_sphere_times_sphere(d[0], d[1]);
    }
    case AmbientKind::Ellipsoid: return make_ellipsoid(args);
    case AmbientKind::GenericEmbeddedHypersurface: {
      if (args.size() != 2) throw InvalidDimension("radial-graph takes (dimension, amplitude)");
      if (args[0] != std::floor(args[0])) throw InvalidDimension("dimension must be an integer");
      const double amp = args[1];
      if (!(std::abs(amp) < 0.5)) throw InvalidDimension("radial-graph amplitude must be below 0.5");
      // rho(u) = 1 + amp u_0^2 on the unit sphere.
      return make_radial_graph(static_cast<int>(args[0]),
                               [amp](const Vec& u) { return 1.0 + amp * u(0) * u(0); });
    }
  }
  throw IncompatibleKind("unhandled ambient kind");
}

Config parse_config(std::istream& in) {
  Config cfg;
  Staging global;
  std::optional<Staging> current;
  std::set<std::string> ids;
  auto close = [&] {
    if (!current) return;
    Scenario s = finish(*current);
    if (!ids.insert(s.id).second) throw ConfigError("duplicate scenario id '" + s.id + "'", s.line);
    cfg.scenarios.push_back(std::move(s));
    current.reset();
  };

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text = raw;
    const auto hash = text.find('#');
    if (hash != std::string::npos) text.erase(hash);
    text = trim(text);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text != "[scenario]") throw ConfigError("unknown section '" + text + "'", line);
      close();
      current = global;
      current->s.line = line;
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line);
    if (value.empty()) throw ConfigError("empty value for '" + key + "'", line);
    if (current) set_key(*current, key, value, line, false);
    else set_key(global, key, value, line, true);
  }
  close();
  if (cfg.scenarios.empty()) throw ConfigError("config defines no [scenario]", 0);
  return cfg;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'", 0);
  return parse_config(in);
}

Scenario apply_overrides(const Scenario& s, const RunOptions& options) {
  Scenario out = s;
  if (options.seed) out.seed = *options.seed;
  if (options.tol_scale != 1.0) {
    for (const auto& [name, value] : default_tolerances())
      out.tol[name] = s.tolerance(name) * options.tol_scale;
  }
  if (out.hypersurface && options.resolution_scale != 1.0) {
    auto& h = *out.hypersurface;
    if (h.resolution.empty()) {
      HypersurfaceChart chart = make_chart(*out.ambient.build(), h.kind, h.params);
      CatalogParams eff = h.params;
      eff.n = chart.dim;
      h.resolution = default_resolution(h.kind, eff);
    }
    for (int& r : h.resolution)
      r = std::max(4, static_cast<int>(std::lround(r * options.resolution_scale)));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Checked {
  AmbientPtr ambient;
  std::optional<HypersurfaceChart> chart;
};

Checked check_scenario(const Scenario& s) {
  Checked c;
  c.ambient = s.ambient.build();
  if (s.hypersurface) {
    c.chart = make_chart(*c.ambient, s.hypersurface->kind, s.hypersurface->params);
    if (!s.hypersurface->resolution.empty() &&
        static_cast<int>(s.hypersurface->resolution.size()) != c.chart->dim)
      throw InvalidDimension("resolution needs " + std::to_string(c.chart->dim) + " entries");
  }
  const int dim = c.chart ? c.chart->dim : 0;
  const int betti = c.chart ? c.chart->betti1 : 0;
  const AmbientKind ak = c.ambient->kind();
  auto need_hyp = [&](Task t) {
    if (!c.chart) throw IncompatibleKind("task " + to_string(t) + " needs a hypersurface");
  };
  if (s.discretization == Discretization::P1 && c.chart && dim != 2)
    throw IncompatibleKind("p1 discretization needs a surface");
  for (Task t : s.tasks) {
    switch (t) {
      case Task::Identities: break;
      case Task::Spectrum:
        need_hyp(t);
        if (s.hypersurface->kind == CatalogKind::GeodesicSphereCP)
          throw IncompatibleKind("the CP^m geodesic sphere is used for pointwise checks only");
        break;
      case Task::VerifyIdentity:
        need_hyp(t);
        for (TestMode m : s.modes)
          if (m != TestMode::Wedge && dim != 2)
            throw IncompatibleKind("mode " + to_string(m) + " needs a surface");
        break;
      case Task::Certify:
        need_hyp(t);
        if (betti == 0 || s.hypersurface->kind == CatalogKind::GeodesicSphereCP)
          throw IncompatibleKind("certify needs b1 > 0");
        if (s.certificate == CertificateMode::Star && dim != 2)
          throw IncompatibleKind("the star certificate needs a surface");
        break;
      case Task::Borderline:
        need_hyp(t);
        if (ak != AmbientKind::ComplexProjectiveVeronese ||
            s.hypersurface->kind != CatalogKind::GeodesicSphereCP)
          throw IncompatibleKind("borderline needs a geodesic sphere in CP^m");
        borderline_field(s.borderline_f, c.ambient->embed_dim());
        break;
      case Task::Bounds: break;
      case Task::Margins:
        if (s.margins.empty()) throw IncompatibleKind("margins task needs a 'margins' list");
        for (const auto& id : s.margins) {
          if (id == "sphere" || id == "integrand") {
            if (!c.chart || betti == 0)
              throw IncompatibleKind("margin " + id + " needs a hypersurface with b1 > 0");
            if (id == "sphere" && ak != AmbientKind::Sphere && ak != AmbientKind::RealProjective)
              throw IncompatibleKind("margin sphere needs a round ambient");
          } else if (id == "cross") {
            if (ak != AmbientKind::ComplexProjectiveVeronese &&
                ak != AmbientKind::QuaternionicProjectiveVeronese)
              throw IncompatibleKind("margin cross needs cp or hp");
          } else if (id == "convex") {
            if (ak != AmbientKind::Ellipsoid && ak != AmbientKind::GenericEmbeddedHypersurface)
              throw IncompatibleKind("margin convex needs a hypersurface of Euclidean space");
          } else if (id != "cayley" && id != "product_q" && id != "scalar3") {
            throw IncompatibleKind("unknown margin '" + id + "'");
          }
        }
        break;
    }
  }
  return c;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const MarginReport& r) {
  json j;
  j["min"] = r.min;
  j["max"] = r.max;
  j["mean"] = r.mean;
  j["samples"] = r.samples;
  for (const auto& [k, v] : r.values) j[k] = v;
  if (!r.note.empty()) j["note"] = r.note;
  j["verdict"] = r.pass ? "pass" : "fail";
  return j;
}

std::string rational_text(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(6) << v;
  return o.str();
}

// Shared, lazily built state of one scenario run.
class Context {
 public:
  explicit Context(const Scenario& s) : s_(s) { ambient_ = s.ambient.build(); }

  const Scenario& scenario() const { return s_; }
  const AmbientPtr& ambient() const { return ambient_; }

  const DiscreteHypersurface& hyp() {
    if (!hyp_) {
      const auto& h = *s_.hypersurface;
      std::vector<int> res = h.resolution;
      if (res.empty()) {
        HypersurfaceChart chart = make_chart(*ambient_, h.kind, h.params);
        CatalogParams eff = h.params;
        eff.n = chart.dim;
        res = default_resolution(h.kind, eff);
      }
      hyp_ = std::make_unique<DiscreteHypersurface>(build_hypersurface(ambient_, h.kind, h.params, res));
    }
    return *hyp_;
  }

  const SpectralSystem& system() {
    if (!sys_) {
      SpectralOptions o;
      o.discretization = s_.discretization;
      o.basis_degree = s_.basis_degree;
      o.parity = s_.parity;
      sys_ = std::make_unique<SpectralSystem>(assemble_jacobi(hyp(), o));
    }
    return *sys_;
  }

  const SpectrumReport& spectrum_report() {
    if (!spec_) {
      const SpectralSystem& sys = system();
      const int count = sys.discretization == Discretization::Ritz ? 0 : std::max(s_.eigenvalues, 40);
      spec_ = std::make_unique<SpectrumReport>(spectrum(sys, count));
    }
    return *spec_;
  }

  const HodgeResult& hodge() {
    if (!hodge_) hodge_ = std::make_unique<HodgeResult>(harmonic_one_forms(hyp()));
    return *hodge_;
  }

 private:
  const Scenario& s_;
  AmbientPtr ambient_;
  std::unique_ptr<DiscreteHypersurface> hyp_;
  std::unique_ptr<SpectralSystem> sys_;
  std::unique_ptr<SpectrumReport> spec_;
  std::unique_ptr<HodgeResult> hodge_;
};

json hodge_json(const HodgeResult& h) {
  json j;
  j["kernel_dimension"] = h.kernel_dimension;
  j["expected_betti"] = h.expected_betti;
  j["unexpected_kernel"] = h.unexpected_kernel;
  j["from_solver"] = h.from_solver;
  if (h.from_solver) {
    j["eigenvalues"] = to_json(h.eigenvalues);
    j["closedness"] = h.max_closedness;
    j["coclosedness"] = h.max_coclosedness;
  }
  return j;
}

struct TaskOutcome {
  std::string verdict;
  std::string detail;
};

TaskOutcome run_identities(Context& ctx, json& report) {
  const Scenario& s = ctx.scenario();
  IdentityReport rep = verify_model_identities(*ctx.ambient(), s.samples, s.seed);
  json j;
  j["model"] = rep.model;
  j["samples"] = rep.samples;
  j["sectional_min"] = rep.min_sectional;
  j["sectional_max"] = rep.max_sectional;
  if (rep.einstein_constant) j["einstein"] = *rep.einstein_constant;
  bool pass = rep.max_residual() <= s.tolerance("model");
  for (const auto& [name, v] : rep.residuals) report["residuals"]["model." + name] = v;
  std::string detail = "model max residual " + fmt(rep.max_residual());
  if (s.hypersurface) {
    const DiscreteHypersurface& hyp = ctx.hyp();
    const double h = hyp.mean_curvature_residual();
    report["residuals"]["hypersurface.mean_curvature"] = h;
    report["residuals"]["hypersurface.normal"] = hyp.max_normal_residual;
    report["residuals"]["hypersurface.shape_asymmetry"] = hyp.max_shape_asymmetry;
    pass = pass && h <= s.tolerance("mean_curvature");
    j["volume"] = hyp.volume();
    if (hyp.chart.volume) {
      const double rel = std::abs(hyp.volume() - *hyp.chart.volume) / *hyp.chart.volume;
      report["residuals"]["hypersurface.volume"] = rel;
      j["analytic_volume"] = *hyp.chart.volume;
      pass = pass && rel <= s.tolerance("volume");
    }
    if (hyp.kind == CatalogKind::GeodesicSphereCP) {
      const int m = ctx.ambient()->intrinsic_dim() / 2;
      j["minimal_radius"] = geodesic_sphere_minimal_radius(m, 1e-12);
    }
    detail += ", mean curvature " + fmt(h);
  }
  report["identities"] = j;
  return {pass ? "pass" : "fail", detail};
}

TaskOutcome run_spectrum(Context& ctx, json& report, std::map<std::string, std::string>& files) {
  const Scenario& s = ctx.scenario();
  const SpectrumReport& sp = ctx.spectrum_report();
  const SpectralSystem& sys = ctx.system();
  json j;
  j["discretization"] = to_string(sys.discretization);
  j["parity"] = to_string(sys.parity);
  j["basis_size"] = sys.size();
  const int shown = std::min<int>(s.eigenvalues, static_cast<int>(sp.eigenvalues.size()));
  j["eigenvalues"] = to_json(sp.eigenvalues.head(shown));
  j["index"] = sp.morse_index;
  j["count_below"] = {{"eta", s.eta}, {"count", sp.count_below(s.eta)}};
  json mult = json::array();
  for (int m : sp.multiplicities()) mult.push_back(m);
  j["multiplicities"] = mult;
  j["max_residual"] = sp.residuals.size() ? sp.residuals.maxCoeff() : 0.0;
  j["complete"] = sp.complete;
  report["spectrum"] = j;
  std::ostringstream csv;
  write_spectrum_csv(csv, sp);
  files[s.id + "_spectrum.csv"] = csv.str();
  bool pass = true;
  std::string detail = "index " + std::to_string(sp.morse_index);
  if (s.expect_index) {
    pass = sp.morse_index == *s.expect_index;
    detail += " (expected " + std::to_string(*s.expect_index) + ")";
  }
  return {pass ? "pass" : "fail", detail};
}

std::vector<DiscreteOneForm> identity_forms(Context& ctx) {
  const Scenario& s = ctx.scenario();
  const auto& basis = ctx.hodge().basis;
  std::vector<DiscreteOneForm> forms = basis;
  if (basis.empty()) return forms;
  Rng rng(s.seed);
  std::normal_distribution<double> g;
  for (int k = 0; k < s.combinations; ++k) {
    Vec c(basis.size());
    for (int i = 0; i < c.size(); ++i) c(i) = g(rng);
    DiscreteOneForm f = combine(basis, c.normalized());
    f.label = "combination" + std::to_string(k);
    forms.push_back(std::move(f));
  }
  return forms;
}

TaskOutcome run_verify_identity(Context& ctx, json& report) {
  const Scenario& s = ctx.scenario();
  const DiscreteHypersurface& hyp = ctx.hyp();
  const HodgeResult& hodge = ctx.hodge();
  report["hodge"] = hodge_json(hodge);
  std::vector<TestMode> modes = s.modes;
  if (modes.empty()) {
    modes.push_back(TestMode::Wedge);
    if (hyp.dim() == 2) modes.push_back(TestMode::Coordinates);
  }
  bool pass = !hodge.unexpected_kernel;
  if (hodge.from_solver && hodge.kernel_dimension > 0) {
    auto catalog = catalog_harmonic_forms(hyp);
    if (static_cast<int>(catalog.size()) == hodge.kernel_dimension) {
      const double dist = span_distance(hyp, hodge.basis, catalog);
      report["residuals"]["hodge.span_distance"] = dist;
      pass = pass && dist < s.tolerance("hodge");
    }
  }
  json list = json::array();
  double worst = 0.0;
  const auto forms = identity_forms(ctx);
  for (TestMode mode : modes)
    for (const auto& f : forms) {
      QIdentityReport r = q_identity_report(ctx.system(), f, mode, s.tolerance("harmonic"));
      json e;
      e["form"] = f.label;
      e["mode"] = to_string(mode);
      e["lhs"] = r.lhs;
      e["rhs"] = r.rhs;
      e["mass"] = r.mass;
      e["rhs_over_mass"] = r.rhs / r.mass;
      e["residual"] = r.residual;
      e["projection_residual"] = r.projection_residual;
      e["bochner"] = r.bochner;
      list.push_back(e);
      worst = std::max(worst, r.residual);
    }
  report["q_identity"] = list;
  report["residuals"]["q_identity.max"] = worst;
  if (forms.empty()) return {"n/a", "no harmonic forms (b1 = 0)"};
  pass = pass && worst < s.tolerance("identity");
  return {pass ? "pass" : "fail", "max relative residual " + fmt(worst)};
}

TaskOutcome run_certify(Context& ctx, json& report) {
  const Scenario& s = ctx.scenario();
  const HodgeResult& hodge = ctx.hodge();
  report["hodge"] = hodge_json(hodge);
  CertificateReport c =
      concentration_certificate(ctx.hyp(), hodge.basis, s.eta, s.certificate, ctx.spectrum_report());
  json j;
  j["mode"] = to_string(c.mode);
  j["parity"] = to_string(s.parity);
  j["eta"] = c.eta;
  j["q"] = c.q;
  j["d"] = c.d;
  j["required"] = c.required;
  j["required_value"] = c.required_value;
  j["required_exact"] = rational_text(c.required_exact);
  j["actual"] = c.actual;
  j["count_complete"] = c.count_complete;
  j["margin"] = c.hypothesis_margin;
  j["normalized_margin"] = c.normalized_margin;
  j["verdict"] = c.verdict();
  report["certificate"] = j;
  return {c.verdict(), "required " + std::to_string(c.required) + ", actual " +
                           std::to_string(c.actual) + ", margin " + fmt(c.hypothesis_margin)};
}

TaskOutcome run_margins(Context& ctx, json& report, std::map<std::string, std::string>& files) {
  const Scenario& s = ctx.scenario();
  bool pass = true;
  std::string detail;
  for (const auto& id : s.margins) {
    std::vector<MarginReport> reps;
    if (id == "sphere") {
      reps.push_back(sphere_margin(ctx.hyp(), ctx.hodge().basis.at(0)));
      const double expected = reps.back().values["expected"];
      reps.back().pass = reps.back().values["max_deviation"] < s.tolerance("sphere") && expected < 0;
    } else if (id == "integrand") {
      for (const auto& f : ctx.hodge().basis) {
        reps.push_back(integrand_margin(ctx.hyp(), f, IntegrandKind::Wedge, 0.0));
        reps.back().id = "integrand." + f.label;
      }
    } else if (id == "cross") {
      reps.push_back(cross_margin(*ctx.ambient(), s.samples, static_cast<unsigned>(s.seed)));
    } else if (id == "cayley") {
      reps.push_back(cayley_cross_margin());
      reps.back().id = "cayley";
    } else if (id == "product_q") {
      reps.push_back(product_q_margin(s.q_grid, 10000, static_cast<unsigned>(s.seed)));
      std::ostringstream grid;
      grid << "theta,phi,q\n" << std::setprecision(10);
      const int m = std::max(2, s.q_plot);
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k) {
          const double th = M_PI * i / (m - 1), ph = M_PI * k / (m - 1);
          grid << th << "," << ph << "," << product_q(th, ph) << "\n";
        }
      files[s.id + "_q_grid.csv"] = grid.str();
    } else if (id == "convex") {
      reps.push_back(convex_margin(*ctx.ambient(), s.samples, static_cast<unsigned>(s.seed)));
    } else if (id == "scalar3") {
      reps.push_back(scalar3_margin(*ctx.ambient(), s.samples, static_cast<unsigned>(s.seed)));
    }
    for (const auto& r : reps) {
      const std::string key = r.id == "integrand-wedge" ? id : r.id;
      report["margins"][key] = to_json(r);
      pass = pass && r.pass;
      detail += (detail.empty() ? "" : ", ") + key + " " + (r.pass ? "pass" : "fail");
    }
  }
  return {pass ? "pass" : "fail", detail};
}

json borderline_json(const BorderlineReport& b) {
  return json{{"divergence", b.divergence},       {"decomposition", b.decomposition},
              {"traced_gauss", b.traced_gauss},   {"ambient_chain", b.ambient_chain},
              {"jn_tangency", b.jn_tangency},     {"mean_curvature", b.mean_curvature}};
}

TaskOutcome run_borderline(Context& ctx, json& report) {
  const Scenario& s = ctx.scenario();
  const DiscreteHypersurface& fine = ctx.hyp();
  std::vector<int> coarse_res = fine.resolution;
  for (int& r : coarse_res) r = std::max(4, r / 2);
  DiscreteHypersurface coarse = build_hypersurface(ctx.ambient(), fine.kind, fine.params, coarse_res);
  PositionField f = borderline_field(s.borderline_f, fine.embed_dim());
  BorderlineReport bf = borderline_cp_report(fine, f);
  BorderlineReport bc = borderline_cp_report(coarse, f);

  const int m = bf.m;
  const double root = geodesic_sphere_minimal_radius(m, 1e-12);
  json j;
  j["field"] = s.borderline_f;
  j["m"] = m;
  j["radius"] = root;
  j["expected_trace"] = 2.0 * m - 2.0;
  j["resolution"] = fine.resolution;
  j["coarse_resolution"] = coarse_res;
  j["fine"] = borderline_json(bf);
  j["coarse"] = borderline_json(bc);
  const double tol = s.tolerance("borderline");
  bool pass = bf.divergence < tol && bf.decomposition < tol && bf.traced_gauss < tol &&
              bf.ambient_chain < tol && bf.jn_tangency < tol &&
              bf.mean_curvature < s.tolerance("mean_curvature");
  json decay;
  for (auto [name, c, fv] : {std::tuple{"divergence", bc.divergence, bf.divergence},
                             std::tuple{"decomposition", bc.decomposition, bf.decomposition},
                             std::tuple{"traced_gauss", bc.traced_gauss, bf.traced_gauss}}) {
    const bool ok = residual_decays(c, fv);
    decay[name] = ok;
    pass = pass && ok;
  }
  j["decays"] = decay;
  j["verdict"] = pass ? "pass" : "fail";
  report["borderline"] = j;
  for (const auto& [k, v] : j["fine"].items()) report["residuals"]["borderline." + k] = v;
  return {pass ? "pass" : "fail", "max residual " + fmt(bf.max_residual())};
}

TaskOutcome run_bounds(Context& ctx, json& report) {
  const Scenario& s = ctx.scenario();
  auto table = constant_table(6);
  bool table_ok = true;
  for (const auto& t : table) table_ok = table_ok && t.consistent();
  json j;
  j["table_size"] = table.size();
  j["table_consistent"] = table_ok;
  TheoremConstant c = theorem_constant(*ctx.ambient());
  j["family"] = to_string(c.family);
  j["label"] = c.label;
  j["d"] = c.d;
  j["constant"] = rational_text(c.stated);
  j["from_d"] = rational_text(c.from_d);
  j["constant_consistent"] = c.consistent();
  bool pass = table_ok && c.consistent();
  std::string verdict;
  std::string detail = "constant " + rational_text(c.stated);
  if (s.hypersurface) {
    const int betti = ctx.hodge().kernel_dimension;
    IndexBoundReport ib = index_bound_report(ctx.hyp(), betti, ctx.spectrum_report().morse_index);
    j["constant"] = rational_text(ib.constant.stated);
    j["offset"] = ib.constant.offset;
    j["betti"] = ib.betti;
    j["value"] = ib.value;
    j["bound"] = ib.bound;
    j["index"] = ib.index;
    j["consistent"] = ib.consistent;
    j["tight"] = ib.tight;
    detail = "bound " + std::to_string(ib.bound) + ", index " + std::to_string(ib.index);
    if (!ib.constant.applies) {
      verdict = "n/a";
      detail += " (" + ib.constant.note + ")";
    } else {
      pass = pass && ib.consistent;
    }
  } else if (!c.applies) {
    verdict = "n/a";
  }
  if (!c.note.empty()) j["note"] = c.note;
  if (verdict.empty()) verdict = pass ? "pass" : "fail";
  j["verdict"] = verdict;
  report["bounds"] = j;
  return {verdict, detail};
}

}  // namespace

void validate(const Config& config, const RunOptions& options) {
  if (!(options.resolution_scale > 0.0)) throw ConfigError("--resolution-scale must be positive", 0);
  if (!(options.tol_scale > 0.0)) throw ConfigError("--tol-scale must be positive", 0);
  for (const auto& raw : config.scenarios) {
    try {
      check_scenario(apply_overrides(raw, options));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError("scenario '" + raw.id + "': " + e.what(), raw.line);
    }
  }
}

ScenarioResult run_scenario(const Scenario& s, const std::vector<Task>& tasks) {
  ScenarioResult res;
  res.id = s.id;
  json& report = res.report;
  report["scenario"] = s.id;
  report["ambient"] = s.ambient.text;
  if (s.hypersurface) {
    report["hypersurface"] = {{"kind", to_string(s.hypersurface->kind)},
                              {"n", s.hypersurface->params.n},
                              {"radius", s.hypersurface->params.radius},
                              {"axis", s.hypersurface->params.axis_index}};
  } else {
    report["hypersurface"] = nullptr;
  }
  report["resolution"] = nullptr;
  report["seed"] = s.seed;
  report["residuals"] = json::object();

  Context ctx(s);
  json verdicts = json::object();
  for (Task t : tasks) {
    TaskOutcome out;
    try {
      switch (t) {
        case Task::Identities: out = run_identities(ctx, report); break;
        case Task::Spectrum: out = run_spectrum(ctx, report, res.files); break;
        case Task::VerifyIdentity: out = run_verify_identity(ctx, report); break;
        case Task::Certify: out = run_certify(ctx, report); break;
        case Task::Margins: out = run_margins(ctx, report, res.files); break;
        case Task::Borderline: out = run_borderline(ctx, report); break;
        case Task::Bounds: out = run_bounds(ctx, report); break;
      }
    } catch (const SolverFailure& e) {
      out = {"error", std::string(e.what()) + " (achieved residual " + fmt(e.achieved_residual()) + ")"};
    } catch (const std::exception& e) {
      out = {"error", e.what()};
    }
    if (out.verdict == "fail") res.failed = true;
    if (out.verdict == "error") res.errored = true;
    verdicts[to_string(t)] = out.verdict;
    res.rows.push_back({s.id, to_string(t), out.verdict, out.detail});
  }
  if (s.hypersurface) {
    try {
      report["resolution"] = ctx.hyp().resolution;
    } catch (const std::exception& e) {
      report["resolution"] = nullptr;
    }
  }
  report["verdicts"] = verdicts;
  report["verdict"] = res.errored ? "error" : (res.failed ? "fail" : "pass");
  return res;
}

int run_config(const Config& config, const RunOptions& options, std::ostream& log) {
  try {
    validate(config, options);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  std::vector<ScenarioResult> results;
  for (const auto& raw : config.scenarios) {
    Scenario s = apply_overrides(raw, options);
    std::vector<Task> tasks;
    for (Task t : s.tasks)
      if (!options.only || *options.only == t) tasks.push_back(t);
    if (tasks.empty()) continue;
    log << "scenario " << s.id << "\n";
    results.push_back(run_scenario(s, tasks));
    for (const auto& row : results.back().rows)
      log << "  " << row.task << ": " << row.verdict << " (" << row.detail << ")\n";
  }

  namespace fs = std::filesystem;
  fs::create_directories(options.out_dir);
  std::ofstream summary(fs::path(options.out_dir) / "summary.csv");
  summary << "scenario,task,verdict,detail\n";
  bool failed = false, errored = false;
  for (const auto& r : results) {
    std::ofstream(fs::path(options.out_dir) / (r.id + ".json")) << r.report.dump(2) << "\n";
    for (const auto& [name, text] : r.files) std::ofstream(fs::path(options.out_dir) / name) << text;
    for (const auto& row : r.rows) {
      std::string detail = row.detail;
      std::replace(detail.begin(), detail.end(), '"', '\'');
      summary << row.scenario << "," << row.task << "," << row.verdict << ",\"" << detail << "\"\n";
    }
    failed = failed || r.failed;
    errored = errored || r.errored;
  }
  if (errored) return kExitRuntimeError;
  return failed ? kExitVerdictFailed : kExitOk;
}

}  // namespace minidx
