#include "nlch/harness/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nlch/error.hpp"

namespace nlch {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"grid", {"dim", "n", "length"}},
      {"kernel", {"family", "sigma", "r0", "amplitude", "padded_size"}},
      {"potential", {"theta", "guard"}},
      {"state",
       {"dt", "n_steps", "newton_tol", "newton_max", "guard", "cfl_limit", "initial", "initial_mean",
        "initial_amplitude", "initial_file"}},
      {"control", {"vmin", "vmax", "initial", "initial_amplitude", "projection_tol", "projection_max_iter"}},
      {"targets", {"source", "manifest", "gamma", "reference_amplitude", "reference_seed"}},
      {"optimizer",
       {"step0", "armijo_c", "shrink", "max_backtracks", "max_iter", "tol", "fd_directions", "fd_threshold",
        "flip_adjoint_sign"}},
      {"output", {"dir", "seed"}},
  };
  return keys;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  bool has(const std::string& section, const std::string& key) const {
    return tree_.get_child_optional(pt::ptree::path_type(section + "." + key, '.')).has_value();
  }

  std::string raw(const std::string& section, const std::string& key) const {
    return trim(tree_.get<std::string>(pt::ptree::path_type(section + "." + key, '.')));
  }

  double real(const std::string& section, const std::string& key, double fallback) const {
    if (!has(section, key)) return fallback;
    return parse_real(section, key, raw(section, key));
  }

  long integer(const std::string& section, const std::string& key, long fallback) const {
    if (!has(section, key)) return fallback;
    const std::string s = raw(section, key);
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty()) throw ConfigError(name(section, key) + ": expected an integer, got '" + s + "'");
    return v;
  }

  bool boolean(const std::string& section, const std::string& key, bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string s = raw(section, key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(name(section, key) + ": expected true/false, got '" + s + "'");
  }

  std::vector<double> reals(const std::string& section, const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(raw(section, key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(section, key, trim(item)));
    return out;
  }

  static std::string name(const std::string& section, const std::string& key) {
    return "[" + section + "] " + key;
  }

 private:
  static double parse_real(const std::string& section, const std::string& key, const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty() || !std::isfinite(v))
      throw ConfigError(name(section, key) + ": expected a number, got '" + s + "'");
    return v;
  }

  const pt::ptree& tree_;
};

void require_range(bool ok, const std::string& key, const std::string& bounds) {
  if (!ok) throw ConfigError(key + " out of range: must be " + bounds);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

ProblemConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  // boost's INI reader only knows ';' comments; accept '#' as well.
  std::stringstream cleaned;
  {
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      const std::string t = trim(line);
      if (!t.empty() && t[0] == '#') continue;
      cleaned << line << '\n';
    }
  }
  pt::ptree tree;
  try {
    pt::read_ini(cleaned, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  for (const auto& [section, child] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError("unknown config section [" + section + "]");
    if (!child.data().empty()) throw ConfigError("config entries must live inside a section: " + section);
    for (const auto& [key, value] : child)
      if (!it->second.count(key)) throw ConfigError("unknown config key " + Reader::name(section, key));
  }

  const Reader r(tree);
  ProblemConfig c;

  // [grid]
  if (!r.has("grid", "n")) throw ConfigError("missing required key [grid] n");
  const int dim = static_cast<int>(r.integer("grid", "dim", 2));
  std::vector<int> n;
  for (double d : r.reals("grid", "n")) n.push_back(static_cast<int>(d));
  if (n.size() == 1) n.assign(static_cast<std::size_t>(dim), n.front());
  std::vector<double> length(static_cast<std::size_t>(dim), 1.0);
  if (r.has("grid", "length")) {
    length = r.reals("grid", "length");
    if (length.size() == 1) length.assign(static_cast<std::size_t>(dim), length.front());
  }
  c.grid = make_grid(dim, n, length);

  // [potential]
  c.potential.theta = r.real("potential", "theta", 0.2);
  c.potential.guard = r.real("potential", "guard", 1e-9);
  require_range(c.potential.theta > 0.0, "[potential] theta", "> 0");
  require_range(c.potential.guard > 0.0 && c.potential.guard <= 1e-2, "[potential] guard", "in (0, 1e-2]");

  // [kernel]
  const std::string family = r.has("kernel", "family") ? r.raw("kernel", "family") : "gaussian";
  if (family == "gaussian") {
    c.kernel = KernelSpec::default_gaussian(c.grid);
    if (r.has("kernel", "sigma")) {
      c.kernel.sigma = r.real("kernel", "sigma", c.kernel.sigma);
      require_range(c.kernel.sigma > 0.0, "[kernel] sigma", "> 0");
      c.kernel.amplitude = 1.0 / std::pow(2.0 * M_PI * c.kernel.sigma * c.kernel.sigma, 0.5 * dim);
    }
  } else if (family == "mollified_newtonian") {
    c.kernel = KernelSpec::default_newtonian(c.grid);
    c.kernel.r0 = r.real("kernel", "r0", c.kernel.r0);
    require_range(c.kernel.r0 > 0.0, "[kernel] r0", "> 0");
  } else {
    throw ConfigError("[kernel] family must be gaussian or mollified_newtonian, got '" + family + "'");
  }
  c.kernel.amplitude = r.real("kernel", "amplitude", c.kernel.amplitude);
  require_range(c.kernel.amplitude >= 0.0, "[kernel] amplitude", ">= 0");
  c.kernel.padded_size = static_cast<int>(r.integer("kernel", "padded_size", 0));

  // [state]
  const double h = c.grid.min_spacing();
  c.state.dt = r.real("state", "dt", 0.25 * h * h);
  c.state.n_steps = static_cast<int>(r.integer("state", "n_steps", 20));
  c.state.newton_tol = r.real("state", "newton_tol", 1e-10);
  c.state.newton_max = static_cast<int>(r.integer("state", "newton_max", 50));
  c.state.guard = r.real("state", "guard", 1e-6);
  c.state.cfl_limit = r.real("state", "cfl_limit", 0.9);
  require_range(c.state.dt > 0.0, "[state] dt", "> 0");
  require_range(c.state.n_steps >= 0, "[state] n_steps", ">= 0");
  require_range(c.state.newton_tol > 0.0, "[state] newton_tol", "> 0");
  require_range(c.state.newton_max >= 1, "[state] newton_max", ">= 1");
  require_range(c.state.guard > 0.0 && c.state.guard <= 1e-2, "[state] guard", "in (0, 1e-2]");
  require_range(c.state.cfl_limit > 0.0, "[state] cfl_limit", "> 0");
  const std::string init = r.has("state", "initial") ? r.raw("state", "initial") : "smooth";
  if (init == "smooth") c.initial.kind = InitialKind::smooth;
  else if (init == "random") c.initial.kind = InitialKind::random;
  else if (init == "file") c.initial.kind = InitialKind::file;
  else throw ConfigError("[state] initial must be smooth, random or file, got '" + init + "'");
  c.initial.mean = r.real("state", "initial_mean", 0.0);
  c.initial.amplitude = r.real("state", "initial_amplitude", 0.5);
  require_range(std::abs(c.initial.mean) + c.initial.amplitude < 1.0 - c.state.guard,
                "[state] initial_mean/initial_amplitude", "|mean| + amplitude < 1 - guard");
  require_range(c.initial.amplitude >= 0.0, "[state] initial_amplitude", ">= 0");
  if (c.initial.kind == InitialKind::file) {
    if (!r.has("state", "initial_file")) throw ConfigError("missing required key [state] initial_file");
    c.initial.file = resolve(base_dir, r.raw("state", "initial_file"));
    if (!std::filesystem::exists(c.initial.file))
      throw ConfigError("[state] initial_file does not exist: " + c.initial.file.string());
  }

  // [control]
  c.bounds = ControlBounds::symmetric(dim, 1.0);
  if (r.has("control", "vmin")) c.bounds.vmin = r.reals("control", "vmin");
  if (r.has("control", "vmax")) c.bounds.vmax = r.reals("control", "vmax");
  if (c.bounds.vmin.size() == 1) c.bounds.vmin.assign(static_cast<std::size_t>(dim), c.bounds.vmin.front());
  if (c.bounds.vmax.size() == 1) c.bounds.vmax.assign(static_cast<std::size_t>(dim), c.bounds.vmax.front());
  if (static_cast<int>(c.bounds.vmin.size()) != dim || static_cast<int>(c.bounds.vmax.size()) != dim)
    throw ConfigError("[control] vmin/vmax need 1 or " + std::to_string(dim) + " entries");
  for (int a = 0; a < dim; ++a) {
    if (c.bounds.vmin[a] > c.bounds.vmax[a])
      throw ConfigError("C5 violated: vmin > vmax on component " + std::to_string(a));
    if (c.bounds.vmin[a] > 0.0 || c.bounds.vmax[a] < 0.0)
      throw ConfigError("[control] bounds must contain 0 on component " + std::to_string(a));
  }
  const std::string cinit = r.has("control", "initial") ? r.raw("control", "initial") : "zero";
  if (cinit == "zero") c.control.kind = ControlInitKind::zero;
  else if (cinit == "random") c.control.kind = ControlInitKind::random;
  else throw ConfigError("[control] initial must be zero or random, got '" + cinit + "'");
  c.control.amplitude = r.real("control", "initial_amplitude", 0.5);
  c.projection.tol = r.real("control", "projection_tol", 1e-8);
  c.projection.max_iter = static_cast<int>(r.integer("control", "projection_max_iter", 500));
  require_range(c.projection.tol > 0.0, "[control] projection_tol", "> 0");
  require_range(c.projection.max_iter >= 1, "[control] projection_max_iter", ">= 1");

  // [targets]
  const std::string source = r.has("targets", "source") ? r.raw("targets", "source") : "synthetic-reference";
  if (source == "synthetic-reference") {
    c.targets.source = TargetSource::synthetic_reference;
  } else if (source == "files") {
    c.targets.source = TargetSource::files;
    if (!r.has("targets", "manifest")) throw ConfigError("missing required key [targets] manifest");
    c.targets.manifest = resolve(base_dir, r.raw("targets", "manifest"));
    if (!std::filesystem::exists(c.targets.manifest))
      throw ConfigError("[targets] manifest does not exist: " + c.targets.manifest.string());
  } else {
    throw ConfigError("[targets] source must be synthetic-reference or files, got '" + source + "'");
  }
  if (r.has("targets", "gamma")) {
    const auto g = r.reals("targets", "gamma");
    if (g.size() != 3) throw ConfigError("[targets] gamma needs three entries");
    c.gamma = {g[0], g[1], g[2]};
  }
  for (double g : c.gamma)
    if (g < 0.0) throw ConfigError("C3 violated: gamma entries must be nonnegative");
  if (c.gamma[0] == 0.0 && c.gamma[1] == 0.0 && c.gamma[2] == 0.0)
    throw ConfigError("C3 violated: not all zero required");
  c.targets.reference_amplitude = r.real("targets", "reference_amplitude", 1.0);
  c.targets.reference_seed = static_cast<std::uint64_t>(r.integer("targets", "reference_seed", 7));

  // [optimizer]
  c.optimizer.step0 = r.real("optimizer", "step0", 1.0);
  c.optimizer.armijo_c = r.real("optimizer", "armijo_c", 1e-4);
  c.optimizer.shrink = r.real("optimizer", "shrink", 0.5);
  c.optimizer.max_backtracks = static_cast<int>(r.integer("optimizer", "max_backtracks", 30));
  c.optimizer.max_iter = static_cast<int>(r.integer("optimizer", "max_iter", 100));
  c.optimizer.tol = r.real("optimizer", "tol", 1e-6);
  require_range(c.optimizer.step0 > 0.0, "[optimizer] step0", "> 0");
  require_range(c.optimizer.armijo_c > 0.0 && c.optimizer.armijo_c < 1.0, "[optimizer] armijo_c", "in (0, 1)");
  require_range(c.optimizer.shrink > 0.0 && c.optimizer.shrink < 1.0, "[optimizer] shrink", "in (0, 1)");
  require_range(c.optimizer.max_iter >= 1, "[optimizer] max_iter", ">= 1");
  require_range(c.optimizer.tol > 0.0, "[optimizer] tol", "> 0");
  c.grad_check.directions = static_cast<int>(r.integer("optimizer", "fd_directions", 3));
  c.grad_check.threshold = r.real("optimizer", "fd_threshold", 1e-5);
  c.grad_check.flip_adjoint_sign = r.boolean("optimizer", "flip_adjoint_sign", false);
  require_range(c.grad_check.directions >= 1, "[optimizer] fd_directions", ">= 1");

  // [output]
  if (r.has("output", "dir")) c.output_dir = resolve(base_dir, r.raw("output", "dir"));
  c.seed = static_cast<std::uint64_t>(r.integer("output", "seed", 1));
  return c;
}

ProblemConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace nlch
