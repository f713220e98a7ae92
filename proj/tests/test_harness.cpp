#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "nlch/error.hpp"
#include "nlch/harness/commands.hpp"
#include "nlch/harness/config.hpp"
#include "nlch/harness/field_io.hpp"
#include "nlch/harness/problem.hpp"
#include "nlch/harness/timeseries.hpp"
#include "nlch/harness/verify.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using namespace nlch;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nlch-harness-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string config_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const char* kSmall = "[grid]\ndim = 2\nn = 8\n[state]\ndt = 1e-3\nn_steps = 5\n";

int run_cli(const std::string& args, const fs::path& log) {
  const char* cli = std::getenv("NLCH_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " " + args + " >" + (log / "stdout.txt").string() + " 2>" +
                          (log / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path config_dir() {
  const char* d = std::getenv("NLCH_CONFIG_DIR");
  REQUIRE(d != nullptr);
  return d;
}

}  // namespace

TEST_CASE("config defaults") {
  const ProblemConfig c = parse_config("[grid]\ndim = 2\nn = 16\n[potential]\ntheta = 0.2\n");
  CHECK(c.grid.n[0] == 16);
  CHECK(c.grid.n[1] == 16);
  CHECK(c.grid.h[0] == doctest::Approx(1.0 / 16));
  CHECK(c.state.dt == doctest::Approx(0.25 / 256));
  CHECK(c.state.n_steps == 20);
  CHECK(c.potential.theta == 0.2);
  CHECK(c.gamma == std::array<double, 3>{1.0, 1.0, 1e-4});
  CHECK(c.bounds.vmin == std::vector<double>{-1.0, -1.0});
  CHECK(c.bounds.vmax == std::vector<double>{1.0, 1.0});
  CHECK(c.targets.source == TargetSource::synthetic_reference);
  CHECK(c.kernel.family == KernelFamily::gaussian);
  CHECK(c.seed == 1);
  CHECK_NOTHROW(parse_config("# comment\n[grid]\n; other comment\nn = 4\n"));
}

TEST_CASE("config errors name the offending key") {
  CHECK(config_error("[state]\ndt = 1e-3\n").find("[grid] n") != std::string::npos);
  CHECK(config_error("[grid]\nn = 8\n[targets]\ngamma = 0, 0, 0\n").find("C3 violated: not all zero required") !=
        std::string::npos);
  CHECK(config_error("[grid]\nn = 8\n[control]\nvmin = -1, 2\nvmax = 1, 1\n").find("vmin > vmax on component 1") !=
        std::string::npos);
  CHECK(config_error("[grid]\nn = 8\n[grid2]\nn = 4\n").find("[grid2]") != std::string::npos);
  CHECK(config_error("[grid]\nn = 8\nsize = 4\n").find("size") != std::string::npos);
  CHECK(config_error("[grid]\nn = 8\n[potential]\ntheta = -1\n").find("theta") != std::string::npos);
  CHECK(config_error("[grid]\nn = 8\n[state]\ndt = -1\n").find("dt") != std::string::npos);
  CHECK(config_error("[grid]\nn = eight\n").find("n") != std::string::npos);
  CHECK(config_error("[grid]\nn = 8\n[targets]\nsource = files\nmanifest = /nonexistent/m.json\n")
            .find("manifest") != std::string::npos);
}

TEST_CASE("field files round-trip bit for bit") {
  const fs::path dir = scratch("field");
  const Grid g = test::square(16, 2.0);
  const ScalarField f = smooth_random_field(g, 3, 0.1, 0.7);
  write_field(f, dir / "f.nlchf");
  const ScalarField r = read_field(dir / "f.nlchf");
  CHECK(r.grid() == g);
  CHECK(std::equal(f.data().begin(), f.data().end(), r.data().begin(), r.data().end(),
                   [](double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }));

  std::string bytes = slurp(dir / "f.nlchf");
  std::ofstream(dir / "short.nlchf", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  CHECK_THROWS_WITH_AS(read_field(dir / "short.nlchf"), doctest::Contains("payload size mismatch"), IoError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::ofstream(dir / "magic.nlchf", std::ios::binary) << bad;
  CHECK_THROWS_WITH_AS(read_field(dir / "magic.nlchf"), doctest::Contains("not a NLCHF1 file"), IoError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::memcpy(bytes.data() + bytes.size() - 8, &nan, 8);
  std::ofstream(dir / "nan.nlchf", std::ios::binary) << bytes;
  CHECK_THROWS_WITH_AS(read_field(dir / "nan.nlchf"), doctest::Contains("non-finite"), IoError);

  ScalarField inf = f;
  inf[5] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(write_field(inf, dir / "inf.nlchf"), IoError);
}

TEST_CASE("timeseries formatting") {
  const ProblemConfig c = parse_config("[grid]\nn = 8\n[state]\nn_steps = 0\n");
  const ScalarField phi0 = initial_state(c);
  const KernelTable K = build_kernel(c.kernel, c.grid);
  const StateTrajectory tr = simulate(phi0, ControlField::zeros(c.grid, 0, c.state.dt), K, c.potential, c.state);
  const std::string csv = format_timeseries(diagnostics_series(tr, c.state.dt));
  CHECK(csv.rfind("step,time,mass,energy,separation\r\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);

  Timeseries s;
  s.with_cost = true;
  for (int k = 0; k < 4; ++k)
    s.rows.push_back({k, 0.1 * k + 1.0 / 3.0, std::sqrt(2.0) * k, -1e-300 * k, 0.9 - 1e-17, 1.0 / (k + 7.0), 3e-5});
  const Timeseries r = parse_timeseries(format_timeseries(s));
  REQUIRE(r.rows.size() == 4);
  CHECK(r.with_cost);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(r.rows[k].step == s.rows[k].step);
    CHECK(r.rows[k].time == s.rows[k].time);
    CHECK(r.rows[k].mass == s.rows[k].mass);
    CHECK(r.rows[k].energy == s.rows[k].energy);
    CHECK(r.rows[k].separation == s.rows[k].separation);
    CHECK(r.rows[k].cost == s.rows[k].cost);
    CHECK(r.rows[k].stationarity == s.rows[k].stationarity);
  }
}

TEST_CASE("simulate is deterministic and writes one file per slice") {
  ProblemConfig c = parse_config(kSmall);
  c.initial.kind = InitialKind::random;
  std::ostringstream out, report;
  std::string csv[2], field[2];
  for (int run = 0; run < 2; ++run) {
    c.output_dir = scratch("det" + std::to_string(run));
    REQUIRE(run_command("simulate", c, {run + 1}, out, report) == 0);
    csv[run] = slurp(c.output_dir / "simulate" / "diagnostics.csv");
    field[run] = slurp(c.output_dir / "simulate" / "phi_0005.nlchf");
    CHECK(fs::exists(c.output_dir / "simulate" / "mu_0005.nlchf"));
  }
  CHECK(csv[0] == csv[1]);
  CHECK(field[0] == field[1]);
  CHECK(parse_timeseries(csv[0]).rows.size() == 6);
  CHECK(report.str().empty());
}

TEST_CASE("optimize history is monotone and targets round-trip") {
  ProblemConfig c = parse_config(std::string(kSmall) + "[targets]\nreference_amplitude = 1\ngamma = 1, 1, 0.5\n[optimizer]\nmax_iter = 15\n");
  c.output_dir = scratch("opt");
  std::ostringstream out, report;
  REQUIRE(run_command("make-targets", c, {}, out, report) == 0);
  REQUIRE(run_command("optimize", c, {}, out, report) == 0);
  const std::string synthetic = slurp(c.output_dir / "optimize" / "history.csv");
  const Timeseries h = parse_timeseries(synthetic);
  REQUIRE(h.with_cost);
  REQUIRE(h.rows.size() >= 2);
  for (std::size_t k = 1; k < h.rows.size(); ++k) CHECK(h.rows[k].cost <= h.rows[k - 1].cost);

  c.targets.source = TargetSource::files;
  c.targets.manifest = c.output_dir / "targets" / "manifest.json";
  const TargetSet t = read_targets(c.targets.manifest, c);
  const TargetSet s = synthesize_targets(c, build_kernel(c.kernel, c.grid));
  CHECK(t.phi0.data() == s.phi0.data());
  REQUIRE(t.data.phi_Q.size() == s.data.phi_Q.size());
  for (std::size_t k = 0; k < s.data.phi_Q.size(); ++k) CHECK(t.data.phi_Q[k].data() == s.data.phi_Q[k].data());
  REQUIRE(run_command("optimize", c, {}, out, report) == 0);
  CHECK(slurp(c.output_dir / "optimize" / "history.csv") == synthetic);
  CHECK(report.str().empty());
}

TEST_CASE("failure reports are JSON lines") {
  const std::string line = failure_line("gradient-fd-mismatch", 0.5, 1e-5, "worst direction 2");
  CHECK(line.find("\"check\":\"gradient-fd-mismatch\"") != std::string::npos);
  CHECK(line.find("\"threshold\":1e-05") != std::string::npos);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(failure_line("x", std::nan(""), 1.0).find("\"value\":null") != std::string::npos);

  ProblemConfig c = parse_config(kSmall);
  c.grad_check.flip_adjoint_sign = true;
  c.output_dir = scratch("flip");
  std::ostringstream out, report;
  CHECK(run_command("grad-check", c, {}, out, report) == 1);
  CHECK(report.str().find("gradient-fd-mismatch") != std::string::npos);
  CHECK(slurp(c.output_dir / "failures.jsonl") == report.str());
}

TEST_CASE("verify registry covers every module") {
  std::set<std::string> covered;
  for (const Check& c : registered_checks()) covered.insert(c.module);
  CHECK(covered == std::set<std::string>(suite_modules().begin(), suite_modules().end()));
  CHECK(suite_modules().size() == 8);
  std::set<std::string> names;
  for (const Check& c : registered_checks()) CHECK(names.insert(c.module + "/" + c.name).second);
}

TEST_CASE("command line tool") {
  const fs::path dir = scratch("cli");
  const fs::path def = config_dir() / "default.ini";
  CHECK(run_cli("verify --config " + def.string() + " --out " + (dir / "v").string() + " --threads 4", dir) == 0);
  CHECK(slurp(dir / "stdout.txt").find("20/20") != std::string::npos);

  std::ofstream(dir / "flip.ini") << kSmall << "[optimizer]\nflip_adjoint_sign = true\n";
  CHECK(run_cli("grad-check --config " + (dir / "flip.ini").string() + " --out " + (dir / "g").string(), dir) == 1);
  CHECK(slurp(dir / "stderr.txt").find("\"check\":\"gradient-fd-mismatch\"") != std::string::npos);

  std::ofstream(dir / "bad.ini") << kSmall << "[targets]\ngamma = 0, 0, 0\n";
  CHECK(run_cli("simulate --config " + (dir / "bad.ini").string(), dir) == 2);
  CHECK(slurp(dir / "stdout.txt").find("C3 violated") != std::string::npos);

  const fs::path rec = config_dir() / "recovery.ini";
  const std::string out = " --out " + (dir / "r").string();
  REQUIRE(run_cli("make-targets --config " + rec.string() + out, dir) == 0);
  std::string text = slurp(rec);
  const auto pos = text.find("source = synthetic-reference");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("source = synthetic-reference").size(),
               "source = files\nmanifest = " + (dir / "r" / "targets" / "manifest.json").string());
  std::ofstream(dir / "files.ini", std::ios::trunc) << text;
  // exit 1 is allowed here: only the fixed-point assertion may be reported
  const int rc = run_cli("optimize --config " + (dir / "files.ini").string() + out, dir);
  REQUIRE((rc == 0 || rc == 1));
  const std::string failures = slurp(dir / "stderr.txt");
  CHECK(failures.find("optimizer-monotone-cost") == std::string::npos);
  CHECK(failures.find("optimizer-line-search") == std::string::npos);
  CHECK(fs::exists(dir / "r" / "optimize" / "result.json"));
  const Timeseries h = parse_timeseries(slurp(dir / "r" / "optimize" / "history.csv"));
  REQUIRE(h.rows.size() >= 2);
  CHECK(h.rows.back().cost <= 0.1 * h.rows.front().cost);
}
