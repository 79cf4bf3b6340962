#include "ttqc/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace ttqc {

namespace {

[[noreturn]] void fail(std::string_view src, int line, const std::string& msg) {
  std::ostringstream out;
  out << src;
  if (line > 0) out << ':' << line;
  out << ": " << msg;
  throw ConfigError(out.str());
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view v, std::string_view src, int line,
               const std::string& key) {
  T out{};
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || p != end)
    fail(src, line, key + " expects a number, got '" + std::string(v) + "'");
  return out;
}

std::vector<int> parse_state(std::string_view v, std::string_view src,
                             int line, const std::string& key) {
  std::vector<int> bits;
  bits.reserve(v.size());
  for (char c : v) {
    if (c == 'u')
      bits.push_back(0);
    else if (c == 'd')
      bits.push_back(1);
    else
      fail(src, line, key + " takes a string of u/d letters, one per site");
  }
  return bits;
}

std::string state_string(const std::vector<int>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (int b : bits) s.push_back(b == 0 ? 'u' : 'd');
  return s;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Parse-time line bookkeeping so cross-field checks can still point at the
// offending line.
struct Located {
  bool set = false;
  int line = 0;
};

}  // namespace

ExperimentConfig parse_config(std::string_view text, std::string_view source) {
  ExperimentConfig cfg;
  Located sites, duration, tau, state_initial, state_target;
  Located truncation, tolerance;
  std::vector<int> control_lines;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        fail(source, lineno, "unterminated section header");
      const std::string name(trim(line.substr(1, line.size() - 2)));
      if (name != "model" && name != "pulse" && name != "solver" &&
          name != "grape" && name != "output")
        fail(source, lineno, "unknown section [" + name + "]");
      section = name;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      fail(source, lineno, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail(source, lineno, "missing key before '='");
    if (value.empty()) fail(source, lineno, key + " has an empty value");
    const std::string qual = section.empty() ? key : section + "." + key;

    if (section.empty()) {
      if (key == "mode") {
        if (value == "propagate")
          cfg.mode = RunMode::propagate;
        else if (value == "optimize")
          cfg.mode = RunMode::optimize;
        else
          fail(source, lineno, "mode must be propagate or optimize");
      } else {
        fail(source, lineno, "unknown key " + qual +
                                 " (only 'mode' may appear before a section)");
      }
    } else if (section == "model") {
      if (key == "sites") {
        cfg.sites = parse_number<int>(value, source, lineno, qual);
        sites = {true, lineno};
      } else if (key == "jx") {
        cfg.jx = parse_number<double>(value, source, lineno, qual);
      } else if (key == "jy") {
        cfg.jy = parse_number<double>(value, source, lineno, qual);
      } else if (key == "jz") {
        cfg.jz = parse_number<double>(value, source, lineno, qual);
      } else if (key == "control") {
        std::istringstream cv{std::string(value)};
        int site = 0;
        std::string axis, extra;
        if (!(cv >> site >> axis) || (cv >> extra))
          fail(source, lineno, "control takes '<site> <axis>'");
        ControlTerm term;
        term.site = site;
        if (axis == "x")
          term.axis = Axis::x;
        else if (axis == "y")
          term.axis = Axis::y;
        else if (axis == "z")
          term.axis = Axis::z;
        else
          fail(source, lineno, "control axis must be x, y or z");
        cfg.controls.push_back(term);
        control_lines.push_back(lineno);
      } else if (key == "state_initial") {
        cfg.state_initial = parse_state(value, source, lineno, qual);
        state_initial = {true, lineno};
      } else if (key == "state_target") {
        cfg.state_target = parse_state(value, source, lineno, qual);
        state_target = {true, lineno};
      } else {
        fail(source, lineno, "unknown key " + qual);
      }
    } else if (section == "pulse") {
      if (key == "duration") {
        cfg.duration = parse_number<double>(value, source, lineno, qual);
        duration = {true, lineno};
      } else if (key == "tau") {
        cfg.tau = parse_number<double>(value, source, lineno, qual);
        tau = {true, lineno};
      } else if (key == "initialization") {
        if (value == "zero")
          cfg.init = PulseInit::zero;
        else if (value == "random")
          cfg.init = PulseInit::random_small;
        else
          fail(source, lineno, "initialization must be zero or random");
      } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(value, source, lineno, qual);
      } else {
        fail(source, lineno, "unknown key " + qual);
      }
    } else if (section == "solver") {
      if (key == "nodes")
        cfg.solver.nodes = parse_number<int>(value, source, lineno, qual);
      else if (key == "truncation") {
        cfg.solver.truncation =
            parse_number<double>(value, source, lineno, qual);
        truncation = {true, lineno};
      } else if (key == "tolerance") {
        cfg.solver.tolerance =
            parse_number<double>(value, source, lineno, qual);
        tolerance = {true, lineno};
      }
      else if (key == "enrichment")
        cfg.solver.enrichment = parse_number<int>(value, source, lineno, qual);
      else if (key == "max_sweeps")
        cfg.solver.max_sweeps = parse_number<int>(value, source, lineno, qual);
      else
        fail(source, lineno, "unknown key " + qual);
      if (key == "nodes" && (cfg.solver.nodes < 1 || cfg.solver.nodes > 16))
        fail(source, lineno, "solver.nodes must lie in 1..16");
      if (key == "truncation" && cfg.solver.truncation <= 0.0)
        fail(source, lineno, "solver.truncation must be positive");
      if (key == "tolerance" && cfg.solver.tolerance <= 0.0)
        fail(source, lineno, "solver.tolerance must be positive");
      if (key == "enrichment" && cfg.solver.enrichment < 0)
        fail(source, lineno, "solver.enrichment must be non-negative");
      if (key == "max_sweeps" && cfg.solver.max_sweeps < 1)
        fail(source, lineno, "solver.max_sweeps must be at least 1");
    } else if (section == "grape") {
      if (key == "initial_step")
        cfg.grape.initial_step =
            parse_number<double>(value, source, lineno, qual);
      else if (key == "grow")
        cfg.grape.grow = parse_number<double>(value, source, lineno, qual);
      else if (key == "shrink")
        cfg.grape.shrink = parse_number<double>(value, source, lineno, qual);
      else if (key == "max_iters")
        cfg.grape.max_iters = parse_number<int>(value, source, lineno, qual);
      else if (key == "target_infidelity")
        cfg.grape.target_infidelity =
            parse_number<double>(value, source, lineno, qual);
      else
        fail(source, lineno, "unknown key " + qual);
      if (key == "initial_step" && cfg.grape.initial_step <= 0.0)
        fail(source, lineno, "grape.initial_step must be positive");
      if (key == "grow" && cfg.grape.grow <= 1.0)
        fail(source, lineno, "grape.grow must exceed 1");
      if (key == "shrink" &&
          (cfg.grape.shrink <= 0.0 || cfg.grape.shrink >= 1.0))
        fail(source, lineno, "grape.shrink must lie strictly between 0 and 1");
      if (key == "max_iters" && cfg.grape.max_iters < 0)
        fail(source, lineno, "grape.max_iters must be non-negative");
      if (key == "target_infidelity" && cfg.grape.target_infidelity <= 0.0)
        fail(source, lineno, "grape.target_infidelity must be positive");
    } else {  // output
      if (key == "directory")
        cfg.out_dir = std::string(value);
      else
        fail(source, lineno, "unknown key " + qual);
    }
  }

  if (!sites.set) fail(source, 0, "missing required key model.sites");
  if (cfg.sites < 1)
    fail(source, sites.line, "model.sites must be at least 1");
  for (std::size_t i = 0; i < cfg.controls.size(); ++i)
    if (cfg.controls[i].site < 0 || cfg.controls[i].site >= cfg.sites)
      fail(source, control_lines[i],
           "control site out of range for " + std::to_string(cfg.sites) +
               " sites");
  if (state_initial.set &&
      static_cast<int>(cfg.state_initial.size()) != cfg.sites)
    fail(source, state_initial.line,
         "model.state_initial needs one letter per site");
  if (state_target.set &&
      static_cast<int>(cfg.state_target.size()) != cfg.sites)
    fail(source, state_target.line,
         "model.state_target needs one letter per site");

  if (!duration.set) fail(source, 0, "missing required key pulse.duration");
  if (cfg.duration <= 0.0)
    fail(source, duration.line, "pulse.duration must be positive");
  if (cfg.tau <= 0.0) fail(source, tau.line, "pulse.tau must be positive");
  const double ratio = cfg.duration / cfg.tau;
  const auto n = static_cast<long long>(std::llround(ratio));
  if (n < 1 || std::abs(n * cfg.tau - cfg.duration) > 1e-9 * cfg.duration)
    fail(source, tau.set ? tau.line : duration.line,
         "pulse.tau must divide pulse.duration into a whole number of "
         "intervals");
  cfg.intervals = static_cast<int>(n);

  if (cfg.solver.tolerance < cfg.solver.truncation)
    fail(source, tolerance.set ? tolerance.line : truncation.line,
         "solver.tolerance must not be tighter than solver.truncation: "
         "rounding already floors the residual there");

  if (cfg.mode == RunMode::optimize && cfg.controls.empty())
    fail(source, 0, "optimize mode needs at least one control in [model]");

  // End-to-end transfer protocol by default: up against the left edge in,
  // up against the right edge out.
  if (!state_initial.set) {
    cfg.state_initial.assign(cfg.sites, 1);
    cfg.state_initial.front() = 0;
  }
  if (!state_target.set) {
    cfg.state_target.assign(cfg.sites, 1);
    cfg.state_target.back() = 0;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string emit_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "mode = "
      << (cfg.mode == RunMode::propagate ? "propagate" : "optimize") << "\n\n";
  out << "[model]\n";
  out << "sites = " << cfg.sites << '\n';
  out << "jx = " << fmt(cfg.jx) << '\n';
  out << "jy = " << fmt(cfg.jy) << '\n';
  out << "jz = " << fmt(cfg.jz) << '\n';
  for (const ControlTerm& t : cfg.controls)
    out << "control = " << t.site << ' '
        << (t.axis == Axis::x ? 'x' : t.axis == Axis::y ? 'y' : 'z') << '\n';
  out << "state_initial = " << state_string(cfg.state_initial) << '\n';
  out << "state_target = " << state_string(cfg.state_target) << '\n';
  out << "\n[pulse]\n";
  out << "duration = " << fmt(cfg.duration) << '\n';
  out << "tau = " << fmt(cfg.tau) << '\n';
  out << "initialization = "
      << (cfg.init == PulseInit::zero ? "zero" : "random") << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "\n[solver]\n";
  out << "nodes = " << cfg.solver.nodes << '\n';
  out << "truncation = " << fmt(cfg.solver.truncation) << '\n';
  out << "tolerance = " << fmt(cfg.solver.tolerance) << '\n';
  out << "enrichment = " << cfg.solver.enrichment << '\n';
  out << "max_sweeps = " << cfg.solver.max_sweeps << '\n';
  out << "\n[grape]\n";
  out << "initial_step = " << fmt(cfg.grape.initial_step) << '\n';
  out << "grow = " << fmt(cfg.grape.grow) << '\n';
  out << "shrink = " << fmt(cfg.grape.shrink) << '\n';
  out << "max_iters = " << cfg.grape.max_iters << '\n';
  out << "target_infidelity = " << fmt(cfg.grape.target_infidelity) << '\n';
  out << "\n[output]\n";
  out << "directory = " << cfg.out_dir << '\n';
  return out.str();
}

RealMatrix initial_pulses(const ExperimentConfig& cfg) {
  RealMatrix p = RealMatrix::Zero(cfg.intervals,
                                  static_cast<Eigen::Index>(cfg.controls.size()));
  if (cfg.init == PulseInit::random_small) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(-0.1, 0.1);
    for (Eigen::Index n = 0; n < p.rows(); ++n)
      for (Eigen::Index k = 0; k < p.cols(); ++k) p(n, k) = uni(rng);
  }
  return p;
}

}  // namespace ttqc
