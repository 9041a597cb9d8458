#pragma once

// Model constants, run settings, the discretization of the phase space
// Y = T x [0, s_max], and the key=value config file that carries them.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace mfgtraffic {

/// Physical and game constants. Defaults are the reference traffic setup:
/// a ring road of length 2*pi, s_max = L/20, u_max = s_max/6, w_max = u_max/10.
struct ModelParams {
  double road_length = 2.0 * std::numbers::pi;
  double s_max = 2.0 * std::numbers::pi / 20.0;
  double u_max = 2.0 * std::numbers::pi / 20.0 / 6.0;
  double w_max = 2.0 * std::numbers::pi / 20.0 / 6.0 / 10.0;
  double gamma = 10.0;
  double beta = 2.0;
  double alpha = 1.0;
  double epsilon = 0.0005;
  double theta_inv = 1e-2;
  int K = 2;
  double weight_init = 0.1;

  bool operator==(const ModelParams&) const = default;
};

struct RunConfig {
  double T = 600.0;
  double dt = 0.0025;
  int nx = 81;
  int nv = 81;
  // Empty means "initial and final time only".
  std::vector<double> snapshot_times;
  long long mc_agents = 0;
  std::uint64_t rng_seed = 12345;
  std::string out_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

/// Uniform cell-centred grid on T x [0, s_max].
class GridSpec {
 public:
  GridSpec(int nx, int nv, double road_length, double s_max)
      : nx_(nx), nv_(nv), length_(road_length), s_max_(s_max),
        dx_(road_length / nx), dv_(s_max / nv) {
    if (nx < 1 || nv < 1) throw std::invalid_argument("GridSpec: cell counts must be positive");
    if (!(road_length > 0.0) || !(s_max > 0.0))
      throw std::invalid_argument("GridSpec: domain extents must be positive");
  }
  GridSpec(const RunConfig& run, const ModelParams& p)
      : GridSpec(run.nx, run.nv, p.road_length, p.s_max) {}

  int nx() const { return nx_; }
  int nv() const { return nv_; }
  std::size_t cells() const { return static_cast<std::size_t>(nx_) * nv_; }
  double dx() const { return dx_; }
  double dv() const { return dv_; }
  double cell_area() const { return dx_ * dv_; }
  double road_length() const { return length_; }
  double s_max() const { return s_max_; }

  double x_center(int i) const { return (i + 0.5) * dx_; }
  double v_center(int j) const { return (j + 0.5) * dv_; }

  // Cells are stored x-major: all speeds of position i are contiguous.
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * nv_ + j;
  }

  bool operator==(const GridSpec& o) const { return nx_ == o.nx_ && nv_ == o.nv_ && length_ == o.length_ && s_max_ == o.s_max_; }

 private:
  int nx_, nv_;
  double length_, s_max_;
  double dx_, dv_;
};

struct CflMargin {
  std::string name;
  double bound;   // largest admissible dt for this mechanism (before safety factor)
  double margin;  // safety * bound - dt; negative means violated
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<CflMargin> cfl;

  bool ok() const { return violations.empty(); }
};

inline constexpr double kCflSafety = 0.9;

inline ValidationReport validate(const ModelParams& p, const RunConfig& run) {
  ValidationReport rep;
  auto require = [&](bool cond, std::string msg) {
    if (!cond) rep.violations.push_back(std::move(msg));
  };
  auto positive = [&](double v, const char* name) {
    require(std::isfinite(v) && v > 0.0, std::string(name) + " must be finite and > 0");
  };
  positive(p.road_length, "road_length");
  positive(p.s_max, "s_max");
  positive(p.gamma, "gamma");
  positive(p.beta, "beta");
  positive(p.alpha, "alpha");
  positive(p.epsilon, "epsilon");
  positive(p.theta_inv, "theta_inv");
  require(std::isfinite(p.weight_init), "weight_init must be finite");
  require(p.K >= 1, "K must be >= 1");
  require(std::isfinite(p.w_max) && std::isfinite(p.u_max) && 0.0 < p.w_max &&
              p.w_max < p.u_max,
          "bounds must satisfy 0 < w_max < u_max < inf");

  positive(run.dt, "dt");
  // T = 0 is an initial-state-only run.
  require(std::isfinite(run.T) && (run.T == 0.0 || run.T >= run.dt), "T must be 0 or >= dt");
  require(run.nx >= 4, "nx must be >= 4");
  require(run.nv >= 4, "nv must be >= 4");
  require(run.mc_agents >= 0, "mc_agents must be >= 0");
  for (double ts : run.snapshot_times)
    require(ts >= 0.0 && ts <= run.T, "snapshot time " + std::to_string(ts) + " outside [0, T]");

  if (!rep.ok() || run.nx < 1 || run.nv < 1) return rep;

  const double dx = p.road_length / run.nx;
  const double dv = p.s_max / run.nv;
  const double bounds[3] = {dx / p.s_max, dv / (p.u_max + p.w_max), dv * dv / (2.0 * p.epsilon)};
  const char* names[3] = {"advection_x", "advection_v", "diffusion_v"};
  for (int k = 0; k < 3; ++k) {
    rep.cfl.push_back({names[k], bounds[k], kCflSafety * bounds[k] - run.dt});
  }
  const double limit = kCflSafety * std::min({bounds[0], bounds[1], bounds[2]});
  if (run.dt > limit) {
    std::ostringstream os;
    os << "CFL violation: dt=" << run.dt << " exceeds " << kCflSafety << " * min bound = " << limit;
    rep.violations.push_back(os.str());
  }
  return rep;
}

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_number(std::string_view text, std::string_view key, int line) {
  text = trim(text);
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("cannot parse value '" + std::string(text) + "' for key '" + std::string(key) + "'", line);
  return value;
}

inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Parses key=value text. Keys not present keep their defaults; s_max, u_max
/// and w_max follow road_length unless they are set explicitly.
inline std::pair<ModelParams, RunConfig> parse_config(std::istream& in) {
  ModelParams p;
  RunConfig run;
  std::optional<double> road_length, s_max, u_max, w_max;

  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value", line_no);
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view val = detail::trim(line.substr(eq + 1));
    auto num = [&] { return detail::parse_number<double>(val, key, line_no); };
    auto integer = [&] { return detail::parse_number<long long>(val, key, line_no); };

    if (key == "road_length") road_length = num();
    else if (key == "s_max") s_max = num();
    else if (key == "u_max") u_max = num();
    else if (key == "w_max") w_max = num();
    else if (key == "gamma") p.gamma = num();
    else if (key == "beta") p.beta = num();
    else if (key == "alpha") p.alpha = num();
    else if (key == "epsilon") p.epsilon = num();
    else if (key == "theta_inv") p.theta_inv = num();
    else if (key == "K") p.K = static_cast<int>(integer());
    else if (key == "weight_init") p.weight_init = num();
    else if (key == "T") run.T = num();
    else if (key == "dt") run.dt = num();
    else if (key == "nx") run.nx = static_cast<int>(integer());
    else if (key == "nv") run.nv = static_cast<int>(integer());
    else if (key == "mc_agents") run.mc_agents = integer();
    else if (key == "rng_seed") run.rng_seed = detail::parse_number<std::uint64_t>(val, key, line_no);
    else if (key == "out_dir") run.out_dir = std::string(val);
    else if (key == "snapshot_times") {
      run.snapshot_times.clear();
      std::string_view rest = val;
      while (!rest.empty()) {
        auto comma = rest.find(',');
        run.snapshot_times.push_back(detail::parse_number<double>(rest.substr(0, comma), key, line_no));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
    } else {
      throw ConfigError("unknown key '" + key + "'", line_no);
    }
  }

  if (road_length) p.road_length = *road_length;
  p.s_max = s_max.value_or(p.road_length / 20.0);
  p.u_max = u_max.value_or(p.s_max / 6.0);
  p.w_max = w_max.value_or(p.u_max / 10.0);
  return {p, run};
}

inline std::pair<ModelParams, RunConfig> load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

/// Writes every key explicitly, so parse_config(save_config(x)) == x.
inline std::string save_config(const ModelParams& p, const RunConfig& run) {
  using detail::format_double;
  std::ostringstream os;
  os << "road_length=" << format_double(p.road_length) << '\n'
     << "s_max=" << format_double(p.s_max) << '\n'
     << "u_max=" << format_double(p.u_max) << '\n'
     << "w_max=" << format_double(p.w_max) << '\n'
     << "gamma=" << format_double(p.gamma) << '\n'
     << "beta=" << format_double(p.beta) << '\n'
     << "alpha=" << format_double(p.alpha) << '\n'
     << "epsilon=" << format_double(p.epsilon) << '\n'
     << "theta_inv=" << format_double(p.theta_inv) << '\n'
     << "K=" << p.K << '\n'
     << "weight_init=" << format_double(p.weight_init) << '\n'
     << "T=" << format_double(run.T) << '\n'
     << "dt=" << format_double(run.dt) << '\n'
     << "nx=" << run.nx << '\n'
     << "nv=" << run.nv << '\n';
  if (!run.snapshot_times.empty()) {
    os << "snapshot_times=";
    for (std::size_t k = 0; k < run.snapshot_times.size(); ++k)
      os << (k ? "," : "") << format_double(run.snapshot_times[k]);
    os << '\n';
  }
  os << "mc_agents=" << run.mc_agents << '\n'
     << "rng_seed=" << run.rng_seed << '\n'
     << "out_dir=" << run.out_dir << '\n';
  return os.str();
}

}  // namespace mfgtraffic
