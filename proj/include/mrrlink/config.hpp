// SPDX-License-Identifier: Apache-2.0
//
// Scenario parameters and the flat key=value config format. Keys are named
// after the symbols they set (SI units throughout); unknown keys are rejected
// with a diagnostic naming the offending key.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mrrlink/math_util.hpp"

namespace mrrlink {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class GgModel { plane, spherical, off };

inline const char* to_string(GgModel m) {
  switch (m) {
    case GgModel::plane: return "plane";
    case GgModel::spherical: return "spherical";
    case GgModel::off: return "off";
  }
  return "plane";
}

// One flat bag of scenario parameters. Defaults are a working LEO scenario
// (500 km zenith pass, 1550 nm, 9-element retroreflector array); they are
// deliberate choices, not published values, and every one of them can be
// overridden from a config file or the command line.
struct Scenario {
  // link geometry
  double H_s = 500e3;             // satellite altitude (m)
  double H_0 = 0.0;               // ground-station altitude (m)
  double zeta_elev = kPi / 2.0;   // elevation angle (rad)
  double d_g = 0.1;               // GS aperture radius (m)
  // atmosphere
  double zeta = 4.2e-7;           // effective scattering coefficient (1/m)
  double lambda = 1550e-9;        // wavelength (m)
  double V = 21.0;                // wind speed (m/s)
  double Cn2_0 = 1.7e-14;         // ground refractive-index structure (m^-2/3)
  GgModel gg_model = GgModel::plane;
  // transceiver
  double P_t = 10.0;              // interrogator power (W)
  double R = 0.5;                 // photodetector responsivity (A/W)
  double N_0 = 1e-24;             // per-sample additive-noise variance
  double A_MRR = 1e-4;            // single retroreflector aperture area (m^2)
  int M = 9;                      // retroreflector count
  // sensing phase
  double sigma_theta_ge = 2e-3;   // gimbal error (rad)
  double sigma_theta_e = 6e-6;    // fast-steering-mirror error (rad)
  double sigma_theta_aq = 1.4e-3; // acquisition search spread (rad)
  int N_m = 5;                    // acquisition beams per step
  int K_c = 1000;                 // samples per coherence interval
  int K_d = 500;                  // coherence intervals per step
  double T_bit = 1e-9;            // bit duration (s)
  double R_th = 150.0;            // sensing distance threshold (m)
  double R_e = 10.0;              // acceptable estimation error (m)
  double w_zs = 80.0;             // sensing beamwidth at range Z (m)
  // positioning phase
  double w_zp = 40.0;             // positioning beamwidth at range Z (m)
  double R_emb = 30.0;            // ambiguity-circle radius (m)
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    while (pos < v.size() && std::isspace(static_cast<unsigned char>(v[pos]))) ++pos;
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

inline int parse_int(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  const int i = static_cast<int>(std::llround(x));
  if (std::fabs(x - i) > 1e-9) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
  return i;
}

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

} // namespace detail

inline void apply_config_entry(Scenario& s, const std::string& key,
                               const std::string& value) {
  using detail::parse_double;
  using detail::parse_int;
  if (key == "H_s") s.H_s = parse_double(key, value);
  else if (key == "H_0") s.H_0 = parse_double(key, value);
  else if (key == "zeta_elev") s.zeta_elev = parse_double(key, value);
  else if (key == "d_g") s.d_g = parse_double(key, value);
  else if (key == "zeta") s.zeta = parse_double(key, value);
  else if (key == "lambda") s.lambda = parse_double(key, value);
  else if (key == "V") s.V = parse_double(key, value);
  else if (key == "Cn2_0") s.Cn2_0 = parse_double(key, value);
  else if (key == "gg_model") {
    const std::string v = detail::trim(value);
    if (v == "plane") s.gg_model = GgModel::plane;
    else if (v == "spherical") s.gg_model = GgModel::spherical;
    else if (v == "off") s.gg_model = GgModel::off;
    else throw ConfigError("config key 'gg_model': expected plane|spherical|off, got '" + v + "'");
  }
  else if (key == "P_t") s.P_t = parse_double(key, value);
  else if (key == "R") s.R = parse_double(key, value);
  else if (key == "N_0") s.N_0 = parse_double(key, value);
  else if (key == "A_MRR") s.A_MRR = parse_double(key, value);
  else if (key == "M") s.M = parse_int(key, value);
  else if (key == "sigma_theta_ge") s.sigma_theta_ge = parse_double(key, value);
  else if (key == "sigma_theta_e") s.sigma_theta_e = parse_double(key, value);
  else if (key == "sigma_theta_aq") s.sigma_theta_aq = parse_double(key, value);
  else if (key == "N_m") s.N_m = parse_int(key, value);
  else if (key == "K_c") s.K_c = parse_int(key, value);
  else if (key == "K_d") s.K_d = parse_int(key, value);
  else if (key == "T_bit") s.T_bit = parse_double(key, value);
  else if (key == "R_th") s.R_th = parse_double(key, value);
  else if (key == "R_e") s.R_e = parse_double(key, value);
  else if (key == "w_zs") s.w_zs = parse_double(key, value);
  else if (key == "w_zp") s.w_zp = parse_double(key, value);
  else if (key == "R_emb") s.R_emb = parse_double(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

inline void validate_scenario(const Scenario& s) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("invalid scenario: ") + what);
  };
  require(s.H_s > s.H_0 && s.H_0 >= 0.0, "H_s > H_0 >= 0 required");
  require(s.zeta_elev > 0.0 && s.zeta_elev <= kPi / 2.0, "0 < zeta_elev <= pi/2 required");
  require(s.d_g > 0.0, "d_g > 0 required");
  require(s.zeta >= 0.0, "zeta >= 0 required");
  require(s.lambda > 0.0, "lambda > 0 required");
  require(s.V >= 0.0 && s.Cn2_0 >= 0.0, "V, Cn2_0 >= 0 required");
  require(s.P_t > 0.0 && s.R > 0.0, "P_t, R > 0 required");
  require(s.N_0 >= 0.0, "N_0 >= 0 required");
  require(s.A_MRR > 0.0, "A_MRR > 0 required");
  require(s.M >= 1, "M >= 1 required");
  require(s.sigma_theta_ge > 0.0 && s.sigma_theta_e >= 0.0 && s.sigma_theta_aq >= 0.0,
          "angular error scales must be nonnegative (sigma_theta_ge positive)");
  require(s.N_m >= 1, "N_m >= 1 required");
  require(s.K_c >= 1 && s.K_d >= 1, "K_c, K_d >= 1 required");
  require(s.T_bit > 0.0, "T_bit > 0 required");
  require(s.R_e > 0.0 && s.R_e < s.R_th, "0 < R_e < R_th required");
  require(s.w_zs > 0.0 && s.w_zp > 0.0, "beamwidths must be positive");
  require(s.R_emb > 0.0, "R_emb > 0 required");
}

// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
inline Scenario parse_scenario(std::istream& in, Scenario base = Scenario{}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + t + "'");
    }
    apply_config_entry(base, detail::trim(t.substr(0, eq)),
                       detail::trim(t.substr(eq + 1)));
  }
  return base;
}

inline Scenario load_scenario(const std::string& path, Scenario base = Scenario{}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_scenario(in, base);
}

} // namespace mrrlink
