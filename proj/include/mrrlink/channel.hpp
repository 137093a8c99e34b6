// SPDX-License-Identifier: Apache-2.0
//
// Round-trip optical channel building blocks: slant geometry, Beer-Lambert
// attenuation, Hufnagel-Valley turbulence profile, Rytov variance,
// Gamma-Gamma fading (shape parameters, moments, sampling) and the
// geometrical gains/losses of the retroreflector link.
#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "mrrlink/config.hpp"
#include "mrrlink/math_util.hpp"
#include "mrrlink/quadrature.hpp"
#include "mrrlink/rng.hpp"

namespace mrrlink {

struct DegenerateTurbulence : std::runtime_error {
  DegenerateTurbulence()
      : std::runtime_error("sigma_R^2 = 0: Gamma-Gamma shapes undefined; "
                           "run with gg_model = off instead") {}
};

struct LinkGeometry {
  double H_s;        // satellite altitude (m)
  double H_0;        // ground-station altitude (m)
  double zeta_elev;  // elevation angle (rad)
  double d_g;        // receiver aperture radius (m)
};

struct AtmosphereParams {
  double zeta;    // scattering coefficient (1/m)
  double lambda;  // wavelength (m)
  double V;       // wind speed (m/s)
  double Cn2_0;   // ground-level Cn^2 (m^-2/3)
  double wavenumber() const { return 2.0 * kPi / lambda; }
};

struct TurbulenceFading {
  double sigma_R2;  // Rytov variance
  double alpha;     // large-scale shape
  double beta;      // small-scale shape
};

struct TransceiverParams {
  double P_t;     // transmit power (W)
  double R;       // responsivity (A/W)
  double N_0;     // per-sample noise variance
  double A_MRR;   // single-element aperture area (m^2)
  int M;          // element count
};

enum class BeamPhase { sensing, positioning };

struct BeamPhaseConfig {
  double theta_div;  // divergence angle (rad)
  double w_z;        // beamwidth at range Z (m), w_z = theta_div * Z
  BeamPhase phase;
};

inline LinkGeometry link_geometry(const Scenario& s) {
  return {s.H_s, s.H_0, s.zeta_elev, s.d_g};
}

inline AtmosphereParams atmosphere_params(const Scenario& s) {
  return {s.zeta, s.lambda, s.V, s.Cn2_0};
}

inline TransceiverParams transceiver_params(const Scenario& s) {
  return {s.P_t, s.R, s.N_0, s.A_MRR, s.M};
}

inline BeamPhaseConfig beam_config(const Scenario& s, BeamPhase phase, double Z) {
  const double w = (phase == BeamPhase::sensing) ? s.w_zs : s.w_zp;
  return {w / Z, w, phase};
}

// Z = H_s / sin(zeta_elev). H_0 deliberately does not enter here; it only
// shifts the lower limit of the turbulence path integral.
inline double slant_range(const LinkGeometry& g) {
  return g.H_s / std::sin(g.zeta_elev);
}

// One-way Beer-Lambert transmittance; the round trip uses the square since
// both directions share Z and zeta.
inline double atmospheric_attenuation(double Z, const AtmosphereParams& atm) {
  return std::exp(-Z * atm.zeta);
}

// Hufnagel-Valley refractive-index structure profile at height Z_h.
inline double cn2_profile(double Z_h, const AtmosphereParams& atm) {
  return 0.00594 * sqr(atm.V / 27.0) * std::pow(1e-5 * Z_h, 10.0) *
             std::exp(-Z_h / 1000.0) +
         2.7e-16 * std::exp(-Z_h / 1500.0) +
         atm.Cn2_0 * std::exp(-Z_h / 100.0);
}

// Path-integrated Rytov variance for a slant path between H_0 and H_s.
inline double rytov_variance(const LinkGeometry& g, const AtmosphereParams& atm) {
  const double kl = atm.wavenumber();
  const double pre = 2.25 * std::pow(kl, 7.0 / 6.0) /
                     std::pow(std::sin(g.zeta_elev), 11.0 / 6.0);
  const double integral = integrate(
      [&](double zh) {
        return cn2_profile(zh, atm) * std::pow(zh - g.H_0, 5.0 / 6.0);
      },
      g.H_0, g.H_s);
  return pre * integral;
}

// Gamma-Gamma shape parameters from the Rytov variance. Plane-wave
// expressions by default; the spherical-wave variant is selectable because
// the wave model is a modeling choice, not an output of the link geometry.
inline TurbulenceFading gg_shape_params(double sigma_R2,
                                        GgModel model = GgModel::plane) {
  if (sigma_R2 <= 0.0) throw DegenerateTurbulence();
  double s2 = sigma_R2;
  double ca = 1.11, cb = 0.69;
  if (model == GgModel::spherical) {
    s2 = 0.4 * sigma_R2;
    ca = 0.56;
    cb = 0.69;
  }
  const double t = std::pow(s2, 6.0 / 5.0);
  const double ea = 0.49 * s2 / std::pow(1.0 + ca * t, 7.0 / 6.0);
  const double eb = 0.51 * s2 / std::pow(1.0 + cb * t, 5.0 / 6.0);
  return {sigma_R2, 1.0 / std::expm1(ea), 1.0 / std::expm1(eb)};
}

// E[h_a] = Gamma(a+1)Gamma(b+1) / (a b Gamma(a) Gamma(b)), identically 1;
// evaluated through log-Gamma anyway so tests can exercise the reduction.
inline double gg_mean(const TurbulenceFading& f) {
  return std::exp(std::lgamma(f.alpha + 1.0) + std::lgamma(f.beta + 1.0) -
                  std::lgamma(f.alpha) - std::lgamma(f.beta)) /
         (f.alpha * f.beta);
}

// E[h_a^2] = Gamma(a+2)Gamma(b+2) / (a^2 b^2 Gamma(a) Gamma(b)).
inline double gg_second_moment(const TurbulenceFading& f) {
  return std::exp(std::lgamma(f.alpha + 2.0) + std::lgamma(f.beta + 2.0) -
                  std::lgamma(f.alpha) - std::lgamma(f.beta)) /
         (f.alpha * f.alpha * f.beta * f.beta);
}

// One Gamma-Gamma fading draw as the product of two unit-mean Gamma variates.
class GgSampler {
 public:
  explicit GgSampler(const TurbulenceFading& f)
      : large_(f.alpha), small_(f.beta) {}
  double sample(RandomStream& rng) const {
    return large_.sample_unit_mean(rng) * small_.sample_unit_mean(rng);
  }

 private:
  GammaSampler large_, small_;
};

inline double sample_gg(const GgSampler& s, RandomStream& rng) {
  return s.sample(rng);
}

// Receiver geometrical gain h_pg = 4 d_g^2 / w_zg^2, clamped at 1 for energy
// conservation. The formula is a far-field approximation; when the aperture
// is not small against the returned beam (2 d_g > w_zg) the optional flag is
// raised.
inline double receiver_geometric_gain(double d_g, double w_zg,
                                      bool* far_field_violation = nullptr) {
  if (far_field_violation) *far_field_violation = (2.0 * d_g > w_zg);
  return std::min(1.0, 4.0 * d_g * d_g / (w_zg * w_zg));
}

// Peak of the per-element pointing loss, 2 A_MRR / (pi w_z^2).
inline double pointing_loss_peak(double A_MRR, double w_z) {
  return 2.0 * A_MRR / (kPi * w_z * w_z);
}

// Point-aperture pointing loss of one retroreflector element at the given
// beam-frame offset; the array average equals the per-element value because
// the array is small against the beam.
inline double mrr_pointing_loss(double x_off, double y_off,
                                const BeamPhaseConfig& beam, double A_MRR) {
  const double w2 = beam.w_z * beam.w_z;
  return pointing_loss_peak(A_MRR, beam.w_z) *
         std::exp(-2.0 * (x_off * x_off + y_off * y_off) / w2);
}

// Everything derived once per scenario: geometry, attenuation, turbulence
// state, and the spatial error scales projected to the beam plane.
struct ChannelState {
  double Z;          // slant range (m)
  double h_L;        // one-way attenuation
  double h_L_rt;     // round-trip attenuation h_L^2
  double sigma_R2;
  TurbulenceFading fading;  // valid unless gg_model == off
  double gg2;        // E[h_a^2] (1 when fading is off)
  GgModel gg_model;
  double sigma_ge;   // gimbal error scale Z * sigma_theta_ge (m)
  double sigma_e;    // FSM error scale Z * sigma_theta_e (m)
  double sigma_aq;   // acquisition spread Z * sigma_theta_aq (m)
};

inline ChannelState derive_channel(const Scenario& s) {
  validate_scenario(s);
  ChannelState st{};
  const LinkGeometry g = link_geometry(s);
  const AtmosphereParams atm = atmosphere_params(s);
  st.Z = slant_range(g);
  st.h_L = atmospheric_attenuation(st.Z, atm);
  st.h_L_rt = st.h_L * st.h_L;
  st.sigma_R2 = rytov_variance(g, atm);
  st.gg_model = s.gg_model;
  if (s.gg_model == GgModel::off) {
    st.fading = {st.sigma_R2, 0.0, 0.0};
    st.gg2 = 1.0;
  } else {
    st.fading = gg_shape_params(st.sigma_R2, s.gg_model);
    st.gg2 = gg_second_moment(st.fading);
  }
  st.sigma_ge = st.Z * s.sigma_theta_ge;
  st.sigma_e = st.Z * s.sigma_theta_e;
  st.sigma_aq = st.Z * s.sigma_theta_aq;
  return st;
}

// Sum over the array of one round-trip fading product per element; fading can
// be switched off, in which case each term is exactly 1.
class ArrayFadingSampler {
 public:
  ArrayFadingSampler(const ChannelState& st, int M)
      : M_(M), off_(st.gg_model == GgModel::off),
        up_(off_ ? TurbulenceFading{0.0, 1.0, 1.0} : st.fading),
        down_(off_ ? TurbulenceFading{0.0, 1.0, 1.0} : st.fading) {}

  double sum(RandomStream& rng) const {
    if (off_) return static_cast<double>(M_);
    double s = 0.0;
    for (int m = 0; m < M_; ++m) s += up_.sample(rng) * down_.sample(rng);
    return s;
  }

  int array_size() const { return M_; }

 private:
  int M_;
  bool off_;
  GgSampler up_, down_;
};

// One draw of the instantaneous round-trip channel coefficient (the fully
// multiplied form): h = h_L^2 h_pg h_ps sum_m h_a1[m] h_a2[m].
inline double channel_coefficient_sample(const Scenario& s,
                                         const ChannelState& st,
                                         const BeamPhaseConfig& beam,
                                         double x_off, double y_off,
                                         const ArrayFadingSampler& fad,
                                         RandomStream& rng) {
  const double h_pg = receiver_geometric_gain(s.d_g, beam.w_z);
  const double h_ps = mrr_pointing_loss(x_off, y_off, beam, s.A_MRR);
  return st.h_L_rt * h_pg * h_ps * fad.sum(rng);
}

} // namespace mrrlink
