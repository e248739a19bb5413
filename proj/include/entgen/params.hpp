#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace entgen {

/// Physical and control rates of the two-oscillator system. All rates are
/// stored in units of the mechanical eigenfrequency omega0; omega0 itself is
/// kept only for converting physical inputs.
struct SystemParams {
  double omega0 = 1.0;    // mechanical eigenfrequency [rad/s]
  double g0 = 0.2;        // static coupling, + attractive / - repulsive
  double g1 = 0.0;        // modulation amplitude
  double omega_mod = 2.7; // modulation frequency Omega
  double gamma = 0.0;     // intrinsic damping
  double gamma_ba = 0.05; // backaction (photon recoil) rate
  double gamma_th = 0.0025; // thermal decoherence rate
  double eta = 1.0;       // detection efficiency in [0,1]
  double q = 0.1;         // control effort
  double phi = std::numbers::pi; // EPR phase [rad]

  void validate() const {
    if (!(omega0 > 0.0)) throw std::invalid_argument("omega0 must be > 0");
    if (!(eta >= 0.0 && eta <= 1.0))
      throw std::invalid_argument("eta must be in [0,1]");
    if (!(q > 0.0)) throw std::invalid_argument("q must be > 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
    if (!(gamma_ba >= 0.0)) throw std::invalid_argument("gamma_ba must be >= 0");
    if (!(gamma_th >= 0.0)) throw std::invalid_argument("gamma_th must be >= 0");
    if (g1 != 0.0 && !(omega_mod > 0.0))
      throw std::invalid_argument("omega_mod must be > 0 when g1 != 0");
    if (!std::isfinite(g0) || !std::isfinite(g1) || !std::isfinite(omega_mod))
      throw std::invalid_argument("non-finite parameter");
  }

  /// Modulation period T = 2*pi/Omega. For g1 = 0 the dynamics are
  /// stationary and any positive omega_mod defines the sampling window.
  double period() const { return 2.0 * std::numbers::pi / omega_mod; }
};

/// Geometry of the central k/r^n interaction potential (SI units).
struct CouplingGeometry {
  double k = 0.0; // interaction constant [J m^n]
  int n = 1;      // power-law exponent
  double R = 1.0; // interparticle separation [m]
  double m = 1.0; // particle mass [kg]

  void validate() const {
    if (n < 1) throw std::domain_error("n must be >= 1");
    if (!(R > 0.0)) throw std::domain_error("R must be > 0");
    if (!(m > 0.0)) throw std::domain_error("m must be > 0");
  }
};

}  // namespace entgen
