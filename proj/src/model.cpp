#include "entgen/model.hpp"

#include <cmath>

namespace entgen {

double coupling_rate(const CouplingGeometry& geom, double omega0) {
  geom.validate();
  if (!(omega0 > 0.0)) throw std::domain_error("omega0 must be > 0");
  return geom.k /
         (2.0 * geom.n * std::pow(geom.R, 2.0 + geom.n) * geom.m * omega0);
}

double coupling_modulation(const SystemParams& p, double t) {
  return p.g0 + 2.0 * p.g1 * std::cos(p.omega_mod * t);
}

Mat4 drift_matrix(const SystemParams& p, double t) {
  const double g = coupling_modulation(p, t);
  Mat4 a;
  a << 0.0, 1.0, 0.0, 0.0,
      -1.0 - 2.0 * g, -p.gamma, 2.0 * g, 0.0,
      0.0, 0.0, 0.0, 1.0,
      2.0 * g, 0.0, -1.0 - 2.0 * g, -p.gamma;
  return a;
}

Mat42 control_matrix() {
  Mat42 b = Mat42::Zero();
  b(1, 0) = 1.0;
  b(3, 1) = 1.0;
  return b;
}

MeasurementModel measurement_model(const SystemParams& p) {
  MeasurementModel m;
  const double c = std::sqrt(4.0 * p.eta * p.gamma_ba);
  m.C = Mat24::Zero();
  m.C(0, 0) = c;
  m.C(1, 2) = c;
  m.W = Mat2::Identity();
  m.M = Mat42::Zero();
  return m;
}

Mat4 process_noise(const SystemParams& p) {
  const double d = p.gamma_ba + p.gamma_th;
  Mat4 v = Mat4::Zero();
  v(1, 1) = d;
  v(3, 3) = d;
  return v;
}

Mat4 epr_cost_matrix(double phi) {
  Vec4 rm(1.0, 0.0, -std::cos(phi), -std::sin(phi));
  Vec4 rp(0.0, 1.0, std::sin(phi), std::cos(phi));
  return rm * rm.transpose() + rp * rp.transpose();
}

ModelMatrices build_model(const SystemParams& p,
                          const MatrixOverrides& overrides) {
  p.validate();
  const MeasurementModel mm = measurement_model(p);
  ModelMatrices m;
  m.B = control_matrix();
  m.C = overrides.C.value_or(mm.C);
  m.W = overrides.W.value_or(mm.W);
  m.M = overrides.M.value_or(mm.M);
  m.V = overrides.V.value_or(process_noise(p));
  m.P = epr_cost_matrix(p.phi);
  return m;
}

}  // namespace entgen
