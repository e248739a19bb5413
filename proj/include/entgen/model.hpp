#pragma once

#include <optional>

#include "entgen/params.hpp"
#include "entgen/types.hpp"

namespace entgen {

/// Coupling rate g = k / (2 n R^(2+n) m omega0) of the linearized k/r^n
/// interaction, in rad/s.
double coupling_rate(const CouplingGeometry& geom, double omega0);

/// Time-modulated coupling g(t) = g0 + 2 g1 cos(Omega t).
double coupling_modulation(const SystemParams& p, double t);

/// Drift matrix A(t) of the coupled, damped pair in (X1,P1,X2,P2) order.
Mat4 drift_matrix(const SystemParams& p, double t);

/// Control matrix B: a force on each particle actuates its momentum.
Mat42 control_matrix();

struct MeasurementModel {
  Mat24 C; // measurement matrix
  Mat2 W;  // measurement noise correlation
  Mat42 M; // process/measurement cross-correlation
};

/// Default continuous position measurement of both particles,
/// C = sqrt(4 eta Gamma_ba) * [[1,0,0,0],[0,0,1,0]], W = I, M = 0.
MeasurementModel measurement_model(const SystemParams& p);

/// Process noise V = diag(0, Gamma_ba + Gamma_th, 0, Gamma_ba + Gamma_th):
/// momentum diffusion only. The prefactor pairing with measurement_model is
/// pinned by the single-mode purity calibration (det Sigma = 1/4 at eta = 1,
/// Gamma_th = 0).
Mat4 process_noise(const SystemParams& p);

/// EPR cost matrix P = r- r-^T + r+ r+^T with the norm-sqrt(2) coefficient
/// vectors of the EPR quadratures at phase phi. Symmetric PSD, rank 2,
/// trace 4.
Mat4 epr_cost_matrix(double phi);

/// All constant matrices entering the dynamics, with optional overrides for
/// the conventions deferred to the companion stationary theory.
struct ModelMatrices {
  Mat42 B;
  Mat24 C;
  Mat2 W;
  Mat42 M;
  Mat4 V;
  Mat4 P;
};

struct MatrixOverrides {
  std::optional<Mat24> C;
  std::optional<Mat2> W;
  std::optional<Mat42> M;
  std::optional<Mat4> V;
};

ModelMatrices build_model(const SystemParams& p,
                          const MatrixOverrides& overrides = {});

}  // namespace entgen
