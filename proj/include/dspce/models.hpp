#pragma once

#include "dspce/basis.hpp"
#include "dspce/rng.hpp"

#include <Eigen/Dense>

#include <string_view>

namespace dspce {

/// Sparse PC expansion with known coefficients.
struct ManufacturedProblem {
  Eigen::VectorXd truth;
  int sparsity = 0;
  double alpha = 0.0;
  BasisSpec basis;
};

/// `sparsity` positions drawn without replacement, values i.i.d. N(0,1).
ManufacturedProblem manufacture(BasisSpec const& spec, int sparsity, double alpha, Engine& engine);

/// v_i = w_i (psi_i c + alpha |psi_i c| x_i) with x_i ~ N(0,1); `psi` is unweighted.
Eigen::VectorXd noisy_rhs(ManufacturedProblem const& problem, Eigen::Ref<const Eigen::MatrixXd> const& psi,
                          Eigen::Ref<const Eigen::VectorXd> const& weights, Engine& engine);

enum class PhysicalModel { Duffing, WingWeight, Ishigami };

std::string_view to_string(PhysicalModel model);
PhysicalModel parse_model(std::string_view name);
int input_dim(PhysicalModel model);
double evaluate(PhysicalModel model, Eigen::Ref<const Eigen::VectorXd> const& xi);

/// u(t_end) for u'' + 2 w1 w2 u' + w1^2 (u + w3 u^3) = 0, u(0) = 1, u'(0) = 0.
///
/// Adaptive Dormand-Prince 5(4) with absolute and relative tolerance `tol`.
double duffing_displacement(double omega1, double omega2, double omega3, double t_end, double tol = 1e-10);

/// Duffing displacement at t = 4 with w1 = 2 pi (1 + 0.2 xi1), w2 = 0.05 (1 + 0.05 xi2),
/// w3 = -0.5 (1 + 0.5 xi3).
double duffing_qoi(Eigen::Ref<const Eigen::VectorXd> const& xi);

/// Light-aircraft wing weight. Each xi_j in [-1,1] maps affinely onto its parameter range:
/// S_w, W_fw, A, Lambda (deg), q, lambda, t_c, N_z, W_dg, W_p.
double wing_weight(Eigen::Ref<const Eigen::VectorXd> const& xi);

/// sin(pi xi1) + 7 sin^2(pi xi2) + 0.1 (pi xi3)^4 sin(pi xi1).
double ishigami(Eigen::Ref<const Eigen::VectorXd> const& xi);

}  // namespace dspce
