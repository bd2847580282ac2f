#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rwp/common.hpp"

namespace rwp {

enum class Activation { Tanh, Sigmoid, Identity };

Activation activation_from_name(const std::string& name);
const char* activation_name(Activation a);
double apply_activation(Activation a, double x);

struct Layer {
  Eigen::MatrixXd W;
  Eigen::VectorXd b;
  Activation act = Activation::Identity;
};

/// Weights and biases of a small feed-forward controller (the parameter
/// vector theta). Immutable by convention once loaded; copies are cheap
/// enough for the annealer's perturb-and-test loop.
struct MlpParams {
  std::vector<Layer> layers;

  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().W.cols()); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().W.rows()); }
  int param_count() const;

  /// Throws on dimension chain breaks or non-finite entries.
  void validate() const;
};

Eigen::VectorXd mlp_eval(const MlpParams& mlp, const Eigen::VectorXd& input);

/// Parameter vector view used by the annealer and the finite-difference
/// gradient baseline: weights then biases, layer by layer, row-major.
Eigen::VectorXd mlp_flatten(const MlpParams& mlp);
MlpParams mlp_unflatten(const MlpParams& shape, const Eigen::VectorXd& params);

/// Versioned structured-text weight file; decimal floats with 17
/// significant digits, so save/load round-trips bit-exactly.
std::string mlp_to_text(const MlpParams& mlp);
MlpParams mlp_from_text(const std::string& text);
void save_mlp(const std::string& path, const MlpParams& mlp);
MlpParams load_mlp(const std::string& path);

}  // namespace rwp
