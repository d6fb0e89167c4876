#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "zoopt/problem_spec.hpp"

namespace zoopt {

/// minimize -2 x1 - x2 s.t. |x1 + x2| <= 1, started at [0.5, 0.5]. Adaptive
/// methods with a Euclidean projection stall at the start point, which is not
/// stationary.
ProblemSpec make_counterexample_lp();

/// Diagonal curvature log-spaced in [1, condition].
Vector quadratic_curvature(Index d, double condition);

/// f(x; xi) = 1/2 sum_i A_i (x_i - x*_i)^2 + c_xi^T (x - x*).
///
/// `samples == 0` gives the deterministic problem (c = 0). Otherwise the n
/// shifts c_xi ~ N(0, shift_scale^2 I) are re-centred to mean zero so the
/// finite-sum average is the plain quadratic with f* = 0 at x*.
ProblemSpec make_quadratic(Index d, double condition, std::uint64_t seed,
                           std::uint64_t samples = 0, double shift_scale = 1.0);

/// Logistic loss log(1 + exp(-y_i a_i^T x)) on labels planted by a weight
/// vector of norm 3, constrained to the ball of the given radius. The metadata
/// minimizer is the constrained minimizer of the full loss (projected gradient
/// descent on the analytic gradient).
ProblemSpec make_logistic(std::uint64_t n, Index d, std::uint64_t seed, double radius = 5.0);

/// Planted weights of `make_logistic` for the same (n, d, seed).
Vector logistic_planted_weights(Index d, std::uint64_t seed);

struct NonconvexOptions {
  double epsilon = 0.1;
  double omega = 2.0;
  /// Optional box [-box_half_width, box_half_width]^d; 0 = unconstrained.
  double box_half_width = 0.0;
};

/// f(x) = 1/2 ||x - x*||^2 + eps sum_i sin(omega x_i); L_g = 1 + eps omega^2.
ProblemSpec make_nonconvex(Index d, std::uint64_t seed, const NonconvexOptions& options = {});

/// Dense layer y = W x + b with W stored row-major (rows = outputs).
struct DenseLayer {
  Index rows = 0;
  Index cols = 0;
  std::vector<double> weights;
  std::vector<double> bias;
};

/// tanh hidden layers, identity output layer.
struct TinyMlp {
  std::vector<DenseLayer> layers;

  Index input_size() const { return layers.empty() ? 0 : layers.front().cols; }
  Index classes() const { return layers.empty() ? 0 : layers.back().rows; }
  void validate() const;
};

/// Input 16, hidden 12, 4 classes.
inline constexpr Index kVictimInput = 16;
inline constexpr Index kVictimHidden = 12;
inline constexpr Index kVictimClasses = 4;
inline constexpr std::uint64_t kVictimSeed = 20190521;
inline constexpr std::size_t kPinnedInputCount = 10;
/// All pinned inputs share this predicted class.
inline constexpr std::size_t kPinnedLabel = 0;

TinyMlp make_tiny_mlp(Index input, Index hidden, Index classes, std::uint64_t seed);
TinyMlp make_victim_model();

Vector mlp_forward(const TinyMlp& model, const Vector& x);
std::size_t argmax(const Vector& v);

nlohmann::ordered_json mlp_to_json(const TinyMlp& model);
TinyMlp mlp_from_json(const nlohmann::json& j);
void save_mlp(const TinyMlp& model, const std::filesystem::path& path);
TinyMlp load_mlp(const std::filesystem::path& path);

/// max{Z_t - max_{j != t} Z_j, -kappa}.
double cw_loss(const Vector& logits, std::size_t target, double kappa);

/// Moves every coordinate into [-0.5 + 1e-6, 0.5 - 1e-6] so atanh(2x) is finite.
Vector shrink_into_open_box(const Vector& x);

/// 0.5 tanh(atanh(2x) + w), componentwise. Requires |2 x_i| < 1.
Vector tanh_reparam(const Vector& w, const Vector& x);

struct LabeledInputs {
  std::vector<Vector> inputs;
  std::vector<std::size_t> labels;
};

/// Seeded inputs in [-0.45, 0.45]^d labelled by the model itself, keeping only
/// those whose CW margin lies in [min_margin, max_margin] and, when `label` is
/// set, whose predicted class is `label`.
LabeledInputs make_pinned_inputs(const TinyMlp& model, std::size_t count, std::uint64_t seed,
                                 double min_margin = 0.3, double max_margin = 1.5,
                                 std::optional<std::size_t> label = std::nullopt);
LabeledInputs make_victim_inputs(const TinyMlp& model);

nlohmann::ordered_json inputs_to_json(const LabeledInputs& inputs);
LabeledInputs inputs_from_json(const nlohmann::json& j);

enum class AttackMode { Constrained, Unconstrained };

std::string to_string(AttackMode m);
AttackMode parse_attack_mode(const std::string& name);

struct AttackOptions {
  double lambda = 10.0;
  double kappa = 0.0;
  AttackMode mode = AttackMode::Constrained;
};

/// Black-box attack on M = images.size() inputs sharing one perturbation (M = 1
/// is the per-image attack). xi indexes the image.
///
/// Constrained: f(delta; i) = lambda cw(x_i + delta) + ||delta||^2 over the
/// intersection box {delta : x_i + delta in [-0.5, 0.5]^d for all i}.
/// Unconstrained: f(w; i) = lambda [cw(x'_i) + ||x'_i - x_i||^2] with
/// x'_i = tanh_reparam(w, x_i).
ProblemSpec make_attack_problem(const TinyMlp& model, const std::vector<Vector>& images,
                                const std::vector<std::size_t>& labels,
                                const AttackOptions& options = {});

}  // namespace zoopt
