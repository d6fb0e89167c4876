#include "zoopt/problems.hpp"

#include "zoopt/metrics.hpp"

#include <algorithm>
#include <fstream>
#include <memory>

namespace zoopt {

namespace {

double stable_log1p_exp(double z) {
  // log(1 + e^z)
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Vector uniform_vector(Index d, double lo, double hi, RngStream& rng) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

struct QuadraticData {
  Vector curvature;
  Vector center;
  std::vector<Vector> shifts;  // empty for the deterministic problem
};

struct LogisticData {
  std::vector<Vector> features;
  std::vector<double> labels;
};

struct AttackData {
  TinyMlp model;
  std::vector<Vector> images;
  std::vector<Vector> shrunk;
  std::vector<std::size_t> labels;
  AttackOptions options;
};

Vector layer_apply(const DenseLayer& layer, const Vector& x) {
  Vector out(layer.rows);
  for (Index r = 0; r < layer.rows; ++r) {
    double acc = layer.bias[static_cast<std::size_t>(r)];
    const double* row = layer.weights.data() + r * layer.cols;
    for (Index c = 0; c < layer.cols; ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
  return out;
}

}  // namespace

ProblemSpec make_counterexample_lp() {
  const Vector coeffs = (Vector(2) << -2.0, -1.0).finished();
  StochasticObjective obj(2, SampleSpace::deterministic(),
                          [coeffs](const Vector& x, SampleIndex) { return dot(coeffs, x); });
  ProblemMetadata meta;
  meta.lipschitz = std::sqrt(5.0);
  meta.gradient_lipschitz = 0.0;
  meta.gradient_bound = 2.0;
  meta.gradient = [coeffs](const Vector&, SampleIndex) { return coeffs; };
  return ProblemSpec{std::move(obj),
                     ConstraintSet::symmetric_band(Vector::Ones(2), 1.0),
                     std::move(meta),
                     Vector::Constant(2, 0.5),
                     "counterexample-lp",
                     {}};
}

Vector quadratic_curvature(Index d, double condition) {
  if (d < 1) throw InvalidArgument("quadratic_curvature: d must be positive");
  if (!(condition >= 1.0)) throw InvalidArgument("quadratic_curvature: condition must be >= 1");
  Vector a(d);
  for (Index i = 0; i < d; ++i) {
    const double frac = d == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(d - 1);
    a[i] = std::pow(condition, frac);
  }
  return a;
}

ProblemSpec make_quadratic(Index d, double condition, std::uint64_t seed, std::uint64_t samples,
                           double shift_scale) {
  auto data = std::make_shared<QuadraticData>();
  data->curvature = quadratic_curvature(d, condition);
  RngStream rng(seed);
  data->center = uniform_vector(d, -1.0, 1.0, rng);
  if (samples > 0) {
    Vector mean = Vector::Zero(d);
    for (std::uint64_t k = 0; k < samples; ++k) {
      data->shifts.push_back(shift_scale * sample_gaussian(d, rng));
      mean += data->shifts.back();
    }
    mean /= static_cast<double>(samples);
    for (auto& c : data->shifts) c -= mean;
  }

  auto eval = [data](const Vector& x, SampleIndex xi) {
    const Vector diff = x - data->center;
    double acc = 0.0;
    for (Index i = 0; i < diff.size(); ++i) acc += data->curvature[i] * diff[i] * diff[i];
    acc *= 0.5;
    if (!data->shifts.empty()) acc += dot(data->shifts[xi], diff);
    return acc;
  };
  const SampleSpace space = samples > 0 ? SampleSpace::finite(samples) : SampleSpace::deterministic();

  ProblemMetadata meta;
  meta.gradient_lipschitz = data->curvature.maxCoeff();
  meta.optimal_value = 0.0;
  meta.minimizer = data->center;
  meta.gradient = [data](const Vector& x, SampleIndex xi) {
    Vector g = data->curvature.cwiseProduct(x - data->center);
    if (!data->shifts.empty()) g += data->shifts[xi];
    return g;
  };
  return ProblemSpec{StochasticObjective(d, space, eval), ConstraintSet::unconstrained(),
                     std::move(meta), Vector::Zero(d),
                     samples > 0 ? "quadratic-finite-sum" : "quadratic", {}};
}

Vector logistic_planted_weights(Index d, std::uint64_t seed) {
  RngStream rng(seed, 1);
  Vector w = sample_unit_sphere(d, rng);
  return 3.0 * w;
}

ProblemSpec make_logistic(std::uint64_t n, Index d, std::uint64_t seed, double radius) {
  if (n == 0 || d < 1) throw InvalidArgument("make_logistic: n and d must be positive");
  auto data = std::make_shared<LogisticData>();
  const Vector planted = logistic_planted_weights(d, seed);
  RngStream rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  double max_norm_sq = 0.0;
  for (std::uint64_t i = 0; i < n; ++i) {
    Vector a = scale * sample_gaussian(d, rng);
    data->labels.push_back(dot(a, planted) >= 0.0 ? 1.0 : -1.0);
    max_norm_sq = std::max(max_norm_sq, squared_norm(a));
    data->features.push_back(std::move(a));
  }

  auto eval = [data](const Vector& x, SampleIndex xi) {
    return stable_log1p_exp(-data->labels[xi] * dot(data->features[xi], x));
  };
  auto grad = [data](const Vector& x, SampleIndex xi) {
    const double y = data->labels[xi];
    const double margin = y * dot(data->features[xi], x);
    return Vector(-y * sigmoid(-margin) * data->features[xi]);
  };

  ProblemMetadata meta;
  meta.lipschitz = std::sqrt(max_norm_sq);
  meta.gradient_lipschitz = max_norm_sq / 4.0;
  meta.gradient_bound = std::sqrt(max_norm_sq);
  meta.gradient = grad;

  StochasticObjective obj(d, SampleSpace::finite(n), eval);
  const ConstraintSet ball = ConstraintSet::l2_ball(Vector::Zero(d), radius);

  // Comparator for regret: constrained minimizer of the full loss.
  Vector w = Vector::Zero(d);
  const double step = 1.0 / *meta.gradient_lipschitz;
  for (int it = 0; it < 20000; ++it) {
    Vector g = Vector::Zero(d);
    for (std::uint64_t i = 0; i < n; ++i) g += grad(w, i);
    g /= static_cast<double>(n);
    const Vector next = project_euclidean(ball, w - step * g);
    const double moved = (next - w).cwiseAbs().maxCoeff();
    w = next;
    if (moved == 0.0) break;
  }
  meta.minimizer = w;
  meta.optimal_value = full_loss(obj, w);

  return ProblemSpec{std::move(obj), ball, std::move(meta), Vector::Zero(d), "logistic", {}};
}

ProblemSpec make_nonconvex(Index d, std::uint64_t seed, const NonconvexOptions& options) {
  if (d < 1) throw InvalidArgument("make_nonconvex: d must be positive");
  RngStream rng(seed);
  const Vector center = uniform_vector(d, -1.0, 1.0, rng);
  const double eps = options.epsilon;
  const double omega = options.omega;

  auto eval = [center, eps, omega](const Vector& x, SampleIndex) {
    double acc = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
      const double diff = x[i] - center[i];
      acc += 0.5 * diff * diff + eps * std::sin(omega * x[i]);
    }
    return acc;
  };
  ProblemMetadata meta;
  meta.gradient_lipschitz = 1.0 + std::abs(eps) * omega * omega;
  meta.gradient = [center, eps, omega](const Vector& x, SampleIndex) {
    Vector g(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      g[i] = (x[i] - center[i]) + eps * omega * std::cos(omega * x[i]);
    }
    return g;
  };
  const ConstraintSet set = options.box_half_width > 0.0
                                ? ConstraintSet::uniform_box(d, -options.box_half_width,
                                                             options.box_half_width)
                                : ConstraintSet::unconstrained();
  return ProblemSpec{StochasticObjective(d, SampleSpace::deterministic(), eval), set,
                     std::move(meta), Vector::Zero(d),
                     options.box_half_width > 0.0 ? "nonconvex-box" : "nonconvex", {}};
}

void TinyMlp::validate() const {
  if (layers.empty()) throw InvalidArgument("TinyMlp: no layers");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    if (l.rows < 1 || l.cols < 1) throw InvalidArgument("TinyMlp: empty layer shape");
    if (l.weights.size() != static_cast<std::size_t>(l.rows * l.cols) ||
        l.bias.size() != static_cast<std::size_t>(l.rows)) {
      throw InvalidArgument("TinyMlp: layer " + std::to_string(k) + " storage does not match its shape");
    }
    if (k > 0 && layers[k - 1].rows != l.cols) {
      throw InvalidArgument("TinyMlp: layer " + std::to_string(k) + " input size mismatch");
    }
  }
}

TinyMlp make_tiny_mlp(Index input, Index hidden, Index classes, std::uint64_t seed) {
  RngStream rng(seed);
  auto layer = [&rng](Index rows, Index cols, double gain) {
    DenseLayer l{rows, cols, {}, {}};
    const double scale = gain / std::sqrt(static_cast<double>(cols));
    for (Index i = 0; i < rows * cols; ++i) l.weights.push_back(scale * rng.normal());
    for (Index i = 0; i < rows; ++i) l.bias.push_back(0.1 * rng.normal());
    return l;
  };
  TinyMlp model;
  model.layers.push_back(layer(hidden, input, 4.0));
  model.layers.push_back(layer(classes, hidden, 2.0));
  model.validate();
  return model;
}

TinyMlp make_victim_model() {
  return make_tiny_mlp(kVictimInput, kVictimHidden, kVictimClasses, kVictimSeed);
}

Vector mlp_forward(const TinyMlp& model, const Vector& x) {
  if (x.size() != model.input_size()) {
    throw InvalidArgument("mlp_forward: input has dimension " + std::to_string(x.size()) +
                          ", model expects " + std::to_string(model.input_size()));
  }
  Vector h = x;
  for (std::size_t k = 0; k < model.layers.size(); ++k) {
    h = layer_apply(model.layers[k], h);
    if (k + 1 < model.layers.size()) h = h.array().tanh().matrix();
  }
  return h;
}

std::size_t argmax(const Vector& v) {
  if (v.size() == 0) throw InvalidArgument("argmax: empty vector");
  std::size_t best = 0;
  for (Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<Index>(best)]) best = static_cast<std::size_t>(i);
  }
  return best;
}

nlohmann::ordered_json mlp_to_json(const TinyMlp& model) {
  model.validate();
  nlohmann::ordered_json j;
  j["format"] = "tinymlp-v1";
  j["activation"] = "tanh-hidden-identity-output";
  auto layers = nlohmann::ordered_json::array();
  for (const auto& l : model.layers) {
    nlohmann::ordered_json lj;
    lj["shape"] = {l.rows, l.cols};
    lj["weights"] = l.weights;
    lj["bias"] = l.bias;
    layers.push_back(lj);
  }
  j["layers"] = layers;
  return j;
}

TinyMlp mlp_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "tinymlp-v1") {
      throw InvalidArgument("TinyMlp JSON: unsupported format");
    }
    TinyMlp model;
    for (const auto& lj : j.at("layers")) {
      DenseLayer l;
      l.rows = lj.at("shape").at(0).get<Index>();
      l.cols = lj.at("shape").at(1).get<Index>();
      l.weights = lj.at("weights").get<std::vector<double>>();
      l.bias = lj.at("bias").get<std::vector<double>>();
      model.layers.push_back(std::move(l));
    }
    model.validate();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("TinyMlp JSON: ") + e.what());
  }
}

void save_mlp(const TinyMlp& model, const std::filesystem::path& path) {
  write_text_file(path, mlp_to_json(model).dump(1) + "\n");
}

TinyMlp load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path.string());
  try {
    return mlp_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("model file " + path.string() + ": " + e.what());
  }
}

double cw_loss(const Vector& logits, std::size_t target, double kappa) {
  if (logits.size() < 2) throw InvalidArgument("cw_loss: need at least two classes");
  if (target >= static_cast<std::size_t>(logits.size())) {
    throw InvalidArgument("cw_loss: target class out of range");
  }
  double best_other = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < logits.size(); ++j) {
    if (static_cast<std::size_t>(j) != target) best_other = std::max(best_other, logits[j]);
  }
  return std::max(logits[static_cast<Index>(target)] - best_other, -kappa);
}

Vector shrink_into_open_box(const Vector& x) {
  constexpr double kLimit = 0.5 - 1e-6;
  return x.cwiseMax(-kLimit).cwiseMin(kLimit);
}

Vector tanh_reparam(const Vector& w, const Vector& x) {
  require_same_dim(w, x, "tanh_reparam");
  Vector out(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    const double twice = 2.0 * x[i];
    if (!(std::abs(twice) < 1.0)) {
      throw DomainError("tanh_reparam: |2 x| >= 1 at coordinate " + std::to_string(i));
    }
    out[i] = 0.5 * std::tanh(std::atanh(twice) + w[i]);
  }
  return out;
}

LabeledInputs make_pinned_inputs(const TinyMlp& model, std::size_t count, std::uint64_t seed,
                                 double min_margin, double max_margin,
                                 std::optional<std::size_t> label_filter) {
  RngStream rng(seed, 2);
  LabeledInputs out;
  for (int attempt = 0; out.inputs.size() < count; ++attempt) {
    if (attempt > 100000) throw InternalInvariant("make_pinned_inputs: could not find inputs");
    Vector x = uniform_vector(model.input_size(), -0.45, 0.45, rng);
    const Vector z = mlp_forward(model, x);
    const std::size_t label = argmax(z);
    if (label_filter && label != *label_filter) continue;
    const double margin = cw_loss(z, label, 0.0);
    if (margin < min_margin || margin > max_margin) continue;
    out.inputs.push_back(std::move(x));
    out.labels.push_back(label);
  }
  return out;
}

LabeledInputs make_victim_inputs(const TinyMlp& model) {
  return make_pinned_inputs(model, kPinnedInputCount, kVictimSeed, 0.3, 1.5, kPinnedLabel);
}

nlohmann::ordered_json inputs_to_json(const LabeledInputs& inputs) {
  nlohmann::ordered_json j;
  j["format"] = "labeled-inputs-v1";
  auto arr = nlohmann::ordered_json::array();
  for (const auto& x : inputs.inputs) arr.push_back(to_std(x));
  j["inputs"] = arr;
  j["labels"] = inputs.labels;
  return j;
}

LabeledInputs inputs_from_json(const nlohmann::json& j) {
  try {
    LabeledInputs out;
    for (const auto& row : j.at("inputs")) out.inputs.push_back(from_std(row.get<std::vector<double>>()));
    out.labels = j.at("labels").get<std::vector<std::size_t>>();
    if (out.labels.size() != out.inputs.size()) {
      throw InvalidArgument("inputs JSON: label count does not match input count");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("inputs JSON: ") + e.what());
  }
}

std::string to_string(AttackMode m) {
  return m == AttackMode::Constrained ? "constrained" : "unconstrained";
}

AttackMode parse_attack_mode(const std::string& name) {
  if (name == "constrained") return AttackMode::Constrained;
  if (name == "unconstrained") return AttackMode::Unconstrained;
  throw ConfigError("problem.attack.formulation", "expected 'constrained' or 'unconstrained'");
}

ProblemSpec make_attack_problem(const TinyMlp& model, const std::vector<Vector>& images,
                                const std::vector<std::size_t>& labels,
                                const AttackOptions& options) {
  model.validate();
  if (images.empty()) throw InvalidArgument("make_attack_problem: no images");
  if (images.size() != labels.size()) throw InvalidArgument("make_attack_problem: label count mismatch");
  if (!(options.lambda > 0.0)) throw InvalidArgument("make_attack_problem: lambda must be positive");
  if (!(options.kappa >= 0.0)) throw InvalidArgument("make_attack_problem: kappa must be >= 0");
  const Index d = model.input_size();

  auto data = std::make_shared<AttackData>();
  data->model = model;
  data->labels = labels;
  data->options = options;
  Vector lo = Vector::Constant(d, -std::numeric_limits<double>::infinity());
  Vector hi = Vector::Constant(d, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < images.size(); ++i) {
    const Vector& x = images[i];
    if (x.size() != d) throw InvalidArgument("make_attack_problem: image dimension mismatch");
    if ((x.array() < -0.5).any() || (x.array() > 0.5).any() || !all_finite(x)) {
      throw InvalidArgument("make_attack_problem: image " + std::to_string(i) +
                            " is outside [-0.5, 0.5]^d");
    }
    if (labels[i] >= static_cast<std::size_t>(model.classes())) {
      throw InvalidArgument("make_attack_problem: label out of range");
    }
    lo = lo.cwiseMax((-0.5 - x.array()).matrix());
    hi = hi.cwiseMin((0.5 - x.array()).matrix());
    data->images.push_back(x);
    data->shrunk.push_back(shrink_into_open_box(x));
  }

  const bool constrained = options.mode == AttackMode::Constrained;
  auto perturbed = [data, constrained](const Vector& v, std::size_t i) -> Vector {
    return constrained ? Vector(data->images[i] + v) : tanh_reparam(v, data->shrunk[i]);
  };
  auto eval = [data, constrained, perturbed](const Vector& v, SampleIndex xi) {
    const auto i = static_cast<std::size_t>(xi);
    const Vector adv = perturbed(v, i);
    const double cw = cw_loss(mlp_forward(data->model, adv), data->labels[i], data->options.kappa);
    if (constrained) return data->options.lambda * cw + squared_norm(v);
    return data->options.lambda * (cw + squared_norm(Vector(adv - data->images[i])));
  };

  AttackHooks hooks;
  hooks.distortion = [data, constrained, perturbed](const Vector& v) {
    if (constrained) return squared_norm(v);
    double acc = 0.0;
    for (std::size_t i = 0; i < data->images.size(); ++i) {
      acc += squared_norm(Vector(perturbed(v, i) - data->images[i]));
    }
    return acc / static_cast<double>(data->images.size());
  };
  hooks.image_success = [data, perturbed](const Vector& v) {
    std::vector<bool> flags;
    for (std::size_t i = 0; i < data->images.size(); ++i) {
      const double cw =
          cw_loss(mlp_forward(data->model, perturbed(v, i)), data->labels[i], data->options.kappa);
      flags.push_back(cw <= -data->options.kappa);
    }
    return flags;
  };

  ProblemSpec spec{StochasticObjective(d, SampleSpace::finite(images.size()), eval),
                   constrained ? ConstraintSet::box(lo, hi) : ConstraintSet::unconstrained(),
                   ProblemMetadata{},
                   Vector::Zero(d),
                   std::string("attack-") + to_string(options.mode) +
                       (images.size() == 1 ? "-per-image" : "-universal"),
                   std::move(hooks)};
  return spec;
}

}  // namespace zoopt
