#include "zoopt/oracle.hpp"

#include <sstream>

namespace zoopt {

SampleSpace SampleSpace::finite(std::uint64_t n) {
  if (n == 0) throw InvalidArgument("SampleSpace::finite: n must be positive");
  return {Kind::Finite, n};
}

bool SampleSpace::contains(SampleIndex xi) const {
  switch (kind) {
    case Kind::Deterministic:
      return xi == 0;
    case Kind::Finite:
      return xi < size;
    case Kind::Unbounded:
      return true;
  }
  return false;
}

StochasticObjective::StochasticObjective(Index dim, SampleSpace space, EvalFn fn)
    : dim_(dim), space_(space), fn_(std::move(fn)) {
  if (dim_ < 1) throw InvalidArgument("StochasticObjective: dimension must be positive");
  if (!fn_) throw InvalidArgument("StochasticObjective: empty evaluation rule");
}

StochasticObjective::StochasticObjective(const StochasticObjective& other)
    : dim_(other.dim_), space_(other.space_), fn_(other.fn_), queries_(other.queries()) {}

StochasticObjective& StochasticObjective::operator=(const StochasticObjective& other) {
  if (this != &other) {
    dim_ = other.dim_;
    space_ = other.space_;
    fn_ = other.fn_;
    queries_.store(other.queries(), std::memory_order_relaxed);
  }
  return *this;
}

double StochasticObjective::checked_eval(const Vector& x, SampleIndex xi) const {
  if (x.size() != dim_) {
    throw InvalidArgument("evaluate: expected dimension " + std::to_string(dim_) + ", got " +
                          std::to_string(x.size()));
  }
  if (!space_.contains(xi)) {
    throw InvalidSample("evaluate: sample index " + std::to_string(xi) + " out of range");
  }
  const double value = fn_(x, xi);
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "evaluate: non-finite objective value at x = [";
    for (Index i = 0; i < x.size(); ++i) msg << (i ? ", " : "") << x[i];
    msg << "]";
    throw NumericError(msg.str(), to_std(x));
  }
  return value;
}

double StochasticObjective::evaluate(const Vector& x, SampleIndex xi) const {
  const double value = checked_eval(x, xi);
  queries_.fetch_add(1, std::memory_order_relaxed);
  return value;
}

double StochasticObjective::evaluate_uncounted(const Vector& x, SampleIndex xi) const {
  return checked_eval(x, xi);
}

std::vector<SampleIndex> sample_minibatch(const StochasticObjective& obj, std::size_t b,
                                          RngStream& rng) {
  if (b == 0) throw InvalidArgument("sample_minibatch: b must be positive");
  std::vector<SampleIndex> batch(b, 0);
  const auto& space = obj.sample_space();
  switch (space.kind) {
    case SampleSpace::Kind::Deterministic:
      break;
    case SampleSpace::Kind::Finite:
      for (auto& xi : batch) xi = rng.below(space.size);
      break;
    case SampleSpace::Kind::Unbounded:
      for (auto& xi : batch) xi = rng.next_u64();
      break;
  }
  return batch;
}

double full_loss(const StochasticObjective& obj, const Vector& x) {
  const auto& space = obj.sample_space();
  if (space.kind == SampleSpace::Kind::Unbounded) {
    throw UnsupportedOperation("full_loss: sample space is not finite");
  }
  double acc = 0.0;
  for (SampleIndex xi = 0; xi < space.size; ++xi) acc += obj.evaluate_uncounted(x, xi);
  return acc / static_cast<double>(space.size);
}

Vector full_gradient(const StochasticObjective& obj, const ProblemMetadata& meta,
                     const Vector& x) {
  if (!meta.has_gradient()) throw UnsupportedOperation("full_gradient: no analytic gradient");
  const auto& space = obj.sample_space();
  if (space.kind == SampleSpace::Kind::Unbounded) {
    throw UnsupportedOperation("full_gradient: sample space is not finite");
  }
  Vector acc = Vector::Zero(obj.dim());
  for (SampleIndex xi = 0; xi < space.size; ++xi) acc += meta.gradient(x, xi);
  return acc / static_cast<double>(space.size);
}

}  // namespace zoopt
