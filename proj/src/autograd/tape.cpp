#include "cloudifier/autograd/tape.hpp"

#include "cloudifier/simd/kernels.hpp"

namespace cloudifier::ag {

Variable::Variable(Tensor value, bool requires_grad, std::string name)
    : node_(std::make_shared<Node>()) {
  node_->value = std::move(value);
  node_->requires_grad = requires_grad;
  node_->name = std::move(name);
}

void Variable::accumulate_grad(const Tensor& g) const {
  require_same_shape(g.shape(), node_->value.shape(), "accumulate_grad");
  if (node_->grad.empty()) {
    node_->grad = g;
    return;
  }
  simd::kernels().axpy(g.size(), real_t{1}, g.ptr(), node_->grad.ptr());
}

std::vector<std::string> Tape::op_names() const {
  std::vector<std::string> names;
  names.reserve(entries_.size());
  for (const auto& e : entries_) names.push_back(e.op);
  return names;
}

Variable Tape::record(std::string op, std::vector<Variable> inputs, Tensor value,
                      Backward backward) {
  bool needs_grad = false;
  for (const auto& in : inputs) needs_grad = needs_grad || in.requires_grad();
  Variable out(std::move(value), needs_grad && recording());
  if (!out.requires_grad()) return out;
  if (consumed_) throw GraphError("tape already consumed by backward(); record on a new tape");
  for (const auto& in : inputs) {
    if (in.node_->producer >= 0 && in.node_->tape != this) {
      throw GraphError(op + ": input produced on a different tape");
    }
  }
  out.node_->producer = static_cast<long>(entries_.size());
  out.node_->tape = this;
  entries_.push_back(Entry{std::move(op), std::move(inputs), out, std::move(backward)});
  return out;
}

void Tape::backward(const Variable& loss) {
  if (consumed_) throw GraphError("backward: tape already replayed");
  if (!loss.defined()) throw GraphError("backward: undefined loss");
  if (loss.value().size() != 1) {
    throw GraphError("backward: loss must be a scalar, got " + loss.shape().str());
  }
  if (!loss.requires_grad()) throw GraphError("backward: loss does not depend on any parameter");
  const long root = loss.node_->producer;
  if (root < 0 || loss.node_->tape != this || root >= static_cast<long>(entries_.size()) ||
      entries_[root].output.id() != loss.id()) {
    throw GraphError("backward: loss was not produced on this tape");
  }
  consumed_ = true;
  loss.node_->grad = Tensor::scalar(real_t{1});
  for (long i = root; i >= 0; --i) {
    Entry& e = entries_[i];
    for (const auto& in : e.inputs) {
      if (in.node_->producer >= i) throw GraphError("backward: cycle at op " + e.op);
    }
    if (!e.output.has_grad()) continue;
    e.backward(e.output.grad());
  }
  // Intermediate gradients and saved activations are released with the entries.
  entries_.clear();
}

}  // namespace cloudifier::ag
