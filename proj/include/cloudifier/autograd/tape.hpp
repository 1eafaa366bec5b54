#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cloudifier/tensor.hpp"

namespace cloudifier::ag {

// Shared handle to a value in the computation graph plus its gradient slot.
// Copies alias the same node.
class Variable {
 public:
  Variable() = default;
  explicit Variable(Tensor value, bool requires_grad = false, std::string name = {});

  bool defined() const noexcept { return node_ != nullptr; }
  const Tensor& value() const { return node_->value; }
  // Handle semantics: mutators act on the shared node even through a const handle.
  Tensor& mutable_value() const { return node_->value; }
  const Shape& shape() const { return node_->value.shape(); }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  // Gradient, or an empty tensor if nothing flowed into this node.
  const Tensor& grad() const { return node_->grad; }
  Tensor& mutable_grad() const { return node_->grad; }
  void zero_grad() const { node_->grad = Tensor(); }
  // grad += g (allocates on first use).
  void accumulate_grad(const Tensor& g) const;

  const std::string& name() const { return node_->name; }
  const void* id() const noexcept { return node_.get(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::string name;
    long producer = -1;  // tape entry that produced the value, -1 for leaves
    const void* tape = nullptr;
  };
  std::shared_ptr<Node> node_;
  friend class Tape;
};

// Ordered record of executed ops. backward() replays the adjoints in reverse,
// each exactly once; a tape is consumed by its backward pass.
class Tape {
 public:
  enum class Mode { Record, Inference };

  explicit Tape(Mode mode = Mode::Record) : mode_(mode) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return mode_ == Mode::Record; }
  std::size_t size() const noexcept { return entries_.size(); }
  // Names of recorded ops, in execution order.
  std::vector<std::string> op_names() const;

  using Backward = std::function<void(const Tensor& grad_out)>;

  // Wraps `value` as the output of `op`. The op is recorded only when the tape
  // is recording and some input requires a gradient.
  Variable record(std::string op, std::vector<Variable> inputs, Tensor value, Backward backward);

  // Seeds d loss / d loss = 1 and propagates to every requires_grad input.
  void backward(const Variable& loss);

 private:
  struct Entry {
    std::string op;
    std::vector<Variable> inputs;
    Variable output;
    Backward backward;
  };
  Mode mode_;
  std::vector<Entry> entries_;
  bool consumed_ = false;
};

}  // namespace cloudifier::ag
