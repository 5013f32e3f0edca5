#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "haucl/errors.hpp"
#include "haucl/rng.hpp"

namespace haucl {

using Shape = std::vector<std::size_t>;

std::size_t numel(const Shape& shape);
std::string shape_str(const Shape& shape);

namespace detail {

struct TensorNode {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty means "no gradient accumulated yet"
  bool requires_grad = false;

  std::vector<double>& grad_buffer();  // allocates zeros on first touch
};

}  // namespace detail

/// Dense row-major f64 tensor; a cheap shared handle onto the underlying
/// storage. Ops executed while a Tape is active and involving at least one
/// requires_grad tensor are recorded for reverse-mode differentiation.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double fill);
  static Tensor from(Shape shape, std::vector<double> values);
  static Tensor scalar(double v);
  /// Uniform in [lo, hi), drawn row-major from the stream.
  static Tensor uniform(Shape shape, double lo, double hi, RngStream& rng);
  static Tensor normal(Shape shape, RngStream& rng);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t numel() const { return node_->value.size(); }
  std::size_t rank() const { return node_->shape.size(); }
  std::size_t rows() const;  // first dim of a matrix
  std::size_t cols() const;  // second dim of a matrix

  const std::vector<double>& values() const { return node_->value; }
  std::vector<double>& mutable_values() { return node_->value; }
  double item() const;  // scalar tensors only
  double at(std::size_t i) const { return node_->value[i]; }
  double at(std::size_t r, std::size_t c) const;

  bool requires_grad() const { return node_->requires_grad; }
  Tensor& set_requires_grad(bool v);
  bool has_grad() const { return node_ && !node_->grad.empty(); }
  const std::vector<double>& grad() const;
  void clear_grad();

  /// Same values, detached from any gradient history.
  Tensor detach() const;

  std::shared_ptr<detail::TensorNode> node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<detail::TensorNode> node_;

  friend class Tape;
  friend Tensor make_op(Shape, std::vector<double>, const std::vector<Tensor>&,
                        std::function<void(detail::TensorNode&)>);
};

/// Append-only record of executed primitive ops. backward() replays the
/// records in reverse execution order (a topological order of the DAG by
/// construction), visiting each op exactly once.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Seeds d(loss)/d(loss)=1 and accumulates gradients into every
  /// requires_grad tensor reachable backwards from `loss`. Throws on a
  /// non-scalar loss; a second call on the same tape throws.
  void backward(const Tensor& loss);

  std::size_t size() const { return records_.size(); }
  bool consumed() const { return consumed_; }

  /// RAII activation; ops record onto the innermost active tape.
  class Scope {
   public:
    explicit Scope(Tape& tape);
    ~Scope();
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* previous_;
  };

  static Tape* active();

 private:
  struct OpRecord {
    std::vector<std::shared_ptr<detail::TensorNode>> inputs;
    std::shared_ptr<detail::TensorNode> output;
    std::function<void(detail::TensorNode&)> backward;
  };
  std::vector<OpRecord> records_;
  bool consumed_ = false;

  friend Tensor make_op(Shape, std::vector<double>, const std::vector<Tensor>&,
                        std::function<void(detail::TensorNode&)>);
};

/// Convenience: backward on the active tape.
void backward(const Tensor& loss);

// ---- primitive ops ------------------------------------------------------
// Binary elementwise ops broadcast with trailing-dimension alignment
// (right-aligned dims must match or be 1).

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& a, double c);       // c * a
Tensor add_scalar(const Tensor& a, double c);  // a + c
Tensor sub_from_scalar(double c, const Tensor& a);  // c - a
Tensor neg(const Tensor& a);

Tensor matmul(const Tensor& a, const Tensor& b);  // 2-D only
Tensor transpose(const Tensor& a);                // 2-D only

Tensor relu(const Tensor& a);      // relu'(0) == 0
Tensor sigmoid(const Tensor& a);
Tensor tanh_op(const Tensor& a);
Tensor exp_op(const Tensor& a);
Tensor log_op(const Tensor& a);    // throws ValueError on non-positive input
Tensor sqrt_op(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor clamp(const Tensor& a, double lo, double hi);  // gradient 0 outside (lo, hi)

/// Numerically stable softmax along `axis` (0 or 1 for matrices, 0 for
/// vectors). Rows sum to 1.
Tensor softmax(const Tensor& a, int axis);

Tensor sum(const Tensor& a);                    // all elements -> scalar
Tensor sum(const Tensor& a, int axis);          // 2-D, keeps the reduced dim as 1
Tensor mean(const Tensor& a);
Tensor mean(const Tensor& a, int axis);

Tensor concat(const std::vector<Tensor>& parts, int axis);
Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count);

/// Inverted dropout: retained entries scaled by 1/(1-p); identity when
/// train_mode is false or p == 0. Masks are a pure function of the stream.
Tensor dropout(const Tensor& a, double p, bool train_mode, RngStream& rng);
/// Dropout with a pre-drawn mask (entries 0 or 1/(1-p)); used to freeze noise.
Tensor dropout_with_mask(const Tensor& a, const Tensor& mask);
Tensor make_dropout_mask(const Shape& shape, double p, RngStream& rng);

/// Forward values of `hard`, gradients of `soft` (straight-through).
Tensor straight_through(const Tensor& soft, const std::vector<double>& hard_values);

// operator sugar for the elementwise ops
inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }

}  // namespace haucl
