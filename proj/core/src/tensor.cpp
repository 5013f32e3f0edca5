#include "haucl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace haucl {

std::size_t numel(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_str(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace detail {

std::vector<double>& TensorNode::grad_buffer() {
  if (grad.empty()) grad.assign(value.size(), 0.0);
  return grad;
}

}  // namespace detail

namespace {

void check_dims_positive(const Shape& shape, const char* who) {
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError(std::string(who) + ": zero dimension in shape " + shape_str(shape));
  }
}

std::shared_ptr<detail::TensorNode> new_node(Shape shape, std::vector<double> values) {
  auto node = std::make_shared<detail::TensorNode>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  return node;
}

thread_local Tape* g_active_tape = nullptr;

}  // namespace

// ---- Tensor --------------------------------------------------------------

Tensor Tensor::zeros(Shape shape) {
  check_dims_positive(shape, "zeros");
  std::size_t n = haucl::numel(shape);
  return Tensor(new_node(std::move(shape), std::vector<double>(n, 0.0)));
}

Tensor Tensor::full(Shape shape, double fill) {
  check_dims_positive(shape, "full");
  std::size_t n = haucl::numel(shape);
  return Tensor(new_node(std::move(shape), std::vector<double>(n, fill)));
}

Tensor Tensor::from(Shape shape, std::vector<double> values) {
  check_dims_positive(shape, "from");
  if (haucl::numel(shape) != values.size()) {
    throw ShapeError("from: shape " + shape_str(shape) + " does not match " +
                     std::to_string(values.size()) + " values");
  }
  return Tensor(new_node(std::move(shape), std::move(values)));
}

Tensor Tensor::scalar(double v) { return Tensor(new_node({}, {v})); }

Tensor Tensor::uniform(Shape shape, double lo, double hi, RngStream& rng) {
  check_dims_positive(shape, "uniform");
  std::vector<double> vals(haucl::numel(shape));
  for (double& v : vals) v = rng.uniform(lo, hi);
  return Tensor(new_node(std::move(shape), std::move(vals)));
}

Tensor Tensor::normal(Shape shape, RngStream& rng) {
  check_dims_positive(shape, "normal");
  std::vector<double> vals(haucl::numel(shape));
  for (double& v : vals) v = rng.normal();
  return Tensor(new_node(std::move(shape), std::move(vals)));
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw ShapeError("rows: tensor is not a matrix, shape " + shape_str(shape()));
  return node_->shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw ShapeError("cols: tensor is not a matrix, shape " + shape_str(shape()));
  return node_->shape[1];
}

double Tensor::item() const {
  if (numel() != 1) throw ShapeError("item: tensor has " + std::to_string(numel()) + " elements");
  return node_->value[0];
}

double Tensor::at(std::size_t r, std::size_t c) const {
  return node_->value[r * cols() + c];
}

Tensor& Tensor::set_requires_grad(bool v) {
  node_->requires_grad = v;
  return *this;
}

const std::vector<double>& Tensor::grad() const { return node_->grad; }

void Tensor::clear_grad() { node_->grad.clear(); }

Tensor Tensor::detach() const {
  return Tensor(new_node(node_->shape, node_->value));
}

// ---- Tape ----------------------------------------------------------------

Tape::Scope::Scope(Tape& tape) : previous_(g_active_tape) { g_active_tape = &tape; }
Tape::Scope::~Scope() { g_active_tape = previous_; }

Tape* Tape::active() { return g_active_tape; }

void Tape::backward(const Tensor& loss) {
  if (consumed_) throw Error("Tape::backward: tape already replayed; build a fresh graph");
  if (!loss.defined() || loss.numel() != 1) {
    throw ValueError("Tape::backward: loss must be a scalar tensor");
  }
  consumed_ = true;
  loss.node()->grad_buffer()[0] = 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (!it->output->grad.empty()) it->backward(*it->output);
  }
  // leaves that requested a gradient but received no flow still end up
  // with an explicit zero gradient
  for (auto& rec : records_) {
    for (auto& in : rec.inputs) {
      if (in->requires_grad) in->grad_buffer();
    }
  }
}

void backward(const Tensor& loss) {
  Tape* tape = Tape::active();
  if (!tape) throw Error("backward: no active tape");
  tape->backward(loss);
}

// ---- op plumbing -----------------------------------------------------------

Tensor make_op(Shape out_shape, std::vector<double> out_values, const std::vector<Tensor>& inputs,
               std::function<void(detail::TensorNode&)> backward_fn) {
  auto out = new_node(std::move(out_shape), std::move(out_values));
  Tape* tape = Tape::active();
  bool needs_grad = false;
  if (tape && !tape->consumed()) {
    for (const Tensor& t : inputs) {
      if (t.requires_grad()) {
        needs_grad = true;
        break;
      }
    }
  }
  if (needs_grad) {
    out->requires_grad = true;
    Tape::OpRecord rec;
    rec.inputs.reserve(inputs.size());
    for (const Tensor& t : inputs) rec.inputs.push_back(t.node());
    rec.output = out;
    rec.backward = std::move(backward_fn);
    tape->records_.push_back(std::move(rec));
  }
  return Tensor(out);
}

namespace {

struct BroadcastPlan {
  Shape out_shape;
  std::vector<std::size_t> dims;       // padded out dims
  std::vector<std::size_t> stride_a;   // 0 where a is broadcast
  std::vector<std::size_t> stride_b;
  std::size_t total = 1;
  bool same_shape = false;
};

BroadcastPlan plan_broadcast(const Shape& a, const Shape& b, const char* op) {
  BroadcastPlan plan;
  if (a == b) {
    plan.out_shape = a;
    plan.total = numel(a);
    plan.same_shape = true;
    return plan;
  }
  std::size_t rank = std::max(a.size(), b.size());
  plan.dims.assign(rank, 1);
  plan.out_shape.assign(rank, 1);
  for (std::size_t k = 0; k < rank; ++k) {
    std::size_t da = k < a.size() ? a[a.size() - 1 - k] : 1;
    std::size_t db = k < b.size() ? b[b.size() - 1 - k] : 1;
    std::size_t out;
    if (da == db || db == 1) {
      out = da;
    } else if (da == 1) {
      out = db;
    } else {
      throw ShapeError(std::string(op) + ": shapes " + shape_str(a) + " and " + shape_str(b) +
                       " are not broadcast-compatible");
    }
    plan.dims[rank - 1 - k] = out;
    plan.out_shape[rank - 1 - k] = out;
  }
  plan.total = numel(plan.out_shape);
  auto strides_for = [&](const Shape& in) {
    std::vector<std::size_t> strides(rank, 0);
    std::size_t natural = 1;
    for (std::size_t k = 0; k < in.size(); ++k) {
      std::size_t dim = in[in.size() - 1 - k];
      if (dim > 1) strides[rank - 1 - k] = natural;
      natural *= dim;
    }
    return strides;
  };
  plan.stride_a = strides_for(a);
  plan.stride_b = strides_for(b);
  return plan;
}

// Visits every output element, handing (out_index, a_index, b_index) to fn.
template <class Fn>
void broadcast_visit(const BroadcastPlan& plan, Fn fn) {
  if (plan.same_shape) {
    for (std::size_t i = 0; i < plan.total; ++i) fn(i, i, i);
    return;
  }
  std::size_t rank = plan.dims.size();
  std::vector<std::size_t> idx(rank, 0);
  std::size_t off_a = 0, off_b = 0;
  for (std::size_t lin = 0;;) {
    fn(lin, off_a, off_b);
    if (++lin == plan.total) break;
    for (std::size_t k = rank; k-- > 0;) {
      ++idx[k];
      off_a += plan.stride_a[k];
      off_b += plan.stride_b[k];
      if (idx[k] < plan.dims[k]) break;
      off_a -= plan.stride_a[k] * plan.dims[k];
      off_b -= plan.stride_b[k] * plan.dims[k];
      idx[k] = 0;
    }
  }
}

// fwd(a,b) -> out; dfa/dfb(a,b) -> partials, evaluated on the saved inputs.
template <class F, class DA, class DB>
Tensor broadcast_binary(const Tensor& a, const Tensor& b, const char* name, F fwd, DA dfa, DB dfb) {
  BroadcastPlan plan = plan_broadcast(a.shape(), b.shape(), name);
  std::vector<double> out(plan.total);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  broadcast_visit(plan, [&](std::size_t o, std::size_t ia, std::size_t ib) {
    out[o] = fwd(av[ia], bv[ib]);
  });
  auto an = a.node();
  auto bn = b.node();
  return make_op(plan.out_shape, std::move(out), {a, b},
                 [an, bn, plan, dfa, dfb](detail::TensorNode& o) {
                   const double* av = an->value.data();
                   const double* bv = bn->value.data();
                   const double* go = o.grad.data();
                   double* ga = an->requires_grad ? an->grad_buffer().data() : nullptr;
                   double* gb = bn->requires_grad ? bn->grad_buffer().data() : nullptr;
                   broadcast_visit(plan, [&](std::size_t oi, std::size_t ia, std::size_t ib) {
                     if (ga) ga[ia] += dfa(av[ia], bv[ib]) * go[oi];
                     if (gb) gb[ib] += dfb(av[ia], bv[ib]) * go[oi];
                   });
                 });
}

template <class F, class DF>
Tensor unary_op(const Tensor& a, F fwd, DF dfdx) {
  std::vector<double> out(a.numel());
  const double* av = a.values().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fwd(av[i]);
  auto an = a.node();
  return make_op(a.shape(), std::move(out), {a}, [an, dfdx](detail::TensorNode& o) {
    if (!an->requires_grad) return;
    double* ga = an->grad_buffer().data();
    const double* av = an->value.data();
    const double* ov = o.value.data();
    const double* go = o.grad.data();
    for (std::size_t i = 0; i < o.value.size(); ++i) ga[i] += dfdx(av[i], ov[i]) * go[i];
  });
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

}  // namespace

// ---- elementwise -----------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
  return broadcast_binary(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return broadcast_binary(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return broadcast_binary(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

Tensor div(const Tensor& a, const Tensor& b) {
  return broadcast_binary(
      a, b, "div", [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

Tensor scale(const Tensor& a, double c) {
  return unary_op(a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Tensor add_scalar(const Tensor& a, double c) {
  return unary_op(a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Tensor sub_from_scalar(double c, const Tensor& a) {
  return unary_op(a, [c](double x) { return c - x; }, [](double, double) { return -1.0; });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

// ---- matmul / transpose ----------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw ShapeError("matmul: expected matrices, got " + shape_str(a.shape()) + " and " +
                     shape_str(b.shape()));
  }
  std::size_t m = a.shape()[0], k = a.shape()[1];
  std::size_t k2 = b.shape()[0], n = b.shape()[1];
  if (k != k2) {
    throw ShapeError("matmul: inner dimensions disagree, " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));
  }
  std::vector<double> out(m * n, 0.0);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t kk = 0; kk < k; ++kk) {
      double aik = av[i * k + kk];
      if (aik == 0.0) continue;
      const double* brow = bv + kk * n;
      double* orow = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
    }
  }
  auto an = a.node();
  auto bn = b.node();
  return make_op({m, n}, std::move(out), {a, b}, [an, bn, m, k, n](detail::TensorNode& o) {
    const double* go = o.grad.data();
    if (an->requires_grad) {
      // dA = dC * B^T
      double* ga = an->grad_buffer().data();
      const double* bv = bn->value.data();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          double d = go[i * n + j];
          if (d == 0.0) continue;
          for (std::size_t kk = 0; kk < k; ++kk) ga[i * k + kk] += d * bv[kk * n + j];
        }
      }
    }
    if (bn->requires_grad) {
      // dB = A^T * dC
      double* gb = bn->grad_buffer().data();
      const double* av = an->value.data();
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t kk = 0; kk < k; ++kk) {
          double aik = av[i * k + kk];
          if (aik == 0.0) continue;
          const double* grow = go + i * n;
          double* brow = gb + kk * n;
          for (std::size_t j = 0; j < n; ++j) brow[j] += aik * grow[j];
        }
      }
    }
  });
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) throw ShapeError("transpose: expected a matrix, got " + shape_str(a.shape()));
  std::size_t r = a.shape()[0], c = a.shape()[1];
  std::vector<double> out(r * c);
  const double* av = a.values().data();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  }
  auto an = a.node();
  return make_op({c, r}, std::move(out), {a}, [an, r, c](detail::TensorNode& o) {
    if (!an->requires_grad) return;
    double* ga = an->grad_buffer().data();
    const double* go = o.grad.data();
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) ga[i * c + j] += go[j * r + i];
    }
  });
}

// ---- unary nonlinearities ----------------------------------------------------

Tensor relu(const Tensor& a) {
  return unary_op(a, [](double x) { return x > 0.0 ? x : 0.0; },
                  [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary_op(a, [](double x) { return stable_sigmoid(x); },
                  [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh_op(const Tensor& a) {
  return unary_op(a, [](double x) { return std::tanh(x); },
                  [](double, double y) { return 1.0 - y * y; });
}

Tensor exp_op(const Tensor& a) {
  return unary_op(a, [](double x) { return std::exp(x); },
                  [](double, double y) { return y; });
}

Tensor log_op(const Tensor& a) {
  // non-finite values pass through so a diverging run surfaces as a
  // non-finite loss rather than a domain error
  for (double x : a.values()) {
    if (std::isfinite(x) && x <= 0.0) {
      throw ValueError("log: non-positive input " + std::to_string(x));
    }
  }
  return unary_op(a, [](double x) { return std::log(x); },
                  [](double x, double) { return 1.0 / x; });
}

Tensor sqrt_op(const Tensor& a) {
  for (double x : a.values()) {
    if (std::isfinite(x) && x < 0.0) {
      throw ValueError("sqrt: negative input " + std::to_string(x));
    }
  }
  return unary_op(a, [](double x) { return std::sqrt(x); },
                  [](double, double y) { return 0.5 / y; });
}

Tensor softplus(const Tensor& a) {
  return unary_op(a, [](double x) { return stable_softplus(x); },
                  [](double x, double) { return stable_sigmoid(x); });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  if (lo > hi) throw ValueError("clamp: lo > hi");
  return unary_op(a, [lo, hi](double x) { return std::min(std::max(x, lo), hi); },
                  [lo, hi](double x, double) { return (x > lo && x < hi) ? 1.0 : 0.0; });
}

// ---- softmax ---------------------------------------------------------------

Tensor softmax(const Tensor& a, int axis) {
  std::size_t slices, length, slice_stride, elem_stride;
  if (a.rank() == 1) {
    if (axis != 0) throw ShapeError("softmax: axis out of range for vector");
    slices = 1;
    length = a.shape()[0];
    slice_stride = 0;
    elem_stride = 1;
  } else if (a.rank() == 2) {
    std::size_t r = a.shape()[0], c = a.shape()[1];
    if (axis == 1 || axis == -1) {
      slices = r;
      length = c;
      slice_stride = c;
      elem_stride = 1;
    } else if (axis == 0) {
      slices = c;
      length = r;
      slice_stride = 1;
      elem_stride = c;
    } else {
      throw ShapeError("softmax: axis out of range for matrix");
    }
  } else {
    throw ShapeError("softmax: expected rank 1 or 2, got " + shape_str(a.shape()));
  }

  std::vector<double> out(a.numel());
  const double* av = a.values().data();
  for (std::size_t s = 0; s < slices; ++s) {
    const double* in = av + s * slice_stride;
    double* o = out.data() + s * slice_stride;
    double mx = in[0];
    for (std::size_t i = 1; i < length; ++i) mx = std::max(mx, in[i * elem_stride]);
    double total = 0.0;
    for (std::size_t i = 0; i < length; ++i) {
      double e = std::exp(in[i * elem_stride] - mx);
      o[i * elem_stride] = e;
      total += e;
    }
    for (std::size_t i = 0; i < length; ++i) o[i * elem_stride] /= total;
  }
  auto an = a.node();
  return make_op(a.shape(), std::move(out), {a},
                 [an, slices, length, slice_stride, elem_stride](detail::TensorNode& o) {
                   if (!an->requires_grad) return;
                   double* ga = an->grad_buffer().data();
                   const double* y = o.value.data();
                   const double* go = o.grad.data();
                   for (std::size_t s = 0; s < slices; ++s) {
                     std::size_t base = s * slice_stride;
                     double dot = 0.0;
                     for (std::size_t i = 0; i < length; ++i) {
                       std::size_t k = base + i * elem_stride;
                       dot += go[k] * y[k];
                     }
                     for (std::size_t i = 0; i < length; ++i) {
                       std::size_t k = base + i * elem_stride;
                       ga[k] += y[k] * (go[k] - dot);
                     }
                   }
                 });
}

// ---- reductions --------------------------------------------------------------

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double x : a.values()) total += x;
  auto an = a.node();
  return make_op({}, {total}, {a}, [an](detail::TensorNode& o) {
    if (!an->requires_grad) return;
    double* ga = an->grad_buffer().data();
    double g = o.grad[0];
    for (std::size_t i = 0; i < an->value.size(); ++i) ga[i] += g;
  });
}

Tensor mean(const Tensor& a) {
  double inv = 1.0 / static_cast<double>(a.numel());
  double total = 0.0;
  for (double x : a.values()) total += x;
  auto an = a.node();
  return make_op({}, {total * inv}, {a}, [an, inv](detail::TensorNode& o) {
    if (!an->requires_grad) return;
    double* ga = an->grad_buffer().data();
    double g = o.grad[0] * inv;
    for (std::size_t i = 0; i < an->value.size(); ++i) ga[i] += g;
  });
}

namespace {

Tensor axis_reduce(const Tensor& a, int axis, bool take_mean) {
  if (a.rank() != 2) throw ShapeError("sum/mean(axis): expected a matrix, got " + shape_str(a.shape()));
  if (axis != 0 && axis != 1) throw ShapeError("sum/mean(axis): axis out of range");
  std::size_t r = a.shape()[0], c = a.shape()[1];
  Shape out_shape = axis == 0 ? Shape{1, c} : Shape{r, 1};
  std::size_t reduce_len = axis == 0 ? r : c;
  double factor = take_mean ? 1.0 / static_cast<double>(reduce_len) : 1.0;
  std::vector<double> out(numel(out_shape), 0.0);
  const double* av = a.values().data();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      out[axis == 0 ? j : i] += av[i * c + j];
    }
  }
  for (double& v : out) v *= factor;
  auto an = a.node();
  return make_op(out_shape, std::move(out), {a}, [an, r, c, axis, factor](detail::TensorNode& o) {
    if (!an->requires_grad) return;
    double* ga = an->grad_buffer().data();
    const double* go = o.grad.data();
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < c; ++j) {
        ga[i * c + j] += go[axis == 0 ? j : i] * factor;
      }
    }
  });
}

}  // namespace

Tensor sum(const Tensor& a, int axis) { return axis_reduce(a, axis, false); }
Tensor mean(const Tensor& a, int axis) { return axis_reduce(a, axis, true); }

// ---- concat / slicing ----------------------------------------------------------

Tensor concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  std::size_t rank = parts[0].rank();
  if (rank == 0 || rank > 2) throw ShapeError("concat: expected rank 1 or 2 inputs");
  if (axis < 0 || static_cast<std::size_t>(axis) >= rank) throw ShapeError("concat: axis out of range");
  for (const Tensor& p : parts) {
    if (p.rank() != rank) throw ShapeError("concat: mixed ranks");
    for (std::size_t k = 0; k < rank; ++k) {
      if (static_cast<int>(k) != axis && p.shape()[k] != parts[0].shape()[k]) {
        throw ShapeError("concat: shape " + shape_str(p.shape()) + " does not match " +
                         shape_str(parts[0].shape()) + " off-axis");
      }
    }
  }

  Shape out_shape = parts[0].shape();
  out_shape[axis] = 0;
  for (const Tensor& p : parts) out_shape[axis] += p.shape()[axis];

  std::vector<double> out(numel(out_shape));
  std::vector<std::shared_ptr<detail::TensorNode>> nodes;
  nodes.reserve(parts.size());
  for (const Tensor& p : parts) nodes.push_back(p.node());

  if (rank == 1 || axis == 0) {
    // contiguous blocks
    std::size_t off = 0;
    for (const Tensor& p : parts) {
      std::copy(p.values().begin(), p.values().end(), out.begin() + off);
      off += p.numel();
    }
    return make_op(out_shape, std::move(out), parts, [nodes](detail::TensorNode& o) {
      const double* go = o.grad.data();
      std::size_t off = 0;
      for (auto& n : nodes) {
        if (n->requires_grad) {
          double* g = n->grad_buffer().data();
          for (std::size_t i = 0; i < n->value.size(); ++i) g[i] += go[off + i];
        }
        off += n->value.size();
      }
    });
  }

  // axis == 1, rank 2
  std::size_t r = out_shape[0], out_c = out_shape[1];
  std::size_t col_off = 0;
  for (const Tensor& p : parts) {
    std::size_t c = p.shape()[1];
    const double* pv = p.values().data();
    for (std::size_t i = 0; i < r; ++i) {
      std::copy(pv + i * c, pv + (i + 1) * c, out.begin() + i * out_c + col_off);
    }
    col_off += c;
  }
  return make_op(out_shape, std::move(out), parts, [nodes, r, out_c](detail::TensorNode& o) {
    const double* go = o.grad.data();
    std::size_t col_off = 0;
    for (auto& n : nodes) {
      std::size_t c = n->shape[1];
      if (n->requires_grad) {
        double* g = n->grad_buffer().data();
        for (std::size_t i = 0; i < r; ++i) {
          for (std::size_t j = 0; j < c; ++j) g[i * c + j] += go[i * out_c + col_off + j];
        }
      }
      col_off += c;
    }
  });
}

Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count) {
  if (a.rank() != 2) throw ShapeError("slice_rows: expected a matrix, got " + shape_str(a.shape()));
  std::size_t r = a.shape()[0], c = a.shape()[1];
  if (count == 0 || start + count > r) {
    throw ShapeError("slice_rows: range [" + std::to_string(start) + ", " +
                     std::to_string(start + count) + ") out of " + std::to_string(r) + " rows");
  }
  std::vector<double> out(a.values().begin() + start * c, a.values().begin() + (start + count) * c);
  auto an = a.node();
  return make_op({count, c}, std::move(out), {a}, [an, start, c, count](detail::TensorNode& o) {
    if (!an->requires_grad) return;
    double* ga = an->grad_buffer().data();
    const double* go = o.grad.data();
    for (std::size_t i = 0; i < count * c; ++i) ga[start * c + i] += go[i];
  });
}

// ---- dropout / straight-through --------------------------------------------------

Tensor make_dropout_mask(const Shape& shape, double p, RngStream& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ValueError("dropout: p must be in [0, 1)");
  double keep_scale = 1.0 / (1.0 - p);
  std::vector<double> mask(numel(shape));
  for (double& m : mask) m = rng.uniform01() >= p ? keep_scale : 0.0;
  return Tensor::from(shape, std::move(mask));
}

Tensor dropout(const Tensor& a, double p, bool train_mode, RngStream& rng) {
  if (!(p >= 0.0 && p < 1.0)) throw ValueError("dropout: p must be in [0, 1)");
  if (!train_mode || p == 0.0) return a;
  return mul(a, make_dropout_mask(a.shape(), p, rng));
}

Tensor dropout_with_mask(const Tensor& a, const Tensor& mask) {
  if (a.shape() != mask.shape()) {
    throw ShapeError("dropout_with_mask: mask shape " + shape_str(mask.shape()) +
                     " does not match input " + shape_str(a.shape()));
  }
  return mul(a, mask);
}

Tensor straight_through(const Tensor& soft, const std::vector<double>& hard_values) {
  if (hard_values.size() != soft.numel()) {
    throw ShapeError("straight_through: value count mismatch");
  }
  auto sn = soft.node();
  return make_op(soft.shape(), std::vector<double>(hard_values), {soft},
                 [sn](detail::TensorNode& o) {
                   if (!sn->requires_grad) return;
                   double* g = sn->grad_buffer().data();
                   const double* go = o.grad.data();
                   for (std::size_t i = 0; i < o.value.size(); ++i) g[i] += go[i];
                 });
}

}  // namespace haucl
