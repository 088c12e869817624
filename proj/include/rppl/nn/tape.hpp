#pragma once

#include <functional>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rppl/nn/ops.hpp"

namespace rppl::nn {

/// Reverse-mode tape over the ops in ops.hpp. Usage: register parameter
/// leaves with param(), compose the forward graph, call backward() on a
/// scalar node, then read gradients with grad_of(). The graph is one-shot:
/// a second backward without a fresh forward throws, and reset() frees
/// everything for the next step.
///
/// Every op checks its output for NaN/Inf and aborts the step on failure;
/// silent divergence during training is worse than a loud stop.
template <class T>
class TapeT {
 public:
  struct Var {
    int id = -1;
  };

  TapeT() = default;
  TapeT(const TapeT&) = delete;
  TapeT& operator=(const TapeT&) = delete;

  Var input(TensorT<T> value) { return push(std::move(value), nullptr, {}); }

  /// Differentiable leaf. Repeated registration of the same tensor returns
  /// the same node, so gradients accumulate across uses.
  Var param(const TensorT<T>* p) {
    auto it = param_ids_.find(p);
    if (it != param_ids_.end()) return Var{it->second};
    Var v = push(*p, p, {});
    param_ids_.emplace(p, v.id);
    return v;
  }

  Var conv2d(Var x, Var w, Var b, int stride, int pad) {
    TensorT<T> out = conv2d_forward(value(x), value(w), value(b), stride, pad);
    check_finite(out, "conv2d");
    Var o = push(std::move(out), nullptr, [this, x, w, b, stride, pad](Var self) {
      Conv2dGrads<T> g = conv2d_backward(value(x), value(w), stride, pad, node(self).grad);
      accumulate(x, g.input);
      accumulate(w, g.weight);
      accumulate(b, g.bias);
    });
    return o;
  }

  Var relu(Var x) {
    TensorT<T> out = relu_forward(value(x));
    return push(std::move(out), nullptr, [this, x](Var self) {
      accumulate(x, relu_backward(value(x), node(self).grad));
    });
  }

  Var maxpool2(Var x) {
    auto argmax = std::make_shared<std::vector<int>>();
    TensorT<T> out = maxpool2_forward(value(x), argmax.get());
    return push(std::move(out), nullptr, [this, x, argmax](Var self) {
      accumulate(x, maxpool2_backward(*argmax, value(x).shape, node(self).grad));
    });
  }

  Var global_avg_pool(Var x) {
    TensorT<T> out = global_avg_pool_forward(value(x));
    return push(std::move(out), nullptr, [this, x](Var self) {
      accumulate(x, global_avg_pool_backward(value(x).shape, node(self).grad));
    });
  }

  Var dense(Var x, Var w, Var b) {
    TensorT<T> out = dense_forward(value(x), value(w), value(b));
    check_finite(out, "dense");
    return push(std::move(out), nullptr, [this, x, w, b](Var self) {
      DenseGrads<T> g = dense_backward(value(x), value(w), node(self).grad);
      accumulate(x, g.input);
      accumulate(w, g.weight);
      accumulate(b, g.bias);
    });
  }

  Var affine(Var x, T scale, T shift) {
    TensorT<T> out = value(x);
    for (auto& e : out.v) e = scale * e + shift;
    check_finite(out, "affine");
    return push(std::move(out), nullptr, [this, x, scale](Var self) {
      TensorT<T> g = node(self).grad;
      for (auto& e : g.v) e *= scale;
      accumulate(x, g);
    });
  }

  /// Mean squared error over a batch of scalar predictions.
  Var mse(const std::vector<Var>& predictions, const std::vector<T>& targets) {
    if (predictions.empty()) throw DomainError("mse over an empty batch");
    if (predictions.size() != targets.size()) throw DomainError("mse length mismatch");
    std::vector<T> preds(predictions.size());
    for (size_t i = 0; i < predictions.size(); ++i) {
      if (value(predictions[i]).numel() != 1) throw DomainError("mse expects scalar predictions");
      preds[i] = value(predictions[i])[0];
    }
    TensorT<T> out({1});
    out[0] = static_cast<T>(mse_value(preds, targets));
    check_finite(out, "mse");
    auto pred_vars = predictions;
    auto tgt = targets;
    return push(std::move(out), nullptr, [this, pred_vars, tgt](Var self) {
      const T upstream = node(self).grad[0];
      const T inv_n = T(1) / static_cast<T>(pred_vars.size());
      for (size_t i = 0; i < pred_vars.size(); ++i) {
        TensorT<T> g({1});
        g[0] = T(2) * (value(pred_vars[i])[0] - tgt[i]) * inv_n * upstream;
        accumulate(pred_vars[i], g);
      }
    });
  }

  const TensorT<T>& value(Var v) const { return nodes_[v.id]->value; }

  /// Seeds the root gradient and sweeps the graph in reverse. The root must
  /// be scalar. Throws if called again before reset().
  void backward(Var root, T seed = T(1)) {
    if (back_done_) throw DomainError("backward called twice without a new forward graph");
    if (value(root).numel() != 1) throw DomainError("backward root must be scalar");
    for (auto& n : nodes_) n->grad = TensorT<T>(n->value.shape);
    nodes_[root.id]->grad[0] = seed;
    for (int id = root.id; id >= 0; --id) {
      Node& n = *nodes_[id];
      if (n.backprop) n.backprop(Var{id});
    }
    back_done_ = true;
  }

  /// Gradient of a registered parameter; zero tensor when the parameter
  /// never reached the loss.
  TensorT<T> grad_of(const TensorT<T>* p) const {
    auto it = param_ids_.find(p);
    if (it == param_ids_.end()) return TensorT<T>(p->shape);
    return nodes_[it->second]->grad;
  }

  void reset() {
    nodes_.clear();
    param_ids_.clear();
    back_done_ = false;
  }

 private:
  struct Node {
    TensorT<T> value;
    TensorT<T> grad;
    std::function<void(Var)> backprop;
    const TensorT<T>* param = nullptr;
  };

  Node& node(Var v) { return *nodes_[v.id]; }

  Var push(TensorT<T> value, const TensorT<T>* p, std::function<void(Var)> backprop) {
    auto n = std::make_unique<Node>();
    n->value = std::move(value);
    n->param = p;
    n->backprop = std::move(backprop);
    nodes_.push_back(std::move(n));
    return Var{static_cast<int>(nodes_.size()) - 1};
  }

  void accumulate(Var v, const TensorT<T>& g) {
    TensorT<T>& dst = nodes_[v.id]->grad;
    for (size_t i = 0; i < dst.numel(); ++i) dst[i] += g[i];
  }

  static void check_finite(const TensorT<T>& t, const char* op) {
    if (!t.all_finite())
      throw DomainError(std::string("non-finite values after ") + op +
                        "; aborting (diverged or bad input)");
  }

  std::vector<std::unique_ptr<Node>> nodes_;
  std::unordered_map<const TensorT<T>*, int> param_ids_;
  bool back_done_ = false;
};

using Tape = TapeT<float>;

}  // namespace rppl::nn
