#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <string>
#include <vector>

#include "rppl/nn/tensor.hpp"

namespace rppl::nn {

template <class T>
using MatrixRM = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapRM = Eigen::Map<MatrixRM<T>>;
template <class T>
using ConstMapRM = Eigen::Map<const MatrixRM<T>>;

inline int conv_out_dim(int in, int kernel, int stride, int pad) {
  return (in + 2 * pad - kernel) / stride + 1;
}

/// Unfold [C,H,W] into a [C*kh*kw, Ho*Wo] matrix (one column per output
/// position), zero padding outside the input.
template <class T>
void im2col(const TensorT<T>& in, int kh, int kw, int stride, int pad, TensorT<T>& cols) {
  const int C = in.shape[0], H = in.shape[1], W = in.shape[2];
  const int Ho = conv_out_dim(H, kh, stride, pad);
  const int Wo = conv_out_dim(W, kw, stride, pad);
  cols.shape = {C * kh * kw, Ho * Wo};
  cols.v.assign(static_cast<size_t>(C) * kh * kw * Ho * Wo, T(0));

  for (int c = 0; c < C; ++c)
    for (int dy = 0; dy < kh; ++dy)
      for (int dx = 0; dx < kw; ++dx) {
        T* row = cols.data() + (static_cast<size_t>(c) * kh * kw + dy * kw + dx) *
                                   (static_cast<size_t>(Ho) * Wo);
        for (int oy = 0; oy < Ho; ++oy) {
          const int iy = oy * stride + dy - pad;
          if (iy < 0 || iy >= H) continue;
          const T* src = in.data() + (static_cast<size_t>(c) * H + iy) * W;
          T* dst = row + static_cast<size_t>(oy) * Wo;
          for (int ox = 0; ox < Wo; ++ox) {
            const int ix = ox * stride + dx - pad;
            if (ix >= 0 && ix < W) dst[ox] = src[ix];
          }
        }
      }
}

/// Fold a [C*kh*kw, Ho*Wo] gradient matrix back onto the input, accumulating
/// overlaps. Inverse adjoint of im2col.
template <class T>
void col2im(const TensorT<T>& cols, int C, int H, int W, int kh, int kw, int stride, int pad,
            TensorT<T>& out) {
  const int Ho = conv_out_dim(H, kh, stride, pad);
  const int Wo = conv_out_dim(W, kw, stride, pad);
  out.shape = {C, H, W};
  out.v.assign(static_cast<size_t>(C) * H * W, T(0));

  for (int c = 0; c < C; ++c)
    for (int dy = 0; dy < kh; ++dy)
      for (int dx = 0; dx < kw; ++dx) {
        const T* row = cols.data() + (static_cast<size_t>(c) * kh * kw + dy * kw + dx) *
                                         (static_cast<size_t>(Ho) * Wo);
        for (int oy = 0; oy < Ho; ++oy) {
          const int iy = oy * stride + dy - pad;
          if (iy < 0 || iy >= H) continue;
          T* dst = out.data() + (static_cast<size_t>(c) * H + iy) * W;
          const T* src = row + static_cast<size_t>(oy) * Wo;
          for (int ox = 0; ox < Wo; ++ox) {
            const int ix = ox * stride + dx - pad;
            if (ix >= 0 && ix < W) dst[ix] += src[ox];
          }
        }
      }
}

/// out[o,y,x] = bias[o] + sum_{c,dy,dx} in[c, y*s+dy-p, x*s+dx-p] * w[o,c,dy,dx]
template <class T>
TensorT<T> conv2d_forward(const TensorT<T>& in, const TensorT<T>& weight, const TensorT<T>& bias,
                          int stride, int pad) {
  if (in.shape.size() != 3 || weight.shape.size() != 4)
    throw DomainError("conv2d expects input [C,H,W] and weight [O,C,kh,kw]");
  if (weight.shape[1] != in.shape[0])
    throw DomainError("conv2d channel mismatch: input has " + std::to_string(in.shape[0]) +
                      ", weight expects " + std::to_string(weight.shape[1]));
  const int O = weight.shape[0], kh = weight.shape[2], kw = weight.shape[3];
  if (bias.shape != std::vector<int>{O}) throw DomainError("conv2d bias shape mismatch");
  if (stride < 1 || pad < 0) throw DomainError("conv2d stride/pad out of range");
  const int Ho = conv_out_dim(in.shape[1], kh, stride, pad);
  const int Wo = conv_out_dim(in.shape[2], kw, stride, pad);
  if (Ho < 1 || Wo < 1) throw DomainError("conv2d output would be empty");

  TensorT<T> cols;
  im2col(in, kh, kw, stride, pad, cols);

  TensorT<T> out({O, Ho, Wo});
  ConstMapRM<T> w_mat(weight.data(), O, weight.numel() / O);
  ConstMapRM<T> cols_mat(cols.data(), cols.shape[0], cols.shape[1]);
  MapRM<T> out_mat(out.data(), O, static_cast<size_t>(Ho) * Wo);
  out_mat.noalias() = w_mat * cols_mat;
  for (int o = 0; o < O; ++o) out_mat.row(o).array() += bias[o];
  return out;
}

template <class T>
struct Conv2dGrads {
  TensorT<T> input;
  TensorT<T> weight;
  TensorT<T> bias;
};

template <class T>
Conv2dGrads<T> conv2d_backward(const TensorT<T>& in, const TensorT<T>& weight, int stride, int pad,
                               const TensorT<T>& grad_out) {
  const int O = weight.shape[0], kh = weight.shape[2], kw = weight.shape[3];
  const int positions = grad_out.shape[1] * grad_out.shape[2];

  TensorT<T> cols;
  im2col(in, kh, kw, stride, pad, cols);

  Conv2dGrads<T> g;
  g.weight = TensorT<T>(weight.shape);
  g.bias = TensorT<T>({O});

  ConstMapRM<T> go_mat(grad_out.data(), O, positions);
  ConstMapRM<T> cols_mat(cols.data(), cols.shape[0], cols.shape[1]);
  MapRM<T> gw_mat(g.weight.data(), O, weight.numel() / O);
  gw_mat.noalias() = go_mat * cols_mat.transpose();
  for (int o = 0; o < O; ++o) g.bias[o] = go_mat.row(o).sum();

  TensorT<T> grad_cols({cols.shape[0], cols.shape[1]});
  MapRM<T> gc_mat(grad_cols.data(), grad_cols.shape[0], grad_cols.shape[1]);
  ConstMapRM<T> w_mat(weight.data(), O, weight.numel() / O);
  gc_mat.noalias() = w_mat.transpose() * go_mat;
  col2im(grad_cols, in.shape[0], in.shape[1], in.shape[2], kh, kw, stride, pad, g.input);
  return g;
}

template <class T>
TensorT<T> relu_forward(const TensorT<T>& in) {
  TensorT<T> out(in.shape);
  for (size_t i = 0; i < in.numel(); ++i) out[i] = in[i] > T(0) ? in[i] : T(0);
  return out;
}

template <class T>
TensorT<T> relu_backward(const TensorT<T>& in, const TensorT<T>& grad_out) {
  TensorT<T> g(in.shape);
  for (size_t i = 0; i < in.numel(); ++i) g[i] = in[i] > T(0) ? grad_out[i] : T(0);
  return g;
}

/// 2x2 max pooling, stride 2. Odd trailing rows/columns are dropped. Ties
/// resolve to the first element in scan order, which keeps backward
/// deterministic.
template <class T>
TensorT<T> maxpool2_forward(const TensorT<T>& in, std::vector<int>* argmax = nullptr) {
  const int C = in.shape[0], H = in.shape[1], W = in.shape[2];
  const int Ho = H / 2, Wo = W / 2;
  if (Ho < 1 || Wo < 1) throw DomainError("maxpool2 input too small");
  TensorT<T> out({C, Ho, Wo});
  if (argmax) argmax->assign(out.numel(), 0);
  size_t k = 0;
  for (int c = 0; c < C; ++c)
    for (int y = 0; y < Ho; ++y)
      for (int x = 0; x < Wo; ++x, ++k) {
        int best_idx = -1;
        T best = T(0);
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const int iy = 2 * y + dy, ix = 2 * x + dx;
            const int idx = (c * H + iy) * W + ix;
            if (best_idx < 0 || in[idx] > best) {
              best = in[idx];
              best_idx = idx;
            }
          }
        out[k] = best;
        if (argmax) (*argmax)[k] = best_idx;
      }
  return out;
}

template <class T>
TensorT<T> maxpool2_backward(const std::vector<int>& argmax, const std::vector<int>& in_shape,
                             const TensorT<T>& grad_out) {
  TensorT<T> g(in_shape);
  for (size_t k = 0; k < grad_out.numel(); ++k) g[argmax[k]] += grad_out[k];
  return g;
}

/// [C,H,W] -> [C]; accumulates in double regardless of T.
template <class T>
TensorT<T> global_avg_pool_forward(const TensorT<T>& in) {
  const int C = in.shape[0];
  const size_t plane = static_cast<size_t>(in.shape[1]) * in.shape[2];
  TensorT<T> out({C});
  for (int c = 0; c < C; ++c) {
    double acc = 0.0;
    const T* p = in.data() + c * plane;
    for (size_t i = 0; i < plane; ++i) acc += static_cast<double>(p[i]);
    out[c] = static_cast<T>(acc / static_cast<double>(plane));
  }
  return out;
}

template <class T>
TensorT<T> global_avg_pool_backward(const std::vector<int>& in_shape, const TensorT<T>& grad_out) {
  TensorT<T> g(in_shape);
  const size_t plane = static_cast<size_t>(in_shape[1]) * in_shape[2];
  for (int c = 0; c < in_shape[0]; ++c) {
    const T share = static_cast<T>(static_cast<double>(grad_out[c]) / static_cast<double>(plane));
    T* p = g.data() + c * plane;
    for (size_t i = 0; i < plane; ++i) p[i] = share;
  }
  return g;
}

/// y = W x + b with W [M,N], x [N].
template <class T>
TensorT<T> dense_forward(const TensorT<T>& x, const TensorT<T>& weight, const TensorT<T>& bias) {
  if (weight.shape.size() != 2) throw DomainError("dense weight must be [M,N]");
  const int M = weight.shape[0], N = weight.shape[1];
  if (static_cast<int>(x.numel()) != N)
    throw DomainError("dense input size " + std::to_string(x.numel()) + " != " + std::to_string(N));
  if (bias.shape != std::vector<int>{M}) throw DomainError("dense bias shape mismatch");
  TensorT<T> out({M});
  ConstMapRM<T> w(weight.data(), M, N);
  Eigen::Map<const Eigen::Vector<T, Eigen::Dynamic>> xv(x.data(), N);
  Eigen::Map<Eigen::Vector<T, Eigen::Dynamic>> yv(out.data(), M);
  yv.noalias() = w * xv;
  for (int m = 0; m < M; ++m) out[m] += bias[m];
  return out;
}

template <class T>
struct DenseGrads {
  TensorT<T> input;
  TensorT<T> weight;
  TensorT<T> bias;
};

template <class T>
DenseGrads<T> dense_backward(const TensorT<T>& x, const TensorT<T>& weight,
                             const TensorT<T>& grad_out) {
  const int M = weight.shape[0], N = weight.shape[1];
  DenseGrads<T> g;
  g.input = TensorT<T>(x.shape);
  g.weight = TensorT<T>(weight.shape);
  g.bias = grad_out;
  ConstMapRM<T> w(weight.data(), M, N);
  Eigen::Map<const Eigen::Vector<T, Eigen::Dynamic>> go(grad_out.data(), M);
  Eigen::Map<const Eigen::Vector<T, Eigen::Dynamic>> xv(x.data(), N);
  Eigen::Map<Eigen::Vector<T, Eigen::Dynamic>> gx(g.input.data(), N);
  MapRM<T> gw(g.weight.data(), M, N);
  gx.noalias() = w.transpose() * go;
  gw.noalias() = go * xv.transpose();
  return g;
}

/// Mean of squared differences, accumulated in double.
template <class T>
double mse_value(const std::vector<T>& predictions, const std::vector<T>& targets) {
  if (predictions.empty()) throw DomainError("mse over an empty batch");
  if (predictions.size() != targets.size()) throw DomainError("mse length mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const double d = static_cast<double>(predictions[i]) - static_cast<double>(targets[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(predictions.size());
}

}  // namespace rppl::nn
