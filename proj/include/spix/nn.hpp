#ifndef SPIX_NN_HPP
#define SPIX_NN_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spix/error.hpp"
#include "spix/mat.hpp"

namespace spix {

enum class NetworkKind : std::uint32_t { classification = 0, regression_distance = 1 };

/// Architecture description; weights live in the network objects.
struct NetworkSpec {
  NetworkKind kind = NetworkKind::classification;
  int M = 0;      // pixel feature count
  int Q = 0;      // candidate cluster count
  int depth = 0;  // distance-module depth (regression only)
  std::vector<std::vector<int>> layer_sizes;

  int input_size() const { return M + Q + Q * M; }
};

inline NetworkSpec build_classifier(int M, int Q = 7) {
  require(M >= 1 && Q >= 1, errc::bad_dims, "classifier needs M >= 1 and Q >= 1");
  NetworkSpec s;
  s.kind = NetworkKind::classification;
  s.M = M;
  s.Q = Q;
  s.layer_sizes = {{M, 100, 15},  // DRP
                   {M, 100, 15},  // DRC, shared across the Q candidates
                   {15 + Q + Q * 15, 120, 105, 15, Q}};
  return s;
}

inline NetworkSpec build_regression(int M, int Q, int depth) {
  require(M >= 1 && Q >= 1, errc::bad_dims, "regression needs M >= 1 and Q >= 1");
  require(depth == 1 || depth == 3, errc::bad_depth, "distance module depth must be 1 or 3");
  NetworkSpec s;
  s.kind = NetworkKind::regression_distance;
  s.M = M;
  s.Q = Q;
  s.depth = depth;
  s.layer_sizes = depth == 1 ? std::vector<std::vector<int>>{{M + 1, 1}}
                             : std::vector<std::vector<int>>{{M + 1, 32, 16, 1}};
  return s;
}

/// One trainable array together with its gradient and Adam moments.
template <class T>
struct Param {
  std::vector<T> w, g, m, v;

  void init(std::size_t n, T value = T(0)) {
    w.assign(n, value);
    g.assign(n, T(0));
    m.assign(n, T(0));
    v.assign(n, T(0));
  }
};

namespace nn_detail {

template <class T>
void he_uniform(std::vector<T>& w, int fan_in, std::mt19937& rng) {
  const double limit = std::sqrt(6.0 / fan_in);
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (T& x : w) x = static_cast<T>(dist(rng));
}

}  // namespace nn_detail

/// Fully connected layer, weights out x in row-major.
template <class T>
struct Dense {
  int in = 0, out = 0;
  bool has_bias = true;
  Param<T> weight, bias;

  void init(int in_, int out_, bool bias_, std::mt19937& rng) {
    in = in_;
    out = out_;
    has_bias = bias_;
    weight.init(static_cast<std::size_t>(in) * out);
    nn_detail::he_uniform(weight.w, in, rng);
    if (has_bias) bias.init(out);
  }

  Mat<T> forward(const Mat<T>& x) const {
    Mat<T> y(x.rows, out);
    for (int r = 0; r < x.rows; ++r) {
      const T* xr = x.row(r);
      T* yr = y.row(r);
      for (int o = 0; o < out; ++o) {
        const T* wr = &weight.w[static_cast<std::size_t>(o) * in];
        T acc = has_bias ? bias.w[o] : T(0);
        for (int i = 0; i < in; ++i) acc += wr[i] * xr[i];
        yr[o] = acc;
      }
    }
    return y;
  }

  // accumulates parameter gradients; x must be the forward input
  Mat<T> backward(const Mat<T>& x, const Mat<T>& dy) {
    Mat<T> dx(x.rows, in);
    for (int r = 0; r < x.rows; ++r) {
      const T* xr = x.row(r);
      const T* dyr = dy.row(r);
      T* dxr = dx.row(r);
      for (int o = 0; o < out; ++o) {
        const T d = dyr[o];
        T* gw = &weight.g[static_cast<std::size_t>(o) * in];
        const T* wr = &weight.w[static_cast<std::size_t>(o) * in];
        for (int i = 0; i < in; ++i) {
          gw[i] += d * xr[i];
          dxr[i] += d * wr[i];
        }
        if (has_bias) bias.g[o] += d;
      }
    }
    return dx;
  }
};

template <class T>
Mat<T> relu(const Mat<T>& x) {
  Mat<T> y = x;
  for (T& v : y.v) v = v > T(0) ? v : T(0);
  return y;
}

// pre must be the pre-activation input of the matching relu
template <class T>
Mat<T> relu_backward(const Mat<T>& pre, const Mat<T>& dy) {
  Mat<T> dx = dy;
  for (std::size_t i = 0; i < dx.v.size(); ++i)
    if (pre.v[i] <= T(0)) dx.v[i] = T(0);
  return dx;
}

/// Batch normalization over features, with running statistics for inference.
template <class T>
struct BatchNorm {
  int dim = 0;
  T momentum = T(0.9);
  T eps = T(1e-5);
  Param<T> gamma, beta;
  std::vector<T> run_mean, run_var;

  void init(int dim_) {
    dim = dim_;
    gamma.init(dim, T(1));
    beta.init(dim, T(0));
    run_mean.assign(dim, T(0));
    run_var.assign(dim, T(1));
  }

  struct Cache {
    Mat<T> xhat;
    std::vector<T> inv_std;
  };

  Mat<T> forward_train(const Mat<T>& x, Cache& c, bool update_running = true) {
    const int b = x.rows;
    Mat<T> y(b, dim);
    c.xhat = Mat<T>(b, dim);
    c.inv_std.assign(dim, T(0));
    for (int j = 0; j < dim; ++j) {
      T mean = 0;
      for (int r = 0; r < b; ++r) mean += x.at(r, j);
      mean /= b;
      T var = 0;
      for (int r = 0; r < b; ++r) {
        const T d = x.at(r, j) - mean;
        var += d * d;
      }
      var /= b;
      const T inv = T(1) / std::sqrt(var + eps);
      c.inv_std[j] = inv;
      for (int r = 0; r < b; ++r) {
        const T xh = (x.at(r, j) - mean) * inv;
        c.xhat.at(r, j) = xh;
        y.at(r, j) = gamma.w[j] * xh + beta.w[j];
      }
      if (update_running) {
        run_mean[j] = momentum * run_mean[j] + (T(1) - momentum) * mean;
        run_var[j] = momentum * run_var[j] + (T(1) - momentum) * var;
      }
    }
    return y;
  }

  Mat<T> forward_infer(const Mat<T>& x) const {
    Mat<T> y(x.rows, dim);
    for (int j = 0; j < dim; ++j) {
      const T inv = T(1) / std::sqrt(run_var[j] + eps);
      for (int r = 0; r < x.rows; ++r)
        y.at(r, j) = gamma.w[j] * (x.at(r, j) - run_mean[j]) * inv + beta.w[j];
    }
    return y;
  }

  Mat<T> backward(const Cache& c, const Mat<T>& dy) {
    const int b = dy.rows;
    Mat<T> dx(b, dim);
    for (int j = 0; j < dim; ++j) {
      T sum_dy = 0, sum_dy_xhat = 0;
      for (int r = 0; r < b; ++r) {
        sum_dy += dy.at(r, j);
        sum_dy_xhat += dy.at(r, j) * c.xhat.at(r, j);
      }
      gamma.g[j] += sum_dy_xhat;
      beta.g[j] += sum_dy;
      const T scale = gamma.w[j] * c.inv_std[j];
      for (int r = 0; r < b; ++r) {
        dx.at(r, j) = scale * (dy.at(r, j) - sum_dy / b - c.xhat.at(r, j) * sum_dy_xhat / b);
      }
    }
    return dx;
  }
};

/// Mean softmax cross-entropy; writes dL/dlogits (already averaged) to dlogits.
template <class T>
double softmax_cross_entropy(const Mat<T>& logits, const std::vector<std::uint32_t>& targets,
                             Mat<T>* dlogits = nullptr) {
  const int b = logits.rows, q = logits.cols;
  if (dlogits) *dlogits = Mat<T>(b, q);
  double loss = 0.0;
  std::vector<double> p(q);
  for (int r = 0; r < b; ++r) {
    const T* lr = logits.row(r);
    double mx = lr[0];
    for (int j = 1; j < q; ++j) mx = std::max<double>(mx, lr[j]);
    double z = 0.0;
    for (int j = 0; j < q; ++j) {
      p[j] = std::exp(static_cast<double>(lr[j]) - mx);
      z += p[j];
    }
    for (int j = 0; j < q; ++j) p[j] /= z;
    loss -= std::log(p[targets[r]]);
    if (dlogits) {
      T* dr = dlogits->row(r);
      for (int j = 0; j < q; ++j)
        dr[j] = static_cast<T>((p[j] - (j == static_cast<int>(targets[r]) ? 1.0 : 0.0)) / b);
    }
  }
  return loss / b;
}

/// Fig-style classifier: input batchnorm, a pixel-feature reducer, one
/// cluster-difference reducer shared across the Q candidates, and a fully
/// connected head emitting Q logits.
template <class T>
struct ClassifierNet {
  NetworkSpec spec;
  BatchNorm<T> bn;
  Dense<T> drp1, drp2;
  Dense<T> drc1, drc2;
  Dense<T> fc1, fc2, fc3, fc4;
  long adam_step = 0;

  static ClassifierNet create(const NetworkSpec& s, std::uint64_t seed) {
    require(s.kind == NetworkKind::classification, errc::bad_dims, "spec is not a classifier");
    ClassifierNet net;
    net.spec = s;
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    const int m = s.M, q = s.Q;
    net.bn.init(s.input_size());
    net.drp1.init(m, 100, true, rng);
    net.drp2.init(100, 15, true, rng);
    net.drc1.init(m, 100, true, rng);
    net.drc2.init(100, 15, true, rng);
    const int fc_in = 15 + q + q * 15;
    net.fc1.init(fc_in, 120, true, rng);
    net.fc2.init(120, 105, true, rng);
    net.fc3.init(105, 15, true, rng);
    net.fc4.init(15, q, true, rng);
    // logits start uniform: a fresh net scores ln Q on any target set
    std::fill(net.fc4.weight.w.begin(), net.fc4.weight.w.end(), T(0));
    return net;
  }

  struct Cache {
    typename BatchNorm<T>::Cache bn;
    Mat<T> p, a1, r1, a2;                     // DRP path
    std::vector<Mat<T>> cu, ca1, cr1, ca2;    // DRC path per candidate
    Mat<T> d;                                 // normalized spatial distances
    Mat<T> z, f1, g1, f2, g2, f3, g3;         // FC head
  };

  std::vector<Param<T>*> params() {
    return {&bn.gamma,      &bn.beta,      &drp1.weight, &drp1.bias, &drp2.weight, &drp2.bias,
            &drc1.weight,   &drc1.bias,    &drc2.weight, &drc2.bias, &fc1.weight,  &fc1.bias,
            &fc2.weight,    &fc2.bias,     &fc3.weight,  &fc3.bias,  &fc4.weight,  &fc4.bias};
  }

  // persisted arrays beyond params: batchnorm running statistics
  std::vector<std::vector<T>*> extra_state() { return {&bn.run_mean, &bn.run_var}; }

  void zero_grad() {
    for (Param<T>* p : params()) std::fill(p->g.begin(), p->g.end(), T(0));
  }

  Mat<T> forward(const Mat<T>& x, bool training, Cache& c, bool update_running = true) {
    const int m = spec.M, q = spec.Q;
    require(x.cols == spec.input_size(), errc::shape_mismatch,
            "input width " + std::to_string(x.cols) + " does not match the network");
    const Mat<T> xb = training ? bn.forward_train(x, c.bn, update_running) : bn.forward_infer(x);

    auto slice = [&](int c0, int width) {
      Mat<T> s(xb.rows, width);
      for (int r = 0; r < xb.rows; ++r)
        std::copy(xb.row(r) + c0, xb.row(r) + c0 + width, s.row(r));
      return s;
    };

    c.p = slice(0, m);
    c.d = slice(m, q);
    c.a1 = drp1.forward(c.p);
    c.r1 = relu(c.a1);
    c.a2 = drp2.forward(c.r1);
    const Mat<T> r2 = relu(c.a2);

    c.cu.resize(q);
    c.ca1.resize(q);
    c.cr1.resize(q);
    c.ca2.resize(q);
    std::vector<Mat<T>> cr2(q);
    for (int i = 0; i < q; ++i) {
      c.cu[i] = slice(m + q + i * m, m);
      c.ca1[i] = drc1.forward(c.cu[i]);
      c.cr1[i] = relu(c.ca1[i]);
      c.ca2[i] = drc2.forward(c.cr1[i]);
      cr2[i] = relu(c.ca2[i]);
    }

    c.z = Mat<T>(x.rows, 15 + q + q * 15);
    for (int r = 0; r < x.rows; ++r) {
      T* zr = c.z.row(r);
      std::copy(r2.row(r), r2.row(r) + 15, zr);
      std::copy(c.d.row(r), c.d.row(r) + q, zr + 15);
      for (int i = 0; i < q; ++i)
        std::copy(cr2[i].row(r), cr2[i].row(r) + 15, zr + 15 + q + i * 15);
    }

    c.f1 = fc1.forward(c.z);
    c.g1 = relu(c.f1);
    c.f2 = fc2.forward(c.g1);
    c.g2 = relu(c.f2);
    c.f3 = fc3.forward(c.g2);
    c.g3 = relu(c.f3);
    return fc4.forward(c.g3);
  }

  Mat<T> logits(const Mat<T>& x) {
    Cache c;
    return forward(x, false, c);
  }

  void backward(const Mat<T>& dlogits, Cache& c) {
    const int m = spec.M, q = spec.Q;
    Mat<T> dg3 = fc4.backward(c.g3, dlogits);
    Mat<T> df3 = relu_backward(c.f3, dg3);
    Mat<T> dg2 = fc3.backward(c.g2, df3);
    Mat<T> df2 = relu_backward(c.f2, dg2);
    Mat<T> dg1 = fc2.backward(c.g1, df2);
    Mat<T> df1 = relu_backward(c.f1, dg1);
    Mat<T> dz = fc1.backward(c.z, df1);

    const int b = dlogits.rows;
    Mat<T> dxb(b, spec.input_size());

    // DRP branch
    {
      Mat<T> dr2(b, 15);
      for (int r = 0; r < b; ++r) std::copy(dz.row(r), dz.row(r) + 15, dr2.row(r));
      Mat<T> da2 = relu_backward(c.a2, dr2);
      Mat<T> dr1 = drp2.backward(c.r1, da2);
      Mat<T> da1 = relu_backward(c.a1, dr1);
      Mat<T> dp = drp1.backward(c.p, da1);
      for (int r = 0; r < b; ++r)
        for (int i = 0; i < m; ++i) dxb.at(r, i) = dp.at(r, i);
    }
    // spatial distances pass straight through
    for (int r = 0; r < b; ++r)
      for (int i = 0; i < q; ++i) dxb.at(r, m + i) = dz.at(r, 15 + i);
    // DRC branches accumulate into the shared weights
    for (int i = 0; i < q; ++i) {
      Mat<T> dcr2(b, 15);
      for (int r = 0; r < b; ++r)
        std::copy(dz.row(r) + 15 + q + i * 15, dz.row(r) + 15 + q + (i + 1) * 15, dcr2.row(r));
      Mat<T> dca2 = relu_backward(c.ca2[i], dcr2);
      Mat<T> dcr1 = drc2.backward(c.cr1[i], dca2);
      Mat<T> dca1 = relu_backward(c.ca1[i], dcr1);
      Mat<T> dcu = drc1.backward(c.cu[i], dca1);
      for (int r = 0; r < b; ++r)
        for (int j = 0; j < m; ++j) dxb.at(r, m + q + i * m + j) = dcu.at(r, j);
    }
    bn.backward(c.bn, dxb);
  }
};

/// Distance-module network: a shared module maps each candidate's squared
/// differences (plus squared normalized spatial distance) to one distance.
/// Logits are the negated distances, so argmax picks the closest candidate.
template <class T>
struct RegressionNet {
  NetworkSpec spec;
  Dense<T> l1, l2, l3;  // depth 1 uses l1 only (no bias, no activation)
  long adam_step = 0;

  static RegressionNet create(const NetworkSpec& s, std::uint64_t seed) {
    require(s.kind == NetworkKind::regression_distance, errc::bad_dims,
            "spec is not a regression network");
    RegressionNet net;
    net.spec = s;
    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    if (s.depth == 1) {
      net.l1.init(s.M + 1, 1, false, rng);
      std::fill(net.l1.weight.w.begin(), net.l1.weight.w.end(), T(0));
    } else {
      net.l1.init(s.M + 1, 32, true, rng);
      net.l2.init(32, 16, true, rng);
      net.l3.init(16, 1, true, rng);
      std::fill(net.l3.weight.w.begin(), net.l3.weight.w.end(), T(0));
    }
    return net;
  }

  struct Cache {
    std::vector<Mat<T>> u;        // per-candidate module inputs
    std::vector<Mat<T>> a1, r1, a2, r2;
  };

  std::vector<Param<T>*> params() {
    if (spec.depth == 1) return {&l1.weight};
    return {&l1.weight, &l1.bias, &l2.weight, &l2.bias, &l3.weight, &l3.bias};
  }

  std::vector<std::vector<T>*> extra_state() { return {}; }

  void zero_grad() {
    for (Param<T>* p : params()) std::fill(p->g.begin(), p->g.end(), T(0));
  }

  // per-candidate module input: squared feature diffs then squared D_q
  Mat<T> module_input(const Mat<T>& x, int candidate) const {
    const int m = spec.M, q = spec.Q;
    Mat<T> u(x.rows, m + 1);
    for (int r = 0; r < x.rows; ++r) {
      const T* xr = x.row(r);
      T* ur = u.row(r);
      for (int j = 0; j < m; ++j) {
        const T d = xr[m + q + candidate * m + j];
        ur[j] = d * d;
      }
      const T dq = xr[m + candidate];
      ur[m] = dq * dq;
    }
    return u;
  }

  /// Distances per candidate, batch x Q.
  Mat<T> distances(const Mat<T>& x, Cache& c) {
    const int q = spec.Q;
    require(x.cols == spec.input_size(), errc::shape_mismatch,
            "input width " + std::to_string(x.cols) + " does not match the network");
    c.u.resize(q);
    c.a1.resize(q);
    c.r1.resize(q);
    c.a2.resize(q);
    c.r2.resize(q);
    Mat<T> dist(x.rows, q);
    for (int i = 0; i < q; ++i) {
      c.u[i] = module_input(x, i);
      Mat<T> outv;
      if (spec.depth == 1) {
        outv = l1.forward(c.u[i]);
      } else {
        c.a1[i] = l1.forward(c.u[i]);
        c.r1[i] = relu(c.a1[i]);
        c.a2[i] = l2.forward(c.r1[i]);
        c.r2[i] = relu(c.a2[i]);
        outv = l3.forward(c.r2[i]);
      }
      for (int r = 0; r < x.rows; ++r) dist.at(r, i) = outv.at(r, 0);
    }
    return dist;
  }

  Mat<T> forward(const Mat<T>& x, bool /*training*/, Cache& c, bool /*update_running*/ = true) {
    Mat<T> dist = distances(x, c);
    for (T& v : dist.v) v = -v;
    return dist;
  }

  Mat<T> logits(const Mat<T>& x) {
    Cache c;
    return forward(x, false, c);
  }

  void backward(const Mat<T>& dlogits, Cache& c) {
    const int q = spec.Q;
    for (int i = 0; i < q; ++i) {
      Mat<T> ddist(dlogits.rows, 1);
      for (int r = 0; r < dlogits.rows; ++r) ddist.at(r, 0) = -dlogits.at(r, i);
      if (spec.depth == 1) {
        l1.backward(c.u[i], ddist);
      } else {
        Mat<T> dr2 = l3.backward(c.r2[i], ddist);
        Mat<T> da2 = relu_backward(c.a2[i], dr2);
        Mat<T> dr1 = l2.backward(c.r1[i], da2);
        Mat<T> da1 = relu_backward(c.a1[i], dr1);
        l1.backward(c.u[i], da1);
      }
    }
  }
};

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <class T>
void adam_update(const std::vector<Param<T>*>& params, long& step, const AdamOptions& o = {}) {
  ++step;
  const double c1 = 1.0 - std::pow(o.beta1, step);
  const double c2 = 1.0 - std::pow(o.beta2, step);
  for (Param<T>* p : params) {
    for (std::size_t i = 0; i < p->w.size(); ++i) {
      const double g = p->g[i];
      p->m[i] = static_cast<T>(o.beta1 * p->m[i] + (1.0 - o.beta1) * g);
      p->v[i] = static_cast<T>(o.beta2 * p->v[i] + (1.0 - o.beta2) * g * g);
      const double mhat = p->m[i] / c1;
      const double vhat = p->v[i] / c2;
      p->w[i] -= static_cast<T>(o.lr * mhat / (std::sqrt(vhat) + o.eps));
    }
  }
}

struct TrainOptions {
  AdamOptions adam;
  int batch = 64;
};

/// One pass over the data in shuffled minibatches; returns the mean loss.
template <class Net, class T>
double train_epoch(Net& net, const Mat<T>& inputs, const std::vector<std::uint32_t>& targets,
                   const TrainOptions& opt, std::mt19937& rng) {
  require(inputs.rows > 0, errc::empty_dataset, "no training samples");
  require(targets.size() == static_cast<std::size_t>(inputs.rows), errc::count_mismatch,
          "targets do not match the sample count");
  std::vector<int> order(inputs.rows);
  for (int i = 0; i < inputs.rows; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  double total = 0.0;
  for (int start = 0; start < inputs.rows; start += opt.batch) {
    const int b = std::min(opt.batch, inputs.rows - start);
    Mat<T> x(b, inputs.cols);
    std::vector<std::uint32_t> y(b);
    for (int r = 0; r < b; ++r) {
      std::copy(inputs.row(order[start + r]), inputs.row(order[start + r]) + inputs.cols, x.row(r));
      y[r] = targets[order[start + r]];
    }
    typename Net::Cache cache;
    Mat<T> logits = net.forward(x, true, cache);
    Mat<T> dlogits;
    const double loss = softmax_cross_entropy(logits, y, &dlogits);
    if (!std::isfinite(loss)) fail(errc::non_finite_loss, "loss diverged");
    net.zero_grad();
    net.backward(dlogits, cache);
    adam_update(net.params(), net.adam_step, opt.adam);
    total += loss * b;
  }
  return total / inputs.rows;
}

/// Mean loss without updates (validation).
template <class Net, class T>
double eval_loss(Net& net, const Mat<T>& inputs, const std::vector<std::uint32_t>& targets) {
  require(inputs.rows > 0, errc::empty_dataset, "no samples");
  typename Net::Cache cache;
  Mat<T> logits = net.forward(inputs, false, cache);
  return softmax_cross_entropy<T>(logits, targets, nullptr);
}

/// Max relative error between analytic and central finite-difference
/// gradients for the network described by `spec` (double precision,
/// training-mode forward).
inline double gradient_check(const NetworkSpec& spec, std::uint64_t seed = 7) {
  std::mt19937 rng(static_cast<std::uint32_t>(seed));
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const int b = 5;
  Mat<double> x(b, spec.input_size());
  for (double& v : x.v) v = unif(rng);
  std::vector<std::uint32_t> y(b);
  for (auto& t : y) t = rng() % spec.Q;

  auto run = [&](auto& net) {
    // zero-initialized output layers would hide upstream gradients
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    for (Param<double>* p : net.params())
      for (double& w : p->w) w += jitter(rng);
    auto loss_of = [&]() {
      typename std::remove_reference_t<decltype(net)>::Cache c;
      Mat<double> logits = net.forward(x, true, c, false);
      return softmax_cross_entropy(logits, y, static_cast<Mat<double>*>(nullptr));
    };
    typename std::remove_reference_t<decltype(net)>::Cache c;
    Mat<double> logits = net.forward(x, true, c, false);
    Mat<double> dlogits;
    softmax_cross_entropy(logits, y, &dlogits);
    net.zero_grad();
    net.backward(dlogits, c);

    const double h = 1e-4;
    double worst = 0.0;
    for (Param<double>* p : net.params()) {
      // probe at most 64 evenly spaced entries per array; every array (and
      // so every layer type) still gets covered
      const std::size_t n = p->w.size();
      const std::size_t stride = std::max<std::size_t>(1, n / 64);
      for (std::size_t i = 0; i < n; i += stride) {
        const double save = p->w[i];
        p->w[i] = save + h;
        const double lp = loss_of();
        p->w[i] = save - h;
        const double lm = loss_of();
        p->w[i] = save;
        const double numeric = (lp - lm) / (2.0 * h);
        const double analytic = p->g[i];
        const double err = std::abs(numeric - analytic) /
                           std::max({1.0, std::abs(numeric), std::abs(analytic)});
        worst = std::max(worst, err);
      }
    }
    return worst;
  };

  if (spec.kind == NetworkKind::classification) {
    auto net = ClassifierNet<double>::create(spec, seed);
    return run(net);
  }
  auto net = RegressionNet<double>::create(spec, seed);
  return run(net);
}

}  // namespace spix

#endif  // SPIX_NN_HPP
