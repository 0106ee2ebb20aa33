#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "circumnav/matrix.hpp"
#include "circumnav/rng.hpp"

namespace circumnav {

using Vec4 = std::array<double, 4>;

constexpr int kInputSize = 4;
constexpr int kOutputSize = 4;

// Gate indices into the parameter arrays.
enum Gate : int { kGateI = 0, kGateF = 1, kGateG = 2, kGateO = 3 };

// Single-layer LSTM (standard 4-gate formulation, no peepholes) followed by
// a fully connected head mapping the final hidden state to 4 outputs.
//
//   i = sigm(W_i x + U_i h + b_i)     f = sigm(W_f x + U_f h + b_f)
//   g = tanh(W_g x + U_g h + b_g)     o = sigm(W_o x + U_o h + b_o)
//   c' = f.c + i.g                    h' = o.tanh(c')
struct LstmParams {
  std::size_t hidden = 0;
  std::array<Matrix, 4> W;  // input weights, each hidden x 4
  std::array<Matrix, 4> U;  // recurrent weights, each hidden x hidden
  std::array<std::vector<double>, 4> b;  // biases, each hidden
  Matrix fc_w;                           // 4 x hidden
  std::array<double, 4> fc_b{};

  void resize(std::size_t h);

  // Visits every tensor as a flat span, in serialization order:
  // W_i, W_f, W_g, W_o, U_i.., b_i.., fc_w, fc_b.
  template <typename F>
  void for_each_tensor(F&& f) {
    for (auto& m : W) f(m.data.data(), m.data.size());
    for (auto& m : U) f(m.data.data(), m.data.size());
    for (auto& v : b) f(v.data(), v.size());
    f(fc_w.data.data(), fc_w.data.size());
    f(fc_b.data(), fc_b.size());
  }
  template <typename F>
  void for_each_tensor(F&& f) const {
    for (auto& m : W) f(m.data.data(), m.data.size());
    for (auto& m : U) f(m.data.data(), m.data.size());
    for (auto& v : b) f(v.data(), v.size());
    f(fc_w.data.data(), fc_w.data.size());
    f(fc_b.data(), fc_b.size());
  }
};

// Parameter-shaped accumulator; reverse-mode gradients reuse the layout.
using Gradients = LstmParams;

struct LstmState {
  std::vector<double> h;
  std::vector<double> c;

  explicit LstmState(std::size_t hidden = 0) : h(hidden, 0.0), c(hidden, 0.0) {}
};

// One forward LSTM cell step.
LstmState lstm_cell_forward(const Vec4& x, const LstmState& state, const LstmParams& p);

// Per-step activations kept for backpropagation through time. Flat,
// step-major buffers so a training worker can reuse one cache across
// samples without reallocating.
struct ForwardCache {
  std::size_t len = 0;
  std::size_t hidden = 0;
  std::vector<Vec4> x;
  std::vector<double> i, f, g, o, c, tanh_c, h;

  void resize(std::size_t len, std::size_t hidden);
  double* step(std::vector<double>& buf, std::size_t t) { return buf.data() + t * hidden; }
  const double* step(const std::vector<double>& buf, std::size_t t) const {
    return buf.data() + t * hidden;
  }
};

// Many-to-one forward pass: fold the cell over the inputs (oldest first,
// zero initial state) and map the final hidden state through the head.
Vec4 model_forward(const std::vector<Vec4>& inputs, const LstmParams& p);

// Forward pass that records activations for model_backward.
Vec4 model_forward_cached(const std::vector<Vec4>& inputs, const LstmParams& p,
                          ForwardCache& cache);

// Scratch buffers for one backward pass.
struct BackwardScratch {
  std::vector<double> dh, dc, dh_prev, da[4];
  void resize(std::size_t hidden);
};

// Reverse-mode gradient of dot(output, loss_grad) with respect to every
// parameter, including the recurrent paths through all timesteps.
// Accumulates into grads (callers zero it when starting a new batch).
void model_backward_acc(const ForwardCache& cache, const LstmParams& p, const Vec4& loss_grad,
                        Gradients& grads, BackwardScratch& scratch);

// Convenience form matching the forward-only entry points: recomputes the
// forward activations, returns a fresh gradient set.
Gradients model_backward(const std::vector<Vec4>& inputs, const LstmParams& p,
                         const Vec4& loss_grad);

struct MseResult {
  double loss = 0.0;
  Vec4 grad{};
};

// loss = mean_k (pred_k - target_k)^2 / ... averaged over the 4 components;
// grad is d(loss)/d(pred).
MseResult mse_loss(const Vec4& pred, const Vec4& target);

// Uniform(-1/sqrt(H), 1/sqrt(H)) weights; zero biases except the forget
// gate bias, which starts at 1 so early training retains cell state across
// long windows.
LstmParams init_params(std::size_t hidden, std::uint64_t seed);

struct AdamState {
  Gradients m;
  Gradients v;
  long t = 0;

  explicit AdamState(std::size_t hidden = 0) {
    if (hidden > 0) {
      m.resize(hidden);
      v.resize(hidden);
    }
  }
};

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam update with bias correction; increments opt.t.
void adam_step(LstmParams& p, const Gradients& g, AdamState& opt, const AdamConfig& cfg);

// Scales gradients so their global L2 norm is at most max_norm. Returns the
// pre-clip norm.
double clip_global_norm(Gradients& g, double max_norm);

// ---------------------------------------------------------------------------
// Weight files.
//
// Binary layout (all integers and floats little-endian):
//   bytes 0..7   magic "CNAVLSTM"
//   u32          format version (currently 1)
//   u32          hidden size H
//   u32          window length consumed per estimate
//   f64          input velocity divisor (1 = raw inputs)
//   f64          output scale (estimates are net output * scale; 1 = raw)
//   f64[...]     tensors in for_each_tensor order
//   u64          FNV-1a checksum of every preceding byte
// ---------------------------------------------------------------------------

struct LstmModel {
  LstmParams params;
  long window = 60;
  double input_vel_scale = 1.0;  // divisor applied to velocity inputs
  double target_scale = 1.0;     // multiplier applied to net outputs
};

void save_weights(const LstmModel& model, const std::string& path);
LstmModel load_weights(const std::string& path);

struct WeightFileInfo {
  std::uint32_t version = 0;
  std::uint32_t hidden = 0;
  std::uint32_t window = 0;
  double input_vel_scale = 1.0;
  double target_scale = 1.0;
  std::uint64_t checksum = 0;
  std::size_t parameter_count = 0;
};

// Header-only read (still verifies the checksum).
WeightFileInfo inspect_weights(const std::string& path);

}  // namespace circumnav
