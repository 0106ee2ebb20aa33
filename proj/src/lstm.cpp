#include "circumnav/lstm.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "circumnav/errors.hpp"

namespace circumnav {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_shapes(const LstmParams& p) {
  std::size_t h = p.hidden;
  for (int g = 0; g < 4; ++g) {
    if (p.W[g].rows != h || p.W[g].cols != kInputSize) throw ShapeMismatch("input weights");
    if (p.U[g].rows != h || p.U[g].cols != h) throw ShapeMismatch("recurrent weights");
    if (p.b[g].size() != h) throw ShapeMismatch("gate bias");
  }
  if (p.fc_w.rows != kOutputSize || p.fc_w.cols != h) throw ShapeMismatch("output head");
}

// Gate preactivation: out = W x + U h + b.
void gate_preactivation(const Matrix& w, const Matrix& u, const std::vector<double>& b,
                        const Vec4& x, const double* h_prev, double* out) {
  std::size_t hidden = b.size();
  for (std::size_t k = 0; k < hidden; ++k) {
    const double* wr = w.row(k);
    out[k] = b[k] + wr[0] * x[0] + wr[1] * x[1] + wr[2] * x[2] + wr[3] * x[3];
  }
  if (h_prev != nullptr) matvec_acc(u, h_prev, out);
}

Vec4 head_output(const LstmParams& p, const double* h) {
  Vec4 y = p.fc_b;
  for (int r = 0; r < kOutputSize; ++r) {
    const double* wr = p.fc_w.row(r);
    double acc = 0.0;
    for (std::size_t c = 0; c < p.hidden; ++c) acc += wr[c] * h[c];
    y[r] += acc;
  }
  return y;
}

}  // namespace

void LstmParams::resize(std::size_t h) {
  hidden = h;
  for (int g = 0; g < 4; ++g) {
    W[g] = Matrix(h, kInputSize);
    U[g] = Matrix(h, h);
    b[g].assign(h, 0.0);
  }
  fc_w = Matrix(kOutputSize, h);
  fc_b = {};
}

LstmState lstm_cell_forward(const Vec4& x, const LstmState& state, const LstmParams& p) {
  check_shapes(p);
  std::size_t h = p.hidden;
  if (state.h.size() != h || state.c.size() != h) throw ShapeMismatch("cell state");

  std::vector<double> pre(h);
  LstmState next(h);
  std::vector<double> gi(h), gf(h), gg(h), go(h);

  gate_preactivation(p.W[kGateI], p.U[kGateI], p.b[kGateI], x, state.h.data(), gi.data());
  gate_preactivation(p.W[kGateF], p.U[kGateF], p.b[kGateF], x, state.h.data(), gf.data());
  gate_preactivation(p.W[kGateG], p.U[kGateG], p.b[kGateG], x, state.h.data(), gg.data());
  gate_preactivation(p.W[kGateO], p.U[kGateO], p.b[kGateO], x, state.h.data(), go.data());

  for (std::size_t k = 0; k < h; ++k) {
    double i = sigmoid(gi[k]);
    double f = sigmoid(gf[k]);
    double g = std::tanh(gg[k]);
    double o = sigmoid(go[k]);
    next.c[k] = f * state.c[k] + i * g;
    next.h[k] = o * std::tanh(next.c[k]);
  }
  return next;
}

void ForwardCache::resize(std::size_t n, std::size_t h) {
  len = n;
  hidden = h;
  x.resize(n);
  std::size_t total = n * h;
  i.resize(total);
  f.resize(total);
  g.resize(total);
  o.resize(total);
  c.resize(total);
  tanh_c.resize(total);
  this->h.resize(total);
}

Vec4 model_forward_cached(const std::vector<Vec4>& inputs, const LstmParams& p,
                          ForwardCache& cache) {
  check_shapes(p);
  std::size_t hidden = p.hidden;
  std::size_t len = inputs.size();
  cache.resize(len, hidden);

  const double* h_prev = nullptr;  // zero initial state
  const double* c_prev = nullptr;
  for (std::size_t t = 0; t < len; ++t) {
    cache.x[t] = inputs[t];
    double* it = cache.step(cache.i, t);
    double* ft = cache.step(cache.f, t);
    double* gt = cache.step(cache.g, t);
    double* ot = cache.step(cache.o, t);
    double* ct = cache.step(cache.c, t);
    double* tc = cache.step(cache.tanh_c, t);
    double* ht = cache.step(cache.h, t);

    gate_preactivation(p.W[kGateI], p.U[kGateI], p.b[kGateI], inputs[t], h_prev, it);
    gate_preactivation(p.W[kGateF], p.U[kGateF], p.b[kGateF], inputs[t], h_prev, ft);
    gate_preactivation(p.W[kGateG], p.U[kGateG], p.b[kGateG], inputs[t], h_prev, gt);
    gate_preactivation(p.W[kGateO], p.U[kGateO], p.b[kGateO], inputs[t], h_prev, ot);

    for (std::size_t k = 0; k < hidden; ++k) {
      double i = sigmoid(it[k]);
      double f = sigmoid(ft[k]);
      double g = std::tanh(gt[k]);
      double o = sigmoid(ot[k]);
      double c = f * (c_prev ? c_prev[k] : 0.0) + i * g;
      it[k] = i;
      ft[k] = f;
      gt[k] = g;
      ot[k] = o;
      ct[k] = c;
      tc[k] = std::tanh(c);
      ht[k] = o * tc[k];
    }
    h_prev = ht;
    c_prev = ct;
  }

  if (len == 0) throw WrongWindowLength(0, 1);
  return head_output(p, cache.step(cache.h, len - 1));
}

Vec4 model_forward(const std::vector<Vec4>& inputs, const LstmParams& p) {
  check_shapes(p);
  std::size_t hidden = p.hidden;
  if (inputs.empty()) throw WrongWindowLength(0, 1);

  LstmState state(hidden);
  std::vector<double> gi(hidden), gf(hidden), gg(hidden), go(hidden), c_next(hidden),
      h_next(hidden);
  for (const Vec4& x : inputs) {
    gate_preactivation(p.W[kGateI], p.U[kGateI], p.b[kGateI], x, state.h.data(), gi.data());
    gate_preactivation(p.W[kGateF], p.U[kGateF], p.b[kGateF], x, state.h.data(), gf.data());
    gate_preactivation(p.W[kGateG], p.U[kGateG], p.b[kGateG], x, state.h.data(), gg.data());
    gate_preactivation(p.W[kGateO], p.U[kGateO], p.b[kGateO], x, state.h.data(), go.data());
    for (std::size_t k = 0; k < hidden; ++k) {
      double c = sigmoid(gf[k]) * state.c[k] + sigmoid(gi[k]) * std::tanh(gg[k]);
      c_next[k] = c;
      h_next[k] = sigmoid(go[k]) * std::tanh(c);
    }
    state.c.swap(c_next);
    state.h.swap(h_next);
  }
  return head_output(p, state.h.data());
}

void BackwardScratch::resize(std::size_t hidden) {
  dh.assign(hidden, 0.0);
  dc.assign(hidden, 0.0);
  dh_prev.assign(hidden, 0.0);
  for (auto& v : da) v.assign(hidden, 0.0);
}

void model_backward_acc(const ForwardCache& cache, const LstmParams& p, const Vec4& loss_grad,
                        Gradients& grads, BackwardScratch& scratch) {
  std::size_t hidden = p.hidden;
  std::size_t len = cache.len;
  if (cache.hidden != hidden) throw ShapeMismatch("cache vs params");
  if (grads.hidden != hidden) throw ShapeMismatch("gradient buffers");

  scratch.resize(hidden);
  std::vector<double>& dh = scratch.dh;
  std::vector<double>& dc = scratch.dc;

  // Head: y = fc_w h_last + fc_b.
  const double* h_last = cache.step(cache.h, len - 1);
  for (int r = 0; r < kOutputSize; ++r) {
    grads.fc_b[r] += loss_grad[r];
    double* gw = grads.fc_w.row(r);
    const double* wr = p.fc_w.row(r);
    for (std::size_t k = 0; k < hidden; ++k) {
      gw[k] += loss_grad[r] * h_last[k];
      dh[k] += loss_grad[r] * wr[k];
    }
  }

  for (std::size_t t = len; t-- > 0;) {
    const double* it = cache.step(cache.i, t);
    const double* ft = cache.step(cache.f, t);
    const double* gt = cache.step(cache.g, t);
    const double* ot = cache.step(cache.o, t);
    const double* tc = cache.step(cache.tanh_c, t);
    const double* c_prev = t > 0 ? cache.step(cache.c, t - 1) : nullptr;
    const double* h_prev = t > 0 ? cache.step(cache.h, t - 1) : nullptr;

    double* da_i = scratch.da[kGateI].data();
    double* da_f = scratch.da[kGateF].data();
    double* da_g = scratch.da[kGateG].data();
    double* da_o = scratch.da[kGateO].data();

    for (std::size_t k = 0; k < hidden; ++k) {
      double i = it[k], f = ft[k], g = gt[k], o = ot[k];
      double dck = dc[k] + dh[k] * o * (1.0 - tc[k] * tc[k]);
      da_o[k] = dh[k] * tc[k] * o * (1.0 - o);
      da_f[k] = dck * (c_prev ? c_prev[k] : 0.0) * f * (1.0 - f);
      da_i[k] = dck * g * i * (1.0 - i);
      da_g[k] = dck * i * (1.0 - g * g);
      dc[k] = dck * f;  // flows to c_{t-1}
    }

    for (int gate = 0; gate < 4; ++gate) {
      const double* da = scratch.da[gate].data();
      // W grads: da x^T with 4 input columns.
      double* gw = grads.W[gate].data.data();
      const double* xt = cache.x[t].data();
      for (std::size_t k = 0; k < hidden; ++k) {
        gw[0] += da[k] * xt[0];
        gw[1] += da[k] * xt[1];
        gw[2] += da[k] * xt[2];
        gw[3] += da[k] * xt[3];
        gw += 4;
        grads.b[gate][k] += da[k];
      }
      if (h_prev != nullptr) outer_acc(grads.U[gate], da, h_prev);
    }

    // dh_{t-1} = sum_gates U^T da.
    std::fill(scratch.dh_prev.begin(), scratch.dh_prev.end(), 0.0);
    if (t > 0) {
      for (int gate = 0; gate < 4; ++gate) {
        matvec_transpose_acc(p.U[gate], scratch.da[gate].data(), scratch.dh_prev.data());
      }
    }
    dh.swap(scratch.dh_prev);
  }
}

Gradients model_backward(const std::vector<Vec4>& inputs, const LstmParams& p,
                         const Vec4& loss_grad) {
  ForwardCache cache;
  model_forward_cached(inputs, p, cache);
  Gradients grads;
  grads.resize(p.hidden);
  BackwardScratch scratch;
  model_backward_acc(cache, p, loss_grad, grads, scratch);
  return grads;
}

MseResult mse_loss(const Vec4& pred, const Vec4& target) {
  MseResult r;
  for (int k = 0; k < 4; ++k) {
    double e = pred[k] - target[k];
    r.loss += 0.25 * e * e;
    r.grad[k] = 0.5 * e;
  }
  return r;
}

LstmParams init_params(std::size_t hidden, std::uint64_t seed) {
  LstmParams p;
  p.resize(hidden);
  Rng rng(seed);
  double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (int g = 0; g < 4; ++g) {
    for (double& w : p.W[g].data) w = rng.uniform(-bound, bound);
    for (double& w : p.U[g].data) w = rng.uniform(-bound, bound);
  }
  for (double& w : p.fc_w.data) w = rng.uniform(-bound, bound);
  std::fill(p.b[kGateF].begin(), p.b[kGateF].end(), 1.0);
  return p;
}

void adam_step(LstmParams& p, const Gradients& g, AdamState& opt, const AdamConfig& cfg) {
  if (g.hidden != p.hidden || opt.m.hidden != p.hidden) throw ShapeMismatch("adam buffers");
  opt.t += 1;
  double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(opt.t));
  double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(opt.t));

  // Walk the three structures in lockstep via raw tensor spans.
  struct Span {
    double* p;
    std::size_t n;
  };
  std::vector<Span> ps, ms, vs;
  std::vector<std::pair<const double*, std::size_t>> gs;
  p.for_each_tensor([&](double* d, std::size_t n) { ps.push_back({d, n}); });
  opt.m.for_each_tensor([&](double* d, std::size_t n) { ms.push_back({d, n}); });
  opt.v.for_each_tensor([&](double* d, std::size_t n) { vs.push_back({d, n}); });
  g.for_each_tensor([&](const double* d, std::size_t n) { gs.push_back({d, n}); });

  for (std::size_t t = 0; t < ps.size(); ++t) {
    double* w = ps[t].p;
    double* m = ms[t].p;
    double* v = vs[t].p;
    const double* gr = gs[t].first;
    for (std::size_t k = 0; k < ps[t].n; ++k) {
      m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * gr[k];
      v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * gr[k] * gr[k];
      double m_hat = m[k] / bc1;
      double v_hat = v[k] / bc2;
      w[k] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

double clip_global_norm(Gradients& g, double max_norm) {
  double sq = 0.0;
  g.for_each_tensor([&](const double* d, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) sq += d[k] * d[k];
  });
  double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    double scale = max_norm / norm;
    g.for_each_tensor([&](double* d, std::size_t n) {
      for (std::size_t k = 0; k < n; ++k) d[k] *= scale;
    });
  }
  return norm;
}

// --------------------------- weight files ----------------------------------

namespace {

constexpr char kMagic[8] = {'C', 'N', 'A', 'V', 'L', 'S', 'T', 'M'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t fnv1a(const unsigned char* data, std::size_t n, std::uint64_t h) {
  for (std::size_t k = 0; k < n; ++k) {
    h ^= data[k];
    h *= 0x100000001b3ULL;
  }
  return h;
}
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;

struct ByteWriter {
  std::string bytes;

  void raw(const void* p, std::size_t n) {
    bytes.append(static_cast<const char*>(p), n);
  }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int k = 0; k < 4; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    raw(b, 4);
  }
  void u64(std::uint64_t v) {
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(v >> (8 * k));
    raw(b, 8);
  }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    u64(bits);
  }
};

struct ByteReader {
  const unsigned char* p;
  std::size_t n;
  std::size_t off = 0;

  void need(std::size_t k) const {
    if (off + k > n) throw IoError("truncated weight file");
  }
  void raw(void* out, std::size_t k) {
    need(k);
    std::memcpy(out, p + off, k);
    off += k;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 3; k >= 0; --k) v = (v << 8) | p[off + k];
    off += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 7; k >= 0; --k) v = (v << 8) | p[off + k];
    off += 8;
    return v;
  }
  double f64() {
    std::uint64_t bits = u64();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!in.good() && !in.eof()) throw IoError("read failed: " + path);
  return bytes;
}

}  // namespace

void save_weights(const LstmModel& model, const std::string& path) {
  ByteWriter w;
  w.raw(kMagic, 8);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.params.hidden));
  w.u32(static_cast<std::uint32_t>(model.window));
  w.f64(model.input_vel_scale);
  w.f64(model.target_scale);
  model.params.for_each_tensor([&](const double* d, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) w.f64(d[k]);
  });
  std::uint64_t sum =
      fnv1a(reinterpret_cast<const unsigned char*>(w.bytes.data()), w.bytes.size(), kFnvOffset);
  w.u64(sum);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out.write(w.bytes.data(), static_cast<std::streamsize>(w.bytes.size()));
  if (!out.good()) throw IoError("write failed: " + path);
}

namespace {

LstmModel parse_weights(const std::string& bytes, bool header_only, WeightFileInfo* info) {
  if (bytes.size() < 8 + 4 + 4 + 4 + 8 + 8 + 8) throw IoError("truncated weight file");
  if (std::memcmp(bytes.data(), kMagic, 8) != 0) throw IoError("not a weight file (bad magic)");

  ByteReader r{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()};
  r.off = 8;
  std::uint32_t version = r.u32();
  if (version != kFormatVersion) {
    throw VersionMismatch("weight file version " + std::to_string(version) + ", expected " +
                          std::to_string(kFormatVersion));
  }
  LstmModel model;
  std::uint32_t hidden = r.u32();
  std::uint32_t window = r.u32();
  model.window = window;
  model.input_vel_scale = r.f64();
  model.target_scale = r.f64();
  model.params.resize(hidden);

  std::size_t count = 0;
  model.params.for_each_tensor([&](double*, std::size_t n) { count += n; });
  if (bytes.size() != r.off + count * 8 + 8) throw IoError("weight payload truncated or padded");

  // Checksum covers everything before the trailing u64.
  ByteReader tail{r.p, r.n};
  tail.off = bytes.size() - 8;
  std::uint64_t stored = tail.u64();
  std::uint64_t actual = fnv1a(r.p, bytes.size() - 8, kFnvOffset);
  if (stored != actual) throw ChecksumMismatch();

  if (info != nullptr) {
    info->version = version;
    info->hidden = hidden;
    info->window = window;
    info->input_vel_scale = model.input_vel_scale;
    info->target_scale = model.target_scale;
    info->checksum = stored;
    info->parameter_count = count;
  }
  if (header_only) return model;

  model.params.for_each_tensor([&](double* d, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) d[k] = r.f64();
  });
  return model;
}

}  // namespace

LstmModel load_weights(const std::string& path) {
  return parse_weights(read_file(path), false, nullptr);
}

WeightFileInfo inspect_weights(const std::string& path) {
  WeightFileInfo info;
  parse_weights(read_file(path), true, &info);
  return info;
}

}  // namespace circumnav
