#include "classifier/net.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "core/rng.hpp"

namespace tubeloc::classifier {

namespace {

constexpr int kK12 = 5, kPad12 = 2;  // conv1/conv2 kernel and padding
constexpr int kK3 = 3, kPad3 = 1;    // conv3

int conv_out(int n, int k, int pad) { return (n + 2 * pad - k) / 2 + 1; }

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapW = Eigen::Map<const RowMat>;
using MapWMut = Eigen::Map<RowMat>;
using MapV = Eigen::Map<const Eigen::VectorXd>;
using MapVMut = Eigen::Map<Eigen::VectorXd>;

// Gathers k x k stride-2 patches of a (channels x n^2) activation matrix into
// a (channels*k*k x out^2) column matrix; out-of-bounds taps read zero.
void im2col(const Eigen::MatrixXd& act, int channels, int n, int k, int pad,
            Eigen::MatrixXd& col) {
  const int out = conv_out(n, k, pad);
  col.resize(channels * k * k, out * out);
  for (int oy = 0; oy < out; ++oy) {
    for (int ox = 0; ox < out; ++ox) {
      const int c_idx = oy * out + ox;
      for (int ch = 0; ch < channels; ++ch) {
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * 2 - pad + ky;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * 2 - pad + kx;
            const int r_idx = (ch * k + ky) * k + kx;
            col(r_idx, c_idx) = (ix >= 0 && ix < n && iy >= 0 && iy < n)
                                    ? act(ch, iy * n + ix)
                                    : 0.0;
          }
        }
      }
    }
  }
}

// Scatter-add transpose of im2col.
void col2im(const Eigen::MatrixXd& col, int channels, int n, int k, int pad,
            Eigen::MatrixXd& act) {
  const int out = conv_out(n, k, pad);
  act.setZero(channels, n * n);
  for (int oy = 0; oy < out; ++oy) {
    for (int ox = 0; ox < out; ++ox) {
      const int c_idx = oy * out + ox;
      for (int ch = 0; ch < channels; ++ch) {
        for (int ky = 0; ky < k; ++ky) {
          const int iy = oy * 2 - pad + ky;
          if (iy < 0 || iy >= n) continue;
          for (int kx = 0; kx < k; ++kx) {
            const int ix = ox * 2 - pad + kx;
            if (ix < 0 || ix >= n) continue;
            act(ch, iy * n + ix) += col((ch * k + ky) * k + kx, c_idx);
          }
        }
      }
    }
  }
}

}  // namespace

NetDims::NetDims(const ArchConfig& a) {
  n0 = a.input_size;
  n1 = conv_out(n0, kK12, kPad12);
  n2 = conv_out(n1, kK12, kPad12);
  n3 = conv_out(n2, kK3, kPad3);
  std::size_t off = 0;
  w1 = off; off += std::size_t(a.c1) * 1 * kK12 * kK12;
  b1 = off; off += a.c1;
  w2 = off; off += std::size_t(a.c2) * a.c1 * kK12 * kK12;
  b2 = off; off += a.c2;
  w3 = off; off += std::size_t(a.c3) * a.c2 * kK3 * kK3;
  b3 = off; off += a.c3;
  wf = off; off += std::size_t(a.embed_dim) * a.c3;
  bf = off; off += a.embed_dim;
  total = off;
}

EmbedModel make_model(const ArchConfig& arch, double margin, std::uint64_t seed) {
  if (margin <= 0)
    throw std::invalid_argument("make_model: margin must be positive");
  if (arch.input_size < 8 || arch.c1 < 1 || arch.c2 < 1 || arch.c3 < 1 || arch.embed_dim < 1)
    throw std::invalid_argument("make_model: invalid architecture");
  EmbedModel m;
  m.arch = arch;
  m.margin = margin;
  const NetDims d(arch);
  m.params.assign(d.total, 0.0);
  auto rng = make_rng(mix_seed(seed, 0xE3B0D));
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto he_fill = [&](std::size_t off, std::size_t count, int fan_in) {
    const double stddev = std::sqrt(2.0 / fan_in);
    for (std::size_t i = 0; i < count; ++i) m.params[off + i] = stddev * gauss(rng);
  };
  he_fill(d.w1, d.b1 - d.w1, 1 * kK12 * kK12);
  he_fill(d.w2, d.b2 - d.w2, arch.c1 * kK12 * kK12);
  he_fill(d.w3, d.b3 - d.w3, arch.c2 * kK3 * kK3);
  he_fill(d.wf, d.bf - d.wf, arch.c3);
  return m;
}

void forward(const EmbedModel& model, const double* input, NetScratch& s) {
  const ArchConfig& a = model.arch;
  const NetDims d(a);
  const double* p = model.params.data();

  Eigen::Map<const Eigen::MatrixXd> x0(input, 1, std::size_t(d.n0) * d.n0);
  im2col(x0, 1, d.n0, kK12, kPad12, s.col1);
  s.z1.noalias() = MapW(p + d.w1, a.c1, kK12 * kK12) * s.col1;
  s.z1.colwise() += MapV(p + d.b1, a.c1);
  s.a1 = s.z1.cwiseMax(0.0);

  im2col(s.a1, a.c1, d.n1, kK12, kPad12, s.col2);
  s.z2.noalias() = MapW(p + d.w2, a.c2, a.c1 * kK12 * kK12) * s.col2;
  s.z2.colwise() += MapV(p + d.b2, a.c2);
  s.a2 = s.z2.cwiseMax(0.0);

  im2col(s.a2, a.c2, d.n2, kK3, kPad3, s.col3);
  s.z3.noalias() = MapW(p + d.w3, a.c3, a.c2 * kK3 * kK3) * s.col3;
  s.z3.colwise() += MapV(p + d.b3, a.c3);
  s.a3 = s.z3.cwiseMax(0.0);

  s.gap = s.a3.rowwise().mean();
  s.embedding.noalias() = MapW(p + d.wf, a.embed_dim, a.c3) * s.gap;
  s.embedding += MapV(p + d.bf, a.embed_dim);
}

void backward(const EmbedModel& model, const NetScratch& s,
              const Eigen::VectorXd& d_embedding, std::vector<double>& grad) {
  const ArchConfig& a = model.arch;
  const NetDims d(a);
  const double* p = model.params.data();
  double* g = grad.data();

  MapWMut(g + d.wf, a.embed_dim, a.c3).noalias() += d_embedding * s.gap.transpose();
  MapVMut(g + d.bf, a.embed_dim) += d_embedding;
  Eigen::VectorXd d_gap = MapW(p + d.wf, a.embed_dim, a.c3).transpose() * d_embedding;

  const double inv_spatial3 = 1.0 / (double(d.n3) * d.n3);
  Eigen::MatrixXd dz3 =
      (d_gap * inv_spatial3).replicate(1, d.n3 * d.n3).cwiseProduct(
          (s.z3.array() > 0.0).cast<double>().matrix());
  MapWMut(g + d.w3, a.c3, a.c2 * kK3 * kK3).noalias() += dz3 * s.col3.transpose();
  MapVMut(g + d.b3, a.c3) += dz3.rowwise().sum();
  Eigen::MatrixXd dcol3 = MapW(p + d.w3, a.c3, a.c2 * kK3 * kK3).transpose() * dz3;
  Eigen::MatrixXd da2;
  col2im(dcol3, a.c2, d.n2, kK3, kPad3, da2);

  Eigen::MatrixXd dz2 = da2.cwiseProduct((s.z2.array() > 0.0).cast<double>().matrix());
  MapWMut(g + d.w2, a.c2, a.c1 * kK12 * kK12).noalias() += dz2 * s.col2.transpose();
  MapVMut(g + d.b2, a.c2) += dz2.rowwise().sum();
  Eigen::MatrixXd dcol2 = MapW(p + d.w2, a.c2, a.c1 * kK12 * kK12).transpose() * dz2;
  Eigen::MatrixXd da1;
  col2im(dcol2, a.c1, d.n1, kK12, kPad12, da1);

  Eigen::MatrixXd dz1 = da1.cwiseProduct((s.z1.array() > 0.0).cast<double>().matrix());
  MapWMut(g + d.w1, a.c1, kK12 * kK12).noalias() += dz1 * s.col1.transpose();
  MapVMut(g + d.b1, a.c1) += dz1.rowwise().sum();
}

Embedding embed(const EmbedModel& model, const Raster& image) {
  if (image.size != model.arch.input_size)
    throw std::invalid_argument("embed: raster size does not match the model input");
  NetScratch s;
  forward(model, image.v.data(), s);
  return s.embedding;
}

double contrastive_loss(int label, double distance, double margin) {
  if (distance < 0 || margin <= 0)
    throw std::invalid_argument("contrastive_loss: need distance >= 0 and margin > 0");
  if (label == 0)
    return 0.5 * distance * distance;
  const double gap = std::max(0.0, margin - distance);
  return 0.5 * gap * gap;
}

}  // namespace tubeloc::classifier
