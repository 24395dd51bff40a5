// Small convolutional embedding network, written from scratch with explicit
// forward/backward passes. Three stride-2 convolutions, global average pool,
// and a fully connected head; all parameters live in one flat store so the
// twin branches share weights by construction.
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "classifier/preprocess.hpp"

namespace tubeloc::classifier {

using Embedding = Eigen::VectorXd;

struct ArchConfig {
  int input_size = 64;
  int c1 = 8, c2 = 16, c3 = 32;  // conv channels: 5x5/2, 5x5/2, 3x3/2
  int embed_dim = 128;

  bool operator==(const ArchConfig&) const = default;
};

// Spatial sizes and parameter offsets derived from an ArchConfig.
struct NetDims {
  int n0, n1, n2, n3;                  // input and per-conv output sizes
  std::size_t w1, b1, w2, b2, w3, b3;  // offsets into the parameter store
  std::size_t wf, bf, total;

  explicit NetDims(const ArchConfig& a);
};

struct EmbedModel {
  ArchConfig arch;
  double margin = 1.0;
  std::vector<double> params;  // single parameter store shared by both branches
};

// He-style seeded initialization (biases zero).
EmbedModel make_model(const ArchConfig& arch, double margin, std::uint64_t seed);

// Per-branch activation buffers, reusable across calls.
struct NetScratch {
  Eigen::MatrixXd col1, z1, a1;
  Eigen::MatrixXd col2, z2, a2;
  Eigen::MatrixXd col3, z3, a3;
  Eigen::VectorXd gap;
  Embedding embedding;
};

// Forward pass; input must hold arch.input_size^2 values.
void forward(const EmbedModel& model, const double* input, NetScratch& s);

// Accumulates parameter gradients for d(loss)/d(embedding) into grad
// (size NetDims::total), reusing the activations recorded by forward().
void backward(const EmbedModel& model, const NetScratch& s,
              const Eigen::VectorXd& d_embedding, std::vector<double>& grad);

// Convenience wrapper: preprocessed raster in, embedding out.
// Throws std::invalid_argument when the raster does not match the model input.
Embedding embed(const EmbedModel& model, const Raster& image);

// Contrastive loss on an embedding distance d >= 0:
//   (1 - x) * d^2 / 2 + x * max(0, margin - d)^2 / 2
// with x = 0 for similar pairs and x = 1 for dissimilar ones. Continuous in d,
// including at d == margin.
double contrastive_loss(int label, double distance, double margin);

}  // namespace tubeloc::classifier
