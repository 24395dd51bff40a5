// Twin-branch contrastive training with the Adam update rule.
#pragma once

#include <cstdint>
#include <vector>

#include "classifier/net.hpp"
#include "classifier/pairs.hpp"

namespace tubeloc::classifier {

struct TrainConfig {
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8;
  std::uint64_t seed = 0;  // epoch shuffling
};

struct TrainStats {
  double initial_loss = 0;  // mean pair loss before the first update
  double final_loss = 0;    // mean pair loss after the last epoch
  std::vector<double> epoch_loss;
};

// Per-pair loss and its gradient with respect to both embeddings. The
// dissimilar branch has zero gradient beyond the margin; at zero distance the
// direction is undefined and the gradient is taken as zero.
double pair_loss_and_embedding_grads(const Embedding& ea, const Embedding& eb, int label,
                                     double margin, Eigen::VectorXd* d_ea,
                                     Eigen::VectorXd* d_eb);

// Mean pair loss plus the mean parameter gradient over a batch; the workhorse
// shared by train() and the finite-difference checks. grad must be sized
// NetDims(model.arch).total and is overwritten.
double batch_loss_and_grad(const EmbedModel& model, const std::vector<PairSample>& batch,
                           std::vector<double>& grad);

// Mean pair loss only (no gradients).
double mean_pair_loss(const EmbedModel& model, const std::vector<PairSample>& pairs);

// Single-threaded deterministic mini-batch training; both branches share the
// one parameter store inside `model`. Throws std::runtime_error on a
// non-finite loss, std::invalid_argument on bad config or empty pairs.
TrainStats train(EmbedModel& model, const std::vector<PairSample>& pairs,
                 const TrainConfig& config);

}  // namespace tubeloc::classifier
