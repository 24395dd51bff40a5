#include "classifier/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "core/rng.hpp"

namespace tubeloc::classifier {

double pair_loss_and_embedding_grads(const Embedding& ea, const Embedding& eb, int label,
                                     double margin, Eigen::VectorXd* d_ea,
                                     Eigen::VectorXd* d_eb) {
  const Eigen::VectorXd diff = ea - eb;
  const double dist = diff.norm();
  const double loss = contrastive_loss(label, dist, margin);
  if (label == 0) {
    *d_ea = diff;
    *d_eb = -diff;
  } else if (dist < margin && dist > 1e-12) {
    const double scale = -(margin - dist) / dist;
    *d_ea = scale * diff;
    *d_eb = -scale * diff;
  } else {
    d_ea->setZero(ea.size());
    d_eb->setZero(eb.size());
  }
  return loss;
}

double batch_loss_and_grad(const EmbedModel& model, const std::vector<PairSample>& batch,
                           std::vector<double>& grad) {
  const NetDims dims(model.arch);
  grad.assign(dims.total, 0.0);
  NetScratch sa, sb;
  Eigen::VectorXd d_ea, d_eb;
  double loss_sum = 0;
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (const PairSample& p : batch) {
    forward(model, p.image_a->v.data(), sa);
    forward(model, p.image_b->v.data(), sb);
    loss_sum += pair_loss_and_embedding_grads(sa.embedding, sb.embedding, p.label, model.margin,
                                              &d_ea, &d_eb);
    d_ea *= inv_n;
    d_eb *= inv_n;
    backward(model, sa, d_ea, grad);
    backward(model, sb, d_eb, grad);
  }
  return loss_sum * inv_n;
}

double mean_pair_loss(const EmbedModel& model, const std::vector<PairSample>& pairs) {
  NetScratch sa, sb;
  double loss_sum = 0;
  for (const PairSample& p : pairs) {
    forward(model, p.image_a->v.data(), sa);
    forward(model, p.image_b->v.data(), sb);
    loss_sum += contrastive_loss(p.label, (sa.embedding - sb.embedding).norm(), model.margin);
  }
  return loss_sum / static_cast<double>(pairs.size());
}

TrainStats train(EmbedModel& model, const std::vector<PairSample>& pairs,
                 const TrainConfig& config) {
  if (config.epochs < 1 || config.batch_size < 1 || config.learning_rate <= 0)
    throw std::invalid_argument("train: invalid config");
  if (pairs.empty())
    throw std::invalid_argument("train: no pairs");

  const NetDims dims(model.arch);
  std::vector<double> grad(dims.total, 0.0);
  std::vector<double> adam_m(dims.total, 0.0), adam_v(dims.total, 0.0);
  double beta1_t = 1.0, beta2_t = 1.0;

  TrainStats stats;
  stats.initial_loss = mean_pair_loss(model, pairs);

  std::vector<int> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(mix_seed(config.seed, 0x5813));

  std::vector<PairSample> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    int n_batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      batch.clear();
      for (std::size_t i = start; i < end; ++i) batch.push_back(pairs[order[i]]);
      const double loss = batch_loss_and_grad(model, batch, grad);
      if (!std::isfinite(loss))
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(n_batches));
      epoch_loss += loss;
      ++n_batches;

      beta1_t *= config.beta1;
      beta2_t *= config.beta2;
      const double correction =
          config.learning_rate * std::sqrt(1.0 - beta2_t) / (1.0 - beta1_t);
      for (std::size_t i = 0; i < dims.total; ++i) {
        adam_m[i] = config.beta1 * adam_m[i] + (1.0 - config.beta1) * grad[i];
        adam_v[i] = config.beta2 * adam_v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
        model.params[i] -= correction * adam_m[i] / (std::sqrt(adam_v[i]) + config.epsilon);
      }
    }
    stats.epoch_loss.push_back(epoch_loss / n_batches);
  }
  stats.final_loss = mean_pair_loss(model, pairs);
  return stats;
}

}  // namespace tubeloc::classifier
