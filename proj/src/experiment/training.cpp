#include <algorithm>
#include <cmath>
#include <limits>

#include "rppl/experiment.hpp"
#include "rppl/parallel.hpp"
#include "rppl/rng.hpp"

namespace rppl {

FoldIndices make_folds(const std::vector<PathProfileTensor>& samples, const std::string& holdout,
                       double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must be in (0, 1)");

  FoldIndices folds;
  std::vector<size_t> rest;
  for (size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].link.region_id == holdout)
      folds.test.push_back(i);
    else
      rest.push_back(i);
  }
  if (folds.test.empty()) throw DomainError("unknown holdout region '" + holdout + "'");
  if (rest.empty()) throw DomainError("no samples left outside holdout '" + holdout + "'");

  Rng rng(derive_seed(seed, "split"));
  for (size_t k = 0; k + 1 < rest.size(); ++k) {
    const size_t pick = k + rng.uniform_index(rest.size() - k);
    std::swap(rest[k], rest[pick]);
  }
  const size_t n_train = std::max<size_t>(
      1, std::min(rest.size() - 1,
                  static_cast<size_t>(std::llround(train_fraction * static_cast<double>(rest.size())))));
  folds.train.assign(rest.begin(), rest.begin() + n_train);
  folds.val.assign(rest.begin() + n_train, rest.end());
  return folds;
}

namespace {

/// Gradients for one micro-chunk of a batch. The backward seed scales the
/// chunk MSE so that summing chunk gradients reproduces the full-batch MSE
/// gradient exactly: d(MSE_batch)/dp = sum_c (B_c/B) d(MSE_chunk)/dp.
struct ChunkResult {
  std::vector<nn::Tensor> grads;  // parameter order
  double sq_error_sum = 0.0;
};

ChunkResult run_chunk(const nn::CnnModel& model, const std::vector<PathProfileTensor>& data,
                      const std::vector<size_t>& order, size_t begin, size_t end,
                      size_t batch_size) {
  nn::Tape tape;
  std::vector<nn::Tape::Var> preds;
  std::vector<float> targets;
  preds.reserve(end - begin);
  targets.reserve(end - begin);
  for (size_t k = begin; k < end; ++k) {
    const PathProfileTensor& sample = data[order[k]];
    auto input = tape.input(profile_to_input(sample));
    preds.push_back(model.forward(tape, input));
    targets.push_back(static_cast<float>(sample.link.path_loss_db));
  }
  auto loss = tape.mse(preds, targets);

  ChunkResult result;
  const double chunk_mse = static_cast<double>(tape.value(loss)[0]);
  result.sq_error_sum = chunk_mse * static_cast<double>(end - begin);

  const float seed =
      static_cast<float>(static_cast<double>(end - begin) / static_cast<double>(batch_size));
  tape.backward(loss, seed);
  result.grads.reserve(model.params().tensors.size());
  for (const auto& [name, t] : model.params().tensors) result.grads.push_back(tape.grad_of(&t));
  return result;
}

constexpr size_t kMicroChunk = 8;

}  // namespace

TrainOutcome train_model(const nn::ModelConfig& model_cfg, const TrainingConfig& train_cfg,
                         const std::vector<PathProfileTensor>& train_set,
                         const std::vector<PathProfileTensor>& val_set, std::uint64_t seed,
                         int jobs) {
  model_cfg.validate();
  train_cfg.validate();
  if (train_set.empty()) throw ConfigError("training set is empty");
  if (val_set.empty()) throw ConfigError("validation set is empty");

  nn::CnnModel model(model_cfg, nn::init_params(model_cfg, derive_seed(seed, "model-init")));
  auto optim = nn::AdamState::make(model.params(), train_cfg.learning_rate);

  std::vector<float> val_targets(val_set.size());
  for (size_t i = 0; i < val_set.size(); ++i)
    val_targets[i] = static_cast<float>(val_set[i].link.path_loss_db);

  TrainOutcome outcome;
  outcome.params = model.params();
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;

  std::vector<size_t> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  const size_t n_params = model.params().tensors.size();

  for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed(seed, "batch-order", static_cast<std::uint64_t>(epoch)));
    for (size_t k = 0; k + 1 < order.size(); ++k) {
      const size_t pick = k + shuffle_rng.uniform_index(order.size() - k);
      std::swap(order[k], order[pick]);
    }

    double epoch_sq_sum = 0.0;
    for (size_t batch_begin = 0; batch_begin < order.size();
         batch_begin += static_cast<size_t>(train_cfg.batch_size)) {
      const size_t batch_end =
          std::min(order.size(), batch_begin + static_cast<size_t>(train_cfg.batch_size));
      const size_t batch = batch_end - batch_begin;
      const size_t n_chunks = (batch + kMicroChunk - 1) / kMicroChunk;

      std::vector<ChunkResult> chunks(n_chunks);
      parallel_chunks(n_chunks, jobs, [&](size_t cb, size_t ce) {
        for (size_t c = cb; c < ce; ++c) {
          const size_t begin = batch_begin + c * kMicroChunk;
          const size_t end = std::min(batch_end, begin + kMicroChunk);
          chunks[c] = run_chunk(model, train_set, order, begin, end, batch);
        }
      });

      // Fixed micro-chunk boundaries + in-order reduction: the summed
      // gradient is identical for any worker count.
      std::vector<nn::Tensor> grads;
      grads.reserve(n_params);
      for (size_t p = 0; p < n_params; ++p) grads.push_back(std::move(chunks[0].grads[p]));
      for (size_t c = 1; c < n_chunks; ++c)
        for (size_t p = 0; p < n_params; ++p) {
          nn::Tensor& dst = grads[p];
          const nn::Tensor& src = chunks[c].grads[p];
          for (size_t k = 0; k < dst.numel(); ++k) dst[k] += src[k];
        }
      for (const auto& c : chunks) epoch_sq_sum += c.sq_error_sum;

      nn::adam_step(model.params(), grads, optim);
    }
    outcome.history.train_mse.push_back(epoch_sq_sum / static_cast<double>(train_set.size()));

    const std::vector<double> val_preds = predict_all(model, val_set, jobs);
    double val_sq = 0.0;
    for (size_t i = 0; i < val_preds.size(); ++i) {
      const double d = val_preds[i] - static_cast<double>(val_targets[i]);
      val_sq += d * d;
    }
    const double val_mse = val_sq / static_cast<double>(val_set.size());
    outcome.history.val_mse.push_back(val_mse);

    const double val_rmse = std::sqrt(val_mse);
    if (val_rmse < best_val) {
      best_val = val_rmse;
      outcome.history.best_epoch = epoch;
      outcome.params = model.params();
      since_best = 0;
    } else if (++since_best > train_cfg.early_stop_patience) {
      break;
    }
  }
  return outcome;
}

}  // namespace rppl
