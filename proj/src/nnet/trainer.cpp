#include "api2com/nnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace api2com::nnet {

bool PlateauSchedule::observe(double valid_loss) {
  if (!has_best_ || valid_loss < best_) {
    best_ = valid_loss;
    has_best_ = true;
    bad_epochs_ = 0;
    return true;
  }
  if (++bad_epochs_ >= patience_) {
    lr_ /= 2;
    ++decays_;
    bad_epochs_ = 0;
  }
  return false;
}

double mean_loss(const Model& model, const std::vector<Example>& data) {
  double total = 0;
  std::size_t tokens = 0;
  for (const auto& ex : data) {
    G g(false);
    Ctx c{g};
    std::size_t n = 0;
    total += g.value(model.loss(c, ex, &n))(0, 0);
    tokens += n;
  }
  return tokens ? total / static_cast<double>(tokens) : 0.0;
}

namespace {

std::vector<Matrix> snapshot(const ParamStore& s) {
  std::vector<Matrix> out;
  out.reserve(s.all().size());
  for (const auto& p : s.all()) out.push_back(p->value);
  return out;
}

void restore(ParamStore& s, const std::vector<Matrix>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) s.all()[i]->value = values[i];
}

}  // namespace

TrainResult train(Model& model, const std::vector<Example>& train_set, const std::vector<Example>& valid_set,
                  const TrainOptions& options) {
  if (train_set.empty()) throw std::invalid_argument("training set is empty");
  if (valid_set.empty()) throw std::invalid_argument("validation set is empty");
  const ModelConfig& cfg = model.config();
  Rng rng(cfg.seed ^ 0x5eedULL);
  PlateauSchedule schedule(cfg.lr0, cfg.patience, cfg.lr_floor);
  ParamStore& params = model.params();

  TrainResult result;
  std::vector<Matrix> best = snapshot(params);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = static_cast<std::size_t>(cfg.batch_size);

  result.stop_reason = "max_epochs";
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    const double lr = schedule.lr();
    double epoch_loss = 0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      params.zero_grad();
      double batch_loss = 0;
      std::size_t batch_tokens = 0;
      for (std::size_t i = start; i < std::min(order.size(), start + batch); ++i) {
        G g;
        Ctx c{g, true, cfg.dropout, &rng};
        std::size_t n = 0;
        Var l = model.loss(c, train_set[order[i]], &n);
        batch_loss += g.value(l)(0, 0);
        batch_tokens += n;
        g.backward(l);
      }
      if (!std::isfinite(batch_loss)) {
        std::ostringstream msg;
        msg << "loss became " << batch_loss << " in epoch " << epoch << " (lr " << lr << ", batch starting at "
            << start << ")";
        throw TrainingDiverged(msg.str());
      }
      if (batch_tokens == 0) continue;
      const double inv = 1.0 / static_cast<double>(batch_tokens);
      double scale = inv;
      if (cfg.clip_norm > 0) {
        double sq = 0;
        for (const auto& p : params.all()) sq += p->grad.squaredNorm();
        const double norm = std::sqrt(sq) * inv;
        if (norm > cfg.clip_norm) scale *= cfg.clip_norm / norm;
      }
      for (auto& p : params.all()) p->value.noalias() -= (lr * scale) * p->grad;
      epoch_loss += batch_loss;
      epoch_tokens += batch_tokens;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr;
    stats.train_loss = epoch_tokens ? epoch_loss / static_cast<double>(epoch_tokens) : 0.0;
    stats.valid_loss = mean_loss(model, valid_set);
    if (options.valid_override) stats.valid_loss = options.valid_override(epoch, stats.valid_loss);
    if (!std::isfinite(stats.valid_loss)) {
      throw TrainingDiverged("validation loss became " + std::to_string(stats.valid_loss) + " in epoch " +
                             std::to_string(epoch));
    }
    result.history.push_back(stats);
    if (options.on_epoch) options.on_epoch(stats);

    if (schedule.observe(stats.valid_loss)) {
      result.best_valid_loss = stats.valid_loss;
      result.best_epoch = epoch;
      best = snapshot(params);
    }
    if (schedule.exhausted()) {
      result.stop_reason = "lr_floor";
      break;
    }
    if (options.stop_when && options.stop_when(stats)) {
      result.stop_reason = "stop_when";
      break;
    }
  }
  restore(params, best);
  return result;
}

}  // namespace api2com::nnet
