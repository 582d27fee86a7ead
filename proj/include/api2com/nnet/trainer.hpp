#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "api2com/nnet/model.hpp"

namespace api2com::nnet {

/// Halves the rate after `patience` consecutive epochs without a new best
/// validation loss.
class PlateauSchedule {
 public:
  PlateauSchedule(double lr0, int patience, double floor) : lr_(lr0), patience_(patience), floor_(floor) {}

  /// Records one validation loss; returns true when it is a new best.
  bool observe(double valid_loss);
  double lr() const { return lr_; }
  int decays() const { return decays_; }
  /// True once the rate has fallen below the floor.
  bool exhausted() const { return lr_ < floor_; }

 private:
  double lr_;
  int patience_;
  double floor_;
  double best_ = 0;
  bool has_best_ = false;
  int bad_epochs_ = 0;
  int decays_ = 0;
};

struct EpochStats {
  int epoch = 0;  // 1-based
  double train_loss = 0;
  double valid_loss = 0;
  double lr = 0;  // rate used during this epoch
};

struct TrainOptions {
  std::function<void(const EpochStats&)> on_epoch;
  /// Replaces the measured validation loss (used to exercise the schedule).
  std::function<double(int epoch, double measured)> valid_override;
  /// Checked at the end of every epoch with the current parameters; true
  /// ends training (the best-validation parameters are still restored).
  std::function<bool(const EpochStats&)> stop_when;
};

struct TrainResult {
  std::vector<EpochStats> history;
  double best_valid_loss = 0;
  int best_epoch = 0;
  std::string stop_reason;  // "max_epochs", "lr_floor" or "stop_when"
};

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean per-token cross-entropy, dropout off.
double mean_loss(const Model& model, const std::vector<Example>& data);

/// Plain SGD on mean token cross-entropy per batch, shuffled each epoch from
/// the config seed. The model ends with the parameters of the best
/// validation epoch.
TrainResult train(Model& model, const std::vector<Example>& train_set, const std::vector<Example>& valid_set,
                  const TrainOptions& options = {});

}  // namespace api2com::nnet
