#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "adagrid/gcn.hpp"

namespace adagrid {

/// Cosine annealing from base_lr down to eta_min over total_epochs, no restarts.
struct CosineSchedule {
    double eta_min = 0.0;
    std::int64_t total_epochs = 500;
};

/// SGD with classical momentum and L2 weight decay folded into the gradient.
/// epoch_cursor is the schedule position; the training loop advances it once
/// per epoch (step() itself leaves it untouched).
struct OptimizerState {
    std::vector<Eigen::MatrixXd> velocity;
    double base_lr = 0.1;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    CosineSchedule schedule;
    std::int64_t epoch_cursor = 0;
};

OptimizerState make_optimizer(const GcnParameters& params, double base_lr = 0.1,
                              double momentum = 0.9, double weight_decay = 5e-4,
                              CosineSchedule schedule = {});

/// eta(t) = eta_min + (base_lr - eta_min) * (1 + cos(pi t / T)) / 2.
double lr_at(std::int64_t epoch, const OptimizerState& state);

/// One SGD update at the current cursor's learning rate:
///   g = grad + weight_decay * w;  v = momentum * v + g;  w = w - eta * v.
void step(GcnParameters& params, const std::vector<Eigen::MatrixXd>& grads, OptimizerState& state);

/// Velocity + hyperparameters + cursor, binary, alongside parameter checkpoints.
void save_optimizer_state(const OptimizerState& state, const std::filesystem::path& path);
OptimizerState load_optimizer_state(const std::filesystem::path& path);

} // namespace adagrid
