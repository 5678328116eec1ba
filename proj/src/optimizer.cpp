#include "adagrid/optimizer.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "adagrid/errors.hpp"

namespace adagrid {

namespace {
constexpr char kStateMagic[8] = {'A', 'G', 'O', 'P', 'T', 'S', 'T', '1'};
}

OptimizerState make_optimizer(const GcnParameters& params, double base_lr, double momentum,
                              double weight_decay, CosineSchedule schedule) {
    if (schedule.total_epochs < 1) throw ConfigError("make_optimizer: total_epochs must be >= 1");
    if (schedule.eta_min < 0.0 || schedule.eta_min > base_lr) {
        throw ConfigError("make_optimizer: need 0 <= eta_min <= base_lr");
    }
    OptimizerState state;
    state.base_lr = base_lr;
    state.momentum = momentum;
    state.weight_decay = weight_decay;
    state.schedule = schedule;
    state.velocity.reserve(params.layer_weights.size());
    for (const auto& w : params.layer_weights) {
        state.velocity.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    return state;
}

double lr_at(std::int64_t epoch, const OptimizerState& state) {
    const std::int64_t total = state.schedule.total_epochs;
    if (epoch < 0 || epoch > total) {
        throw std::out_of_range("lr_at: epoch " + std::to_string(epoch) +
                                " outside schedule horizon " + std::to_string(total));
    }
    const double phase = std::numbers::pi * static_cast<double>(epoch) / static_cast<double>(total);
    return state.schedule.eta_min +
           0.5 * (state.base_lr - state.schedule.eta_min) * (1.0 + std::cos(phase));
}

void step(GcnParameters& params, const std::vector<Eigen::MatrixXd>& grads, OptimizerState& state) {
    if (grads.size() != params.layer_weights.size() ||
        state.velocity.size() != params.layer_weights.size()) {
        throw ShapeError("step: gradient/velocity layer count mismatch");
    }
    const double lr = lr_at(state.epoch_cursor, state);
    for (std::size_t k = 0; k < grads.size(); ++k) {
        auto& w = params.layer_weights[k];
        const auto& g = grads[k];
        if (g.rows() != w.rows() || g.cols() != w.cols()) {
            throw ShapeError("step: gradient shape mismatch at layer " + std::to_string(k + 1));
        }
        if (!g.allFinite()) {
            throw NumericError("step: non-finite gradient at layer " + std::to_string(k + 1));
        }
        auto& v = state.velocity[k];
        v = state.momentum * v + (g + state.weight_decay * w);
        w -= lr * v;
    }
}

void save_optimizer_state(const OptimizerState& state, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open optimizer state for writing: " + path.string());
    out.write(kStateMagic, sizeof(kStateMagic));
    auto put_i64 = [&](std::int64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    auto put_f64 = [&](double v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); };
    put_f64(state.base_lr);
    put_f64(state.momentum);
    put_f64(state.weight_decay);
    put_f64(state.schedule.eta_min);
    put_i64(state.schedule.total_epochs);
    put_i64(state.epoch_cursor);
    put_i64(static_cast<std::int64_t>(state.velocity.size()));
    for (const auto& v : state.velocity) {
        put_i64(v.rows());
        put_i64(v.cols());
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            for (Eigen::Index j = 0; j < v.cols(); ++j) put_f64(v(i, j));
        }
    }
}

OptimizerState load_optimizer_state(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open optimizer state: " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || !std::equal(magic, magic + 8, kStateMagic)) {
        throw FormatError("optimizer state magic mismatch: " + path.string());
    }
    auto get_i64 = [&] {
        std::int64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        return v;
    };
    auto get_f64 = [&] {
        double v = 0.0;
        in.read(reinterpret_cast<char*>(&v), sizeof(v));
        return v;
    };
    OptimizerState state;
    state.base_lr = get_f64();
    state.momentum = get_f64();
    state.weight_decay = get_f64();
    state.schedule.eta_min = get_f64();
    state.schedule.total_epochs = get_i64();
    state.epoch_cursor = get_i64();
    const std::int64_t layers = get_i64();
    if (!in || layers < 0) throw FormatError("optimizer state malformed: " + path.string());
    for (std::int64_t k = 0; k < layers; ++k) {
        const std::int64_t rows = get_i64();
        const std::int64_t cols = get_i64();
        if (!in || rows < 1 || cols < 1) {
            throw FormatError("optimizer state malformed: " + path.string());
        }
        Eigen::MatrixXd v(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) v(i, j) = get_f64();
        }
        if (!in) throw FormatError("optimizer state truncated: " + path.string());
        state.velocity.push_back(std::move(v));
    }
    return state;
}

} // namespace adagrid
