#include <doctest.h>

#include <stdexcept>

#include "adagrid/errors.hpp"
#include "adagrid/optimizer.hpp"
#include "support/synthetic.hpp"

using namespace adagrid;

namespace {

GcnParameters scalar_params(double value) {
    GcnParameters params;
    params.layer_weights.push_back(Eigen::MatrixXd::Constant(1, 1, value));
    return params;
}

} // namespace

TEST_CASE("cosine schedule hits its anchor points") {
    const GcnParameters params = scalar_params(1.0);
    const OptimizerState state = make_optimizer(params, 0.1, 0.9, 5e-4, CosineSchedule{0.0, 500});
    CHECK(lr_at(0, state) == doctest::Approx(0.1));
    CHECK(lr_at(250, state) == doctest::Approx(0.05));
    CHECK(lr_at(500, state) == doctest::Approx(0.0).epsilon(1e-15));

    double previous = lr_at(0, state);
    for (std::int64_t t = 1; t <= 500; ++t) {
        const double lr = lr_at(t, state);
        CHECK(lr <= previous + 1e-15);
        previous = lr;
    }
    CHECK_THROWS_AS(lr_at(501, state), std::out_of_range);
    CHECK_THROWS_AS(lr_at(-1, state), std::out_of_range);
}

TEST_CASE("plain SGD step without momentum or decay") {
    GcnParameters params = scalar_params(1.0);
    OptimizerState state = make_optimizer(params, 0.1, 0.0, 0.0, CosineSchedule{0.1, 100});
    // eta_min == base_lr keeps the rate at exactly 0.1 regardless of cursor.
    std::vector<Eigen::MatrixXd> grads{Eigen::MatrixXd::Constant(1, 1, 1.0)};
    step(params, grads, state);
    CHECK(params.layer_weights[0](0, 0) == doctest::Approx(0.9));
}

TEST_CASE("zero gradient with zero velocity is a fixed point") {
    GcnParameters params = scalar_params(2.5);
    OptimizerState state = make_optimizer(params, 0.1, 0.9, 0.0, CosineSchedule{0.0, 10});
    std::vector<Eigen::MatrixXd> grads{Eigen::MatrixXd::Zero(1, 1)};
    step(params, grads, state);
    CHECK(params.layer_weights[0](0, 0) == 2.5);
}

TEST_CASE("momentum accumulates across steps") {
    GcnParameters params = scalar_params(1.0);
    OptimizerState state = make_optimizer(params, 0.1, 0.9, 0.0, CosineSchedule{0.1, 100});
    std::vector<Eigen::MatrixXd> grads{Eigen::MatrixXd::Constant(1, 1, 1.0)};
    step(params, grads, state); // v = 1,   w = 1 - 0.1
    CHECK(params.layer_weights[0](0, 0) == doctest::Approx(0.9));
    step(params, grads, state); // v = 1.9, w = 0.9 - 0.19
    CHECK(params.layer_weights[0](0, 0) == doctest::Approx(0.71));
}

TEST_CASE("weight decay folds into the gradient") {
    GcnParameters params = scalar_params(10.0);
    OptimizerState state = make_optimizer(params, 0.1, 0.0, 0.5, CosineSchedule{0.1, 10});
    std::vector<Eigen::MatrixXd> grads{Eigen::MatrixXd::Zero(1, 1)};
    step(params, grads, state); // g = 0 + 0.5*10 = 5; w = 10 - 0.5
    CHECK(params.layer_weights[0](0, 0) == doctest::Approx(9.5));
}

TEST_CASE("step rejects bad gradients") {
    GcnParameters params = scalar_params(1.0);
    OptimizerState state = make_optimizer(params);
    std::vector<Eigen::MatrixXd> nan_grads{
        Eigen::MatrixXd::Constant(1, 1, std::numeric_limits<double>::quiet_NaN())};
    CHECK_THROWS_AS(step(params, nan_grads, state), NumericError);

    std::vector<Eigen::MatrixXd> wrong_shape{Eigen::MatrixXd::Zero(2, 2)};
    CHECK_THROWS_AS(step(params, wrong_shape, state), ShapeError);
}

TEST_CASE("copied optimizer state evolves independently") {
    GcnParameters params_a = scalar_params(1.0);
    OptimizerState state_a = make_optimizer(params_a, 0.1, 0.9, 0.0, CosineSchedule{0.1, 10});
    GcnParameters params_b = params_a;
    OptimizerState state_b = state_a;

    std::vector<Eigen::MatrixXd> grads{Eigen::MatrixXd::Constant(1, 1, 1.0)};
    step(params_a, grads, state_a);
    CHECK(state_a.velocity[0](0, 0) == doctest::Approx(1.0));
    CHECK(state_b.velocity[0](0, 0) == 0.0);
    CHECK(params_b.layer_weights[0](0, 0) == 1.0);
}

TEST_CASE("optimizer state round-trips through its binary file") {
    GcnParameters params = scalar_params(1.0);
    OptimizerState state = make_optimizer(params, 0.2, 0.8, 1e-3, CosineSchedule{0.01, 42});
    std::vector<Eigen::MatrixXd> grads{Eigen::MatrixXd::Constant(1, 1, 0.5)};
    step(params, grads, state);
    state.epoch_cursor = 7;

    const auto dir = testing::make_temp_dir("opt");
    save_optimizer_state(state, dir / "opt.bin");
    const OptimizerState loaded = load_optimizer_state(dir / "opt.bin");
    CHECK(loaded.base_lr == state.base_lr);
    CHECK(loaded.momentum == state.momentum);
    CHECK(loaded.weight_decay == state.weight_decay);
    CHECK(loaded.schedule.eta_min == state.schedule.eta_min);
    CHECK(loaded.schedule.total_epochs == state.schedule.total_epochs);
    CHECK(loaded.epoch_cursor == state.epoch_cursor);
    CHECK(loaded.velocity[0] == state.velocity[0]);
}
