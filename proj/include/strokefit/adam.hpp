#pragma once

#include <Eigen/Core>

#include <cmath>

#include "strokefit/errors.hpp"

namespace strokefit {

template <typename Scalar>
struct BasicAdamState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector first_moment;
  Vector second_moment;
  long step = 0;
  Scalar lr = Scalar(1);
  Scalar beta1 = Scalar(0.9);
  Scalar beta2 = Scalar(0.999);
  Scalar epsilon = Scalar(1e-8);

  BasicAdamState() = default;
  BasicAdamState(Eigen::Index size, Scalar learning_rate)
      : first_moment(Vector::Zero(size)), second_moment(Vector::Zero(size)), lr(learning_rate) {}
};

using AdamState = BasicAdamState<double>;

/// Bias-corrected Adam update of params in place.
template <typename Scalar, typename ParamDerived, typename GradDerived>
void adam_step(BasicAdamState<Scalar>& state, Eigen::MatrixBase<ParamDerived>& params,
               const Eigen::MatrixBase<GradDerived>& grads) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size())
    throw ValidationError("adam: parameter, gradient and moment sizes differ");
  ++state.step;
  state.first_moment = state.beta1 * state.first_moment + (Scalar(1) - state.beta1) * grads;
  state.second_moment = state.beta2 * state.second_moment +
                        (Scalar(1) - state.beta2) * grads.cwiseAbs2();
  using std::pow;
  const Scalar c1 = Scalar(1) - pow(state.beta1, Scalar(state.step));
  const Scalar c2 = Scalar(1) - pow(state.beta2, Scalar(state.step));
  params -= (state.lr * (state.first_moment.array() / c1) /
             ((state.second_moment.array() / c2).sqrt() + state.epsilon))
                .matrix();
}

}  // namespace strokefit
