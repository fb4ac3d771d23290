#include "wncs/estimation.hpp"

namespace wncs {

SensorFilterState make_sensor_state(const LoopSpec& loop) {
  SensorFilterState state;
  state.x_pred = loop.x0_mean;
  state.x_post = Vec::Zero(loop.state_dim());
  state.e_check = Vec::Zero(loop.state_dim());
  return state;
}

void sensor_measurement_update(SensorFilterState& state, const Vec& y,
                               const LoopSpec& loop,
                               const LoopSynthesis& synth) {
  const Vec innovation = y - loop.C * state.x_pred;
  const Vec correction = synth.K_gain * innovation;
  state.x_post = state.x_pred + correction;
  state.e_check = loop.A * state.e_check + correction;
}

void sensor_time_update(SensorFilterState& state, const Vec& u,
                        const LoopSpec& loop) {
  state.x_pred = loop.A * state.x_post + loop.B * u;
}

void reset_innovation(SensorFilterState& state) {
  state.e_check.setZero();
}

ControllerState make_controller_state(const LoopSpec& loop) {
  ControllerState state;
  state.last_rx = loop.x0_mean;
  state.x_hat = loop.x0_mean;
  state.t_since = 0;
  return state;
}

void controller_on_receive(ControllerState& state, const Vec& x_sensor_post) {
  state.last_rx = x_sensor_post;
  state.x_hat = x_sensor_post;
  state.t_since = 0;
}

void controller_miss(ControllerState& state, const LoopSpec& loop,
                     const LoopSynthesis& synth) {
  state.x_hat = (loop.A + loop.B * synth.L_inf) * state.x_hat;
  state.t_since += 1;
}

ControllerPrediction controller_predict(const ControllerState& state,
                                        const LoopSpec& loop,
                                        const LoopSynthesis& synth) {
  ControllerPrediction out;
  out.x_hat =
      mat_power(loop.A + loop.B * synth.L_inf, state.t_since) * state.last_rx;
  out.cov = cov_propagate(synth.P_bar, state.t_since, loop.A, loop.W);
  return out;
}

}  // namespace wncs
