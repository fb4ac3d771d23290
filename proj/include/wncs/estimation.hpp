#pragma once

#include "wncs/scenario.hpp"
#include "wncs/synthesis.hpp"

namespace wncs {

/**
 * Sensor-side steady-state Kalman filter. Besides the usual predicted and
 * posterior means it carries e_check, the innovation accumulator: the gap
 * x_post - x_hat_controller that would close if this slot's packet were
 * delivered. It follows e <- A e + K nu per measurement and resets to zero
 * on a confirmed delivery (the sensor sees the instantaneous ACK).
 */
struct SensorFilterState {
  Vec x_pred;
  Vec x_post;
  Vec e_check;
};

SensorFilterState make_sensor_state(const LoopSpec& loop);

// Measurement update: x_post = x_pred + K(y - C x_pred), and the
// accumulator step e_check = A e_check + K(y - C x_pred).
void sensor_measurement_update(SensorFilterState& state, const Vec& y,
                               const LoopSpec& loop,
                               const LoopSynthesis& synth);

// Time update with the input actually applied: x_pred = A x_post + B u.
void sensor_time_update(SensorFilterState& state, const Vec& u,
                        const LoopSpec& loop);

// Called when this loop's packet was delivered this slot.
void reset_innovation(SensorFilterState& state);

/**
 * Controller-side state. Between receptions the estimate coasts through the
 * closed-loop map: x_hat <- (A + B L) x_hat, since the controller applies
 * u = L x_hat to the plant it models. t_since counts slots since the last
 * reception (0 in a slot with a delivery).
 */
struct ControllerState {
  Vec last_rx;
  Vec x_hat;
  long t_since = 0;
};

ControllerState make_controller_state(const LoopSpec& loop);

void controller_on_receive(ControllerState& state, const Vec& x_sensor_post);

// A slot without a delivery for this loop.
void controller_miss(ControllerState& state, const LoopSpec& loop,
                     const LoopSynthesis& synth);

struct ControllerPrediction {
  Vec x_hat;  // (A + B L)^t_since last_rx
  Mat cov;    // h^t_since(P_bar)
};

// Closed-form restatement of the coasting recursion, from last_rx alone.
ControllerPrediction controller_predict(const ControllerState& state,
                                        const LoopSpec& loop,
                                        const LoopSynthesis& synth);

}  // namespace wncs
