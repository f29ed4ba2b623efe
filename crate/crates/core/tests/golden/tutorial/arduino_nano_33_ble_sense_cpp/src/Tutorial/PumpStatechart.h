// State machine of thing Pump.
#pragma once

#include <Arduino.h>
#include <stdint.h>

class PumpStatechart {
 public:
  enum class State : uint8_t {
    Idle,
    Predict,
  };

  double vs1[4] = {};  // Double[4]
  double se[2] = {};  // Double[2]
  int32_t leak = 0;  // Int
  int64_t checks = 0;  // Long

  // Enters the initial state and runs its entry actions.
  void start() {
    enter_Idle();
  }

  State state() const { return state_; }

  // Returns whether a transition fired.
  bool receive_io_sample() {
    switch (state_) {
      case State::Idle:
        // Idle -> Predict on io?sample
        if (true) {
          enter_Predict();
          return true;
        }
        break;
      case State::Predict:
        // Predict -> Idle on io?sample
        if (true) {
          enter_Idle();
          return true;
        }
        break;
      default:
        break;
    }
    return false;
  }

  // Returns whether a transition fired.
  bool receive_io_alarm(int32_t count) {
    switch (state_) {
      default:
        break;
    }
    return false;
  }

 private:
  State state_ = State::Idle;

  void enter_Idle() {
    state_ = State::Idle;
  }

  void enter_Predict() {
    state_ = State::Predict;
    this->checks = static_cast<int64_t>(this->checks + 1);
    send_io_verdict(this->leak);
  }

  void send_io_verdict(int32_t v) {
    Serial.print("io");
    Serial.print("!");
    Serial.print("verdict");
    Serial.print(" ");
    Serial.print(v);
    Serial.println();
  }
};
