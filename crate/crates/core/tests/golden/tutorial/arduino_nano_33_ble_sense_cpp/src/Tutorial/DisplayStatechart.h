// State machine of thing Display.
#pragma once

#include <Arduino.h>
#include <stdint.h>

class DisplayStatechart {
 public:
  enum class State : uint8_t {
    Quiet,
    loop_,
  };

  int32_t alarms = 0;  // Int
  int32_t threshold = 1;  // Int

  // Enters the initial state and runs its entry actions.
  void start() {
    enter_Quiet();
  }

  State state() const { return state_; }

  // Returns whether a transition fired.
  bool receive_feed_verdict(int32_t v) {
    switch (state_) {
      case State::Quiet:
        // Quiet -> loop on feed?verdict
        if (v >= this->threshold && !(this->alarms > 99)) {
          this->alarms = static_cast<int32_t>(this->alarms + 1);
          send_feed_alarm(this->alarms);
          enter_loop_();
          return true;
        }
        // Quiet -> Quiet on feed?verdict
        if (true) {
          enter_Quiet();
          return true;
        }
        break;
      case State::loop_:
        // loop -> Quiet on feed?verdict
        if (v < this->threshold) {
          enter_Quiet();
          return true;
        }
        break;
      default:
        break;
    }
    return false;
  }

 private:
  State state_ = State::Quiet;

  void enter_Quiet() {
    state_ = State::Quiet;
  }

  void enter_loop_() {
    state_ = State::loop_;
  }

  void send_feed_alarm(int32_t count) {
    Serial.print("feed");
    Serial.print("!");
    Serial.print("alarm");
    Serial.print(" ");
    Serial.print(count);
    Serial.println();
  }
};
