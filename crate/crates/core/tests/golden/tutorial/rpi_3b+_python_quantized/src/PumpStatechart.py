"""State machine of thing Pump."""


class PumpStatechart:
    """Run-to-completion state machine. Each receive_* method handles one
    incoming message: the first enabled transition leaving the current state
    fires, then the target state's entry actions run. It returns whether a
    transition fired."""

    def __init__(self, sink=None):
        # sink(port, message, args) receives every outgoing message.
        self._sink = sink
        self.vs1 = [0.0] * 4  # Double[4]
        self.se = [0.0] * 2  # Double[2]
        self.leak = 0  # Int
        self.checks = 0  # Long
        self._state = None
        self._enter_Idle()

    @property
    def state(self):
        return self._state

    # statechart Monitor

    def _enter_Idle(self):
        self._state = "Idle"

    def _enter_Predict(self):
        self._state = "Predict"
        self.checks = self.checks + 1
        self.send_io_verdict(self.leak)

    def receive_io_sample(self):
        if self._state == "Idle":
            # Idle -> Predict on io?sample
            if True:
                self._enter_Predict()
                return True
        if self._state == "Predict":
            # Predict -> Idle on io?sample
            if True:
                self._enter_Idle()
                return True
        return False

    def receive_io_alarm(self, count):
        return False

    def send_io_verdict(self, v):
        if self._sink is not None:
            self._sink("io", "verdict", [v])
