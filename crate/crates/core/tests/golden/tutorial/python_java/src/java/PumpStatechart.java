// State machine of thing Pump.

public class PumpStatechart {
    public enum State {
        Idle,
        Predict,
    }

    private final MessageSink sink;
    private State state;
    public double[] vs1 = new double[4]; // Double[4]
    public double[] se = new double[2]; // Double[2]
    public int leak = 0; // Int
    public long checks = 0; // Long

    public PumpStatechart(MessageSink sink) {
        this.sink = sink;
        enterIdle();
    }

    public State state() {
        return state;
    }

    // statechart Monitor

    private void enterIdle() {
        state = State.Idle;
    }

    private void enterPredict() {
        state = State.Predict;
        this.checks = (long) (this.checks + 1);
        send_io_verdict(this.leak);
    }

    /** Returns whether a transition fired. */
    public boolean receive_io_sample() {
        switch (state) {
            case Idle:
                // Idle -> Predict on io?sample
                if (true) {
                    enterPredict();
                    return true;
                }
                break;
            case Predict:
                // Predict -> Idle on io?sample
                if (true) {
                    enterIdle();
                    return true;
                }
                break;
            default:
                break;
        }
        return false;
    }

    /** Returns whether a transition fired. */
    public boolean receive_io_alarm(int count) {
        switch (state) {
            default:
                break;
        }
        return false;
    }

    protected void send_io_verdict(int v) {
        sink.send("io", "verdict", new Object[] { v });
    }
}
