// State machine of thing Display.

public class DisplayStatechart {
    public enum State {
        Quiet,
        loop,
    }

    private final MessageSink sink;
    private State state;
    public int alarms = 0; // Int
    public int threshold = 1; // Int

    public DisplayStatechart(MessageSink sink) {
        this.sink = sink;
        enterQuiet();
    }

    public State state() {
        return state;
    }

    // statechart Panel

    private void enterQuiet() {
        state = State.Quiet;
    }

    private void enterloop() {
        state = State.loop;
    }

    /** Returns whether a transition fired. */
    public boolean receive_feed_verdict(int v) {
        switch (state) {
            case Quiet:
                // Quiet -> loop on feed?verdict
                if (v >= this.threshold && !(this.alarms > 99)) {
                    this.alarms = (int) (this.alarms + 1);
                    send_feed_alarm(this.alarms);
                    enterloop();
                    return true;
                }
                // Quiet -> Quiet on feed?verdict
                if (true) {
                    enterQuiet();
                    return true;
                }
                break;
            case loop:
                // loop -> Quiet on feed?verdict
                if (v < this.threshold) {
                    enterQuiet();
                    return true;
                }
                break;
            default:
                break;
        }
        return false;
    }

    protected void send_feed_alarm(int count) {
        sink.send("feed", "alarm", new Object[] { count });
    }
}
