// Outgoing messages of the generated state machines in configuration Tutorial.

public interface MessageSink {
    void send(String port, String message, Object[] args);
}
