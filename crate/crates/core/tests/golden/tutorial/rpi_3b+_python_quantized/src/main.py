"""Configuration Tutorial for Raspberry Pi 3 Model B+ (Python, quantized)."""

import os
import sys

import numpy as np

import mlq
from PumpStatechart import PumpStatechart
from DisplayStatechart import DisplayStatechart

HERE = os.path.dirname(os.path.abspath(__file__))
MODEL_PATH = os.path.join(HERE, "..", "model", "model.mlq")
STANDARDIZER_PATH = os.path.join(HERE, "..", "model", "standardizer.csv")
# int8 weights with one scale and zero point per layer
QUANTIZED = True

# Feature properties of Pump in input order: (name, column count, shape).
FEATURES = [
    ("vs1", 4, (4,)),
    ("se", 2, (2,)),
]


class Inference:
    def __init__(self):
        self.model = mlq.load(MODEL_PATH)
        if self.model.quantized != QUANTIZED:
            raise ValueError(f"{MODEL_PATH}: expected a {'quantized' if QUANTIZED else 'float'} model")
        self.mean, self.std = mlq.load_standardizer(STANDARDIZER_PATH)

    def features(self, machine):
        parts = [np.ravel(np.asarray(getattr(machine, name), dtype=np.float64)) for name, _, _ in FEATURES]
        return np.concatenate(parts)

    def __call__(self, machine):
        """Classifies the current feature properties of `machine`."""
        x = ((self.features(machine) - self.mean) / self.std).astype(np.float32)
        result = self.model.predict(x)
        machine.leak = result
        return result


def assign_features(machine, row):
    """Spreads one dataset row over the feature properties."""
    k = 0
    for name, width, shape in FEATURES:
        chunk = np.asarray(row[k : k + width], dtype=np.float64)
        setattr(machine, name, chunk.reshape(shape).tolist() if shape else float(chunk[0]))
        k += width


# Connected ports, both directions: (instance, port) -> (instance, port).
CONNECTORS = {
    ("pump", "io"): ("panel", "feed"),
    ("panel", "feed"): ("pump", "io"),
}

machines = {}


def make_sink(instance):
    """Delivers a sent message to the connected peer, or prints it."""

    def sink(port, message, args):
        peer = CONNECTORS.get((instance, port))
        if peer is not None:
            handler = getattr(machines.get(peer[0]), f"receive_{peer[1]}_{message}", None)
            if handler is not None:
                handler(*args)
                return
        print(f"{instance}.{port}!{message} {args}")

    return sink


def main():
    machines["pump"] = PumpStatechart(make_sink("pump"))
    machines["panel"] = DisplayStatechart(make_sink("panel"))
    infer = Inference()
    if len(sys.argv) == 2:
        machine = machines["pump"]
        table = np.loadtxt(sys.argv[1], delimiter=",", skiprows=1, ndmin=2)
        print("row,class")
        for i, row in enumerate(table):
            assign_features(machine, row)
            print(f"{i},{infer(machine)}")
    return machines


if __name__ == "__main__":
    main()
