"""Reader and writer for .mlq model files, and the inference routine.

Layout, little-endian: b"MLQ1", version u8, dtype u8 (0 float32, 1 int8),
layer count u16; per layer: in u32, out u32, activation u8 (0 linear,
1 relu, 2 sigmoid); float32 layers then hold weights f32[out*in] row-major
and biases f32[out]; int8 layers hold scale f32, zero point i32, weights
i8[out*in] and biases f32[out]. An int8 weight q stands for scale * (q - zero).
"""

import struct

import numpy as np

MAGIC = b"MLQ1"
VERSION = 1
ACTIVATIONS = {0: "linear", 1: "relu", 2: "sigmoid"}
CODES = {name: code for code, name in ACTIVATIONS.items()}


class Layer:
    def __init__(self, weights, biases, activation, scale=None, zero_point=None):
        self.weights = weights  # (out, in): float32, or int8 when scale is set
        self.biases = biases
        self.activation = activation
        self.scale = scale
        self.zero_point = zero_point

    def forward(self, x):
        if self.scale is None:
            y = self.weights @ x + self.biases
        else:
            centered = self.weights.astype(np.float32) - np.float32(self.zero_point)
            y = np.float32(self.scale) * (centered @ x) + self.biases
        if self.activation == "relu":
            return np.maximum(y, 0.0)
        if self.activation == "sigmoid":
            return 1.0 / (1.0 + np.exp(-y))
        return y


class Model:
    def __init__(self, layers, quantized):
        self.layers = layers
        self.quantized = quantized

    @property
    def input_dim(self):
        return self.layers[0].weights.shape[1]

    def scores(self, x):
        x = np.asarray(x, dtype=np.float32)
        for layer in self.layers:
            x = layer.forward(x).astype(np.float32)
        return x

    def predict(self, x):
        """Class index: argmax of the scores, ties to the lowest index; a
        single-unit head thresholds at 0.5."""
        s = self.scores(x)
        if s.shape[0] == 1:
            return int(s[0] >= 0.5)
        return int(np.argmax(s))


def load(path):
    with open(path, "rb") as f:
        data = f.read()
    if data[:4] != MAGIC:
        raise ValueError(f"{path}: not an MLQ1 model file")
    version, dtype, count = struct.unpack_from("<BBH", data, 4)
    if version != VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    if dtype not in (0, 1):
        raise ValueError(f"{path}: unknown dtype {dtype}")
    off = 8
    layers = []
    for _ in range(count):
        n_in, n_out, code = struct.unpack_from("<IIB", data, off)
        off += 9
        scale = zero_point = None
        if dtype == 0:
            w = np.frombuffer(data, "<f4", n_in * n_out, off).reshape(n_out, n_in)
            off += 4 * n_in * n_out
        else:
            scale, zero_point = struct.unpack_from("<fi", data, off)
            off += 8
            w = np.frombuffer(data, "i1", n_in * n_out, off).reshape(n_out, n_in)
            off += n_in * n_out
        b = np.frombuffer(data, "<f4", n_out, off)
        off += 4 * n_out
        layers.append(Layer(w, b, ACTIVATIONS[code], scale, zero_point))
    if off != len(data):
        raise ValueError(f"{path}: {len(data) - off} trailing bytes")
    return Model(layers, dtype == 1)


def save_float(path, layers):
    """Writes float32 layers given as (weights (out, in), biases, activation)."""
    out = bytearray(MAGIC)
    out += struct.pack("<BBH", VERSION, 0, len(layers))
    for w, b, activation in layers:
        w = np.asarray(w, dtype="<f4")
        n_out, n_in = w.shape
        out += struct.pack("<IIB", n_in, n_out, CODES[activation])
        out += w.tobytes()
        out += np.asarray(b, dtype="<f4").tobytes()
    with open(path, "wb") as f:
        f.write(bytes(out))


def load_standardizer(path):
    """Per-column mean and standard deviation, one `mean,std` row per feature."""
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return table[:, 0], table[:, 1]
