"""Training program for thing Pump (data_analytics detector).

Reads the dataset, standardizes with statistics of the training rows,
splits chronologically, trains the MLP with Keras and writes the model as
.mlq, the standardizer, a metrics report and the per-epoch training log.
"""

import json
import os
import sys

import numpy as np
import tensorflow as tf

import mlq

HERE = os.path.dirname(os.path.abspath(__file__))
ROOT = os.path.join(HERE, "..", "..")

DATASET = "pump.csv"
TRAINING_RESULTS = "pump_training.tsv"
MODEL_PATH = os.path.join(ROOT, "model", "model.mlq")
STANDARDIZER_PATH = os.path.join(ROOT, "model", "standardizer.csv")
METRICS_PATH = os.path.join(ROOT, "model", "metrics.json")

# Feature properties in input order, with their column counts.
FEATURES = [
    ("vs1", 4),
    ("se", 2),
]
INPUT_WIDTH = 6
HIDDEN_LAYERS = [8]
ACTIVATION = "relu"
LEARNING_RATE = 0.01
BATCH_SIZE = 16
EPOCHS = 30
PATIENCE = 3
VALIDATION_FRACTION = 0.1
SHUFFLE = False
SEED = 11
TRAIN_FRACTION = 0.8


def read_dataset(path):
    """CSV with header f0,...,f{d-1},label."""
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2, dtype=np.float64)
    x, y = table[:, :-1], table[:, -1].astype(np.int64)
    if x.shape[1] != INPUT_WIDTH:
        sys.exit(f"{path}: expected {INPUT_WIDTH} feature columns, found {x.shape[1]}")
    return x, y


def build_model():
    model = tf.keras.Sequential([tf.keras.Input(shape=(INPUT_WIDTH,))])
    for units in HIDDEN_LAYERS:
        model.add(tf.keras.layers.Dense(units, activation=ACTIVATION))
    model.add(tf.keras.layers.Dense(2, activation="sigmoid"))
    model.compile(
        optimizer=tf.keras.optimizers.Adam(learning_rate=LEARNING_RATE, epsilon=1e-7),
        loss="binary_crossentropy",
        metrics=["binary_accuracy"],
    )
    return model


def weighted_scores(y_true, y_pred):
    labels = np.unique(np.concatenate([y_true, y_pred]))
    precision = recall = 0.0
    for c in labels:
        support = np.sum(y_true == c)
        tp = np.sum((y_true == c) & (y_pred == c))
        predicted = np.sum(y_pred == c)
        precision += support * (tp / predicted if predicted else 0.0)
        recall += support * (tp / support if support else 0.0)
    n = len(y_true)
    return float(np.mean(y_true == y_pred)), float(precision / n), float(recall / n)


def main():
    tf.keras.utils.set_random_seed(SEED)
    path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(ROOT, DATASET)
    x, y = read_dataset(path)
    n_train = int(np.floor(TRAIN_FRACTION * len(y)))
    x_train, y_train, x_test, y_test = x[:n_train], y[:n_train], x[n_train:], y[n_train:]

    mean = x_train.mean(axis=0)
    std = x_train.std(axis=0)
    std[std == 0] = 1.0
    x_train = ((x_train - mean) / std).astype(np.float32)
    x_test = ((x_test - mean) / std).astype(np.float32)

    model = build_model()
    model.fit(
        x_train,
        tf.keras.utils.to_categorical(y_train, 2),
        batch_size=BATCH_SIZE,
        epochs=EPOCHS,
        validation_split=VALIDATION_FRACTION,
        shuffle=SHUFFLE,
        callbacks=[
            tf.keras.callbacks.EarlyStopping(
                monitor="val_loss", patience=PATIENCE, restore_best_weights=True
            ),
            tf.keras.callbacks.CSVLogger(os.path.join(ROOT, TRAINING_RESULTS), separator="\t"),
        ],
        verbose=2,
    )

    y_pred = np.argmax(model.predict(x_test, verbose=0), axis=1)
    accuracy, precision, recall = weighted_scores(y_test, y_pred)

    os.makedirs(os.path.dirname(MODEL_PATH), exist_ok=True)
    # Keras kernels are (in, out); .mlq stores (out, in).
    layers = [
        (layer.get_weights()[0].T, layer.get_weights()[1], layer.get_config()["activation"])
        for layer in model.layers
    ]
    mlq.save_float(MODEL_PATH, layers)
    with open(STANDARDIZER_PATH, "w") as f:
        f.write("mean,std\n")
        for m, s in zip(mean, std):
            f.write(f"{float(m)!r},{float(s)!r}\n")
    with open(METRICS_PATH, "w") as f:
        json.dump({"accuracy": accuracy, "precision": precision, "recall": recall}, f, indent=2)
    print(f"accuracy {accuracy:.4f} precision {precision:.4f} recall {recall:.4f}")


if __name__ == "__main__":
    main()
