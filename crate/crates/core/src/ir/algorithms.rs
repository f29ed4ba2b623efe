//! Registry of `model_algorithm` families and their hyperparameters.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HyperKind {
    /// Positive integer.
    Count,
    /// Positive integer or a list of them.
    CountList,
    /// Strictly positive number.
    Positive,
    /// Number in the open interval (0, 1).
    Fraction,
    /// Non-negative integer.
    Natural,
    /// One identifier out of a fixed set.
    Choice(&'static [&'static str]),
}

#[derive(Debug, Clone, Copy)]
pub struct HyperParamSpec {
    pub name: &'static str,
    pub kind: HyperKind,
}

#[derive(Debug, Clone, Copy)]
pub struct AlgorithmSpec {
    pub name: &'static str,
    pub description: &'static str,
    pub params: &'static [HyperParamSpec],
}

impl AlgorithmSpec {
    pub fn param(&self, name: &str) -> Option<&HyperParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }
}

const MLP_PARAMS: &[HyperParamSpec] = &[
    HyperParamSpec {
        name: "hidden_layer_sizes",
        kind: HyperKind::CountList,
    },
    HyperParamSpec {
        name: "activation",
        kind: HyperKind::Choice(&["relu", "sigmoid", "linear"]),
    },
    HyperParamSpec {
        name: "output_activation",
        kind: HyperKind::Choice(&["sigmoid"]),
    },
    HyperParamSpec {
        name: "optimizer",
        kind: HyperKind::Choice(&["adam"]),
    },
    HyperParamSpec {
        name: "loss",
        kind: HyperKind::Choice(&["binary_crossentropy"]),
    },
    HyperParamSpec {
        name: "learning_rate",
        kind: HyperKind::Positive,
    },
    HyperParamSpec {
        name: "batch_size",
        kind: HyperKind::Count,
    },
    HyperParamSpec {
        name: "epochs",
        kind: HyperKind::Count,
    },
    HyperParamSpec {
        name: "patience",
        kind: HyperKind::Natural,
    },
    HyperParamSpec {
        name: "validation_fraction",
        kind: HyperKind::Fraction,
    },
    HyperParamSpec {
        name: "seed",
        kind: HyperKind::Natural,
    },
];

const ALGORITHMS: &[AlgorithmSpec] = &[AlgorithmSpec {
    name: "mlp",
    description: "multi-layer perceptron with a two-unit sigmoid head",
    params: MLP_PARAMS,
}];

pub fn algorithms() -> &'static [AlgorithmSpec] {
    ALGORITHMS
}

pub fn algorithm(name: &str) -> Option<&'static AlgorithmSpec> {
    ALGORITHMS.iter().find(|a| a.name == name)
}
