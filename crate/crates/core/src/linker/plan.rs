use serde::Serialize;

use crate::ir::{algorithm, algorithms, Diagnostic, HyperKind, HyperValue, PropertyType, Thing};
use crate::mlcore::{Activation, MlError, MlpArchitecture, TrainConfig};

const DEFAULT_HIDDEN: usize = 32;
const OUTPUT_UNITS: usize = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureSlot {
    pub name: String,
    /// Property type as written in the model.
    pub ty: String,
    /// Number of input columns the property occupies.
    pub width: usize,
}

/// Everything the trainer and the code generators need from a
/// `data_analytics` block, with defaults applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingPlan {
    pub thing: String,
    pub analytics: String,
    pub features: Vec<FeatureSlot>,
    pub input_width: usize,
    /// Property receiving predictions, which doubles as the label column.
    pub label: Option<String>,
    pub algorithm: String,
    pub hidden_layers: Vec<usize>,
    pub activation: Activation,
    /// `shuffle` is false iff the block is declared `sequential true`.
    pub config: TrainConfig,
    pub dataset: Option<String>,
    pub training_results: Option<String>,
}

impl TrainingPlan {
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.input_width];
        dims.extend(&self.hidden_layers);
        dims.push(OUTPUT_UNITS);
        dims
    }

    pub fn architecture(&self) -> Result<MlpArchitecture, MlError> {
        MlpArchitecture::classifier(self.dims(), self.activation)
    }

    /// Builds the plan for `thing`, or returns every problem found.
    pub fn for_thing(thing: &Thing) -> Option<Result<TrainingPlan, Vec<Diagnostic>>> {
        thing.analytics.as_ref().map(|_| build(thing))
    }
}

fn build(thing: &Thing) -> Result<TrainingPlan, Vec<Diagnostic>> {
    let da = thing.analytics.as_ref().expect("caller checked");
    let node = format!("data_analytics {}", thing.name);
    let mut diags = Vec::new();
    let mut err = |msg: String| diags.push(Diagnostic::error(&node, msg, da.span));

    if da.features.is_empty() {
        err("at least one feature is required".into());
    }
    let mut features = Vec::new();
    for f in &da.features {
        let Some(prop) = thing.property(f) else {
            err(format!("feature '{f}' is not a declared property"));
            continue;
        };
        let scalar = prop.ty.scalar();
        if !(scalar.is_numeric() || *scalar == PropertyType::Bool) {
            err(format!(
                "feature '{f}' has type {} but must be numeric or Bool",
                prop.ty
            ));
            continue;
        }
        match prop.ty.width().and_then(|w| usize::try_from(w).ok()) {
            Some(width) if width > 0 => features.push(FeatureSlot {
                name: f.clone(),
                ty: prop.ty.to_string(),
                width,
            }),
            _ => err(format!("feature '{f}' needs a fixed, non-zero array length")),
        }
    }

    if let Some(label) = &da.prediction_results {
        match thing.property(label) {
            None => err(format!("prediction_results '{label}' is not a declared property")),
            Some(p) => {
                if !(p.ty.is_numeric() || p.ty == PropertyType::Bool) {
                    err(format!(
                        "prediction_results '{label}' has type {} but must be a numeric or Bool scalar",
                        p.ty
                    ));
                }
            }
        }
    }
    if da.labels == Some(crate::ir::LabelsMode::On) && da.prediction_results.is_none() {
        err("labels ON needs a prediction_results property to hold the label column".into());
    }

    let mut config = TrainConfig {
        shuffle: da.sequential != Some(true),
        ..TrainConfig::default()
    };
    let mut hidden_layers = vec![DEFAULT_HIDDEN];
    let mut activation = Activation::Relu;
    let algorithm_name = da
        .model_algorithm
        .as_ref()
        .map_or("mlp".to_string(), |a| a.name.clone());
    if let Some(alg) = &da.model_algorithm {
        match algorithm(&alg.name) {
            None => {
                let known: Vec<&str> = algorithms().iter().map(|a| a.name).collect();
                err(format!(
                    "unknown model_algorithm '{}'; known algorithms: {}",
                    alg.name,
                    known.join(", ")
                ));
            }
            Some(spec) => {
                for h in &alg.hyperparameters {
                    let Some(p) = spec.param(&h.name) else {
                        err(format!("'{}' is not a hyperparameter of {}", h.name, alg.name));
                        continue;
                    };
                    if let Err(m) = check_kind(p.kind, &h.value) {
                        err(format!("hyperparameter {}: {m}", h.name));
                        continue;
                    }
                    apply(&h.name, &h.value, &mut config, &mut hidden_layers, &mut activation);
                }
            }
        }
    }
    if let Err(e) = config.validate() {
        err(e.to_string());
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let input_width = features.iter().map(|f| f.width).sum();
    Ok(TrainingPlan {
        thing: thing.name.clone(),
        analytics: da.name.clone(),
        features,
        input_width,
        label: da.prediction_results.clone(),
        algorithm: algorithm_name,
        hidden_layers,
        activation,
        config,
        dataset: da.dataset.clone(),
        training_results: da.training_results.clone(),
    })
}

fn as_f64(v: &HyperValue) -> Option<f64> {
    match v {
        HyperValue::Int(i) => Some(*i as f64),
        HyperValue::Float(x) => Some(*x),
        _ => None,
    }
}

fn check_kind(kind: HyperKind, v: &HyperValue) -> Result<(), String> {
    let count = |v: &HyperValue| matches!(v, HyperValue::Int(i) if *i >= 1);
    let ok = match kind {
        HyperKind::Count => count(v),
        HyperKind::CountList => match v {
            HyperValue::List(items) => !items.is_empty() && items.iter().all(count),
            other => count(other),
        },
        HyperKind::Positive => as_f64(v).is_some_and(|x| x > 0.0 && x.is_finite()),
        HyperKind::Fraction => as_f64(v).is_some_and(|x| x > 0.0 && x < 1.0),
        HyperKind::Natural => matches!(v, HyperValue::Int(i) if *i >= 0),
        HyperKind::Choice(options) => match v {
            HyperValue::Ident(s) | HyperValue::Str(s) => options.contains(&s.as_str()),
            _ => false,
        },
    };
    if ok {
        return Ok(());
    }
    Err(match kind {
        HyperKind::Count => "expected a positive integer".into(),
        HyperKind::CountList => "expected a positive integer or a list of them".into(),
        HyperKind::Positive => "expected a positive number".into(),
        HyperKind::Fraction => "expected a number strictly between 0 and 1".into(),
        HyperKind::Natural => "expected a non-negative integer".into(),
        HyperKind::Choice(options) => format!("expected one of {}", options.join(", ")),
    })
}

/// Applies an already type-checked hyperparameter.
fn apply(name: &str, v: &HyperValue, config: &mut TrainConfig, hidden: &mut Vec<usize>, activation: &mut Activation) {
    let int = |v: &HyperValue| match v {
        HyperValue::Int(i) => *i as u64,
        _ => 0,
    };
    match name {
        "hidden_layer_sizes" => {
            *hidden = match v {
                HyperValue::List(items) => items.iter().map(|x| int(x) as usize).collect(),
                other => vec![int(other) as usize],
            }
        }
        "activation" => {
            if let HyperValue::Ident(s) | HyperValue::Str(s) = v {
                *activation = Activation::from_name(s).unwrap_or(Activation::Relu);
            }
        }
        "learning_rate" => config.learning_rate = as_f64(v).unwrap_or(config.learning_rate),
        "batch_size" => config.batch_size = int(v) as usize,
        "epochs" => config.max_epochs = int(v) as usize,
        "patience" => config.patience = int(v) as usize,
        "validation_fraction" => config.validation_fraction = as_f64(v).unwrap_or(config.validation_fraction),
        "seed" => config.seed = int(v),
        _ => {}
    }
}
