//! Template-based generators that turn one configuration of a linked model
//! into a complete source tree for its target, including the converted model.
//!
//! Every tree holds `src/...`, the model under `model/`, and a `MANIFEST`
//! with the SHA-256 of each input model file and each generated file. Trees
//! are pure functions of their inputs: no timestamps, no absolute paths, and
//! every collection is emitted in model order.
//!
//! | target language | emitted |
//! |---|---|
//! | `python_java` | Keras training program, numpy prediction program, Java state machines |
//! | Python | numpy `.mlq` loader and Python state machines; int8 when the profile is quantized |
//! | C++ | Arduino sketch, `.mlq` interpreter, state machine headers, `model_data.cc` |
//!
//! The Java half of `python_java` carries the messaging and statechart
//! skeleton only; the ML pipeline lives in the Python half.

mod lang;
mod machine;
mod targets;
mod template;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::ir::{Diagnostic, Thing};
use crate::linker::{check_semantics, LinkedModel, TrainingPlan};
use crate::mlcore::{MlError, MlpModel, Standardizer};
use crate::modelconv::ConvError;
use crate::platform::{DeployDecision, PlatformProfile, Policy, Registry};

pub use template::TemplateError;

#[derive(Debug, thiserror::Error)]
pub enum CodegenError {
    #[error("no configuration named '{name}'; declared: {}", known.join(", "))]
    UnknownConfiguration { name: String, known: Vec<String> },
    #[error("configuration '{0}' has no @compiler annotation")]
    MissingTarget(String),
    #[error("unknown target '{id}'; valid targets: {}", valid.join(", "))]
    UnknownTarget { id: String, valid: Vec<String> },
    #[error("{} model error(s)", .0.len())]
    Semantic(Vec<Diagnostic>),
    #[error("configuration '{configuration}' instantiates several things with data_analytics ({}); one is supported", things.join(", "))]
    TooManyModels { configuration: String, things: Vec<String> },
    #[error("thing '{0}' needs a dataset path to generate its training program")]
    MissingDataset(String),
    #[error("supplied model has dimensions {found:?} but thing '{thing}' needs {expected:?}")]
    ModelMismatch {
        thing: String,
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("standardizer has {found} columns but the model reads {expected}")]
    StandardizerMismatch { expected: usize, found: usize },
    #[error("model does not fit {}: {}", .0.compiler_id, rejection_summary(.0))]
    Rejected(DeployDecision),
    #[error(transparent)]
    Conversion(#[from] ConvError),
    #[error(transparent)]
    Ml(#[from] MlError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn rejection_summary(d: &DeployDecision) -> String {
    d.checks
        .iter()
        .filter(|c| c.margin() < 0)
        .map(|c| {
            format!(
                "{:?} needs {} bytes, {} available",
                c.constraint, c.required_bytes, c.available_bytes
            )
            .to_lowercase()
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Inputs beyond the model itself.
#[derive(Debug, Clone, Default)]
pub struct GenerateOptions {
    /// Overrides the configuration's `@compiler` annotation.
    pub target: Option<String>,
    /// Trained weights. Without them the tree carries the deterministic
    /// initial weights of the plan's seed.
    pub model: Option<MlpModel>,
    pub standardizer: Option<Standardizer>,
    pub policy: Policy,
}

/// Files of one generated tree, keyed by relative path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratedTree {
    pub configuration: String,
    pub target: String,
    /// `(path, sha256)` of every input model file, paths relative to the
    /// entry file's directory.
    pub inputs: Vec<(String, String)>,
    #[serde(skip)]
    pub files: BTreeMap<String, Vec<u8>>,
    pub deploy: Option<DeployDecision>,
}

pub const MANIFEST: &str = "MANIFEST";

impl GeneratedTree {
    pub fn file(&self, path: &str) -> Option<&[u8]> {
        self.files.get(path).map(Vec::as_slice)
    }

    pub fn text(&self, path: &str) -> Option<&str> {
        self.file(path).and_then(|b| std::str::from_utf8(b).ok())
    }

    pub fn paths(&self) -> impl Iterator<Item = &str> {
        self.files.keys().map(String::as_str)
    }

    /// Directory of this tree below an output root.
    pub fn relative_root(&self) -> PathBuf {
        Path::new(&self.configuration).join(&self.target)
    }

    fn insert(&mut self, path: String, contents: Vec<u8>) {
        debug_assert!(is_tree_path(&path), "bad tree path {path}");
        let previous = self.files.insert(path, contents);
        debug_assert!(previous.is_none(), "duplicate tree path");
    }
}

/// Whether `d` objects to the `@compiler` choice of `configuration`, which
/// an explicit target overrides.
pub fn is_target_choice(d: &Diagnostic, configuration: &str) -> bool {
    d.node == format!("configuration {configuration}") && d.message.contains("@compiler")
}

/// Relative, `/`-separated, without empty, `.` or `..` segments.
pub fn is_tree_path(path: &str) -> bool {
    !path.is_empty()
        && !path.starts_with('/')
        && !path.contains('\\')
        && path.split('/').all(|s| !s.is_empty() && s != "." && s != "..")
}

/// `(compiler_id, description)` of every registered target, sorted by id.
pub fn list_targets(registry: &Registry) -> Vec<(String, String)> {
    registry
        .profiles()
        .iter()
        .map(|p| (p.compiler_id.clone(), p.description()))
        .collect()
}

/// What a target generator receives.
pub(crate) struct Job<'a> {
    pub(crate) configuration: &'a crate::ir::Configuration,
    pub(crate) profile: &'a PlatformProfile,
    /// Distinct things in instance order.
    pub(crate) things: Vec<&'a Thing>,
    pub(crate) ml: Option<MlPart<'a>>,
}

pub(crate) struct MlPart<'a> {
    pub(crate) thing: &'a Thing,
    /// First instance of the thing in the configuration.
    pub(crate) instance: String,
    pub(crate) plan: TrainingPlan,
    /// `.mlq` bytes in the dtype the profile deploys.
    pub(crate) mlq: Vec<u8>,
    pub(crate) quantized: bool,
    pub(crate) standardizer: Option<Standardizer>,
    pub(crate) weights_note: String,
}

pub fn generate(
    linked: &LinkedModel,
    configuration: &str,
    registry: &Registry,
    opts: &GenerateOptions,
) -> Result<GeneratedTree, CodegenError> {
    let model = &linked.model;
    let cfg = model
        .configuration(configuration)
        .ok_or_else(|| CodegenError::UnknownConfiguration {
            name: configuration.to_string(),
            known: model.configurations.iter().map(|c| c.name.clone()).collect(),
        })?;
    let target = match &opts.target {
        Some(t) => t.as_str(),
        None => linked
            .compiler_of(configuration)
            .ok_or_else(|| CodegenError::MissingTarget(configuration.to_string()))?,
    };
    let profile = registry.lookup(target).ok_or_else(|| CodegenError::UnknownTarget {
        id: target.to_string(),
        valid: registry.ids().iter().map(|s| s.to_string()).collect(),
    })?;
    let errors: Vec<Diagnostic> = check_semantics(linked, registry)
        .into_iter()
        .filter(|d| d.is_error())
        // An overridden target may fix a bad annotation of this configuration.
        .filter(|d| opts.target.is_none() || !is_target_choice(d, configuration))
        .collect();
    if !errors.is_empty() {
        return Err(CodegenError::Semantic(errors));
    }

    let mut things: Vec<&Thing> = Vec::new();
    for inst in &cfg.instances {
        if let Some(t) = model.thing(&inst.thing) {
            if !things.iter().any(|x| x.name == t.name) {
                things.push(t);
            }
        }
    }
    let ml_things: Vec<&Thing> = things.iter().copied().filter(|t| t.analytics.is_some()).collect();
    if ml_things.len() > 1 {
        return Err(CodegenError::TooManyModels {
            configuration: configuration.to_string(),
            things: ml_things.iter().map(|t| t.name.clone()).collect(),
        });
    }

    let mut deploy = None;
    let ml = match ml_things.first() {
        None => None,
        Some(thing) => {
            let plan = linked
                .training_plan(&thing.name)
                .expect("semantic check accepted the analytics block");
            let arch = plan.architecture()?;
            let (weights, weights_note) = match &opts.model {
                Some(m) => {
                    if m.architecture() != arch {
                        return Err(CodegenError::ModelMismatch {
                            thing: thing.name.clone(),
                            expected: arch.dims().to_vec(),
                            found: m.architecture().dims().to_vec(),
                        });
                    }
                    let hash = hex::encode(Sha256::digest(crate::modelconv::save_float(m)?));
                    (m.clone(), format!("trained, float sha256 {hash}"))
                }
                None => (
                    MlpModel::init(&arch, plan.config.seed),
                    format!("untrained, initialized from seed {}", plan.config.seed),
                ),
            };
            if let Some(s) = &opts.standardizer {
                if s.n_features() != plan.input_width {
                    return Err(CodegenError::StandardizerMismatch {
                        expected: plan.input_width,
                        found: s.n_features(),
                    });
                }
            }
            if !profile.is_unconstrained() {
                let report = crate::platform::estimate_sizes(&arch)?;
                let decision = crate::platform::check_deployability(&report, profile, opts.policy);
                if !decision.accepted {
                    return Err(CodegenError::Rejected(decision));
                }
                deploy = Some(decision);
            }
            let mlq = if profile.quantized {
                crate::modelconv::save_quantized(&crate::modelconv::quantize(&weights)?)?
            } else {
                crate::modelconv::save_float(&weights)?
            };
            let instance = cfg
                .instances
                .iter()
                .find(|i| i.thing == thing.name)
                .map(|i| i.name.clone())
                .unwrap_or_default();
            Some(MlPart {
                thing,
                instance,
                plan,
                mlq,
                quantized: profile.quantized,
                standardizer: opts.standardizer.clone(),
                weights_note,
            })
        }
    };
    if let (Some(part), crate::platform::TargetLanguage::PythonJava) = (&ml, profile.language) {
        if part.plan.dataset.is_none() {
            return Err(CodegenError::MissingDataset(part.thing.name.clone()));
        }
    }

    let job = Job {
        configuration: cfg,
        profile,
        things,
        ml,
    };
    let mut tree = GeneratedTree {
        configuration: configuration.to_string(),
        target: profile.compiler_id.clone(),
        inputs: relative_inputs(linked),
        files: BTreeMap::new(),
        deploy,
    };
    for (path, contents) in targets::emit(&job)? {
        tree.insert(path, contents);
    }
    let manifest = manifest(&tree, &job);
    tree.insert(MANIFEST.to_string(), manifest.into_bytes());
    Ok(tree)
}

fn relative_inputs(linked: &LinkedModel) -> Vec<(String, String)> {
    let entry = linked.sources.first().map(|s| s.path.as_str()).unwrap_or("");
    let dir = entry.rfind('/').map_or("", |i| &entry[..=i]);
    let mut out: Vec<(String, String)> = linked
        .sources
        .iter()
        .map(|s| {
            let rel = s.path.strip_prefix(dir).unwrap_or(&s.path);
            (rel.to_string(), s.sha256.clone())
        })
        .collect();
    out.sort();
    out
}

fn manifest(tree: &GeneratedTree, job: &Job) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "configuration {}", tree.configuration);
    let _ = writeln!(out, "target {}", tree.target);
    for (path, hash) in &tree.inputs {
        let _ = writeln!(out, "input {hash}  {path}");
    }
    if let Some(ml) = &job.ml {
        let dims: Vec<String> = ml.plan.dims().iter().map(usize::to_string).collect();
        let _ = writeln!(
            out,
            "model {} [{}] {} {}",
            ml.thing.name,
            dims.join(", "),
            if ml.quantized { "int8" } else { "float32" },
            ml.weights_note
        );
    }
    if let Some(d) = &tree.deploy {
        let _ = writeln!(
            out,
            "deploy accepted policy {} margin {}",
            d.policy.name(),
            d.margin_bytes.map_or("unbounded".into(), |m| format!("{m} bytes"))
        );
    }
    for (path, contents) in &tree.files {
        let _ = writeln!(out, "file {}  {path}", hex::encode(Sha256::digest(contents)));
    }
    out
}

/// Writes `tree` below `out/<configuration>/<target>/`, each file through a
/// temporary sibling and a rename. Returns the tree's root directory.
pub fn write_tree(tree: &GeneratedTree, out: &Path) -> Result<PathBuf, CodegenError> {
    let root = out.join(tree.relative_root());
    let io_err = |p: &Path, e: io::Error| CodegenError::Io {
        path: p.display().to_string(),
        message: e.to_string(),
    };
    for (rel, contents) in &tree.files {
        let dest = root.join(rel);
        if let Some(parent) = dest.parent() {
            std::fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        let tmp = dest.with_file_name(format!(
            ".{}.tmp{}",
            dest.file_name().and_then(|n| n.to_str()).unwrap_or("file"),
            std::process::id()
        ));
        std::fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
        std::fs::rename(&tmp, &dest).map_err(|e| io_err(&dest, e))?;
    }
    Ok(root)
}

/// State machine classes are named after their thing.
pub(crate) fn class_name(thing: &str) -> String {
    format!("{thing}Statechart")
}
