//! Import resolution, composition of platform-independent models with
//! platform-specific overlays, and semantic checks.
//!
//! A platform-specific model is a platform-independent model plus
//! annotations and configurations. Composition never edits the imported
//! things: overlay annotations live in a separate effective-annotation table
//! and [`strip`] recovers the original model exactly.

mod plan;
mod resolve;
mod semantics;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ir::{validate_structure, Annotation, Diagnostic, NodePath, SourceModel};
use crate::platform::Registry;
use crate::syntax::ParseError;

pub use plan::{FeatureSlot, TrainingPlan};
pub use resolve::{fs_loader, normalize_path, resolve_imports};
pub use semantics::check_semantics;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceFile {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, thiserror::Error)]
pub enum LinkError {
    #[error("{file}: {message}")]
    Io { file: String, message: String },
    #[error("{file}: {} syntax error(s)", errors.len())]
    Parse { file: String, errors: Vec<ParseError> },
    #[error("{} model error(s)", .0.len())]
    Semantic(Vec<Diagnostic>),
}

/// A fully merged model with its effective annotations.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkedModel {
    /// All imports inlined; imported things are never modified.
    pub model: SourceModel,
    /// Entry file first, then imports in resolution order.
    pub sources: Vec<SourceFile>,
    /// Declaring file of every thing and configuration.
    pub provenance: BTreeMap<NodePath, String>,
    /// Inline annotations overridden or extended by `annotate` directives,
    /// later directives winning per key.
    pub annotations: BTreeMap<NodePath, Vec<Annotation>>,
    /// Instance nodes mapped to the thing they instantiate.
    pub references: BTreeMap<NodePath, NodePath>,
    base: BaseCounts,
}

/// How much of the merged model came from the platform-independent part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct BaseCounts {
    configurations: usize,
    directives: usize,
}

impl LinkedModel {
    pub fn effective_annotations(&self, node: &NodePath) -> &[Annotation] {
        self.annotations.get(node).map_or(&[], Vec::as_slice)
    }

    pub fn annotation(&self, node: &NodePath, key: &str) -> Option<&str> {
        crate::ir::annotation_value(self.effective_annotations(node), key)
    }

    /// Target of a configuration's `@compiler` annotation.
    pub fn compiler_of(&self, configuration: &str) -> Option<&str> {
        self.annotation(&NodePath::Configuration(configuration.into()), "compiler")
    }

    /// Hex SHA-256 of every source file, keyed by path.
    pub fn input_hashes(&self) -> Vec<(String, String)> {
        let mut v: Vec<_> = self
            .sources
            .iter()
            .map(|s| (s.path.clone(), s.sha256.clone()))
            .collect();
        v.sort();
        v
    }
}

fn push_nodes<'a>(model: &'a SourceModel, out: &mut Vec<(NodePath, &'a [Annotation])>) {
    for t in &model.things {
        let n = &t.name;
        out.push((NodePath::Thing(n.clone()), &t.annotations));
        for p in &t.properties {
            out.push((NodePath::Property(n.clone(), p.name.clone()), &p.annotations));
        }
        for m in &t.messages {
            out.push((NodePath::Message(n.clone(), m.name.clone()), &m.annotations));
        }
        for p in &t.ports {
            out.push((NodePath::Port(n.clone(), p.name.clone()), &p.annotations));
        }
        if let Some(sc) = &t.statechart {
            out.push((NodePath::Statechart(n.clone()), &sc.annotations));
            for s in &sc.states {
                out.push((NodePath::State(n.clone(), s.name.clone()), &s.annotations));
            }
        }
        if let Some(da) = &t.analytics {
            out.push((NodePath::Analytics(n.clone()), &da.annotations));
        }
    }
    for c in &model.configurations {
        out.push((NodePath::Configuration(c.name.clone()), &c.annotations));
        for i in &c.instances {
            out.push((NodePath::Instance(c.name.clone(), i.name.clone()), &i.annotations));
        }
    }
}

fn effective_annotations(model: &SourceModel) -> BTreeMap<NodePath, Vec<Annotation>> {
    let mut nodes = Vec::new();
    push_nodes(model, &mut nodes);
    let mut table: BTreeMap<NodePath, Vec<Annotation>> = BTreeMap::new();
    for (path, anns) in nodes {
        let entry = table.entry(path).or_default();
        for a in anns {
            upsert(entry, a.clone());
        }
    }
    for d in &model.directives {
        let entry = table.entry(d.target.clone()).or_default();
        for a in &d.annotations {
            upsert(entry, a.clone());
        }
    }
    table.retain(|_, v| !v.is_empty());
    table
}

/// Replaces the annotation with the same key in place, or appends.
fn upsert(list: &mut Vec<Annotation>, a: Annotation) {
    match list.iter_mut().find(|x| x.key == a.key) {
        Some(slot) => *slot = a,
        None => list.push(a),
    }
}

fn references(model: &SourceModel) -> BTreeMap<NodePath, NodePath> {
    model
        .configurations
        .iter()
        .flat_map(|c| {
            c.instances.iter().map(move |i| {
                (
                    NodePath::Instance(c.name.clone(), i.name.clone()),
                    NodePath::Thing(i.thing.clone()),
                )
            })
        })
        .collect()
}

pub(crate) const PIM_LABEL: &str = "<pim>";
pub(crate) const OVERLAY_LABEL: &str = "<overlay>";

/// Adds an overlay's configurations and annotations to a platform-independent
/// model. The overlay must not declare things.
pub fn compose_psm(pim: &SourceModel, overlay: &SourceModel) -> Result<LinkedModel, Vec<Diagnostic>> {
    let mut provenance = BTreeMap::new();
    for t in &pim.things {
        provenance.insert(NodePath::Thing(t.name.clone()), PIM_LABEL.to_string());
    }
    for c in &pim.configurations {
        provenance.insert(NodePath::Configuration(c.name.clone()), PIM_LABEL.to_string());
    }
    compose_labeled(pim, provenance, overlay, OVERLAY_LABEL, Vec::new())
}

pub(crate) fn compose_labeled(
    pim: &SourceModel,
    mut provenance: BTreeMap<NodePath, String>,
    overlay: &SourceModel,
    overlay_file: &str,
    sources: Vec<SourceFile>,
) -> Result<LinkedModel, Vec<Diagnostic>> {
    if !overlay.things.is_empty() {
        return Err(overlay
            .things
            .iter()
            .map(|t| {
                Diagnostic::error(
                    format!("thing {}", t.name),
                    "PSM overlay must not define things",
                    t.span,
                )
                .in_file(overlay_file)
            })
            .collect());
    }
    let mut diags = Vec::new();
    for c in &overlay.configurations {
        let key = NodePath::Configuration(c.name.clone());
        if let Some(prev) = provenance.get(&key) {
            diags.push(
                Diagnostic::error(
                    key.to_string(),
                    format!("configuration '{}' is already declared in {prev}", c.name),
                    c.span,
                )
                .in_file(overlay_file),
            );
        } else {
            provenance.insert(key, overlay_file.to_string());
        }
    }
    if !diags.is_empty() {
        return Err(diags);
    }
    let mut model = SourceModel {
        imports: pim.imports.clone(),
        things: pim.things.clone(),
        configurations: pim.configurations.clone(),
        directives: pim.directives.clone(),
    };
    model.configurations.extend(overlay.configurations.iter().cloned());
    model.directives.extend(overlay.directives.iter().cloned());
    Ok(LinkedModel {
        annotations: effective_annotations(&model),
        references: references(&model),
        base: BaseCounts {
            configurations: pim.configurations.len(),
            directives: pim.directives.len(),
        },
        model,
        sources,
        provenance,
    })
}

/// The platform-independent model a [`LinkedModel`] was composed from.
pub fn strip(linked: &LinkedModel) -> SourceModel {
    let m = &linked.model;
    SourceModel {
        imports: m.imports.clone(),
        things: m.things.clone(),
        configurations: m.configurations[..linked.base.configurations].to_vec(),
        directives: m.directives[..linked.base.directives].to_vec(),
    }
}

/// Resolves imports, then runs structural and semantic checks. Warnings are
/// returned alongside a successful link.
pub fn link(
    entry: &str,
    loader: &dyn Fn(&str) -> std::io::Result<String>,
    registry: &Registry,
) -> Result<(LinkedModel, Vec<Diagnostic>), LinkError> {
    let linked = resolve_imports(entry, loader)?;
    let diags = diagnose(&linked, registry);
    if diags.iter().any(Diagnostic::is_error) {
        return Err(LinkError::Semantic(diags));
    }
    Ok((linked, diags))
}

/// Structural checks, then semantic checks if the structure is sound. Every
/// diagnostic names the file declaring its node.
pub fn diagnose(linked: &LinkedModel, registry: &Registry) -> Vec<Diagnostic> {
    let mut diags = validate_structure(&linked.model);
    let file_of = |d: &Diagnostic| -> Option<String> {
        let owner = d.node.split_whitespace().nth(1)?;
        let owner = owner.split(['.', ' ']).next()?;
        linked
            .provenance
            .get(&NodePath::Thing(owner.into()))
            .or_else(|| linked.provenance.get(&NodePath::Configuration(owner.into())))
            .cloned()
    };
    if diags.iter().all(|d| !d.is_error()) {
        diags.extend(check_semantics(linked, registry));
    }
    for d in &mut diags {
        if d.file.is_none() {
            d.file = file_of(d).or_else(|| Some(entry_label(linked)));
        }
    }
    diags
}

fn entry_label(linked: &LinkedModel) -> String {
    linked
        .sources
        .first()
        .map_or_else(|| "<input>".into(), |s| s.path.clone())
}
