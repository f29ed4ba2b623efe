use crate::ir::{Diagnostic, NodePath};
use crate::platform::Registry;

use super::plan::TrainingPlan;
use super::LinkedModel;

/// Checks that go beyond structure: analytics typing and defaults, target
/// selection, and configuration contents. Each violation is one diagnostic.
pub fn check_semantics(linked: &LinkedModel, registry: &Registry) -> Vec<Diagnostic> {
    let model = &linked.model;
    let mut out = Vec::new();

    for thing in &model.things {
        if let Some(Err(diags)) = TrainingPlan::for_thing(thing) {
            out.extend(diags);
        }
        if let Some(da) = &thing.analytics {
            if da.labels.is_some_and(|l| l != crate::ir::LabelsMode::On) {
                out.push(Diagnostic::warning(
                    format!("data_analytics {}", thing.name),
                    format!(
                        "labels {} with a supervised model; training still reads the label column",
                        da.labels.unwrap().keyword()
                    ),
                    da.span,
                ));
            }
        }
    }

    let valid = registry.ids().join(", ");
    for cfg in &model.configurations {
        let node = format!("configuration {}", cfg.name);
        if cfg.instances.is_empty() {
            out.push(Diagnostic::error(
                &node,
                "configuration instantiates no thing",
                cfg.span,
            ));
        }
        let inline = cfg.annotations.iter().filter(|a| a.key == "compiler").count();
        let in_one_directive = model
            .directives
            .iter()
            .filter(|d| d.target == NodePath::Configuration(cfg.name.clone()))
            .any(|d| d.annotations.iter().filter(|a| a.key == "compiler").count() > 1);
        if inline > 1 || in_one_directive {
            out.push(Diagnostic::error(&node, "more than one @compiler annotation", cfg.span));
        }
        match linked.compiler_of(&cfg.name) {
            None => out.push(Diagnostic::error(
                &node,
                format!("missing @compiler annotation; valid targets: {valid}"),
                cfg.span,
            )),
            Some(id) if registry.lookup(id).is_none() => out.push(Diagnostic::error(
                &node,
                format!("unknown @compiler target '{id}'; valid targets: {valid}"),
                cfg.span,
            )),
            Some(_) => {}
        }
    }
    out
}

impl LinkedModel {
    /// Training plan of `thing`, if it declares a valid `data_analytics` block.
    pub fn training_plan(&self, thing: &str) -> Option<TrainingPlan> {
        let t = self.model.thing(thing)?;
        TrainingPlan::for_thing(t)?.ok()
    }

    /// Plans of the things instantiated by `configuration`, in instance order,
    /// each thing once.
    pub fn configuration_plans(&self, configuration: &str) -> Vec<TrainingPlan> {
        let Some(cfg) = self.model.configuration(configuration) else {
            return Vec::new();
        };
        let mut seen = Vec::new();
        let mut plans = Vec::new();
        for inst in &cfg.instances {
            if seen.contains(&inst.thing) {
                continue;
            }
            seen.push(inst.thing.clone());
            if let Some(p) = self.training_plan(&inst.thing) {
                plans.push(p);
            }
        }
        plans
    }
}
