use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::{Action, Annotation, Configuration, Expr, NodePath, SourceModel, Span, Statechart, Thing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// A model problem tied to a node and, when known, a source location.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub node: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub line: u32,
    pub column: u32,
}

impl Diagnostic {
    pub fn error(node: impl Into<String>, message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Error,
            node: node.into(),
            message: message.into(),
            file: None,
            line: span.line,
            column: span.column,
        }
    }

    pub fn warning(node: impl Into<String>, message: impl Into<String>, span: Span) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(node, message, span)
        }
    }

    pub fn in_file(mut self, file: impl Into<String>) -> Self {
        self.file = Some(file.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        if let Some(file) = &self.file {
            write!(f, "{file}:")?;
        }
        write!(
            f,
            "{}:{}: {sev}: {}: {}",
            self.line, self.column, self.node, self.message
        )
    }
}

/// Checks the meta-model constraints of a (merged) model. Returns an empty
/// list iff the model is structurally well formed.
pub fn validate_structure(model: &SourceModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen = HashSet::new();
    for thing in &model.things {
        if !seen.insert(thing.name.as_str()) {
            out.push(Diagnostic::error(
                format!("thing {}", thing.name),
                format!("duplicate thing name '{}'", thing.name),
                thing.span,
            ));
        }
    }
    let mut seen = HashSet::new();
    for config in &model.configurations {
        if !seen.insert(config.name.as_str()) {
            out.push(Diagnostic::error(
                format!("configuration {}", config.name),
                format!("duplicate configuration name '{}'", config.name),
                config.span,
            ));
        }
    }

    for thing in &model.things {
        check_thing(thing, &mut out);
    }
    for config in &model.configurations {
        check_configuration(model, config, &mut out);
    }
    for directive in &model.directives {
        if !node_exists(model, &directive.target) {
            out.push(Diagnostic::error(
                directive.target.to_string(),
                "annotation target does not exist",
                directive.span,
            ));
        }
    }
    out
}

fn duplicates<'a, I>(names: I, what: &str, owner: &str, out: &mut Vec<Diagnostic>)
where
    I: IntoIterator<Item = (&'a str, Span)>,
{
    let mut seen = HashSet::new();
    for (name, span) in names {
        if !seen.insert(name) {
            out.push(Diagnostic::error(
                format!("{what} {owner}.{name}"),
                format!("duplicate {what} name '{name}'"),
                span,
            ));
        }
    }
}

fn check_thing(thing: &Thing, out: &mut Vec<Diagnostic>) {
    let owner = thing.name.as_str();
    duplicates(
        thing.properties.iter().map(|p| (p.name.as_str(), p.span)),
        "property",
        owner,
        out,
    );
    duplicates(
        thing.messages.iter().map(|m| (m.name.as_str(), m.span)),
        "message",
        owner,
        out,
    );
    duplicates(
        thing.ports.iter().map(|p| (p.name.as_str(), p.span)),
        "port",
        owner,
        out,
    );

    for msg in &thing.messages {
        let mut seen = HashSet::new();
        for p in &msg.params {
            if !seen.insert(p.name.as_str()) {
                out.push(Diagnostic::error(
                    format!("message {owner}.{}", msg.name),
                    format!("duplicate parameter '{}'", p.name),
                    msg.span,
                ));
            }
        }
    }

    for port in &thing.ports {
        for (dir, list) in [("sends", &port.sends), ("receives", &port.receives)] {
            for m in list {
                if thing.message(m).is_none() {
                    out.push(Diagnostic::error(
                        format!("port {owner}.{}", port.name),
                        format!("{dir} undeclared message '{m}'"),
                        port.span,
                    ));
                }
            }
        }
    }

    if let Some(sc) = &thing.statechart {
        check_statechart(thing, sc, out);
    }

    if let Some(da) = &thing.analytics {
        let node = format!("data_analytics {owner}");
        for f in &da.features {
            if thing.property(f).is_none() {
                out.push(Diagnostic::error(
                    &node,
                    format!("feature '{f}' is not a declared property"),
                    da.span,
                ));
            }
        }
        if let Some(p) = &da.prediction_results {
            if thing.property(p).is_none() {
                out.push(Diagnostic::error(
                    &node,
                    format!("prediction_results '{p}' is not a declared property"),
                    da.span,
                ));
            }
        }
        if let Some(alg) = &da.model_algorithm {
            if let Some(spec) = super::algorithm(&alg.name) {
                for h in &alg.hyperparameters {
                    if spec.param(&h.name).is_none() {
                        out.push(Diagnostic::error(
                            &node,
                            format!("'{}' is not a hyperparameter of {}", h.name, alg.name),
                            da.span,
                        ));
                    }
                }
            }
        }
    }
}

fn check_statechart(thing: &Thing, sc: &Statechart, out: &mut Vec<Diagnostic>) {
    let owner = thing.name.as_str();
    let node = format!("statechart {owner}.{}", sc.name);
    duplicates(sc.states.iter().map(|s| (s.name.as_str(), s.span)), "state", owner, out);
    if sc.state(&sc.initial).is_none() {
        out.push(Diagnostic::error(
            &node,
            format!("initial state '{}' is not declared", sc.initial),
            sc.span,
        ));
    }
    for state in &sc.states {
        let ctx = format!("state {owner}.{}", state.name);
        for action in &state.on_entry {
            check_action(thing, action, &[], &ctx, state.span, out);
        }
    }
    for tr in &sc.transitions {
        let ctx = format!("transition {}", tr.label());
        for endpoint in [&tr.source, &tr.target] {
            if sc.state(endpoint).is_none() {
                out.push(Diagnostic::error(
                    &ctx,
                    format!("transition {} targets undeclared state '{endpoint}'", tr.label()),
                    tr.span,
                ));
            }
        }
        let mut params: Vec<&str> = Vec::new();
        match thing.port(&tr.trigger.port) {
            None => out.push(Diagnostic::error(
                &ctx,
                format!("trigger port '{}' is not declared", tr.trigger.port),
                tr.span,
            )),
            Some(port) => match thing.message(&tr.trigger.message) {
                None => out.push(Diagnostic::error(
                    &ctx,
                    format!("trigger message '{}' is not declared", tr.trigger.message),
                    tr.span,
                )),
                Some(msg) => {
                    if !port.receives.contains(&tr.trigger.message) {
                        out.push(Diagnostic::error(
                            &ctx,
                            format!("port '{}' does not receive message '{}'", port.name, msg.name),
                            tr.span,
                        ));
                    }
                    params = msg.params.iter().map(|p| p.name.as_str()).collect();
                }
            },
        }
        if let Some(guard) = &tr.guard {
            check_idents(thing, guard, &params, &ctx, tr.span, out);
        }
        for action in &tr.actions {
            check_action(thing, action, &params, &ctx, tr.span, out);
        }
    }
}

fn check_idents(thing: &Thing, expr: &Expr, params: &[&str], ctx: &str, span: Span, out: &mut Vec<Diagnostic>) {
    for id in expr.identifiers() {
        if thing.property(id).is_none() && !params.contains(&id) {
            out.push(Diagnostic::error(ctx, format!("unknown identifier '{id}'"), span));
        }
    }
}

fn check_action(thing: &Thing, action: &Action, params: &[&str], ctx: &str, span: Span, out: &mut Vec<Diagnostic>) {
    match action {
        Action::Emit { port, message, args } => {
            match thing.port(port) {
                None => out.push(Diagnostic::error(
                    ctx,
                    format!("emit through undeclared port '{port}'"),
                    span,
                )),
                Some(p) if !p.sends.contains(message) => out.push(Diagnostic::error(
                    ctx,
                    format!("port '{port}' does not send message '{message}'"),
                    span,
                )),
                Some(_) => {}
            }
            if let Some(msg) = thing.message(message) {
                if msg.params.len() != args.len() {
                    out.push(Diagnostic::error(
                        ctx,
                        format!(
                            "message '{message}' takes {} argument(s), {} given",
                            msg.params.len(),
                            args.len()
                        ),
                        span,
                    ));
                }
            }
            for a in args {
                check_idents(thing, a, params, ctx, span, out);
            }
        }
        Action::Set { property, value } => {
            if thing.property(property).is_none() {
                out.push(Diagnostic::error(
                    ctx,
                    format!("set of undeclared property '{property}'"),
                    span,
                ));
            }
            check_idents(thing, value, params, ctx, span, out);
        }
    }
}

fn check_configuration(model: &SourceModel, config: &Configuration, out: &mut Vec<Diagnostic>) {
    let owner = config.name.as_str();
    duplicates(
        config.instances.iter().map(|i| (i.name.as_str(), i.span)),
        "instance",
        owner,
        out,
    );
    for inst in &config.instances {
        if model.thing(&inst.thing).is_none() {
            out.push(Diagnostic::error(
                format!("instance {owner}.{}", inst.name),
                format!("instance of undeclared thing '{}'", inst.thing),
                inst.span,
            ));
        }
    }
    for conn in &config.connectors {
        let node = format!("connector {} => {}", conn.from, conn.to);
        let mut ends = Vec::new();
        for end in [&conn.from, &conn.to] {
            let Some(inst) = config.instance(&end.instance) else {
                out.push(Diagnostic::error(
                    &node,
                    format!("undeclared instance '{}'", end.instance),
                    conn.span,
                ));
                continue;
            };
            let Some(thing) = model.thing(&inst.thing) else {
                continue;
            };
            match thing.port(&end.port) {
                Some(port) => ends.push((thing, port)),
                None => out.push(Diagnostic::error(
                    &node,
                    format!("thing '{}' has no port '{}'", thing.name, end.port),
                    conn.span,
                )),
            }
        }
        if let [(a_thing, a), (b_thing, b)] = ends[..] {
            for (src_thing, src, dst_thing, dst) in [(a_thing, a, b_thing, b), (b_thing, b, a_thing, a)] {
                for m in &src.sends {
                    if !dst.receives.contains(m) {
                        out.push(Diagnostic::error(
                            &node,
                            format!(
                                "message '{m}' sent by {}.{} is not received by {}.{}",
                                src_thing.name, src.name, dst_thing.name, dst.name
                            ),
                            conn.span,
                        ));
                        continue;
                    }
                    let sig = |t: &Thing| {
                        t.message(m)
                            .map(|msg| msg.params.iter().map(|p| p.ty.clone()).collect::<Vec<_>>())
                    };
                    if let (Some(x), Some(y)) = (sig(src_thing), sig(dst_thing)) {
                        if x != y {
                            out.push(Diagnostic::error(
                                &node,
                                format!("message '{m}' has different signatures at each end"),
                                conn.span,
                            ));
                        }
                    }
                }
            }
        }
    }
}

/// Whether a node addressed by `path` exists in `model`.
pub(crate) fn node_exists(model: &SourceModel, path: &NodePath) -> bool {
    node_annotations(model, path).is_some()
}

/// Inline annotations of the node at `path`.
pub(crate) fn node_annotations<'a>(model: &'a SourceModel, path: &NodePath) -> Option<&'a [Annotation]> {
    let thing = || model.thing(path.owner());
    let member = path.member().unwrap_or_default();
    Some(match path {
        NodePath::Thing(_) => &thing()?.annotations,
        NodePath::Property(..) => &thing()?.property(member)?.annotations,
        NodePath::Message(..) => &thing()?.message(member)?.annotations,
        NodePath::Port(..) => &thing()?.port(member)?.annotations,
        NodePath::Statechart(_) => &thing()?.statechart.as_ref()?.annotations,
        NodePath::State(..) => &thing()?.statechart.as_ref()?.state(member)?.annotations,
        NodePath::Analytics(_) => &thing()?.analytics.as_ref()?.annotations,
        NodePath::Configuration(_) => &model.configuration(path.owner())?.annotations,
        NodePath::Instance(..) => &model.configuration(path.owner())?.instance(member)?.annotations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn diags(src: &str) -> Vec<Diagnostic> {
        validate_structure(&parse(src).unwrap())
    }

    #[test]
    fn duplicate_thing_name() {
        let d = diags("thing Sensor {} thing Sensor {}");
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("duplicate thing name"));
        assert_eq!(d[0].node, "thing Sensor");
    }

    #[test]
    fn minimal_valid_pim_is_clean() {
        let d = diags(
            r#"thing Sensor {
                property t : Double
                message reading(v : Double)
                message start()
                provided port out { sends reading receives start }
                statechart B init Idle {
                    state Idle {}
                    state Busy { on_entry emit out!reading(t) }
                    transition Idle -> Busy event out?start guard t >= 0.0
                }
                data_analytics da { features t model_algorithm mlp(hidden_layer_sizes 8) }
            }"#,
        );
        assert!(d.is_empty(), "{d:?}");
    }

    #[test]
    fn undeclared_transition_target_names_the_transition() {
        let d = diags(
            r#"thing T {
                message go()
                provided port p { receives go }
                statechart S init Idle {
                    state Idle {}
                    transition Idle -> Idle2 event p?go
                }
            }"#,
        );
        assert_eq!(d.len(), 1, "{d:?}");
        assert_eq!(d[0].node, "transition Idle -> Idle2 on p?go");
        assert!(d[0].message.contains("undeclared state 'Idle2'"));
        assert_eq!(d[0].line, 6);
    }

    #[test]
    fn member_and_reference_errors() {
        let d = diags(
            r#"thing T {
                property a : Int
                property a : Int
                message m()
                provided port p { sends nope receives m }
                statechart S init Missing {
                    state X {}
                    transition X -> X event p?other
                    transition X -> X event q?m
                }
                data_analytics d { features ghost prediction_results spook model_algorithm mlp(depth 3) }
            }"#,
        );
        let text: Vec<_> = d.iter().map(|d| d.message.as_str()).collect();
        for needle in [
            "duplicate property name 'a'",
            "sends undeclared message 'nope'",
            "initial state 'Missing' is not declared",
            "trigger message 'other' is not declared",
            "trigger port 'q' is not declared",
            "feature 'ghost' is not a declared property",
            "prediction_results 'spook' is not a declared property",
            "'depth' is not a hyperparameter of mlp",
        ] {
            assert!(text.iter().any(|m| m.contains(needle)), "missing {needle}: {text:?}");
        }
    }

    #[test]
    fn connector_compatibility() {
        let src = r#"
            thing A { message x(v : Int) message y() required port out { sends x, y } }
            thing B { message x(v : Double) provided port inp { receives x } }
            configuration C { instance a : A instance b : B connector a.out => b.inp connector a.nope => z.inp }
        "#;
        let d = diags(src);
        let text: Vec<_> = d.iter().map(|d| d.message.as_str()).collect();
        assert!(text
            .iter()
            .any(|m| m.contains("message 'y' sent by A.out is not received by B.inp")));
        assert!(text.iter().any(|m| m.contains("different signatures")));
        assert!(text.iter().any(|m| m.contains("thing 'A' has no port 'nope'")));
        assert!(text.iter().any(|m| m.contains("undeclared instance 'z'")));
    }

    #[test]
    fn validation_is_pure() {
        let m = parse("thing A {} thing A { property p : Int property p : Int }").unwrap();
        let first = validate_structure(&m);
        assert_eq!(first, validate_structure(&m));
        assert_eq!(first.len(), 2);
    }

    #[test]
    fn annotate_target_must_exist() {
        let d = diags(r#"thing A {} annotate property A.zz @k v"#);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].node, "property A.zz");
    }
}
