use std::fmt::Write;

use crate::ir::expr::quote;
use crate::ir::{
    Action, Annotation, Configuration, DataAnalyticsSpec, HyperValue, Literal, Port, PortKind, SourceModel, Statechart,
    Thing,
};

use super::lexer::{is_bareword_char, is_keyword};

const INDENT: &str = "    ";

/// Canonical text of a model. The empty model prints as the empty string;
/// anything else ends with exactly one newline.
pub fn pretty_print(model: &SourceModel) -> String {
    let mut sections: Vec<String> = Vec::new();
    if !model.imports.is_empty() {
        let mut s = String::new();
        for imp in &model.imports {
            let _ = writeln!(s, "import {}", quote(&imp.path));
        }
        sections.push(s);
    }
    for thing in &model.things {
        sections.push(print_thing(thing));
    }
    for cfg in &model.configurations {
        sections.push(print_configuration(cfg));
    }
    if !model.directives.is_empty() {
        let mut s = String::new();
        for d in &model.directives {
            let _ = writeln!(s, "annotate {}{}", d.target, postfix(&d.annotations));
        }
        sections.push(s);
    }
    sections.join("\n")
}

fn annotation_value(value: &str) -> String {
    let bare = value
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && value.chars().all(is_bareword_char);
    if bare {
        value.to_string()
    } else {
        quote(value)
    }
}

fn annotation(a: &Annotation) -> String {
    format!("@{} {}", a.key, annotation_value(&a.value))
}

/// Annotations written after a declaration on the same line.
fn postfix(annotations: &[Annotation]) -> String {
    annotations.iter().map(|a| format!(" {}", annotation(a))).collect()
}

fn body_annotations(out: &mut String, annotations: &[Annotation], depth: usize) {
    for a in annotations {
        let _ = writeln!(out, "{}{}", INDENT.repeat(depth), annotation(a));
    }
}

fn print_thing(thing: &Thing) -> String {
    let mut out = format!("thing {} {{\n", thing.name);
    body_annotations(&mut out, &thing.annotations, 1);
    for p in &thing.properties {
        let init = match &p.initial {
            Some(lit) => format!(" = {lit}"),
            None => String::new(),
        };
        let _ = writeln!(
            out,
            "{INDENT}property {} : {}{init}{}",
            p.name,
            p.ty,
            postfix(&p.annotations)
        );
    }
    for m in &thing.messages {
        let params: Vec<String> = m.params.iter().map(|p| format!("{} : {}", p.name, p.ty)).collect();
        let _ = writeln!(
            out,
            "{INDENT}message {}({}){}",
            m.name,
            params.join(", "),
            postfix(&m.annotations)
        );
    }
    for port in &thing.ports {
        print_port(&mut out, port);
    }
    if let Some(da) = &thing.analytics {
        print_analytics(&mut out, da);
    }
    if let Some(sc) = &thing.statechart {
        print_statechart(&mut out, sc);
    }
    out.push_str("}\n");
    out
}

fn print_port(out: &mut String, port: &Port) {
    let kind = match port.kind {
        PortKind::Provided => "provided",
        PortKind::Required => "required",
    };
    let _ = writeln!(out, "{INDENT}{kind} port {} {{", port.name);
    body_annotations(out, &port.annotations, 2);
    if !port.sends.is_empty() {
        let _ = writeln!(out, "{INDENT}{INDENT}sends {}", port.sends.join(", "));
    }
    if !port.receives.is_empty() {
        let _ = writeln!(out, "{INDENT}{INDENT}receives {}", port.receives.join(", "));
    }
    let _ = writeln!(out, "{INDENT}}}");
}

fn hyper_value(v: &HyperValue) -> String {
    match v {
        HyperValue::Int(i) => i.to_string(),
        HyperValue::Float(x) => Literal::Float(*x).to_string(),
        HyperValue::Ident(s) => s.clone(),
        HyperValue::Str(s) => quote(s),
        HyperValue::List(items) => {
            let inner: Vec<String> = items.iter().map(hyper_value).collect();
            format!("[{}]", inner.join(", "))
        }
    }
}

fn print_analytics(out: &mut String, da: &DataAnalyticsSpec) {
    let pad = INDENT.repeat(2);
    let _ = writeln!(out, "{INDENT}data_analytics {} {{", da.name);
    body_annotations(out, &da.annotations, 2);
    if let Some(l) = da.labels {
        let _ = writeln!(out, "{pad}labels {}", l.keyword());
    }
    if !da.features.is_empty() {
        let _ = writeln!(out, "{pad}features {}", da.features.join(", "));
    }
    if let Some(p) = &da.prediction_results {
        let _ = writeln!(out, "{pad}prediction_results {p}");
    }
    if let Some(s) = da.sequential {
        let _ = writeln!(out, "{pad}sequential {s}");
    }
    if let Some(t) = da.timestamps {
        let _ = writeln!(out, "{pad}timestamps {}", t.keyword());
    }
    if let Some(alg) = &da.model_algorithm {
        if alg.hyperparameters.is_empty() {
            let _ = writeln!(out, "{pad}model_algorithm {}", alg.name);
        } else {
            let params: Vec<String> = alg
                .hyperparameters
                .iter()
                .map(|h| format!("{} {}", h.name, hyper_value(&h.value)))
                .collect();
            let _ = writeln!(out, "{pad}model_algorithm {}({})", alg.name, params.join(", "));
        }
    }
    if let Some(t) = &da.training_results {
        let _ = writeln!(out, "{pad}training_results {}", quote(t));
    }
    if let Some(d) = &da.dataset {
        let _ = writeln!(out, "{pad}dataset {}", quote(d));
    }
    let _ = writeln!(out, "{INDENT}}}");
}

fn action(a: &Action) -> String {
    match a {
        Action::Emit { port, message, args } => {
            let args: Vec<String> = args.iter().map(|e| e.to_string()).collect();
            format!("emit {port}!{message}({})", args.join(", "))
        }
        Action::Set { property, value } => format!("set {property} = {value}"),
    }
}

fn action_block(actions: &[Action]) -> String {
    match actions {
        [single] => action(single),
        many => {
            let inner: Vec<String> = many.iter().map(action).collect();
            format!("{{ {} }}", inner.join("; "))
        }
    }
}

fn print_statechart(out: &mut String, sc: &Statechart) {
    let pad = INDENT.repeat(2);
    let _ = writeln!(out, "{INDENT}statechart {} init {} {{", sc.name, sc.initial);
    body_annotations(out, &sc.annotations, 2);
    for state in &sc.states {
        if state.annotations.is_empty() && state.on_entry.is_empty() {
            let _ = writeln!(out, "{pad}state {} {{}}", state.name);
            continue;
        }
        let _ = writeln!(out, "{pad}state {} {{", state.name);
        body_annotations(out, &state.annotations, 3);
        if !state.on_entry.is_empty() {
            let _ = writeln!(out, "{pad}{INDENT}on_entry {}", action_block(&state.on_entry));
        }
        let _ = writeln!(out, "{pad}}}");
    }
    for tr in &sc.transitions {
        let mut line = format!("{pad}transition {} -> {} event {}", tr.source, tr.target, tr.trigger);
        if let Some(g) = &tr.guard {
            let _ = write!(line, " guard {g}");
        }
        if !tr.actions.is_empty() {
            let _ = write!(line, " action {}", action_block(&tr.actions));
        }
        line.push_str(&postfix(&tr.annotations));
        out.push_str(&line);
        out.push('\n');
    }
    let _ = writeln!(out, "{INDENT}}}");
}

fn print_configuration(cfg: &Configuration) -> String {
    let mut out = format!("configuration {} {{\n", cfg.name);
    body_annotations(&mut out, &cfg.annotations, 1);
    for inst in &cfg.instances {
        let _ = writeln!(
            out,
            "{INDENT}instance {} : {}{}",
            inst.name,
            inst.thing,
            postfix(&inst.annotations)
        );
    }
    for c in &cfg.connectors {
        let _ = writeln!(
            out,
            "{INDENT}connector {} => {}{}",
            c.from,
            c.to,
            postfix(&c.annotations)
        );
    }
    out.push_str("}\n");
    out
}

/// Whether `name` can be printed as an identifier and read back unchanged.
pub fn is_plain_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !is_keyword(name)
}
