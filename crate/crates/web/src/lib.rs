//! WebAssembly bindings for the static page in `www/`.
//!
//! Every export takes plain strings and returns a JSON document with a
//! `status` field, so the page never has to catch exceptions and the same
//! functions run natively under `cargo test`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use mdml::ir::{parse_events, simulate_statechart};
use mdml::linker::{diagnose, resolve_imports, LinkError, LinkedModel};
use mdml::mlcore::{Activation, MlpArchitecture};
use mdml::platform::{check_deployability, estimate_sizes, Policy, Registry};

/// Name the editor buffer is linked under. Imports cannot be resolved in the
/// browser, so any other path is reported as missing.
const BUFFER: &str = "model.mdml";

fn render(v: Value) -> String {
    v.to_string()
}

fn load(text: &str) -> Result<LinkedModel, Value> {
    let loader = |path: &str| -> std::io::Result<String> {
        if path == BUFFER {
            Ok(text.to_string())
        } else {
            Err(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "imports are not available in the browser demo",
            ))
        }
    };
    resolve_imports(BUFFER, &loader).map_err(|e| match e {
        LinkError::Parse { errors, .. } => json!({
            "status": "syntax_error",
            "errors": errors.iter().map(|e| json!({
                "line": e.line,
                "column": e.column,
                "message": e.to_string(),
            })).collect::<Vec<_>>(),
        }),
        LinkError::Io { file, message } => json!({"status": "io_error", "message": format!("{file}: {message}")}),
        LinkError::Semantic(d) => json!({"status": "model_error", "diagnostics": d}),
    })
}

/// Parses and checks a single-file model.
#[wasm_bindgen]
pub fn check(text: &str) -> String {
    let linked = match load(text) {
        Ok(l) => l,
        Err(v) => return render(v),
    };
    let registry = Registry::builtin();
    let diags = diagnose(&linked, &registry);
    let ok = !diags.iter().any(|d| d.is_error());
    render(json!({
        "status": if ok { "ok" } else { "model_error" },
        "diagnostics": diags.iter().map(|d| json!({
            "severity": if d.is_error() { "error" } else { "warning" },
            "message": d.to_string(),
        })).collect::<Vec<_>>(),
        "things": linked.model.things.iter().map(|t| &t.name).collect::<Vec<_>>(),
        "configurations": linked.model.configurations.iter().map(|c| json!({
            "name": c.name,
            "target": linked.compiler_of(&c.name),
        })).collect::<Vec<_>>(),
    }))
}

/// Size report for `arch` (comma-separated widths) and, when `platform` is
/// non-empty, the deployability decision under `policy` (`source` or
/// `strict`).
#[wasm_bindgen]
pub fn estimate(arch: &str, platform: &str, policy: &str) -> String {
    let dims: Result<Vec<usize>, _> = arch.split(',').map(|d| d.trim().parse::<usize>()).collect();
    let Ok(dims) = dims else {
        return render(json!({"status": "error", "message": format!("bad architecture '{arch}'")}));
    };
    let report = match MlpArchitecture::classifier(dims, Activation::Relu).and_then(|a| estimate_sizes(&a)) {
        Ok(r) => r,
        Err(e) => return render(json!({"status": "error", "message": e.to_string()})),
    };
    if platform.is_empty() {
        return render(json!({"status": "ok", "sizes": report}));
    }
    let Some(policy) = Policy::from_name(policy) else {
        return render(json!({"status": "error", "message": format!("unknown policy '{policy}'")}));
    };
    let registry = Registry::builtin();
    let Some(profile) = registry.lookup(platform) else {
        return render(json!({"status": "error", "message": format!("unknown platform '{platform}'")}));
    };
    let decision = check_deployability(&report, profile, policy);
    render(json!({
        "status": if decision.accepted { "ok" } else { "rejected" },
        "sizes": report,
        "deploy": decision,
    }))
}

/// Runs `thing`'s statechart in `text` on an event list such as
/// `io?sample; feed?verdict(1)`.
#[wasm_bindgen]
pub fn simulate(text: &str, thing: &str, events: &str) -> String {
    let linked = match load(text) {
        Ok(l) => l,
        Err(v) => return render(v),
    };
    let Some(t) = linked.model.thing(thing) else {
        return render(json!({"status": "error", "message": format!("no thing named '{thing}'")}));
    };
    let events = match parse_events(events) {
        Ok(e) => e,
        Err(e) => return render(json!({"status": "error", "message": e})),
    };
    match simulate_statechart(t, &events) {
        Ok(trace) => render(json!({"status": "ok", "trace": trace})),
        Err(e) => render(json!({"status": "error", "message": e.to_string()})),
    }
}

/// Ids of the built-in platforms, for the page's drop-down.
#[wasm_bindgen]
pub fn platforms() -> String {
    render(json!(Registry::builtin().ids()))
}
