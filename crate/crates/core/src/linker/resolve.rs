use std::collections::{BTreeMap, HashSet};
use std::io;

use sha2::{Digest, Sha256};

use crate::ir::{Diagnostic, NodePath, SourceModel, Span};
use crate::syntax::parse;

use super::{compose_labeled, LinkError, LinkedModel, SourceFile};

/// Reads files from the local file system.
pub fn fs_loader(path: &str) -> io::Result<String> {
    std::fs::read_to_string(path)
}

/// Joins `rel` onto `base_dir` and removes `.` and `..` segments lexically.
/// Absolute `rel` paths ignore `base_dir`.
pub fn normalize_path(base_dir: &str, rel: &str) -> String {
    let absolute = rel.starts_with('/') || (rel.is_empty() && base_dir.starts_with('/'));
    let joined = if rel.starts_with('/') || base_dir.is_empty() {
        rel.to_string()
    } else {
        format!("{base_dir}/{rel}")
    };
    let absolute = absolute || joined.starts_with('/');
    let mut parts: Vec<&str> = Vec::new();
    for seg in joined.split('/') {
        match seg {
            "" | "." => {}
            ".." => {
                if parts.last().is_some_and(|p| *p != "..") {
                    parts.pop();
                } else if !absolute {
                    parts.push("..");
                }
            }
            s => parts.push(s),
        }
    }
    let body = parts.join("/");
    if absolute {
        format!("/{body}")
    } else {
        body
    }
}

fn parent_dir(path: &str) -> &str {
    path.rfind('/').map_or("", |i| if i == 0 { "/" } else { &path[..i] })
}

fn sha256_hex(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

struct Resolver<'a> {
    loader: &'a dyn Fn(&str) -> io::Result<String>,
    stack: Vec<String>,
    visited: HashSet<String>,
    sources: Vec<SourceFile>,
    merged: SourceModel,
    provenance: BTreeMap<NodePath, String>,
    diags: Vec<Diagnostic>,
}

impl Resolver<'_> {
    fn visit_imports(&mut self, file: &str, model: &SourceModel) -> Result<(), LinkError> {
        let dir = parent_dir(file).to_string();
        for imp in &model.imports {
            let path = normalize_path(&dir, &imp.path);
            self.visit(&path, file, imp.span)?;
        }
        Ok(())
    }

    fn visit(&mut self, path: &str, importer: &str, span: Span) -> Result<(), LinkError> {
        let node = format!("import \"{path}\"");
        if let Some(pos) = self.stack.iter().position(|p| p == path) {
            let mut cycle = self.stack[pos..].to_vec();
            cycle.push(path.to_string());
            self.diags
                .push(Diagnostic::error(node, format!("import cycle: {}", cycle.join(" -> ")), span).in_file(importer));
            return Ok(());
        }
        if !self.visited.insert(path.to_string()) {
            return Ok(());
        }
        let text = match (self.loader)(path) {
            Ok(t) => t,
            Err(e) => {
                self.diags
                    .push(Diagnostic::error(node, format!("cannot read '{path}': {e}"), span).in_file(importer));
                return Ok(());
            }
        };
        let model = parse(&text).map_err(|errors| LinkError::Parse {
            file: path.to_string(),
            errors,
        })?;
        self.stack.push(path.to_string());
        self.visit_imports(path, &model)?;
        self.stack.pop();
        self.sources.push(SourceFile {
            path: path.to_string(),
            sha256: sha256_hex(&text),
        });
        self.merge(path, model);
        Ok(())
    }

    fn claim(&mut self, key: NodePath, file: &str, span: Span) -> bool {
        if let Some(prev) = self.provenance.get(&key) {
            if prev != file {
                self.diags.push(
                    Diagnostic::error(
                        key.to_string(),
                        format!("'{}' is declared in both {prev} and {file}", key.owner()),
                        span,
                    )
                    .in_file(file),
                );
            }
            return false;
        }
        self.provenance.insert(key, file.to_string());
        true
    }

    fn merge(&mut self, file: &str, model: SourceModel) {
        for t in model.things {
            if self.claim(NodePath::Thing(t.name.clone()), file, t.span) {
                self.merged.things.push(t);
            }
        }
        for c in model.configurations {
            if self.claim(NodePath::Configuration(c.name.clone()), file, c.span) {
                self.merged.configurations.push(c);
            }
        }
        self.merged.directives.extend(model.directives);
    }
}

/// Loads `entry` and every file it imports (transitively, each file once),
/// and merges them. Import paths are relative to the importing file.
///
/// When the entry file imports others it is treated as an overlay: its
/// configurations and `annotate` directives are composed onto the imported
/// things, and it may not declare things of its own.
pub fn resolve_imports(entry: &str, loader: &dyn Fn(&str) -> io::Result<String>) -> Result<LinkedModel, LinkError> {
    let entry_path = normalize_path("", entry);
    let text = loader(entry).map_err(|e| LinkError::Io {
        file: entry.to_string(),
        message: e.to_string(),
    })?;
    let model = parse(&text).map_err(|errors| LinkError::Parse {
        file: entry.to_string(),
        errors,
    })?;
    let mut r = Resolver {
        loader,
        stack: vec![entry_path.clone()],
        visited: HashSet::from([entry_path.clone()]),
        sources: vec![SourceFile {
            path: entry_path.clone(),
            sha256: sha256_hex(&text),
        }],
        merged: SourceModel::default(),
        provenance: BTreeMap::new(),
        diags: Vec::new(),
    };
    r.visit_imports(&entry_path, &model)?;
    if !r.diags.is_empty() {
        return Err(LinkError::Semantic(r.diags));
    }
    let result = if model.imports.is_empty() {
        r.merge(&entry_path, model);
        if !r.diags.is_empty() {
            return Err(LinkError::Semantic(r.diags));
        }
        compose_labeled(&r.merged, r.provenance, &SourceModel::default(), &entry_path, r.sources)
    } else {
        let overlay = SourceModel {
            imports: Vec::new(),
            ..model
        };
        compose_labeled(&r.merged, r.provenance, &overlay, &entry_path, r.sources)
    };
    result.map_err(LinkError::Semantic)
}
