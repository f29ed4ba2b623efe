//! Text templates with `{{name}}` substitution, `{{lit name}}` string
//! literals in the target language, and `{{#each list}}...{{/each}}` loops.
//!
//! A block tag alone on its line consumes that whole line, so loops do not
//! leave blank lines behind. Unknown names are render errors, never empty
//! output.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("template {template}, line {line}: {message}")]
pub struct TemplateError {
    pub template: String,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone)]
pub(crate) enum Value {
    Str(String),
    List(Vec<Ctx>),
}

/// Name-to-value bindings for one template scope.
#[derive(Debug, Clone, Default)]
pub(crate) struct Ctx(BTreeMap<&'static str, Value>);

impl Ctx {
    pub(crate) fn new() -> Self {
        Ctx::default()
    }

    pub(crate) fn set(mut self, key: &'static str, value: impl Into<String>) -> Self {
        self.0.insert(key, Value::Str(value.into()));
        self
    }

    pub(crate) fn list(mut self, key: &'static str, items: Vec<Ctx>) -> Self {
        self.0.insert(key, Value::List(items));
        self
    }

    /// A list of zero or one empty scopes, for optional sections.
    pub(crate) fn flag(self, key: &'static str, on: bool) -> Self {
        self.list(key, if on { vec![Ctx::new()] } else { Vec::new() })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Text(String),
    Var { name: String, literal: bool, line: usize },
    Each { name: String, body: Vec<Node>, line: usize },
}

#[derive(Debug, Clone)]
pub(crate) struct Template {
    name: String,
    nodes: Vec<Node>,
}

enum Tag<'a> {
    Var(&'a str, bool),
    Open(&'a str),
    Close,
}

fn classify(inner: &str) -> Option<Tag<'_>> {
    let inner = inner.trim();
    let ident = |s: &str| !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if let Some(rest) = inner.strip_prefix("#each ") {
        return ident(rest.trim()).then(|| Tag::Open(rest.trim()));
    }
    if inner == "/each" {
        return Some(Tag::Close);
    }
    if let Some(rest) = inner.strip_prefix("lit ") {
        return ident(rest.trim()).then(|| Tag::Var(rest.trim(), true));
    }
    ident(inner).then_some(Tag::Var(inner, false))
}

impl Template {
    pub(crate) fn parse(name: &str, src: &str) -> Result<Self, TemplateError> {
        let err = |line: usize, message: String| TemplateError {
            template: name.to_string(),
            line,
            message,
        };
        // Stack of open loops: (name, line, nodes collected so far in the parent).
        let mut stack: Vec<(String, usize, Vec<Node>)> = Vec::new();
        let mut nodes = Vec::new();
        let mut text = String::new();
        let mut rest = src;
        let mut line = 1;
        // Whether `rest` begins at the start of a source line.
        let mut fresh_line = true;
        while let Some(start) = rest.find("{{") {
            let end = rest[start..]
                .find("}}")
                .map(|e| start + e)
                .ok_or_else(|| err(line, "unclosed '{{'".into()))?;
            let tag_line = line + rest[..start].matches('\n').count();
            let tag = classify(&rest[start + 2..end])
                .ok_or_else(|| err(tag_line, format!("bad tag '{}'", &rest[start..end + 2])))?;
            let mut before = &rest[..start];
            let mut after = &rest[end + 2..];
            let mut standalone = false;
            if matches!(tag, Tag::Open(_) | Tag::Close) {
                let line_start = before.rfind('\n').map(|i| i + 1);
                let starts_line = line_start.is_some() || fresh_line;
                let lead = &before[line_start.unwrap_or(0)..];
                let trail = after.find('\n').map_or(after.len(), |i| i + 1);
                if starts_line && lead.trim().is_empty() && after[..trail].trim().is_empty() {
                    before = &before[..line_start.unwrap_or(0)];
                    after = &after[trail..];
                    standalone = true;
                }
            }
            line += rest[..rest.len() - after.len()].matches('\n').count();
            fresh_line = standalone;
            text.push_str(before);
            if !text.is_empty() {
                nodes.push(Node::Text(std::mem::take(&mut text)));
            }
            match tag {
                Tag::Var(n, literal) => nodes.push(Node::Var {
                    name: n.to_string(),
                    literal,
                    line: tag_line,
                }),
                Tag::Open(n) => stack.push((n.to_string(), tag_line, std::mem::take(&mut nodes))),
                Tag::Close => {
                    let (open, open_line, parent) = stack
                        .pop()
                        .ok_or_else(|| err(tag_line, "'/each' closes nothing".into()))?;
                    let body = std::mem::replace(&mut nodes, parent);
                    nodes.push(Node::Each {
                        name: open,
                        body,
                        line: open_line,
                    });
                }
            }
            rest = after;
        }
        text.push_str(rest);
        if !text.is_empty() {
            nodes.push(Node::Text(text));
        }
        if let Some((open, open_line, _)) = stack.pop() {
            return Err(err(open_line, format!("'#each {open}' is never closed")));
        }
        Ok(Template {
            name: name.to_string(),
            nodes,
        })
    }

    pub(crate) fn render(&self, ctx: &Ctx, literal: &dyn Fn(&str) -> String) -> Result<String, TemplateError> {
        let mut out = String::new();
        let mut scopes = vec![ctx];
        self.render_nodes(&self.nodes, &mut scopes, literal, &mut out)?;
        Ok(out)
    }

    fn render_nodes<'c>(
        &self,
        nodes: &[Node],
        scopes: &mut Vec<&'c Ctx>,
        literal: &dyn Fn(&str) -> String,
        out: &mut String,
    ) -> Result<(), TemplateError> {
        for node in nodes {
            match node {
                Node::Text(t) => out.push_str(t),
                Node::Var {
                    name,
                    literal: lit,
                    line,
                } => match lookup(scopes, name) {
                    Some(Value::Str(s)) if *lit => out.push_str(&literal(s)),
                    Some(Value::Str(s)) => out.push_str(s),
                    Some(Value::List(_)) => return Err(self.err(*line, format!("'{name}' is a list"))),
                    None => return Err(self.err(*line, format!("unbound name '{name}'"))),
                },
                Node::Each { name, body, line } => match lookup(scopes, name) {
                    Some(Value::List(items)) => {
                        for item in items {
                            scopes.push(item);
                            self.render_nodes(body, scopes, literal, out)?;
                            scopes.pop();
                        }
                    }
                    Some(Value::Str(_)) => return Err(self.err(*line, format!("'{name}' is not a list"))),
                    None => return Err(self.err(*line, format!("unbound list '{name}'"))),
                },
            }
        }
        Ok(())
    }

    fn err(&self, line: usize, message: String) -> TemplateError {
        TemplateError {
            template: self.name.clone(),
            line,
            message,
        }
    }
}

fn lookup<'c>(scopes: &[&'c Ctx], name: &str) -> Option<&'c Value> {
    scopes.iter().rev().find_map(|s| s.0.get(name))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(src: &str, ctx: &Ctx) -> Result<String, TemplateError> {
        Template::parse("t", src)?.render(ctx, &|s| format!("<{s}>"))
    }

    #[test]
    fn substitutes_and_quotes() {
        let ctx = Ctx::new().set("a", "x").set("b", "y z");
        assert_eq!(render("{{a}} = {{lit b}};", &ctx).unwrap(), "x = <y z>;");
    }

    #[test]
    fn standalone_loop_tags_leave_no_lines() {
        let ctx = Ctx::new()
            .set("n", "N")
            .list("items", vec![Ctx::new().set("v", "1"), Ctx::new().set("v", "2")]);
        let src = "head\n    {{#each items}}\n  {{n}}{{v}}\n    {{/each}}\ntail\n";
        assert_eq!(render(src, &ctx).unwrap(), "head\n  N1\n  N2\ntail\n");
    }

    #[test]
    fn inline_loops_keep_surrounding_text() {
        let ctx = Ctx::new().list("xs", vec![Ctx::new().set("x", "a"), Ctx::new().set("x", "b")]);
        assert_eq!(render("[{{#each xs}}{{x}},{{/each}}]", &ctx).unwrap(), "[a,b,]");
        assert_eq!(render("{{#each xs}}{{x}}{{/each}}\n", &ctx).unwrap(), "ab\n");
    }

    #[test]
    fn nested_loops_see_outer_names() {
        let inner = vec![Ctx::new().set("y", "1"), Ctx::new().set("y", "2")];
        let ctx = Ctx::new().list("xs", vec![Ctx::new().set("x", "a").list("ys", inner)]);
        let src = "{{#each xs}}\n{{#each ys}}\n{{x}}{{y}}\n{{/each}}\n{{/each}}\n";
        assert_eq!(render(src, &ctx).unwrap(), "a1\na2\n");
    }

    #[test]
    fn flags_make_optional_sections() {
        let on = Ctx::new().flag("f", true);
        let off = Ctx::new().flag("f", false);
        let src = "a\n{{#each f}}\nb\n{{/each}}\nc\n";
        assert_eq!(render(src, &on).unwrap(), "a\nb\nc\n");
        assert_eq!(render(src, &off).unwrap(), "a\nc\n");
    }

    #[test]
    fn errors_carry_lines() {
        let e = render("ok\n{{missing}}", &Ctx::new()).unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (2, "unbound name 'missing'"));
        let e = Template::parse("t", "x\n{{/each}}").unwrap_err();
        assert_eq!((e.line, e.message.as_str()), (2, "'/each' closes nothing"));
        assert!(Template::parse("t", "{{#each a}}\n{{/each b}}").is_err());
        assert!(Template::parse("t", "{{#each a}}").is_err());
        assert!(Template::parse("t", "{{ no good }}").is_err());
        assert!(Template::parse("t", "x {{ y").is_err());
    }

    #[test]
    fn braces_without_tags_pass_through() {
        assert_eq!(
            render("int f() { return 0; }", &Ctx::new()).unwrap(),
            "int f() { return 0; }"
        );
    }
}
