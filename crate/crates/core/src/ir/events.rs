//! Textual event lists: `port?message(arg, ...)` items separated by
//! `;` or whitespace. Arguments are integers, decimals, `true`/`false` or
//! double-quoted strings.

use super::{Event, Value};

pub fn parse_events(text: &str) -> Result<Vec<Event>, String> {
    let mut out = Vec::new();
    let mut rest = text.trim_start_matches(|c: char| c == ';' || c.is_whitespace());
    while !rest.is_empty() {
        let (event, tail) = parse_event(rest)?;
        out.push(event);
        rest = tail.trim_start_matches(|c: char| c == ';' || c.is_whitespace());
    }
    Ok(out)
}

fn is_ident(s: &str) -> bool {
    let mut c = s.chars();
    c.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && c.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_event(s: &str) -> Result<(Event, &str), String> {
    let q = s.find('?').ok_or_else(|| format!("expected port?message at '{s}'"))?;
    let port = &s[..q];
    let after = &s[q + 1..];
    let end = after
        .find(|c: char| c == '(' || c == ';' || c.is_whitespace())
        .unwrap_or(after.len());
    let message = &after[..end];
    if !is_ident(port) || !is_ident(message) {
        return Err(format!("bad event '{}'", &s[..q + 1 + end]));
    }
    let mut tail = &after[end..];
    let mut args = Vec::new();
    if let Some(inner) = tail.strip_prefix('(') {
        let close = closing_paren(inner).ok_or_else(|| format!("unclosed '(' in event {port}?{message}"))?;
        args = split_args(&inner[..close])?
            .into_iter()
            .map(parse_value)
            .collect::<Result<_, _>>()?;
        tail = &inner[close + 1..];
    }
    Ok((Event::new(port, message).with_args(args), tail))
}

/// Index of the `)` closing an argument list, skipping quoted strings.
fn closing_paren(s: &str) -> Option<usize> {
    let mut quoted = false;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            ')' if !quoted => return Some(i),
            _ => {}
        }
    }
    None
}

fn split_args(s: &str) -> Result<Vec<&str>, String> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut parts = Vec::new();
    let mut start = 0;
    let mut quoted = false;
    let mut escaped = false;
    for (i, c) in s.char_indices() {
        match c {
            _ if escaped => escaped = false,
            '\\' if quoted => escaped = true,
            '"' => quoted = !quoted,
            ',' if !quoted => {
                parts.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(s[start..].trim());
    if parts.iter().any(|p| p.is_empty()) {
        return Err(format!("empty argument in '({s})'"));
    }
    Ok(parts)
}

fn parse_value(s: &str) -> Result<Value, String> {
    match s {
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    if let Some(body) = s.strip_prefix('"').and_then(|b| b.strip_suffix('"')) {
        let mut out = String::new();
        let mut chars = body.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                match chars.next() {
                    Some('n') => out.push('\n'),
                    Some('t') => out.push('\t'),
                    Some(c @ ('"' | '\\')) => out.push(c),
                    other => {
                        return Err(format!(
                            "bad escape '\\{}' in {s}",
                            other.map_or(String::new(), String::from)
                        ))
                    }
                }
            } else {
                out.push(c);
            }
        }
        return Ok(Value::Str(out));
    }
    if let Ok(i) = s.parse::<i64>() {
        return Ok(Value::Int(i));
    }
    match s.parse::<f64>() {
        Ok(f) if f.is_finite() => Ok(Value::Float(f)),
        _ => Err(format!("bad argument '{s}'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists() {
        let e = parse_events("io?sample; feed?verdict(1)  feed?note(\"a, b\", -2.5, true)").unwrap();
        assert_eq!(e.len(), 3);
        assert_eq!(e[0], Event::new("io", "sample"));
        assert_eq!(e[1].args, [Value::Int(1)]);
        assert_eq!(
            e[2].args,
            [Value::Str("a, b".into()), Value::Float(-2.5), Value::Bool(true)]
        );
        assert!(parse_events("").unwrap().is_empty());
    }

    #[test]
    fn rejects_malformed_items() {
        for bad in [
            "sample",
            "io?",
            "io?x(1",
            "io?x(1,)",
            "io?x(nan)",
            "1o?x",
            "io?x(\"\\q\")",
        ] {
            assert!(parse_events(bad).is_err(), "{bad}");
        }
    }
}
