use std::fmt::Write;

use super::ConvError;

pub const BYTES_PER_LINE: usize = 12;

fn is_c_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// `xxd -i` style C source: 12 bytes per line, two-space indent, followed by
/// a `{symbol}_len` definition. Ends with a newline.
pub fn emit_carray(payload: &[u8], symbol: &str) -> Result<String, ConvError> {
    if !is_c_identifier(symbol) {
        return Err(ConvError::InvalidSymbol(symbol.to_string()));
    }
    let mut out = String::with_capacity(carray_size(payload.len() as u64, symbol.len()) as usize);
    let _ = writeln!(out, "unsigned char {symbol}[] = {{");
    let lines = payload.chunks(BYTES_PER_LINE).count();
    for (i, chunk) in payload.chunks(BYTES_PER_LINE).enumerate() {
        out.push_str("  ");
        for (j, b) in chunk.iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            let _ = write!(out, "0x{b:02x}");
        }
        if i + 1 < lines {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("};\n");
    let _ = writeln!(out, "unsigned int {symbol}_len = {};", payload.len());
    Ok(out)
}

/// Limit of source characters per payload byte: `0xNN, ` per byte plus an
/// indent and newline per line of [`BYTES_PER_LINE`].
pub const EXPANSION_RATIO: f64 = (6 * BYTES_PER_LINE + 2) as f64 / BYTES_PER_LINE as f64;

/// Exact length of [`emit_carray`] output for `n` payload bytes and a
/// symbol of `symbol_len` characters.
pub fn carray_size(n: u64, symbol_len: usize) -> u64 {
    let l = symbol_len as u64;
    let body = if n == 0 {
        0
    } else {
        6 * n - 1 + 2 * n.div_ceil(BYTES_PER_LINE as u64)
    };
    46 + 2 * l + body + n.to_string().len() as u64
}

/// Recovers the payload from C-array source. Accepts any whitespace layout;
/// a `_len` definition, when present, must match the byte count.
pub fn parse_carray(text: &str) -> Result<Vec<u8>, ConvError> {
    let err = |line: usize, column: usize, message: String| ConvError::Carray { line, column, message };
    let open = text
        .find('{')
        .ok_or_else(|| err(1, 1, "missing '{' of the array initializer".into()))?;
    let decl = &text[..open];
    let name = decl
        .split('[')
        .next()
        .and_then(|s| s.split_whitespace().last())
        .filter(|s| is_c_identifier(s))
        .ok_or_else(|| err(1, 1, "missing array declaration".into()))?
        .to_string();
    let close = text[open..]
        .find('}')
        .map(|i| open + i)
        .ok_or_else(|| err(1, 1, "missing '}' of the array initializer".into()))?;

    let position = |offset: usize| {
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = offset - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        (line, column)
    };

    let mut bytes = Vec::new();
    let body = &text[open + 1..close];
    let mut offset = open + 1;
    for item in body.split(',') {
        let trimmed = item.trim();
        let lead = item.len() - item.trim_start().len();
        let at = offset + lead;
        offset += item.len() + 1;
        if trimmed.is_empty() {
            if bytes.is_empty() && body.trim().is_empty() {
                continue;
            }
            let (l, c) = position(at);
            return Err(err(l, c, "empty element in the initializer".into()));
        }
        let hex = trimmed
            .strip_prefix("0x")
            .or_else(|| trimmed.strip_prefix("0X"))
            .filter(|h| (1..=2).contains(&h.len()));
        match hex.and_then(|h| u8::from_str_radix(h, 16).ok()) {
            Some(b) => bytes.push(b),
            None => {
                let (l, c) = position(at);
                return Err(err(l, c, format!("malformed hex byte '{trimmed}'")));
            }
        }
    }

    let rest = &text[close + 1..];
    let len_decl = format!("{name}_len");
    if let Some(i) = rest.find(&len_decl) {
        let after = &rest[i + len_decl.len()..];
        let value = after
            .trim_start()
            .strip_prefix('=')
            .and_then(|s| s.split(';').next())
            .map(str::trim);
        let (l, c) = position(close + 1 + i);
        let declared: usize = value
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| err(l, c, format!("malformed {len_decl} definition")))?;
        if declared != bytes.len() {
            return Err(ConvError::LengthMismatch {
                declared,
                actual: bytes.len(),
            });
        }
    }
    Ok(bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_byte_layout() {
        let text = emit_carray(&[0xAB], "m").unwrap();
        assert_eq!(text, "unsigned char m[] = {\n  0xab\n};\nunsigned int m_len = 1;\n");
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn thirteen_bytes_fold_after_twelve() {
        let payload: Vec<u8> = (0..13).collect();
        let text = emit_carray(&payload, "m").unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[1],
            "  0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08, 0x09, 0x0a, 0x0b,"
        );
        assert_eq!(lines[2], "  0x0c");
        assert!(text.lines().all(|l| !l.ends_with(' ')));
    }

    #[test]
    fn empty_payload() {
        let text = emit_carray(&[], "m").unwrap();
        assert_eq!(text, "unsigned char m[] = {\n};\nunsigned int m_len = 0;\n");
        assert_eq!(parse_carray(&text).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn size_law_matches_boundaries() {
        for n in [0usize, 1, 11, 12, 13, 10_000] {
            let payload = vec![7u8; n];
            let text = emit_carray(&payload, "model_data").unwrap();
            assert_eq!(text.len() as u64, carray_size(n as u64, 10), "n = {n}");
        }
    }

    #[test]
    fn parse_errors() {
        let bad = "unsigned char m[] = {\n  0xab, 0xzz\n};\n";
        match parse_carray(bad) {
            Err(ConvError::Carray { line, column, .. }) => assert_eq!((line, column), (2, 9)),
            other => panic!("{other:?}"),
        }
        let wrong_len = "unsigned char m[] = {\n  0xab\n};\nunsigned int m_len = 2;\n";
        assert!(matches!(
            parse_carray(wrong_len),
            Err(ConvError::LengthMismatch { declared: 2, actual: 1 })
        ));
        assert!(emit_carray(&[1], "9lives").is_err());
    }
}
