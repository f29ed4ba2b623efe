use serde::Serialize;

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Keyword,
    Identifier,
    Integer,
    Float,
    String,
    AnnotationKey,
    Punctuation,
}

/// A lexeme with its kind and 1-based position. `lexeme` is the exact source
/// slice, so string tokens keep their quotes and annotation keys their `@`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: u32,
    pub column: u32,
    /// Byte offset of the lexeme in the source.
    pub offset: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.lexeme == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punctuation, text)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }

    /// Key of an annotation token without the leading `@`.
    pub fn annotation_key(&self) -> &str {
        self.lexeme.strip_prefix('@').unwrap_or(&self.lexeme)
    }

    /// Decoded contents of a string token.
    pub fn string_value(&self) -> String {
        let inner = &self.lexeme[1..self.lexeme.len() - 1];
        let mut out = String::with_capacity(inner.len());
        let mut chars = inner.chars();
        while let Some(c) = chars.next() {
            if c != '\\' {
                out.push(c);
                continue;
            }
            match chars.next() {
                Some('n') => out.push('\n'),
                Some('t') => out.push('\t'),
                Some('r') => out.push('\r'),
                Some(other) => out.push(other),
                None => {}
            }
        }
        out
    }
}

pub const KEYWORDS: &[&str] = &[
    "import",
    "thing",
    "property",
    "message",
    "provided",
    "required",
    "port",
    "sends",
    "receives",
    "statechart",
    "init",
    "state",
    "on_entry",
    "transition",
    "event",
    "guard",
    "action",
    "emit",
    "set",
    "data_analytics",
    "configuration",
    "instance",
    "connector",
    "annotate",
    "true",
    "false",
    "and",
    "or",
    "not",
];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

const PUNCT2: &[&str] = &["==", "!=", "<=", ">=", "->", "=>"];
const PUNCT1: &str = "{}()[];:,.=<>?!+-*/%";

/// Characters allowed after the first one in a bareword annotation value,
/// e.g. `@compiler rpi_3b+_python`.
pub fn is_bareword_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '+' | '.' | '-')
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    column: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn eat_while(&mut self, pred: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
    }
}

/// Splits `text` into tokens, skipping whitespace and `//` / `/* */` comments.
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        src: text,
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut tokens: Vec<Token> = Vec::new();

    loop {
        // trivia
        loop {
            match (cur.peek(), cur.peek_at(1)) {
                (Some(c), _) if c.is_whitespace() => {
                    cur.bump();
                }
                (Some('/'), Some('/')) => cur.eat_while(|c| c != '\n'),
                (Some('/'), Some('*')) => {
                    let (line, column) = (cur.line, cur.column);
                    cur.bump();
                    cur.bump();
                    loop {
                        match (cur.peek(), cur.peek_at(1)) {
                            (Some('*'), Some('/')) => {
                                cur.bump();
                                cur.bump();
                                break;
                            }
                            (Some(_), _) => {
                                cur.bump();
                            }
                            (None, _) => return Err(ParseError::at("unterminated block comment", line, column)),
                        }
                    }
                }
                _ => break,
            }
        }

        let Some(c) = cur.peek() else { break };
        let (start, line, column) = (cur.pos, cur.line, cur.column);
        let after_annotation = tokens.last().is_some_and(|t| t.kind == TokenKind::AnnotationKey);

        let kind = if after_annotation && is_ident_start(c) {
            cur.eat_while(is_bareword_char);
            TokenKind::Identifier
        } else if is_ident_start(c) {
            cur.eat_while(is_ident_char);
            if is_keyword(&text[start..cur.pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if c == '@' {
            cur.bump();
            if !cur.peek().is_some_and(is_ident_start) {
                return Err(ParseError::at("expected annotation key after '@'", line, column));
            }
            cur.eat_while(is_ident_char);
            TokenKind::AnnotationKey
        } else if c.is_ascii_digit() {
            lex_number(&mut cur)
        } else if c == '"' {
            cur.bump();
            loop {
                match cur.bump() {
                    Some('"') => break,
                    Some('\\') => {
                        if cur.bump().is_none() {
                            return Err(ParseError::at("unterminated string", line, column));
                        }
                    }
                    Some('\n') | None => return Err(ParseError::at("unterminated string", line, column)),
                    Some(_) => {}
                }
            }
            TokenKind::String
        } else if PUNCT2.iter().any(|p| text[start..].starts_with(p)) {
            cur.bump();
            cur.bump();
            TokenKind::Punctuation
        } else if PUNCT1.contains(c) {
            cur.bump();
            TokenKind::Punctuation
        } else {
            return Err(ParseError::at(format!("unexpected character '{c}'"), line, column));
        };

        tokens.push(Token {
            kind,
            lexeme: text[start..cur.pos].to_string(),
            line,
            column,
            offset: start,
        });
    }
    Ok(tokens)
}

fn lex_number(cur: &mut Cursor<'_>) -> TokenKind {
    let mut kind = TokenKind::Integer;
    cur.eat_while(|c| c.is_ascii_digit());
    if cur.peek() == Some('.') && cur.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
        kind = TokenKind::Float;
        cur.bump();
        cur.eat_while(|c| c.is_ascii_digit());
    }
    if matches!(cur.peek(), Some('e' | 'E')) {
        let digits_at = match cur.peek_at(1) {
            Some('+' | '-') => 2,
            _ => 1,
        };
        if cur.peek_at(digits_at).is_some_and(|c| c.is_ascii_digit()) {
            kind = TokenKind::Float;
            for _ in 0..digits_at {
                cur.bump();
            }
            cur.eat_while(|c| c.is_ascii_digit());
        }
    }
    kind
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src).unwrap().into_iter().map(|t| (t.kind, t.lexeme)).collect()
    }

    #[test]
    fn empty_input_has_no_tokens() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  // only a comment\n/* and a block */").unwrap().is_empty());
    }

    #[test]
    fn annotation_with_bareword() {
        let toks = tokenize("@compiler python_java").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].kind, TokenKind::AnnotationKey);
        assert_eq!(toks[0].annotation_key(), "compiler");
        assert_eq!(toks[1].kind, TokenKind::Identifier);
        assert_eq!(toks[1].lexeme, "python_java");
    }

    #[test]
    fn bareword_after_annotation_keeps_plus() {
        let toks = kinds("@compiler rpi_3b+_python_quantized x+y");
        assert_eq!(toks[1].1, "rpi_3b+_python_quantized");
        // outside annotation context `+` is an operator
        assert_eq!(toks[2].1, "x");
        assert_eq!(toks[3], (TokenKind::Punctuation, "+".into()));
    }

    #[test]
    fn thing_header() {
        assert_eq!(
            kinds("thing Sensor {"),
            vec![
                (TokenKind::Keyword, "thing".into()),
                (TokenKind::Identifier, "Sensor".into()),
                (TokenKind::Punctuation, "{".into()),
            ]
        );
    }

    #[test]
    fn numbers() {
        assert_eq!(
            kinds("3 3.5 1e-5 2E+3 7.x"),
            vec![
                (TokenKind::Integer, "3".into()),
                (TokenKind::Float, "3.5".into()),
                (TokenKind::Float, "1e-5".into()),
                (TokenKind::Float, "2E+3".into()),
                (TokenKind::Integer, "7".into()),
                (TokenKind::Punctuation, ".".into()),
                (TokenKind::Identifier, "x".into()),
            ]
        );
    }

    #[test]
    fn two_char_punctuation() {
        let toks = kinds("a -> b => c <= >= == !=");
        let puncts: Vec<_> = toks
            .iter()
            .filter(|t| t.0 == TokenKind::Punctuation)
            .map(|t| t.1.as_str())
            .collect();
        assert_eq!(puncts, ["->", "=>", "<=", ">=", "==", "!="]);
    }

    #[test]
    fn string_escapes() {
        let toks = tokenize(r#""a\"b\\c\n""#).unwrap();
        assert_eq!(toks[0].string_value(), "a\"b\\c\n");
    }

    #[test]
    fn unterminated_string_reports_opening() {
        let err = tokenize("thing T {\n  @x \"abc").unwrap_err();
        assert_eq!((err.line, err.column), (2, 6));
        assert!(err.message.contains("unterminated string"));
    }

    #[test]
    fn unterminated_comment_reports_opening() {
        let err = tokenize("a /* b\n c").unwrap_err();
        assert_eq!((err.line, err.column), (1, 3));
    }

    #[test]
    fn positions_are_one_based() {
        let toks = tokenize("thing\n  T").unwrap();
        assert_eq!((toks[0].line, toks[0].column), (1, 1));
        assert_eq!((toks[1].line, toks[1].column), (2, 3));
    }
}
