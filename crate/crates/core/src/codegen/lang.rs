//! Spelling rules of the emitted languages: identifiers, literals, types and
//! expressions.

use std::fmt::Write;

use crate::ir::{BinaryOp, ExprStyle, Literal, PropertyType};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Lang {
    Python,
    Java,
    Cpp,
}

const PYTHON_KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue", "def", "del",
    "elif", "else", "except", "finally", "for", "from", "global", "if", "import", "in", "is", "lambda", "nonlocal",
    "not", "or", "pass", "raise", "return", "self", "try", "while", "with", "yield", "state",
];

const JAVA_KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "false",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "null",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "true",
    "try",
    "void",
    "volatile",
    "while",
    "sink",
    "state",
];

const CPP_KEYWORDS: &[&str] = &[
    "alignas",
    "alignof",
    "and",
    "asm",
    "auto",
    "bool",
    "break",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "constexpr",
    "continue",
    "default",
    "delete",
    "do",
    "double",
    "else",
    "enum",
    "explicit",
    "extern",
    "false",
    "float",
    "for",
    "friend",
    "goto",
    "if",
    "inline",
    "int",
    "long",
    "mutable",
    "namespace",
    "new",
    "noexcept",
    "not",
    "nullptr",
    "operator",
    "or",
    "private",
    "protected",
    "public",
    "register",
    "return",
    "short",
    "signed",
    "sizeof",
    "static",
    "struct",
    "switch",
    "template",
    "this",
    "throw",
    "true",
    "try",
    "typedef",
    "typename",
    "union",
    "unsigned",
    "using",
    "virtual",
    "void",
    "volatile",
    "while",
    "xor",
    "setup",
    "loop",
    "state",
];

impl Lang {
    /// `name` made safe as an identifier: reserved words get a trailing `_`.
    /// Model names are already `[A-Za-z_][A-Za-z0-9_]*`.
    pub(crate) fn ident(self, name: &str) -> String {
        let reserved = match self {
            Lang::Python => PYTHON_KEYWORDS,
            Lang::Java => JAVA_KEYWORDS,
            Lang::Cpp => CPP_KEYWORDS,
        };
        if reserved.contains(&name) {
            format!("{name}_")
        } else {
            name.to_string()
        }
    }

    /// Double-quoted string literal. Non-ASCII text is escaped so emitted
    /// files are pure ASCII.
    pub(crate) fn string_literal(self, s: &str) -> String {
        let mut out = String::from("\"");
        for c in s.chars() {
            match c {
                '"' => out.push_str("\\\""),
                '\\' => out.push_str("\\\\"),
                '\n' => out.push_str("\\n"),
                '\r' => out.push_str("\\r"),
                '\t' => out.push_str("\\t"),
                ' '..='~' => out.push(c),
                _ => match self {
                    Lang::Python => {
                        let _ = write!(out, "\\U{:08x}", c as u32);
                    }
                    Lang::Java => {
                        let mut buf = [0u16; 2];
                        for unit in c.encode_utf16(&mut buf) {
                            let _ = write!(out, "\\u{unit:04x}");
                        }
                    }
                    // Octal escapes stop after three digits, unlike `\x`.
                    Lang::Cpp => {
                        let mut buf = [0u8; 4];
                        for b in c.encode_utf8(&mut buf).bytes() {
                            let _ = write!(out, "\\{b:03o}");
                        }
                    }
                },
            }
        }
        out.push('"');
        out
    }

    pub(crate) fn literal(self, lit: &Literal) -> String {
        match (self, lit) {
            (_, Literal::Int(i)) => match self {
                Lang::Java if i32::try_from(*i).is_err() => format!("{i}L"),
                Lang::Cpp if i32::try_from(*i).is_err() => format!("INT64_C({i})"),
                _ => i.to_string(),
            },
            (_, Literal::Float(x)) if x.is_finite() => format!("{x:?}"),
            (Lang::Python, Literal::Float(x)) => {
                if x.is_nan() {
                    "float(\"nan\")".into()
                } else if *x > 0.0 {
                    "float(\"inf\")".into()
                } else {
                    "-float(\"inf\")".into()
                }
            }
            (Lang::Java, Literal::Float(x)) => {
                if x.is_nan() {
                    "Double.NaN".into()
                } else if *x > 0.0 {
                    "Double.POSITIVE_INFINITY".into()
                } else {
                    "Double.NEGATIVE_INFINITY".into()
                }
            }
            (Lang::Cpp, Literal::Float(x)) => {
                if x.is_nan() {
                    "NAN".into()
                } else if *x > 0.0 {
                    "INFINITY".into()
                } else {
                    "-INFINITY".into()
                }
            }
            (Lang::Python, Literal::Bool(b)) => if *b { "True" } else { "False" }.into(),
            (_, Literal::Bool(b)) => b.to_string(),
            (_, Literal::Str(s)) => self.string_literal(s),
        }
    }

    pub(crate) fn scalar_type(self, ty: &PropertyType) -> &'static str {
        match (self, ty.scalar()) {
            (Lang::Java, PropertyType::Int) => "int",
            (Lang::Java, PropertyType::Long) => "long",
            (Lang::Java, PropertyType::Float) => "float",
            (Lang::Java, PropertyType::Double) => "double",
            (Lang::Java, PropertyType::Bool) => "boolean",
            (Lang::Java, _) => "String",
            (Lang::Cpp, PropertyType::Int) => "int32_t",
            (Lang::Cpp, PropertyType::Long) => "int64_t",
            (Lang::Cpp, PropertyType::Float) => "float",
            (Lang::Cpp, PropertyType::Double) => "double",
            (Lang::Cpp, PropertyType::Bool) => "bool",
            (Lang::Cpp, _) => "String",
            (Lang::Python, PropertyType::Int | PropertyType::Long) => "int",
            (Lang::Python, PropertyType::Float | PropertyType::Double) => "float",
            (Lang::Python, PropertyType::Bool) => "bool",
            (Lang::Python, _) => "str",
        }
    }

    fn scalar_default(self, ty: &PropertyType) -> String {
        let lit = match ty.scalar() {
            PropertyType::Int | PropertyType::Long => Literal::Int(0),
            PropertyType::Float | PropertyType::Double => Literal::Float(0.0),
            PropertyType::Bool => Literal::Bool(false),
            _ => Literal::Str(String::new()),
        };
        let s = self.literal(&lit);
        if self == Lang::Java && *ty.scalar() == PropertyType::Float {
            format!("{s}f")
        } else {
            s
        }
    }

    /// Array lengths from the outermost dimension inwards; `None` is unsized.
    fn dims(ty: &PropertyType) -> Vec<Option<u32>> {
        let mut dims = Vec::new();
        let mut t = ty;
        while let PropertyType::Array { element, len } = t {
            dims.push(*len);
            t = element;
        }
        dims
    }

    /// Initial value expression for a property of type `ty`.
    pub(crate) fn initial_value(self, ty: &PropertyType, initial: Option<&Literal>) -> String {
        let dims = Lang::dims(ty);
        if dims.is_empty() {
            return match initial {
                Some(lit) => {
                    let coerced = match (ty, lit) {
                        (PropertyType::Float | PropertyType::Double, Literal::Int(i)) => Literal::Float(*i as f64),
                        _ => lit.clone(),
                    };
                    let s = self.literal(&coerced);
                    if self == Lang::Java && *ty == PropertyType::Float {
                        format!("{s}f")
                    } else {
                        s
                    }
                }
                None => self.scalar_default(ty),
            };
        }
        let zero = self.scalar_default(ty);
        match self {
            Lang::Python => {
                let mut expr = zero;
                for (depth, len) in dims.iter().rev().enumerate() {
                    let n = len.unwrap_or(0);
                    expr = if depth == 0 {
                        format!("[{expr}] * {n}")
                    } else {
                        format!("[{expr} for _ in range({n})]")
                    };
                }
                expr
            }
            Lang::Java => {
                let sizes: String = dims.iter().map(|d| format!("[{}]", d.unwrap_or(0))).collect();
                format!("new {}{sizes}", self.scalar_type(ty))
            }
            // Arrays are value-initialized members; see `declaration`.
            Lang::Cpp => "{}".into(),
        }
    }

    /// Member declaration `type name` including array brackets.
    pub(crate) fn declaration(self, ty: &PropertyType, name: &str) -> String {
        let dims = Lang::dims(ty);
        let base = self.scalar_type(ty);
        match self {
            Lang::Java => format!("{base}{} {name}", "[]".repeat(dims.len())),
            Lang::Cpp => {
                if dims.iter().any(Option::is_none) {
                    // Unsized arrays become a caller-owned buffer.
                    format!("{base}* {name}")
                } else {
                    let sizes: String = dims.iter().map(|d| format!("[{}]", d.unwrap_or(0))).collect();
                    format!("{base} {name}{sizes}")
                }
            }
            Lang::Python => name.to_string(),
        }
    }
}

/// Expression spelling inside a generated state machine: message parameters
/// are locals, everything else is a property of the machine.
pub(crate) struct MachineExpr<'a> {
    pub(crate) lang: Lang,
    pub(crate) params: &'a [String],
}

impl ExprStyle for MachineExpr<'_> {
    fn ident(&self, name: &str) -> String {
        let id = self.lang.ident(name);
        if self.params.iter().any(|p| p == name) {
            return id;
        }
        match self.lang {
            Lang::Python => format!("self.{id}"),
            Lang::Java => format!("this.{id}"),
            Lang::Cpp => format!("this->{id}"),
        }
    }

    fn literal(&self, lit: &Literal) -> String {
        self.lang.literal(lit)
    }

    fn not(&self) -> &'static str {
        match self.lang {
            Lang::Python => "not ",
            Lang::Java | Lang::Cpp => "!",
        }
    }

    fn not_binds_tightly(&self) -> bool {
        self.lang != Lang::Python
    }

    fn binary(&self, op: BinaryOp) -> &'static str {
        match (self.lang, op) {
            (Lang::Python, _) => op.symbol(),
            (_, BinaryOp::And) => "&&",
            (_, BinaryOp::Or) => "||",
            _ => op.symbol(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Expr, UnaryOp};

    #[test]
    fn keywords_are_mangled_per_language() {
        assert_eq!(Lang::Python.ident("class"), "class_");
        assert_eq!(Lang::Python.ident("int"), "int");
        assert_eq!(Lang::Cpp.ident("int"), "int_");
        assert_eq!(Lang::Java.ident("boolean"), "boolean_");
    }

    #[test]
    fn string_escapes() {
        let s = "a\"b\\c\nd\u{e9}";
        assert_eq!(Lang::Python.string_literal(s), r#""a\"b\\c\nd\U000000e9""#);
        assert_eq!(Lang::Java.string_literal(s), r#""a\"b\\c\nd\u00e9""#);
        assert_eq!(Lang::Cpp.string_literal(s), r#""a\"b\\c\nd\303\251""#);
    }

    #[test]
    fn negation_keeps_meaning_in_c_family() {
        let e = Expr::unary(
            UnaryOp::Not,
            Expr::binary(BinaryOp::Eq, Expr::ident("a"), Expr::Literal(Literal::Int(1))),
        );
        let params = vec!["a".to_string()];
        let py = MachineExpr {
            lang: Lang::Python,
            params: &params,
        };
        let cpp = MachineExpr {
            lang: Lang::Cpp,
            params: &[],
        };
        assert_eq!(e.render(&py), "not a == 1");
        assert_eq!(e.render(&cpp), "!(this->a == 1)");
    }

    #[test]
    fn initial_values() {
        let arr = PropertyType::Array {
            element: Box::new(PropertyType::Double),
            len: Some(3),
        };
        assert_eq!(Lang::Python.initial_value(&arr, None), "[0.0] * 3");
        assert_eq!(Lang::Java.initial_value(&arr, None), "new double[3]");
        assert_eq!(Lang::Cpp.declaration(&arr, "x"), "double x[3]");
        assert_eq!(
            Lang::Java.initial_value(&PropertyType::Float, Some(&Literal::Int(2))),
            "2.0f"
        );
        assert_eq!(Lang::Python.initial_value(&PropertyType::Bool, None), "False");
        assert_eq!(Lang::Java.literal(&Literal::Int(1 << 40)), "1099511627776L");
    }
}
