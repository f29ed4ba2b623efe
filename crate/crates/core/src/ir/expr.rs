use std::fmt;

/// Constant value appearing in source: property initializers and expression leaves.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "or",
            BinaryOp::And => "and",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Mod => "%",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne | BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod => 6,
        }
    }

    pub fn is_comparison(self) -> bool {
        self.precedence() == 4
    }
}

/// Guard and action expressions over thing properties and message parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Literal(Literal),
    Ident(String),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

pub(crate) const NOT_PRECEDENCE: u8 = 3;
pub(crate) const NEG_PRECEDENCE: u8 = 7;
const ATOM_PRECEDENCE: u8 = 8;

impl Expr {
    pub fn ident(name: impl Into<String>) -> Self {
        Expr::Ident(name.into())
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn unary(op: UnaryOp, operand: Expr) -> Self {
        Expr::Unary {
            op,
            operand: Box::new(operand),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Literal(Literal::Int(i)) if *i < 0 => NEG_PRECEDENCE,
            Expr::Literal(Literal::Float(x)) if x.is_sign_negative() => NEG_PRECEDENCE,
            Expr::Literal(_) | Expr::Ident(_) => ATOM_PRECEDENCE,
            Expr::Unary { op: UnaryOp::Not, .. } => NOT_PRECEDENCE,
            Expr::Unary { op: UnaryOp::Neg, .. } => NEG_PRECEDENCE,
            Expr::Binary { op, .. } => op.precedence(),
        }
    }

    /// Identifiers referenced anywhere in the expression, in order of appearance.
    pub fn identifiers(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_identifiers(&mut out);
        out
    }

    fn collect_identifiers<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Literal(_) => {}
            Expr::Ident(name) => out.push(name),
            Expr::Unary { operand, .. } => operand.collect_identifiers(out),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.collect_identifiers(out);
                rhs.collect_identifiers(out);
            }
        }
    }

    /// Renders the expression with a target-specific operator spelling and
    /// identifier mapping, inserting only the parentheses the tree needs.
    pub fn render(&self, style: &dyn ExprStyle) -> String {
        let mut out = String::new();
        self.render_into(style, &mut out);
        out
    }

    fn render_into(&self, style: &dyn ExprStyle, out: &mut String) {
        match self {
            Expr::Literal(lit) => out.push_str(&style.literal(lit)),
            Expr::Ident(name) => out.push_str(&style.ident(name)),
            Expr::Unary { op, operand } => {
                let (sym, prec) = match op {
                    UnaryOp::Not => (style.not(), NOT_PRECEDENCE),
                    UnaryOp::Neg => ("-", NEG_PRECEDENCE),
                };
                out.push_str(sym);
                // `-3` would re-lex as a negative literal, so numeric operands keep parens.
                let numeric = matches!(**operand, Expr::Literal(Literal::Int(_) | Literal::Float(_)));
                let wrap = operand.precedence() < prec
                    || (*op == UnaryOp::Neg && (numeric || operand.precedence() == prec))
                    || (*op == UnaryOp::Not && style.not_binds_tightly() && matches!(**operand, Expr::Binary { .. }));
                push_wrapped(operand, style, wrap, out);
            }
            Expr::Binary { op, lhs, rhs } => {
                let prec = op.precedence();
                let wrap_lhs = lhs.precedence() < prec || (op.is_comparison() && lhs.precedence() == prec);
                let wrap_rhs = rhs.precedence() <= prec;
                push_wrapped(lhs, style, wrap_lhs, out);
                out.push(' ');
                out.push_str(style.binary(*op));
                out.push(' ');
                push_wrapped(rhs, style, wrap_rhs, out);
            }
        }
    }
}

fn push_wrapped(expr: &Expr, style: &dyn ExprStyle, wrap: bool, out: &mut String) {
    if wrap {
        out.push('(');
        expr.render_into(style, out);
        out.push(')');
    } else {
        expr.render_into(style, out);
    }
}

/// Per-language spelling of expressions.
pub trait ExprStyle {
    fn ident(&self, name: &str) -> String {
        name.to_string()
    }
    fn literal(&self, lit: &Literal) -> String;
    fn not(&self) -> &'static str;
    /// True where negation binds tighter than every binary operator (C family).
    fn not_binds_tightly(&self) -> bool {
        false
    }
    fn binary(&self, op: BinaryOp) -> &'static str {
        op.symbol()
    }
}

/// The concrete syntax of the modeling language itself.
pub struct MdmlStyle;

impl ExprStyle for MdmlStyle {
    fn literal(&self, lit: &Literal) -> String {
        lit.to_string()
    }
    fn not(&self) -> &'static str {
        "not "
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Int(i) => write!(f, "{i}"),
            // Debug formatting is the shortest round-tripping form and always
            // carries a `.` or an exponent.
            Literal::Float(x) => write!(f, "{x:?}"),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Str(s) => write!(f, "{}", quote(s)),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&MdmlStyle))
    }
}

/// Double-quoted string literal with the escapes the lexer understands.
pub fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
