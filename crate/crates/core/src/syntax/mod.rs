//! Concrete syntax of `.mdml` files: lexer, recursive-descent parser and the
//! canonical pretty-printer.
//!
//! ```text
//! import "pim.mdml"
//!
//! thing Sensor {
//!     property temp : Double = 0.0
//!     message reading(value : Double)
//!     provided port data {
//!         sends reading
//!         receives start
//!     }
//!     statechart Behaviour init Idle {
//!         state Idle {}
//!         transition Idle -> Idle event data?start guard temp > 3.0 action emit data!reading(temp)
//!     }
//! }
//!
//! configuration Cfg {
//!     @compiler "python_java"
//!     instance s : Sensor
//! }
//! ```

mod lexer;
mod parser;
mod printer;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use lexer::{is_bareword_char, is_keyword, tokenize, Token, TokenKind, KEYWORDS};
pub use parser::parse;
pub use printer::{is_plain_identifier, pretty_print};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub struct ParseError {
    pub message: String,
    pub expected: Vec<String>,
    pub found: Option<String>,
    pub line: u32,
    pub column: u32,
}

impl ParseError {
    pub fn at(message: impl Into<String>, line: u32, column: u32) -> Self {
        ParseError {
            message: message.into(),
            expected: Vec::new(),
            found: None,
            line,
            column,
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {}", self.expected.join(", "))?;
            if let Some(found) = &self.found {
                write!(f, "; found {found}")?;
            }
            f.write_str(")")?;
        } else if let Some(found) = &self.found {
            write!(f, " (found {found})")?;
        }
        Ok(())
    }
}
