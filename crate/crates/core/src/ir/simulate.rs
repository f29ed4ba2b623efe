//! Run-to-completion interpreter for flat statecharts.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::{Action, BinaryOp, Expr, Literal, PropertyType, Thing, Trigger, UnaryOp};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(String),
}

impl Value {
    fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "integer",
            Value::Float(_) => "float",
            Value::Bool(_) => "bool",
            Value::Str(_) => "string",
        }
    }

    fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Float(x) => Some(*x),
            _ => None,
        }
    }

    fn default_for(ty: &PropertyType) -> Option<Value> {
        Some(match ty {
            PropertyType::Int | PropertyType::Long => Value::Int(0),
            PropertyType::Float | PropertyType::Double => Value::Float(0.0),
            PropertyType::Bool => Value::Bool(false),
            PropertyType::String => Value::Str(String::new()),
            PropertyType::Array { .. } => return None,
        })
    }

    /// Converts to the representation of `ty`, widening integers to floats.
    fn coerce(self, ty: &PropertyType) -> Result<Value, String> {
        match (ty, self) {
            (PropertyType::Int | PropertyType::Long, v @ Value::Int(_)) => Ok(v),
            (PropertyType::Float | PropertyType::Double, Value::Int(i)) => Ok(Value::Float(i as f64)),
            (PropertyType::Float | PropertyType::Double, v @ Value::Float(_)) => Ok(v),
            (PropertyType::Bool, v @ Value::Bool(_)) => Ok(v),
            (PropertyType::String, v @ Value::Str(_)) => Ok(v),
            (ty, v) => Err(format!("cannot store {} value in {ty}", v.type_name())),
        }
    }
}

impl From<&Literal> for Value {
    fn from(lit: &Literal) -> Self {
        match lit {
            Literal::Int(i) => Value::Int(*i),
            Literal::Float(x) => Value::Float(*x),
            Literal::Bool(b) => Value::Bool(*b),
            Literal::Str(s) => Value::Str(s.clone()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Float(x) => write!(f, "{x:?}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => write!(f, "{}", super::expr::quote(s)),
        }
    }
}

/// An incoming message on a port, optionally carrying argument values.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub port: String,
    pub message: String,
    pub args: Vec<Value>,
}

impl Event {
    pub fn new(port: impl Into<String>, message: impl Into<String>) -> Self {
        Event {
            port: port.into(),
            message: message.into(),
            args: Vec::new(),
        }
    }

    pub fn with_args(mut self, args: Vec<Value>) -> Self {
        self.args = args;
        self
    }

    fn matches(&self, trigger: &Trigger) -> bool {
        self.port == trigger.port && self.message == trigger.message
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmittedAction {
    /// 0 for the initial state's entry actions, otherwise the 1-based index
    /// of the event that caused it.
    pub step: usize,
    pub port: String,
    pub message: String,
    pub args: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateTrace {
    /// Initial state followed by the target of every fired transition.
    pub states: Vec<String>,
    pub emitted: Vec<EmittedAction>,
    /// Number of events that matched no enabled transition.
    pub dropped: usize,
}

#[derive(Debug, Error, PartialEq)]
pub enum SimulationError {
    #[error("thing '{0}' has no statechart")]
    NoStatechart(String),
    #[error("initial state '{0}' is not declared")]
    MissingInitial(String),
    #[error("transition {transition}: guard evaluation failed: {reason}")]
    Guard { transition: String, reason: String },
    #[error("{context}: action failed: {reason}")]
    Action { context: String, reason: String },
}

struct Machine<'a> {
    thing: &'a Thing,
    props: HashMap<&'a str, Value>,
    emitted: Vec<EmittedAction>,
}

type Bindings<'b> = [(&'b str, &'b Value)];

impl<'a> Machine<'a> {
    fn lookup(&self, name: &str, bindings: &Bindings<'_>) -> Result<Value, String> {
        if let Some((_, v)) = bindings.iter().find(|(n, _)| *n == name) {
            return Ok((*v).clone());
        }
        match self.props.get(name) {
            Some(v) => Ok(v.clone()),
            None if self.thing.property(name).is_some() => Err(format!("property '{name}' has no scalar value")),
            None => Err(format!("unbound identifier '{name}'")),
        }
    }

    fn eval(&self, expr: &Expr, bindings: &Bindings<'_>) -> Result<Value, String> {
        match expr {
            Expr::Literal(lit) => Ok(lit.into()),
            Expr::Ident(name) => self.lookup(name, bindings),
            Expr::Unary { op, operand } => {
                let v = self.eval(operand, bindings)?;
                match (op, v) {
                    (UnaryOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                    (UnaryOp::Neg, Value::Int(i)) => i
                        .checked_neg()
                        .map(Value::Int)
                        .ok_or_else(|| "integer overflow".to_string()),
                    (UnaryOp::Neg, Value::Float(x)) => Ok(Value::Float(-x)),
                    (op, v) => Err(format!("cannot apply {op:?} to {}", v.type_name())),
                }
            }
            Expr::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs, bindings)?;
                match op {
                    BinaryOp::And | BinaryOp::Or => {
                        let Value::Bool(lb) = l else {
                            return Err(format!("'{}' expects bool operands", op.symbol()));
                        };
                        if (*op == BinaryOp::And && !lb) || (*op == BinaryOp::Or && lb) {
                            return Ok(Value::Bool(lb));
                        }
                        match self.eval(rhs, bindings)? {
                            Value::Bool(rb) => Ok(Value::Bool(rb)),
                            _ => Err(format!("'{}' expects bool operands", op.symbol())),
                        }
                    }
                    _ => {
                        let r = self.eval(rhs, bindings)?;
                        binary(*op, l, r)
                    }
                }
            }
        }
    }

    fn run(&mut self, actions: &[Action], bindings: &Bindings<'_>, step: usize) -> Result<(), String> {
        for action in actions {
            match action {
                Action::Emit { port, message, args } => {
                    let args = args
                        .iter()
                        .map(|a| self.eval(a, bindings))
                        .collect::<Result<Vec<_>, _>>()?;
                    self.emitted.push(EmittedAction {
                        step,
                        port: port.clone(),
                        message: message.clone(),
                        args,
                    });
                }
                Action::Set { property, value } => {
                    let prop = self
                        .thing
                        .property(property)
                        .ok_or_else(|| format!("undeclared property '{property}'"))?;
                    let v = self.eval(value, bindings)?.coerce(&prop.ty)?;
                    self.props.insert(prop.name.as_str(), v);
                }
            }
        }
        Ok(())
    }
}

fn binary(op: BinaryOp, l: Value, r: Value) -> Result<Value, String> {
    use BinaryOp::*;
    let mismatch = || {
        format!(
            "cannot apply '{}' to {} and {}",
            op.symbol(),
            l.type_name(),
            r.type_name()
        )
    };
    match op {
        Eq | Ne => {
            let equal = match (&l, &r) {
                (Value::Bool(a), Value::Bool(b)) => a == b,
                (Value::Str(a), Value::Str(b)) => a == b,
                (Value::Int(a), Value::Int(b)) => a == b,
                _ => match (l.as_f64(), r.as_f64()) {
                    (Some(a), Some(b)) => a == b,
                    _ => return Err(mismatch()),
                },
            };
            Ok(Value::Bool(if op == Eq { equal } else { !equal }))
        }
        Lt | Le | Gt | Ge => {
            let ord = match (&l, &r) {
                (Value::Int(a), Value::Int(b)) => a.partial_cmp(b),
                (Value::Str(a), Value::Str(b)) => a.partial_cmp(b),
                _ => match (l.as_f64(), r.as_f64()) {
                    (Some(a), Some(b)) => a.partial_cmp(&b),
                    _ => return Err(mismatch()),
                },
            };
            let Some(ord) = ord else {
                return Ok(Value::Bool(false));
            };
            Ok(Value::Bool(match op {
                Lt => ord.is_lt(),
                Le => ord.is_le(),
                Gt => ord.is_gt(),
                _ => ord.is_ge(),
            }))
        }
        Add | Sub | Mul | Div | Mod => match (&l, &r) {
            (Value::Int(a), Value::Int(b)) => {
                let (a, b) = (*a, *b);
                let v = match op {
                    Add => a.checked_add(b),
                    Sub => a.checked_sub(b),
                    Mul => a.checked_mul(b),
                    Div => a.checked_div(b),
                    _ => a.checked_rem(b),
                };
                v.map(Value::Int)
                    .ok_or_else(|| "integer overflow or division by zero".to_string())
            }
            (Value::Str(a), Value::Str(b)) if op == Add => Ok(Value::Str(format!("{a}{b}"))),
            _ => match (l.as_f64(), r.as_f64()) {
                (Some(a), Some(b)) => Ok(Value::Float(match op {
                    Add => a + b,
                    Sub => a - b,
                    Mul => a * b,
                    Div => a / b,
                    _ => a % b,
                })),
                _ => Err(mismatch()),
            },
        },
        And | Or => unreachable!("short-circuit operators are handled by the caller"),
    }
}

/// Feeds `events` to the statechart of `thing` one at a time.
///
/// For each event the first declared transition leaving the current state
/// whose trigger matches and whose guard holds fires; its actions run, then
/// the target state's entry actions. Events that enable nothing are dropped.
pub fn simulate_statechart(thing: &Thing, events: &[Event]) -> Result<StateTrace, SimulationError> {
    let sc = thing
        .statechart
        .as_ref()
        .ok_or_else(|| SimulationError::NoStatechart(thing.name.clone()))?;
    let initial = sc
        .state(&sc.initial)
        .ok_or_else(|| SimulationError::MissingInitial(sc.initial.clone()))?;

    let mut machine = Machine {
        thing,
        props: HashMap::new(),
        emitted: Vec::new(),
    };
    for p in &thing.properties {
        let value = match &p.initial {
            Some(lit) => Some(
                Value::from(lit)
                    .coerce(&p.ty)
                    .map_err(|reason| SimulationError::Action {
                        context: format!("property {}", p.name),
                        reason,
                    })?,
            ),
            None => Value::default_for(&p.ty),
        };
        if let Some(v) = value {
            machine.props.insert(p.name.as_str(), v);
        }
    }

    machine
        .run(&initial.on_entry, &[], 0)
        .map_err(|reason| SimulationError::Action {
            context: format!("state {}", initial.name),
            reason,
        })?;

    let mut current = initial;
    let mut states = vec![current.name.clone()];
    let mut dropped = 0;

    for (idx, event) in events.iter().enumerate() {
        let step = idx + 1;
        let params: Vec<&str> = thing
            .message(&event.message)
            .map(|m| m.params.iter().map(|p| p.name.as_str()).collect())
            .unwrap_or_default();
        let bindings: Vec<(&str, &Value)> = params.into_iter().zip(event.args.iter()).collect();

        let mut fired = None;
        for tr in sc
            .transitions
            .iter()
            .filter(|t| t.source == current.name && event.matches(&t.trigger))
        {
            let enabled = match &tr.guard {
                None => true,
                Some(g) => match machine.eval(g, &bindings) {
                    Ok(Value::Bool(b)) => b,
                    Ok(other) => {
                        return Err(SimulationError::Guard {
                            transition: tr.label(),
                            reason: format!("guard produced {} instead of bool", other.type_name()),
                        })
                    }
                    Err(reason) => {
                        return Err(SimulationError::Guard {
                            transition: tr.label(),
                            reason,
                        })
                    }
                },
            };
            if enabled {
                fired = Some(tr);
                break;
            }
        }

        let Some(tr) = fired else {
            log::debug!("{}: dropped event {}?{}", thing.name, event.port, event.message);
            dropped += 1;
            continue;
        };
        machine
            .run(&tr.actions, &bindings, step)
            .map_err(|reason| SimulationError::Action {
                context: format!("transition {}", tr.label()),
                reason,
            })?;
        let target = sc.state(&tr.target).ok_or_else(|| SimulationError::Action {
            context: format!("transition {}", tr.label()),
            reason: format!("undeclared target state '{}'", tr.target),
        })?;
        machine
            .run(&target.on_entry, &bindings, step)
            .map_err(|reason| SimulationError::Action {
                context: format!("state {}", target.name),
                reason,
            })?;
        current = target;
        states.push(current.name.clone());
    }

    Ok(StateTrace {
        states,
        emitted: machine.emitted,
        dropped,
    })
}
