//! In-memory representation of MDML models.
//!
//! A platform-independent model (PIM) is a set of things: structure
//! (properties, messages, ports), an optional data-analytics block and an
//! optional statechart. A platform-specific model (PSM) adds configurations
//! and annotations on top of a PIM.

mod algorithms;
mod events;
pub(crate) mod expr;
mod simulate;
mod validate;

use std::fmt;

use serde::Serialize;

pub use algorithms::{algorithm, algorithms, AlgorithmSpec, HyperKind, HyperParamSpec};
pub use events::parse_events;
pub use expr::{quote, BinaryOp, Expr, ExprStyle, Literal, MdmlStyle, UnaryOp};
pub use simulate::{simulate_statechart, EmittedAction, Event, SimulationError, StateTrace, Value};
pub use validate::{validate_structure, Diagnostic, Severity};

/// Source location of a node, 1-based.
///
/// Spans never take part in structural equality: two models that differ only
/// in layout compare equal.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct Span {
    pub line: u32,
    pub column: u32,
}

impl Span {
    pub fn new(line: u32, column: u32) -> Self {
        Span { line, column }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelKind {
    Pim,
    Psm,
}

/// Root of a parsed `.mdml` file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SourceModel {
    pub imports: Vec<Import>,
    pub things: Vec<Thing>,
    pub configurations: Vec<Configuration>,
    /// `annotate <node> @key value` statements targeting nodes declared elsewhere.
    pub directives: Vec<AnnotateDirective>,
}

impl SourceModel {
    pub fn kind(&self) -> ModelKind {
        if self.configurations.is_empty() {
            ModelKind::Pim
        } else {
            ModelKind::Psm
        }
    }

    pub fn is_empty(&self) -> bool {
        self.imports.is_empty()
            && self.things.is_empty()
            && self.configurations.is_empty()
            && self.directives.is_empty()
    }

    pub fn thing(&self, name: &str) -> Option<&Thing> {
        self.things.iter().find(|t| t.name == name)
    }

    pub fn configuration(&self, name: &str) -> Option<&Configuration> {
        self.configurations.iter().find(|c| c.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Import {
    pub path: String,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Annotation {
    pub key: String,
    pub value: String,
    #[serde(skip)]
    pub span: Span,
}

impl Annotation {
    pub fn new(key: impl Into<String>, value: impl Into<String>) -> Self {
        Annotation {
            key: key.into(),
            value: value.into(),
            span: Span::default(),
        }
    }
}

/// Looks up the value of the last annotation with `key`.
pub fn annotation_value<'a>(annotations: &'a [Annotation], key: &str) -> Option<&'a str> {
    annotations
        .iter()
        .rev()
        .find(|a| a.key == key)
        .map(|a| a.value.as_str())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thing {
    pub name: String,
    pub properties: Vec<Property>,
    pub messages: Vec<Message>,
    pub ports: Vec<Port>,
    pub statechart: Option<Statechart>,
    pub analytics: Option<DataAnalyticsSpec>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

impl Thing {
    pub fn new(name: impl Into<String>) -> Self {
        Thing {
            name: name.into(),
            properties: Vec::new(),
            messages: Vec::new(),
            ports: Vec::new(),
            statechart: None,
            analytics: None,
            annotations: Vec::new(),
            span: Span::default(),
        }
    }

    pub fn property(&self, name: &str) -> Option<&Property> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn message(&self, name: &str) -> Option<&Message> {
        self.messages.iter().find(|m| m.name == name)
    }

    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyType {
    Int,
    Long,
    Float,
    Double,
    Bool,
    String,
    Array {
        element: Box<PropertyType>,
        len: Option<u32>,
    },
}

impl PropertyType {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "Int" => PropertyType::Int,
            "Long" => PropertyType::Long,
            "Float" => PropertyType::Float,
            "Double" => PropertyType::Double,
            "Bool" => PropertyType::Bool,
            "String" => PropertyType::String,
            _ => return None,
        })
    }

    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            PropertyType::Int | PropertyType::Long | PropertyType::Float | PropertyType::Double
        )
    }

    pub fn is_integral(&self) -> bool {
        matches!(self, PropertyType::Int | PropertyType::Long)
    }

    /// Innermost element type of an array (or the type itself).
    pub fn scalar(&self) -> &PropertyType {
        match self {
            PropertyType::Array { element, .. } => element.scalar(),
            other => other,
        }
    }

    /// Number of scalar slots, `None` for unsized arrays.
    pub fn width(&self) -> Option<u64> {
        match self {
            PropertyType::Array { element, len } => {
                let len = u64::from((*len)?);
                element.width().map(|w| w * len)
            }
            _ => Some(1),
        }
    }
}

impl fmt::Display for PropertyType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyType::Int => f.write_str("Int"),
            PropertyType::Long => f.write_str("Long"),
            PropertyType::Float => f.write_str("Float"),
            PropertyType::Double => f.write_str("Double"),
            PropertyType::Bool => f.write_str("Bool"),
            PropertyType::String => f.write_str("String"),
            PropertyType::Array { element, len } => match len {
                Some(n) => write!(f, "{element}[{n}]"),
                None => write!(f, "{element}[]"),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub name: String,
    pub ty: PropertyType,
    pub initial: Option<Literal>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub ty: PropertyType,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub name: String,
    pub params: Vec<Param>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortKind {
    Provided,
    Required,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Port {
    pub name: String,
    pub kind: PortKind,
    pub sends: Vec<String>,
    pub receives: Vec<String>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statechart {
    pub name: String,
    pub initial: String,
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

impl Statechart {
    pub fn state(&self, name: &str) -> Option<&State> {
        self.states.iter().find(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub name: String,
    pub on_entry: Vec<Action>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Trigger {
    pub port: String,
    pub message: String,
}

impl fmt::Display for Trigger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}?{}", self.port, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub source: String,
    pub target: String,
    pub trigger: Trigger,
    pub guard: Option<Expr>,
    pub actions: Vec<Action>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

impl Transition {
    /// Human-readable label used in diagnostics, e.g. `Idle -> Active on data?start`.
    pub fn label(&self) -> String {
        format!("{} -> {} on {}", self.source, self.target, self.trigger)
    }
}

/// The statechart action language: send a message or assign a property.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Emit {
        port: String,
        message: String,
        args: Vec<Expr>,
    },
    Set {
        property: String,
        value: Expr,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LabelsMode {
    On,
    Off,
    Semi,
}

impl LabelsMode {
    pub fn keyword(self) -> &'static str {
        match self {
            LabelsMode::On => "ON",
            LabelsMode::Off => "OFF",
            LabelsMode::Semi => "SEMI",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Switch {
    On,
    Off,
}

impl Switch {
    pub fn keyword(self) -> &'static str {
        match self {
            Switch::On => "ON",
            Switch::Off => "OFF",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HyperValue {
    Int(i64),
    Float(f64),
    Ident(String),
    Str(String),
    List(Vec<HyperValue>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hyperparameter {
    pub name: String,
    pub value: HyperValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelAlgorithm {
    pub name: String,
    pub hyperparameters: Vec<Hyperparameter>,
}

impl ModelAlgorithm {
    pub fn hyperparameter(&self, name: &str) -> Option<&HyperValue> {
        self.hyperparameters
            .iter()
            .rev()
            .find(|h| h.name == name)
            .map(|h| &h.value)
    }
}

/// The `data_analytics` block of a thing. Every keyword is optional in the
/// source; the linker applies defaults and checks the combinations.
#[derive(Debug, Clone, PartialEq)]
pub struct DataAnalyticsSpec {
    pub name: String,
    pub labels: Option<LabelsMode>,
    pub features: Vec<String>,
    pub prediction_results: Option<String>,
    pub sequential: Option<bool>,
    pub timestamps: Option<Switch>,
    pub model_algorithm: Option<ModelAlgorithm>,
    pub training_results: Option<String>,
    pub dataset: Option<String>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

impl DataAnalyticsSpec {
    pub fn new(name: impl Into<String>) -> Self {
        DataAnalyticsSpec {
            name: name.into(),
            labels: None,
            features: Vec::new(),
            prediction_results: None,
            sequential: None,
            timestamps: None,
            model_algorithm: None,
            training_results: None,
            dataset: None,
            annotations: Vec::new(),
            span: Span::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub thing: String,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PortRef {
    pub instance: String,
    pub port: String,
}

impl fmt::Display for PortRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.instance, self.port)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Connector {
    pub from: PortRef,
    pub to: PortRef,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub name: String,
    pub instances: Vec<Instance>,
    pub connectors: Vec<Connector>,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}

impl Configuration {
    pub fn instance(&self, name: &str) -> Option<&Instance> {
        self.instances.iter().find(|i| i.name == name)
    }
}

/// Address of an annotatable node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodePath {
    Thing(String),
    Property(String, String),
    Message(String, String),
    Port(String, String),
    Statechart(String),
    State(String, String),
    Analytics(String),
    Configuration(String),
    Instance(String, String),
}

impl NodePath {
    pub fn kind_keyword(&self) -> &'static str {
        match self {
            NodePath::Thing(_) => "thing",
            NodePath::Property(..) => "property",
            NodePath::Message(..) => "message",
            NodePath::Port(..) => "port",
            NodePath::Statechart(_) => "statechart",
            NodePath::State(..) => "state",
            NodePath::Analytics(_) => "data_analytics",
            NodePath::Configuration(_) => "configuration",
            NodePath::Instance(..) => "instance",
        }
    }

    /// Name of the owning thing or configuration.
    pub fn owner(&self) -> &str {
        match self {
            NodePath::Thing(o)
            | NodePath::Statechart(o)
            | NodePath::Analytics(o)
            | NodePath::Configuration(o)
            | NodePath::Property(o, _)
            | NodePath::Message(o, _)
            | NodePath::Port(o, _)
            | NodePath::State(o, _)
            | NodePath::Instance(o, _) => o,
        }
    }

    pub fn member(&self) -> Option<&str> {
        match self {
            NodePath::Property(_, m)
            | NodePath::Message(_, m)
            | NodePath::Port(_, m)
            | NodePath::State(_, m)
            | NodePath::Instance(_, m) => Some(m),
            _ => None,
        }
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.member() {
            Some(m) => write!(f, "{} {}.{}", self.kind_keyword(), self.owner(), m),
            None => write!(f, "{} {}", self.kind_keyword(), self.owner()),
        }
    }
}

impl Serialize for NodePath {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotateDirective {
    pub target: NodePath,
    pub annotations: Vec<Annotation>,
    pub span: Span,
}
