use crate::ir::{
    Action, AnnotateDirective, Annotation, BinaryOp, Configuration, Connector, DataAnalyticsSpec, Expr, HyperValue,
    Hyperparameter, Import, Instance, LabelsMode, Literal, Message, ModelAlgorithm, NodePath, Param, Port, PortKind,
    PortRef, Property, PropertyType, SourceModel, Span, State, Statechart, Switch, Thing, Transition, Trigger, UnaryOp,
};

use super::lexer::{tokenize, Token, TokenKind};
use super::ParseError;

type PResult<T> = Result<T, ParseError>;

const ITEM_KEYWORDS: &[&str] = &[
    "import",
    "thing",
    "configuration",
    "annotate",
    "property",
    "message",
    "provided",
    "required",
    "statechart",
    "state",
    "transition",
    "data_analytics",
    "instance",
    "connector",
    "on_entry",
    "sends",
    "receives",
];

const ANALYTICS_KEYS: &[&str] = &[
    "labels",
    "features",
    "prediction_results",
    "sequential",
    "timestamps",
    "model_algorithm",
    "training_results",
    "dataset",
];

/// Parses a complete `.mdml` source. Syntax errors are collected with
/// recovery at statement boundaries, so one call can report several.
pub fn parse(text: &str) -> Result<SourceModel, Vec<ParseError>> {
    let tokens = tokenize(text).map_err(|e| vec![e])?;
    let mut p = Parser {
        tokens,
        pos: 0,
        errors: Vec::new(),
    };
    let model = p.file();
    if p.errors.is_empty() {
        Ok(model)
    } else {
        Err(p.errors)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    errors: Vec<ParseError>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.tokens.get(self.pos + n)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn span(&self) -> Span {
        match self.peek().or_else(|| self.tokens.last()) {
            Some(t) => Span::new(t.line, t.column),
            None => Span::new(1, 1),
        }
    }

    fn error(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let span = self.span();
        ParseError {
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: Some(match self.peek() {
                Some(t) => format!("'{}'", t.lexeme),
                None => "end of input".to_string(),
            }),
            line: span.line,
            column: span.column,
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_keyword(&self, k: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(k))
    }

    fn at_annotation(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::AnnotationKey)
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{p}'"), &[p]))
        }
    }

    fn expect_keyword(&mut self, k: &str) -> PResult<Span> {
        let span = self.span();
        if self.at_keyword(k) {
            self.pos += 1;
            Ok(span)
        } else {
            Err(self.error(format!("expected '{k}'"), &[k]))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let s = t.lexeme.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"), &["identifier"])),
        }
    }

    fn string(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::String => {
                let s = t.string_value();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"), &["string"])),
        }
    }

    /// Skips the rest of a broken statement. Stops after a `;`, before a `}`
    /// closing the enclosing block, or before the next statement keyword.
    fn recover(&mut self, start: usize) {
        if self.pos == start {
            self.bump();
        }
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if depth == 0 {
                if t.is_punct(";") {
                    self.pos += 1;
                    return;
                }
                if t.is_punct("}") {
                    return;
                }
                let line_start = self.pos == 0 || self.tokens[self.pos - 1].line < t.line;
                if (t.kind == TokenKind::Keyword && ITEM_KEYWORDS.contains(&t.lexeme.as_str()))
                    || t.kind == TokenKind::AnnotationKey
                    || (line_start && t.kind == TokenKind::Identifier && ANALYTICS_KEYS.contains(&t.lexeme.as_str()))
                {
                    return;
                }
            }
            if t.is_punct("{") {
                depth += 1;
            } else if t.is_punct("}") {
                depth -= 1;
            }
            self.pos += 1;
        }
    }

    /// Parses `{ item* }`, recovering from errors inside individual items.
    fn block(&mut self, mut item: impl FnMut(&mut Self) -> PResult<()>) -> PResult<()> {
        self.expect_punct("{")?;
        loop {
            if self.eat_punct("}") {
                return Ok(());
            }
            if self.peek().is_none() {
                return Err(self.error("unclosed block", &["}"]));
            }
            let start = self.pos;
            match item(self) {
                Ok(()) => {
                    self.eat_punct(";");
                }
                Err(e) => {
                    self.errors.push(e);
                    self.recover(start);
                }
            }
        }
    }

    fn file(&mut self) -> SourceModel {
        let mut model = SourceModel::default();
        if self.peek().is_none() {
            self.errors.push(self.error(
                "expected a declaration",
                &["import", "thing", "configuration", "annotate"],
            ));
            return model;
        }
        while self.peek().is_some() {
            let start = self.pos;
            let result = if self.at_keyword("import") {
                self.import().map(|i| model.imports.push(i))
            } else if self.at_keyword("thing") {
                self.thing().map(|t| model.things.push(t))
            } else if self.at_keyword("configuration") {
                self.configuration().map(|c| model.configurations.push(c))
            } else if self.at_keyword("annotate") {
                self.annotate().map(|d| model.directives.push(d))
            } else {
                Err(self.error(
                    "expected a declaration",
                    &["import", "thing", "configuration", "annotate"],
                ))
            };
            match result {
                Ok(()) => {
                    self.eat_punct(";");
                }
                Err(e) => {
                    self.errors.push(e);
                    self.recover(start);
                    // a stray `}` at top level can never be consumed by a block
                    if self.at_punct("}") {
                        self.bump();
                    }
                }
            }
        }
        model
    }

    fn import(&mut self) -> PResult<Import> {
        let span = self.expect_keyword("import")?;
        let path = self.string("import path")?;
        Ok(Import { path, span })
    }

    fn annotation(&mut self) -> PResult<Annotation> {
        let span = self.span();
        let key = match self.bump() {
            Some(t) if t.kind == TokenKind::AnnotationKey => t.annotation_key().to_string(),
            _ => unreachable!("caller checked for an annotation key"),
        };
        let value = match self.peek() {
            Some(t) if t.kind == TokenKind::String => t.string_value(),
            Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::Integer | TokenKind::Float) => {
                t.lexeme.clone()
            }
            _ => {
                return Err(self.error(
                    format!("expected value for annotation @{key}"),
                    &["string", "identifier"],
                ))
            }
        };
        self.pos += 1;
        Ok(Annotation { key, value, span })
    }

    fn trailing_annotations(&mut self) -> PResult<Vec<Annotation>> {
        let mut out = Vec::new();
        while self.at_annotation() {
            out.push(self.annotation()?);
        }
        Ok(out)
    }

    fn thing(&mut self) -> PResult<Thing> {
        let span = self.expect_keyword("thing")?;
        let mut thing = Thing::new(self.ident("thing name")?);
        thing.span = span;
        thing.annotations = self.trailing_annotations()?;
        self.block(|p| p.thing_item(&mut thing))?;
        Ok(thing)
    }

    fn thing_item(&mut self, thing: &mut Thing) -> PResult<()> {
        let Some(t) = self.peek() else {
            return Err(self.error("unexpected end of input", &["}"]));
        };
        if t.kind == TokenKind::AnnotationKey {
            let a = self.annotation()?;
            thing.annotations.push(a);
        } else if t.is_keyword("property") {
            let p = self.property()?;
            thing.properties.push(p);
        } else if t.is_keyword("message") {
            let m = self.message()?;
            thing.messages.push(m);
        } else if t.is_keyword("provided") || t.is_keyword("required") {
            let p = self.port()?;
            thing.ports.push(p);
        } else if t.is_keyword("statechart") {
            if thing.statechart.is_some() {
                return Err(self.error("a thing has at most one statechart", &[]));
            }
            thing.statechart = Some(self.statechart()?);
        } else if t.is_keyword("data_analytics") {
            if thing.analytics.is_some() {
                return Err(self.error("a thing has at most one data_analytics block", &[]));
            }
            thing.analytics = Some(self.analytics()?);
        } else {
            return Err(self.error(
                "expected a thing member",
                &[
                    "property",
                    "message",
                    "provided",
                    "required",
                    "statechart",
                    "data_analytics",
                    "annotation",
                    "}",
                ],
            ));
        }
        Ok(())
    }

    fn ty(&mut self) -> PResult<PropertyType> {
        let name_span = self.span();
        let name = self.ident("type name")?;
        let mut ty = PropertyType::from_name(&name).ok_or_else(|| ParseError {
            message: format!("unknown type '{name}'"),
            expected: ["Int", "Long", "Float", "Double", "Bool", "String"]
                .map(String::from)
                .to_vec(),
            found: Some(format!("'{name}'")),
            line: name_span.line,
            column: name_span.column,
        })?;
        while self.eat_punct("[") {
            let len = match self.peek() {
                Some(t) if t.kind == TokenKind::Integer => {
                    let n = t
                        .lexeme
                        .parse::<u32>()
                        .map_err(|_| self.error("array length out of range", &[]))?;
                    self.pos += 1;
                    Some(n)
                }
                _ => None,
            };
            self.expect_punct("]")?;
            ty = PropertyType::Array {
                element: Box::new(ty),
                len,
            };
        }
        Ok(ty)
    }

    fn property(&mut self) -> PResult<Property> {
        let span = self.expect_keyword("property")?;
        let name = self.ident("property name")?;
        self.expect_punct(":")?;
        let ty = self.ty()?;
        let initial = if self.eat_punct("=") {
            Some(self.literal()?)
        } else {
            None
        };
        let annotations = self.trailing_annotations()?;
        Ok(Property {
            name,
            ty,
            initial,
            annotations,
            span,
        })
    }

    fn message(&mut self) -> PResult<Message> {
        let span = self.expect_keyword("message")?;
        let name = self.ident("message name")?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.eat_punct(")") {
            loop {
                let pname = self.ident("parameter name")?;
                self.expect_punct(":")?;
                let ty = self.ty()?;
                params.push(Param { name: pname, ty });
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        let annotations = self.trailing_annotations()?;
        Ok(Message {
            name,
            params,
            annotations,
            span,
        })
    }

    fn ident_list(&mut self, what: &str) -> PResult<Vec<String>> {
        let mut out = vec![self.ident(what)?];
        while self.eat_punct(",") {
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    fn port(&mut self) -> PResult<Port> {
        let span = self.span();
        let kind = if self.at_keyword("provided") {
            PortKind::Provided
        } else {
            PortKind::Required
        };
        self.bump();
        self.expect_keyword("port")?;
        let mut port = Port {
            name: self.ident("port name")?,
            kind,
            sends: Vec::new(),
            receives: Vec::new(),
            annotations: Vec::new(),
            span,
        };
        port.annotations = self.trailing_annotations()?;
        self.block(|p| {
            if p.at_annotation() {
                let a = p.annotation()?;
                port.annotations.push(a);
            } else if p.at_keyword("sends") {
                p.bump();
                let list = p.ident_list("message name")?;
                port.sends.extend(list);
            } else if p.at_keyword("receives") {
                p.bump();
                let list = p.ident_list("message name")?;
                port.receives.extend(list);
            } else {
                return Err(p.error("expected a port member", &["sends", "receives", "}"]));
            }
            Ok(())
        })?;
        Ok(port)
    }

    fn statechart(&mut self) -> PResult<Statechart> {
        let span = self.expect_keyword("statechart")?;
        let name = self.ident("statechart name")?;
        self.expect_keyword("init")?;
        let initial = self.ident("initial state")?;
        let mut sc = Statechart {
            name,
            initial,
            states: Vec::new(),
            transitions: Vec::new(),
            annotations: Vec::new(),
            span,
        };
        sc.annotations = self.trailing_annotations()?;
        self.block(|p| {
            if p.at_annotation() {
                let a = p.annotation()?;
                sc.annotations.push(a);
            } else if p.at_keyword("state") {
                let s = p.state()?;
                sc.states.push(s);
            } else if p.at_keyword("transition") {
                let t = p.transition()?;
                sc.transitions.push(t);
            } else {
                return Err(p.error("expected a statechart member", &["state", "transition", "}"]));
            }
            Ok(())
        })?;
        Ok(sc)
    }

    fn state(&mut self) -> PResult<State> {
        let span = self.expect_keyword("state")?;
        let mut state = State {
            name: self.ident("state name")?,
            on_entry: Vec::new(),
            annotations: Vec::new(),
            span,
        };
        state.annotations = self.trailing_annotations()?;
        if self.at_punct("{") {
            self.block(|p| {
                if p.at_annotation() {
                    let a = p.annotation()?;
                    state.annotations.push(a);
                } else if p.at_keyword("on_entry") {
                    p.bump();
                    let actions = p.action_block()?;
                    state.on_entry.extend(actions);
                } else {
                    return Err(p.error("expected a state member", &["on_entry", "}"]));
                }
                Ok(())
            })?;
        }
        Ok(state)
    }

    fn action_block(&mut self) -> PResult<Vec<Action>> {
        if self.eat_punct("{") {
            let mut out = Vec::new();
            while !self.eat_punct("}") {
                if self.peek().is_none() {
                    return Err(self.error("unclosed action block", &["}"]));
                }
                out.push(self.action()?);
                self.eat_punct(";");
            }
            Ok(out)
        } else {
            Ok(vec![self.action()?])
        }
    }

    fn action(&mut self) -> PResult<Action> {
        if self.at_keyword("emit") {
            self.bump();
            let port = self.ident("port name")?;
            self.expect_punct("!")?;
            let message = self.ident("message name")?;
            self.expect_punct("(")?;
            let mut args = Vec::new();
            if !self.eat_punct(")") {
                loop {
                    args.push(self.expr()?);
                    if self.eat_punct(")") {
                        break;
                    }
                    self.expect_punct(",")?;
                }
            }
            Ok(Action::Emit { port, message, args })
        } else if self.at_keyword("set") {
            self.bump();
            let property = self.ident("property name")?;
            self.expect_punct("=")?;
            let value = self.expr()?;
            Ok(Action::Set { property, value })
        } else {
            Err(self.error("expected an action", &["emit", "set"]))
        }
    }

    fn transition(&mut self) -> PResult<Transition> {
        let span = self.expect_keyword("transition")?;
        let source = self.ident("source state")?;
        self.expect_punct("->")?;
        let target = self.ident("target state")?;
        self.expect_keyword("event")?;
        let port = self.ident("port name")?;
        self.expect_punct("?")?;
        let message = self.ident("message name")?;
        let guard = if self.at_keyword("guard") {
            self.bump();
            Some(self.expr()?)
        } else {
            None
        };
        let actions = if self.at_keyword("action") {
            self.bump();
            self.action_block()?
        } else {
            Vec::new()
        };
        let annotations = self.trailing_annotations()?;
        Ok(Transition {
            source,
            target,
            trigger: Trigger { port, message },
            guard,
            actions,
            annotations,
            span,
        })
    }

    fn analytics(&mut self) -> PResult<DataAnalyticsSpec> {
        let span = self.expect_keyword("data_analytics")?;
        let mut da = DataAnalyticsSpec::new(self.ident("data_analytics name")?);
        da.span = span;
        da.annotations = self.trailing_annotations()?;
        self.block(|p| p.analytics_item(&mut da))?;
        Ok(da)
    }

    fn analytics_item(&mut self, da: &mut DataAnalyticsSpec) -> PResult<()> {
        if self.at_annotation() {
            let a = self.annotation()?;
            da.annotations.push(a);
            return Ok(());
        }
        let key = match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier && ANALYTICS_KEYS.contains(&t.lexeme.as_str()) => {
                t.lexeme.clone()
            }
            _ => return Err(self.error("expected a data_analytics keyword", ANALYTICS_KEYS)),
        };
        self.bump();
        match key.as_str() {
            "labels" => {
                let v = self.ident("ON, OFF or SEMI")?;
                da.labels = Some(match v.as_str() {
                    "ON" => LabelsMode::On,
                    "OFF" => LabelsMode::Off,
                    "SEMI" => LabelsMode::Semi,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("invalid labels mode", &["ON", "OFF", "SEMI"]));
                    }
                });
            }
            "features" => {
                let list = self.ident_list("feature property")?;
                da.features.extend(list);
            }
            "prediction_results" => da.prediction_results = Some(self.ident("property name")?),
            "sequential" => {
                da.sequential = Some(if self.at_keyword("true") {
                    true
                } else if self.at_keyword("false") {
                    false
                } else {
                    return Err(self.error("expected a boolean", &["true", "false"]));
                });
                self.bump();
            }
            "timestamps" => {
                let v = self.ident("ON or OFF")?;
                da.timestamps = Some(match v.as_str() {
                    "ON" => Switch::On,
                    "OFF" => Switch::Off,
                    _ => {
                        self.pos -= 1;
                        return Err(self.error("invalid timestamps switch", &["ON", "OFF"]));
                    }
                });
            }
            "model_algorithm" => {
                let name = self.ident("algorithm name")?;
                let mut hyperparameters = Vec::new();
                if self.eat_punct("(") && !self.eat_punct(")") {
                    loop {
                        let hname = self.ident("hyperparameter name")?;
                        let value = self.hyper_value()?;
                        hyperparameters.push(Hyperparameter { name: hname, value });
                        if self.eat_punct(")") {
                            break;
                        }
                        self.expect_punct(",")?;
                    }
                }
                da.model_algorithm = Some(ModelAlgorithm { name, hyperparameters });
            }
            "training_results" => da.training_results = Some(self.string("file path")?),
            "dataset" => da.dataset = Some(self.string("file path")?),
            _ => unreachable!(),
        }
        Ok(())
    }

    fn hyper_value(&mut self) -> PResult<HyperValue> {
        if self.eat_punct("[") {
            let mut items = Vec::new();
            if !self.eat_punct("]") {
                loop {
                    items.push(self.hyper_value()?);
                    if self.eat_punct("]") {
                        break;
                    }
                    self.expect_punct(",")?;
                }
            }
            return Ok(HyperValue::List(items));
        }
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let s = t.lexeme.clone();
                self.bump();
                Ok(HyperValue::Ident(s))
            }
            Some(t) if t.kind == TokenKind::String => {
                let s = t.string_value();
                self.bump();
                Ok(HyperValue::Str(s))
            }
            _ => match self.literal()? {
                Literal::Int(i) => Ok(HyperValue::Int(i)),
                Literal::Float(x) => Ok(HyperValue::Float(x)),
                _ => Err(self.error("expected a hyperparameter value", &["number", "identifier"])),
            },
        }
    }

    fn configuration(&mut self) -> PResult<Configuration> {
        let span = self.expect_keyword("configuration")?;
        let mut cfg = Configuration {
            name: self.ident("configuration name")?,
            instances: Vec::new(),
            connectors: Vec::new(),
            annotations: Vec::new(),
            span,
        };
        cfg.annotations = self.trailing_annotations()?;
        self.block(|p| {
            if p.at_annotation() {
                let a = p.annotation()?;
                cfg.annotations.push(a);
            } else if p.at_keyword("instance") {
                let span = p.span();
                p.bump();
                let name = p.ident("instance name")?;
                p.expect_punct(":")?;
                let thing = p.ident("thing name")?;
                let annotations = p.trailing_annotations()?;
                cfg.instances.push(Instance {
                    name,
                    thing,
                    annotations,
                    span,
                });
            } else if p.at_keyword("connector") {
                let span = p.span();
                p.bump();
                let from = p.port_ref()?;
                p.expect_punct("=>")?;
                let to = p.port_ref()?;
                let annotations = p.trailing_annotations()?;
                cfg.connectors.push(Connector {
                    from,
                    to,
                    annotations,
                    span,
                });
            } else {
                return Err(p.error(
                    "expected a configuration member",
                    &["instance", "connector", "annotation", "}"],
                ));
            }
            Ok(())
        })?;
        Ok(cfg)
    }

    fn port_ref(&mut self) -> PResult<PortRef> {
        let instance = self.ident("instance name")?;
        self.expect_punct(".")?;
        let port = self.ident("port name")?;
        Ok(PortRef { instance, port })
    }

    fn annotate(&mut self) -> PResult<AnnotateDirective> {
        let span = self.expect_keyword("annotate")?;
        const KINDS: &[&str] = &[
            "thing",
            "property",
            "message",
            "port",
            "statechart",
            "state",
            "data_analytics",
            "configuration",
            "instance",
        ];
        let kind = match self.peek() {
            Some(t) if t.kind == TokenKind::Keyword && KINDS.contains(&t.lexeme.as_str()) => t.lexeme.clone(),
            _ => return Err(self.error("expected a node kind", KINDS)),
        };
        self.bump();
        let owner = self.ident("owner name")?;
        let member = |p: &mut Self| -> PResult<String> {
            p.expect_punct(".")?;
            p.ident("member name")
        };
        let target = match kind.as_str() {
            "thing" => NodePath::Thing(owner),
            "statechart" => NodePath::Statechart(owner),
            "data_analytics" => NodePath::Analytics(owner),
            "configuration" => NodePath::Configuration(owner),
            "property" => NodePath::Property(owner, member(self)?),
            "message" => NodePath::Message(owner, member(self)?),
            "port" => NodePath::Port(owner, member(self)?),
            "state" => NodePath::State(owner, member(self)?),
            _ => NodePath::Instance(owner, member(self)?),
        };
        if !self.at_annotation() {
            return Err(self.error("expected at least one annotation", &["annotation"]));
        }
        let annotations = self.trailing_annotations()?;
        Ok(AnnotateDirective {
            target,
            annotations,
            span,
        })
    }

    /// Literal with an optional leading minus folded into numbers.
    fn literal(&mut self) -> PResult<Literal> {
        let negative = self.at_punct("-")
            && self
                .peek_at(1)
                .is_some_and(|t| matches!(t.kind, TokenKind::Integer | TokenKind::Float));
        if negative {
            self.bump();
        }
        let Some(t) = self.peek().cloned() else {
            return Err(self.error("expected a literal", &["number", "string", "true", "false"]));
        };
        let lit = match t.kind {
            TokenKind::Integer => {
                let v: i128 = t
                    .lexeme
                    .parse()
                    .map_err(|_| self.error("integer literal out of range", &[]))?;
                let v = if negative { -v } else { v };
                Literal::Int(i64::try_from(v).map_err(|_| self.error("integer literal out of range", &[]))?)
            }
            TokenKind::Float => {
                let v: f64 = t
                    .lexeme
                    .parse()
                    .map_err(|_| self.error("malformed float literal", &[]))?;
                if !v.is_finite() {
                    return Err(self.error("float literal out of range", &[]));
                }
                Literal::Float(if negative { -v } else { v })
            }
            TokenKind::String if !negative => Literal::Str(t.string_value()),
            TokenKind::Keyword if t.lexeme == "true" => Literal::Bool(true),
            TokenKind::Keyword if t.lexeme == "false" => Literal::Bool(false),
            _ => return Err(self.error("expected a literal", &["number", "string", "true", "false"])),
        };
        self.bump();
        Ok(lit)
    }

    fn expr(&mut self) -> PResult<Expr> {
        self.expr_or()
    }

    fn expr_or(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_and()?;
        while self.at_keyword("or") {
            self.bump();
            let rhs = self.expr_and()?;
            lhs = Expr::binary(BinaryOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn expr_and(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_not()?;
        while self.at_keyword("and") {
            self.bump();
            let rhs = self.expr_not()?;
            lhs = Expr::binary(BinaryOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn expr_not(&mut self) -> PResult<Expr> {
        if self.at_keyword("not") {
            self.bump();
            let operand = self.expr_not()?;
            return Ok(Expr::unary(UnaryOp::Not, operand));
        }
        self.expr_cmp()
    }

    fn expr_cmp(&mut self) -> PResult<Expr> {
        let lhs = self.expr_add()?;
        let op = match self.peek().map(|t| (t.kind, t.lexeme.as_str())) {
            Some((TokenKind::Punctuation, "==")) => BinaryOp::Eq,
            Some((TokenKind::Punctuation, "!=")) => BinaryOp::Ne,
            Some((TokenKind::Punctuation, "<")) => BinaryOp::Lt,
            Some((TokenKind::Punctuation, "<=")) => BinaryOp::Le,
            Some((TokenKind::Punctuation, ">")) => BinaryOp::Gt,
            Some((TokenKind::Punctuation, ">=")) => BinaryOp::Ge,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.expr_add()?;
        Ok(Expr::binary(op, lhs, rhs))
    }

    fn expr_add(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_mul()?;
        loop {
            let op = if self.at_punct("+") {
                BinaryOp::Add
            } else if self.at_punct("-") {
                BinaryOp::Sub
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.expr_mul()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn expr_mul(&mut self) -> PResult<Expr> {
        let mut lhs = self.expr_unary()?;
        loop {
            let op = if self.at_punct("*") {
                BinaryOp::Mul
            } else if self.at_punct("/") {
                BinaryOp::Div
            } else if self.at_punct("%") {
                BinaryOp::Mod
            } else {
                return Ok(lhs);
            };
            self.bump();
            let rhs = self.expr_unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn expr_unary(&mut self) -> PResult<Expr> {
        if self.at_punct("-") {
            let numeric_next = self
                .peek_at(1)
                .is_some_and(|t| matches!(t.kind, TokenKind::Integer | TokenKind::Float));
            if numeric_next {
                return Ok(Expr::Literal(self.literal()?));
            }
            self.bump();
            let operand = self.expr_unary()?;
            return Ok(Expr::unary(UnaryOp::Neg, operand));
        }
        self.expr_atom()
    }

    fn expr_atom(&mut self) -> PResult<Expr> {
        if self.eat_punct("(") {
            let e = self.expr()?;
            self.expect_punct(")")?;
            return Ok(e);
        }
        match self.peek() {
            Some(t) if t.kind == TokenKind::Identifier => {
                let name = t.lexeme.clone();
                self.bump();
                Ok(Expr::Ident(name))
            }
            Some(t)
                if matches!(t.kind, TokenKind::Integer | TokenKind::Float | TokenKind::String)
                    || t.is_keyword("true")
                    || t.is_keyword("false") =>
            {
                Ok(Expr::Literal(self.literal()?))
            }
            _ => Err(self.error("expected an expression", &["identifier", "literal", "(", "-", "not"])),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::ModelKind;

    #[test]
    fn minimal_thing_is_pim() {
        let m = parse("thing T {}").unwrap();
        assert_eq!(m.things.len(), 1);
        assert_eq!(m.things[0].name, "T");
        assert!(m.configurations.is_empty());
        assert_eq!(m.kind(), ModelKind::Pim);
    }

    #[test]
    fn data_analytics_block() {
        let src = r#"
            thing Pump {
                property leak : Bool
                property vs1 : Double[60]
                data_analytics da {
                    labels ON
                    features vs1
                    prediction_results leak
                    sequential true
                    timestamps OFF
                    model_algorithm mlp(hidden_layer_sizes 32)
                    training_results "log.txt"
                    dataset "pump.csv"
                }
            }"#;
        let m = parse(src).unwrap();
        let da = m.things[0].analytics.as_ref().unwrap();
        assert_eq!(da.labels, Some(LabelsMode::On));
        assert_eq!(da.sequential, Some(true));
        assert_eq!(da.timestamps, Some(Switch::Off));
        assert_eq!(da.features, ["vs1"]);
        assert_eq!(da.prediction_results.as_deref(), Some("leak"));
        let alg = da.model_algorithm.as_ref().unwrap();
        assert_eq!(alg.name, "mlp");
        assert_eq!(alg.hyperparameter("hidden_layer_sizes"), Some(&HyperValue::Int(32)));
        assert_eq!(da.training_results.as_deref(), Some("log.txt"));
        assert_eq!(da.dataset.as_deref(), Some("pump.csv"));
    }

    #[test]
    fn import_and_configuration_make_psm() {
        let src = r#"
            import "pim.mdml"
            configuration Cfg {
                @compiler "python_java"
                instance p : Pump
            }"#;
        let m = parse(src).unwrap();
        assert_eq!(m.kind(), ModelKind::Psm);
        assert_eq!(m.imports.len(), 1);
        assert_eq!(m.imports[0].path, "pim.mdml");
        assert_eq!(m.configurations[0].annotations[0].key, "compiler");
        assert_eq!(m.configurations[0].annotations[0].value, "python_java");
    }

    #[test]
    fn statechart_with_guard_and_actions() {
        let src = r#"
            thing T {
                property n : Int = -2
                message go(k : Int)
                message done()
                provided port p { receives go sends done }
                statechart S init A {
                    state A { on_entry set n = 0 }
                    state B
                    transition A -> B event p?go guard k > 1 and not (n == 3) action {
                        set n = n + k; emit p!done()
                    }
                }
            }"#;
        let m = parse(src).unwrap();
        let t = &m.things[0];
        assert_eq!(t.properties[0].initial, Some(Literal::Int(-2)));
        let sc = t.statechart.as_ref().unwrap();
        assert_eq!(sc.states.len(), 2);
        assert_eq!(sc.transitions[0].actions.len(), 2);
        assert_eq!(
            sc.transitions[0].guard.as_ref().unwrap().to_string(),
            "k > 1 and not n == 3"
        );
    }

    #[test]
    fn annotate_directive() {
        let m = parse(r#"annotate property Pump.rate @type_mapping "Int -> short""#).unwrap();
        assert_eq!(m.directives[0].target, NodePath::Property("Pump".into(), "rate".into()));
        assert_eq!(m.directives[0].annotations[0].value, "Int -> short");
    }

    #[test]
    fn empty_source_is_an_error_at_origin() {
        let errs = parse("").unwrap_err();
        assert_eq!((errs[0].line, errs[0].column), (1, 1));
        let errs = parse("// nothing here\n").unwrap_err();
        assert_eq!((errs[0].line, errs[0].column), (1, 1));
    }

    #[test]
    fn recovery_collects_multiple_errors() {
        let src = "thing A {\n property x Int\n property y : Int\n message m(\n}\nthing B { property z : Nope }\n";
        let errs = parse(src).unwrap_err();
        assert!(errs.len() >= 3, "{errs:?}");
        assert_eq!(errs[0].line, 2);
        assert!(errs.iter().any(|e| e.message.contains("unknown type 'Nope'")));
    }

    #[test]
    fn error_carries_expected_and_found() {
        let errs = parse("thing { }").unwrap_err();
        assert_eq!(errs[0].expected, ["identifier"]);
        assert_eq!(errs[0].found.as_deref(), Some("'{'"));
        assert_eq!((errs[0].line, errs[0].column), (1, 7));
    }

    #[test]
    fn negative_literal_folding() {
        let m = parse("thing T { property a : Long = -9223372036854775808 property b : Double = -1.5e3 }").unwrap();
        assert_eq!(m.things[0].properties[0].initial, Some(Literal::Int(i64::MIN)));
        assert_eq!(m.things[0].properties[1].initial, Some(Literal::Float(-1500.0)));
    }

    #[test]
    fn hyperparameter_lists() {
        let m = parse(
            "thing T { data_analytics d { model_algorithm mlp(hidden_layer_sizes [64, 8], learning_rate 1e-3) } }",
        )
        .unwrap();
        let alg = m.things[0].analytics.as_ref().unwrap().model_algorithm.clone().unwrap();
        assert_eq!(
            alg.hyperparameters[0].value,
            HyperValue::List(vec![HyperValue::Int(64), HyperValue::Int(8)])
        );
        assert_eq!(alg.hyperparameters[1].value, HyperValue::Float(1e-3));
    }
}
