//! Strategies shared by the property and acceptance tests.
#![allow(dead_code)]

use proptest::collection::{btree_set, vec};
use proptest::prelude::*;

use mdml::ir::*;
use mdml::mlcore::{Activation, MlpArchitecture, MlpModel};
use mdml::syntax::is_plain_identifier;

pub fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_]{0,7}".prop_filter("keyword", |s| is_plain_identifier(s))
}

/// Printable text including quotes, backslashes and the escapes the lexer knows.
pub fn text() -> impl Strategy<Value = String> {
    "([ -~]|\n|\t){0,12}"
}

pub fn annotations() -> impl Strategy<Value = Vec<Annotation>> {
    vec(
        (ident(), prop_oneof![text(), "[a-z][a-z0-9_+]{0,10}"]).prop_map(|(k, v)| Annotation::new(k, v)),
        0..3,
    )
}

pub fn scalar_type() -> impl Strategy<Value = PropertyType> {
    prop_oneof![
        Just(PropertyType::Int),
        Just(PropertyType::Long),
        Just(PropertyType::Float),
        Just(PropertyType::Double),
        Just(PropertyType::Bool),
        Just(PropertyType::String),
    ]
}

pub fn property_type() -> impl Strategy<Value = PropertyType> {
    prop_oneof![
        3 => scalar_type(),
        1 => (scalar_type(), proptest::option::of(1u32..10_000)).prop_map(|(e, len)| PropertyType::Array {
            element: Box::new(e),
            len,
        }),
    ]
}

pub fn float() -> impl Strategy<Value = f64> {
    prop_oneof![
        0.0..1e6f64,
        (1u32..1000, -12i32..12).prop_map(|(m, e)| m as f64 * 10f64.powi(e))
    ]
}

pub fn literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        (0i64..i64::MAX).prop_map(Literal::Int),
        float().prop_map(Literal::Float),
        any::<bool>().prop_map(Literal::Bool),
        text().prop_map(Literal::Str),
    ]
}

pub fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![literal().prop_map(Expr::Literal), ident().prop_map(Expr::Ident)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        let unary = prop_oneof![Just(UnaryOp::Not), Just(UnaryOp::Neg)];
        let binary = prop_oneof![
            Just(BinaryOp::Or),
            Just(BinaryOp::And),
            Just(BinaryOp::Eq),
            Just(BinaryOp::Ne),
            Just(BinaryOp::Lt),
            Just(BinaryOp::Le),
            Just(BinaryOp::Gt),
            Just(BinaryOp::Ge),
            Just(BinaryOp::Add),
            Just(BinaryOp::Sub),
            Just(BinaryOp::Mul),
            Just(BinaryOp::Div),
            Just(BinaryOp::Mod),
        ];
        prop_oneof![
            (unary, inner.clone()).prop_map(|(op, e)| Expr::Unary {
                op,
                operand: Box::new(e)
            }),
            (binary, inner.clone(), inner).prop_map(|(op, l, r)| Expr::Binary {
                op,
                lhs: Box::new(l),
                rhs: Box::new(r)
            }),
        ]
    })
}

pub fn action() -> impl Strategy<Value = Action> {
    prop_oneof![
        (ident(), ident(), vec(expr(), 0..3)).prop_map(|(port, message, args)| Action::Emit { port, message, args }),
        (ident(), expr()).prop_map(|(property, value)| Action::Set { property, value }),
    ]
}

pub fn statechart() -> impl Strategy<Value = Statechart> {
    let state = (ident(), vec(action(), 0..3), annotations()).prop_map(|(name, on_entry, annotations)| State {
        name,
        on_entry,
        annotations,
        span: Span::default(),
    });
    let transition = (
        ident(),
        ident(),
        ident(),
        ident(),
        proptest::option::of(expr()),
        vec(action(), 0..3),
        annotations(),
    )
        .prop_map(
            |(source, target, port, message, guard, actions, annotations)| Transition {
                source,
                target,
                trigger: Trigger { port, message },
                guard,
                actions,
                annotations,
                span: Span::default(),
            },
        );
    (ident(), ident(), vec(state, 0..4), vec(transition, 0..4), annotations()).prop_map(
        |(name, initial, states, transitions, annotations)| Statechart {
            name,
            initial,
            states,
            transitions,
            annotations,
            span: Span::default(),
        },
    )
}

pub fn hyper_value() -> impl Strategy<Value = HyperValue> {
    let scalar = prop_oneof![
        (0i64..1_000_000).prop_map(HyperValue::Int),
        float().prop_map(HyperValue::Float),
        ident().prop_map(HyperValue::Ident),
        text().prop_map(HyperValue::Str),
    ];
    prop_oneof![
        3 => scalar.clone(),
        1 => vec(scalar, 0..4).prop_map(HyperValue::List),
    ]
}

pub fn analytics() -> impl Strategy<Value = DataAnalyticsSpec> {
    let algorithm = (ident(), vec((ident(), hyper_value()), 0..4)).prop_map(|(name, hs)| ModelAlgorithm {
        name,
        hyperparameters: hs
            .into_iter()
            .map(|(name, value)| Hyperparameter { name, value })
            .collect(),
    });
    (
        ident(),
        proptest::option::of(prop_oneof![
            Just(LabelsMode::On),
            Just(LabelsMode::Off),
            Just(LabelsMode::Semi)
        ]),
        vec(ident(), 0..4),
        proptest::option::of(ident()),
        proptest::option::of(any::<bool>()),
        proptest::option::of(prop_oneof![Just(Switch::On), Just(Switch::Off)]),
        proptest::option::of(algorithm),
        proptest::option::of(text()),
        proptest::option::of(text()),
        annotations(),
    )
        .prop_map(
            |(name, labels, features, prediction_results, sequential, timestamps, alg, training, dataset, ann)| {
                DataAnalyticsSpec {
                    labels,
                    features,
                    prediction_results,
                    sequential,
                    timestamps,
                    model_algorithm: alg,
                    training_results: training,
                    dataset,
                    annotations: ann,
                    ..DataAnalyticsSpec::new(name)
                }
            },
        )
}

pub fn thing() -> impl Strategy<Value = Thing> {
    let property = (ident(), property_type(), proptest::option::of(literal()), annotations()).prop_map(
        |(name, ty, initial, annotations)| Property {
            name,
            ty,
            initial,
            annotations,
            span: Span::default(),
        },
    );
    let message =
        (ident(), vec((ident(), property_type()), 0..3), annotations()).prop_map(|(name, params, annotations)| {
            Message {
                name,
                params: params.into_iter().map(|(name, ty)| Param { name, ty }).collect(),
                annotations,
                span: Span::default(),
            }
        });
    let port = (
        ident(),
        prop_oneof![Just(PortKind::Provided), Just(PortKind::Required)],
        vec(ident(), 0..3),
        vec(ident(), 0..3),
        annotations(),
    )
        .prop_map(|(name, kind, sends, receives, annotations)| Port {
            name,
            kind,
            sends,
            receives,
            annotations,
            span: Span::default(),
        });
    (
        ident(),
        vec(property, 0..4),
        vec(message, 0..3),
        vec(port, 0..3),
        proptest::option::of(statechart()),
        proptest::option::of(analytics()),
        annotations(),
    )
        .prop_map(
            |(name, properties, messages, ports, statechart, analytics, annotations)| Thing {
                properties,
                messages,
                ports,
                statechart,
                analytics,
                annotations,
                ..Thing::new(name)
            },
        )
}

pub fn configuration(name: String) -> impl Strategy<Value = Configuration> {
    let instance = (ident(), ident(), annotations()).prop_map(|(name, thing, annotations)| Instance {
        name,
        thing,
        annotations,
        span: Span::default(),
    });
    let port_ref = || (ident(), ident()).prop_map(|(instance, port)| PortRef { instance, port });
    let connector = (port_ref(), port_ref(), annotations()).prop_map(|(from, to, annotations)| Connector {
        from,
        to,
        annotations,
        span: Span::default(),
    });
    (vec(instance, 0..3), vec(connector, 0..3), annotations()).prop_map(move |(instances, connectors, annotations)| {
        Configuration {
            name: name.clone(),
            instances,
            connectors,
            annotations,
            span: Span::default(),
        }
    })
}

pub fn configurations() -> impl Strategy<Value = Vec<Configuration>> {
    btree_set(ident(), 0..3).prop_flat_map(|names| names.into_iter().map(configuration).collect::<Vec<_>>())
}

pub fn directive() -> impl Strategy<Value = AnnotateDirective> {
    let target = prop_oneof![
        ident().prop_map(NodePath::Thing),
        (ident(), ident()).prop_map(|(a, b)| NodePath::Property(a, b)),
        (ident(), ident()).prop_map(|(a, b)| NodePath::Message(a, b)),
        (ident(), ident()).prop_map(|(a, b)| NodePath::Port(a, b)),
        ident().prop_map(NodePath::Statechart),
        (ident(), ident()).prop_map(|(a, b)| NodePath::State(a, b)),
        ident().prop_map(NodePath::Analytics),
        ident().prop_map(NodePath::Configuration),
        (ident(), ident()).prop_map(|(a, b)| NodePath::Instance(a, b)),
    ];
    let nonempty = annotations().prop_filter("annotate needs an annotation", |a| !a.is_empty());
    (target, nonempty).prop_map(|(target, annotations)| AnnotateDirective {
        target,
        annotations,
        span: Span::default(),
    })
}

pub fn import() -> impl Strategy<Value = Import> {
    text().prop_map(|path| Import {
        path,
        span: Span::default(),
    })
}

/// Non-empty: an empty file is a syntax error by design.
pub fn source_model() -> impl Strategy<Value = SourceModel> {
    (
        vec(import(), 0..2),
        vec(thing(), 0..3),
        configurations(),
        vec(directive(), 0..3),
    )
        .prop_map(|(imports, things, configurations, directives)| SourceModel {
            imports,
            things,
            configurations,
            directives,
        })
        .prop_filter("empty model", |m| !m.is_empty())
}

pub fn pim() -> impl Strategy<Value = SourceModel> {
    (vec(thing(), 1..3), vec(directive(), 0..2)).prop_map(|(things, directives)| SourceModel {
        things,
        directives,
        ..SourceModel::default()
    })
}

pub fn overlay() -> impl Strategy<Value = SourceModel> {
    (configurations(), vec(directive(), 0..3)).prop_map(|(configurations, directives)| SourceModel {
        configurations,
        directives,
        ..SourceModel::default()
    })
}

pub fn architecture() -> impl Strategy<Value = MlpArchitecture> {
    vec(1usize..12, 2..5).prop_map(|dims| MlpArchitecture::classifier(dims, Activation::Relu).unwrap())
}

/// A seeded model with a random subset of weights pushed far out, so
/// quantization ranges vary between layers.
pub fn mlp() -> impl Strategy<Value = MlpModel> {
    (
        architecture(),
        any::<u64>(),
        vec((any::<usize>(), -50.0f32..50.0), 0..4),
    )
        .prop_map(|(arch, seed, spikes)| {
            let mut layers = MlpModel::init(&arch, seed).layers().to_vec();
            for (i, v) in spikes {
                let count = layers.len();
                let layer = &mut layers[i % count];
                let n = layer.weights.len();
                layer.weights[i % n] = v;
            }
            MlpModel::from_layers(layers).unwrap()
        })
}
