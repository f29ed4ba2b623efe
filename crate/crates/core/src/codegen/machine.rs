//! Language-neutral view of a thing's statechart, flattened into template
//! scopes. Transition order is declaration order, matching the simulator:
//! the first enabled transition fires, then the target's entry actions run.

use crate::ir::{Action, Expr, PropertyType, Thing};

use super::lang::{Lang, MachineExpr};
use super::template::Ctx;

fn params_of(thing: &Thing, message: &str) -> Vec<(String, PropertyType)> {
    thing
        .message(message)
        .map(|m| m.params.iter().map(|p| (p.name.clone(), p.ty.clone())).collect())
        .unwrap_or_default()
}

fn param_list(lang: Lang, params: &[(String, PropertyType)]) -> String {
    let parts: Vec<String> = params
        .iter()
        .map(|(n, ty)| {
            let id = lang.ident(n);
            match lang {
                Lang::Python => id,
                Lang::Java => lang.declaration(ty, &id),
                Lang::Cpp => {
                    if matches!(ty, PropertyType::Array { .. }) {
                        format!("const {}* {id}", lang.scalar_type(ty))
                    } else {
                        lang.declaration(ty, &id)
                    }
                }
            }
        })
        .collect();
    match lang {
        // Follows `self`.
        Lang::Python => parts.iter().map(|p| format!(", {p}")).collect(),
        Lang::Java | Lang::Cpp => parts.join(", "),
    }
}

fn render_action(lang: Lang, thing: &Thing, action: &Action, params: &[String]) -> String {
    let style = MachineExpr { lang, params };
    let args = |args: &[Expr]| args.iter().map(|a| a.render(&style)).collect::<Vec<_>>().join(", ");
    match action {
        Action::Emit { port, message, args: a } => {
            let call = format!("send_{port}_{message}({})", args(a));
            match lang {
                Lang::Python => format!("self.{call}"),
                Lang::Java | Lang::Cpp => format!("{call};"),
            }
        }
        Action::Set { property, value } => {
            let target = style.ident_of_property(property);
            let rhs = value.render(&style);
            let ty = thing.property(property).map(|p| &p.ty);
            match (lang, ty) {
                (Lang::Python, _) => format!("{target} = {rhs}"),
                (Lang::Java, Some(ty)) if ty.is_numeric() => {
                    format!("{target} = ({}) ({rhs});", lang.scalar_type(ty))
                }
                (Lang::Cpp, Some(ty)) if ty.is_numeric() => {
                    format!("{target} = static_cast<{}>({rhs});", lang.scalar_type(ty))
                }
                _ => format!("{target} = {rhs};"),
            }
        }
    }
}

impl MachineExpr<'_> {
    fn ident_of_property(&self, name: &str) -> String {
        let id = self.lang.ident(name);
        match self.lang {
            Lang::Python => format!("self.{id}"),
            Lang::Java => format!("this.{id}"),
            Lang::Cpp => format!("this->{id}"),
        }
    }
}

fn lines(items: Vec<String>) -> Vec<Ctx> {
    items.into_iter().map(|l| Ctx::new().set("line", l)).collect()
}

/// Template scope describing `thing` in `lang`.
pub(crate) fn machine_ctx(thing: &Thing, lang: Lang) -> Ctx {
    let properties = thing
        .properties
        .iter()
        .map(|p| {
            let id = lang.ident(&p.name);
            Ctx::new()
                .set("name", id.clone())
                .set("decl", lang.declaration(&p.ty, &id))
                .set("init", lang.initial_value(&p.ty, p.initial.as_ref()))
                .set("mdml_type", p.ty.to_string())
        })
        .collect();

    let mut senders = Vec::new();
    let mut receivers = Vec::new();
    for port in &thing.ports {
        for msg in &port.sends {
            let params = params_of(thing, msg);
            let names: Vec<String> = params.iter().map(|(n, _)| lang.ident(n)).collect();
            senders.push(
                Ctx::new()
                    .set("port", port.name.clone())
                    .set("message", msg.clone())
                    .set("method", format!("send_{}_{msg}", port.name))
                    .set("params", param_list(lang, &params))
                    .set("args", names.join(", "))
                    .list("cpp_args", cpp_print_args(&params)),
            );
        }
        for msg in &port.receives {
            let params = params_of(thing, msg);
            let names: Vec<String> = params.iter().map(|(n, _)| n.clone()).collect();
            let cases = thing
                .statechart
                .iter()
                .flat_map(|sc| sc.states.iter())
                .filter_map(|state| {
                    let transitions: Vec<Ctx> = thing
                        .statechart
                        .iter()
                        .flat_map(|sc| sc.transitions.iter())
                        .filter(|t| t.source == state.name && t.trigger.port == port.name && t.trigger.message == *msg)
                        .map(|t| {
                            let style = MachineExpr { lang, params: &names };
                            let cond = match &t.guard {
                                Some(g) => g.render(&style),
                                None if lang == Lang::Python => "True".into(),
                                None => "true".into(),
                            };
                            let actions = t
                                .actions
                                .iter()
                                .map(|a| render_action(lang, thing, a, &names))
                                .collect();
                            Ctx::new()
                                .set("label", t.label())
                                .set("cond", cond)
                                .set("target", lang.ident(&t.target))
                                .list("actions", lines(actions))
                        })
                        .collect();
                    (!transitions.is_empty()).then(|| {
                        Ctx::new()
                            .set("state", lang.ident(&state.name))
                            .set("state_name", state.name.clone())
                            .list("transitions", transitions)
                    })
                })
                .collect();
            receivers.push(
                Ctx::new()
                    .set("port", port.name.clone())
                    .set("message", msg.clone())
                    .set("method", format!("receive_{}_{msg}", port.name))
                    .set("params", param_list(lang, &params))
                    .list("cases", cases),
            );
        }
    }

    let chart = thing.statechart.iter().map(|sc| {
        let states = sc
            .states
            .iter()
            .map(|s| {
                let entry = s.on_entry.iter().map(|a| render_action(lang, thing, a, &[])).collect();
                Ctx::new()
                    .set("state", lang.ident(&s.name))
                    .set("state_name", s.name.clone())
                    .list("entry", lines(entry))
            })
            .collect();
        Ctx::new()
            .set("chart", sc.name.clone())
            .set("initial", lang.ident(&sc.initial))
            .list("states", states)
    });

    Ctx::new()
        .set("thing", thing.name.clone())
        .set("class", format!("{}Statechart", thing.name))
        .list("properties", properties)
        .list("senders", senders)
        .list("receivers", receivers)
        .list("chart", chart.collect())
}

/// `Serial.print` arguments for a C++ send stub; arrays print their length.
fn cpp_print_args(params: &[(String, PropertyType)]) -> Vec<Ctx> {
    params
        .iter()
        .map(|(n, ty)| {
            let id = Lang::Cpp.ident(n);
            let expr = match ty {
                PropertyType::Array { .. } => format!("\"[{ty}]\""),
                _ => id,
            };
            Ctx::new().set("expr", expr)
        })
        .collect()
}
