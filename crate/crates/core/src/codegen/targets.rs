//! File sets of the three generator families.

use crate::ir::PropertyType;
use crate::mlcore::{Standardizer, TRAIN_FRACTION};
use crate::modelconv::{emit_carray, FORMAT_VERSION};
use crate::platform::{arena_layout, TargetLanguage, CARRAY_SYMBOL};

use super::lang::Lang;
use super::machine::machine_ctx;
use super::template::{Ctx, Template};
use super::{class_name, CodegenError, Job, MlPart};

const PY_STATECHART: &str = include_str!("templates/py_statechart.py.tmpl");
const PY_MLQ: &str = include_str!("templates/py_mlq.py.tmpl");
const PY_TRAIN: &str = include_str!("templates/py_train.py.tmpl");
const PY_PREDICT: &str = include_str!("templates/py_predict.py.tmpl");
const PY_MAIN: &str = include_str!("templates/py_main.py.tmpl");
const JAVA_STATECHART: &str = include_str!("templates/java_statechart.java.tmpl");
const JAVA_SINK: &str = include_str!("templates/java_sink.java.tmpl");
const CPP_STATECHART: &str = include_str!("templates/cpp_statechart.h.tmpl");
const CPP_MLQ: &str = include_str!("templates/cpp_mlq.h.tmpl");
const CPP_SKETCH: &str = include_str!("templates/cpp_sketch.ino.tmpl");
const CPP_STANDARDIZER: &str = include_str!("templates/cpp_standardizer.h.tmpl");

/// Milliseconds between two iterations of the sketch's main loop.
const LOOP_DELAY_MS: u32 = 1000;

type Files = Vec<(String, Vec<u8>)>;

fn render(name: &str, src: &str, ctx: &Ctx, lang: Lang) -> Result<Vec<u8>, CodegenError> {
    let t = Template::parse(name, src)?;
    Ok(t.render(ctx, &|s| lang.string_literal(s))?.into_bytes())
}

pub(crate) fn emit(job: &Job) -> Result<Files, CodegenError> {
    match job.profile.language {
        TargetLanguage::PythonJava => python_java(job),
        TargetLanguage::Python => python(job),
        TargetLanguage::Cpp => cpp(job),
    }
}

fn standardizer_csv(ml: &MlPart) -> Result<Vec<u8>, CodegenError> {
    let s = ml
        .standardizer
        .clone()
        .unwrap_or_else(|| Standardizer::identity(ml.plan.input_width));
    let mut out = Vec::new();
    s.write_csv(&mut out)?;
    Ok(out)
}

fn model_files(ml: &MlPart, files: &mut Files) -> Result<(), CodegenError> {
    files.push(("model/model.mlq".into(), ml.mlq.clone()));
    files.push(("model/standardizer.csv".into(), standardizer_csv(ml)?));
    Ok(())
}

fn mlq_ctx() -> Ctx {
    Ctx::new().set("format_version", FORMAT_VERSION.to_string())
}

fn python_java(job: &Job) -> Result<Files, CodegenError> {
    let mut files = Files::new();
    let cfg = &job.configuration.name;
    if let Some(ml) = &job.ml {
        let plan = &ml.plan;
        let c = &plan.config;
        let features = plan
            .features
            .iter()
            .map(|f| Ctx::new().set("name", f.name.clone()).set("width", f.width.to_string()))
            .collect();
        let hidden: Vec<String> = plan.hidden_layers.iter().map(usize::to_string).collect();
        let ctx = Ctx::new()
            .set("thing", ml.thing.name.clone())
            .set("analytics", plan.analytics.clone())
            .set("dataset", plan.dataset.clone().unwrap_or_default())
            .set(
                "training_results",
                plan.training_results
                    .clone()
                    .unwrap_or_else(|| "training_results.tsv".into()),
            )
            .list("features", features)
            .set("input_width", plan.input_width.to_string())
            .set("hidden_layers", hidden.join(", "))
            .set("activation", plan.activation.name())
            .set("learning_rate", format!("{:?}", c.learning_rate))
            .set("batch_size", c.batch_size.to_string())
            .set("epochs", c.max_epochs.to_string())
            .set("patience", c.patience.to_string())
            .set("validation_fraction", format!("{:?}", c.validation_fraction))
            .set("shuffle", if c.shuffle { "True" } else { "False" })
            .set("seed", c.seed.to_string())
            .set("train_fraction", format!("{TRAIN_FRACTION:?}"));
        files.push((
            "src/python/mlq.py".into(),
            render("py_mlq", PY_MLQ, &mlq_ctx(), Lang::Python)?,
        ));
        files.push((
            "src/python/train.py".into(),
            render("py_train", PY_TRAIN, &ctx, Lang::Python)?,
        ));
        let predict = Ctx::new()
            .set("thing", ml.thing.name.clone())
            .set("root", "\"..\", \"..\"");
        files.push((
            "src/python/predict.py".into(),
            render("py_predict", PY_PREDICT, &predict, Lang::Python)?,
        ));
        model_files(ml, &mut files)?;
    }
    let sink = Ctx::new().set("configuration", cfg.clone());
    files.push((
        "src/java/MessageSink.java".into(),
        render("java_sink", JAVA_SINK, &sink, Lang::Java)?,
    ));
    for thing in &job.things {
        let ctx = machine_ctx(thing, Lang::Java);
        files.push((
            format!("src/java/{}.java", class_name(&thing.name)),
            render("java_statechart", JAVA_STATECHART, &ctx, Lang::Java)?,
        ));
    }
    Ok(files)
}

/// Python tuple body for a property's shape: `` for scalars, `60,` for a
/// vector.
fn shape_tuple(ty: &PropertyType) -> String {
    match ty {
        PropertyType::Array { len: Some(n), .. } => format!("{n},"),
        _ => String::new(),
    }
}

fn things_ctx(job: &Job) -> Vec<Ctx> {
    job.things
        .iter()
        .map(|t| Ctx::new().set("class", class_name(&t.name)))
        .collect()
}

fn label_ctx(ml: &MlPart, lang: Lang) -> Vec<Ctx> {
    ml.plan
        .label
        .iter()
        .map(|l| Ctx::new().set("label_name", lang.ident(l)))
        .collect()
}

fn python(job: &Job) -> Result<Files, CodegenError> {
    let mut files = Files::new();
    let ml: Vec<Ctx> = job
        .ml
        .iter()
        .map(|ml| {
            let features = ml
                .plan
                .features
                .iter()
                .map(|f| {
                    let ty = ml
                        .thing
                        .property(&f.name)
                        .map(|p| shape_tuple(&p.ty))
                        .unwrap_or_default();
                    Ctx::new()
                        .set("name", Lang::Python.ident(&f.name))
                        .set("width", f.width.to_string())
                        .set("shape", ty)
                })
                .collect();
            Ctx::new()
                .set("thing", ml.thing.name.clone())
                .set("instance", ml.instance.clone())
                .list("features", features)
                .list("label", label_ctx(ml, Lang::Python))
        })
        .collect();
    let instances = job
        .configuration
        .instances
        .iter()
        .map(|i| {
            Ctx::new()
                .set("name", i.name.clone())
                .set("class", class_name(&i.thing))
        })
        .collect();
    let connectors = job
        .configuration
        .connectors
        .iter()
        .flat_map(|c| [(&c.from, &c.to), (&c.to, &c.from)])
        .map(|(a, b)| {
            Ctx::new()
                .set("from_instance", a.instance.clone())
                .set("from_port", a.port.clone())
                .set("to_instance", b.instance.clone())
                .set("to_port", b.port.clone())
        })
        .collect();
    let (note, quantized) = match &job.ml {
        Some(m) if m.quantized => ("int8 weights with one scale and zero point per layer", true),
        Some(_) => ("float32 weights", false),
        None => ("no machine-learning model in this configuration", false),
    };
    let main = Ctx::new()
        .set("configuration", job.configuration.name.clone())
        .set("display_name", job.profile.display_name.clone())
        .list("things", things_ctx(job))
        .set("model_note", note)
        .set("quantized", if quantized { "True" } else { "False" })
        .list("ml", ml)
        .list("instances", instances)
        .list("connectors", connectors);
    files.push(("src/main.py".into(), render("py_main", PY_MAIN, &main, Lang::Python)?));
    if let Some(ml) = &job.ml {
        files.push(("src/mlq.py".into(), render("py_mlq", PY_MLQ, &mlq_ctx(), Lang::Python)?));
        model_files(ml, &mut files)?;
    }
    for thing in &job.things {
        let ctx = machine_ctx(thing, Lang::Python);
        files.push((
            format!("src/{}.py", class_name(&thing.name)),
            render("py_statechart", PY_STATECHART, &ctx, Lang::Python)?,
        ));
    }
    Ok(files)
}

/// C++ spelling of an `f32`; non-finite values clamp to the largest float.
fn cpp_float(v: f64) -> String {
    let v = v as f32;
    let v = if v.is_finite() { v } else { f32::MAX.copysign(v) };
    format!("{v:?}f")
}

fn cpp_lines(values: impl Iterator<Item = f64>) -> Vec<Ctx> {
    let values: Vec<String> = values.map(cpp_float).collect();
    values
        .chunks(6)
        .map(|c| Ctx::new().set("line", format!("{},", c.join(", "))))
        .collect()
}

fn cpp(job: &Job) -> Result<Files, CodegenError> {
    let mut files = Files::new();
    let cfg = &job.configuration.name;
    let dir = format!("src/{cfg}");
    let ml: Vec<Ctx> = job
        .ml
        .iter()
        .map(|ml| {
            let (arena_floats, _) = arena_layout(&ml.plan.dims());
            let instance = format!("inst_{}", ml.instance);
            let features = ml
                .plan
                .features
                .iter()
                .map(|f| {
                    let ctype = ml
                        .thing
                        .property(&f.name)
                        .map(|p| Lang::Cpp.scalar_type(&p.ty))
                        .unwrap_or("float");
                    Ctx::new()
                        .set("ctype", ctype)
                        .set("name", Lang::Cpp.ident(&f.name))
                        .set("width", f.width.to_string())
                })
                .collect();
            Ctx::new()
                .set("arena_floats", arena_floats.to_string())
                .set("arena_bytes", (4 * arena_floats).to_string())
                .set("instance", instance)
                .list("features", features)
                .list("label", label_ctx(ml, Lang::Cpp))
        })
        .collect();
    let instances = job
        .configuration
        .instances
        .iter()
        .map(|i| {
            Ctx::new()
                .set("name", format!("inst_{}", i.name))
                .set("class", class_name(&i.thing))
        })
        .collect();
    let sketch = Ctx::new()
        .set("configuration", cfg.clone())
        .set("display_name", job.profile.display_name.clone())
        .list("things", things_ctx(job))
        .list("ml", ml)
        .list("instances", instances)
        .set("loop_delay_ms", LOOP_DELAY_MS.to_string());
    files.push((
        format!("{dir}/{cfg}.ino"),
        render("cpp_sketch", CPP_SKETCH, &sketch, Lang::Cpp)?,
    ));
    for thing in &job.things {
        let ctx = machine_ctx(thing, Lang::Cpp);
        files.push((
            format!("{dir}/{}.h", class_name(&thing.name)),
            render("cpp_statechart", CPP_STATECHART, &ctx, Lang::Cpp)?,
        ));
    }
    if let Some(ml) = &job.ml {
        files.push((
            format!("{dir}/mlq_interpreter.h"),
            render("cpp_mlq", CPP_MLQ, &mlq_ctx(), Lang::Cpp)?,
        ));
        let ctx = match &ml.standardizer {
            Some(s) => Ctx::new()
                .list(
                    "fitted",
                    vec![Ctx::new()
                        .set("n", s.mean.len().to_string())
                        .list("mean_lines", cpp_lines(s.mean.iter().copied()))
                        .list("scale_lines", cpp_lines(s.std.iter().map(|d| 1.0 / d)))],
                )
                .flag("identity", false),
            None => Ctx::new().list("fitted", Vec::new()).flag("identity", true),
        };
        files.push((
            format!("{dir}/standardizer.h"),
            render("cpp_standardizer", CPP_STANDARDIZER, &ctx, Lang::Cpp)?,
        ));
        files.push((
            "model/model_data.cc".into(),
            emit_carray(&ml.mlq, CARRAY_SYMBOL)?.into_bytes(),
        ));
        files.push(("model/model.mlq".into(), ml.mlq.clone()));
    }
    Ok(files)
}
