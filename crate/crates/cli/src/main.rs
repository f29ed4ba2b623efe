//! `mdml`: check, generate, train, predict, convert, dump, estimate,
//! simulate and synth-data.
//!
//! Exit codes: 0 ok, 1 syntax error, 2 model error or bad command line,
//! 3 deployability rejection, 4 I/O or file format error, 5 non-finite loss.

mod error;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use mdml::codegen::{self, is_target_choice, GenerateOptions};
use mdml::ir::{parse_events, simulate_statechart, Value};
use mdml::linker::{diagnose, fs_loader, link, resolve_imports, LinkError, LinkedModel, TrainingPlan};
use mdml::mlcore::{
    evaluate, run_pipeline, synth_dataset, Activation, Averaging, Classifier, Dataset, MlpArchitecture, MlpModel,
    Standardizer, SynthSpec,
};
use mdml::modelconv::{self, AnyModel};
use mdml::platform::{check_deployability, estimate_sizes, Policy, Registry, CARRAY_SYMBOL};

use error::{codegen_failure, link_failure, CliError, Status};

#[derive(Parser)]
#[command(
    name = "mdml",
    version,
    about = "Compiler for MDML models of IoT things with embedded ML"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct JsonFlag {
    /// Print machine-readable JSON on stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, link and check a model.
    Check {
        file: PathBuf,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Generate the source tree of one configuration.
    Generate {
        file: PathBuf,
        /// Configuration to generate; optional when the model declares one.
        #[arg(long)]
        config: Option<String>,
        #[arg(short, long)]
        out_dir: PathBuf,
        /// Overrides the configuration's @compiler annotation.
        #[arg(long)]
        target: Option<String>,
        /// Trained float model to embed instead of seeded initial weights.
        #[arg(long)]
        model: Option<PathBuf>,
        /// Standardizer CSV (`mean,std`) matching the model.
        #[arg(long)]
        standardizer: Option<PathBuf>,
        #[arg(long, default_value = "source", value_parser = parse_policy)]
        policy: Policy,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Train the model of a thing's data_analytics block on a CSV dataset.
    Train {
        file: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Model output; standardizer.csv, metrics.json and the training log
        /// are written next to it.
        #[arg(short, long)]
        output: PathBuf,
        /// Thing to train; optional when one thing has a data_analytics block.
        #[arg(long)]
        thing: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long)]
        epochs: Option<usize>,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Classify every row of a CSV dataset; prints `row,class,score0,score1`.
    Predict {
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        standardizer: Option<PathBuf>,
        /// Quantize a float model before predicting.
        #[arg(long)]
        quantized: bool,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Convert a float model to int8.
    Convert {
        model: PathBuf,
        #[arg(long)]
        quantize: bool,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Write a model file as a C byte array.
    Dump {
        model: PathBuf,
        #[arg(long, default_value = CARRAY_SYMBOL)]
        symbol: String,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Report model sizes and whether they fit a platform.
    Estimate {
        /// Layer widths, input first, e.g. 6120,32,2.
        #[arg(long, value_delimiter = ',', required = true)]
        arch: Vec<usize>,
        #[arg(long)]
        platform: Option<String>,
        #[arg(long, default_value = "source", value_parser = parse_policy)]
        policy: Policy,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Run a thing's statechart on a list of events.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        thing: String,
        /// `port?message(args)` items separated by `;` or spaces.
        #[arg(long, default_value = "")]
        events: String,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// Write a synthetic hydraulic-rig dataset.
    SynthData {
        #[arg(short, default_value_t = 2205)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SynthSpec::default().negative_share)]
        negative_share: f64,
        #[arg(long, default_value_t = SynthSpec::default().separation)]
        separation: f64,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        out: JsonFlag,
    },
    /// List the code generation targets.
    Targets {
        #[command(flatten)]
        out: JsonFlag,
    },
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    Policy::from_name(s).ok_or_else(|| format!("unknown policy '{s}' (source, strict)"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Semantic as u8 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mdml: {e}");
            ExitCode::from(e.status as u8)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Check { file, out } => check(&file, out.json),
        Command::Generate {
            file,
            config,
            out_dir,
            target,
            model,
            standardizer,
            policy,
            out,
        } => {
            let opts = GenerateOptions {
                target,
                model: model.as_deref().map(read_float_model).transpose()?,
                standardizer: standardizer.as_deref().map(read_standardizer).transpose()?,
                policy,
            };
            generate(&file, config.as_deref(), &out_dir, opts, out.json)
        }
        Command::Train {
            file,
            data,
            output,
            thing,
            seed,
            learning_rate,
            epochs,
            out,
        } => train(
            &file,
            &data,
            &output,
            thing.as_deref(),
            (seed, learning_rate, epochs),
            out.json,
        ),
        Command::Predict {
            model,
            data,
            standardizer,
            quantized,
            out,
        } => predict(&model, &data, standardizer.as_deref(), quantized, out.json),
        Command::Convert {
            model,
            quantize,
            output,
            out,
        } => convert(&model, quantize, &output, out.json),
        Command::Dump {
            model,
            symbol,
            output,
            out,
        } => dump(&model, &symbol, &output, out.json),
        Command::Estimate {
            arch,
            platform,
            policy,
            out,
        } => estimate(&arch, platform.as_deref(), policy, out.json),
        Command::Simulate {
            file,
            thing,
            events,
            out,
        } => simulate(&file, &thing, &events, out.json),
        Command::SynthData {
            n,
            seed,
            negative_share,
            separation,
            output,
            out,
        } => synth(
            SynthSpec {
                n,
                negative_share,
                separation,
                seed,
            },
            &output,
            out.json,
        ),
        Command::Targets { out } => targets(out.json),
    }
}

fn print_json(value: &Json) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON values serialize")
    );
}

fn registry() -> Result<Registry, CliError> {
    Ok(Registry::from_env()?)
}

fn path_str(p: &Path) -> Result<&str, CliError> {
    p.to_str()
        .ok_or_else(|| CliError::new(Status::Io, format!("{}: path is not UTF-8", p.display())))
}

fn link_file(file: &Path, registry: &Registry) -> Result<LinkedModel, CliError> {
    let (linked, warnings) = link(path_str(file)?, &fs_loader, registry).map_err(link_failure)?;
    for w in &warnings {
        eprintln!("{w}");
    }
    Ok(linked)
}

/// Writes `bytes` through a temporary sibling and a rename.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn read_model(path: &Path) -> Result<AnyModel, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    modelconv::load(&bytes).map_err(|e| CliError::conv(path, e))
}

fn read_float_model(path: &Path) -> Result<MlpModel, CliError> {
    match read_model(path)? {
        AnyModel::Float(m) => Ok(m),
        AnyModel::Quantized(_) => Err(CliError::usage(format!(
            "{}: expected a float model; generators quantize it themselves",
            path.display()
        ))),
    }
}

fn read_standardizer(path: &Path) -> Result<Standardizer, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    Standardizer::read_csv(BufReader::new(f)).map_err(|e| CliError::ml(path, e))
}

fn read_dataset(path: &Path) -> Result<Dataset, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    Dataset::read_csv(BufReader::new(f)).map_err(|e| CliError::ml(path, e))
}

fn check(file: &Path, json: bool) -> Result<(), CliError> {
    let registry = registry()?;
    let result = link(path_str(file)?, &fs_loader, &registry);
    if json {
        let report = match &result {
            Ok((linked, warnings)) => json!({
                "status": "ok",
                "diagnostics": warnings,
                "sources": linked.sources,
                "things": linked.model.things.iter().map(|t| &t.name).collect::<Vec<_>>(),
                "configurations": linked.model.configurations.iter().map(|c| json!({
                    "name": c.name,
                    "target": linked.compiler_of(&c.name),
                })).collect::<Vec<_>>(),
            }),
            Err(LinkError::Parse { file, errors }) => json!({
                "status": "syntax_error",
                "errors": errors.iter().map(|e| json!({
                    "file": file,
                    "line": e.line,
                    "column": e.column,
                    "message": e.message,
                    "expected": e.expected,
                    "found": e.found,
                })).collect::<Vec<_>>(),
            }),
            Err(LinkError::Semantic(d)) => json!({"status": "model_error", "diagnostics": d}),
            Err(LinkError::Io { file, message }) => {
                json!({"status": "io_error", "errors": [{"file": file, "message": message}]})
            }
        };
        print_json(&report);
    }
    match result {
        Ok((linked, warnings)) => {
            if !json {
                for w in &warnings {
                    eprintln!("{w}");
                }
                println!(
                    "{}: ok ({} thing(s), {} configuration(s), {} warning(s))",
                    file.display(),
                    linked.model.things.len(),
                    linked.model.configurations.len(),
                    warnings.len()
                );
            }
            Ok(())
        }
        Err(e) => Err(link_failure(e)),
    }
}

fn generate(
    file: &Path,
    config: Option<&str>,
    out_dir: &Path,
    opts: GenerateOptions,
    json: bool,
) -> Result<(), CliError> {
    let registry = registry()?;
    let linked = resolve_imports(path_str(file)?, &fs_loader).map_err(link_failure)?;
    let config = match config {
        Some(c) => c.to_string(),
        None => match linked.model.configurations.as_slice() {
            [only] => only.name.clone(),
            [] => {
                return Err(CliError::usage(format!(
                    "{}: declares no configuration",
                    file.display()
                )))
            }
            many => {
                let names: Vec<&str> = many.iter().map(|c| c.name.as_str()).collect();
                return Err(CliError::usage(format!("pass --config, one of: {}", names.join(", "))));
            }
        },
    };
    let diags: Vec<_> = diagnose(&linked, &registry)
        .into_iter()
        .filter(|d| opts.target.is_none() || !is_target_choice(d, &config))
        .collect();
    for d in diags.iter().filter(|d| !d.is_error()) {
        eprintln!("{d}");
    }
    if diags.iter().any(|d| d.is_error()) {
        return Err(link_failure(LinkError::Semantic(diags)));
    }
    let tree = match codegen::generate(&linked, &config, &registry, &opts) {
        Ok(t) => t,
        Err(codegen::CodegenError::Rejected(decision)) => {
            if json {
                print_json(&json!({"status": "rejected", "configuration": config, "deploy": decision}));
            }
            return Err(codegen_failure(codegen::CodegenError::Rejected(decision)));
        }
        Err(e) => return Err(codegen_failure(e)),
    };
    let root = codegen::write_tree(&tree, out_dir).map_err(codegen_failure)?;
    if json {
        print_json(&json!({
            "status": "ok",
            "configuration": tree.configuration,
            "target": tree.target,
            "root": root,
            "inputs": tree.inputs,
            "files": tree.files.iter().map(|(p, b)| json!({"path": p, "bytes": b.len()})).collect::<Vec<_>>(),
            "deploy": tree.deploy,
        }));
    } else {
        println!(
            "{} -> {} ({} files)",
            tree.configuration,
            root.display(),
            tree.files.len()
        );
        for p in tree.paths() {
            println!("  {p}");
        }
    }
    Ok(())
}

fn ml_thing(linked: &LinkedModel, thing: Option<&str>) -> Result<TrainingPlan, CliError> {
    let name = match thing {
        Some(t) => t.to_string(),
        None => {
            let names: Vec<&str> = linked
                .model
                .things
                .iter()
                .filter(|t| t.analytics.is_some())
                .map(|t| t.name.as_str())
                .collect();
            match names.as_slice() {
                [one] => one.to_string(),
                [] => return Err(CliError::usage("no thing declares a data_analytics block")),
                _ => return Err(CliError::usage(format!("pass --thing, one of: {}", names.join(", ")))),
            }
        }
    };
    linked
        .training_plan(&name)
        .ok_or_else(|| CliError::usage(format!("thing '{name}' has no usable data_analytics block")))
}

fn train(
    file: &Path,
    data_path: &Path,
    output: &Path,
    thing: Option<&str>,
    (seed, learning_rate, epochs): (Option<u64>, Option<f64>, Option<usize>),
    json: bool,
) -> Result<(), CliError> {
    let registry = registry()?;
    let linked = link_file(file, &registry)?;
    let mut plan = ml_thing(&linked, thing)?;
    if let Some(s) = seed {
        plan.config.seed = s;
    }
    if let Some(lr) = learning_rate {
        plan.config.learning_rate = lr;
    }
    if let Some(e) = epochs {
        plan.config.max_epochs = e;
    }
    let arch = plan.architecture().map_err(|e| CliError::ml(file, e))?;
    let data = read_dataset(data_path)?;
    if data.n_features() != plan.input_width {
        return Err(CliError::new(
            Status::Io,
            format!(
                "{}: {} feature columns, but the features of {} need {}",
                data_path.display(),
                data.n_features(),
                plan.thing,
                plan.input_width
            ),
        ));
    }
    let outcome = run_pipeline(&arch, &data, &plan.config).map_err(|e| CliError::ml(data_path, e))?;

    let dir = output
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let bytes = modelconv::save_float(&outcome.model).map_err(|e| CliError::conv(output, e))?;
    write_atomic(output, &bytes)?;
    let mut csv = Vec::new();
    outcome
        .standardizer
        .write_csv(&mut csv)
        .map_err(|e| CliError::ml(output, e))?;
    let standardizer_path = dir.join("standardizer.csv");
    write_atomic(&standardizer_path, &csv)?;
    let log_name = plan
        .training_results
        .clone()
        .unwrap_or_else(|| "training_results.tsv".into());
    let log_path = dir.join(
        Path::new(&log_name)
            .file_name()
            .unwrap_or("training_results.tsv".as_ref()),
    );
    write_atomic(&log_path, outcome.history.to_log().as_bytes())?;
    let report = json!({
        "thing": plan.thing,
        "architecture": arch.dims(),
        "config": plan.config,
        "train_rows": outcome.train_rows,
        "test_rows": outcome.test_rows,
        "metrics": outcome.metrics,
        "stopped_epoch": outcome.history.stopped_epoch,
        "best_epoch": outcome.history.best_epoch,
        "stop_reason": outcome.history.stop_reason,
        "model": output,
        "standardizer": standardizer_path,
        "training_log": log_path,
    });
    let metrics_path = dir.join("metrics.json");
    let metrics_text = serde_json::to_string_pretty(&report).expect("JSON values serialize") + "\n";
    write_atomic(&metrics_path, metrics_text.as_bytes())?;
    if json {
        print_json(&report);
    } else {
        let m = &outcome.metrics;
        println!(
            "{}: accuracy {:.4}, precision {:.4}, recall {:.4} on {} test rows; stopped after epoch {} (best {})",
            plan.thing,
            m.accuracy,
            m.precision,
            m.recall,
            outcome.test_rows,
            outcome.history.stopped_epoch,
            outcome.history.best_epoch
        );
        println!(
            "wrote {}, {}, {}, {}",
            output.display(),
            standardizer_path.display(),
            metrics_path.display(),
            log_path.display()
        );
    }
    Ok(())
}

fn predict(
    model_path: &Path,
    data_path: &Path,
    standardizer: Option<&Path>,
    quantized: bool,
    json: bool,
) -> Result<(), CliError> {
    let mut model = read_model(model_path)?;
    if quantized {
        if let AnyModel::Float(m) = &model {
            model = AnyModel::Quantized(modelconv::quantize(m).map_err(|e| CliError::conv(model_path, e))?);
        }
    }
    let mut data = read_dataset(data_path)?;
    if data.n_features() != model.input_dim() {
        return Err(CliError::new(
            Status::Io,
            format!(
                "{}: {} feature columns, but {} reads {}",
                data_path.display(),
                data.n_features(),
                model_path.display(),
                model.input_dim()
            ),
        ));
    }
    if let Some(p) = standardizer {
        data = read_standardizer(p)?.transform(&data).map_err(|e| CliError::ml(p, e))?;
    }
    let metrics = evaluate(&model, &data, Averaging::Weighted).map_err(|e| CliError::ml(data_path, e))?;
    let mut rows = Vec::with_capacity(data.len());
    for row in data.rows() {
        rows.push(model.predict(row).map_err(|e| CliError::ml(data_path, e))?);
    }
    if json {
        print_json(&json!({
            "model": model_path,
            "dtype": if matches!(model, AnyModel::Quantized(_)) { "int8" } else { "float32" },
            "metrics": metrics,
            "predictions": rows.iter().enumerate().map(|(i, p)| json!({
                "row": i, "class": p.class, "scores": p.scores,
            })).collect::<Vec<_>>(),
        }));
    } else {
        let stdout = std::io::stdout();
        let mut w = BufWriter::new(stdout.lock());
        let header: Vec<String> = (0..rows.first().map_or(0, |p| p.scores.len()))
            .map(|i| format!("score{i}"))
            .collect();
        let _ = writeln!(
            w,
            "row,class{}",
            header.iter().map(|h| format!(",{h}")).collect::<String>()
        );
        for (i, p) in rows.iter().enumerate() {
            let scores: String = p.scores.iter().map(|s| format!(",{s}")).collect();
            let _ = writeln!(w, "{i},{}{scores}", p.class);
        }
        let _ = w.flush();
        eprintln!(
            "accuracy {:.4}, precision {:.4}, recall {:.4} ({} rows, support-weighted)",
            metrics.accuracy,
            metrics.precision,
            metrics.recall,
            data.len()
        );
    }
    Ok(())
}

fn convert(model_path: &Path, quantize: bool, output: &Path, json: bool) -> Result<(), CliError> {
    if !quantize {
        return Err(CliError::usage("convert: nothing to do; pass --quantize"));
    }
    let model = read_float_model(model_path)?;
    let q = modelconv::quantize(&model).map_err(|e| CliError::conv(model_path, e))?;
    let float_bytes = modelconv::save_float(&model)
        .map_err(|e| CliError::conv(model_path, e))?
        .len();
    let bytes = modelconv::save_quantized(&q).map_err(|e| CliError::conv(output, e))?;
    write_atomic(output, &bytes)?;
    let layers: Vec<Json> = q
        .layers()
        .iter()
        .map(|l| json!({"in": l.in_dim, "out": l.out_dim, "scale": l.scale, "zero_point": l.zero_point}))
        .collect();
    if json {
        print_json(&json!({
            "input": model_path,
            "output": output,
            "float_bytes": float_bytes,
            "quantized_bytes": bytes.len(),
            "layers": layers,
        }));
    } else {
        println!(
            "{} -> {}: {} -> {} bytes ({:.1}% smaller)",
            model_path.display(),
            output.display(),
            float_bytes,
            bytes.len(),
            100.0 * (1.0 - bytes.len() as f64 / float_bytes as f64)
        );
        for (i, l) in q.layers().iter().enumerate() {
            println!(
                "  layer {i}: {}x{} scale {:e} zero point {}",
                l.out_dim, l.in_dim, l.scale, l.zero_point
            );
        }
    }
    Ok(())
}

fn dump(model_path: &Path, symbol: &str, output: &Path, json: bool) -> Result<(), CliError> {
    let bytes = std::fs::read(model_path).map_err(|e| CliError::io(model_path, e))?;
    modelconv::load(&bytes).map_err(|e| CliError::conv(model_path, e))?;
    let text = modelconv::emit_carray(&bytes, symbol).map_err(|e| CliError::usage(format!("--symbol: {e}")))?;
    write_atomic(output, text.as_bytes())?;
    let ratio = text.len() as f64 / bytes.len().max(1) as f64;
    if json {
        print_json(&json!({
            "input": model_path,
            "output": output,
            "symbol": symbol,
            "model_bytes": bytes.len(),
            "source_bytes": text.len(),
            "expansion_ratio": ratio,
        }));
    } else {
        println!(
            "{} -> {}: {} bytes as {} bytes of C ({ratio:.2}x)",
            model_path.display(),
            output.display(),
            bytes.len(),
            text.len()
        );
    }
    Ok(())
}

fn estimate(dims: &[usize], platform: Option<&str>, policy: Policy, json: bool) -> Result<(), CliError> {
    let arch = MlpArchitecture::classifier(dims.to_vec(), Activation::Relu)
        .map_err(|e| CliError::usage(format!("--arch: {e}")))?;
    let report = estimate_sizes(&arch).map_err(|e| CliError::usage(format!("--arch: {e}")))?;
    let decision = match platform {
        None => None,
        Some(id) => {
            let registry = registry()?;
            let profile = registry.lookup(id).ok_or_else(|| {
                CliError::usage(format!(
                    "--platform: unknown platform '{id}'; valid: {}",
                    registry.ids().join(", ")
                ))
            })?;
            Some(check_deployability(&report, profile, policy))
        }
    };
    if json {
        print_json(&json!({"sizes": report, "deploy": decision}));
    } else {
        let kb = |b: u64| b as f64 / 1000.0;
        println!("architecture {:?}: {} parameters", report.dims, report.param_count);
        println!(
            "  float model      {:>10} bytes ({:.1} KB)",
            report.float_serialized_bytes,
            kb(report.float_serialized_bytes)
        );
        println!(
            "  quantized model  {:>10} bytes ({:.1} KB)",
            report.quantized_serialized_bytes,
            kb(report.quantized_serialized_bytes)
        );
        println!(
            "  C array source   {:>10} bytes ({:.1} KB, {:.2}x the quantized model)",
            report.carray_source_bytes,
            kb(report.carray_source_bytes),
            report.expansion_ratio
        );
        println!("  activation arena {:>10} bytes", report.arena_bytes);
        if let Some(d) = &decision {
            for c in &d.checks {
                println!(
                    "  {:?}: needs {} of {} bytes (margin {})",
                    c.constraint,
                    c.required_bytes,
                    c.available_bytes,
                    c.margin()
                );
            }
            println!(
                "{} on {} under the {} policy",
                if d.accepted { "deployable" } else { "NOT deployable" },
                d.compiler_id,
                d.policy.name()
            );
        }
    }
    match decision {
        Some(d) if !d.accepted => Err(CliError::new(
            Status::Rejected,
            format!("model does not fit {}", d.compiler_id),
        )),
        _ => Ok(()),
    }
}

fn render_value(v: &Value) -> String {
    match v {
        Value::Int(i) => i.to_string(),
        Value::Float(f) => format!("{f:?}"),
        Value::Bool(b) => b.to_string(),
        Value::Str(s) => format!("{s:?}"),
    }
}

fn simulate(file: &Path, thing: &str, events: &str, json: bool) -> Result<(), CliError> {
    let registry = registry()?;
    let linked = link_file(file, &registry)?;
    let t = linked
        .model
        .thing(thing)
        .ok_or_else(|| CliError::usage(format!("--thing: no thing named '{thing}'")))?;
    let events = parse_events(events).map_err(|e| CliError::usage(format!("--events: {e}")))?;
    let trace = simulate_statechart(t, &events).map_err(|e| CliError::usage(format!("--events: {e}")))?;
    if json {
        print_json(&serde_json::to_value(&trace).expect("traces serialize"));
    } else {
        println!("states: {}", trace.states.join(" -> "));
        for e in &trace.emitted {
            let args: Vec<String> = e.args.iter().map(render_value).collect();
            println!("step {}: {}!{}({})", e.step, e.port, e.message, args.join(", "));
        }
        println!("dropped events: {}", trace.dropped);
    }
    Ok(())
}

fn synth(spec: SynthSpec, output: &Path, json: bool) -> Result<(), CliError> {
    let data = synth_dataset(&spec).map_err(|e| CliError::usage(format!("synth-data: {e}")))?;
    let mut buf = Vec::new();
    data.write_csv(&mut buf).map_err(|e| CliError::ml(output, e))?;
    write_atomic(output, &buf)?;
    let positives = data.labels().iter().filter(|&&l| l == 1).count();
    if json {
        print_json(&json!({
            "output": output,
            "parameters": spec,
            "rows": data.len(),
            "features": data.n_features(),
            "positives": positives,
        }));
    } else {
        println!(
            "{}: {} rows x {} features, {} leaky",
            output.display(),
            data.len(),
            data.n_features(),
            positives
        );
    }
    Ok(())
}

fn targets(json: bool) -> Result<(), CliError> {
    let registry = registry()?;
    let list = codegen::list_targets(&registry);
    if json {
        print_json(&json!(list
            .iter()
            .map(|(id, d)| json!({"id": id, "description": d}))
            .collect::<Vec<_>>()));
    } else {
        for (id, d) in list {
            println!("{id:<32} {d}");
        }
    }
    Ok(())
}
