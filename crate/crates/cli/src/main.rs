use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use flowcause::bench::{self, Format, RenderOptions};
use flowcause::control::{make_spec, make_spec_auto, validate_bottom_propagation, ControlFlowSpec};
use flowcause::dsl::{self, CompiledModel, DslError};
use flowcause::engines::{self, Cause, EngineOptions};
use flowcause::model::{CausalQuery, GraphMode};
use flowcause::{EngineError, DEFAULT_SEARCH_LIMIT};

const EXIT_BENCH_FAILED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_SEARCH_SPACE: u8 = 4;
const EXIT_CF_VIOLATION: u8 = 5;

#[derive(Parser)]
#[command(name = "flowcause", version, about = "Cause enumeration for causal models with control flow")]
struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct ModelArgs {
    /// Model file.
    #[arg(short, long)]
    model: PathBuf,
    /// Control variables, overriding the `ctl` declarations.
    #[arg(long, value_delimiter = ',')]
    control: Option<Vec<String>>,
    /// Dependency graph used for the control-flow graph.
    #[arg(long, value_enum)]
    graph: Option<Graph>,
    /// Largest number of points a single quantifier may enumerate.
    #[arg(long, default_value_t = DEFAULT_SEARCH_LIMIT, value_parser = clap::value_parser!(u64).range(1..))]
    limit: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Print the solution of a model in a context.
    Eval {
        #[arg(short, long)]
        model: PathBuf,
        #[arg(short, long)]
        context: String,
    },
    /// Enumerate causes of a query.
    Causes {
        #[arg(short, long = "def", value_enum)]
        definition: Def,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(short, long)]
        context: String,
        /// Query name from the model file, or query text.
        #[arg(short, long)]
        query: String,
        /// Remove the outcome variable from each cause.
        #[arg(long)]
        strip_outcome: bool,
    },
    /// Check the bottom-propagation condition of the control variables.
    ValidateCf {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Run the benchmark corpus.
    Bench {
        /// Corpus directory.
        #[arg(env = bench::CORPUS_ENV, default_value = bench::DEFAULT_CORPUS)]
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = ReportFormat::Md)]
        format: ReportFormat,
        /// Worker threads.
        #[arg(short = 'j', long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Include timings in the report.
        #[arg(long)]
        timing: bool,
        #[arg(long, default_value_t = DEFAULT_SEARCH_LIMIT, value_parser = clap::value_parser!(u64).range(1..))]
        limit: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Def {
    Sufficient,
    SufficientRestricted,
    Cfpsc,
    Actual,
    ActualRestricted,
    Cfn,
}

#[derive(Clone, Copy, ValueEnum)]
enum Graph {
    Semantic,
    Syntactic,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Md,
    Csv,
    Json,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::SearchSpaceExceeded { .. } => EXIT_SEARCH_SPACE,
            _ => EXIT_INVALID,
        };
        Failure::new(code, e.to_string())
    }
}

fn dsl_failure(path: &str, e: DslError) -> Failure {
    let code = match e {
        DslError::Syntax(_) => EXIT_PARSE,
        DslError::Invalid(_) => EXIT_INVALID,
    };
    let lines: Vec<String> = match e {
        DslError::Syntax(es) => es.iter().map(|e| format!("{path}:{e}")).collect(),
        DslError::Invalid(es) => es.iter().map(|e| format!("{path}:{e}")).collect(),
    };
    Failure::new(code, lines.join("\n"))
}

fn load(path: &PathBuf) -> Result<CompiledModel, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    let doc = dsl::parse_model(&text).map_err(|e| dsl_failure(&path.display().to_string(), e))?;
    dsl::compile(&doc).map_err(|es| {
        let msgs: Vec<String> = es.iter().map(ToString::to_string).collect();
        Failure::new(EXIT_INVALID, msgs.join("\n"))
    })
}

fn spec_for(compiled: &CompiledModel, args: &ModelArgs) -> Result<ControlFlowSpec, Failure> {
    let control = args.control.as_ref().unwrap_or(&compiled.control);
    let spec = match args.graph {
        None => make_spec_auto(&compiled.model, control, args.limit)?,
        Some(Graph::Semantic) => make_spec(&compiled.model, control, GraphMode::Semantic, args.limit)?,
        Some(Graph::Syntactic) => make_spec(&compiled.model, control, GraphMode::Syntactic, args.limit)?,
    };
    Ok(spec)
}

fn resolve_query(compiled: &CompiledModel, q: &str) -> Result<CausalQuery, Failure> {
    if let Ok(named) = compiled.query(q) {
        return Ok(named.clone());
    }
    dsl::parse_query(q, compiled).map_err(|e| dsl_failure("query", e))
}

fn eval(model: &PathBuf, context: &str) -> Result<u8, Failure> {
    let compiled = load(model)?;
    let ctx = compiled
        .context(context)
        .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    let a = compiled
        .model
        .evaluate(ctx)
        .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    println!("{a}");
    Ok(0)
}

fn causes(def: Def, args: &ModelArgs, context: &str, query: &str, strip: bool) -> Result<u8, Failure> {
    let compiled = load(&args.model)?;
    let ctx = compiled
        .context(context)
        .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    let q = resolve_query(&compiled, query)?;
    if !q.intervention.is_empty() {
        return Err(Failure::new(EXIT_INVALID, "cause queries must not intervene"));
    }
    let f = &q.formula;
    let m = &compiled.model;
    let opts = EngineOptions {
        limit: args.limit,
        all_witnesses: false,
    };
    let needs_control = matches!(
        def,
        Def::SufficientRestricted | Def::Cfpsc | Def::ActualRestricted | Def::Cfn
    );
    let spec = if needs_control {
        let spec = spec_for(&compiled, args)?;
        if spec.is_empty() {
            return Err(Failure::new(EXIT_INVALID, "no control flow variables"));
        }
        Some(spec)
    } else {
        None
    };
    let result: Result<Vec<Cause>, EngineError> = match (def, &spec) {
        (Def::Sufficient, _) => engines::sufficient_causes(m, ctx, f, &opts),
        (Def::Actual, _) => engines::actual_causes(m, ctx, f, &opts)
            .map(|v| v.into_iter().map(|a| a.cause).collect()),
        (Def::SufficientRestricted, Some(s)) => engines::sufficient_causes_restricted(m, s, ctx, f, &opts),
        (Def::Cfpsc, Some(s)) => engines::cfpsc(m, s, ctx, f, &opts),
        (Def::ActualRestricted, Some(s)) => engines::actual_causes_restricted(m, s, ctx, f, &opts)
            .map(|v| v.into_iter().map(|a| a.cause).collect()),
        (Def::Cfn, Some(s)) => {
            engines::cfn_causes(m, s, ctx, f, &opts).map(|v| v.into_iter().map(|a| a.cause).collect())
        }
        (_, None) => unreachable!("control-flow definitions always have a spec"),
    };
    let mut found = match result {
        Ok(c) => c,
        Err(EngineError::NoOccurrence) => {
            eprintln!("note: the query does not hold in this context");
            Vec::new()
        }
        Err(e) => return Err(e.into()),
    };
    if strip {
        found = engines::strip_outcome(&found, f)?;
    }
    let mut lines: Vec<String> = found.iter().map(ToString::to_string).collect();
    lines.sort();
    if lines.is_empty() {
        println!("none");
    }
    for l in lines {
        println!("{l}");
    }
    Ok(0)
}

fn validate_cf(args: &ModelArgs) -> Result<u8, Failure> {
    let compiled = load(&args.model)?;
    let spec = spec_for(&compiled, args)?;
    if spec.is_empty() {
        println!("vacuous: no control flow variables");
        return Ok(0);
    }
    let violations = validate_bottom_propagation(&compiled.model, &spec, args.limit)?;
    if violations.is_empty() {
        println!("ok: {} control variables", spec.control_vars().len());
        return Ok(0);
    }
    let pairs = |b: &[(String, flowcause::model::Value)]| {
        b.iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for v in &violations {
        println!(
            "{}: not bot although its control parents are; context {}; data {}",
            v.variable,
            pairs(&v.context.values),
            pairs(&v.data_setting.bindings)
        );
    }
    Ok(EXIT_CF_VIOLATION)
}

fn run_bench(dir: &PathBuf, format: ReportFormat, jobs: Option<u64>, timing: bool, limit: u64) -> Result<u8, Failure> {
    if !dir.is_dir() {
        return Err(Failure::new(
            EXIT_INVALID,
            format!("{}: corpus directory not found", dir.display()),
        ));
    }
    let cases = bench::load_cases(dir).map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    let jobs = jobs
        .map(|j| j as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let opts = EngineOptions {
        limit,
        all_witnesses: false,
    };
    let report = bench::run_all(&cases, jobs, &opts);
    let format = match format {
        ReportFormat::Md => Format::Markdown,
        ReportFormat::Csv => Format::Csv,
        ReportFormat::Json => Format::Json,
    };
    print!("{}", bench::render_report(&report, format, RenderOptions { timing }));
    if report.all_pass() {
        Ok(0)
    } else {
        eprintln!("{}", report.summary());
        Ok(EXIT_BENCH_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => tracing_subscriber::filter::LevelFilter::WARN,
        1 => tracing_subscriber::filter::LevelFilter::INFO,
        2 => tracing_subscriber::filter::LevelFilter::DEBUG,
        _ => tracing_subscriber::filter::LevelFilter::TRACE,
    };
    tracing_subscriber::fmt()
        .with_max_level(level)
        .with_writer(std::io::stderr)
        .without_time()
        .init();

    let outcome = match &cli.command {
        Command::Eval { model, context } => eval(model, context),
        Command::Causes {
            definition,
            model,
            context,
            query,
            strip_outcome,
        } => causes(*definition, model, context, query, *strip_outcome),
        Command::ValidateCf { model } => validate_cf(model),
        Command::Bench {
            dir,
            format,
            jobs,
            timing,
            limit,
        } => run_bench(dir, *format, *jobs, *timing, *limit),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
