//! `qra` command-line tool.
//!
//! Exit codes: 0 success, 1 dataset or input errors, 2 usage errors,
//! 3 computation errors.

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qra::io::{self, DatasetError};
use qra::model::GroupError;
use qra::{
    render_condition_matrix, render_precision_table, subgroup_assess, ConditionMatch, QraDataset,
    QraError, QraReport, RenderFormat, RenderSpec, Severity,
};

const EXIT_DATASET: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_COMPUTE: u8 = 3;
const BUILTIN: &str = "builtin";

#[derive(Parser)]
#[command(
    name = "qra",
    version,
    about = "Quantified reproducibility assessment of evaluation scores"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a dataset for errors and warnings.
    Validate(InputArgs),
    /// Run a QRA test for every (object, measurand) pair with at least two measurements.
    Assess(AssessArgs),
    /// Run a QRA test on the measurements matching every --where filter.
    Subgroup(SubgroupArgs),
    /// Monte Carlo check of the standard deviation estimators on normal samples.
    Simulate(SimulateArgs),
    /// Write the dataset in CSV or JSON form (choose with --render).
    Export(InputArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    Csv,
    Json,
    Auto,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Render {
    Text,
    Markdown,
    Csv,
    Json,
}

impl From<Render> for RenderFormat {
    fn from(r: Render) -> Self {
        match r {
            Render::Text => RenderFormat::Text,
            Render::Markdown => RenderFormat::Markdown,
            Render::Csv => RenderFormat::Csv,
            Render::Json => RenderFormat::Json,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Dataset file, or `builtin` for the bundled reference dataset.
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value = "auto")]
    format: InputFormat,
    #[arg(long, value_enum, default_value = "text")]
    render: Render,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AssessArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    object: Option<String>,
    #[arg(long)]
    measurand: Option<String>,
    /// Also print the condition matrix of each test (ignored for JSON, whose
    /// reports already carry it).
    #[arg(long)]
    conditions: bool,
}

#[derive(Args)]
struct SubgroupArgs {
    #[command(flatten)]
    assess: AssessArgs,
    /// Filter `cond.<name>=<label>`; repeat to require several conditions.
    #[arg(long = "where", value_name = "cond.NAME=LABEL", value_parser = parse_where)]
    filters: Vec<ConditionMatch>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Sample size per trial.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    /// Population standard deviation.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    sigma: f64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    render: Render,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_where(s: &str) -> Result<ConditionMatch, String> {
    let (key, label) = s
        .split_once('=')
        .ok_or_else(|| format!("expected cond.<name>=<label>, got `{s}`"))?;
    let name = key
        .strip_prefix(io::COND_PREFIX)
        .filter(|n| !n.is_empty())
        .ok_or_else(|| format!("filter key must be cond.<name>, got `{key}`"))?;
    Ok(ConditionMatch::new(name, label))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
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

impl From<QraError> for Failure {
    fn from(e: QraError) -> Self {
        let code = match &e {
            QraError::Group(GroupError::UnknownObject(_) | GroupError::UnknownMeasurand(_))
            | QraError::UnknownCondition(_) => EXIT_DATASET,
            _ => EXIT_COMPUTE,
        };
        Failure::new(code, e.to_string())
    }
}

fn load(args: &InputArgs) -> Result<QraDataset, Failure> {
    if args.input == BUILTIN {
        return Ok(qra::bundled_paper_dataset());
    }
    let format = match args.format {
        InputFormat::Csv => io::Format::Csv,
        InputFormat::Json => io::Format::Json,
        InputFormat::Auto => io::Format::Auto,
    };
    let dataset = io::load_dataset(&args.input, format).map_err(|e| {
        if let DatasetError::Validation(issues) = &e {
            for issue in issues {
                eprintln!("{issue}");
            }
        }
        let message = match e {
            DatasetError::Io { .. } => e.to_string(),
            _ => format!("{}: {e}", args.input),
        };
        Failure::new(EXIT_DATASET, message)
    })?;
    for issue in io::validate_dataset(&dataset) {
        eprintln!("{issue}");
    }
    Ok(dataset)
}

fn styling_enabled(out: &Option<PathBuf>) -> bool {
    out.is_none() && std::env::var_os("QRA_NO_COLOR").is_none() && std::io::stdout().is_terminal()
}

fn emit(text: &str, out: &Option<PathBuf>, render: Render) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            Failure::new(
                EXIT_DATASET,
                format!("cannot write {}: {e}", path.display()),
            )
        }),
        None => {
            let styled;
            let text = if render == Render::Text && styling_enabled(out) {
                // Bold header line.
                let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
                styled = format!("\x1b[1m{first}\x1b[0m\n{rest}");
                &styled
            } else {
                text
            };
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::new(EXIT_DATASET, format!("cannot write output: {e}")))
        }
    }
}

fn select_reports(
    dataset: &QraDataset,
    args: &AssessArgs,
    filters: &[ConditionMatch],
) -> Result<Vec<QraReport>, Failure> {
    for (id, known) in [
        (
            &args.object,
            args.object.as_deref().map(|o| dataset.object(o).is_some()),
        ),
        (
            &args.measurand,
            args.measurand
                .as_deref()
                .map(|m| dataset.measurand(m).is_some()),
        ),
    ] {
        if known == Some(false) {
            return Err(Failure::new(
                EXIT_DATASET,
                format!(
                    "`{}` is not declared in the dataset",
                    id.as_deref().unwrap_or("")
                ),
            ));
        }
    }

    if let Some(bad) = filters
        .iter()
        .find(|f| !dataset.schema.contains(&f.condition))
    {
        return Err(QraError::UnknownCondition(bad.condition.clone()).into());
    }

    if let (Some(object), Some(measurand)) = (&args.object, &args.measurand) {
        let report = subgroup_assess(dataset, object, measurand, filters).map_err(|e| {
            let mut f = Failure::from(e);
            if f.code == EXIT_COMPUTE {
                f.message = format!("{object}/{measurand}: {}", f.message);
            }
            f
        })?;
        return Ok(vec![report]);
    }

    let pairs: Vec<(String, String)> = dataset
        .pairs()
        .into_iter()
        .filter(|(o, m, _)| {
            args.object.as_ref().is_none_or(|x| x == o)
                && args.measurand.as_ref().is_none_or(|x| x == m)
        })
        .filter(|(o, m, _)| {
            // Filtered pairs with fewer than two matching rows are skipped.
            let matching = dataset
                .measurements
                .iter()
                .filter(|x| {
                    x.object == *o && x.measurand == *m && filters.iter().all(|f| f.matches(x))
                })
                .count();
            matching >= 2
        })
        .map(|(o, m, _)| (o, m))
        .collect();
    if pairs.is_empty() {
        return Err(Failure::new(
            EXIT_COMPUTE,
            "no (object, measurand) pair with at least 2 measurements",
        ));
    }
    pairs
        .iter()
        .map(|(o, m)| {
            subgroup_assess(dataset, o, m, filters)
                .map_err(|e| Failure::new(EXIT_COMPUTE, format!("{o}/{m}: {e}")))
        })
        .collect()
}

fn cmd_assess(args: &AssessArgs, filters: &[ConditionMatch]) -> Result<(), Failure> {
    let dataset = load(&args.input)?;
    let reports = select_reports(&dataset, args, filters)?;
    let spec = RenderSpec::new(args.input.render.into());
    let mut text = render_precision_table(&reports, &spec);
    if args.conditions && spec.format != RenderFormat::Json {
        for report in &reports {
            text.push('\n');
            text.push_str(&render_condition_matrix(report, &spec));
        }
    }
    emit(&text, &args.input.out, args.input.render)
}

fn cmd_validate(args: &InputArgs) -> Result<(), Failure> {
    let dataset = load(args)?;
    let issues = io::validate_dataset(&dataset);
    let text = if args.render == Render::Json {
        let mut s = serde_json::to_string_pretty(&issues).expect("issues serialize");
        s.push('\n');
        s
    } else {
        let warnings = issues
            .iter()
            .filter(|i| i.severity == Severity::Warning)
            .count();
        format!(
            "ok: {} measurements, {} objects, {} measurands, {} condition(s); {warnings} warning(s)\n",
            dataset.measurements.len(),
            dataset.objects.len(),
            dataset.measurands.len(),
            dataset.schema.len()
        )
    };
    emit(&text, &args.out, args.render)
}

fn cmd_export(args: &InputArgs) -> Result<(), Failure> {
    let dataset = load(args)?;
    let text = match args.render {
        Render::Csv => {
            io::to_csv_string(&dataset).map_err(|e| Failure::new(EXIT_DATASET, e.to_string()))?
        }
        Render::Json => io::to_json_string(&dataset),
        _ => {
            return Err(Failure::new(
                EXIT_USAGE,
                "export needs --render csv or --render json",
            ))
        }
    };
    emit(&text, &args.out, args.render)
}

fn cmd_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let r = qra::simulate(args.n as usize, args.sigma, args.trials as usize, args.seed)
        .map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let c4 = qra::c4(r.n).expect("n >= 2");
    let text = match args.render {
        Render::Json => {
            let mut s = serde_json::to_string_pretty(&r).expect("result serializes");
            s.push('\n');
            s
        }
        Render::Csv => format!(
            "n,sigma,mu,trials,seed,generator,mean_s,mean_s_star,ci_coverage\n{},{},{},{},{},{},{},{},{}\n",
            r.n, r.sigma, r.mu, r.trials, r.seed, r.generator, r.mean_s, r.mean_s_star, r.ci_coverage
        ),
        Render::Text | Render::Markdown => {
            let rows = [
                ("n", r.n.to_string()),
                ("sigma", r.sigma.to_string()),
                ("mu", r.mu.to_string()),
                ("trials", r.trials.to_string()),
                ("seed", format!("{} ({})", r.seed, r.generator)),
                ("c4(n)", format!("{c4:.6}")),
                ("mean(s)", format!("{:.6}", r.mean_s)),
                ("mean(s*)", format!("{:.6}", r.mean_s_star)),
                ("mean(s)/sigma", format!("{:.6}", r.mean_s / r.sigma)),
                ("mean(s*)/sigma", format!("{:.6}", r.mean_s_star / r.sigma)),
                ("ci95 coverage", format!("{:.4}", r.ci_coverage)),
            ];
            if args.render == Render::Markdown {
                let mut s = String::from("| statistic | value |\n| --- | ---: |\n");
                for (k, v) in rows {
                    s.push_str(&format!("| {k} | {v} |\n"));
                }
                s
            } else {
                rows.iter().map(|(k, v)| format!("{k:<15} {v}\n")).collect()
            }
        }
    };
    emit(&text, &args.out, args.render)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Assess(args) => cmd_assess(args, &[]),
        Command::Subgroup(args) => cmd_assess(&args.assess, &args.filters),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Export(args) => cmd_export(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qra: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
