//! Command-line front end: `compute`, `scenario`, `oracle` and
//! `dump-tournament`.
//!
//! Payload goes to stdout (or `--output`), diagnostics to stderr. Exit codes
//! are 0 on success, 1 for data or validation errors and 2 for usage errors;
//! every error line starts with `error[CODE]:`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Args, Command, FromArgMatches, Parser, Subcommand};
use monotone_delta::measures::{MeasureParams, OmegaVariant, DEFAULT_GLB_TOL};
use monotone_delta::optimizer::{ProposalMode, DEFAULT_ORACLE_LIMIT, DEFAULT_RESTARTS};
use monotone_delta::report::ReportRow;
use monotone_delta::scenario::{run_scenario_suite, SuiteConfig};
use monotone_delta::{
    build_tournament, emit_report, exact_min_contradictions, load_csv, local_search,
    max_contradictions, time_measures, Error, Measure, OutputFormat, Report, ReportMeta,
    ResponseMatrix, SearchParams, SplitScheme, VarianceMode,
};

#[derive(Debug, Parser)]
#[command(name = "mdelta", version, about = "Tournament-based internal consistency")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Compute reliability measures for a CSV of responses.
    Compute {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        measures: MeasureArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the synthetic scenario suite.
    Scenario {
        /// Flat `key = value` file; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: ConfigOverrides,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Compare local search with exhaustive search on a small input.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_ORACLE_LIMIT)]
        oracle_limit: usize,
        #[command(flatten)]
        search: SearchArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Write the dominance matrix as headerless CSV.
    DumpTournament {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct MeasureArgs {
    /// Comma-separated: alpha, omega, omega_sumsq, omega_conventional, glb,
    /// split_half, delta, all.
    #[arg(long, default_value = "all")]
    measures: String,
    #[arg(long, default_value = "sample")]
    variance_mode: VarianceMode,
    #[arg(long, default_value = "sumsq")]
    omega_variant: OmegaVariant,
    /// `odd-even` or `random:<seed>`.
    #[arg(long, default_value = "odd-even")]
    split_scheme: SplitScheme,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    #[arg(long)]
    max_non_improving: Option<u64>,
    #[arg(long, default_value = "adjacent-sweep-then-random")]
    proposal_mode: ProposalMode,
}

impl SearchArgs {
    fn params(&self) -> SearchParams {
        SearchParams {
            seed: self.seed,
            restarts: self.restarts,
            max_non_improving: self.max_non_improving,
            proposal_mode: self.proposal_mode,
        }
    }

    fn describe(&self, into: &mut BTreeMap<String, String>) {
        into.insert("restarts".into(), self.restarts.to_string());
        into.insert(
            "max_non_improving".into(),
            self.max_non_improving.map_or("none".into(), |v| v.to_string()),
        );
        into.insert("proposal_mode".into(), self.proposal_mode.name().into());
    }
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, default_value = "table")]
    format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Zero every timing field.
    #[arg(long)]
    no_timing: bool,
}

/// One flag per scenario configuration key, e.g. `--n-respondents 200`.
#[derive(Debug, Default)]
struct ConfigOverrides(Vec<(&'static str, String)>);

fn override_keys() -> impl Iterator<Item = &'static str> {
    SuiteConfig::KEYS.into_iter().filter(|k| *k != "version")
}

impl FromArgMatches for ConfigOverrides {
    fn from_arg_matches(matches: &ArgMatches) -> Result<Self, clap::Error> {
        let mut out = Self::default();
        out.update_from_arg_matches(matches)?;
        Ok(out)
    }

    fn update_from_arg_matches(&mut self, matches: &ArgMatches) -> Result<(), clap::Error> {
        for key in override_keys() {
            if let Some(v) = matches.get_one::<String>(key) {
                self.0.push((key, v.clone()));
            }
        }
        Ok(())
    }
}

impl Args for ConfigOverrides {
    fn augment_args(cmd: Command) -> Command {
        override_keys().fold(cmd, |cmd, key| {
            cmd.arg(
                Arg::new(key)
                    .long(key.replace('_', "-"))
                    .value_name("VALUE")
                    .help(format!("Overrides `{key}`")),
            )
        })
    }

    fn augment_args_for_update(cmd: Command) -> Command {
        Self::augment_args(cmd)
    }
}

impl ConfigOverrides {
    /// Applies the overrides; `omega_variant` goes first because it decides
    /// what `measures = omega` means.
    fn apply(&self, config: &mut SuiteConfig) -> Result<(), Failure> {
        let mut pairs = self.0.clone();
        pairs.sort_by_key(|(k, _)| *k != "omega_variant");
        for (key, value) in pairs {
            config
                .set(key, &value)
                .map_err(|e| Failure::Usage(format!("--{}: {e}", key.replace('_', "-"))))?;
        }
        Ok(())
    }
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(Error::Io(e))
    }
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run_cli<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(stdout, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let text = text.strip_prefix("error: ").unwrap_or(&text);
            let _ = write!(stderr, "error[USAGE]: {text}");
            return 2;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error[USAGE]: {msg}");
            2
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error[{}]: {e}", e.code());
            1
        }
    }
}

fn dispatch(cmd: Cmd, stdout: &mut dyn Write) -> Result<(), Failure> {
    match cmd {
        Cmd::Compute {
            input,
            measures,
            search,
            out,
        } => {
            let list = Measure::parse_list(&measures.measures, measures.omega_variant)
                .map_err(|e| Failure::Usage(format!("--measures: {e}")))?;
            let m = read_matrix(&input)?;
            let params = MeasureParams {
                variance_mode: measures.variance_mode,
                split_scheme: measures.split_scheme,
                search: search.params(),
                ..MeasureParams::default()
            };
            let label = dataset_label(&input);
            let rows = time_measures(&m, &list, &params)
                .into_iter()
                .map(|t| t.into_row(&label))
                .collect();
            let mut parameters = BTreeMap::new();
            parameters.insert("input".into(), input.display().to_string());
            parameters.insert(
                "measures".into(),
                list.iter().map(|m| m.name()).collect::<Vec<_>>().join(","),
            );
            parameters.insert("variance_mode".into(), measures.variance_mode.name().into());
            parameters.insert("omega_variant".into(), measures.omega_variant.name().into());
            parameters.insert("split_scheme".into(), measures.split_scheme.to_string());
            parameters.insert("glb_tol".into(), DEFAULT_GLB_TOL.to_string());
            search.describe(&mut parameters);
            let report = Report {
                meta: ReportMeta::new("compute", search.seed, parameters),
                rows,
            };
            write_report(report, &out, stdout)
        }
        Cmd::Scenario {
            config,
            overrides,
            out,
        } => {
            let mut suite = match &config {
                Some(path) => SuiteConfig::parse_text(&std::fs::read_to_string(path)?)?,
                None => SuiteConfig::default(),
            };
            overrides.apply(&mut suite)?;
            let report = run_scenario_suite(&suite)?.to_report();
            write_report(report, &out, stdout)
        }
        Cmd::Oracle {
            input,
            oracle_limit,
            search,
            out,
        } => {
            let m = read_matrix(&input)?;
            let mut report = oracle_report(&m, &dataset_label(&input), oracle_limit, &search)?;
            report
                .meta
                .parameters
                .insert("input".into(), input.display().to_string());
            write_report(report, &out, stdout)
        }
        Cmd::DumpTournament { input, output } => {
            let t = build_tournament(&read_matrix(&input)?);
            let mut buf = Vec::new();
            t.write_csv(&mut buf)?;
            emit(&buf, output.as_deref(), stdout)
        }
    }
}

fn oracle_report(
    m: &ResponseMatrix,
    label: &str,
    limit: usize,
    search: &SearchArgs,
) -> Result<Report, Failure> {
    let t = build_tournament(m);
    let clock = std::time::Instant::now();
    let exact = exact_min_contradictions(&t, limit)?;
    let exact_seconds = clock.elapsed().as_secs_f64();
    let heur = local_search(&t, &search.params())?;
    let c_max = max_contradictions(t.n(), m.n_items())?;
    let exact_delta = monotone_delta::delta_from_counts(exact.c_star, c_max)?;
    let ordering = |o: &[usize]| {
        o.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
    };
    let rows = vec![
        ReportRow {
            dataset: label.to_string(),
            measure: "exact_delta".into(),
            value: Some(exact_delta),
            seconds: exact_seconds,
            note: Some(format!(
                "c_star={} c_max={c_max} permutations={} ordering={}",
                exact.c_star,
                exact.permutations_examined,
                ordering(exact.ordering.as_slice())
            )),
        },
        ReportRow {
            dataset: label.to_string(),
            measure: "local_search_delta".into(),
            value: Some(heur.delta),
            seconds: heur.diagnostics.seconds,
            note: Some(format!(
                "c_star={} matches_exact={} ordering={}",
                heur.c_star,
                heur.c_star == exact.c_star,
                ordering(heur.best_ordering.as_slice())
            )),
        },
    ];
    let mut parameters = BTreeMap::new();
    parameters.insert("oracle_limit".into(), limit.to_string());
    search.describe(&mut parameters);
    Ok(Report {
        meta: ReportMeta::new("oracle", search.seed, parameters),
        rows,
    })
}

fn read_matrix(path: &Path) -> Result<ResponseMatrix, Failure> {
    let file = File::open(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })?;
    Ok(load_csv(BufReader::new(file))?)
}

fn dataset_label(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn write_report(report: Report, out: &OutputArgs, stdout: &mut dyn Write) -> Result<(), Failure> {
    let report = if out.no_timing { report.without_timing() } else { report };
    emit(&emit_report(&report, out.format), out.output.as_deref(), stdout)
}

fn emit(bytes: &[u8], path: Option<&Path>, stdout: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}
