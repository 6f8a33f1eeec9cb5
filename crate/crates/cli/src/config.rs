//! Command-line and config-file parsing into a validated [`RunConfig`].

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use qbs_core::analysis::{DEFAULT_CONST_C, DEFAULT_ERROR_GRID};
use qbs_core::moments::{Mutation, MutationSite, QSequence};
use qbs_core::{JacksonTolerance, OperatorKind, QValue, StancuParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Evaluate an operator at points
    Eval,
    /// Closed-form moments over the domain grid
    Moments,
    /// Sup-norm error against n (or q)
    Sweep,
    /// Scaled-error deviation from the asymptotic formula
    Voronovskaja,
    /// Pointwise error next to the error bounds
    Bounds,
    /// Oracle verification suite
    Verify,
    /// Sweep data plus a gnuplot script
    Plot,
}

/// Comma-separated list used for list-valued flags.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T> {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<T>()
                    .map_err(|_| format!("`{}` is not valid here", p.trim()))
            })
            .collect::<Result<Vec<T>, String>>()
            .and_then(|v| {
                if v.is_empty() {
                    Err("empty list".into())
                } else {
                    Ok(List(v))
                }
            })
    }
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    let (site, delta) = s.split_once('=').ok_or("expected site=delta")?;
    let site: MutationSite = site
        .trim()
        .parse()
        .map_err(|e: qbs_core::Error| e.to_string())?;
    let delta: f64 = delta
        .trim()
        .parse()
        .map_err(|_| format!("`{delta}` is not a number"))?;
    Ok(Mutation { site, delta })
}

#[derive(Debug, Clone, Parser)]
#[command(
    name = "qbs",
    version,
    about = "q-Bernstein-Stancu operator experiments"
)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Optional `key = value` file; command-line flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Operator kind (eval and bounds)
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "n-list")]
    pub n_list: Option<List<usize>>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long = "q-list")]
    pub q_list: Option<List<f64>>,
    /// `one-minus-c/N:c`, `nthroot:a` or `fixed:q`
    #[arg(long)]
    pub qseq: Option<String>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub alpha2: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    /// Built-in name or expression in x
    #[arg(long = "f")]
    pub function: Option<String>,
    /// Evaluation points (eval)
    #[arg(long)]
    pub x: Option<List<f64>>,
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long = "max-terms")]
    pub max_terms: Option<usize>,
    /// Constant of the local second-modulus bound
    #[arg(long = "const-C")]
    pub const_c: Option<f64>,
    #[arg(long, hide = true, value_parser = parse_mutation)]
    pub mutate: Option<Mutation>,
}

impl Cli {
    /// Fills every unset option from `other`.
    fn or(self, other: Cli) -> Cli {
        Cli {
            command: self.command,
            config: self.config,
            kind: self.kind.or(other.kind),
            n: self.n.or(other.n),
            n_list: self.n_list.or(other.n_list),
            q: self.q.or(other.q),
            q_list: self.q_list.or(other.q_list),
            qseq: self.qseq.or(other.qseq),
            alpha1: self.alpha1.or(other.alpha1),
            alpha2: self.alpha2.or(other.alpha2),
            beta1: self.beta1.or(other.beta1),
            beta2: self.beta2.or(other.beta2),
            function: self.function.or(other.function),
            x: self.x.or(other.x),
            grid: self.grid.or(other.grid),
            out: self.out.or(other.out),
            tol: self.tol.or(other.tol),
            max_terms: self.max_terms.or(other.max_terms),
            const_c: self.const_c.or(other.const_c),
            mutate: self.mutate.or(other.mutate),
        }
    }
}

/// Reads `key = value` lines; `#` starts a comment, keys use flag names.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected `key = value`", i + 1))
        })?;
        let key = k.trim().replace('_', "-");
        if key == "config" || key == "command" {
            return Err(CliError::Usage(format!(
                "config line {}: `{key}` cannot be set here",
                i + 1
            )));
        }
        map.insert(key, v.trim().to_owned());
    }
    Ok(map)
}

/// Parses `args` (including the program name), merging a config file under
/// the command-line flags.
pub fn parse_args<I, T>(args: I) -> Result<Cli, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = Cli::try_parse_from(&args)?;
    let Some(path) = cli.config.clone() else {
        return Ok(cli);
    };
    let map = read_config_file(&path)?;
    let mut synth: Vec<OsString> = vec![args[0].clone(), args[1].clone()];
    for (k, v) in map {
        synth.push(format!("--{k}").into());
        synth.push(v.into());
    }
    let from_file = Cli::try_parse_from(&synth)
        .map_err(|e| CliError::Usage(format!("in config {}: {}", path.display(), e.kind())))?;
    Ok(cli.or(from_file))
}

/// Where `q` comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum QSource {
    Single(QValue),
    List(Vec<QValue>),
    Sequence(QSequence),
}

/// Fully resolved run settings.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub kind: OperatorKind,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub q: Option<QSource>,
    pub params: StancuParams,
    pub function: Option<String>,
    pub x: Option<Vec<f64>>,
    pub grid: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol: JacksonTolerance,
    pub const_c: f64,
    pub mutate: Option<Mutation>,
}

/// Shift parameters used when none are given.
pub const DEFAULT_PARAMS: (f64, f64, f64, f64) = (1.0, 2.0, 3.0, 4.0);
pub const DEFAULT_N_LIST: [usize; 5] = [4, 8, 16, 32, 64];
pub const DEFAULT_Q_LIST: [f64; 4] = [0.5, 0.7, 0.9, 0.99];

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let usage = |m: String| CliError::Usage(m);
        let kind = match &cli.kind {
            Some(k) => k
                .parse::<OperatorKind>()
                .map_err(|e| usage(e.to_string()))?,
            None => OperatorKind::QKantorovichStancu,
        };
        if cli.n.is_some() && cli.n_list.is_some() {
            return Err(usage("give either --n or --n-list, not both".into()));
        }
        if let Some(List(ns)) = &cli.n_list {
            if ns.windows(2).any(|w| w[1] <= w[0]) || ns[0] == 0 {
                return Err(usage(
                    "--n-list must be positive and strictly ascending".into(),
                ));
            }
        }
        if cli.n == Some(0) {
            return Err(usage("--n must be at least 1".into()));
        }
        let q_sources = [cli.q.is_some(), cli.q_list.is_some(), cli.qseq.is_some()];
        if q_sources.iter().filter(|&&b| b).count() > 1 {
            return Err(usage("give only one of --q, --q-list and --qseq".into()));
        }
        let to_q = |v: f64| QValue::new(v).map_err(|e| usage(e.to_string()));
        let q = if let Some(v) = cli.q {
            Some(QSource::Single(to_q(v)?))
        } else if let Some(List(vs)) = &cli.q_list {
            Some(QSource::List(
                vs.iter().map(|&v| to_q(v)).collect::<Result<_, _>>()?,
            ))
        } else if let Some(s) = &cli.qseq {
            Some(QSource::Sequence(
                s.parse()
                    .map_err(|e: qbs_core::Error| usage(e.to_string()))?,
            ))
        } else {
            None
        };
        let d = DEFAULT_PARAMS;
        let params = StancuParams::new(
            cli.alpha1.unwrap_or(d.0),
            cli.alpha2.unwrap_or(d.1),
            cli.beta1.unwrap_or(d.2),
            cli.beta2.unwrap_or(d.3),
        )
        .map_err(|e| usage(e.to_string()))?;
        let tol = JacksonTolerance::new(
            cli.tol.unwrap_or(JacksonTolerance::DEFAULT_ABS_TOL),
            cli.max_terms.unwrap_or(JacksonTolerance::DEFAULT_MAX_TERMS),
        )
        .map_err(|e| usage(e.to_string()))?;
        let const_c = cli.const_c.unwrap_or(DEFAULT_CONST_C);
        if !(const_c > 0.0 && const_c.is_finite()) {
            return Err(usage(format!("--const-C must be positive, got {const_c}")));
        }
        if let Some(g) = cli.grid {
            if g < 2 {
                return Err(usage(format!("--grid must be at least 2, got {g}")));
            }
        }
        Ok(Self {
            command: cli.command,
            kind,
            n: cli.n,
            n_list: cli.n_list.map(|l| l.0),
            q,
            params,
            function: cli.function,
            x: cli.x.map(|l| l.0),
            grid: cli.grid,
            out: cli.out,
            tol,
            const_c,
            mutate: cli.mutate,
        })
    }

    pub fn grid_or_default(&self) -> usize {
        self.grid.unwrap_or(DEFAULT_ERROR_GRID)
    }

    /// The single degree for commands that need one.
    pub fn single_n(&self, default: usize) -> Result<usize, CliError> {
        match (&self.n, &self.n_list) {
            (Some(n), _) => Ok(*n),
            (None, Some(_)) => Err(CliError::Usage(format!(
                "{:?} takes a single --n, not --n-list",
                self.command
            ))),
            (None, None) => Ok(default),
        }
    }

    /// The single `q` for degree `n`, for commands that need one.
    pub fn single_q(&self, n: usize, default: f64) -> Result<QValue, CliError> {
        match &self.q {
            Some(QSource::Single(q)) => Ok(*q),
            Some(QSource::Sequence(s)) => Ok(s.q_at(n)?),
            Some(QSource::List(_)) => Err(CliError::Usage(format!(
                "{:?} takes a single --q, not --q-list",
                self.command
            ))),
            None => Ok(QValue::new(default)?),
        }
    }
}
