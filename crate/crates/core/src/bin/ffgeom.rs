use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;

use ffgeom::certify::json::certificate_json;
use ffgeom::certify::{certify_tree, verify_certificate, AuditId, CertifyParams, Regime, ThresholdRule};
use ffgeom::experiment::{
    export, generate, run_experiment, run_on_sets, thread_count, with_threads, ExperimentConfig, Format, GenKind,
    GenSpec, Report, Statistic,
};
use ffgeom::field::FieldCtx;
use ffgeom::plane::{PlanePoint, PointSet};
use ffgeom::stats::TripleMode;
use ffgeom::trees::{count_distinct_pinned_trees, pinned_tree_lower_bound, CountMode, TreeSpec, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "ffgeom", version, about = "Finite-field plane geometry experiments")]
struct Cli {
    /// Worker threads (defaults to FFGEOM_THREADS, then all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    p: Option<u32>,
    /// Extension degree e, for q = p^e.
    #[arg(long)]
    ext: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Tree text, e.g. "vertices=3 edges=1-2,2-3 pin=1".
    #[arg(long)]
    tree: Option<String>,
    /// paper | strict (triples) or all | nonzero (trees).
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    #[arg(long)]
    budget: Option<u64>,
    /// Sweep description in TOML.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Point file for E.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Point file for F (defaults to E).
    #[arg(long)]
    f_points: Option<PathBuf>,
    /// Write elapsed_ms as 0.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set and write it in point-file format.
    Gen {
        #[command(flatten)]
        common: Common,
        /// random | grid | line | isotropic_line | circle_union | product
        #[arg(long, default_value = "random")]
        kind: String,
        #[arg(long, default_value_t = 10)]
        size: u64,
        #[arg(long, default_value_t = 0)]
        slope: i64,
        #[arg(long, default_value_t = 0)]
        intercept: i64,
        #[arg(long, default_value = "0,0")]
        center: String,
        /// Comma-separated radii for circle_union.
        #[arg(long, default_value = "1")]
        radii: String,
        /// Second factor size for product (the first is --size).
        #[arg(long, default_value_t = 2)]
        other: u64,
    },
    /// Statistics on point files or a sweep config.
    Stats {
        #[command(flatten)]
        common: Common,
        /// Comma-separated: triples, bisector-energy, incidences, distinct-distances, trees
        /// (default: the config's selection, else triples).
        #[arg(long)]
        statistics: Option<String>,
    },
    /// Inequality audits on point files or a sweep config; exits with 2 on a violation.
    Audit {
        #[command(flatten)]
        common: Common,
        /// Comma-separated audit ids (default: the config's selection, else all).
        #[arg(long)]
        audits: Option<String>,
        #[arg(long)]
        k: Option<String>,
    },
    /// Certify a pinned tree over point files and write the certificate JSON.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "arbitrary")]
        regime: String,
        /// Fixed rational pin threshold.
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long, default_value = "4")]
        k: String,
    },
    /// Count distinct pinned trees at one pin.
    Trees {
        #[command(flatten)]
        common: Common,
        /// Pin point "x,y" (defaults to the first point of E).
        #[arg(long)]
        pin: Option<String>,
    },
}

type CliResult<T> = Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn read_points(path: &Path) -> CliResult<PointSet> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    PointSet::parse_file(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{}", String::from_utf8_lossy(bytes));
            Ok(())
        }
    }
}

fn parse_rational(s: &str) -> CliResult<BigRational> {
    s.trim().parse().map_err(|_| format!("bad rational {s:?}"))
}

fn list<T>(s: &str, parse: impl Fn(&str) -> Result<T, String>) -> CliResult<Vec<T>> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(parse).collect()
}

fn audit_id(s: &str) -> Result<AuditId, String> {
    AuditId::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| format!("unknown audit {s:?}"))
}

fn load_sets(common: &Common) -> CliResult<(PointSet, PointSet)> {
    let e_path = common.points.as_deref().ok_or("need --points or --config")?;
    let e = read_points(e_path)?;
    let f = match &common.f_points {
        Some(path) => read_points(path)?,
        None => e.clone(),
    };
    if let Some(p) = common.p {
        if e.ctx().p() != p {
            return Err(format!("--p {p} but the point file is over characteristic {}", e.ctx().p()));
        }
    }
    Ok((e, f))
}

/// Applies the common flags to a sweep config.
fn apply(config: &mut ExperimentConfig, common: &Common) -> CliResult<()> {
    if let Some(p) = common.p {
        config.p = p;
    }
    if let Some(e) = common.ext {
        config.e = e;
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(tree) = &common.tree {
        config.tree = Some(tree.clone());
    }
    if let Some(budget) = common.budget {
        config.budget = budget;
    }
    if let Some(format) = common.format {
        config.format = format;
    }
    if let Some(out) = &common.out {
        config.out = Some(out.clone());
    }
    match common.mode.as_deref() {
        None => {}
        Some("paper") => config.triple_mode = TripleMode::Paper,
        Some("strict") => config.triple_mode = TripleMode::Strict,
        Some("all") => config.count_mode = CountMode::All,
        Some("nonzero") => config.count_mode = CountMode::Nonzero,
        Some(other) => return Err(format!("unknown mode {other:?}")),
    }
    Ok(())
}

/// Runs either the `--config` sweep or the selections on `--points`.
fn sweep(common: &Common, select: impl FnOnce(&mut ExperimentConfig) -> CliResult<()>) -> CliResult<ExitCode> {
    let (mut config, sets) = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let config: ExperimentConfig = toml::from_str(&text).map_err(err)?;
            (config, None)
        }
        None => {
            let (e, f) = load_sets(common)?;
            let ctx = e.ctx();
            let config = ExperimentConfig::new(ctx.p(), ctx.degree(), GenKind::Random { size: 0 });
            (config, Some((e, f)))
        }
    };
    apply(&mut config, common)?;
    select(&mut config)?;
    let mut report: Report = match &sets {
        Some((e, f)) => run_on_sets(&config, e, f),
        None => run_experiment(&config),
    }
    .map_err(err)?;
    if common.no_timing {
        report.strip_timing();
    }
    let bytes = export(&report, config.format).map_err(err)?;
    write_out(config.out.as_deref(), &bytes)?;
    for row in report.violations() {
        eprintln!("violation: run {} {} value {} bound {}", row.run_id, row.statistic, row.value, row.bound);
    }
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn gen_kind(kind: &str, size: u64, slope: i64, intercept: i64, center: &str, radii: &str, other: u64) -> CliResult<GenKind> {
    let int = |s: &str| s.trim().parse::<i64>().map_err(|_| format!("bad integer {s:?}"));
    Ok(match kind {
        "random" => GenKind::Random { size },
        "grid" => GenKind::Grid { side: size },
        "line" => GenKind::Line { size, slope, intercept },
        "isotropic_line" => GenKind::IsotropicLine { size, offset: intercept },
        "circle_union" => {
            let (x, y) = center.split_once(',').ok_or("center must be x,y")?;
            GenKind::CircleUnion { center: (int(x)?, int(y)?), radii: list(radii, int)? }
        }
        "product" => GenKind::Product { a: size, b: other },
        other => return Err(format!("unknown generator {other:?}")),
    })
}

fn run(cli: Cli) -> CliResult<ExitCode> {
    match cli.command {
        Command::Gen { common, kind, size, slope, intercept, center, radii, other } => {
            let p = common.p.ok_or("gen needs --p")?;
            let ctx = FieldCtx::new(p as u64, common.ext.unwrap_or(1)).map_err(err)?;
            let kind = gen_kind(&kind, size, slope, intercept, &center, &radii, other)?;
            let set = generate(&ctx, &GenSpec::new(kind, common.seed.unwrap_or(0))).map_err(err)?;
            write_out(common.out.as_deref(), set.to_file_string().as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { common, statistics } => {
            let stats = statistics.map(|s| list(&s, |x| x.parse::<Statistic>())).transpose()?;
            sweep(&common, |c| {
                match stats {
                    Some(stats) => c.statistics = stats,
                    None if c.selection_count() == 0 => c.statistics = vec![Statistic::Triples],
                    None => {}
                }
                c.audits.clear();
                c.certify.clear();
                Ok(())
            })
        }
        Command::Audit { common, audits, k } => {
            let ids = audits.map(|s| list(&s, audit_id)).transpose()?;
            sweep(&common, |c| {
                if let Some(k) = k {
                    c.k_const = k;
                }
                match ids {
                    Some(ids) => c.audits = ids,
                    None if c.audits.is_empty() => {
                        c.audits = AuditId::ALL.to_vec();
                        if !c.ctx().map_err(err)?.is_prime_field() {
                            c.audits.retain(|a| matches!(a, AuditId::KConstant | AuditId::MCondition));
                        }
                    }
                    None => {}
                }
                c.statistics.clear();
                c.certify.clear();
                Ok(())
            })
        }
        Command::Certify { common, regime, threshold, k } => {
            let regime: Regime = regime.parse().map_err(err)?;
            if common.config.is_some() {
                return sweep(&common, |c| {
                    c.statistics.clear();
                    c.audits.clear();
                    c.certify = vec![regime];
                    c.threshold = threshold;
                    c.k_const = k;
                    Ok(())
                });
            }
            let (e, f) = load_sets(&common)?;
            let tree: TreeSpec = common.tree.as_deref().ok_or("certify needs --tree")?.parse().map_err(err)?;
            let mut params = CertifyParams::new(regime);
            params.k_const = parse_rational(&k)?;
            params.enumeration_budget = common.budget.unwrap_or(DEFAULT_BUDGET);
            if let Some(t) = &threshold {
                params.threshold = ThresholdRule::Fixed(parse_rational(t)?);
            }
            let cert = certify_tree(&e, &f, &tree, &params).map_err(err)?;
            let checked = verify_certificate(&cert, &e, &f, &tree);
            let mut bytes = serde_json::to_vec_pretty(&certificate_json(&cert)).map_err(err)?;
            bytes.push(b'\n');
            write_out(common.out.as_deref(), &bytes)?;
            eprintln!(
                "pins {} / {}, per-pin bound {}, hypothesis in range {}",
                cert.pins.len(),
                e.len(),
                cert.per_pin_bound,
                cert.hypothesis_in_range
            );
            match checked {
                Ok(()) => Ok(ExitCode::SUCCESS),
                Err(failure) => {
                    eprintln!("{failure}");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Trees { common, pin } => {
            let (e, f) = load_sets(&common)?;
            let ctx = e.ctx().clone();
            let tree: TreeSpec = common.tree.as_deref().ok_or("trees needs --tree")?.parse().map_err(err)?;
            let pin = match pin {
                Some(text) => PlanePoint::parse(&ctx, &text).map_err(err)?,
                None => *e.points().first().ok_or("empty point set")?,
            };
            let mode = match common.mode.as_deref() {
                None | Some("nonzero") => CountMode::Nonzero,
                Some("all") => CountMode::All,
                Some(other) => return Err(format!("unknown mode {other:?}")),
            };
            let budget = common.budget.unwrap_or(DEFAULT_BUDGET);
            let count = count_distinct_pinned_trees(&ctx, &tree, pin, &f, mode, budget).map_err(err)?;
            let bound = pinned_tree_lower_bound(&ctx, &tree, pin, &f, Default::default()).map(|(v, _)| v).unwrap_or(0);
            let text = format!("pin {} tree \"{tree}\" mode {mode} count {count} lower_bound {bound}\n", pin.format(&ctx));
            write_out(common.out.as_deref(), text.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = thread_count(cli.threads);
    match with_threads(threads, || run(cli)) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
