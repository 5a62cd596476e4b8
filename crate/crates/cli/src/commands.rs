use std::fs;
use std::io::{self, Write};
use std::path::Path;

use ballkit::arcgon::svg::{render, Layer};
use ballkit::arcgon::{r_dual, r_hull, Vec2};
use ballkit::ballbody::BallBodySpec;
use ballkit::contraction::{
    gen_cluster, gen_packing, run_alexander_suite, run_kp_trials, RadiusRule,
    DEFAULT_ALEXANDER_RANGE,
};
use ballkit::geom::{regular_simplex, PointSet};
use ballkit::lab::{self, EvalOptions, Format, InequalityReport};
use ballkit::rng::derive;
use ballkit::Error;
use rayon::prelude::*;
use serde_json::json;

use crate::args::{Cli, Command, FormatArg, GenKind, Suite};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                Error::Parse(_)
                | Error::Domain(_)
                | Error::HullUndefined { .. }
                | Error::Degenerate(_)
                | Error::EmptyBody => 2,
                Error::Convergence { .. }
                | Error::FitConditioning { .. }
                | Error::FitFailure(_)
                | Error::InternalConsistency(_) => 3,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Exit status of a successful run: 0 when every report passed, 1 otherwise.
pub type Status = i32;

fn allowed_flags(cmd: &Command) -> &'static [&'static str] {
    match cmd {
        Command::Dual | Command::Hull | Command::Volumes => {
            &["input", "r", "samples", "epsilons", "seed"]
        }
        Command::Render => &["input", "r"],
        Command::Gen {
            kind: GenKind::Packing,
        } => &["n", "dim", "lambda", "seed", "jitter"],
        Command::Gen {
            kind: GenKind::Cluster,
        } => &["n", "dim", "lambda", "seed"],
        Command::Kp => &[
            "dim",
            "k",
            "n",
            "lambda",
            "r",
            "trials",
            "seed",
            "samples",
            "epsilons",
            "format",
            "render",
            "alexander",
        ],
        Command::Check { suite } => match suite {
            Suite::Bs | Suite::Alexandrov => &[
                "input", "dim", "r", "k", "l", "n", "trials", "seed", "samples", "epsilons",
                "format",
            ],
            Suite::Product => &[
                "input", "dim", "r", "k", "n", "trials", "seed", "samples", "epsilons", "format",
            ],
            Suite::Lemma => &["input", "dim", "r", "n", "trials", "seed", "format"],
            Suite::Jung => &["input", "dim", "n", "trials", "seed", "format"],
            Suite::KpChain => &[
                "dim", "k", "n", "lambda", "r", "trials", "seed", "samples", "epsilons", "format",
            ],
        },
    }
}

pub fn run(cli: &Cli) -> CliResult<Status> {
    let allowed = allowed_flags(&cli.command);
    for flag in cli.flags.given() {
        if !allowed.contains(&flag) {
            return usage(format!("--{flag} is not used by this command"));
        }
    }
    match &cli.command {
        Command::Dual => cmd_dual(cli),
        Command::Hull => cmd_hull(cli),
        Command::Volumes => cmd_volumes(cli),
        Command::Render => cmd_render(cli),
        Command::Gen { kind } => cmd_gen(cli, *kind),
        Command::Check { suite } => cmd_check(cli, *suite),
        Command::Kp => cmd_kp(cli),
    }
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.flags.out {
        Some(path) => fs::write(path, text).map_err(CliError::Io),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(CliError::Io)
        }
    }
}

fn emit_reports(cli: &Cli, reports: &[InequalityReport]) -> CliResult<Status> {
    let format = match cli.flags.format.unwrap_or_default() {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let mut buf = Vec::new();
    lab::write_reports(&mut buf, reports, format).map_err(CliError::Io)?;
    emit(cli, &String::from_utf8(buf).expect("reports are utf-8"))?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        log::warn!("{failed} of {} reports failed", reports.len());
        Ok(1)
    } else {
        Ok(0)
    }
}

fn read_points(path: &Path) -> CliResult<PointSet> {
    let text = fs::read_to_string(path).map_err(CliError::Io)?;
    Ok(PointSet::from_json(&text)?)
}

fn input(cli: &Cli) -> CliResult<PointSet> {
    match &cli.flags.input {
        Some(p) => read_points(p),
        None => usage("--input is required"),
    }
}

fn positive(name: &str, v: Option<f64>, default: Option<f64>) -> CliResult<f64> {
    match v.or(default) {
        Some(x) if x > 0.0 && x.is_finite() => Ok(x),
        Some(x) => usage(format!("--{name} must be positive, got {x}")),
        None => usage(format!("--{name} is required")),
    }
}

fn seed(cli: &Cli) -> CliResult<u64> {
    cli.flags
        .seed
        .map_or_else(|| usage("--seed is required for this command"), Ok)
}

fn eval_options(cli: &Cli, seed: u64) -> CliResult<EvalOptions> {
    let mut opts = EvalOptions::with_seed(seed);
    if let Some(s) = cli.flags.samples {
        if s < 1000 {
            return usage(format!("--samples must be at least 1000, got {s}"));
        }
        opts.samples = s;
    }
    opts.epsilons = cli.flags.epsilons.clone();
    Ok(opts)
}

fn cmd_dual(cli: &Cli) -> CliResult<Status> {
    let a = input(cli)?;
    let r = positive("r", cli.flags.r, None)?;
    if a.dim() == 2 {
        let body = r_dual(&a, r)?;
        if body.is_empty() {
            log::warn!("the r-dual is empty");
        }
        emit(cli, &(body.to_json() + "\n"))?;
        return Ok(0);
    }
    let opts = eval_options(cli, seed(cli)?)?;
    let spec = BallBodySpec::new(a.clone(), r)?;
    if spec.is_empty() {
        log::warn!("the r-dual is empty");
    }
    let volumes = lab::dual_measures(&a, r, &opts, 1)?.volumes;
    let out = json!({
        "dim": a.dim(),
        "radius": r,
        "centers": a.points(),
        "empty": spec.is_empty(),
        "volumes": volumes,
    });
    emit(cli, &(out.to_string() + "\n"))?;
    Ok(0)
}

fn cmd_hull(cli: &Cli) -> CliResult<Status> {
    let a = input(cli)?;
    let r = positive("r", cli.flags.r, None)?;
    if a.dim() == 2 {
        let hull = r_hull(&a, r)?;
        log::info!("hull computed by {}", hull.path.as_str());
        emit(cli, &(hull.body.to_json() + "\n"))?;
        return Ok(0);
    }
    let opts = eval_options(cli, seed(cli)?)?;
    let m = lab::hull_measures(&a, r, &opts, 2)?;
    let out = json!({ "dim": a.dim(), "radius": r, "path": m.path, "volumes": m.volumes });
    emit(cli, &(out.to_string() + "\n"))?;
    Ok(0)
}

fn cmd_volumes(cli: &Cli) -> CliResult<Status> {
    let a = input(cli)?;
    let r = positive("r", cli.flags.r, None)?;
    let opts = if a.dim() == 2 {
        eval_options(cli, cli.flags.seed.unwrap_or(0))?
    } else {
        eval_options(cli, seed(cli)?)?
    };
    let m = lab::dual_measures(&a, r, &opts, 1)?;
    let out = json!({ "dim": a.dim(), "radius": r, "path": m.path, "volumes": m.volumes });
    emit(cli, &(out.to_string() + "\n"))?;
    Ok(0)
}

fn planar(a: &PointSet) -> CliResult<Vec<Vec2>> {
    Ok(ballkit::arcgon::planar_points(a)?)
}

fn cmd_render(cli: &Cli) -> CliResult<Status> {
    let a = input(cli)?;
    let r = positive("r", cli.flags.r, None)?;
    if a.dim() != 2 {
        return usage("render needs a planar point set");
    }
    let pts = planar(&a)?;
    let dual = r_dual(&a, r)?;
    let hull = r_hull(&a, r).ok().map(|h| h.body);
    let mut layers = vec![Layer::Region {
        body: &dual,
        stroke: "#1f77b4",
        fill: "#1f77b433",
    }];
    if let Some(h) = &hull {
        layers.push(Layer::Region {
            body: h,
            stroke: "#d62728",
            fill: "none",
        });
    }
    layers.push(Layer::Points {
        points: &pts,
        color: "#000000",
    });
    emit(cli, &render(&layers))?;
    Ok(0)
}

fn cmd_gen(cli: &Cli, kind: GenKind) -> CliResult<Status> {
    let f = &cli.flags;
    let n = f.n.map_or_else(|| usage("--n is required"), Ok)?;
    let d = f.dim.unwrap_or(2);
    let lambda = positive("lambda", f.lambda, Some(1.0))?;
    let seed = seed(cli)?;
    let set = match kind {
        GenKind::Packing => gen_packing(n, d, lambda, seed, f.jitter.unwrap_or(0.0))?,
        GenKind::Cluster => gen_cluster(n, d, lambda, seed)?,
    };
    emit(cli, &(set.to_json() + "\n"))?;
    Ok(0)
}

struct Batch {
    d: usize,
    r: f64,
    n: usize,
    trials: usize,
    seed: u64,
}

impl Batch {
    fn configs(&self) -> CliResult<Vec<PointSet>> {
        (0..self.trials)
            .map(|t| {
                Ok(lab::random_config(
                    self.d,
                    self.n,
                    self.r,
                    derive(self.seed, t as u64),
                )?)
            })
            .collect()
    }
}

fn cmd_check(cli: &Cli, suite: Suite) -> CliResult<Status> {
    let f = &cli.flags;
    if suite == Suite::KpChain {
        return check_kp_chain(cli);
    }
    if suite == Suite::Jung {
        return check_jung(cli);
    }
    let r = positive("r", f.r, Some(1.0))?;
    // either one input set or `trials` random sets
    let (sets, d, base_seed) = match &f.input {
        Some(path) => {
            if f.dim.is_some() || f.n.is_some() || f.trials.is_some() {
                return usage("--input cannot be combined with --dim, --n or --trials");
            }
            let a = read_points(path)?;
            let d = a.dim();
            let s = if d == 2 {
                f.seed.unwrap_or(0)
            } else {
                seed(cli)?
            };
            (vec![a], d, s)
        }
        None => {
            let batch = Batch {
                d: f.dim.unwrap_or(2),
                r,
                n: f.n.unwrap_or(5),
                trials: f.trials.unwrap_or(1),
                seed: seed(cli)?,
            };
            if batch.d < 2 || batch.n < 2 || batch.trials == 0 {
                return usage("need --dim >= 2, --n >= 2 and --trials >= 1");
            }
            (batch.configs()?, batch.d, batch.seed)
        }
    };
    let k = f.k.unwrap_or(1);
    let l = f.l.unwrap_or(d);
    let opts = eval_options(cli, base_seed)?;
    let per_trial = |t: usize, a: &PointSet| -> CliResult<Vec<InequalityReport>> {
        let o = EvalOptions {
            seed: derive(base_seed, t as u64 ^ 0x6f70_7473),
            ..opts.clone()
        };
        let reps = match suite {
            Suite::Bs => vec![
                lab::check_blaschke_santalo(a, r, k, l, &o)?,
                lab::check_bm_chain(a, r, k, &o)?,
            ],
            Suite::Product => vec![lab::check_volume_product(a, r, k, &o)?],
            Suite::Alexandrov => lab::check_alexandrov_body(a, r, k, l, &o)?,
            Suite::Lemma => vec![lab::check_minkowski_identity(
                a,
                r,
                if d == 2 { 360 } else { 32 },
                &o,
            )?],
            Suite::Jung | Suite::KpChain => unreachable!(),
        };
        Ok(reps
            .into_iter()
            .map(|mut rep| {
                rep.params.seed = Some(base_seed);
                rep.params.trial = Some(t);
                rep
            })
            .collect())
    };
    let reports: Vec<InequalityReport> = sets
        .par_iter()
        .enumerate()
        .map(|(t, a)| per_trial(t, a))
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    emit_reports(cli, &reports)
}

fn check_jung(cli: &Cli) -> CliResult<Status> {
    let f = &cli.flags;
    let mut reports = Vec::new();
    if let Some(path) = &f.input {
        if f.dim.is_some() || f.n.is_some() || f.trials.is_some() {
            return usage("--input cannot be combined with --dim, --n or --trials");
        }
        reports.push(lab::check_jung(&read_points(path)?));
        return emit_reports(cli, &reports);
    }
    let d = f.dim.unwrap_or(2);
    let n = f.n.unwrap_or(d + 1);
    if d < 1 || n < 2 {
        return usage("need --dim >= 1 and --n >= 2");
    }
    if n <= d + 1 {
        let mut rep = lab::check_jung(&regular_simplex(d, n)?);
        rep.name = "jung_simplex".into();
        reports.push(rep);
    }
    if let Some(trials) = f.trials {
        let seed = seed(cli)?;
        let random: Vec<InequalityReport> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let a = lab::random_config(d, n, 1.0, derive(seed, t as u64))?;
                let mut rep = lab::check_jung(&a);
                rep.params.seed = Some(seed);
                rep.params.trial = Some(t);
                Ok(rep)
            })
            .collect::<CliResult<_>>()?;
        reports.extend(random);
    }
    emit_reports(cli, &reports)
}

struct KpFlags {
    d: usize,
    k: usize,
    n: usize,
    lambda: f64,
    radius: RadiusRule,
    trials: usize,
    seed: u64,
}

fn kp_flags(cli: &Cli) -> CliResult<KpFlags> {
    let f = &cli.flags;
    let d = f.dim.unwrap_or(2);
    let k = f.k.unwrap_or(1);
    let n = f.n.unwrap_or(5);
    if d < 2 || k < 1 || k > d || n < 2 {
        return usage("need --dim >= 2, 1 <= --k <= --dim and --n >= 2");
    }
    let radius = match f.r {
        Some(_) => RadiusRule::Fixed(positive("r", f.r, None)?),
        None => RadiusRule::default(),
    };
    let trials = f.trials.unwrap_or(1);
    if trials == 0 {
        return usage("--trials must be at least 1");
    }
    Ok(KpFlags {
        d,
        k,
        n,
        lambda: positive("lambda", f.lambda, Some(1.0))?,
        radius,
        trials,
        seed: seed(cli)?,
    })
}

fn check_kp_chain(cli: &Cli) -> CliResult<Status> {
    let p = kp_flags(cli)?;
    let opts = eval_options(cli, p.seed)?;
    let reports: Vec<InequalityReport> = (0..p.trials)
        .into_par_iter()
        .map(|t| {
            let pair = ballkit::contraction::trial_pair(p.d, p.n, p.lambda, p.seed, t)?;
            let r = p.radius.radius(&pair.p);
            let o = EvalOptions {
                seed: derive(p.seed, t as u64 ^ 0x6f70_7473),
                ..opts.clone()
            };
            let mut reps = lab::check_kp_chain(&pair.p, &pair.q, p.lambda, r, p.k, &o)?;
            for rep in &mut reps {
                rep.params.seed = Some(p.seed);
                rep.params.trial = Some(t);
            }
            Ok(reps)
        })
        .collect::<CliResult<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    emit_reports(cli, &reports)
}

fn cmd_kp(cli: &Cli) -> CliResult<Status> {
    let f = &cli.flags;
    if f.alexander {
        if f.dim.is_some_and(|d| d != 2) || f.k.is_some_and(|k| k != 1) || f.n.is_some() {
            return usage("--alexander fixes --dim 2 and --k 1 and sweeps --n");
        }
        if f.render.is_some() {
            return usage("--render is not available with --alexander");
        }
        let p = kp_flags(cli)?;
        let results = run_alexander_suite(
            p.lambda,
            p.radius,
            &DEFAULT_ALEXANDER_RANGE,
            p.trials,
            p.seed,
        )?;
        let reports: Vec<InequalityReport> =
            results.iter().map(|r| r.to_report("alexander")).collect();
        return emit_reports(cli, &reports);
    }
    let p = kp_flags(cli)?;
    let opts = eval_options(cli, p.seed)?;
    let run = run_kp_trials(p.d, p.k, p.n, p.lambda, p.radius, p.trials, p.seed, &opts)?;
    let mut reports: Vec<InequalityReport> = run
        .results
        .iter()
        .map(|r| r.to_report("kp_trial"))
        .collect();
    reports.extend(run.chain.iter().cloned());
    if let Some(path) = &f.render {
        if p.d != 2 {
            return usage("--render needs --dim 2");
        }
        let (pp, qq) = (planar(&run.first.p)?, planar(&run.first.q)?);
        let (dp, dq) = (
            r_dual(&run.first.p, run.first_r)?,
            r_dual(&run.first.q, run.first_r)?,
        );
        let svg = render(&[
            Layer::Region {
                body: &dq,
                stroke: "#2ca02c",
                fill: "#2ca02c22",
            },
            Layer::Region {
                body: &dp,
                stroke: "#1f77b4",
                fill: "#1f77b444",
            },
            Layer::Points {
                points: &qq,
                color: "#2ca02c",
            },
            Layer::Points {
                points: &pp,
                color: "#1f77b4",
            },
        ]);
        fs::write(path, svg).map_err(CliError::Io)?;
    }
    emit_reports(cli, &reports)
}
