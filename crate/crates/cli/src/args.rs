use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ballkit",
    version,
    about = "Ball polyhedra, r-ball hulls and intrinsic-volume inequality checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Intersection of radius-r balls around the input points.
    Dual,
    /// r-ball convex hull of the input points.
    Hull,
    /// Intrinsic volumes of the r-dual of the input points.
    Volumes,
    /// Run a batch of inequality checks.
    Check {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Uniform-contraction trials comparing V_k(P^r) and V_k(Q^r).
    Kp,
    /// Generate a point set.
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
    },
    /// Draw the input points with their r-dual and r-hull as SVG.
    Render,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bs,
    Product,
    Lemma,
    Jung,
    Alexandrov,
    KpChain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Packing,
    Cluster,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum FormatArg {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// Point set JSON file.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long, global = true)]
    pub r: Option<f64>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub l: Option<usize>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Hit-or-miss samples per epsilon.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Comma-separated parallel distances for the Steiner fit.
    #[arg(long, global = true, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Packing jitter for `gen packing`, as a fraction of lambda.
    #[arg(long, global = true)]
    pub jitter: Option<f64>,
    /// Write an SVG of the first trial (kp) to this file.
    #[arg(long, global = true)]
    pub render: Option<PathBuf>,
    /// Sweep the planar perimeter comparison over several point counts.
    #[arg(long, global = true)]
    pub alexander: bool,
}

impl Flags {
    /// Names of the flags that were given.
    pub fn given(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut add = |set: bool, name| {
            if set {
                out.push(name)
            }
        };
        add(self.input.is_some(), "input");
        add(self.format.is_some(), "format");
        add(self.r.is_some(), "r");
        add(self.k.is_some(), "k");
        add(self.l.is_some(), "l");
        add(self.dim.is_some(), "dim");
        add(self.n.is_some(), "n");
        add(self.lambda.is_some(), "lambda");
        add(self.trials.is_some(), "trials");
        add(self.samples.is_some(), "samples");
        add(self.epsilons.is_some(), "epsilons");
        add(self.seed.is_some(), "seed");
        add(self.jitter.is_some(), "jitter");
        add(self.render.is_some(), "render");
        add(self.alexander, "alexander");
        out
    }
}
