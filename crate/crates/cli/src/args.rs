use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qplanar", version, about = "Exact verification of the quantum sl2 planar algebra at roots of unity")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Order of the root of unity, q = exp(i pi / p).
    #[arg(long, global = true, default_value_t = 2)]
    pub p: u32,
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Root)]
    pub mode: ModeArg,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory memoizing computed operators.
    #[arg(long, global = true, env = "QPLANAR_CACHE")]
    pub cache: Option<PathBuf>,
    /// Return cached operators without recomputing them.
    #[arg(long, global = true)]
    pub trust_cache: bool,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Generic,
    Root,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites; exits 1 if any check fails.
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Compute an operator and print or save it.
    Compute {
        #[command(subcommand)]
        object: Object,
    },
    /// Decompose X^(x)n into indecomposables and compare with the fusion rules.
    Decompose {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Suite {
    /// The sixteen relations among the generators.
    Thm1 {
        /// Relations to check, e.g. "1-16" or "1,4,13-16".
        #[arg(long, default_value = "1-16")]
        relations: String,
        /// Ambient strand count (defaults to the smallest meaningful one).
        #[arg(long)]
        n: Option<usize>,
    },
    /// Projections onto projective summands and the fusion isomorphisms.
    Projections,
    /// theta, Gamma, their variants and the nilpotent endomorphisms.
    Morphisms,
    /// Coproduct, commutation, power-action and xi identities.
    Appendix {
        /// Comma-separated identity labels, e.g. "A1,A17".
        #[arg(long)]
        ids: Option<String>,
        #[arg(long)]
        max_z: Option<usize>,
    },
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SignArg {
    #[value(name = "+")]
    Plus,
    #[value(name = "-")]
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Descent,
    Closed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MorphismName {
    Theta,
    Gamma,
    Phi,
    ThetaVar,
    GammaVar,
    PhiNeg,
}

#[derive(Debug, Subcommand)]
pub enum Object {
    /// The Jones-Wenzl projection on n strands.
    Jw {
        #[arg(long)]
        n: usize,
    },
    /// alpha on 2p-1 strands.
    Alpha,
    /// beta on 2p-1 strands.
    Beta,
    /// A diagram expression such as "cap(1,2) * cup(1,2)".
    Expr {
        expr: String,
    },
    Projection {
        #[arg(long)]
        i: u32,
        #[arg(long, value_enum, allow_hyphen_values = true)]
        sign: SignArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Descent)]
        method: MethodArg,
    },
    Morphism {
        #[arg(long, value_enum)]
        name: MorphismName,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        j: Option<u8>,
        #[arg(long)]
        pos: Option<String>,
    },
}
