use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use plausible::agreement::DEFAULT_PAIR_CAP;
use plausible::oracle::OracleConfig;
use plausible::order::ScopePolicy;
use plausible::testspace::DEFAULT_EVENT_CAP;

#[derive(Debug, Parser)]
#[command(
    name = "plausible",
    version,
    about = "Decide whether comparative plausibility orders admit agreeing measures"
)]
pub struct Cli {
    /// Print the JSON report instead of the human summary.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for the parallel pair scan.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a test space or order document.
    Validate(InputArgs),
    /// List every event of the space.
    Events(InputArgs),
    /// Decide the Archimedean condition.
    Check {
        #[command(flatten)]
        input: InputArgs,
        /// Refuse scans of more pairs than this.
        #[arg(long, value_name = "N", default_value_t = DEFAULT_PAIR_CAP)]
        pair_cap: usize,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Find a measure agreeing with a total order in both directions.
    Agree {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = Method::Margin)]
        method: Method,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Find a measure that respects every weak comparison.
    AlmostAgree {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Expand a stored violation certificate into its event families.
    Witness {
        #[command(flatten)]
        input: InputArgs,
        /// A check report, an agree report, or a single violation.
        #[arg(long, value_name = "FILE")]
        certificate: PathBuf,
        /// Which violation of a check report to expand.
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Emit a fixture as an order document.
    Generate {
        #[command(subcommand)]
        fixture: Fixture,
    },
    /// Cross-check the engine against the brute-force procedures.
    Oracle {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        bounds: OracleBounds,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Input document; `-` reads standard input.
    pub input: PathBuf,
    /// Override the document's scope policy.
    #[arg(long, value_enum)]
    pub scope: Option<Scope>,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_EVENT_CAP)]
    pub event_cap: usize,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Also run the brute-force cross-checks and fail on any mismatch.
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    pub bounds: OracleBounds,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct OracleBounds {
    #[arg(long, value_name = "N", default_value_t = OracleConfig::default().max_coefficient)]
    pub max_coefficient: u64,
    #[arg(long, value_name = "N", default_value_t = OracleConfig::default().max_family_length)]
    pub max_length: usize,
    #[arg(long, value_name = "N", default_value_t = OracleConfig::default().max_events)]
    pub max_events: usize,
}

impl OracleBounds {
    pub fn config(&self) -> OracleConfig {
        OracleConfig {
            max_coefficient: self.max_coefficient,
            max_family_length: self.max_length,
            max_events: self.max_events,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    Active,
    Full,
}

impl From<Scope> for ScopePolicy {
    fn from(s: Scope) -> Self {
        match s {
            Scope::Active => ScopePolicy::Active,
            Scope::Full => ScopePolicy::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// One LP maximizing the smallest gap.
    Margin,
    /// One separation per strict pair, averaged.
    Averaged,
}

#[derive(Debug, Subcommand)]
pub enum Fixture {
    /// The classical space on outcomes 1..=n.
    Classical {
        #[arg(long, default_value_t = 3)]
        n: usize,
    },
    /// Three outcomes pairwise joined into tests.
    Triangle,
    /// The triangle with {x} ≈ ∅, {y} ≈ T and {z} ≈ T.
    Possibility,
    /// Five outcomes with four strict comparisons no measure satisfies.
    Kps,
    /// A total order extending the four KPS comparisons.
    KpsTotal,
    /// Lines through the origin of GF(p)^d, grouped into bases.
    Modal {
        #[arg(long, default_value_t = 2)]
        p: u64,
        #[arg(long, default_value_t = 2)]
        d: usize,
    },
    /// The full order a measure induces on a classical space.
    Measure {
        /// Comma-separated weights, e.g. `1/6,1/3,1/2`.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<String>,
    },
    /// A random space, measure and consistent comparisons.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_outcomes: usize,
        #[arg(long, default_value_t = 3)]
        max_tests: usize,
        #[arg(long, default_value_t = 6)]
        comparisons: usize,
    },
}
