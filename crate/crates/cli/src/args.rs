use std::net::SocketAddr;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Verification and exact search for Schütte's property, plus the
/// nontransitive dice engine.
///
/// Exit status: 0 success or property true, 1 property false or nothing
/// found, 2 usage or input error, 3 budget exhausted.
#[derive(Debug, Parser)]
#[command(name = "schutte", version)]
pub struct Cli {
    /// Machine-readable JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether a tournament set file has S_k.
    CheckSk(CheckSk),
    /// Print a k-subset no vertex dominates in any member, if one exists.
    Witness(CheckSk),
    /// Render a tournament set file as Graphviz DOT, one digraph per member.
    Dot {
        #[arg(long)]
        file: PathBuf,
    },
    /// Write the Paley tournament on p vertices (p prime, p = 3 mod 4).
    Paley {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Join an S_{k1} set and an S_{k2} set into an S_{k1+k2+1} set.
    Combine {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        #[command(flatten)]
        fill: Fill,
        #[command(flatten)]
        out: Output,
    },
    /// Write the rotational S_k set of k+1 tournaments on k+1 vertices.
    Rotational {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        fill: Fill,
        #[command(flatten)]
        out: Output,
    },
    /// Evaluate every bound on f(k) and f(m,k) that applies.
    Bound {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Render the table of upper bounds on f(m,k).
    Table {
        #[arg(long, default_value_t = 5)]
        m_max: usize,
        #[arg(long, default_value_t = 8)]
        k_max: usize,
        #[arg(long, value_enum, default_value_t = TableFormat::Text)]
        format: TableFormat,
    },
    /// Decide whether an S_k m-set of order n exists, or compute f(m,k).
    SatFind(SatFind),
    /// Write the CNF for (m, k, n) in DIMACS format.
    ExportCnf {
        #[command(flatten)]
        instance: Instance,
        #[arg(long)]
        n: usize,
    },
    /// Check a dice set's realized tournaments for S_k and report edge odds.
    DiceVerify {
        #[command(flatten)]
        dice: DiceSource,
        /// Roll counts 1..=m.
        #[arg(long)]
        m: u32,
        /// Defaults to one less than the number of dice.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Realized tournaments at roll counts 1..=m with exact odds.
    DiceTournaments {
        #[command(flatten)]
        dice: DiceSource,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        remote: Remote,
        #[command(flatten)]
        out: Output,
    },
    /// Choose the die and roll count that beat every opponent.
    Advise {
        #[command(flatten)]
        dice: DiceSource,
        /// Comma-separated opponent labels.
        #[arg(long, value_delimiter = ',', required = true)]
        opponents: Vec<String>,
        #[arg(long)]
        m: u32,
        #[command(flatten)]
        remote: Remote,
    },
    /// Roll two dice against each other with a seeded generator.
    Simulate {
        #[command(flatten)]
        dice: DiceSource,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        remote: Remote,
    },
    /// Search for dice whose r-roll tournament is member r of a target file.
    DiceSearch(DiceSearch),
    /// Run the HTTP API.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        /// Extra dice-set files; overrides SCHUTTE_FIXTURES.
        #[arg(long)]
        fixtures: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct CheckSk {
    #[arg(long)]
    pub file: PathBuf,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Write the tournament set file here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Fill {
    /// Orient free edges by coin flips from this seed (default: lower label wins).
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct Instance {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub k: usize,
    /// Drop the symmetry-breaking clauses.
    #[arg(long)]
    pub no_symmetry: bool,
}

#[derive(Debug, Args)]
pub struct SatFind {
    #[command(flatten)]
    pub instance: Instance,
    /// Decide a single order.
    #[arg(long, conflicts_with = "n_max")]
    pub n: Option<usize>,
    /// Compute f(m,k) by trying every order up to this one.
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub max_conflicts: Option<u64>,
    /// Seconds per solver call.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Check an external solver's output for the --n instance instead of solving.
    #[arg(long, requires = "n")]
    pub external: Option<PathBuf>,
    #[command(flatten)]
    pub out: Output,
}

#[derive(Debug, Args)]
pub struct DiceSource {
    /// A built-in (or, with --remote, served) dice set.
    #[arg(long, conflicts_with = "dice_file", required_unless_present = "dice_file")]
    pub set: Option<String>,
    /// A dice-set JSON file.
    #[arg(long = "dice-file")]
    pub dice_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Remote {
    /// Ask a running server instead of computing locally.
    #[arg(long, value_name = "URL")]
    pub remote: Option<String>,
}

#[derive(Debug, Args)]
pub struct DiceSearch {
    /// Tournament set file; member r is the target at r rolls.
    #[arg(long)]
    pub target: PathBuf,
    #[arg(long)]
    pub faces: usize,
    #[arg(long, default_value_t = 9)]
    pub max_face: i64,
    /// Comma-separated face values, replacing 0..=max-face.
    #[arg(long, value_delimiter = ',')]
    pub alphabet: Option<Vec<i64>>,
    #[arg(long)]
    pub max_nodes: Option<u64>,
    /// Seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    /// Shuffle candidate order with this seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Accept edges that win more often than they lose even if below 1/2.
    #[arg(long)]
    pub allow_sub_majority: bool,
    /// Write the dice-set file here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}
