use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reprep::{Caps, Rational};

#[derive(Debug, Parser)]
#[command(name = "reprep", version, about = "Two-prover games, derandomized repetition and fortification")]
pub struct Cli {
    /// Print the JSON result to stdout instead of the summary table.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(flatten)]
    pub caps: CapArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct CapArgs {
    #[arg(long = "cap-strategy", global = true)]
    pub strategy: Option<u64>,
    #[arg(long = "cap-power", global = true)]
    pub power: Option<u64>,
    #[arg(long = "cap-rect", global = true)]
    pub rect: Option<u64>,
    #[arg(long = "cap-walks", global = true)]
    pub walks: Option<u64>,
    #[arg(long = "cap-cloud", global = true)]
    pub cloud: Option<u64>,
    #[arg(long = "cap-circuit", global = true)]
    pub circuit: Option<u64>,
    #[arg(long = "cap-gadget", global = true)]
    pub gadget: Option<u64>,
}

impl CapArgs {
    /// Defaults, then `REPREP_CAP_OVERRIDE`, then flags.
    pub fn resolve(&self) -> reprep::Result<Caps> {
        let mut caps = Caps::from_env()?;
        let flags = [
            ("strategy", self.strategy),
            ("power", self.power),
            ("rect", self.rect),
            ("walks", self.walks),
            ("cloud", self.cloud),
            ("circuit", self.circuit),
            ("gadget", self.gadget),
        ];
        for (key, v) in flags {
            if let Some(v) = v {
                caps.set(key, v)?;
            }
        }
        Ok(caps)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SchemeKind {
    Full,
    Perm,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum, default_value = "full")]
    pub scheme: SchemeKind,
    /// Copies for the permutation-union scheme.
    #[arg(long, default_value_t = 1)]
    pub copies: usize,
    /// Use identity permutations in every copy.
    #[arg(long)]
    pub identity: bool,
    #[arg(long, default_value_t = 0)]
    pub scheme_seed: u64,
}

impl SchemeArgs {
    pub fn spec(&self) -> reprep::SchemeSpec {
        match self.scheme {
            SchemeKind::Full => reprep::SchemeSpec::FullProduct,
            SchemeKind::Perm => reprep::SchemeSpec::PermutationUnion {
                copies: self.copies,
                seed: self.scheme_seed,
                identity: self.identity,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProviderKind {
    Diagonal,
    Planted,
    File,
}

#[derive(Debug, Args)]
pub struct ProviderArgs {
    #[arg(long, value_enum, default_value = "diagonal")]
    pub provider: ProviderKind,
    /// Comma-separated plant for the planted provider, used on both sides.
    #[arg(long, value_delimiter = ',', default_value = "0,1")]
    pub plant: Vec<usize>,
    /// JSON `{"f_x", "f_y", "i"}` for the file provider.
    #[arg(long)]
    pub emb: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ZSet {
    /// Top-left quarter block, `μ = 1/4`.
    Quarter,
    /// Every pair, `μ = 1`.
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FixtureName {
    Chsh,
    Plant8,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a built-in game in tpg-1 form.
    Fixture {
        #[arg(long, value_enum)]
        name: FixtureName,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a random game from the matching-union model.
    GenRandom {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        #[arg(long, default_value = "1/2")]
        beta: Rational,
        #[arg(long, default_value = "1/10")]
        eta: Rational,
        #[arg(long, default_value = "1/4")]
        delta: Rational,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also run every property check and exit by the result.
        #[arg(long)]
        verify: bool,
        /// Where to write the verification report.
        #[arg(long, requires = "verify")]
        report: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact (or local-search) value of a game.
    Value {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        local: bool,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// (δ, ε)-fortification check with a witness rectangle.
    Fortify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        delta: Rational,
        #[arg(long)]
        eps: Rational,
        /// Sample this many rectangles instead of scanning all.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expander-mixing check over rectangles.
    MixCheck {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        delta: Rational,
        #[arg(long)]
        eta: Rational,
        #[arg(long, default_value_t = 4096)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a repeated game.
    Repeat {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Uniform-marginals check of a repeated game.
    Marginals {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compose a game with the Tseitin tester under a repetition code.
    Compose {
        #[arg(long = "in")]
        input: PathBuf,
        /// Repetition factor of the binary code.
        #[arg(long, default_value_t = 2)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power a constraint graph (cg-1) or composed graph.
    Power {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        t: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Project super-labelings of a powered composed graph back to the game.
    Project {
        /// Composed graph from `compose`.
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        t: usize,
        /// Super-labeling JSON (list of per-vertex claim lists).
        #[arg(long)]
        lambda: Option<PathBuf>,
        /// Search this many sampled candidates; 0 searches exhaustively.
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the rectangle extraction on an embedding.
    NogoExtract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        eps: Rational,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        provider: ProviderArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The full dichotomy experiment.
    NogoExperiment {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        /// Defaults to val(G).
        #[arg(long)]
        gamma: Option<Rational>,
        #[arg(long)]
        eps: Rational,
        #[command(flatten)]
        scheme: SchemeArgs,
        #[command(flatten)]
        provider: ProviderArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Size and value guarantees of the extraction.
    Bounds {
        #[arg(long)]
        z: Rational,
        #[arg(long)]
        eps: Rational,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concentration of matching unions on a pair set.
    Concentration {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_enum, default_value = "quarter")]
        z_set: ZSet,
        #[arg(long, default_value = "1/2")]
        rho: Rational,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded multi-trial campaign from a JSON config.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        /// JSONL output; a summary is written next to it.
        #[arg(long)]
        out: PathBuf,
    },
}
