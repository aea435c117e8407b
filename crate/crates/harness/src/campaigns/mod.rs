//! The six commands. Each builds a corpus, computes rows and artifacts, and
//! leaves exit-code policy to [`Outcome::exit_code`].

mod bp;
mod centroid;
mod converge;
mod lemmas;
mod norm;
mod steiner;

use std::path::{Path, PathBuf};

use olcb::bodies::grid;
use olcb::orlicz::{OrliczFunction, WeightFunction};
use olcb::{Direction, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use bp::BallReference;
pub use converge::ConvergeStep;

use crate::config::{DirectionSpec, ExperimentConfig, SCHEMA_VERSION};
use crate::corpus::{build_corpus, source_seed, CorpusItem};
use crate::rows::{all_pass, budget_summary, sort_rows, Provenance, VerificationRow};
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Norm,
    Centroid,
    Steiner,
    VerifyBp,
    VerifyLemmas,
    Converge,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Centroid => "centroid",
            Command::Steiner => "steiner",
            Command::VerifyBp => "verify-bp",
            Command::VerifyLemmas => "verify-lemmas",
            Command::Converge => "converge",
        }
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    /// Sorted by body id.
    pub rows: Vec<VerificationRow>,
    pub artifacts: Vec<PathBuf>,
    /// Human-readable summary including the tolerance budget.
    pub report: String,
    pub ball_references: Vec<BallReference>,
    pub converge: Vec<(String, Vec<ConvergeStep>)>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        all_pass(&self.rows)
    }

    /// 0 when every row passes, 2 on any violation.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            2
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &VerificationRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

pub(crate) struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub corpus: Vec<CorpusItem>,
    pub out: &'a Path,
    pub prov: Provenance,
}

impl Context<'_> {
    /// `<out>/<stem><suffix>`
    pub fn path(&self, suffix: &str) -> PathBuf {
        self.out.join(format!("{}{suffix}", self.cfg.stem()))
    }

    /// `(phi, omega)` pairs in config order.
    pub fn pairs(&self) -> Vec<(&OrliczFunction, &WeightFunction)> {
        self.cfg.phi.iter().flat_map(|p| self.cfg.omega.iter().map(move |w| (p, w))).collect()
    }

    pub fn seed(&self, tag: usize) -> u64 {
        source_seed(self.cfg.seed, 1 << 20 | tag)
    }
}

pub(crate) fn case(phi: &OrliczFunction, omega: &WeightFunction) -> String {
    format!("phi={};omega={}", phi.label(), omega.label())
}

/// Raw direction vectors in `R^dim`; list entries keep their length.
pub fn directions(spec: &DirectionSpec, dim: usize, seed: u64) -> Result<Vec<Vec<f64>>, HarnessError> {
    Ok(match spec {
        DirectionSpec::Grid(m) => grid::default_grid(dim, *m)?.into_iter().map(|d| d.as_slice().to_vec()).collect(),
        DirectionSpec::List(v) => {
            for x in v {
                if x.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: x.len() }.into());
                }
                Direction::normalize(x)?;
            }
            v.clone()
        }
        DirectionSpec::Random(m) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..*m).map(|_| random_direction(dim, &mut rng).as_slice().to_vec()).collect()
        }
    })
}

pub fn unit_directions(spec: &DirectionSpec, dim: usize, seed: u64) -> Result<Vec<Direction>, HarnessError> {
    directions(spec, dim, seed)?.iter().map(|x| Ok(Direction::normalize(x)?)).collect()
}

pub(crate) fn random_direction(dim: usize, rng: &mut ChaCha8Rng) -> Direction {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(d) = Direction::normalize(&v) {
            return d;
        }
    }
}

/// Runs `cmd` and writes its artifacts under `out`.
pub fn run(cmd: Command, cfg: &ExperimentConfig, out: &Path) -> Result<Outcome, HarnessError> {
    cfg.validate()?;
    std::fs::create_dir_all(out).map_err(|e| HarnessError::Io(format!("{}: {e}", out.display())))?;
    let corpus = build_corpus(&cfg.bodies, cfg.seed)?;
    let prov = Provenance {
        experiment: cfg.name.clone(),
        command: cmd.name().into(),
        seed: cfg.seed,
        schema_version: SCHEMA_VERSION,
    };
    let ctx = Context { cfg, corpus, out, prov };
    let mut outcome = match cmd {
        Command::Norm => norm::run(&ctx)?,
        Command::Centroid => centroid::run(&ctx)?,
        Command::Steiner => steiner::run(&ctx)?,
        Command::VerifyBp => bp::run(&ctx)?,
        Command::VerifyLemmas => lemmas::run(&ctx)?,
        Command::Converge => converge::run(&ctx)?,
    };
    sort_rows(&mut outcome.rows);
    if !outcome.rows.is_empty() {
        outcome.artifacts.push(crate::rows::write_rows(&ctx.path("_rows.csv"), &ctx.prov, &outcome.rows)?);
        outcome.report.push_str("\ntolerance budget by statistic (relative):\n");
        outcome.report.push_str(&budget_summary(&outcome.rows));
        let failed = outcome.failures().count();
        outcome.report.push_str(&format!("{} rows, {failed} failed\n", outcome.rows.len()));
    }
    Ok(outcome)
}
