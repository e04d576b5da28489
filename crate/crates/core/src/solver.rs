//! Classical samplers for [`Qubo`] models.
//!
//! All samplers share a compiled adjacency form that keeps the local field
//! `f_i = linear_i + Σ_j w_ij x_j` of every variable, so a single-bit flip is
//! evaluated and applied in `O(degree)`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::rng::{self, derive_seed};

/// Ties in energy are compared with this slack.
pub const ENERGY_EPS: f64 = 1e-9;

/// Largest model [`exhaustive_solve`] accepts.
pub const EXHAUSTIVE_MAX_VARS: usize = 30;

/// Cap on the optimal states kept by [`exhaustive_solve`].
pub const EXHAUSTIVE_STATE_CAP: usize = 256;

pub fn energy(q: &Qubo, x: &[bool]) -> Result<f64> {
    q.energy(x)
}

/// Compressed adjacency of a model.
#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    offset: f64,
    linear: Vec<f64>,
    start: Vec<usize>,
    nbr: Vec<(usize, f64)>,
}

impl Compiled {
    pub(crate) fn new(q: &Qubo) -> Self {
        let n = q.num_vars();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, j, w) in q.quadratic_terms() {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut nbr = Vec::new();
        start.push(0);
        for a in adj {
            nbr.extend(a);
            start.push(nbr.len());
        }
        Self {
            offset: q.offset(),
            linear: q.linear_coefficients().to_vec(),
            start,
            nbr,
        }
    }

    fn len(&self) -> usize {
        self.linear.len()
    }

    #[inline]
    fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.nbr[self.start[i]..self.start[i + 1]]
    }
}

/// A state together with its incrementally maintained energy.
#[derive(Debug, Clone)]
pub(crate) struct State<'a> {
    model: &'a Compiled,
    pub(crate) x: Vec<bool>,
    field: Vec<f64>,
    pub(crate) energy: f64,
}

impl<'a> State<'a> {
    pub(crate) fn new(model: &'a Compiled, x: Vec<bool>) -> Self {
        let mut field = model.linear.clone();
        let mut energy = model.offset;
        for i in 0..model.len() {
            if x[i] {
                energy += model.linear[i];
                for &(j, w) in model.neighbors(i) {
                    field[j] += w;
                    if j < i && x[j] {
                        energy += w;
                    }
                }
            }
        }
        Self {
            model,
            x,
            field,
            energy,
        }
    }

    /// Energy change if bit `i` were flipped.
    #[inline]
    pub(crate) fn delta(&self, i: usize) -> f64 {
        if self.x[i] {
            -self.field[i]
        } else {
            self.field[i]
        }
    }

    #[inline]
    pub(crate) fn flip(&mut self, i: usize) {
        let d = self.delta(i);
        self.x[i] = !self.x[i];
        let sign = if self.x[i] { 1.0 } else { -1.0 };
        for &(j, w) in self.model.neighbors(i) {
            self.field[j] += sign * w;
        }
        self.energy += d;
    }

    /// Steepest descent: flip the most improving bit (lowest index on ties)
    /// until no flip strictly lowers the energy.
    pub(crate) fn descend(&mut self) {
        loop {
            let mut best = (0.0, usize::MAX);
            for i in 0..self.x.len() {
                let d = self.delta(i);
                if d < best.0 - ENERGY_EPS {
                    best = (d, i);
                }
            }
            if best.1 == usize::MAX {
                return;
            }
            self.flip(best.1);
        }
    }
}

/// One distinct state of a sample set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    #[serde(with = "bitstring")]
    pub state: Vec<bool>,
    pub energy: f64,
    pub occurrences: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleInfo {
    pub solver: String,
    pub seed: Option<u64>,
    pub params: String,
    pub wall_time_secs: f64,
}

/// Distinct states sorted by energy, then state.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub records: Vec<Sample>,
    pub info: SampleInfo,
}

impl SampleSet {
    /// Groups identical states and sorts the records.
    pub fn from_states(states: Vec<(Vec<bool>, f64)>, info: SampleInfo) -> Self {
        let mut counts: HashMap<Vec<bool>, (f64, usize)> = HashMap::new();
        for (x, e) in states {
            counts.entry(x).or_insert((e, 0)).1 += 1;
        }
        let mut records: Vec<Sample> = counts
            .into_iter()
            .map(|(state, (energy, occurrences))| Sample {
                state,
                energy,
                occurrences,
            })
            .collect();
        records.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.state.cmp(&b.state))
        });
        Self { records, info }
    }

    pub fn best(&self) -> Option<&Sample> {
        self.records.first()
    }

    pub fn lowest_energy(&self) -> Option<f64> {
        self.best().map(|s| s.energy)
    }

    pub fn total_occurrences(&self) -> usize {
        self.records.iter().map(|r| r.occurrences).sum()
    }

    /// Re-evaluates every record against `q`.
    pub fn verify(&self, q: &Qubo) -> bool {
        self.records.iter().all(|r| {
            q.energy(&r.state)
                .map(|e| (e - r.energy).abs() <= ENERGY_EPS)
                .unwrap_or(false)
        }) && self.records.windows(2).all(|w| w[0].energy <= w[1].energy)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Columns `state,energy,occurrences`; state as a 0/1 string.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["state", "energy", "occurrences"])?;
        for r in &self.records {
            w.write_record([
                bitstring::encode(&r.state),
                r.energy.to_string(),
                r.occurrences.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }
}

mod bitstring {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn encode(bits: &[bool]) -> String {
        bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn serialize<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&encode(bits))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
        let text = String::deserialize(d)?;
        text.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(serde::de::Error::custom(format!("bad bit '{other}'"))),
            })
            .collect()
    }
}

pub use bitstring::encode as bits_to_string;

/// Result of [`exhaustive_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub best_energy: f64,
    /// Optimal states in enumeration order, at most [`EXHAUSTIVE_STATE_CAP`].
    pub best_states: Vec<Vec<bool>>,
    /// Total number of optimal states, including those beyond the cap.
    pub num_optimal: u64,
}

/// Global minimum by reflected Gray-code enumeration of all `2^L` states.
///
/// Step `c` flips bit `trailing_zeros(c)`, so consecutive states differ in
/// exactly one bit and each step costs `O(degree)`.
pub fn exhaustive_solve(q: &Qubo) -> Result<ExhaustiveResult> {
    let n = q.num_vars();
    if n > EXHAUSTIVE_MAX_VARS {
        return Err(Error::TooManyVariables {
            num_vars: n,
            max: EXHAUSTIVE_MAX_VARS,
        });
    }
    let model = Compiled::new(q);
    let mut state = State::new(&model, vec![false; n]);
    let mut best_energy = state.energy;
    let mut best_states = vec![state.x.clone()];
    let mut num_optimal = 1u64;
    for c in 1u64..1u64 << n {
        state.flip(c.trailing_zeros() as usize);
        let e = state.energy;
        if e < best_energy - ENERGY_EPS {
            best_energy = e;
            best_states.clear();
            best_states.push(state.x.clone());
            num_optimal = 1;
        } else if e <= best_energy + ENERGY_EPS {
            num_optimal += 1;
            if best_states.len() < EXHAUSTIVE_STATE_CAP {
                best_states.push(state.x.clone());
            }
        }
    }
    // Report the exact energy of a stored optimum rather than the running sum.
    let best_energy = q.energy(&best_states[0])?;
    Ok(ExhaustiveResult {
        best_energy,
        best_states,
        num_optimal,
    })
}

/// Parameters of [`simulated_annealing`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub reads: usize,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub seed: u64,
    /// Finish each read with a steepest-descent pass that only accepts
    /// strictly improving flips.
    pub final_descent: bool,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        Self {
            reads: 1000,
            sweeps: 100,
            beta_start: 0.1,
            beta_end: 10.0,
            seed: 0,
            final_descent: true,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<()> {
        if self.reads == 0 {
            return Err(Error::InvalidConfig("reads must be at least 1".into()));
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidConfig("sweeps must be at least 1".into()));
        }
        if !(self.beta_start > 0.0 && self.beta_start < self.beta_end && self.beta_end.is_finite())
        {
            return Err(Error::InvalidConfig(format!(
                "need 0 < beta_start < beta_end, got {} and {}",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    /// Geometric inverse-temperature ladder, one value per sweep.
    pub fn betas(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_end];
        }
        let ratio = (self.beta_end / self.beta_start).powf(1.0 / (self.sweeps - 1) as f64);
        (0..self.sweeps)
            .map(|k| self.beta_start * ratio.powi(k as i32))
            .collect()
    }

    fn describe(&self) -> String {
        format!(
            "reads={} sweeps={} beta={}..{} geometric final_descent={}",
            self.reads, self.sweeps, self.beta_start, self.beta_end, self.final_descent
        )
    }
}

fn anneal_read(model: &Compiled, betas: &[f64], seed: u64, final_descent: bool) -> Vec<bool> {
    let mut rng = rng::seeded(seed);
    let x = rng::random_bits(&mut rng, model.len());
    let mut state = State::new(model, x);
    for &beta in betas {
        for i in 0..model.len() {
            let d = state.delta(i);
            if d <= 0.0 || rng::unit_f64(&mut rng) < (-beta * d).exp() {
                state.flip(i);
            }
        }
    }
    if final_descent {
        state.descend();
    }
    state.x
}

/// Single-bit-flip Metropolis annealing, `cfg.reads` independent restarts.
///
/// Read `r` draws from the generator seeded with `derive_seed(cfg.seed, [r])`,
/// so results do not depend on how reads are scheduled across threads.
pub fn simulated_annealing(q: &Qubo, cfg: &AnnealConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let started = Instant::now();
    let model = Compiled::new(q);
    let betas = cfg.betas();
    let states: Vec<(Vec<bool>, f64)> = (0..cfg.reads as u64)
        .into_par_iter()
        .map(|r| {
            let x = anneal_read(
                &model,
                &betas,
                derive_seed(cfg.seed, &[r]),
                cfg.final_descent,
            );
            let e = q.energy(&x).expect("state length matches model");
            (x, e)
        })
        .collect();
    Ok(SampleSet::from_states(
        states,
        SampleInfo {
            solver: "sa".into(),
            seed: Some(cfg.seed),
            params: cfg.describe(),
            wall_time_secs: started.elapsed().as_secs_f64(),
        },
    ))
}

/// Steepest descent from `start`. The returned state has no strictly
/// improving single flip.
pub fn local_search(q: &Qubo, start: &[bool]) -> Result<(Vec<bool>, f64)> {
    if start.len() != q.num_vars() {
        return Err(Error::LengthMismatch {
            expected: q.num_vars(),
            found: start.len(),
        });
    }
    let model = Compiled::new(q);
    let mut state = State::new(&model, start.to_vec());
    state.descend();
    let e = q.energy(&state.x)?;
    Ok((state.x, e))
}

/// Steepest descent from `restarts` uniformly random starts.
pub fn multi_start_local_search(q: &Qubo, restarts: usize, seed: u64) -> Result<SampleSet> {
    if restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be at least 1".into()));
    }
    let started = Instant::now();
    let model = Compiled::new(q);
    let states: Vec<(Vec<bool>, f64)> = (0..restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::seeded(derive_seed(seed, &[r]));
            let mut state = State::new(&model, rng::random_bits(&mut rng, model.len()));
            state.descend();
            let e = q.energy(&state.x).expect("state length matches model");
            (state.x, e)
        })
        .collect();
    Ok(SampleSet::from_states(
        states,
        SampleInfo {
            solver: "local".into(),
            seed: Some(seed),
            params: format!("restarts={restarts}"),
            wall_time_secs: started.elapsed().as_secs_f64(),
        },
    ))
}

/// A configured sampler.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "snake_case")]
pub enum Solver {
    Exhaustive,
    Annealing(AnnealConfig),
    LocalSearch { restarts: usize },
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Exhaustive => "exhaustive",
            Solver::Annealing(_) => "sa",
            Solver::LocalSearch { .. } => "local",
        }
    }

    /// Runs the sampler at its configured effort with the given seed.
    pub fn sample(&self, q: &Qubo, seed: u64) -> Result<SampleSet> {
        match self {
            Solver::Exhaustive => {
                let started = Instant::now();
                let res = exhaustive_solve(q)?;
                let states = res
                    .best_states
                    .into_iter()
                    .map(|x| (x, res.best_energy))
                    .collect();
                let mut params = String::new();
                let _ = write!(params, "optimal_states={}", res.num_optimal);
                Ok(SampleSet::from_states(
                    states,
                    SampleInfo {
                        solver: "exhaustive".into(),
                        seed: None,
                        params,
                        wall_time_secs: started.elapsed().as_secs_f64(),
                    },
                ))
            }
            Solver::Annealing(cfg) => simulated_annealing(q, &AnnealConfig { seed, ..*cfg }),
            Solver::LocalSearch { restarts } => multi_start_local_search(q, *restarts, seed),
        }
    }

    /// Runs a scaled-down instance of the sampler: `effort` reads (annealing,
    /// capped at the configured reads) or restarts (local search). Exhaustive
    /// search ignores `effort`.
    pub fn sample_with_effort(&self, q: &Qubo, effort: usize, seed: u64) -> Result<SampleSet> {
        let effort = effort.max(1);
        match self {
            Solver::Exhaustive => self.sample(q, seed),
            Solver::Annealing(cfg) => simulated_annealing(
                q,
                &AnnealConfig {
                    reads: effort.min(cfg.reads),
                    seed,
                    ..*cfg
                },
            ),
            Solver::LocalSearch { .. } => multi_start_local_search(q, effort, seed),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, Solver::Exhaustive)
    }
}

/// Outcome of [`time_to_target`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeToTarget {
    pub reached: bool,
    pub elapsed: Duration,
    /// `(elapsed seconds, best energy so far)` after every round.
    pub trace: Vec<(f64, f64)>,
    pub best_energy: f64,
    #[serde(with = "bitstring")]
    pub best_state: Vec<bool>,
}

impl TimeToTarget {
    /// Columns `elapsed_seconds,best_energy`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("elapsed_seconds,best_energy\n");
        for (t, e) in &self.trace {
            let _ = writeln!(out, "{t},{e}");
        }
        out
    }
}

const MAX_EFFORT_DOUBLINGS: u32 = 16;

/// Runs `solver` in rounds of doubling effort (1, 2, 4, … reads or restarts)
/// until the best energy so far is at or below `target`, or `budget` runs
/// out. Round `r` uses seed `derive_seed(seed, [r])`.
pub fn time_to_target(
    q: &Qubo,
    target: f64,
    solver: &Solver,
    budget: Duration,
    seed: u64,
) -> Result<TimeToTarget> {
    if budget.is_zero() {
        return Err(Error::InvalidConfig("budget must be positive".into()));
    }
    let started = Instant::now();
    let mut best_energy = f64::INFINITY;
    let mut best_state = Vec::new();
    let mut trace = Vec::new();
    let mut reached = false;
    let mut round = 0u32;
    while started.elapsed() < budget {
        let effort = 1usize << round.min(MAX_EFFORT_DOUBLINGS);
        let set = solver.sample_with_effort(q, effort, derive_seed(seed, &[round as u64]))?;
        if let Some(s) = set.best() {
            if s.energy < best_energy {
                best_energy = s.energy;
                best_state = s.state.clone();
            }
        }
        trace.push((started.elapsed().as_secs_f64(), best_energy));
        if best_energy <= target + ENERGY_EPS {
            reached = true;
            break;
        }
        if solver.is_deterministic() {
            // The exact optimum is above the target; more rounds cannot help.
            break;
        }
        round += 1;
    }
    Ok(TimeToTarget {
        reached,
        elapsed: started.elapsed(),
        trace,
        best_energy,
        best_state,
    })
}
