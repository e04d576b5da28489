//! Seeded experiment drivers.
//!
//! Every random choice is keyed by [`derive_seed`] on the master seed and a
//! tag tuple:
//!
//! | purpose  | tags                                         |
//! |----------|----------------------------------------------|
//! | instance | `[1, teams, instance]`                       |
//! | solver   | `[2, teams, instance, solver index]`         |
//! | chaser   | `[3, teams, instance]`                       |
//! | embedder | `[4, teams, instance]`                       |
//!
//! so any single cell of a table can be reproduced in isolation.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{embedding_stats, find_embedding_with, EmbedParams, HardwareGraph};
use crate::error::{Error, Result};
use crate::qubo::{build_qubo, decode, source_graph, Qubo, VariableMap};
use crate::rng::derive_seed;
use crate::schedule::{self, count_breaks, lower_bound, validate_assignment, Kind, Timetable};
use crate::solver::{exhaustive_solve, time_to_target, Solver, ENERGY_EPS, EXHAUSTIVE_MAX_VARS};

const TAG_INSTANCE: u64 = 1;
const TAG_SOLVER: u64 = 2;
const TAG_CHASER: u64 = 3;
const TAG_EMBED: u64 = 4;

/// Wall-clock columns depend on the machine; tables report shapes only.
pub const TIMING_NOTE: &str =
    "# wall-clock columns are hardware-specific; compare trends, not absolute values";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub team_sizes: Vec<usize>,
    pub instances_per_size: usize,
    pub kind: Kind,
    pub solvers: Vec<Solver>,
    pub master_seed: u64,
    pub budget: Duration,
    /// Attach the exhaustive optimum when the model has at most this many
    /// variables.
    pub oracle_max_vars: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            team_sizes: vec![4, 6, 8],
            instances_per_size: 5,
            kind: Kind::Mdrrt,
            solvers: vec![Solver::Annealing(Default::default())],
            master_seed: 0,
            budget: Duration::from_secs(300),
            oracle_max_vars: EXHAUSTIVE_MAX_VARS,
        }
    }
}

impl ExperimentConfig {
    fn validate_common(&self) -> Result<()> {
        if self.team_sizes.is_empty() {
            return Err(Error::InvalidConfig("no team sizes given".into()));
        }
        if let Some(&bad) = self.team_sizes.iter().find(|&&t| t < 4 || t % 2 != 0) {
            return Err(Error::InvalidTeamCount(bad));
        }
        if self.instances_per_size == 0 {
            return Err(Error::InvalidConfig(
                "instances_per_size must be at least 1".into(),
            ));
        }
        if self.budget.is_zero() {
            return Err(Error::InvalidConfig("budget must be positive".into()));
        }
        if !self.kind.is_double() {
            return Err(Error::InvalidConfig("kind must be MDRRT or DRRT".into()));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_common()?;
        if self.solvers.is_empty() {
            return Err(Error::InvalidConfig("no solvers configured".into()));
        }
        Ok(())
    }

    pub fn instance(&self, teams: usize, index: usize) -> Result<Timetable> {
        instance(self.kind, teams, self.master_seed, index)
    }
}

/// Instance `index` of the given size under `master_seed`.
pub fn instance(kind: Kind, teams: usize, master_seed: u64, index: usize) -> Result<Timetable> {
    let seed = derive_seed(master_seed, &[TAG_INSTANCE, teams as u64, index as u64]);
    match kind {
        Kind::Mdrrt => schedule::random_mdrrt(teams, seed),
        Kind::Drrt => schedule::random_drrt(teams, seed),
        Kind::Rrt => Err(Error::InvalidConfig(
            "break models need a double round robin".into(),
        )),
    }
}

/// Decodes `state`, re-validates the assignment and recounts breaks
/// independently of the model energy.
pub fn recount_breaks(q: &Qubo, vm: &VariableMap, state: &[bool]) -> Result<usize> {
    let ha = decode(state, vm)?;
    let report = validate_assignment(&ha);
    if !report.ok {
        return Err(Error::InvalidAssignment(report.to_string()));
    }
    let breaks = count_breaks(&ha);
    let e = q.energy(state)?;
    if (e - breaks as f64).abs() > ENERGY_EPS {
        return Err(Error::InvalidAssignment(format!(
            "model energy {e} disagrees with {breaks} counted breaks"
        )));
    }
    Ok(breaks)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub name: String,
    pub mean_breaks: Option<f64>,
    pub mean_time_secs: f64,
    /// Share of instances solved to the exhaustive optimum, when known.
    pub optimal_fraction: Option<f64>,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub teams: usize,
    pub instances: usize,
    pub lower_bound: usize,
    pub optimum_mean: Option<f64>,
    pub solvers: Vec<SolverSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table<R> {
    pub rows: Vec<R>,
    /// `"teams=…, instance=…: message"` for every instance-level failure.
    pub failures: Vec<String>,
}

#[derive(Debug, Clone)]
struct SolverRun {
    breaks: Option<usize>,
    secs: f64,
    error: Option<String>,
}

#[derive(Debug, Clone)]
struct InstanceRun {
    optimum: Option<usize>,
    runs: Vec<SolverRun>,
    error: Option<String>,
}

fn solver_names(solvers: &[Solver]) -> Vec<String> {
    solvers
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let dupes = solvers.iter().filter(|o| o.name() == s.name()).count();
            if dupes > 1 {
                format!("{}{}", s.name(), i + 1)
            } else {
                s.name().to_string()
            }
        })
        .collect()
}

fn run_instance(cfg: &ExperimentConfig, teams: usize, index: usize) -> InstanceRun {
    let prepared = cfg.instance(teams, index).and_then(|tt| build_qubo(&tt));
    let (q, vm) = match prepared {
        Ok(p) => p,
        Err(e) => {
            return InstanceRun {
                optimum: None,
                runs: Vec::new(),
                error: Some(e.to_string()),
            }
        }
    };
    let optimum = if q.num_vars() <= cfg.oracle_max_vars.min(EXHAUSTIVE_MAX_VARS) {
        exhaustive_solve(&q)
            .ok()
            .map(|r| r.best_energy.round() as usize)
    } else {
        None
    };
    let runs = cfg
        .solvers
        .iter()
        .enumerate()
        .map(|(si, solver)| {
            let seed = derive_seed(
                cfg.master_seed,
                &[TAG_SOLVER, teams as u64, index as u64, si as u64],
            );
            let started = Instant::now();
            let outcome = solver.sample(&q, seed).and_then(|set| {
                let best = set
                    .best()
                    .ok_or_else(|| Error::InvalidConfig("solver returned no samples".into()))?;
                recount_breaks(&q, &vm, &best.state)
            });
            let secs = started.elapsed().as_secs_f64();
            match outcome {
                Ok(b) => SolverRun {
                    breaks: Some(b),
                    secs,
                    error: None,
                },
                Err(e) => SolverRun {
                    breaks: None,
                    secs,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    InstanceRun {
        optimum,
        runs,
        error: None,
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

/// Generates `instances_per_size` timetables per size, solves each with
/// every configured solver and averages the results.
pub fn run_experiment1(cfg: &ExperimentConfig) -> Result<Table<ResultRow>> {
    cfg.validate()?;
    let names = solver_names(&cfg.solvers);
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &teams in &cfg.team_sizes {
        let runs: Vec<InstanceRun> = (0..cfg.instances_per_size)
            .into_par_iter()
            .map(|i| run_instance(cfg, teams, i))
            .collect();
        for (i, run) in runs.iter().enumerate() {
            if let Some(e) = &run.error {
                failures.push(format!("teams={teams}, instance={i}: {e}"));
            }
            for (si, r) in run.runs.iter().enumerate() {
                if let Some(e) = &r.error {
                    failures.push(format!(
                        "teams={teams}, instance={i}, solver={}: {e}",
                        names[si]
                    ));
                }
            }
        }
        let optima: Vec<f64> = runs
            .iter()
            .filter_map(|r| r.optimum.map(|o| o as f64))
            .collect();
        let have_oracle = !runs.is_empty() && optima.len() == runs.len();
        let solvers = names
            .iter()
            .enumerate()
            .map(|(si, name)| {
                let per: Vec<&SolverRun> = runs.iter().filter_map(|r| r.runs.get(si)).collect();
                let breaks: Vec<f64> = per.iter().filter_map(|r| r.breaks.map(|b| b as f64)).collect();
                let times: Vec<f64> = per.iter().map(|r| r.secs).collect();
                let optimal_fraction = have_oracle.then(|| {
                    let hits = runs
                        .iter()
                        .filter(|r| matches!((r.optimum, r.runs.get(si).and_then(|x| x.breaks)), (Some(o), Some(b)) if o == b))
                        .count();
                    hits as f64 / runs.len() as f64
                });
                SolverSummary {
                    name: name.clone(),
                    mean_breaks: mean(&breaks),
                    mean_time_secs: mean(&times).unwrap_or(0.0),
                    optimal_fraction,
                    failures: per.iter().filter(|r| r.breaks.is_none()).count()
                        + (runs.len() - per.len()),
                }
            })
            .collect();
        rows.push(ResultRow {
            teams,
            instances: cfg.instances_per_size,
            lower_bound: lower_bound(cfg.kind, teams),
            optimum_mean: if have_oracle { mean(&optima) } else { None },
            solvers,
        });
    }
    Ok(Table { rows, failures })
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map(|x| format!("{x:.prec$}")).unwrap_or_default()
}

impl Table<ResultRow> {
    /// CSV with one row per size. `with_timing = false` drops the wall-clock
    /// columns and the note, leaving only seed-determined values.
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::from("teams,instances,lower_bound,optimum");
        if let Some(first) = self.rows.first() {
            for s in &first.solvers {
                let _ = write!(out, ",{0}_breaks,{0}_optimal,{0}_failures", s.name);
                if with_timing {
                    let _ = write!(out, ",{}_time_s", s.name);
                }
            }
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{}",
                r.teams,
                r.instances,
                r.lower_bound,
                fmt_opt(r.optimum_mean, 1)
            );
            for s in &r.solvers {
                let _ = write!(
                    out,
                    ",{},{},{}",
                    fmt_opt(s.mean_breaks, 1),
                    fmt_opt(s.optimal_fraction, 1),
                    s.failures
                );
                if with_timing {
                    let _ = write!(out, ",{:.6}", s.mean_time_secs);
                }
            }
            out.push('\n');
        }
        if with_timing {
            out.push_str(TIMING_NOTE);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChaseRow {
    pub teams: usize,
    pub instances: usize,
    pub reference_breaks: Option<f64>,
    /// Mean over instances where the target was reached.
    pub mean_time_to_target: Option<f64>,
    pub reached: usize,
}

/// For every instance, runs `reference` once and then measures how long
/// `chaser` takes to match its energy, up to `cfg.budget` per instance.
pub fn run_experiment2(
    cfg: &ExperimentConfig,
    reference: &Solver,
    chaser: &Solver,
) -> Result<Table<ChaseRow>> {
    cfg.validate_common()?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &teams in &cfg.team_sizes {
        let results: Vec<std::result::Result<(usize, Option<f64>), String>> = (0..cfg
            .instances_per_size)
            .into_par_iter()
            .map(|i| {
                let go = || -> Result<(usize, Option<f64>)> {
                    let tt = cfg.instance(teams, i)?;
                    let (q, vm) = build_qubo(&tt)?;
                    let seed =
                        derive_seed(cfg.master_seed, &[TAG_SOLVER, teams as u64, i as u64, 0]);
                    let set = reference.sample(&q, seed)?;
                    let best = set.best().ok_or_else(|| {
                        Error::InvalidConfig("reference returned no samples".into())
                    })?;
                    let target = recount_breaks(&q, &vm, &best.state)?;
                    let chase_seed =
                        derive_seed(cfg.master_seed, &[TAG_CHASER, teams as u64, i as u64]);
                    let ttt = time_to_target(&q, target as f64, chaser, cfg.budget, chase_seed)?;
                    Ok((target, ttt.reached.then_some(ttt.elapsed.as_secs_f64())))
                };
                go().map_err(|e| e.to_string())
            })
            .collect();
        let mut targets = Vec::new();
        let mut times = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok((target, t)) => {
                    targets.push(target as f64);
                    times.extend(t);
                }
                Err(e) => failures.push(format!("teams={teams}, instance={i}: {e}")),
            }
        }
        rows.push(ChaseRow {
            teams,
            instances: cfg.instances_per_size,
            reference_breaks: mean(&targets),
            mean_time_to_target: mean(&times),
            reached: times.len(),
        });
    }
    Ok(Table { rows, failures })
}

impl Table<ChaseRow> {
    pub fn to_csv(&self, with_timing: bool) -> String {
        let mut out = String::from("teams,instances,reference_breaks,reached");
        if with_timing {
            out.push_str(",mean_time_to_target_s");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{}",
                r.teams,
                r.instances,
                fmt_opt(r.reference_breaks, 1),
                r.reached
            );
            if with_timing {
                let _ = write!(out, ",{}", fmt_opt(r.mean_time_to_target, 6));
            }
            out.push('\n');
        }
        if with_timing {
            out.push_str(TIMING_NOTE);
            out.push('\n');
        }
        out
    }
}

/// `(nodes, edges, Some((qubits, longest chain)) if embedded)`.
type SurveyCell = (usize, usize, Option<(usize, usize)>);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub teams: usize,
    pub kind: Kind,
    pub nodes: usize,
    /// Mean source edge count over instances.
    pub edges: f64,
    /// Mean qubits over successful embeddings.
    pub qubits: Option<f64>,
    pub qubits_per_node: Option<f64>,
    pub max_chain_length: Option<usize>,
    pub embedded: usize,
    pub attempts: usize,
}

/// Embeds the source graph of every instance into `hw` and reports node,
/// edge and qubit counts per size. Unembeddable instances are counted, not
/// treated as errors.
pub fn run_embedding_survey(
    cfg: &ExperimentConfig,
    hw: &HardwareGraph,
    params: &EmbedParams,
) -> Result<Table<SurveyRow>> {
    cfg.validate_common()?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &teams in &cfg.team_sizes {
        let results: Vec<std::result::Result<SurveyCell, String>> = (0..cfg.instances_per_size)
            .into_par_iter()
            .map(|i| {
                let go = || -> Result<SurveyCell> {
                    let (q, _) = build_qubo(&cfg.instance(teams, i)?)?;
                    let src = source_graph(&q);
                    let seed = derive_seed(cfg.master_seed, &[TAG_EMBED, teams as u64, i as u64]);
                    let emb = find_embedding_with(&src, hw, seed, params);
                    let stats = emb.map(|e| {
                        let s = embedding_stats(&src, &e);
                        (s.qubits_used, s.max_chain_length)
                    });
                    Ok((src.num_nodes, src.num_edges(), stats))
                };
                go().map_err(|e| e.to_string())
            })
            .collect();
        let mut nodes = 0;
        let mut edges = Vec::new();
        let mut qubits = Vec::new();
        let mut max_chain: Option<usize> = None;
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok((n, e, s)) => {
                    nodes = n;
                    edges.push(e as f64);
                    if let Some((used, chain)) = s {
                        qubits.push(used as f64);
                        max_chain = Some(max_chain.map_or(chain, |m| m.max(chain)));
                    }
                }
                Err(e) => failures.push(format!("teams={teams}, instance={i}: {e}")),
            }
        }
        let mean_qubits = mean(&qubits);
        rows.push(SurveyRow {
            teams,
            kind: cfg.kind,
            nodes,
            edges: mean(&edges).unwrap_or(0.0),
            qubits: mean_qubits,
            qubits_per_node: mean_qubits.map(|q| q / nodes as f64),
            max_chain_length: max_chain,
            embedded: qubits.len(),
            attempts: cfg.instances_per_size,
        });
    }
    Ok(Table { rows, failures })
}

impl Table<SurveyRow> {
    /// `Teams,Nodes,Edges,Qubits,Qubits/Nodes` followed by the embedding
    /// success count.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("Teams,Nodes,Edges,Qubits,Qubits/Nodes,MaxChain,Embedded\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.1},{},{},{},{}/{}",
                r.teams,
                r.nodes,
                r.edges,
                fmt_opt(r.qubits, 1),
                fmt_opt(r.qubits_per_node, 6),
                r.max_chain_length
                    .map(|m| m.to_string())
                    .unwrap_or_default(),
                r.embedded,
                r.attempts
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::pegasus_graph;
    use crate::solver::AnnealConfig;

    fn small_cfg() -> ExperimentConfig {
        ExperimentConfig {
            team_sizes: vec![4],
            solvers: vec![
                Solver::Annealing(AnnealConfig {
                    reads: 100,
                    ..Default::default()
                }),
                Solver::LocalSearch { restarts: 20 },
            ],
            master_seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn config_validation() {
        let mut cfg = small_cfg();
        cfg.solvers.clear();
        assert!(matches!(
            run_experiment1(&cfg),
            Err(Error::InvalidConfig(_))
        ));
        let cfg = ExperimentConfig {
            team_sizes: vec![5],
            ..small_cfg()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            instances_per_size: 0,
            ..small_cfg()
        };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            budget: Duration::ZERO,
            ..small_cfg()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn four_team_rows() {
        let table = run_experiment1(&small_cfg()).unwrap();
        assert!(table.failures.is_empty(), "{:?}", table.failures);
        let row = &table.rows[0];
        assert_eq!(row.optimum_mean, Some(6.0));
        assert_eq!(row.lower_bound, 6);
        for s in &row.solvers {
            assert_eq!(s.mean_breaks, Some(6.0));
            assert_eq!(s.optimal_fraction, Some(1.0));
        }
        let csv = table.to_csv(false);
        assert_eq!(
            csv,
            "teams,instances,lower_bound,optimum,sa_breaks,sa_optimal,sa_failures,local_breaks,local_optimal,local_failures\n\
             4,5,6,6.0,6.0,1.0,0,6.0,1.0,0\n"
        );
        assert!(table.to_csv(true).ends_with(&format!("{TIMING_NOTE}\n")));
    }

    #[test]
    fn duplicate_solver_names_are_disambiguated() {
        let names = solver_names(&[
            Solver::Exhaustive,
            Solver::LocalSearch { restarts: 1 },
            Solver::LocalSearch { restarts: 2 },
        ]);
        assert_eq!(names, vec!["exhaustive", "local2", "local3"]);
    }

    #[test]
    fn chase_same_solver() {
        let cfg = ExperimentConfig {
            team_sizes: vec![4, 6],
            budget: Duration::from_secs(20),
            ..small_cfg()
        };
        let table = run_experiment2(
            &cfg,
            &Solver::Exhaustive,
            &Solver::LocalSearch { restarts: 1 },
        )
        .unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[0].reached, 5);
        assert!(table
            .to_csv(false)
            .starts_with("teams,instances,reference_breaks,reached\n4,5,6.0,5\n"));
    }

    #[test]
    fn survey_small_sizes() {
        let cfg = ExperimentConfig {
            team_sizes: vec![4, 6],
            instances_per_size: 2,
            ..small_cfg()
        };
        let hw = pegasus_graph(4).unwrap();
        let table = run_embedding_survey(&cfg, &hw, &EmbedParams::default()).unwrap();
        assert_eq!(table.rows[0].nodes, 6);
        assert_eq!(table.rows[0].edges, 12.0);
        assert_eq!(table.rows[1].nodes, 15);
        assert_eq!(table.rows[1].edges, 30.0);
        assert_eq!(table.rows[0].embedded, 2);
        assert!(table
            .to_csv()
            .starts_with("Teams,Nodes,Edges,Qubits,Qubits/Nodes,MaxChain,Embedded\n4,6,12.0,"));
    }
}
