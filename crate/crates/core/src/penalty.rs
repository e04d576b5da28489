//! Penalty encoding of the permutation-matrix constraints.
//!
//! An `n × n` binary grid `x_ij` (row-major, index `i·n + j`, 0-based) is a
//! permutation matrix iff every row and every column sums to one. The penalty
//! model is `Σ_i (1 - Σ_j x_ij)² + Σ_j (1 - Σ_i x_ij)²` with a zero objective,
//! so any sampler output is feasible exactly when its energy is zero.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::Qubo;
use crate::solver::{simulated_annealing, AnnealConfig};

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!(
            "permutation dimension must be at least 2, got {n}"
        )));
    }
    Ok(())
}

#[inline]
pub fn var(n: usize, row: usize, col: usize) -> usize {
    row * n + col
}

/// Expansion of the squared row and column violations.
///
/// `(1 - Σ_k x_k)² = 1 - Σ_k x_k + 2 Σ_{k<l} x_k x_l` for binary `x`, so each
/// of the `2n` lines contributes 1 to the offset, -1 to each of its variables
/// and +2 to every pair on it.
pub fn permutation_qubo(n: usize) -> Result<Qubo> {
    check_dim(n)?;
    let mut q = Qubo::new(n * n);
    let lines = (0..n)
        .map(|i| (0..n).map(|j| var(n, i, j)).collect::<Vec<_>>())
        .chain((0..n).map(|j| (0..n).map(|i| var(n, i, j)).collect::<Vec<_>>()));
    for line in lines {
        q.add_offset(1.0);
        for (a, &u) in line.iter().enumerate() {
            q.add_linear(u, -1.0);
            for &v in &line[a + 1..] {
                q.add_quadratic(u, v, 2.0);
            }
        }
    }
    Ok(q)
}

/// Number of rows and columns whose sum differs from one.
pub fn violated_constraints(x: &[bool], n: usize) -> Result<usize> {
    if x.len() != n * n {
        return Err(Error::LengthMismatch {
            expected: n * n,
            found: x.len(),
        });
    }
    let mut rows = vec![0usize; n];
    let mut cols = vec![0usize; n];
    for i in 0..n {
        for j in 0..n {
            if x[var(n, i, j)] {
                rows[i] += 1;
                cols[j] += 1;
            }
        }
    }
    Ok(rows.iter().chain(&cols).filter(|&&c| c != 1).count())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityStats {
    pub n: usize,
    pub reads: usize,
    /// Fraction of reads that are permutation matrices.
    pub per_feasible: f64,
    /// Mean number of violated row/column constraints.
    pub ev_break: f64,
    /// Mean penalty energy.
    pub ev_energy: f64,
}

/// Sampler used by [`feasibility_experiment`] unless overridden.
///
/// Two sweeps from a hot start and no final descent: weak enough that the
/// shrinking feasible fraction `n! / 2^{n²}` shows through as `n` grows.
pub fn weak_sampler(seed: u64) -> AnnealConfig {
    AnnealConfig {
        reads: 1000,
        sweeps: 2,
        beta_start: 0.1,
        beta_end: 1.0,
        seed,
        final_descent: false,
    }
}

/// Samples `reads` states of the penalty model and summarizes feasibility.
pub fn feasibility_experiment(
    n: usize,
    reads: usize,
    cfg: &AnnealConfig,
) -> Result<FeasibilityStats> {
    let q = permutation_qubo(n)?;
    let set = simulated_annealing(&q, &AnnealConfig { reads, ..*cfg })?;
    let mut feasible = 0usize;
    let mut broken = 0usize;
    let mut energy = 0.0;
    for r in &set.records {
        let v = violated_constraints(&r.state, n)?;
        if v == 0 {
            feasible += r.occurrences;
        }
        broken += v * r.occurrences;
        energy += r.energy * r.occurrences as f64;
    }
    let total = set.total_occurrences() as f64;
    Ok(FeasibilityStats {
        n,
        reads,
        per_feasible: feasible as f64 / total,
        ev_break: broken as f64 / total,
        ev_energy: energy / total,
    })
}

/// `n! / 2^{n²}`: the feasible fraction under uniform random states.
pub fn uniform_feasible_fraction(n: usize) -> f64 {
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    fact / 2f64.powi((n * n) as i32)
}

/// Columns `n,per_feasible,ev_break,ev_energy`.
pub fn stats_csv(rows: &[FeasibilityStats]) -> String {
    let mut out = String::from("n,per_feasible,ev_break,ev_energy\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{:.6}",
            r.n, r.per_feasible, r.ev_break, r.ev_energy
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_energies() {
        let q = permutation_qubo(2).unwrap();
        assert_eq!(q.energy(&[true, false, false, true]).unwrap(), 0.0);
        assert_eq!(q.energy(&[false, true, true, false]).unwrap(), 0.0);
        assert_eq!(q.energy(&[false; 4]).unwrap(), 4.0);
        assert!(permutation_qubo(1).is_err());
    }

    #[test]
    fn violation_counts() {
        assert_eq!(
            violated_constraints(&[true, false, false, true], 2).unwrap(),
            0
        );
        assert_eq!(violated_constraints(&[true; 4], 2).unwrap(), 4);
        assert_eq!(
            violated_constraints(&[true, false, false, false], 2).unwrap(),
            2
        );
        assert!(violated_constraints(&[true; 3], 2).is_err());
    }

    #[test]
    fn uniform_fraction_values() {
        assert_eq!(uniform_feasible_fraction(2), 0.125);
        assert!((uniform_feasible_fraction(3) - 6.0 / 512.0).abs() < 1e-15);
    }

    #[test]
    fn strong_schedule_two_by_two_is_nearly_always_feasible() {
        let cfg = AnnealConfig {
            seed: 1,
            ..Default::default()
        };
        let s = feasibility_experiment(2, 1000, &cfg).unwrap();
        assert!(s.per_feasible > 0.99, "{s:?}");
        assert!(s.ev_energy >= 0.0);
    }

    #[test]
    fn stats_are_consistent() {
        let s = feasibility_experiment(4, 300, &weak_sampler(2)).unwrap();
        assert!((0.0..=1.0).contains(&s.per_feasible));
        assert!(s.ev_energy >= 0.0 && s.ev_break >= 0.0);
        if s.per_feasible == 1.0 {
            assert_eq!(s.ev_break, 0.0);
        }
        let csv = stats_csv(&[s]);
        assert!(csv.starts_with("n,per_feasible,ev_break,ev_energy\n4,"));
    }
}
