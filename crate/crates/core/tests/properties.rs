//! Property tests against brute-force oracles.

use proptest::prelude::*;

use rrbreak::qubo::{
    build_qubo, decode, qubo_from_json, qubo_from_text, qubo_to_ising, qubo_to_json, qubo_to_text,
};
use rrbreak::schedule::{count_breaks, random_drrt, random_mdrrt, validate, validate_assignment};
use rrbreak::solver::{exhaustive_solve, local_search};
use rrbreak::{IsingModel, Kind, Qubo, Timetable};

fn timetable(kind: Kind, teams: usize, seed: u64) -> Timetable {
    match kind {
        Kind::Mdrrt => random_mdrrt(teams, seed).unwrap(),
        _ => random_drrt(teams, seed).unwrap(),
    }
}

fn kind_strategy() -> impl Strategy<Value = Kind> {
    prop_oneof![Just(Kind::Mdrrt), Just(Kind::Drrt)]
}

/// Independent break count: walk each team's venue sequence.
fn oracle_breaks(rows: &[Vec<u8>]) -> usize {
    let mut total = 0;
    for row in rows {
        for s in 1..row.len() {
            if row[s] == row[s - 1] {
                total += 1;
            }
        }
    }
    total
}

fn small_qubo() -> impl Strategy<Value = Qubo> {
    (1usize..=8).prop_flat_map(|n| {
        (
            prop::collection::vec(-5i32..=5, n),
            prop::collection::vec(-5i32..=5, n * (n - 1) / 2),
            -5i32..=5,
        )
            .prop_map(move |(lin, quad, off)| {
                let mut q = Qubo::new(n);
                q.add_offset(off as f64);
                for (i, v) in lin.into_iter().enumerate() {
                    q.add_linear(i, v as f64);
                }
                let mut it = quad.into_iter();
                for i in 0..n {
                    for j in i + 1..n {
                        let v = it.next().unwrap();
                        if v != 0 {
                            q.add_quadratic(i, j, v as f64);
                        }
                    }
                }
                q
            })
    })
}

fn all_states(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |c| (0..n).map(|b| c >> b & 1 == 1).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_timetables_validate(kind in kind_strategy(), half in 2usize..=10, seed: u64) {
        let tt = timetable(kind, 2 * half, seed);
        prop_assert!(validate(&tt).is_ok());
        prop_assert_eq!(tt.num_slots(), 2 * (2 * half - 1));
    }

    #[test]
    fn energy_equals_breaks(kind in kind_strategy(), half in 2usize..=6, seed: u64, bits: u64) {
        let tt = timetable(kind, 2 * half, seed);
        let (q, vm) = build_qubo(&tt).unwrap();
        let z: Vec<bool> = (0..q.num_vars()).map(|i| bits.rotate_left(i as u32) & 1 == 1).collect();
        let ha = decode(&z, &vm).unwrap();
        prop_assert!(validate_assignment(&ha).is_ok());
        let breaks = count_breaks(&ha);
        prop_assert_eq!(breaks, oracle_breaks(&ha.to_rows()));
        prop_assert_eq!(q.energy(&z).unwrap(), breaks as f64);
        prop_assert_eq!(vm.encode(&ha).unwrap(), z);
    }

    #[test]
    fn complement_preserves_breaks(kind in kind_strategy(), half in 2usize..=6, seed: u64, bits: u64) {
        let tt = timetable(kind, 2 * half, seed);
        let (q, _) = build_qubo(&tt).unwrap();
        let z: Vec<bool> = (0..q.num_vars()).map(|i| bits >> (i % 64) & 1 == 1).collect();
        let flipped: Vec<bool> = z.iter().map(|b| !b).collect();
        prop_assert_eq!(q.energy(&z).unwrap(), q.energy(&flipped).unwrap());
    }

    #[test]
    fn ising_agrees_on_every_state(q in small_qubo()) {
        let ising = qubo_to_ising(&q);
        for x in all_states(q.num_vars()) {
            let s = IsingModel::spins_from_bits(&x);
            prop_assert!((q.energy(&x).unwrap() - ising.energy(&s).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn exhaustive_matches_enumeration(q in small_qubo()) {
        let res = exhaustive_solve(&q).unwrap();
        let energies: Vec<f64> = all_states(q.num_vars()).map(|x| q.energy(&x).unwrap()).collect();
        let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(res.best_energy, min);
        prop_assert_eq!(res.num_optimal as usize, energies.iter().filter(|&&e| e == min).count());
        for s in &res.best_states {
            prop_assert_eq!(q.energy(s).unwrap(), min);
        }
    }

    #[test]
    fn local_search_ends_in_a_local_minimum(q in small_qubo(), bits: u8) {
        let start: Vec<bool> = (0..q.num_vars()).map(|i| bits >> i & 1 == 1).collect();
        let (x, e) = local_search(&q, &start).unwrap();
        prop_assert!(e <= q.energy(&start).unwrap());
        for i in 0..x.len() {
            let mut y = x.clone();
            y[i] = !y[i];
            prop_assert!(q.energy(&y).unwrap() >= e);
        }
    }

    #[test]
    fn qubo_files_round_trip(q in small_qubo()) {
        let from_json = qubo_from_json(&qubo_to_json(&q).unwrap()).unwrap();
        let from_text = qubo_from_text(&qubo_to_text(&q)).unwrap();
        for x in all_states(q.num_vars()) {
            let e = q.energy(&x).unwrap();
            prop_assert_eq!(from_json.energy(&x).unwrap(), e);
            prop_assert_eq!(from_text.energy(&x).unwrap(), e);
        }
    }
}
