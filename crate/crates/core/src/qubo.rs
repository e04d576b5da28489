//! Break minimization as an unconstrained binary quadratic model.
//!
//! Each pair of teams `t < t'` meets twice in a double round robin, in slots
//! `s < s'`. The four cells `(t,s)`, `(t',s)`, `(t,s')`, `(t',s')` are tied
//! together by the venue rules, so one binary `z_k` decides all of them:
//!
//! ```text
//! y(t,s) = z_k    y(t',s) = 1 - z_k    y(t,s') = 1 - z_k    y(t',s') = z_k
//! ```
//!
//! A break between two consecutive cells of one team then only depends on
//! the two pair variables involved and on whether each cell is a direct or a
//! complemented copy of its variable.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::{self, HaAssignment, Timetable};

/// Quadratic model `offset + Σ linear_i x_i + Σ_{i<j} quadratic_ij x_i x_j`
/// over `x ∈ {0,1}^num_vars`.
#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    num_vars: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl Qubo {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            linear: vec![0.0; num_vars],
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.linear[i]
    }

    pub fn linear_coefficients(&self) -> &[f64] {
        &self.linear
    }

    /// Coefficient of `x_i x_j`, order-insensitive. `i == j` reads the linear
    /// term since `x_i² = x_i`.
    pub fn quadratic(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.linear[i];
        }
        let key = (i.min(j), i.max(j));
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    /// Nonzero linear terms in index order.
    pub fn linear_terms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.linear
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i, v))
    }

    /// Quadratic terms with `i < j`, sorted.
    pub fn quadratic_terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.quadratic.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn num_interactions(&self) -> usize {
        self.quadratic.len()
    }

    pub fn add_offset(&mut self, v: f64) {
        self.offset += v;
    }

    pub fn add_linear(&mut self, i: usize, v: f64) {
        assert!(i < self.num_vars, "variable {i} out of range");
        self.linear[i] += v;
    }

    /// Adds `v · x_i x_j`; a diagonal term folds into the linear part.
    pub fn add_quadratic(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            i < self.num_vars && j < self.num_vars,
            "variable pair ({i}, {j}) out of range"
        );
        if i == j {
            self.linear[i] += v;
        } else {
            *self.quadratic.entry((i.min(j), i.max(j))).or_insert(0.0) += v;
        }
    }

    /// Drops quadratic entries whose accumulated value is zero, and zeroes
    /// linear entries below the same threshold.
    pub fn prune(&mut self, eps: f64) {
        self.quadratic.retain(|_, v| v.abs() > eps);
        for v in &mut self.linear {
            if v.abs() <= eps {
                *v = 0.0;
            }
        }
    }

    pub fn energy(&self, x: &[bool]) -> Result<f64> {
        if x.len() != self.num_vars {
            return Err(Error::LengthMismatch {
                expected: self.num_vars,
                found: x.len(),
            });
        }
        let mut e = self.offset;
        for (i, &b) in x.iter().enumerate() {
            if b {
                e += self.linear[i];
            }
        }
        for (&(i, j), &v) in &self.quadratic {
            if x[i] && x[j] {
                e += v;
            }
        }
        Ok(e)
    }

    /// True if every coefficient, including the offset, is an integer.
    pub fn is_integral(&self) -> bool {
        let int = |v: f64| v.fract() == 0.0;
        int(self.offset)
            && self.linear.iter().all(|&v| int(v))
            && self.quadratic.values().all(|&v| int(v))
    }
}

/// Ising model `offset + Σ h_i s_i + Σ_{i<j} J_ij s_i s_j`, `s ∈ {-1,+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    pub num_spins: usize,
    pub biases: Vec<f64>,
    pub couplings: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
}

impl IsingModel {
    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.num_spins {
            return Err(Error::LengthMismatch {
                expected: self.num_spins,
                found: spins.len(),
            });
        }
        let mut e = self.offset;
        for (h, &s) in self.biases.iter().zip(spins) {
            e += h * s as f64;
        }
        for (&(i, j), &v) in &self.couplings {
            e += v * (spins[i] as f64) * (spins[j] as f64);
        }
        Ok(e)
    }

    /// Spin assignment `s = 2x - 1`.
    pub fn spins_from_bits(x: &[bool]) -> Vec<i8> {
        x.iter().map(|&b| if b { 1 } else { -1 }).collect()
    }
}

/// Substitutes `x_i = (s_i + 1) / 2`.
///
/// `a x_i` becomes `a/2 s_i + a/2`; `b x_i x_j` becomes
/// `b/4 (s_i s_j + s_i + s_j + 1)`.
pub fn qubo_to_ising(q: &Qubo) -> IsingModel {
    let mut biases = vec![0.0; q.num_vars];
    let mut couplings = BTreeMap::new();
    let mut offset = q.offset;
    for (i, &a) in q.linear.iter().enumerate() {
        biases[i] += a / 2.0;
        offset += a / 2.0;
    }
    for (&(i, j), &b) in &q.quadratic {
        let quarter = b / 4.0;
        *couplings.entry((i, j)).or_insert(0.0) += quarter;
        biases[i] += quarter;
        biases[j] += quarter;
        offset += quarter;
    }
    IsingModel {
        num_spins: q.num_vars,
        biases,
        couplings,
        offset,
    }
}

/// Whether a timetable cell is the pair variable itself or its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    /// `y = z`
    Direct,
    /// `y = 1 - z`
    Complement,
}

impl Sign {
    #[inline]
    pub fn apply(self, z: bool) -> bool {
        match self {
            Sign::Direct => z,
            Sign::Complement => !z,
        }
    }
}

/// The two meetings of team pair `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PairIndex {
    pub k: usize,
    pub team: usize,
    pub other: usize,
    pub first_slot: usize,
    pub second_slot: usize,
}

impl PairIndex {
    /// The four cells of the pair, anchor `(team, first_slot)` first.
    pub fn cells(&self) -> [(usize, usize); 4] {
        [
            (self.team, self.first_slot),
            (self.team, self.second_slot),
            (self.other, self.first_slot),
            (self.other, self.second_slot),
        ]
    }
}

/// Maps every timetable cell to one pair variable and a sign.
#[derive(Debug, Clone)]
pub struct VariableMap {
    timetable: Timetable,
    pairs: Vec<PairIndex>,
    cells: Vec<(u32, Sign)>,
}

impl VariableMap {
    pub fn num_vars(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[PairIndex] {
        &self.pairs
    }

    pub fn timetable(&self) -> &Timetable {
        &self.timetable
    }

    #[inline]
    pub fn cell(&self, team: usize, slot: usize) -> (usize, Sign) {
        let (k, sign) = self.cells[team * self.timetable.num_slots() + slot];
        (k as usize, sign)
    }

    /// Reads `z_k = a(t_k, s_k)` from an assignment.
    pub fn encode(&self, ha: &HaAssignment) -> Result<Vec<bool>> {
        if ha.timetable() != &self.timetable {
            return Err(Error::InvalidAssignment(
                "assignment belongs to a different timetable".to_string(),
            ));
        }
        Ok(self
            .pairs
            .iter()
            .map(|p| ha.is_home(p.team, p.first_slot))
            .collect())
    }
}

fn require_double(tt: &Timetable) -> Result<()> {
    if !tt.kind().is_double() {
        return Err(Error::WrongKind {
            expected: "DRRT or MDRRT".to_string(),
            found: tt.kind().to_string(),
        });
    }
    Ok(())
}

/// Pair decomposition of a double round robin, pairs ordered by
/// `(team, other)`.
pub fn build_pairs(tt: &Timetable) -> Result<VariableMap> {
    require_double(tt)?;
    let report = schedule::validate(tt);
    if !report.ok {
        return Err(Error::InvalidTimetable(report.to_string()));
    }
    let mut cells = vec![(u32::MAX, Sign::Direct); tt.num_teams() * tt.num_slots()];
    let mut pairs = Vec::new();
    for (k, ((team, other), slots)) in tt.pair_meetings().into_iter().enumerate() {
        let (first_slot, second_slot) = (slots[0], slots[1]);
        let pair = PairIndex {
            k,
            team,
            other,
            first_slot,
            second_slot,
        };
        let signs = [
            Sign::Direct,
            Sign::Complement,
            Sign::Complement,
            Sign::Direct,
        ];
        for ((t, s), sign) in pair.cells().into_iter().zip(signs) {
            cells[t * tt.num_slots() + s] = (k as u32, sign);
        }
        pairs.push(pair);
    }
    debug_assert!(cells.iter().all(|&(k, _)| k != u32::MAX));
    Ok(VariableMap {
        timetable: tt.clone(),
        pairs,
        cells,
    })
}

/// Builds the break-count model. Its energy at `z` equals the number of
/// breaks of `decode(z)`.
pub fn build_qubo(tt: &Timetable) -> Result<(Qubo, VariableMap)> {
    let vm = build_pairs(tt)?;
    let mut q = Qubo::new(vm.num_vars());
    for t in 0..tt.num_teams() {
        for s in 0..tt.num_slots() - 1 {
            let (k, a) = vm.cell(t, s);
            let (l, b) = vm.cell(t, s + 1);
            if k == l {
                // Back-to-back meetings of one pair always swap venues.
                debug_assert_ne!(a, b);
                continue;
            }
            if a == b {
                // [z_k = z_l] = 1 - z_k - z_l + 2 z_k z_l
                q.add_offset(1.0);
                q.add_linear(k, -1.0);
                q.add_linear(l, -1.0);
                q.add_quadratic(k, l, 2.0);
            } else {
                // [z_k ≠ z_l] = z_k + z_l - 2 z_k z_l
                q.add_linear(k, 1.0);
                q.add_linear(l, 1.0);
                q.add_quadratic(k, l, -2.0);
            }
        }
    }
    q.prune(0.0);
    Ok((q, vm))
}

/// Expands pair variables back to a full home/away assignment.
pub fn decode(z: &[bool], vm: &VariableMap) -> Result<HaAssignment> {
    if z.len() != vm.num_vars() {
        return Err(Error::LengthMismatch {
            expected: vm.num_vars(),
            found: z.len(),
        });
    }
    let home = vm
        .cells
        .iter()
        .map(|&(k, sign)| sign.apply(z[k as usize]))
        .collect();
    HaAssignment::new(vm.timetable.clone(), home)
}

/// Variables as nodes, nonzero interactions as edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceGraph {
    pub num_nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub min_degree: usize,
    pub max_degree: usize,
    pub is_regular: bool,
}

impl SourceGraph {
    pub fn new(num_nodes: usize, edges: Vec<(usize, usize)>) -> Self {
        Self { num_nodes, edges }
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_nodes];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }
}

pub fn source_graph(q: &Qubo) -> SourceGraph {
    SourceGraph::new(
        q.num_vars,
        q.quadratic
            .iter()
            .filter(|(_, &v)| v != 0.0)
            .map(|(&e, _)| e)
            .collect(),
    )
}

pub fn degree_stats(g: &SourceGraph) -> DegreeStats {
    let deg = g.degrees();
    let min_degree = deg.iter().copied().min().unwrap_or(0);
    let max_degree = deg.iter().copied().max().unwrap_or(0);
    DegreeStats {
        min_degree,
        max_degree,
        is_regular: min_degree == max_degree,
    }
}

/// JSON form: `{num_vars, offset, linear: [[i, v]…], quadratic: [[i, j, v]…]}`
/// with 0-based variable indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboDoc {
    pub num_vars: usize,
    pub offset: f64,
    pub linear: Vec<(usize, f64)>,
    pub quadratic: Vec<(usize, usize, f64)>,
}

impl From<&Qubo> for QuboDoc {
    fn from(q: &Qubo) -> Self {
        Self {
            num_vars: q.num_vars,
            offset: q.offset,
            linear: q.linear_terms().collect(),
            quadratic: q.quadratic_terms().collect(),
        }
    }
}

impl TryFrom<QuboDoc> for Qubo {
    type Error = Error;

    fn try_from(doc: QuboDoc) -> Result<Self> {
        let mut q = Qubo::new(doc.num_vars);
        q.add_offset(doc.offset);
        for (i, v) in doc.linear {
            check_index(i, doc.num_vars)?;
            q.add_linear(i, v);
        }
        for (i, j, v) in doc.quadratic {
            check_index(i, doc.num_vars)?;
            check_index(j, doc.num_vars)?;
            q.add_quadratic(i, j, v);
        }
        Ok(q)
    }
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::Parse(format!(
            "variable {i} out of range for {n} variables"
        )));
    }
    Ok(())
}

pub fn qubo_to_json(q: &Qubo) -> Result<String> {
    Ok(serde_json::to_string_pretty(&QuboDoc::from(q))?)
}

pub fn qubo_from_json(text: &str) -> Result<Qubo> {
    serde_json::from_str::<QuboDoc>(text)?.try_into()
}

/// Coordinate text form.
///
/// ```text
/// # num_vars <L> offset <c>
/// <i> <i> <linear_i>
/// <i> <j> <quadratic_ij>
/// ```
///
/// UTF-8, LF line endings, 0-based indices, one term per line, `i = j` for
/// linear terms and `i < j` otherwise. Lines are ordered by `(i, j)`; values
/// use the shortest decimal that round-trips. Blank lines and further
/// `#` lines are ignored on input.
pub fn qubo_to_text(q: &Qubo) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# num_vars {} offset {}", q.num_vars, q.offset);
    let mut quad = q.quadratic.iter().peekable();
    for i in 0..q.num_vars {
        if q.linear[i] != 0.0 {
            let _ = writeln!(out, "{i} {i} {}", q.linear[i]);
        }
        while let Some((&(a, b), &v)) = quad.peek() {
            if a != i {
                break;
            }
            let _ = writeln!(out, "{a} {b} {v}");
            quad.next();
        }
    }
    out
}

pub fn qubo_from_text(text: &str) -> Result<Qubo> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty QUBO file".to_string()))?;
    let fields: Vec<&str> = header.trim_start_matches('#').split_whitespace().collect();
    let (num_vars, offset) = match fields.as_slice() {
        ["num_vars", n, "offset", c] => (
            n.parse::<usize>()
                .map_err(|e| Error::Parse(format!("num_vars: {e}")))?,
            c.parse::<f64>()
                .map_err(|e| Error::Parse(format!("offset: {e}")))?,
        ),
        _ => {
            return Err(Error::Parse(format!(
                "expected '# num_vars <L> offset <c>' header, got '{header}'"
            )))
        }
    };
    let mut q = Qubo::new(num_vars);
    q.add_offset(offset);
    for (lineno, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse(format!("line {}: '{line}'", lineno + 2));
        if parts.len() != 3 {
            return Err(bad());
        }
        let i: usize = parts[0].parse().map_err(|_| bad())?;
        let j: usize = parts[1].parse().map_err(|_| bad())?;
        let v: f64 = parts[2].parse().map_err(|_| bad())?;
        check_index(i, num_vars)?;
        check_index(j, num_vars)?;
        q.add_quadratic(i, j, v);
    }
    Ok(q)
}

/// Convenience for tests and reports: kind-aware break model plus its
/// degree profile.
pub fn profile(tt: &Timetable) -> Result<(Qubo, VariableMap, SourceGraph, DegreeStats)> {
    let (q, vm) = build_qubo(tt)?;
    let g = source_graph(&q);
    let stats = degree_stats(&g);
    Ok((q, vm, g, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Kind;
    use crate::schedule::{count_breaks, random_drrt, random_mdrrt, validate_assignment};

    fn table1() -> Timetable {
        Timetable::from_rows_one_based(
            Kind::Mdrrt,
            &[
                vec![2, 3, 4, 2, 3, 4],
                vec![1, 4, 3, 1, 4, 3],
                vec![4, 1, 2, 4, 1, 2],
                vec![3, 2, 1, 3, 2, 1],
            ],
        )
        .unwrap()
    }

    fn all_states(n: usize) -> impl Iterator<Item = Vec<bool>> {
        (0u64..1 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
    }

    #[test]
    fn table1_pair_decomposition() {
        let vm = build_pairs(&table1()).unwrap();
        assert_eq!(vm.num_vars(), 6);
        let p = vm.pairs()[0];
        assert_eq!((p.team, p.other, p.first_slot, p.second_slot), (0, 1, 0, 3));
        assert_eq!(p.cells(), [(0, 0), (0, 3), (1, 0), (1, 3)]);
        assert_eq!(vm.cell(0, 0), (0, Sign::Direct));
        assert_eq!(vm.cell(1, 0), (0, Sign::Complement));
        assert_eq!(vm.cell(0, 3), (0, Sign::Complement));
        assert_eq!(vm.cell(1, 3), (0, Sign::Direct));
    }

    #[test]
    fn pairs_partition_all_cells() {
        let tt = random_drrt(10, 4).unwrap();
        let vm = build_pairs(&tt).unwrap();
        assert_eq!(vm.num_vars(), 45);
        let mut seen = vec![0; tt.num_teams() * tt.num_slots()];
        for p in vm.pairs() {
            for (t, s) in p.cells() {
                seen[t * tt.num_slots() + s] += 1;
            }
        }
        assert!(seen.iter().all(|&c| c == 1));
        assert_eq!(
            build_pairs(&random_mdrrt(20, 0).unwrap())
                .unwrap()
                .num_vars(),
            190
        );
    }

    #[test]
    fn rrt_is_rejected() {
        let rrt = crate::schedule::kirkman_rrt(4).unwrap();
        assert!(matches!(build_pairs(&rrt), Err(Error::WrongKind { .. })));
        assert!(build_qubo(&rrt).is_err());
    }

    #[test]
    fn four_team_model_shape() {
        let (q, _) = build_qubo(&table1()).unwrap();
        assert_eq!(q.num_vars(), 6);
        assert_eq!(q.num_interactions(), 12);
        assert!(q.is_integral());
    }

    #[test]
    fn table2_energy_is_six() {
        let tt = table1();
        let (q, vm) = build_qubo(&tt).unwrap();
        let ha = HaAssignment::from_rows(
            tt,
            &[
                vec![1, 0, 1, 0, 1, 0],
                vec![0, 0, 1, 1, 1, 0],
                vec![1, 1, 0, 0, 0, 1],
                vec![0, 1, 0, 1, 0, 1],
            ],
        )
        .unwrap();
        let z = vm.encode(&ha).unwrap();
        assert_eq!(decode(&z, &vm).unwrap(), ha);
        assert_eq!(q.energy(&z).unwrap(), 6.0);
    }

    #[test]
    fn exhaustive_energy_matches_breaks_four_teams() {
        for seed in 0..3 {
            let tt = random_mdrrt(4, seed).unwrap();
            let (q, vm) = build_qubo(&tt).unwrap();
            for z in all_states(6) {
                let ha = decode(&z, &vm).unwrap();
                assert!(validate_assignment(&ha).ok);
                assert_eq!(q.energy(&z).unwrap(), count_breaks(&ha) as f64);
                let back = vm.encode(&ha).unwrap();
                assert_eq!(back, z);
            }
        }
    }

    #[test]
    fn drrt_energy_matches_breaks() {
        for seed in 0..4 {
            let tt = random_drrt(4, seed).unwrap();
            let (q, vm) = build_qubo(&tt).unwrap();
            for z in all_states(6) {
                let ha = decode(&z, &vm).unwrap();
                assert_eq!(q.energy(&z).unwrap(), count_breaks(&ha) as f64);
            }
        }
    }

    #[test]
    fn complement_symmetry_small() {
        let (q, _) = build_qubo(&random_mdrrt(4, 9).unwrap()).unwrap();
        for z in all_states(6) {
            let neg: Vec<bool> = z.iter().map(|b| !b).collect();
            assert_eq!(q.energy(&z).unwrap(), q.energy(&neg).unwrap());
        }
    }

    #[test]
    fn decode_length_mismatch() {
        let vm = build_pairs(&table1()).unwrap();
        assert!(matches!(
            decode(&[true; 5], &vm),
            Err(Error::LengthMismatch {
                expected: 6,
                found: 5
            })
        ));
    }

    #[test]
    fn ising_small_cases() {
        let empty = qubo_to_ising(&Qubo::new(3));
        assert!(empty.biases.iter().all(|&h| h == 0.0));
        assert!(empty.couplings.is_empty());
        let mut q = Qubo::new(1);
        q.add_linear(0, 1.0);
        let m = qubo_to_ising(&q);
        assert_eq!(m.biases, vec![0.5]);
        assert_eq!(m.offset, 0.5);
        let mut q = Qubo::new(2);
        q.add_offset(3.0);
        let m = qubo_to_ising(&q);
        assert_eq!(m.offset, 3.0);
    }

    #[test]
    fn source_graph_shapes() {
        let (q, _) = build_qubo(&table1()).unwrap();
        let g = source_graph(&q);
        assert_eq!((g.num_nodes, g.num_edges()), (6, 12));
        let s = degree_stats(&g);
        assert_eq!((s.min_degree, s.max_degree, s.is_regular), (4, 4, true));

        let g = source_graph(&Qubo::new(5));
        assert_eq!(g.num_nodes, 5);
        assert!(g.edges.is_empty());

        let g = SourceGraph::new(3, vec![(0, 1)]);
        let s = degree_stats(&g);
        assert_eq!((s.min_degree, s.max_degree, s.is_regular), (0, 1, false));
    }

    #[test]
    fn forty_eight_teams_source_graph() {
        let (_, _, g, s) = profile(&random_mdrrt(48, 1).unwrap()).unwrap();
        assert_eq!((g.num_nodes, g.num_edges()), (1128, 2256));
        assert!(s.is_regular && s.max_degree == 4);
    }

    #[test]
    fn json_and_text_round_trip() {
        let (q, _) = build_qubo(&random_drrt(6, 2).unwrap()).unwrap();
        assert_eq!(qubo_from_json(&qubo_to_json(&q).unwrap()).unwrap(), q);
        let text = qubo_to_text(&q);
        assert!(text.starts_with(&format!("# num_vars 15 offset {}\n", q.offset())));
        assert!(!text.contains('\r'));
        assert_eq!(qubo_from_text(&text).unwrap(), q);
    }

    #[test]
    fn text_layout_is_fixed() {
        let mut q = Qubo::new(3);
        q.add_offset(2.0);
        q.add_linear(0, -1.0);
        q.add_quadratic(2, 0, 0.5);
        q.add_quadratic(1, 2, 2.0);
        assert_eq!(
            qubo_to_text(&q),
            "# num_vars 3 offset 2\n0 0 -1\n0 2 0.5\n1 2 2\n"
        );
    }

    #[test]
    fn malformed_text_is_rejected() {
        assert!(qubo_from_text("").is_err());
        assert!(qubo_from_text("# offset 1\n").is_err());
        assert!(qubo_from_text("# num_vars 2 offset 0\n0 5 1\n").is_err());
        assert!(qubo_from_text("# num_vars 2 offset 0\n0 1\n").is_err());
    }
}
