//! Round-robin timetables and home/away assignments.
//!
//! A [`Timetable`] stores the opponent of every team in every slot. For
//! `2n` teams a single round robin has `2n - 1` slots; double and mirrored
//! double round robins have twice as many. An [`HaAssignment`] adds one
//! home/away bit per (team, slot) cell.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::ValidationReport;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    /// Single round robin: every pair meets once.
    #[serde(rename = "RRT")]
    Rrt,
    /// Double round robin: every pair meets twice.
    #[serde(rename = "DRRT")]
    Drrt,
    /// Double round robin whose second half repeats the first.
    #[serde(rename = "MDRRT")]
    Mdrrt,
}

impl Kind {
    pub fn num_slots(self, num_teams: usize) -> usize {
        let half = num_teams.saturating_sub(1);
        match self {
            Kind::Rrt => half,
            Kind::Drrt | Kind::Mdrrt => 2 * half,
        }
    }

    pub fn meetings_per_pair(self) -> usize {
        match self {
            Kind::Rrt => 1,
            Kind::Drrt | Kind::Mdrrt => 2,
        }
    }

    pub fn is_double(self) -> bool {
        self != Kind::Rrt
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Rrt => "RRT",
            Kind::Drrt => "DRRT",
            Kind::Mdrrt => "MDRRT",
        })
    }
}

impl FromStr for Kind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rrt" => Ok(Kind::Rrt),
            "drrt" => Ok(Kind::Drrt),
            "mdrrt" => Ok(Kind::Mdrrt),
            other => Err(Error::Parse(format!("unknown tournament kind '{other}'"))),
        }
    }
}

fn check_team_count(num_teams: usize) -> Result<()> {
    if num_teams < 4 || num_teams % 2 != 0 {
        return Err(Error::InvalidTeamCount(num_teams));
    }
    Ok(())
}

/// Opponent table `τ(t, s)`, stored row-major by team with 0-based ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Timetable {
    kind: Kind,
    num_teams: usize,
    num_slots: usize,
    opponent: Vec<u16>,
}

impl Timetable {
    /// Builds a timetable from one row of opponents per team (0-based ids).
    ///
    /// Only the shape is checked here; use [`validate`] for the tournament
    /// rules.
    pub fn from_rows(kind: Kind, rows: &[Vec<usize>]) -> Result<Self> {
        let num_teams = rows.len();
        if num_teams < 2 {
            return Err(Error::InvalidTimetable(format!(
                "need at least two teams, got {num_teams}"
            )));
        }
        let num_slots = rows[0].len();
        let mut opponent = Vec::with_capacity(num_teams * num_slots);
        for (t, row) in rows.iter().enumerate() {
            if row.len() != num_slots {
                return Err(Error::InvalidTimetable(format!(
                    "row for team {} has {} slots, expected {num_slots}",
                    t + 1,
                    row.len()
                )));
            }
            for (s, &o) in row.iter().enumerate() {
                if o >= num_teams {
                    return Err(Error::InvalidTimetable(format!(
                        "team {} slot {}: opponent {} out of range",
                        t + 1,
                        s + 1,
                        o + 1
                    )));
                }
                opponent.push(o as u16);
            }
        }
        Ok(Self {
            kind,
            num_teams,
            num_slots,
            opponent,
        })
    }

    /// Same as [`Timetable::from_rows`] with 1-based team ids, as in the
    /// serialized forms.
    pub fn from_rows_one_based(kind: Kind, rows: &[Vec<usize>]) -> Result<Self> {
        let zero: Vec<Vec<usize>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&o| {
                        o.checked_sub(1).ok_or_else(|| {
                            Error::InvalidTimetable("team ids are 1-based".to_string())
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        Self::from_rows(kind, &zero)
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn num_teams(&self) -> usize {
        self.num_teams
    }

    pub fn num_slots(&self) -> usize {
        self.num_slots
    }

    /// `2n - 1`, the length of one round robin.
    pub fn half_len(&self) -> usize {
        self.num_teams - 1
    }

    #[inline]
    pub fn opponent(&self, team: usize, slot: usize) -> usize {
        self.opponent[team * self.num_slots + slot] as usize
    }

    pub fn row(&self, team: usize) -> impl Iterator<Item = usize> + '_ {
        let start = team * self.num_slots;
        self.opponent[start..start + self.num_slots]
            .iter()
            .map(|&o| o as usize)
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        (0..self.num_teams).map(|t| self.row(t).collect()).collect()
    }

    /// Games of one slot as `(lower team, higher team)`, sorted.
    pub fn games_in_slot(&self, slot: usize) -> Vec<(usize, usize)> {
        (0..self.num_teams)
            .filter_map(|t| {
                let o = self.opponent(t, slot);
                (t < o).then_some((t, o))
            })
            .collect()
    }

    /// Slots in which each pair `t < t'` meets, in increasing slot order.
    /// Pairs are listed lexicographically.
    pub fn pair_meetings(&self) -> Vec<((usize, usize), Vec<usize>)> {
        let n = self.num_teams;
        let mut slots = vec![Vec::new(); n * n];
        for t in 0..n {
            for s in 0..self.num_slots {
                let o = self.opponent(t, s);
                if t < o {
                    slots[t * n + o].push(s);
                }
            }
        }
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for t in 0..n {
            for o in t + 1..n {
                out.push(((t, o), std::mem::take(&mut slots[t * n + o])));
            }
        }
        out
    }
}

/// Circle-method ("Kirkman") single round robin.
///
/// The last team is fixed; the others sit on a wheel of size `2n - 1`. In
/// round `r` team `r` meets the fixed team and teams `r + i`, `r - i`
/// (mod `2n - 1`) meet for `i = 1..n-1`.
pub fn kirkman_rrt(num_teams: usize) -> Result<Timetable> {
    check_team_count(num_teams)?;
    let wheel = num_teams - 1;
    let fixed = num_teams - 1;
    let half = num_teams / 2;
    let mut rows = vec![vec![0usize; wheel]; num_teams];
    for r in 0..wheel {
        rows[r][r] = fixed;
        rows[fixed][r] = r;
        for i in 1..half {
            let a = (r + i) % wheel;
            let b = (r + wheel - i) % wheel;
            rows[a][r] = b;
            rows[b][r] = a;
        }
    }
    Timetable::from_rows(Kind::Rrt, &rows)
}

/// Reorders slot columns: slot `s` of the output is slot `order[s]` of the
/// input.
pub fn permute_slots(tt: &Timetable, order: &[usize]) -> Result<Timetable> {
    if order.len() != tt.num_slots {
        return Err(Error::LengthMismatch {
            expected: tt.num_slots,
            found: order.len(),
        });
    }
    let mut seen = vec![false; order.len()];
    for &s in order {
        if s >= order.len() || std::mem::replace(&mut seen[s], true) {
            return Err(Error::InvalidConfig(
                "slot order is not a permutation".to_string(),
            ));
        }
    }
    let rows: Vec<Vec<usize>> = (0..tt.num_teams)
        .map(|t| order.iter().map(|&s| tt.opponent(t, s)).collect())
        .collect();
    Timetable::from_rows(tt.kind, &rows)
}

/// Seeded Fisher–Yates permutation of the slots of a single round robin.
pub fn shuffle_slots(tt: &Timetable, seed: u64) -> Result<Timetable> {
    require_kind(tt, Kind::Rrt)?;
    let order = rng::permutation(tt.num_slots, seed);
    permute_slots(tt, &order)
}

fn require_kind(tt: &Timetable, kind: Kind) -> Result<()> {
    if tt.kind != kind {
        return Err(Error::WrongKind {
            expected: kind.to_string(),
            found: tt.kind.to_string(),
        });
    }
    Ok(())
}

fn require_valid(tt: &Timetable) -> Result<()> {
    let report = validate(tt);
    if !report.ok {
        return Err(Error::InvalidTimetable(report.to_string()));
    }
    Ok(())
}

fn concat(first: &Timetable, second: &Timetable, kind: Kind) -> Result<Timetable> {
    let rows: Vec<Vec<usize>> = (0..first.num_teams)
        .map(|t| first.row(t).chain(second.row(t)).collect())
        .collect();
    Timetable::from_rows(kind, &rows)
}

/// Concatenates a single round robin with itself, giving a mirrored double
/// round robin.
pub fn mirror(tt: &Timetable) -> Result<Timetable> {
    require_kind(tt, Kind::Rrt)?;
    require_valid(tt)?;
    concat(tt, tt, Kind::Mdrrt)
}

/// Kirkman base, seeded slot shuffle, mirror.
pub fn random_mdrrt(num_teams: usize, seed: u64) -> Result<Timetable> {
    mirror(&shuffle_slots(&kirkman_rrt(num_teams)?, seed)?)
}

/// Two independently shuffled copies of the Kirkman round robin, using
/// `seed` for the first half and `seed + 1` for the second.
pub fn random_drrt(num_teams: usize, seed: u64) -> Result<Timetable> {
    let base = kirkman_rrt(num_teams)?;
    let first = shuffle_slots(&base, seed)?;
    let second = shuffle_slots(&base, seed.wrapping_add(1))?;
    concat(&first, &second, Kind::Drrt)
}

fn cell(t: usize, s: usize) -> String {
    format!("team {}, slot {}", t + 1, s + 1)
}

/// Checks every rule that applies to the timetable's kind.
pub fn validate(tt: &Timetable) -> ValidationReport {
    let mut report = ValidationReport::new();
    let n = tt.num_teams;
    if n < 4 || n % 2 != 0 {
        report.push("team-count", format!("{n} teams"));
    }
    let expected_slots = tt.kind.num_slots(n);
    if tt.num_slots != expected_slots {
        report.push(
            "slot-count",
            format!("{} slots, expected {expected_slots}", tt.num_slots),
        );
    }
    for t in 0..n {
        for s in 0..tt.num_slots {
            let o = tt.opponent(t, s);
            if o == t {
                report.push("self-play", cell(t, s));
            } else if tt.opponent(o, s) != t {
                report.push("involution", cell(t, s));
            }
        }
    }

    let expected = tt.kind.meetings_per_pair();
    let mut counts = vec![0usize; n * n];
    for t in 0..n {
        for s in 0..tt.num_slots {
            counts[t * n + tt.opponent(t, s)] += 1;
        }
    }
    for t in 0..n {
        for o in t + 1..n {
            let c = counts[t * n + o];
            if c != expected {
                report.push(
                    "pair-count",
                    format!(
                        "teams {}-{}: {c} meetings, expected {expected}",
                        t + 1,
                        o + 1
                    ),
                );
            }
        }
    }

    if tt.kind == Kind::Mdrrt && tt.num_slots == expected_slots {
        let half = tt.half_len();
        for t in 0..n {
            for s in 0..half {
                if tt.opponent(t, s) != tt.opponent(t, s + half) {
                    report.push("mirror", cell(t, s));
                }
            }
        }
    }
    report
}

/// De Werra's break lower bounds: `2n - 2` for a single round robin and
/// `6n - 6` for a mirrored double round robin, where `2n` is the team count.
/// No bound is known for plain double round robins; returns 0.
pub fn lower_bound(kind: Kind, num_teams: usize) -> usize {
    match kind {
        Kind::Rrt => num_teams.saturating_sub(2),
        Kind::Mdrrt => (3 * num_teams).saturating_sub(6),
        Kind::Drrt => 0,
    }
}

/// Home/away bits `a(t, s)` over a timetable; `true` means team `t` is at home.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaAssignment {
    timetable: Timetable,
    home: Vec<bool>,
}

impl HaAssignment {
    /// `home` is row-major by team, one bit per slot.
    pub fn new(timetable: Timetable, home: Vec<bool>) -> Result<Self> {
        let expected = timetable.num_teams * timetable.num_slots;
        if home.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: home.len(),
            });
        }
        Ok(Self { timetable, home })
    }

    pub fn from_rows(timetable: Timetable, rows: &[Vec<u8>]) -> Result<Self> {
        if rows.len() != timetable.num_teams {
            return Err(Error::LengthMismatch {
                expected: timetable.num_teams,
                found: rows.len(),
            });
        }
        let mut home = Vec::with_capacity(timetable.num_teams * timetable.num_slots);
        for row in rows {
            if row.len() != timetable.num_slots {
                return Err(Error::LengthMismatch {
                    expected: timetable.num_slots,
                    found: row.len(),
                });
            }
            for &b in row {
                match b {
                    0 => home.push(false),
                    1 => home.push(true),
                    v => {
                        return Err(Error::InvalidAssignment(format!(
                            "home bit must be 0 or 1, got {v}"
                        )))
                    }
                }
            }
        }
        Self::new(timetable, home)
    }

    pub fn timetable(&self) -> &Timetable {
        &self.timetable
    }

    #[inline]
    pub fn is_home(&self, team: usize, slot: usize) -> bool {
        self.home[team * self.timetable.num_slots + slot]
    }

    pub fn set_home(&mut self, team: usize, slot: usize, home: bool) {
        let idx = team * self.timetable.num_slots + slot;
        self.home[idx] = home;
    }

    pub fn bits(&self) -> &[bool] {
        &self.home
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        self.home
            .chunks(self.timetable.num_slots)
            .map(|r| r.iter().map(|&b| b as u8).collect())
            .collect()
    }

    pub fn breaks_per_team(&self) -> Vec<usize> {
        self.home
            .chunks(self.timetable.num_slots)
            .map(|row| row.windows(2).filter(|w| w[0] == w[1]).count())
            .collect()
    }
}

/// Number of (team, slot) with two consecutive home or two consecutive away
/// games.
pub fn count_breaks(ha: &HaAssignment) -> usize {
    ha.breaks_per_team().iter().sum()
}

/// Checks that every game has exactly one home team and, for double round
/// robins, that the two meetings of a pair are played at opposite venues.
pub fn validate_assignment(ha: &HaAssignment) -> ValidationReport {
    let tt = &ha.timetable;
    let base = validate(tt);
    if !base.ok {
        let mut report = ValidationReport::new();
        report.push("timetable", base.to_string());
        return report;
    }
    let mut report = ValidationReport::new();
    for t in 0..tt.num_teams {
        for s in 0..tt.num_slots {
            let o = tt.opponent(t, s);
            if t < o && ha.is_home(t, s) == ha.is_home(o, s) {
                report.push("complementarity", cell(t, s));
            }
        }
    }
    if tt.kind.is_double() {
        for ((t, o), slots) in tt.pair_meetings() {
            let (first, second) = (slots[0], slots[1]);
            if ha.is_home(t, first) == ha.is_home(t, second) {
                report.push("venue-swap", cell(t, first));
            }
            if ha.is_home(o, second) != ha.is_home(t, first) {
                report.push("venue-swap-opponent", cell(o, second));
            }
        }
    }
    report
}

/// JSON document for a timetable, optionally carrying a home/away assignment.
///
/// Team ids in `opponents` are 1-based; rows are teams, columns are slots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimetableDoc {
    pub kind: Kind,
    pub num_teams: usize,
    pub opponents: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub home_bits: Option<Vec<Vec<u8>>>,
}

impl TimetableDoc {
    pub fn from_timetable(tt: &Timetable) -> Self {
        Self {
            kind: tt.kind,
            num_teams: tt.num_teams,
            opponents: tt
                .to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|o| o + 1).collect())
                .collect(),
            home_bits: None,
        }
    }

    pub fn from_assignment(ha: &HaAssignment) -> Self {
        Self {
            home_bits: Some(ha.to_rows()),
            ..Self::from_timetable(&ha.timetable)
        }
    }

    pub fn into_parts(self) -> Result<(Timetable, Option<HaAssignment>)> {
        let tt = Timetable::from_rows_one_based(self.kind, &self.opponents)?;
        if tt.num_teams != self.num_teams {
            return Err(Error::InvalidTimetable(format!(
                "num_teams is {} but {} rows were given",
                self.num_teams, tt.num_teams
            )));
        }
        let ha = match self.home_bits {
            Some(bits) => Some(HaAssignment::from_rows(tt.clone(), &bits)?),
            None => None,
        };
        Ok((tt, ha))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn grid_csv<T: fmt::Display>(
    rows: impl Iterator<Item = Vec<T>>,
    num_slots: usize,
) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["team".to_string()];
    header.extend((1..=num_slots).map(|s| s.to_string()));
    w.write_record(&header)?;
    for (t, row) in rows.enumerate() {
        let mut rec = vec![(t + 1).to_string()];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Opponent grid: header `team,1,2,…`, then one row per team with 1-based
/// opponent ids.
pub fn timetable_to_csv(tt: &Timetable) -> Result<String> {
    grid_csv(
        (0..tt.num_teams).map(|t| tt.row(t).map(|o| o + 1).collect::<Vec<_>>()),
        tt.num_slots,
    )
}

/// Home/away grid with the same layout as [`timetable_to_csv`], 1 = home.
pub fn assignment_to_csv(ha: &HaAssignment) -> Result<String> {
    grid_csv(ha.to_rows().into_iter(), ha.timetable.num_slots)
}

fn parse_grid(text: &str) -> Result<Vec<Vec<usize>>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .skip(1)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("'{v}': {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Parses the grid written by [`timetable_to_csv`]. The kind is not part of
/// the CSV form and must be supplied.
pub fn timetable_from_csv(kind: Kind, text: &str) -> Result<Timetable> {
    Timetable::from_rows_one_based(kind, &parse_grid(text)?)
}

pub fn assignment_from_csv(tt: Timetable, text: &str) -> Result<HaAssignment> {
    let rows: Vec<Vec<u8>> = parse_grid(text)?
        .into_iter()
        .map(|r| r.into_iter().map(|v| v.min(255) as u8).collect())
        .collect();
    HaAssignment::from_rows(tt, &rows)
}
