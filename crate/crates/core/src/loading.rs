//! BER-constrained bit loading.
//!
//! Maximize the total number of bits over the grid, subject to each position
//! using an allowed scheme and the bit-weighted average BER
//!
//! ```text
//! P = sum(bits_v * ber_v(gamma_v)) / sum(bits_v)
//! ```
//!
//! staying at or below `p_t`. Silent positions enter neither sum.
//!
//! [`greedy_allocate`] is the production allocator. [`exhaustive_allocate`]
//! enumerates every assignment and is only usable on tiny grids, where it
//! serves as the reference optimum.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::SnrGrid;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::modulation::{active_schemes, ModulationScheme, CATALOG};
use crate::systems::ConstraintGrid;

/// Largest search space [`exhaustive_allocate`] accepts.
pub const EXHAUSTIVE_LIMIT: f64 = 1e7;

const MAX_BITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Allocation {
    pub schemes: Grid<ModulationScheme>,
    pub total_bits: u32,
    pub avg_ber: f64,
}

impl Allocation {
    pub fn positions(&self) -> usize {
        self.schemes.len()
    }
}

/// Allocation granularity: one scheme per resource element, or one scheme
/// for the whole block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Subcarrier,
    Block,
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "subcarrier" => Ok(Self::Subcarrier),
            "block" => Ok(Self::Block),
            _ => Err(Error::Domain(format!(
                "unknown granularity '{s}' (expected subcarrier or block)"
            ))),
        }
    }
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Subcarrier => "subcarrier",
            Self::Block => "block",
        })
    }
}

/// Bit-weighted average BER of `schemes` over `snr`. An all-silent grid
/// returns 0.
///
/// Panics if the grids differ in shape.
pub fn evaluate_avg_ber(schemes: &Grid<ModulationScheme>, snr: &SnrGrid) -> f64 {
    assert!(
        schemes.same_shape(snr.grid()),
        "scheme and SNR grids differ in shape"
    );
    weighted_average(
        schemes
            .iter()
            .zip(snr.grid().iter())
            .filter(|(s, _)| !s.is_silent())
            .map(|(s, &g)| (s.bits(), s.ber_unchecked(g))),
    )
}

/// `sum(b * p) / sum(b)` accumulated in iteration order.
/// First single-position change to an allowed scheme with more bits that
/// keeps the average BER at or below `p_t`; `None` means locally maximal.
pub fn feasible_upgrade(
    schemes: &Grid<ModulationScheme>,
    snr: &SnrGrid,
    constraints: &ConstraintGrid,
    p_t: f64,
) -> Option<((usize, usize), ModulationScheme)> {
    let mut trial = schemes.clone();
    for ((k, l), &cur) in schemes.indexed() {
        for &up in constraints
            .allowed(k, l)
            .iter()
            .filter(|u| u.bits() > cur.bits())
        {
            *trial.get_mut(k, l) = up;
            if evaluate_avg_ber(&trial, snr) <= p_t {
                return Some(((k, l), up));
            }
        }
        *trial.get_mut(k, l) = cur;
    }
    None
}

/// True when every position holds an allowed scheme and the average BER
/// meets `p_t`.
pub fn is_feasible(
    schemes: &Grid<ModulationScheme>,
    snr: &SnrGrid,
    constraints: &ConstraintGrid,
    p_t: f64,
) -> bool {
    schemes
        .indexed()
        .all(|((k, l), s)| constraints.allowed(k, l).contains(s))
        && evaluate_avg_ber(schemes, snr) <= p_t
}

fn weighted_average(terms: impl Iterator<Item = (u32, f64)>) -> f64 {
    let mut weighted = 0.0;
    let mut bits = 0u64;
    for (b, p) in terms {
        weighted += b as f64 * p;
        bits += b as u64;
    }
    if bits == 0 {
        0.0
    } else {
        weighted / bits as f64
    }
}

/// Per-position BER of every catalog scheme, computed once per SNR grid and
/// shared by all allocators run on it.
#[derive(Debug, Clone)]
pub struct BerTable {
    n_f: usize,
    n_t: usize,
    rows: Vec<[f64; CATALOG.len()]>,
}

impl BerTable {
    pub fn new(snr: &SnrGrid) -> Self {
        let rows = snr
            .grid()
            .iter()
            .map(|&g| {
                let mut row = [0.0; CATALOG.len()];
                for s in active_schemes() {
                    row[s.catalog_index()] = s.ber_unchecked(g);
                }
                row
            })
            .collect();
        Self {
            n_f: snr.n_f(),
            n_t: snr.n_t(),
            rows,
        }
    }

    /// BER of `scheme` at position index `pos` (`(l, k)` order). Silent
    /// schemes read as 0.
    pub fn ber(&self, pos: usize, scheme: ModulationScheme) -> f64 {
        self.rows[pos][scheme.catalog_index()]
    }

    pub fn n_f(&self) -> usize {
        self.n_f
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    fn avg(&self, schemes: &[ModulationScheme]) -> f64 {
        weighted_average(
            schemes
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.is_silent())
                .map(|(i, s)| (s.bits(), self.ber(i, *s))),
        )
    }

    fn check_shape(&self, constraints: &ConstraintGrid) -> Result<()> {
        if self.n_f != constraints.n_f() || self.n_t != constraints.n_t() {
            return Err(Error::Config(format!(
                "SNR grid is {}x{} but constraint grid is {}x{}",
                self.n_f,
                self.n_t,
                constraints.n_f(),
                constraints.n_t()
            )));
        }
        Ok(())
    }
}

fn check_target(p_t: f64) -> Result<()> {
    if p_t > 0.0 && p_t < 0.5 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "BER target must lie in (0, 0.5), got {p_t}"
        )))
    }
}

fn finish(table: &BerTable, schemes: Vec<ModulationScheme>) -> Allocation {
    let avg_ber = table.avg(&schemes);
    let total_bits = schemes.iter().map(|s| s.bits()).sum();
    Allocation {
        schemes: Grid::from_cells(table.n_f, table.n_t, schemes).expect("cell count"),
        total_bits,
        avg_ber,
    }
}

fn silent_start(constraints: &ConstraintGrid) -> Vec<ModulationScheme> {
    constraints
        .allowed_grid()
        .indexed()
        .map(|((k, l), _)| constraints.canonical_silent(k, l))
        .collect()
}

pub fn greedy_allocate(
    snr: &SnrGrid,
    constraints: &ConstraintGrid,
    p_t: f64,
) -> Result<Allocation> {
    greedy_with_table(&BerTable::new(snr), constraints, p_t)
}

/// Greedy incremental allocation.
///
/// Starting from an all-silent grid, each step commits the feasible upgrade
/// with the largest bit increase, breaking ties by the smallest resulting
/// average BER, then the smallest `(l, k)` position, then the lower family.
/// Upgrades may jump several orders at once. The loop stops when no single
/// upgrade keeps the average at or below `p_t`.
pub fn greedy_with_table(
    table: &BerTable,
    constraints: &ConstraintGrid,
    p_t: f64,
) -> Result<Allocation> {
    check_target(p_t)?;
    table.check_shape(constraints)?;

    // For each position and bit count, the allowed scheme with the lowest BER.
    // Among equal bit counts it is both the most likely to be feasible and the
    // first under the tie-break order; sets are sorted, so strict `<` keeps
    // the lower family on exact ties.
    let options: Vec<[Option<(ModulationScheme, f64)>; MAX_BITS + 1]> = constraints
        .allowed_grid()
        .iter()
        .enumerate()
        .map(|(pos, set)| {
            let mut best = [None; MAX_BITS + 1];
            for &s in set.iter().filter(|s| !s.is_silent()) {
                let p = table.ber(pos, s);
                let slot: &mut Option<(ModulationScheme, f64)> = &mut best[s.bits() as usize];
                if slot.is_none_or(|(_, q)| p < q) {
                    *slot = Some((s, p));
                }
            }
            best
        })
        .collect();

    let mut current = silent_start(constraints);
    let mut bits = vec![0u32; current.len()];
    let mut ber = vec![0.0f64; current.len()];

    loop {
        let (weighted, total) = bits
            .iter()
            .zip(&ber)
            .filter(|(b, _)| **b > 0)
            .fold((0.0, 0u64), |(w, t), (&b, &p)| {
                (w + b as f64 * p, t + b as u64)
            });
        // Width of the band in which the incremental average is re-checked
        // against a full recomputation.
        let slack = 1e-9 * p_t + 1e-14 * (weighted + MAX_BITS as f64);

        let mut best: Option<(u32, f64, usize, ModulationScheme, f64)> = None;
        for pos in 0..current.len() {
            let cur = bits[pos];
            for (new_bits, option) in options[pos].iter().enumerate().skip(cur as usize + 1) {
                let Some((scheme, p)) = *option else {
                    continue;
                };
                let gain = new_bits as u32 - cur;
                if best.is_some_and(|b| gain < b.0) {
                    continue;
                }
                let n_total = total - cur as u64 + new_bits as u64;
                let mut avg =
                    (weighted - cur as f64 * ber[pos] + new_bits as f64 * p) / n_total as f64;
                if (avg - p_t).abs() <= slack {
                    let saved = current[pos];
                    current[pos] = scheme;
                    avg = table.avg(&current);
                    current[pos] = saved;
                }
                if avg > p_t {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((g, a, ..)) => gain > g || (gain == g && avg < a),
                };
                if better {
                    best = Some((gain, avg, pos, scheme, p));
                }
            }
        }

        let Some((_, _, pos, scheme, p)) = best else {
            break;
        };
        current[pos] = scheme;
        bits[pos] = scheme.bits();
        ber[pos] = p;
    }

    let alloc = finish(table, current);
    debug_assert!(alloc.avg_ber <= p_t);
    Ok(alloc)
}

/// Reference optimum by enumeration of every assignment.
///
/// Returns the feasible assignment with the most bits, breaking ties by the
/// smallest average BER and then by the lexicographically smallest scheme
/// grid in `(l, k)` order. Silent entries at a position are merged into the
/// canonical one since they are indistinguishable.
pub fn exhaustive_allocate(
    snr: &SnrGrid,
    constraints: &ConstraintGrid,
    p_t: f64,
) -> Result<Allocation> {
    check_target(p_t)?;
    let size = constraints.search_space_size();
    if size > EXHAUSTIVE_LIMIT {
        return Err(Error::SearchSpace {
            size,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let table = BerTable::new(snr);
    table.check_shape(constraints)?;

    let choices: Vec<Vec<ModulationScheme>> = constraints
        .allowed_grid()
        .indexed()
        .map(|((k, l), set)| {
            let silent = constraints.canonical_silent(k, l);
            set.iter()
                .copied()
                .filter(|s| !s.is_silent() || *s == silent)
                .collect()
        })
        .collect();

    let mut digits = vec![0usize; choices.len()];
    let mut assignment: Vec<ModulationScheme> = choices.iter().map(|c| c[0]).collect();
    let mut best: Option<(u32, f64, Vec<ModulationScheme>)> = None;
    loop {
        let avg = table.avg(&assignment);
        if avg <= p_t {
            let bits: u32 = assignment.iter().map(|s| s.bits()).sum();
            // Enumeration runs in lexicographic order, so the first of any
            // exact tie is kept.
            let better = match &best {
                None => true,
                Some((b, a, _)) => bits > *b || (bits == *b && avg < *a),
            };
            if better {
                best = Some((bits, avg, assignment.clone()));
            }
        }
        // odometer, last position fastest
        let mut i = choices.len();
        loop {
            if i == 0 {
                let (_, _, schemes) = best.expect("the all-silent assignment is feasible");
                return Ok(finish(&table, schemes));
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < choices[i].len() {
                assignment[i] = choices[i][digits[i]];
                break;
            }
            digits[i] = 0;
            assignment[i] = choices[i][0];
        }
    }
}

pub fn block_allocate(snr: &SnrGrid, constraints: &ConstraintGrid, p_t: f64) -> Result<Allocation> {
    block_with_table(&BerTable::new(snr), constraints, p_t)
}

/// One scheme for the whole block: every position that allows the chosen
/// scheme uses it, the rest stay silent. The scheme maximizing total bits
/// under the BER target wins; ties go to the smaller average BER, then to
/// catalog order.
pub fn block_with_table(
    table: &BerTable,
    constraints: &ConstraintGrid,
    p_t: f64,
) -> Result<Allocation> {
    check_target(p_t)?;
    table.check_shape(constraints)?;
    let silent = silent_start(constraints);
    let mut best: Option<(u32, f64, Vec<ModulationScheme>)> = None;
    for scheme in active_schemes() {
        let assignment: Vec<ModulationScheme> = constraints
            .allowed_grid()
            .iter()
            .zip(&silent)
            .map(|(set, &quiet)| if set.contains(&scheme) { scheme } else { quiet })
            .collect();
        let bits: u32 = assignment.iter().map(|s| s.bits()).sum();
        if bits == 0 {
            continue;
        }
        let avg = table.avg(&assignment);
        if avg > p_t {
            continue;
        }
        let better = match &best {
            None => true,
            Some((b, a, _)) => bits > *b || (bits == *b && avg < *a),
        };
        if better {
            best = Some((bits, avg, assignment));
        }
    }
    Ok(finish(table, best.map_or(silent, |(_, _, a)| a)))
}

pub fn allocate_with_table(
    table: &BerTable,
    constraints: &ConstraintGrid,
    p_t: f64,
    granularity: Granularity,
) -> Result<Allocation> {
    match granularity {
        Granularity::Subcarrier => greedy_with_table(table, constraints, p_t),
        Granularity::Block => block_with_table(table, constraints, p_t),
    }
}

/// A self-contained loading problem, stored as JSON for regression fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub snr: SnrGrid,
    pub constraints: ConstraintGrid,
    pub p_t: f64,
}

impl Instance {
    pub fn new(snr: SnrGrid, constraints: ConstraintGrid, p_t: f64) -> Result<Self> {
        let inst = Self {
            snr,
            constraints,
            p_t,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        check_target(self.p_t)?;
        if self.snr.n_f() != self.constraints.n_f() || self.snr.n_t() != self.constraints.n_t() {
            return Err(Error::Config("instance grids differ in shape".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }
}
