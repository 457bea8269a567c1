//! Per-position modulation constraints for the evaluated system profiles.
//!
//! A [`ConstraintGrid`] assigns every resource element a role and the set of
//! catalog schemes it may use. Every set contains a silent scheme, so any
//! position may be switched off to meet the BER target.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::modulation::{catalog, ModulationFamily, ModulationScheme};

/// Resource-block size in frequency.
pub const RB_SUBCARRIERS: usize = 12;
/// Resource-block size in time (normal cyclic prefix).
pub const RB_SYMBOLS: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Data,
    Pilot,
    AmplitudeData,
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "data" => Ok(Role::Data),
            "pilot" => Ok(Role::Pilot),
            "amplitude" | "amplitude_data" => Ok(Role::AmplitudeData),
            _ => Err(Error::Domain(format!("unknown role '{s}'"))),
        }
    }
}

/// Every scheme of `family` up to and including `max_order`.
pub fn family_up_to(family: ModulationFamily, max_order: u32) -> Vec<ModulationScheme> {
    family
        .orders()
        .iter()
        .filter(|&&o| o <= max_order)
        .map(|&o| ModulationScheme::new(family, o).expect("catalog order"))
        .collect()
}

pub fn full_set() -> Vec<ModulationScheme> {
    catalog().to_vec()
}

pub fn psk_set() -> Vec<ModulationScheme> {
    family_up_to(ModulationFamily::Psk, 16)
}

pub fn ask_set() -> Vec<ModulationScheme> {
    family_up_to(ModulationFamily::Ask, 8)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawConstraintGrid")]
pub struct ConstraintGrid {
    allowed: Grid<Vec<ModulationScheme>>,
    roles: Grid<Role>,
}

#[derive(Deserialize)]
struct RawConstraintGrid {
    allowed: Grid<Vec<ModulationScheme>>,
    roles: Grid<Role>,
}

impl TryFrom<RawConstraintGrid> for ConstraintGrid {
    type Error = Error;

    fn try_from(raw: RawConstraintGrid) -> Result<Self> {
        ConstraintGrid::new(raw.allowed, raw.roles)
    }
}

impl ConstraintGrid {
    /// Validates and canonicalizes (sorts, dedups) the allowed sets.
    pub fn new(allowed: Grid<Vec<ModulationScheme>>, roles: Grid<Role>) -> Result<Self> {
        if !allowed.same_shape(&roles) {
            return Err(Error::Config(
                "allowed-set and role grids differ in shape".into(),
            ));
        }
        if allowed.is_empty() {
            return Err(Error::Config("constraint grid is empty".into()));
        }
        let allowed = allowed.map(|set| {
            let set: BTreeSet<ModulationScheme> = set.iter().copied().collect();
            set.into_iter().collect::<Vec<_>>()
        });
        for ((k, l), set) in allowed.indexed() {
            check_position(k, l, set, *roles.get(k, l))?;
        }
        Ok(Self { allowed, roles })
    }

    pub fn uniform(n_f: usize, n_t: usize, set: Vec<ModulationScheme>) -> Result<Self> {
        Self::new(
            Grid::filled(n_f, n_t, set),
            Grid::filled(n_f, n_t, Role::Data),
        )
    }

    pub fn n_f(&self) -> usize {
        self.allowed.n_f()
    }

    pub fn n_t(&self) -> usize {
        self.allowed.n_t()
    }

    pub fn len(&self) -> usize {
        self.allowed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allowed.is_empty()
    }

    /// Allowed schemes at `(k, l)`, sorted by `(family, order)`.
    pub fn allowed(&self, k: usize, l: usize) -> &[ModulationScheme] {
        self.allowed.get(k, l)
    }

    pub fn allowed_grid(&self) -> &Grid<Vec<ModulationScheme>> {
        &self.allowed
    }

    pub fn role(&self, k: usize, l: usize) -> Role {
        *self.roles.get(k, l)
    }

    pub fn roles(&self) -> &Grid<Role> {
        &self.roles
    }

    /// The silent scheme with the lowest family index allowed at `(k, l)`.
    pub fn canonical_silent(&self, k: usize, l: usize) -> ModulationScheme {
        canonical_silent(self.allowed(k, l))
    }

    /// Number of positions that can carry at least one bit.
    pub fn bearing_positions(&self) -> usize {
        self.allowed
            .iter()
            .filter(|set| set.iter().any(|s| !s.is_silent()))
            .count()
    }

    /// Sum over positions of the largest allowed bit count.
    pub fn saturation_bits(&self) -> u32 {
        self.allowed
            .iter()
            .map(|set| set.iter().map(|s| s.bits()).max().unwrap_or(0))
            .sum()
    }

    /// Product of the allowed-set sizes.
    pub fn search_space_size(&self) -> f64 {
        self.allowed.iter().map(|set| set.len() as f64).product()
    }

    /// True when every allowed set of `self` is contained in the matching set of `other`.
    pub fn is_subset_of(&self, other: &ConstraintGrid) -> bool {
        self.allowed.same_shape(&other.allowed)
            && self
                .allowed
                .iter()
                .zip(other.allowed.iter())
                .all(|(a, b)| a.iter().all(|s| b.contains(s)))
    }

    /// Parses the line-oriented profile format:
    ///
    /// ```text
    /// # comment
    /// name  custom            (optional)
    /// grid  <n_f> <n_t>
    /// default <role> <allowed>   (optional; fills unlisted positions)
    /// <k> <l> <role> <allowed>
    /// ```
    ///
    /// `role` is `data`, `pilot` or `amplitude`. `allowed` is a comma list of
    /// family tokens with a maximum order (`qam64`, `psk16`, `ask8`), `all` for
    /// the full catalog, or `-` for silent only. Each family token admits every
    /// catalog order of that family up to the given one, order 1 included.
    pub fn parse(text: &str) -> Result<(Option<String>, Self)> {
        let mut name = None;
        let mut dims: Option<(usize, usize)> = None;
        let mut default: Option<(Role, Vec<ModulationScheme>)> = None;
        let mut cells: Vec<Option<(Role, Vec<ModulationScheme>, usize)>> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[0] {
                "name" => {
                    if fields.len() != 2 {
                        return Err(err("expected 'name <identifier>'".into()));
                    }
                    name = Some(fields[1].to_string());
                }
                "grid" => {
                    if dims.is_some() {
                        return Err(err("duplicate 'grid' line".into()));
                    }
                    if fields.len() != 3 {
                        return Err(err("expected 'grid <n_f> <n_t>'".into()));
                    }
                    let n_f = parse_dim(fields[1]).map_err(&err)?;
                    let n_t = parse_dim(fields[2]).map_err(&err)?;
                    dims = Some((n_f, n_t));
                    cells = vec![None; n_f * n_t];
                }
                "default" => {
                    if fields.len() != 3 {
                        return Err(err("expected 'default <role> <allowed>'".into()));
                    }
                    let role: Role = fields[1].parse().map_err(|e: Error| err(e.to_string()))?;
                    let set = parse_allowed(fields[2]).map_err(&err)?;
                    check_position(0, 0, &set, role).map_err(|e| err(e.to_string()))?;
                    default = Some((role, set));
                }
                _ => {
                    let (n_f, n_t) =
                        dims.ok_or_else(|| err("position record before 'grid' line".into()))?;
                    if fields.len() != 4 {
                        return Err(err(format!(
                            "expected '<k> <l> <role> <allowed>', got {} fields",
                            fields.len()
                        )));
                    }
                    let k: usize = fields[0]
                        .parse()
                        .map_err(|_| err(format!("bad subcarrier index '{}'", fields[0])))?;
                    let l: usize = fields[1]
                        .parse()
                        .map_err(|_| err(format!("bad symbol index '{}'", fields[1])))?;
                    if k >= n_f || l >= n_t {
                        return Err(err(format!("position ({k}, {l}) outside {n_f}x{n_t} grid")));
                    }
                    let role: Role = fields[2].parse().map_err(|e: Error| err(e.to_string()))?;
                    let set = parse_allowed(fields[3]).map_err(&err)?;
                    check_position(k, l, &set, role).map_err(|e| err(e.to_string()))?;
                    let slot = &mut cells[l * n_f + k];
                    if let Some((_, _, prev)) = slot {
                        return Err(err(format!(
                            "position ({k}, {l}) already defined on line {prev}"
                        )));
                    }
                    *slot = Some((role, set, line_no));
                }
            }
        }

        let (n_f, n_t) = dims.ok_or_else(|| Error::Parse {
            line: text.lines().count().max(1),
            msg: "missing 'grid' line".into(),
        })?;
        let mut roles = Vec::with_capacity(n_f * n_t);
        let mut allowed = Vec::with_capacity(n_f * n_t);
        for (i, cell) in cells.into_iter().enumerate() {
            let (role, set) = match (cell, &default) {
                (Some((role, set, _)), _) => (role, set),
                (None, Some((role, set))) => (*role, set.clone()),
                (None, None) => {
                    return Err(Error::Parse {
                        line: text.lines().count().max(1),
                        msg: format!(
                            "position ({}, {}) is not defined and no default is given",
                            i % n_f,
                            i / n_f
                        ),
                    })
                }
            };
            roles.push(role);
            allowed.push(set);
        }
        let grid = Self::new(
            Grid::from_cells(n_f, n_t, allowed).expect("cell count"),
            Grid::from_cells(n_f, n_t, roles).expect("cell count"),
        )?;
        Ok((name, grid))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Option<String>, Self)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }
}

fn canonical_silent(set: &[ModulationScheme]) -> ModulationScheme {
    *set.iter()
        .find(|s| s.is_silent())
        .expect("validated sets contain a silent scheme")
}

fn check_position(k: usize, l: usize, set: &[ModulationScheme], role: Role) -> Result<()> {
    if !set.iter().any(|s| s.is_silent()) {
        return Err(Error::Config(format!(
            "position ({k}, {l}) has no silent (order 1) scheme"
        )));
    }
    match role {
        Role::Pilot if set.iter().any(|s| !s.is_silent()) => Err(Error::Config(format!(
            "pilot position ({k}, {l}) may only hold silent schemes"
        ))),
        Role::AmplitudeData if set.iter().any(|s| s.family() != ModulationFamily::Ask) => {
            Err(Error::Config(format!(
                "amplitude position ({k}, {l}) may only hold ASK schemes"
            )))
        }
        _ => Ok(()),
    }
}

fn parse_dim(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("bad grid dimension '{s}'")),
    }
}

fn parse_allowed(text: &str) -> std::result::Result<Vec<ModulationScheme>, String> {
    match text {
        "all" => return Ok(full_set()),
        "-" | "none" => return Ok(vec![ModulationScheme::silent(ModulationFamily::Ask)]),
        _ => {}
    }
    let mut set = Vec::new();
    for token in text.split(',').filter(|t| !t.is_empty()) {
        let max: ModulationScheme = token
            .parse()
            .map_err(|e: Error| format!("bad allowed-set token '{token}': {e}"))?;
        set.extend(family_up_to(max.family(), max.order()));
    }
    if set.is_empty() {
        return Err(format!("empty allowed set '{text}'"));
    }
    Ok(set)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    /// Fully blind: no pilots, full catalog.
    Fb,
    /// Constant modulus: no pilots, PSK only.
    Cm,
    /// Pilot-based LTE resource block.
    Lte,
    /// LTE grid with unipolar-ASK data in the pilot positions and a PSK
    /// neighbour next to each.
    Mlte,
}

impl SystemKind {
    pub const ALL: [SystemKind; 4] = [Self::Fb, Self::Cm, Self::Lte, Self::Mlte];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fb => "fb",
            Self::Cm => "cm",
            Self::Lte => "lte",
            Self::Mlte => "mlte",
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "fb" => Ok(Self::Fb),
            "cm" => Ok(Self::Cm),
            "lte" => Ok(Self::Lte),
            "mlte" => Ok(Self::Mlte),
            _ => Err(Error::Domain(format!("unknown system '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemProfile {
    pub name: String,
    pub grid: ConstraintGrid,
}

/// Cell-specific reference signals of antenna port 0 in one normal-CP
/// resource block, as `(k, l)`.
pub fn lte_pilot_positions() -> [(usize, usize); 4] {
    [(0, 0), (6, 0), (3, 4), (9, 4)]
}

pub fn build_profile(kind: SystemKind, n_f: usize, n_t: usize) -> Result<SystemProfile> {
    if n_f == 0 || n_t == 0 {
        return Err(Error::Config(format!("grid {n_f}x{n_t} is empty")));
    }
    let pilots = lte_pilot_positions();
    let needs_pilots = matches!(kind, SystemKind::Lte | SystemKind::Mlte);
    if needs_pilots && pilots.iter().any(|&(k, l)| k >= n_f || l >= n_t) {
        return Err(Error::Config(format!(
            "pilot pattern does not fit in a {n_f}x{n_t} grid"
        )));
    }
    let mut allowed = Grid::filled(n_f, n_t, full_set());
    let mut roles = Grid::filled(n_f, n_t, Role::Data);
    match kind {
        SystemKind::Fb => {}
        SystemKind::Cm => allowed = Grid::filled(n_f, n_t, psk_set()),
        SystemKind::Lte => {
            for &(k, l) in &pilots {
                *allowed.get_mut(k, l) = vec![ModulationScheme::silent(ModulationFamily::Ask)];
                *roles.get_mut(k, l) = Role::Pilot;
            }
        }
        SystemKind::Mlte => {
            for &(k, l) in &pilots {
                *allowed.get_mut(k, l) = ask_set();
                *roles.get_mut(k, l) = Role::AmplitudeData;
                let neighbour = (k + 1) % n_f;
                *allowed.get_mut(neighbour, l) = psk_set();
            }
        }
    }
    Ok(SystemProfile {
        name: kind.name().to_string(),
        grid: ConstraintGrid::new(allowed, roles)?,
    })
}

pub fn saturation_bits(profile: &SystemProfile) -> u32 {
    profile.grid.saturation_bits()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rb(kind: SystemKind) -> SystemProfile {
        build_profile(kind, RB_SUBCARRIERS, RB_SYMBOLS).unwrap()
    }

    #[test]
    fn pilot_pattern() {
        let p = lte_pilot_positions();
        let unique: BTreeSet<_> = p.iter().collect();
        assert_eq!(unique.len(), 4);
        assert!(p.iter().all(|&(k, l)| k < 12 && l < 7));
    }

    #[test]
    fn profile_shapes() {
        let fb = rb(SystemKind::Fb);
        assert_eq!(fb.grid.len(), 84);
        assert!(fb.grid.allowed_grid().iter().all(|s| s.len() == 13));

        let lte = rb(SystemKind::Lte);
        assert_eq!(lte.grid.bearing_positions(), 80);
        assert_eq!(
            lte.grid
                .roles()
                .iter()
                .filter(|r| **r == Role::Pilot)
                .count(),
            4
        );

        let cm = rb(SystemKind::Cm);
        assert!(cm.grid.allowed_grid().iter().all(|s| *s == psk_set()));

        let mlte = rb(SystemKind::Mlte);
        let sets = mlte.grid.allowed_grid();
        assert_eq!(sets.iter().filter(|s| **s == ask_set()).count(), 4);
        assert_eq!(sets.iter().filter(|s| **s == psk_set()).count(), 4);
        assert_eq!(sets.iter().filter(|s| s.len() == 13).count(), 76);
        assert_eq!(mlte.grid.allowed(1, 0), psk_set().as_slice());
        assert_eq!(mlte.grid.role(6, 0), Role::AmplitudeData);
    }

    #[test]
    fn saturation_counts() {
        assert_eq!(saturation_bits(&rb(SystemKind::Fb)), 504);
        assert_eq!(saturation_bits(&rb(SystemKind::Lte)), 480);
        assert_eq!(saturation_bits(&rb(SystemKind::Cm)), 336);
        assert_eq!(saturation_bits(&rb(SystemKind::Mlte)), 484);
    }

    #[test]
    fn every_profile_is_a_subset_of_fb() {
        for n_f in [12, 16] {
            let fb = build_profile(SystemKind::Fb, n_f, 7).unwrap();
            for kind in SystemKind::ALL {
                let p = build_profile(kind, n_f, 7).unwrap();
                assert!(p.grid.is_subset_of(&fb.grid), "{kind}");
                assert!(saturation_bits(&fb) >= saturation_bits(&p));
            }
        }
        assert!(saturation_bits(&rb(SystemKind::Mlte)) > saturation_bits(&rb(SystemKind::Lte)));
        assert!(!rb(SystemKind::Fb)
            .grid
            .is_subset_of(&rb(SystemKind::Cm).grid));
    }

    #[test]
    fn neighbour_wraps_in_frequency() {
        // pilot at k = 9 in a 10-wide grid puts its PSK neighbour at k = 0
        let p = build_profile(SystemKind::Mlte, 10, 7).unwrap();
        assert_eq!(p.grid.allowed(0, 4), psk_set().as_slice());
    }

    #[test]
    fn pilot_pattern_must_fit() {
        assert!(build_profile(SystemKind::Lte, 8, 7).is_err());
        assert!(build_profile(SystemKind::Mlte, 12, 4).is_err());
        assert!(build_profile(SystemKind::Fb, 2, 2).is_ok());
        assert!(build_profile(SystemKind::Cm, 0, 2).is_err());
    }

    #[test]
    fn system_names_parse() {
        for kind in SystemKind::ALL {
            assert_eq!(kind.name().parse::<SystemKind>().unwrap(), kind);
        }
        assert_eq!("M-LTE".parse::<SystemKind>().unwrap(), SystemKind::Mlte);
        assert!("dvb".parse::<SystemKind>().is_err());
    }

    #[test]
    fn grid_invariants_are_enforced() {
        let n = |set| ConstraintGrid::uniform(1, 1, set);
        assert!(n(vec![]).is_err());
        assert!(n(vec!["QAM4".parse().unwrap()]).is_err());
        let pilot = ConstraintGrid::new(
            Grid::filled(1, 1, full_set()),
            Grid::filled(1, 1, Role::Pilot),
        );
        assert!(pilot.is_err());
        let amp = ConstraintGrid::new(
            Grid::filled(1, 1, psk_set()),
            Grid::filled(1, 1, Role::AmplitudeData),
        );
        assert!(amp.is_err());
        let g = n(vec!["QAM1".parse().unwrap(), "PSK1".parse().unwrap()]).unwrap();
        assert_eq!(g.canonical_silent(0, 0).to_string(), "PSK1");
    }

    #[test]
    fn parse_mixed_constraint_map() {
        let text = "\
name mixed
grid 4 4
default data all
0 0 pilot psk1
3 0 pilot psk1
1 0 data psk16
2 0 data psk16
0 2 data ask8
1 2 data ask8
2 2 data ask8
3 2 data ask8
0 3 pilot psk1
3 3 pilot psk1
1 3 data psk16
2 3 data psk16
";
        let (name, g) = ConstraintGrid::parse(text).unwrap();
        assert_eq!(name.as_deref(), Some("mixed"));
        assert_eq!(g.bearing_positions(), 12);
        assert_eq!(g.allowed(1, 0), psk_set().as_slice());
        assert_eq!(g.allowed(2, 1).len(), 13);
        assert_eq!(g.allowed(3, 2), ask_set().as_slice());
        assert_eq!(g.saturation_bits(), 4 * 4 + 4 * 6 + 4 * 3);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let line_of = |text: &str| match ConstraintGrid::parse(text) {
            Err(Error::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("0 0 data all\n"), 1);
        assert_eq!(line_of("grid 2 2\ndefault data all\n2 0 data all\n"), 3);
        assert_eq!(
            line_of("grid 2 2\ndefault data all\n0 0 data all\n0 0 data all\n"),
            4
        );
        assert_eq!(line_of("grid 2 2\n# c\n0 0 pilot qam64\n"), 3);
        assert_eq!(line_of("grid 2 2\n0 0 amplitude psk8\n"), 2);
        assert_eq!(line_of("grid 2 2\n0 0 data qam8\n"), 2);
        assert_eq!(line_of("grid 2 x\n"), 1);
        assert_eq!(line_of("grid 1 1\n0 0 robot all\n"), 2);
        assert!(matches!(
            ConstraintGrid::parse("grid 2 1\n0 0 data all\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn serde_round_trip_validates() {
        let g = rb(SystemKind::Mlte).grid;
        let json = serde_json::to_string(&g).unwrap();
        let back: ConstraintGrid = serde_json::from_str(&json).unwrap();
        assert_eq!(back, g);
        let bad = json.replacen("\"ASK1\"", "\"ASK2\"", 1);
        assert!(serde_json::from_str::<ConstraintGrid>(&bad).is_err());
    }
}
