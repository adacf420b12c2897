//! Discrete domains: square, triangular, hexagonal and cubic tessellations
//! with exclusion occupancy, boundary conditions and valid distance domains.
//!
//! Coordinates are 1-based: `x ∈ [1, L_x]`, `y ∈ [1, L_y]`, `z ∈ [1, L_z]`
//! (z fixed at 1 for the planar tessellations). Canonical site order is
//! row-major, then layer: ascending `(z, y, x)`.
//!
//! Conventions for the non-square tessellations:
//!
//! * Triangle: site `(x, y)` points up iff `x + y` is even. An up triangle
//!   neighbours `(x±1, y)` and `(x, y−1)`; a down triangle neighbours
//!   `(x±1, y)` and `(x, y+1)`. Rows are strips of `L_x` alternating
//!   triangles, so `L_x` must be even for the analytic normalisation.
//! * Hexagon: odd-column-shifted offset layout. Columns are straight runs
//!   of hexagons; a hexagon in an odd column touches rows `y` and `y+1` of
//!   the two adjacent columns, one in an even column touches rows `y−1`
//!   and `y`. Interior degree is 6.
//!
//! Periodic triangle/hexagon grids additionally require even `L_y` so the
//! orientation (or offset) alternation survives the wrap; the even-`L_x`
//! requirement is inherent to the domain definition.

use std::fmt;

use crate::error::{Error, Result};
use crate::metric::MetricKind;

/// Regular tessellation families. `Cube` is the only 3-dimensional kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TessellationKind {
    Square,
    Triangle,
    Hexagon,
    Cube,
}

impl TessellationKind {
    pub fn is_3d(self) -> bool {
        matches!(self, TessellationKind::Cube)
    }

    pub fn label(self) -> &'static str {
        match self {
            TessellationKind::Square => "square",
            TessellationKind::Triangle => "triangle",
            TessellationKind::Hexagon => "hexagon",
            TessellationKind::Cube => "cube",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "square" => Ok(TessellationKind::Square),
            "triangle" => Ok(TessellationKind::Triangle),
            "hexagon" => Ok(TessellationKind::Hexagon),
            "cube" => Ok(TessellationKind::Cube),
            other => Err(Error::InvalidParameter(format!(
                "unknown tessellation `{other}` (expected square, triangle, hexagon or cube)"
            ))),
        }
    }
}

impl fmt::Display for TessellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    Periodic,
    NonPeriodic,
}

impl BoundaryKind {
    pub fn label(self) -> &'static str {
        match self {
            BoundaryKind::Periodic => "periodic",
            BoundaryKind::NonPeriodic => "nonperiodic",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "periodic" | "p" => Ok(BoundaryKind::Periodic),
            "nonperiodic" | "n" => Ok(BoundaryKind::NonPeriodic),
            other => Err(Error::InvalidParameter(format!(
                "unknown boundary condition `{other}` (expected periodic or nonperiodic)"
            ))),
        }
    }
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Lattice extents. `lz` is present exactly for cubic lattices.
/// Every extent must be at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    lx: u32,
    ly: u32,
    lz: Option<u32>,
}

impl Dims {
    pub fn d2(lx: u32, ly: u32) -> Result<Self> {
        if lx < 2 || ly < 2 {
            return Err(Error::InvalidDims(format!(
                "extents must be at least 2, got {lx}x{ly}"
            )));
        }
        Ok(Dims { lx, ly, lz: None })
    }

    pub fn d3(lx: u32, ly: u32, lz: u32) -> Result<Self> {
        if lx < 2 || ly < 2 || lz < 2 {
            return Err(Error::InvalidDims(format!(
                "extents must be at least 2, got {lx}x{ly}x{lz}"
            )));
        }
        Ok(Dims { lx, ly, lz: Some(lz) })
    }

    pub fn lx(&self) -> u32 {
        self.lx
    }

    pub fn ly(&self) -> u32 {
        self.ly
    }

    /// Extent along z; 1 for planar lattices.
    pub fn lz(&self) -> u32 {
        self.lz.unwrap_or(1)
    }

    pub fn is_3d(&self) -> bool {
        self.lz.is_some()
    }

    pub fn total_sites(&self) -> u64 {
        self.lx as u64 * self.ly as u64 * self.lz() as u64
    }

    fn check_kind(&self, kind: TessellationKind) -> Result<()> {
        if kind.is_3d() != self.is_3d() {
            return Err(Error::InvalidDims(format!(
                "{kind} lattice requires {} dimensions, got {self}",
                if kind.is_3d() { 3 } else { 2 }
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lz {
            Some(lz) => write!(f, "{}x{}x{}", self.lx, self.ly, lz),
            None => write!(f, "{}x{}", self.lx, self.ly),
        }
    }
}

/// 1-based site coordinate. `z` is 1 on planar lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub z: u32,
    pub y: u32,
    pub x: u32,
}

impl Coord {
    pub fn xy(x: u32, y: u32) -> Self {
        Coord { x, y, z: 1 }
    }

    pub fn xyz(x: u32, y: u32, z: u32) -> Self {
        Coord { x, y, z }
    }

    fn in_range(&self, dims: &Dims) -> bool {
        (1..=dims.lx).contains(&self.x)
            && (1..=dims.ly).contains(&self.y)
            && (1..=dims.lz()).contains(&self.z)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.z == 1 {
            write!(f, "({},{})", self.x, self.y)
        } else {
            write!(f, "({},{},{})", self.x, self.y, self.z)
        }
    }
}

/// Valid pair-distance range for a tessellation/metric/BC combination.
///
/// `m_min` is always 1. Within `1..=m_max` the closed-form site-pair counts
/// are exact (verified against brute enumeration by the oracle sweep).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceDomain {
    pub m_min: u32,
    pub m_max: u32,
}

impl DistanceDomain {
    pub fn contains(&self, m: u32) -> bool {
        m >= self.m_min && m <= self.m_max
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.m_min..=self.m_max
    }

    pub fn len(&self) -> usize {
        (self.m_max - self.m_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.m_max < self.m_min
    }
}

/// Occupancy state of a regular tessellation: at most one agent per site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyGrid {
    kind: TessellationKind,
    dims: Dims,
    bc: BoundaryKind,
    occupancy: Vec<bool>,
    agents: u64,
}

/// Validates grid parameters and returns an all-vacant grid.
///
/// Periodic triangle and hexagon grids require both extents even so the
/// orientation/offset alternation is consistent across the wrap.
pub fn make_grid(kind: TessellationKind, dims: Dims, bc: BoundaryKind) -> Result<OccupancyGrid> {
    dims.check_kind(kind)?;
    if bc == BoundaryKind::Periodic
        && matches!(kind, TessellationKind::Triangle | TessellationKind::Hexagon)
    {
        if dims.lx() % 2 != 0 {
            return Err(Error::InvalidDims(format!(
                "periodic {kind} lattice requires even L_x, got {}",
                dims.lx()
            )));
        }
        if dims.ly() % 2 != 0 {
            return Err(Error::InvalidDims(format!(
                "periodic {kind} lattice requires even L_y, got {}",
                dims.ly()
            )));
        }
    }
    let z = dims.total_sites();
    if z > (1u64 << 31) {
        return Err(Error::InvalidDims(format!(
            "grid with {z} sites exceeds the supported maximum of 2^31"
        )));
    }
    Ok(OccupancyGrid {
        kind,
        dims,
        bc,
        occupancy: vec![false; z as usize],
        agents: 0,
    })
}

impl OccupancyGrid {
    pub fn kind(&self) -> TessellationKind {
        self.kind
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    /// Canonical (row-major, then layer) index of a coordinate.
    pub fn index_of(&self, c: Coord) -> usize {
        site_index(&self.dims, c)
    }

    pub fn coord_of(&self, index: usize) -> Coord {
        site_coord(&self.dims, index)
    }

    pub fn total_sites(&self) -> u64 {
        self.dims.total_sites()
    }

    pub fn agent_count(&self) -> u64 {
        self.agents
    }

    pub fn is_occupied(&self, c: Coord) -> bool {
        self.occupancy[self.index_of(c)]
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    /// Marks the listed sites occupied. Idempotent per site (exclusion:
    /// a site never holds more than one agent). Rejects out-of-range
    /// coordinates without modifying the grid.
    pub fn occupy(mut self, coords: &[Coord]) -> Result<OccupancyGrid> {
        for c in coords {
            if !c.in_range(&self.dims) {
                return Err(Error::OutOfRange {
                    coord: c.to_string(),
                    dims: self.dims.to_string(),
                });
            }
        }
        for c in coords {
            let i = site_index(&self.dims, *c);
            if !self.occupancy[i] {
                self.occupancy[i] = true;
                self.agents += 1;
            }
        }
        Ok(self)
    }

    /// Occupied coordinates in canonical order. The order is total and
    /// stable: repeated calls over the same occupancy are identical.
    pub fn agents(&self) -> Vec<Coord> {
        self.occupancy
            .iter()
            .enumerate()
            .filter(|(_, occ)| **occ)
            .map(|(i, _)| site_coord(&self.dims, i))
            .collect()
    }

    /// Agent count over total sites.
    pub fn density(&self) -> f64 {
        self.agents as f64 / self.total_sites() as f64
    }

    pub(crate) fn set_occupancy_from_indices(mut self, indices: &[usize]) -> OccupancyGrid {
        for &i in indices {
            if !self.occupancy[i] {
                self.occupancy[i] = true;
                self.agents += 1;
            }
        }
        self
    }

    pub(crate) fn set_occupancy_raw(mut self, occ: Vec<bool>) -> OccupancyGrid {
        debug_assert_eq!(occ.len(), self.occupancy.len());
        self.agents = occ.iter().filter(|b| **b).count() as u64;
        self.occupancy = occ;
        self
    }
}

pub(crate) fn site_index(dims: &Dims, c: Coord) -> usize {
    let lx = dims.lx() as usize;
    let ly = dims.ly() as usize;
    (c.z as usize - 1) * lx * ly + (c.y as usize - 1) * lx + (c.x as usize - 1)
}

pub(crate) fn site_coord(dims: &Dims, index: usize) -> Coord {
    let lx = dims.lx() as usize;
    let ly = dims.ly() as usize;
    let z = index / (lx * ly);
    let r = index % (lx * ly);
    Coord {
        x: (r % lx) as u32 + 1,
        y: (r / lx) as u32 + 1,
        z: z as u32 + 1,
    }
}

/// The m-range over which the analytic normalisation is exact.
///
/// Caps, as validated by the oracle sweep (see the shipped validity table):
///
/// * Square, taxicab/uniform — non-periodic `min(L_x, L_y) − 1`,
///   periodic `min(⌊L_x/2⌋, ⌊L_y/2⌋)`.
/// * Cube, taxicab/uniform — non-periodic `min(L_x, L_y, L_z) − 1`,
///   periodic `min(⌊L_x/2⌋, ⌊L_y/2⌋, ⌊L_z/2⌋)`.
/// * Triangle (taxicab steps, even `L_x`) — non-periodic `min(L_x, 2·L_y)`,
///   periodic `min(L_x/2 − 1, L_y − 1)`.
/// * Hexagon (taxicab steps) — non-periodic `min(L_x, L_y)`,
///   periodic `min(L_x, L_y)/2 − 1`.
///
/// Rectilinear axis metrics use `L_axis − 1` under non-periodic BC.
pub fn distance_domain(
    kind: TessellationKind,
    metric: MetricKind,
    bc: BoundaryKind,
    dims: &Dims,
) -> Result<DistanceDomain> {
    dims.check_kind(kind)?;
    metric.check_compatible(kind)?;
    let lx = dims.lx();
    let ly = dims.ly();
    let m_max: i64 = match (kind, &metric, bc) {
        (TessellationKind::Square, MetricKind::Taxicab | MetricKind::Uniform, BoundaryKind::NonPeriodic) => {
            lx.min(ly) as i64 - 1
        }
        (TessellationKind::Square, MetricKind::Taxicab | MetricKind::Uniform, BoundaryKind::Periodic) => {
            (lx / 2).min(ly / 2) as i64
        }
        (TessellationKind::Cube, MetricKind::Taxicab | MetricKind::Uniform, BoundaryKind::NonPeriodic) => {
            lx.min(ly).min(dims.lz()) as i64 - 1
        }
        (TessellationKind::Cube, MetricKind::Taxicab | MetricKind::Uniform, BoundaryKind::Periodic) => {
            (lx / 2).min(ly / 2).min(dims.lz() / 2) as i64
        }
        (TessellationKind::Triangle, MetricKind::Taxicab, BoundaryKind::NonPeriodic) => {
            if lx % 2 != 0 {
                return Err(Error::UnsupportedCombination(format!(
                    "triangle normalisation requires even L_x, got {lx}"
                )));
            }
            lx.min(2 * ly) as i64
        }
        (TessellationKind::Triangle, MetricKind::Taxicab, BoundaryKind::Periodic) => {
            check_even_periodic(kind, dims)?;
            (lx as i64 / 2 - 1).min(ly as i64 - 1)
        }
        (TessellationKind::Hexagon, MetricKind::Taxicab, BoundaryKind::NonPeriodic) => lx.min(ly) as i64,
        (TessellationKind::Hexagon, MetricKind::Taxicab, BoundaryKind::Periodic) => {
            check_even_periodic(kind, dims)?;
            (lx.min(ly) / 2) as i64 - 1
        }
        (TessellationKind::Square, MetricKind::RectilinearX, BoundaryKind::NonPeriodic) => lx as i64 - 1,
        (TessellationKind::Square, MetricKind::RectilinearY, BoundaryKind::NonPeriodic) => ly as i64 - 1,
        _ => {
            return Err(Error::UnsupportedCombination(format!(
                "no analytic distance domain for {} / {} / {}",
                kind,
                metric.label(),
                bc
            )))
        }
    };
    if m_max < 1 {
        return Err(Error::EmptyDomain(format!(
            "{} / {} / {} at {}",
            kind,
            metric.label(),
            bc,
            dims
        )));
    }
    Ok(DistanceDomain {
        m_min: 1,
        m_max: m_max as u32,
    })
}

fn check_even_periodic(kind: TessellationKind, dims: &Dims) -> Result<()> {
    if dims.lx() % 2 != 0 || dims.ly() % 2 != 0 {
        return Err(Error::InvalidDims(format!(
            "periodic {kind} lattice requires even extents, got {dims}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_grid_square_periodic() {
        let g = make_grid(
            TessellationKind::Square,
            Dims::d2(4, 4).unwrap(),
            BoundaryKind::Periodic,
        )
        .unwrap();
        assert_eq!(g.total_sites(), 16);
        assert_eq!(g.agent_count(), 0);
    }

    #[test]
    fn make_grid_rejects_odd_periodic_triangle() {
        let err = make_grid(
            TessellationKind::Triangle,
            Dims::d2(5, 3).unwrap(),
            BoundaryKind::Periodic,
        );
        assert!(err.is_err());
    }

    #[test]
    fn make_grid_cube() {
        let g = make_grid(
            TessellationKind::Cube,
            Dims::d3(2, 2, 2).unwrap(),
            BoundaryKind::NonPeriodic,
        )
        .unwrap();
        assert_eq!(g.total_sites(), 8);
    }

    #[test]
    fn dims_shape_must_match_kind() {
        assert!(make_grid(
            TessellationKind::Square,
            Dims::d3(4, 4, 4).unwrap(),
            BoundaryKind::Periodic
        )
        .is_err());
        assert!(make_grid(
            TessellationKind::Cube,
            Dims::d2(4, 4).unwrap(),
            BoundaryKind::Periodic
        )
        .is_err());
        assert!(Dims::d2(1, 5).is_err());
    }

    #[test]
    fn occupy_idempotent_and_range_checked() {
        let g = make_grid(
            TessellationKind::Square,
            Dims::d2(3, 3).unwrap(),
            BoundaryKind::NonPeriodic,
        )
        .unwrap();
        let g = g.occupy(&[Coord::xy(1, 1)]).unwrap();
        assert_eq!(g.agent_count(), 1);
        let g = g.occupy(&[Coord::xy(1, 1)]).unwrap();
        assert_eq!(g.agent_count(), 1);
        assert!(g.clone().occupy(&[Coord::xy(4, 1)]).is_err());
        assert!(g.occupy(&[Coord::xy(0, 2)]).is_err());
    }

    #[test]
    fn occupy_full_small_grid() {
        let g = make_grid(
            TessellationKind::Square,
            Dims::d2(2, 2).unwrap(),
            BoundaryKind::NonPeriodic,
        )
        .unwrap();
        let all = [
            Coord::xy(1, 1),
            Coord::xy(2, 1),
            Coord::xy(1, 2),
            Coord::xy(2, 2),
        ];
        let g = g.occupy(&all).unwrap();
        assert_eq!(g.agent_count(), 4);
        assert_eq!(g.density(), 1.0);
    }

    #[test]
    fn agents_row_major_order() {
        let g = make_grid(
            TessellationKind::Square,
            Dims::d2(4, 3).unwrap(),
            BoundaryKind::NonPeriodic,
        )
        .unwrap();
        assert!(g.agents().is_empty());
        let g = g.occupy(&[Coord::xy(1, 2), Coord::xy(3, 1)]).unwrap();
        assert_eq!(g.agents(), vec![Coord::xy(3, 1), Coord::xy(1, 2)]);
        // stable across repeated calls
        assert_eq!(g.agents(), g.agents());
    }

    #[test]
    fn density_examples() {
        let g = make_grid(
            TessellationKind::Square,
            Dims::d2(4, 4).unwrap(),
            BoundaryKind::NonPeriodic,
        )
        .unwrap();
        assert_eq!(g.density(), 0.0);
        let coords: Vec<Coord> = (1..=4).map(|x| Coord::xy(x, 1)).collect();
        let coords2: Vec<Coord> = (1..=4).map(|x| Coord::xy(x, 2)).collect();
        let g = g.occupy(&coords).unwrap().occupy(&coords2).unwrap();
        assert_eq!(g.density(), 0.5);
    }

    #[test]
    fn domain_examples_from_caps() {
        let d = distance_domain(
            TessellationKind::Square,
            MetricKind::Taxicab,
            BoundaryKind::Periodic,
            &Dims::d2(100, 100).unwrap(),
        )
        .unwrap();
        assert_eq!((d.m_min, d.m_max), (1, 50));

        let d = distance_domain(
            TessellationKind::Square,
            MetricKind::Taxicab,
            BoundaryKind::NonPeriodic,
            &Dims::d2(3, 5).unwrap(),
        )
        .unwrap();
        assert_eq!((d.m_min, d.m_max), (1, 2));

        let d = distance_domain(
            TessellationKind::Cube,
            MetricKind::Uniform,
            BoundaryKind::Periodic,
            &Dims::d3(8, 6, 10).unwrap(),
        )
        .unwrap();
        assert_eq!((d.m_min, d.m_max), (1, 3));
    }

    #[test]
    fn domain_formula_check_small_dims() {
        // Non-periodic square: m_max + 1 == min extent; periodic: min of halves.
        for lx in 2..=16u32 {
            for ly in 2..=16u32 {
                let dims = Dims::d2(lx, ly).unwrap();
                let n = distance_domain(
                    TessellationKind::Square,
                    MetricKind::Uniform,
                    BoundaryKind::NonPeriodic,
                    &dims,
                );
                if lx.min(ly) >= 2 {
                    assert_eq!(n.unwrap().m_max + 1, lx.min(ly));
                }
                let p = distance_domain(
                    TessellationKind::Square,
                    MetricKind::Taxicab,
                    BoundaryKind::Periodic,
                    &dims,
                )
                .unwrap();
                assert_eq!(p.m_max, (lx / 2).min(ly / 2));
            }
        }
    }

    #[test]
    fn empty_domain_rejected() {
        // Periodic hexagon at extent 2 has no m with an exact ring count.
        assert!(distance_domain(
            TessellationKind::Hexagon,
            MetricKind::Taxicab,
            BoundaryKind::Periodic,
            &Dims::d2(2, 4).unwrap(),
        )
        .is_err());
    }
}
