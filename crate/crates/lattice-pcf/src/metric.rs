//! Pairwise distances under each metric/BC and raw agent-pair histograms.
//!
//! All pair counts in this crate are over unordered pairs: each `{a, b}`
//! with `a ≠ b` contributes once. The closed-form normalisations follow
//! the same convention, so the PCF ratio is unaffected.

use std::collections::BTreeMap;
use std::collections::VecDeque;
use std::fmt;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    site_coord, site_index, BoundaryKind, Coord, Dims, OccupancyGrid, TessellationKind,
};

/// Distance notion used by a PCF.
///
/// Taxicab and Uniform apply to square and cubic lattices; Taxicab doubles
/// as the adjacency-step distance on triangular and hexagonal lattices.
/// Annular (Euclidean with bandwidth binning) and the Rectilinear axis
/// offsets are defined on square lattices only. `Graph` marks profiles
/// computed from shortest-path distances on an arbitrary site graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricKind {
    Taxicab,
    Uniform,
    Annular(Bandwidth),
    RectilinearX,
    RectilinearY,
    /// Label for the axis-averaged Rectilinear PCF `(f_Rx + f_Ry)/2`;
    /// not itself a distance function.
    Rectilinear,
    Graph,
}

impl MetricKind {
    pub fn label(&self) -> String {
        match self {
            MetricKind::Taxicab => "taxicab".into(),
            MetricKind::Uniform => "uniform".into(),
            MetricKind::Annular(delta) => format!("annular(delta={delta})"),
            MetricKind::RectilinearX => "rectilinear-x".into(),
            MetricKind::RectilinearY => "rectilinear-y".into(),
            MetricKind::Rectilinear => "rectilinear".into(),
            MetricKind::Graph => "graph".into(),
        }
    }

    /// Parses a metric label as used in profile headers and on the CLI;
    /// annular takes its bandwidth separately.
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "taxicab" => Ok(MetricKind::Taxicab),
            "uniform" => Ok(MetricKind::Uniform),
            "rectilinear" => Ok(MetricKind::Rectilinear),
            "rectilinear-x" => Ok(MetricKind::RectilinearX),
            "rectilinear-y" => Ok(MetricKind::RectilinearY),
            "graph" => Ok(MetricKind::Graph),
            other => {
                if let Some(rest) = other.strip_prefix("annular(delta=") {
                    if let Some(num) = rest.strip_suffix(')') {
                        let (n, d) = match num.split_once('/') {
                            Some((n, d)) => (n, d),
                            None => (num, "1"),
                        };
                        let n: u64 = n.parse().map_err(|_| {
                            Error::InvalidParameter(format!("bad annular label `{other}`"))
                        })?;
                        let d: u64 = d.parse().map_err(|_| {
                            Error::InvalidParameter(format!("bad annular label `{other}`"))
                        })?;
                        return Ok(MetricKind::Annular(Bandwidth::new(n, d)?));
                    }
                }
                if other == "annular" {
                    return Ok(MetricKind::Annular(Bandwidth::new(1, 1)?));
                }
                Err(Error::InvalidParameter(format!(
                    "unknown metric `{other}` (expected taxicab, uniform, annular, rectilinear, rectilinear-x, rectilinear-y or graph)"
                )))
            }
        }
    }

    pub fn check_compatible(&self, kind: TessellationKind) -> Result<()> {
        let ok = match self {
            MetricKind::Taxicab => true,
            MetricKind::Uniform => {
                matches!(kind, TessellationKind::Square | TessellationKind::Cube)
            }
            MetricKind::Annular(_)
            | MetricKind::RectilinearX
            | MetricKind::RectilinearY
            | MetricKind::Rectilinear => kind == TessellationKind::Square,
            MetricKind::Graph => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedMetric {
                metric: self.label(),
                kind: kind.label().to_string(),
            })
        }
    }
}

/// Annular bandwidth δ, kept as an exact non-negative rational so that the
/// half-open bin boundaries `(kδ − δ, kδ]` classify squared lattice
/// distances without floating-point error.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bandwidth {
    num: u64,
    den: u64,
}

impl Bandwidth {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::InvalidParameter(
                "annular bandwidth must be positive".into(),
            ));
        }
        let g = gcd(num, den);
        Ok(Bandwidth {
            num: num / g,
            den: den / g,
        })
    }

    /// Parses a plain decimal such as `1`, `0.5` or `2.25`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("cannot parse bandwidth `{s}` as a decimal"));
        let (int_part, frac_part) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let digits_ok = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if !(int_part.is_empty() || digits_ok(int_part)) || !(frac_part.is_empty() || digits_ok(frac_part)) {
            return Err(bad());
        }
        let int_val: u64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
        if frac_part.len() > 12 {
            return Err(Error::InvalidParameter(
                "bandwidth supports at most 12 decimal places".into(),
            ));
        }
        let den = 10u64.pow(frac_part.len() as u32);
        let frac_val: u64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
        Bandwidth::new(int_val * den + frac_val, den)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Bin index k such that √d2 lies in `(kδ − δ, kδ]`; i.e. `k = ⌈√d2 / δ⌉`.
    /// Exact: compares `(k·num)²` against `d2·den²` in integers.
    pub fn bin_of_squared(&self, d2: u64) -> u32 {
        if d2 == 0 {
            return 0;
        }
        let t = d2 as u128 * self.den as u128 * self.den as u128;
        // smallest n with n² >= t
        let n = ceil_sqrt(t);
        // smallest k with k*num >= n
        let k = n.div_ceil(self.num as u128);
        k as u32
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn ceil_sqrt(t: u128) -> u128 {
    if t == 0 {
        return 0;
    }
    let mut r = (t as f64).sqrt() as u128;
    while r * r >= t {
        r -= 1;
    }
    while (r + 1) * (r + 1) < t {
        r += 1;
    }
    r + 1
}

/// Histogram of unordered pair counts keyed by integer distance (or bin index).
pub type PairCounts = BTreeMap<u32, u64>;

/// Result of [`pair_distance`]: step-valued metrics return integers, the
/// annular metric returns the Euclidean length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistanceValue {
    Steps(u32),
    Euclidean(f64),
}

impl DistanceValue {
    pub fn as_steps(&self) -> Option<u32> {
        match self {
            DistanceValue::Steps(m) => Some(*m),
            DistanceValue::Euclidean(_) => None,
        }
    }
}

fn axis_offset(a: u32, b: u32, extent: u32, bc: BoundaryKind) -> u32 {
    let d = a.abs_diff(b);
    match bc {
        BoundaryKind::NonPeriodic => d,
        BoundaryKind::Periodic => d.min(extent - d),
    }
}

pub(crate) fn offsets3(dims: &Dims, bc: BoundaryKind, a: Coord, b: Coord) -> (u32, u32, u32) {
    (
        axis_offset(a.x, b.x, dims.lx(), bc),
        axis_offset(a.y, b.y, dims.ly(), bc),
        axis_offset(a.z, b.z, dims.lz(), bc),
    )
}

/// Distance between two sites under the given metric and BC.
///
/// Square/cube taxicab sums the per-axis offsets (wrapped per axis under
/// periodic BC); uniform takes their max; triangle/hexagon taxicab is the
/// minimum adjacency-step count (breadth-first search over the lattice
/// adjacency); the annular metric is the Euclidean length of the (wrapped)
/// offsets. Rectilinear-X/Y return the single-axis column/row offset.
pub fn pair_distance(
    kind: TessellationKind,
    metric: &MetricKind,
    bc: BoundaryKind,
    dims: &Dims,
    a: Coord,
    b: Coord,
) -> Result<DistanceValue> {
    metric.check_compatible(kind)?;
    for c in [a, b] {
        if !(1..=dims.lx()).contains(&c.x)
            || !(1..=dims.ly()).contains(&c.y)
            || !(1..=dims.lz()).contains(&c.z)
        {
            return Err(Error::OutOfRange {
                coord: c.to_string(),
                dims: dims.to_string(),
            });
        }
    }
    let (dx, dy, dz) = offsets3(dims, bc, a, b);
    let v = match (kind, metric) {
        (TessellationKind::Square | TessellationKind::Cube, MetricKind::Taxicab) => {
            DistanceValue::Steps(dx + dy + dz)
        }
        (TessellationKind::Square | TessellationKind::Cube, MetricKind::Uniform) => {
            DistanceValue::Steps(dx.max(dy).max(dz))
        }
        (TessellationKind::Triangle | TessellationKind::Hexagon, MetricKind::Taxicab) => {
            let adj = adjacency_indices(kind, bc, dims);
            let d = bfs_distances(&adj, site_index(dims, a));
            DistanceValue::Steps(d[site_index(dims, b)])
        }
        (TessellationKind::Square, MetricKind::Annular(_)) => {
            let d2 = dx as u64 * dx as u64 + dy as u64 * dy as u64;
            DistanceValue::Euclidean((d2 as f64).sqrt())
        }
        (TessellationKind::Square, MetricKind::RectilinearX) => DistanceValue::Steps(dx),
        (TessellationKind::Square, MetricKind::RectilinearY) => DistanceValue::Steps(dy),
        _ => unreachable!("compatibility checked above"),
    };
    Ok(v)
}

/// Raw neighbour offsets of a site, before range filtering / wrapping.
fn neighbor_candidates(kind: TessellationKind, c: Coord) -> Vec<(i64, i64, i64)> {
    let (x, y, z) = (c.x as i64, c.y as i64, c.z as i64);
    match kind {
        TessellationKind::Square => vec![(x - 1, y, z), (x + 1, y, z), (x, y - 1, z), (x, y + 1, z)],
        TessellationKind::Cube => vec![
            (x - 1, y, z),
            (x + 1, y, z),
            (x, y - 1, z),
            (x, y + 1, z),
            (x, y, z - 1),
            (x, y, z + 1),
        ],
        TessellationKind::Triangle => {
            let vertical = if (x + y) % 2 == 0 { (x, y - 1, z) } else { (x, y + 1, z) };
            vec![(x - 1, y, z), (x + 1, y, z), vertical]
        }
        TessellationKind::Hexagon => {
            // Odd-column-shifted layout: odd columns touch rows y and y+1
            // of adjacent columns, even columns touch rows y-1 and y.
            if x % 2 == 1 {
                vec![
                    (x, y - 1, z),
                    (x, y + 1, z),
                    (x - 1, y, z),
                    (x - 1, y + 1, z),
                    (x + 1, y, z),
                    (x + 1, y + 1, z),
                ]
            } else {
                vec![
                    (x, y - 1, z),
                    (x, y + 1, z),
                    (x - 1, y - 1, z),
                    (x - 1, y, z),
                    (x + 1, y - 1, z),
                    (x + 1, y, z),
                ]
            }
        }
    }
}

fn wrap_1based(v: i64, extent: u32) -> u32 {
    let e = extent as i64;
    ((v - 1).rem_euclid(e) + 1) as u32
}

/// Distance-one neighbours of a site, deduplicated and in canonical
/// (row-major, then layer) order. Under periodic BC wrapped neighbours are
/// included; on short axes distinct offsets can wrap to the same site, which
/// is why the result is a set rather than a fixed-arity list.
pub fn neighbor_list(
    kind: TessellationKind,
    bc: BoundaryKind,
    dims: &Dims,
    a: Coord,
) -> Result<Vec<Coord>> {
    if !(1..=dims.lx()).contains(&a.x)
        || !(1..=dims.ly()).contains(&a.y)
        || !(1..=dims.lz()).contains(&a.z)
    {
        return Err(Error::OutOfRange {
            coord: a.to_string(),
            dims: dims.to_string(),
        });
    }
    let mut out: Vec<Coord> = Vec::new();
    for (cx, cy, cz) in neighbor_candidates(kind, a) {
        let c = match bc {
            BoundaryKind::Periodic => Coord {
                x: wrap_1based(cx, dims.lx()),
                y: wrap_1based(cy, dims.ly()),
                z: wrap_1based(cz, dims.lz()),
            },
            BoundaryKind::NonPeriodic => {
                if cx < 1
                    || cx > dims.lx() as i64
                    || cy < 1
                    || cy > dims.ly() as i64
                    || cz < 1
                    || cz > dims.lz() as i64
                {
                    continue;
                }
                Coord {
                    x: cx as u32,
                    y: cy as u32,
                    z: cz as u32,
                }
            }
        };
        if c != a && !out.contains(&c) {
            out.push(c);
        }
    }
    out.sort();
    Ok(out)
}

/// Adjacency lists over canonical site indices.
pub(crate) fn adjacency_indices(
    kind: TessellationKind,
    bc: BoundaryKind,
    dims: &Dims,
) -> Vec<Vec<u32>> {
    let z = dims.total_sites() as usize;
    let mut adj = vec![Vec::new(); z];
    for i in 0..z {
        let c = site_coord(dims, i);
        let neigh = neighbor_list(kind, bc, dims, c).expect("coordinate from index is in range");
        adj[i] = neigh.into_iter().map(|n| site_index(dims, n) as u32).collect();
    }
    adj
}

/// BFS distances from `source` to every site; `u32::MAX` marks unreachable.
pub(crate) fn bfs_distances(adj: &[Vec<u32>], source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[source] = 0;
    let mut queue = VecDeque::with_capacity(adj.len());
    queue.push_back(source as u32);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in &adj[u as usize] {
            if dist[v as usize] == u32::MAX {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// All step distances from a source coordinate (BFS over the lattice
/// adjacency). Shared by the pair counters and the brute-force oracle.
pub fn step_distances_from(
    kind: TessellationKind,
    bc: BoundaryKind,
    dims: &Dims,
    a: Coord,
) -> Vec<u32> {
    let adj = adjacency_indices(kind, bc, dims);
    bfs_distances(&adj, site_index(dims, a))
}

fn merge_histograms(mut acc: PairCounts, other: PairCounts) -> PairCounts {
    for (m, c) in other {
        *acc.entry(m).or_insert(0) += c;
    }
    acc
}

/// Unordered occupied-pair histogram over the metric's full reachable
/// distance set. Counts beyond the analytic distance domain are still
/// present; profile assembly truncates.
///
/// Integer-summed histograms are order-independent, so the parallel and
/// sequential paths are bit-identical.
pub fn count_agent_pairs(grid: &OccupancyGrid, metric: &MetricKind) -> Result<PairCounts> {
    metric.check_compatible(grid.kind())?;
    match metric {
        MetricKind::Taxicab | MetricKind::Uniform => {}
        _ => {
            return Err(Error::UnsupportedCombination(format!(
                "count_agent_pairs handles taxicab/uniform; use annular_bin_counts or rectilinear_counts for {}",
                metric.label()
            )))
        }
    }
    let agents = grid.agents();
    match grid.kind() {
        TessellationKind::Square | TessellationKind::Cube => {
            Ok(count_pairs_axis(grid, metric, &agents))
        }
        TessellationKind::Triangle | TessellationKind::Hexagon => Ok(count_pairs_bfs(grid, &agents)),
    }
}

fn count_pairs_axis(grid: &OccupancyGrid, metric: &MetricKind, agents: &[Coord]) -> PairCounts {
    let dims = *grid.dims();
    let bc = grid.bc();
    let taxicab = matches!(metric, MetricKind::Taxicab);
    let per_source = |i: usize| {
        let mut h = PairCounts::new();
        let a = agents[i];
        for &b in &agents[i + 1..] {
            let (dx, dy, dz) = offsets3(&dims, bc, a, b);
            let m = if taxicab { dx + dy + dz } else { dx.max(dy).max(dz) };
            *h.entry(m).or_insert(0) += 1;
        }
        h
    };
    fold_over_sources(agents.len(), per_source)
}

fn count_pairs_bfs(grid: &OccupancyGrid, agents: &[Coord]) -> PairCounts {
    let dims = *grid.dims();
    let adj = adjacency_indices(grid.kind(), grid.bc(), &dims);
    let agent_indices: Vec<usize> = agents.iter().map(|&c| site_index(&dims, c)).collect();
    let per_source = |i: usize| {
        let mut h = PairCounts::new();
        let dist = bfs_distances(&adj, agent_indices[i]);
        for &j in &agent_indices[i + 1..] {
            let d = dist[j];
            if d != u32::MAX {
                *h.entry(d).or_insert(0) += 1;
            }
        }
        h
    };
    fold_over_sources(agents.len(), per_source)
}

#[cfg(feature = "parallel")]
pub(crate) fn fold_over_sources<F>(n: usize, per_source: F) -> PairCounts
where
    F: Fn(usize) -> PairCounts + Sync + Send,
{
    (0..n)
        .into_par_iter()
        .map(per_source)
        .reduce(PairCounts::new, merge_histograms)
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn fold_over_sources<F>(n: usize, per_source: F) -> PairCounts
where
    F: Fn(usize) -> PairCounts + Sync + Send,
{
    (0..n).map(per_source).fold(PairCounts::new(), merge_histograms)
}

/// Sequential twin of [`count_agent_pairs`], kept callable regardless of the
/// `parallel` feature so the benches can compare both paths.
pub fn count_agent_pairs_sequential(
    grid: &OccupancyGrid,
    metric: &MetricKind,
) -> Result<PairCounts> {
    metric.check_compatible(grid.kind())?;
    let agents = grid.agents();
    let dims = *grid.dims();
    let bc = grid.bc();
    let mut h = PairCounts::new();
    match (grid.kind(), metric) {
        (TessellationKind::Square | TessellationKind::Cube, MetricKind::Taxicab | MetricKind::Uniform) => {
            let taxicab = matches!(metric, MetricKind::Taxicab);
            for (i, &a) in agents.iter().enumerate() {
                for &b in &agents[i + 1..] {
                    let (dx, dy, dz) = offsets3(&dims, bc, a, b);
                    let m = if taxicab { dx + dy + dz } else { dx.max(dy).max(dz) };
                    *h.entry(m).or_insert(0) += 1;
                }
            }
            Ok(h)
        }
        (TessellationKind::Triangle | TessellationKind::Hexagon, MetricKind::Taxicab) => {
            let adj = adjacency_indices(grid.kind(), bc, &dims);
            let idx: Vec<usize> = agents.iter().map(|&c| site_index(&dims, c)).collect();
            for (i, &s) in idx.iter().enumerate() {
                let dist = bfs_distances(&adj, s);
                for &j in &idx[i + 1..] {
                    if dist[j] != u32::MAX {
                        *h.entry(dist[j]).or_insert(0) += 1;
                    }
                }
            }
            Ok(h)
        }
        _ => Err(Error::UnsupportedCombination(format!(
            "count_agent_pairs handles taxicab/uniform; got {}",
            metric.label()
        ))),
    }
}

/// Neighbourhood-walk counter for taxicab/uniform on periodic square/cube
/// grids, restricted to distances `1..=m_cap`. `O(N · t(m_cap))` instead of
/// `O(N²)`; must agree with the pair-iteration path (tested).
pub fn count_agent_pairs_ringwalk(
    grid: &OccupancyGrid,
    metric: &MetricKind,
    m_cap: u32,
) -> Result<PairCounts> {
    if grid.bc() != BoundaryKind::Periodic
        || !matches!(grid.kind(), TessellationKind::Square | TessellationKind::Cube)
        || !matches!(metric, MetricKind::Taxicab | MetricKind::Uniform)
    {
        return Err(Error::UnsupportedCombination(
            "ring-walk counting applies to taxicab/uniform on periodic square/cube grids".into(),
        ));
    }
    let dims = *grid.dims();
    let (lx, ly, lz) = (dims.lx(), dims.ly(), dims.lz());
    let taxicab = matches!(metric, MetricKind::Taxicab);

    // Group all torus offsets by wrapped distance, once per call.
    let mut rings: Vec<Vec<(u32, u32, u32)>> = vec![Vec::new(); m_cap as usize + 1];
    for oz in 0..lz {
        for oy in 0..ly {
            for ox in 0..lx {
                if ox == 0 && oy == 0 && oz == 0 {
                    continue;
                }
                let dx = ox.min(lx - ox);
                let dy = oy.min(ly - oy);
                let dz = oz.min(lz - oz);
                let m = if taxicab { dx + dy + dz } else { dx.max(dy).max(dz) };
                if (1..=m_cap).contains(&m) {
                    rings[m as usize].push((ox, oy, oz));
                }
            }
        }
    }

    let agents = grid.agents();
    let occ = grid.occupancy();
    let per_source = |i: usize| {
        let a = agents[i];
        let mut h = PairCounts::new();
        for (m, ring) in rings.iter().enumerate().skip(1) {
            let mut c = 0u64;
            for &(ox, oy, oz) in ring {
                let x = (a.x - 1 + ox) % lx;
                let y = (a.y - 1 + oy) % ly;
                let z = (a.z - 1 + oz) % lz;
                let idx = (z as usize * ly as usize + y as usize) * lx as usize + x as usize;
                if occ[idx] {
                    c += 1;
                }
            }
            if c > 0 {
                h.insert(m as u32, c);
            }
        }
        h
    };
    let doubled = fold_over_sources(agents.len(), per_source);
    // every unordered pair was seen from both endpoints
    Ok(doubled
        .into_iter()
        .map(|(m, c)| {
            debug_assert!(c % 2 == 0);
            (m, c / 2)
        })
        .collect())
}

/// Euclidean-distance histogram with half-open bins `(kδ − δ, kδ]`, keyed by
/// bin index k. Distances wrap per axis under periodic BC. Squared distances
/// and squared bin edges are compared in exact integer arithmetic.
pub fn annular_bin_counts(grid: &OccupancyGrid, delta: Bandwidth) -> Result<PairCounts> {
    if grid.kind() != TessellationKind::Square {
        return Err(Error::UnsupportedMetric {
            metric: MetricKind::Annular(delta).label(),
            kind: grid.kind().label().to_string(),
        });
    }
    let agents = grid.agents();
    let dims = *grid.dims();
    let bc = grid.bc();
    let per_source = |i: usize| {
        let a = agents[i];
        let mut h = PairCounts::new();
        for &b in &agents[i + 1..] {
            let (dx, dy, _) = offsets3(&dims, bc, a, b);
            let d2 = dx as u64 * dx as u64 + dy as u64 * dy as u64;
            *h.entry(delta.bin_of_squared(d2)).or_insert(0) += 1;
        }
        h
    };
    Ok(fold_over_sources(agents.len(), per_source))
}

/// Column- and row-offset histograms `c_Rx`, `c_Ry` for the Rectilinear PCF.
/// Offsets of zero (same column / same row) are excluded; non-periodic only.
pub fn rectilinear_counts(grid: &OccupancyGrid) -> Result<(PairCounts, PairCounts)> {
    if grid.kind() != TessellationKind::Square {
        return Err(Error::UnsupportedMetric {
            metric: "rectilinear".into(),
            kind: grid.kind().label().to_string(),
        });
    }
    if grid.bc() != BoundaryKind::NonPeriodic {
        return Err(Error::UnsupportedCombination(
            "the rectilinear PCF is defined for non-periodic BC only".into(),
        ));
    }
    // Column/row occupancy marginals make this O(Z + L²) rather than O(N²).
    let dims = grid.dims();
    let (lx, ly) = (dims.lx() as usize, dims.ly() as usize);
    let mut col = vec![0u64; lx];
    let mut row = vec![0u64; ly];
    for c in grid.agents() {
        col[c.x as usize - 1] += 1;
        row[c.y as usize - 1] += 1;
    }
    let mut cx = PairCounts::new();
    let mut cy = PairCounts::new();
    for m in 1..lx {
        let mut t = 0u64;
        for x in 0..lx - m {
            t += col[x] * col[x + m];
        }
        if t > 0 {
            cx.insert(m as u32, t);
        }
    }
    for m in 1..ly {
        let mut t = 0u64;
        for y in 0..ly - m {
            t += row[y] * row[y + m];
        }
        if t > 0 {
            cy.insert(m as u32, t);
        }
    }
    Ok((cx, cy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_grid;

    fn square(lx: u32, ly: u32, bc: BoundaryKind) -> OccupancyGrid {
        make_grid(TessellationKind::Square, Dims::d2(lx, ly).unwrap(), bc).unwrap()
    }

    #[test]
    fn pair_distance_examples() {
        let dims = Dims::d2(5, 5).unwrap();
        let d = pair_distance(
            TessellationKind::Square,
            &MetricKind::Taxicab,
            BoundaryKind::NonPeriodic,
            &dims,
            Coord::xy(1, 1),
            Coord::xy(3, 3),
        )
        .unwrap();
        assert_eq!(d, DistanceValue::Steps(4));

        let dims4 = Dims::d2(4, 4).unwrap();
        let d = pair_distance(
            TessellationKind::Square,
            &MetricKind::Taxicab,
            BoundaryKind::Periodic,
            &dims4,
            Coord::xy(1, 1),
            Coord::xy(4, 4),
        )
        .unwrap();
        assert_eq!(d, DistanceValue::Steps(2));

        let d = pair_distance(
            TessellationKind::Square,
            &MetricKind::Uniform,
            BoundaryKind::NonPeriodic,
            &dims,
            Coord::xy(1, 1),
            Coord::xy(3, 2),
        )
        .unwrap();
        assert_eq!(d, DistanceValue::Steps(2));

        let d3 = Dims::d3(3, 3, 3).unwrap();
        let d = pair_distance(
            TessellationKind::Cube,
            &MetricKind::Uniform,
            BoundaryKind::NonPeriodic,
            &d3,
            Coord::xyz(1, 1, 1),
            Coord::xyz(2, 2, 2),
        )
        .unwrap();
        assert_eq!(d, DistanceValue::Steps(1));
    }

    #[test]
    fn pair_distance_identity_is_zero() {
        let dims = Dims::d2(4, 4).unwrap();
        let d = pair_distance(
            TessellationKind::Hexagon,
            &MetricKind::Taxicab,
            BoundaryKind::NonPeriodic,
            &dims,
            Coord::xy(2, 3),
            Coord::xy(2, 3),
        )
        .unwrap();
        assert_eq!(d, DistanceValue::Steps(0));
    }

    #[test]
    fn incompatible_metric_rejected() {
        let dims = Dims::d2(4, 4).unwrap();
        assert!(pair_distance(
            TessellationKind::Triangle,
            &MetricKind::Uniform,
            BoundaryKind::NonPeriodic,
            &dims,
            Coord::xy(1, 1),
            Coord::xy(2, 2),
        )
        .is_err());
    }

    #[test]
    fn neighbor_counts_by_kind() {
        let dims = Dims::d2(6, 6).unwrap();
        let sq = neighbor_list(TessellationKind::Square, BoundaryKind::NonPeriodic, &dims, Coord::xy(3, 3)).unwrap();
        assert_eq!(sq.len(), 4);
        let hx = neighbor_list(TessellationKind::Hexagon, BoundaryKind::NonPeriodic, &dims, Coord::xy(3, 3)).unwrap();
        assert_eq!(hx.len(), 6);
        let tr = neighbor_list(TessellationKind::Triangle, BoundaryKind::NonPeriodic, &dims, Coord::xy(3, 3)).unwrap();
        assert_eq!(tr.len(), 3);
    }

    #[test]
    fn neighbor_dedup_on_short_periodic_axis() {
        let dims = Dims::d2(2, 2).unwrap();
        let n = neighbor_list(TessellationKind::Square, BoundaryKind::Periodic, &dims, Coord::xy(1, 1)).unwrap();
        assert_eq!(n, vec![Coord::xy(2, 1), Coord::xy(1, 2)]);
    }

    #[test]
    fn count_pairs_full_2x2() {
        let g = square(2, 2, BoundaryKind::NonPeriodic)
            .occupy(&[Coord::xy(1, 1), Coord::xy(2, 1), Coord::xy(1, 2), Coord::xy(2, 2)])
            .unwrap();
        let h = count_agent_pairs(&g, &MetricKind::Taxicab).unwrap();
        assert_eq!(h.get(&1), Some(&4));
        assert_eq!(h.get(&2), Some(&2));
    }

    #[test]
    fn count_pairs_single_agent() {
        let g = square(5, 5, BoundaryKind::Periodic).occupy(&[Coord::xy(3, 3)]).unwrap();
        let h = count_agent_pairs(&g, &MetricKind::Uniform).unwrap();
        assert!(h.is_empty());
    }

    #[test]
    fn count_pairs_chessboard_4x4_periodic() {
        let mut coords = Vec::new();
        for y in 1..=4 {
            for x in 1..=4 {
                if (x + y) % 2 == 0 {
                    coords.push(Coord::xy(x, y));
                }
            }
        }
        let g = square(4, 4, BoundaryKind::Periodic).occupy(&coords).unwrap();
        let h = count_agent_pairs(&g, &MetricKind::Taxicab).unwrap();
        assert_eq!(h.get(&1), None);
        // every distance-2 ring site is same-colour and occupied; on a
        // 4-torus that ring has 6 sites (offset 2 wraps onto one site)
        assert_eq!(h.get(&2), Some(&24));
        assert_eq!(h.get(&4), Some(&4));
        // parity: all pairs of the 8 same-colour agents sit at even distance
        let total: u64 = h.values().sum();
        assert_eq!(total, 8 * 7 / 2);
    }

    #[test]
    fn ringwalk_agrees_with_pair_iteration() {
        let mut coords = Vec::new();
        for y in 1..=6 {
            for x in 1..=6 {
                if (x * 7 + y * 3) % 5 < 2 {
                    coords.push(Coord::xy(x, y));
                }
            }
        }
        let g = square(6, 6, BoundaryKind::Periodic).occupy(&coords).unwrap();
        for metric in [MetricKind::Taxicab, MetricKind::Uniform] {
            let full = count_agent_pairs(&g, &metric).unwrap();
            let walk = count_agent_pairs_ringwalk(&g, &metric, 3).unwrap();
            for m in 1..=3u32 {
                assert_eq!(walk.get(&m), full.get(&m), "m={m} {}", metric.label());
            }
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut coords = Vec::new();
        for y in 1..=8 {
            for x in 1..=8 {
                if (x * 3 + y) % 4 == 0 {
                    coords.push(Coord::xy(x, y));
                }
            }
        }
        let g = square(8, 8, BoundaryKind::Periodic).occupy(&coords).unwrap();
        assert_eq!(
            count_agent_pairs(&g, &MetricKind::Taxicab).unwrap(),
            count_agent_pairs_sequential(&g, &MetricKind::Taxicab).unwrap()
        );
    }

    #[test]
    fn annular_examples() {
        let delta = Bandwidth::parse("1").unwrap();
        let g = square(4, 4, BoundaryKind::NonPeriodic)
            .occupy(&[Coord::xy(1, 1), Coord::xy(2, 2)])
            .unwrap();
        let h = annular_bin_counts(&g, delta).unwrap();
        assert_eq!(h.get(&2), Some(&1)); // sqrt(2) in (1,2]
        assert_eq!(h.get(&1), None);

        let g = square(4, 4, BoundaryKind::NonPeriodic)
            .occupy(&[Coord::xy(1, 1), Coord::xy(2, 1)])
            .unwrap();
        let h = annular_bin_counts(&g, delta).unwrap();
        assert_eq!(h.get(&1), Some(&1));

        let g = square(4, 4, BoundaryKind::Periodic);
        assert!(annular_bin_counts(&g, delta).unwrap().is_empty());
    }

    #[test]
    fn annular_bin_boundaries_exact() {
        // distance exactly 2 with delta=1 goes to bin 2, not 3
        let d = Bandwidth::parse("1").unwrap();
        assert_eq!(d.bin_of_squared(4), 2);
        assert_eq!(d.bin_of_squared(5), 3);
        let half = Bandwidth::parse("0.5").unwrap();
        assert_eq!(half.bin_of_squared(1), 2); // 1.0 in (0.5, 1.0]
        assert_eq!(half.bin_of_squared(2), 3); // sqrt2 ~ 1.414 in (1.0, 1.5]
    }

    #[test]
    fn rectilinear_counts_examples() {
        let mut all = Vec::new();
        for y in 1..=2 {
            for x in 1..=3 {
                all.push(Coord::xy(x, y));
            }
        }
        let g = square(3, 2, BoundaryKind::NonPeriodic).occupy(&all).unwrap();
        let (cx, cy) = rectilinear_counts(&g).unwrap();
        assert_eq!(cx.get(&1), Some(&8)); // 2 column pairs x 2x2 row choices
        assert_eq!(cx.get(&2), Some(&4));
        assert_eq!(cy.get(&1), Some(&9));

        let g = square(3, 2, BoundaryKind::NonPeriodic)
            .occupy(&[Coord::xy(1, 1), Coord::xy(1, 2)])
            .unwrap();
        let (cx, cy) = rectilinear_counts(&g).unwrap();
        assert!(cx.is_empty());
        assert_eq!(cy.get(&1), Some(&1));

        assert!(rectilinear_counts(&square(3, 2, BoundaryKind::Periodic)).is_err());
    }

    #[test]
    fn rectilinear_full_grid_closed_form() {
        let mut all = Vec::new();
        for y in 1..=4 {
            for x in 1..=6 {
                all.push(Coord::xy(x, y));
            }
        }
        let g = square(6, 4, BoundaryKind::NonPeriodic).occupy(&all).unwrap();
        let (cx, _) = rectilinear_counts(&g).unwrap();
        for m in 1..6u32 {
            assert_eq!(cx.get(&m), Some(&(4 * 4 * (6 - m as u64))));
        }
    }
}
