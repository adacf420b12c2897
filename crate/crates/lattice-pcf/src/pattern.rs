//! Deterministic and seeded generators for the analysed configurations:
//! uniform random occupancy, chessboard / diagonal stripes / concentric
//! circles, the proliferation agent-based model, perturbed-grid Voronoi
//! lattices, and the aggregation / segregation processes on graphs.
//!
//! Every generator is a pure function of its parameters and seed. The PRNG
//! is pinned to ChaCha8 seeded from the 64-bit seed; acceptance statistics
//! depend only on seed-averaged behaviour, not on the stream itself.

use num::rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};

use crate::error::{Error, Result};
use crate::graph::GeneralLattice;
use crate::lattice::{make_grid, BoundaryKind, Dims, OccupancyGrid, TessellationKind};

/// 64-bit generator seed; identical seed and parameters give bit-identical
/// output.
pub type Seed = u64;

fn rng_for(seed: Seed) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parses a non-negative decimal such as `0.4` into an exact ratio.
pub fn parse_density(s: &str) -> Result<Ratio<u64>> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("cannot parse density `{s}` as a decimal"));
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    let digits_ok = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(bad());
    }
    if frac_part.len() > 12 {
        return Err(Error::InvalidParameter(
            "density supports at most 12 decimal places".into(),
        ));
    }
    let den = 10u64.pow(frac_part.len() as u32);
    let int_val: u64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let frac_val: u64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    Ok(Ratio::new(int_val * den + frac_val, den))
}

fn check_unit_interval(density: Ratio<u64>, allow_zero: bool, allow_one: bool) -> Result<()> {
    let one = Ratio::from_integer(1);
    if density > one || (!allow_one && density == one) {
        return Err(Error::InvalidParameter(format!("density {density} out of range")));
    }
    if !allow_zero && density == Ratio::from_integer(0) {
        return Err(Error::InvalidParameter("density must be positive".into()));
    }
    Ok(())
}

/// Occupies exactly `round(density · Z)` sites chosen uniformly without
/// replacement by a seeded partial Fisher–Yates shuffle over canonical
/// site order.
pub fn gen_uniform_random(
    kind: TessellationKind,
    dims: Dims,
    bc: BoundaryKind,
    density: Ratio<u64>,
    seed: Seed,
) -> Result<OccupancyGrid> {
    check_unit_interval(density, true, true)?;
    let grid = make_grid(kind, dims, bc)?;
    let z = grid.total_sites();
    // nearest integer, ties away from zero
    let n = ((2 * density.numer() * z + density.denom()) / (2 * density.denom())) as usize;
    let mut rng = rng_for(seed);
    let mut sites: Vec<usize> = (0..z as usize).collect();
    for i in 0..n {
        let j = rng.gen_range(i..z as usize);
        sites.swap(i, j);
    }
    Ok(grid.set_occupancy_from_indices(&sites[..n]))
}

/// Axis-balanced deterministic patterns on a square lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pattern {
    /// Occupied iff `x + y` is even; requires even extents.
    Chessboard,
    /// Occupied iff `⌊((x+y) mod 2w)/w⌋ = 0`.
    DiagonalStripes { width: u32 },
    /// Occupied iff `⌊dist((L_x+1)/2, (L_y+1)/2)/spacing⌋` is even.
    ConcentricCircles { spacing: f64 },
}

pub fn gen_deterministic_pattern(
    pattern: Pattern,
    dims: Dims,
    bc: BoundaryKind,
) -> Result<OccupancyGrid> {
    let grid = make_grid(TessellationKind::Square, dims, bc)?;
    let (lx, ly) = (dims.lx(), dims.ly());
    match pattern {
        Pattern::Chessboard => {
            if lx % 2 != 0 || ly % 2 != 0 {
                return Err(Error::InvalidParameter(format!(
                    "chessboard requires even extents, got {dims}"
                )));
            }
        }
        Pattern::DiagonalStripes { width } => {
            if width == 0 {
                return Err(Error::InvalidParameter("stripe width must be positive".into()));
            }
        }
        Pattern::ConcentricCircles { spacing } => {
            if !(spacing > 0.0) {
                return Err(Error::InvalidParameter("circle spacing must be positive".into()));
            }
        }
    }
    let cx = (lx as f64 + 1.0) / 2.0;
    let cy = (ly as f64 + 1.0) / 2.0;
    let mut occ = vec![false; dims.total_sites() as usize];
    for y in 1..=ly {
        for x in 1..=lx {
            let idx = ((y - 1) * lx + (x - 1)) as usize;
            occ[idx] = match pattern {
                Pattern::Chessboard => (x + y) % 2 == 0,
                Pattern::DiagonalStripes { width } => ((x + y) % (2 * width)) / width == 0,
                Pattern::ConcentricCircles { spacing } => {
                    let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
                    (d / spacing).floor() as u64 % 2 == 0
                }
            };
        }
    }
    Ok(grid.set_occupancy_raw(occ))
}

/// The proliferation agent-based model: 16 agents seeded on the
/// `{20,40,60,80}²` sub-grid; each step repeats `n(t)` times — pick one of
/// the agents present at the end of the previous step, pick one of its four
/// von Neumann neighbours, and place a new agent there if the site is
/// empty. Periodic BC, unit time step.
pub fn gen_proliferation(dims: Dims, steps: u32, seed: Seed) -> Result<OccupancyGrid> {
    if dims.is_3d() {
        return Err(Error::InvalidDims("proliferation model is two-dimensional".into()));
    }
    if dims.lx() < 80 || dims.ly() < 80 {
        return Err(Error::InvalidDims(format!(
            "proliferation model seeds agents at coordinates up to 80; got {dims}"
        )));
    }
    let grid = make_grid(TessellationKind::Square, dims, BoundaryKind::Periodic)?;
    let (lx, ly) = (dims.lx(), dims.ly());
    let mut occ = vec![false; dims.total_sites() as usize];
    let mut agents: Vec<(u32, u32)> = Vec::new();
    for y in [20u32, 40, 60, 80] {
        for x in [20u32, 40, 60, 80] {
            occ[((y - 1) * lx + (x - 1)) as usize] = true;
            agents.push((x, y));
        }
    }
    let mut rng = rng_for(seed);
    const DIRS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
    for _ in 0..steps {
        // selection pool is fixed to the agents present at step start
        let n0 = agents.len();
        for _ in 0..n0 {
            let (ax, ay) = agents[rng.gen_range(0..n0)];
            let (dx, dy) = DIRS[rng.gen_range(0..4)];
            let nx = ((ax as i64 - 1 + dx).rem_euclid(lx as i64) + 1) as u32;
            let ny = ((ay as i64 - 1 + dy).rem_euclid(ly as i64) + 1) as u32;
            let idx = ((ny - 1) * lx + (nx - 1)) as usize;
            if !occ[idx] {
                occ[idx] = true;
                agents.push((nx, ny));
            }
        }
    }
    Ok(grid.set_occupancy_raw(occ))
}

struct VoronoiPoint {
    position: Point2<f64>,
    id: u32,
}

impl HasPosition for VoronoiPoint {
    type Scalar = f64;
    fn position(&self) -> Point2<f64> {
        self.position
    }
}

/// Voronoi lattice output: the adjacency graph plus the seed actually used
/// (advanced past degenerate point sets, which are re-perturbed).
#[derive(Debug, Clone)]
pub struct VoronoiLattice {
    pub lattice: GeneralLattice,
    pub effective_seed: Seed,
}

/// Irregular lattice from the Voronoi partition of a perturbed grid:
/// point `(i, j)` moves by independent uniform offsets in `[−Δ/2, Δ/2]`,
/// and cells are adjacent iff their points share a Delaunay edge. Vertex
/// ids follow canonical (row-major) grid order.
pub fn gen_voronoi_lattice(grid_dims: Dims, delta: f64, seed: Seed) -> Result<VoronoiLattice> {
    if grid_dims.is_3d() {
        return Err(Error::InvalidDims("voronoi lattice generator is two-dimensional".into()));
    }
    if grid_dims.lx() < 3 || grid_dims.ly() < 3 {
        return Err(Error::InvalidDims(format!(
            "voronoi lattice needs at least 3x3 points, got {grid_dims}"
        )));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter("perturbation Δ must be positive".into()));
    }
    let (gx, gy) = (grid_dims.lx(), grid_dims.ly());
    let z = (gx * gy) as usize;
    let mut attempt_seed = seed;
    // a duplicate perturbed point would merge two cells; retry with an
    // advanced seed and record it
    for _ in 0..16 {
        let mut rng = rng_for(attempt_seed);
        let mut tri: DelaunayTriangulation<VoronoiPoint> = DelaunayTriangulation::new();
        let mut ok = true;
        let mut id = 0u32;
        'insert: for j in 1..=gy {
            for i in 1..=gx {
                let px = i as f64 + (rng.gen::<f64>() - 0.5) * delta;
                let py = j as f64 + (rng.gen::<f64>() - 0.5) * delta;
                match tri.insert(VoronoiPoint {
                    position: Point2::new(px, py),
                    id,
                }) {
                    Ok(_) => id += 1,
                    Err(_) => {
                        ok = false;
                        break 'insert;
                    }
                }
            }
        }
        if ok && tri.num_vertices() == z {
            let mut edges = Vec::with_capacity(tri.num_undirected_edges());
            for edge in tri.undirected_edges() {
                let [a, b] = edge.vertices();
                edges.push((a.data().id + 1, b.data().id + 1));
            }
            let lattice = GeneralLattice::from_edges(z, &edges)?;
            return Ok(VoronoiLattice {
                lattice,
                effective_seed: attempt_seed,
            });
        }
        attempt_seed = attempt_seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    }
    Err(Error::InvalidParameter(
        "could not build a non-degenerate voronoi point set".into(),
    ))
}

/// Occupancy produced by the aggregation / segregation processes, with the
/// first-crossing density actually achieved.
#[derive(Debug, Clone)]
pub struct ProcessOutcome {
    pub lattice: GeneralLattice,
    pub achieved_density: f64,
}

fn density_reached(occupied: u64, z: u64, target: Ratio<u64>) -> bool {
    // occupied / z >= target, exactly
    occupied as u128 * *target.denom() as u128 >= *target.numer() as u128 * z as u128
}

/// Aggregation: starting empty, repeatedly pick an empty site uniformly at
/// random and occupy it together with all of its neighbours, until the
/// density first reaches the target.
pub fn gen_aggregated(
    lattice: &GeneralLattice,
    target_density: Ratio<u64>,
    seed: Seed,
) -> Result<ProcessOutcome> {
    check_unit_interval(target_density, false, true)?;
    let z = lattice.vertex_count() as u64;
    let mut out = lattice.clone();
    let mut occ = vec![false; z as usize];
    let mut occupied = 0u64;
    let mut rng = rng_for(seed);
    // lazily pruned candidate list of empty sites
    let mut empties: Vec<u32> = (0..z as u32).collect();
    while !density_reached(occupied, z, target_density) {
        let idx = rng.gen_range(0..empties.len());
        let v = empties[idx];
        if occ[v as usize] {
            empties.swap_remove(idx);
            continue;
        }
        occ[v as usize] = true;
        occupied += 1;
        for &w in &lattice.adjacency()[v as usize] {
            if !occ[w as usize] {
                occ[w as usize] = true;
                occupied += 1;
            }
        }
    }
    out.set_occupied_mask(occ);
    Ok(ProcessOutcome {
        achieved_density: occupied as f64 / z as f64,
        lattice: out,
    })
}

/// Segregation: starting full, repeatedly pick an occupied site uniformly
/// at random and vacate all of its occupied neighbours (the picked site
/// stays), until the density first drops to or below the target. If every
/// occupied site has no occupied neighbour while still above the target,
/// the process has stalled and the achieved density is reported as an
/// error.
pub fn gen_segregated(
    lattice: &GeneralLattice,
    target_density: Ratio<u64>,
    seed: Seed,
) -> Result<ProcessOutcome> {
    check_unit_interval(target_density, false, false)?;
    let z = lattice.vertex_count() as u64;
    let mut out = lattice.clone();
    let mut occ = vec![true; z as usize];
    let mut occupied = z;
    let mut rng = rng_for(seed);
    let target_not_yet = |occupied: u64| {
        // still above target: occupied / z > target
        occupied as u128 * *target_density.denom() as u128
            > *target_density.numer() as u128 * z as u128
    };
    let mut candidates: Vec<u32> = (0..z as u32).collect();
    while target_not_yet(occupied) {
        // stall check: no occupied site with an occupied neighbour
        let any_removable = (0..z as usize).any(|v| {
            occ[v] && lattice.adjacency()[v].iter().any(|&w| occ[w as usize])
        });
        if !any_removable {
            return Err(Error::SegregationStalled {
                achieved: occupied as f64 / z as f64,
                target: *target_density.numer() as f64 / *target_density.denom() as f64,
            });
        }
        let idx = rng.gen_range(0..candidates.len());
        let v = candidates[idx];
        if !occ[v as usize] {
            candidates.swap_remove(idx);
            continue;
        }
        for &w in &lattice.adjacency()[v as usize] {
            if occ[w as usize] {
                occ[w as usize] = false;
                occupied -= 1;
            }
        }
    }
    out.set_occupied_mask(occ);
    Ok(ProcessOutcome {
        achieved_density: occupied as f64 / z as f64,
        lattice: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Coord;

    fn half() -> Ratio<u64> {
        Ratio::new(1, 2)
    }

    #[test]
    fn uniform_random_densities() {
        let dims = Dims::d2(10, 10).unwrap();
        let empty = gen_uniform_random(
            TessellationKind::Square,
            dims,
            BoundaryKind::Periodic,
            Ratio::new(0, 1),
            1,
        )
        .unwrap();
        assert_eq!(empty.agent_count(), 0);
        let full = gen_uniform_random(
            TessellationKind::Square,
            dims,
            BoundaryKind::Periodic,
            Ratio::new(1, 1),
            1,
        )
        .unwrap();
        assert_eq!(full.agent_count(), 100);
        let h = gen_uniform_random(
            TessellationKind::Square,
            dims,
            BoundaryKind::Periodic,
            half(),
            7,
        )
        .unwrap();
        assert_eq!(h.agent_count(), 50);
    }

    #[test]
    fn uniform_random_exact_count_100x100() {
        let dims = Dims::d2(100, 100).unwrap();
        let g = gen_uniform_random(
            TessellationKind::Square,
            dims,
            BoundaryKind::Periodic,
            half(),
            42,
        )
        .unwrap();
        assert_eq!(g.agent_count(), 5000);
    }

    #[test]
    fn uniform_random_reproducible() {
        let dims = Dims::d2(12, 9).unwrap();
        let a = gen_uniform_random(TessellationKind::Square, dims, BoundaryKind::NonPeriodic, Ratio::new(3, 10), 99).unwrap();
        let b = gen_uniform_random(TessellationKind::Square, dims, BoundaryKind::NonPeriodic, Ratio::new(3, 10), 99).unwrap();
        assert_eq!(a, b);
        let c = gen_uniform_random(TessellationKind::Square, dims, BoundaryKind::NonPeriodic, Ratio::new(3, 10), 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_random_marginal_occupancy() {
        // P(site occupied) = N/Z by exchangeability; check a fixed site's
        // frequency over many seeds within 4σ binomial bounds.
        let dims = Dims::d2(5, 5).unwrap();
        let density = Ratio::new(3, 10); // N = round(7.5) = 8
        let reps = 2000u32;
        let mut hits = 0u32;
        for seed in 0..reps {
            let g = gen_uniform_random(
                TessellationKind::Square,
                dims,
                BoundaryKind::NonPeriodic,
                density,
                seed as u64,
            )
            .unwrap();
            assert_eq!(g.agent_count(), 8);
            if g.is_occupied(Coord::xy(3, 2)) {
                hits += 1;
            }
        }
        let p = 8.0 / 25.0;
        let sigma = (p * (1.0 - p) / reps as f64).sqrt();
        let freq = hits as f64 / reps as f64;
        assert!(
            (freq - p).abs() <= 4.0 * sigma,
            "freq {freq} vs p {p} (4σ = {})",
            4.0 * sigma
        );
    }

    #[test]
    fn chessboard_constant_marginals() {
        let dims = Dims::d2(4, 4).unwrap();
        let g = gen_deterministic_pattern(Pattern::Chessboard, dims, BoundaryKind::Periodic).unwrap();
        assert_eq!(g.density(), 0.5);
        for y in 1..=4 {
            let row: u32 = (1..=4).map(|x| g.is_occupied(Coord::xy(x, y)) as u32).sum();
            assert_eq!(row, 2);
        }
        for x in 1..=4 {
            let col: u32 = (1..=4).map(|y| g.is_occupied(Coord::xy(x, y)) as u32).sum();
            assert_eq!(col, 2);
        }
        assert!(gen_deterministic_pattern(Pattern::Chessboard, Dims::d2(5, 4).unwrap(), BoundaryKind::Periodic).is_err());
    }

    #[test]
    fn stripes_width_one_is_chessboard_complement_structure() {
        let dims = Dims::d2(6, 6).unwrap();
        let s = gen_deterministic_pattern(Pattern::DiagonalStripes { width: 1 }, dims, BoundaryKind::NonPeriodic).unwrap();
        let c = gen_deterministic_pattern(Pattern::Chessboard, dims, BoundaryKind::NonPeriodic).unwrap();
        for y in 1..=6 {
            for x in 1..=6 {
                // width-1 stripes occupy (x+y) mod 2 == 0: identical sites
                assert_eq!(s.is_occupied(Coord::xy(x, y)), c.is_occupied(Coord::xy(x, y)));
            }
        }
    }

    #[test]
    fn circles_center_site_occupied_on_odd_dims() {
        let dims = Dims::d2(9, 9).unwrap();
        let g = gen_deterministic_pattern(
            Pattern::ConcentricCircles { spacing: 2.0 },
            dims,
            BoundaryKind::NonPeriodic,
        )
        .unwrap();
        assert!(g.is_occupied(Coord::xy(5, 5)));
    }

    #[test]
    fn proliferation_initial_condition() {
        let dims = Dims::d2(100, 100).unwrap();
        let g = gen_proliferation(dims, 0, 5).unwrap();
        assert_eq!(g.agent_count(), 16);
        for y in [20, 40, 60, 80] {
            for x in [20, 40, 60, 80] {
                assert!(g.is_occupied(Coord::xy(x, y)));
            }
        }
    }

    #[test]
    fn proliferation_monotone_and_reproducible() {
        let dims = Dims::d2(100, 100).unwrap();
        let mut prev = 16;
        for steps in 1..=4 {
            let g = gen_proliferation(dims, steps, 11).unwrap();
            assert!(g.agent_count() >= prev);
            prev = g.agent_count();
        }
        assert_eq!(
            gen_proliferation(dims, 3, 11).unwrap(),
            gen_proliferation(dims, 3, 11).unwrap()
        );
    }

    #[test]
    fn voronoi_structure() {
        let dims = Dims::d2(6, 6).unwrap();
        let v = gen_voronoi_lattice(dims, 1.0, 3).unwrap();
        assert_eq!(v.effective_seed, 3);
        let lat = &v.lattice;
        assert_eq!(lat.vertex_count(), 36);
        // symmetric, no self loops by construction; degree >= 2 everywhere
        for v in 1..=36u32 {
            assert!(lat.neighbors(v).len() >= 2);
            assert!(!lat.neighbors(v).contains(&v));
        }
        // same seed, same graph
        let v2 = gen_voronoi_lattice(dims, 1.0, 3).unwrap();
        assert_eq!(lat, &v2.lattice);
    }

    #[test]
    fn voronoi_tiny_perturbation_contains_grid_edges() {
        let dims = Dims::d2(5, 5).unwrap();
        let v = gen_voronoi_lattice(dims, 1e-9, 1).unwrap();
        let lat = &v.lattice;
        // the square-grid 4-neighbourhood must survive as Δ→0
        for j in 0..5u32 {
            for i in 0..5u32 {
                let id = j * 5 + i + 1;
                if i + 1 < 5 {
                    assert!(lat.neighbors(id).contains(&(id + 1)), "missing horizontal edge at {id}");
                }
                if j + 1 < 5 {
                    assert!(lat.neighbors(id).contains(&(id + 5)), "missing vertical edge at {id}");
                }
            }
        }
    }

    #[test]
    fn aggregated_process() {
        let dims = Dims::d2(8, 8).unwrap();
        let v = gen_voronoi_lattice(dims, 1.0, 9).unwrap();
        let full = gen_aggregated(&v.lattice, Ratio::new(1, 1), 4).unwrap();
        assert_eq!(full.lattice.occupied_count(), 64);
        let part = gen_aggregated(&v.lattice, Ratio::new(2, 5), 4).unwrap();
        assert!(part.achieved_density >= 0.4);
        let again = gen_aggregated(&v.lattice, Ratio::new(2, 5), 4).unwrap();
        assert_eq!(part.lattice, again.lattice);
    }

    #[test]
    fn segregated_process() {
        let dims = Dims::d2(8, 8).unwrap();
        let v = gen_voronoi_lattice(dims, 1.0, 9).unwrap();
        let out = gen_segregated(&v.lattice, Ratio::new(2, 5), 4).unwrap();
        assert!(out.achieved_density <= 0.4);
        // protected sites remain occupied: every vacated vertex has an
        // occupied... (weaker check) the occupancy is nonempty and reproducible
        assert!(out.lattice.occupied_count() > 0);
        let again = gen_segregated(&v.lattice, Ratio::new(2, 5), 4).unwrap();
        assert_eq!(out.lattice, again.lattice);
        // unreachable target stalls with the achieved density reported
        let err = gen_segregated(&v.lattice, Ratio::new(1, 1000), 4);
        assert!(matches!(err, Err(Error::SegregationStalled { .. })));
    }
}
