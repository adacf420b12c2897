//! The General PCF: arbitrary tessellations as undirected site graphs with
//! shortest-path distances, plus the bridge from regular grids to graphs
//! used for cross-validation of every analytic normalisation.
//!
//! Distances are computed by per-source breadth-first search, which equals
//! the matrix-power definition `D_{ij} = min{m : (A^m)_{ij} ≠ 0}` on
//! unweighted graphs; the equality is a tested invariant, not an
//! assumption. Disconnected graphs are permitted: profiles cover finite
//! distances and report the unreachable-pair count.

use num::{BigRational, FromPrimitive, Zero};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{BoundaryKind, Dims, OccupancyGrid, TessellationKind};
use crate::metric::{adjacency_indices, bfs_distances, MetricKind, PairCounts};
use crate::profile::{DomainLabel, Normalization, PcfProfile, ProfileEntry, ProfileMeta, Value};

/// Distance matrices larger than this are not materialised; the counting
/// paths stream per BFS frontier instead (Z² memory is the constraint).
pub const MATRIX_CAP: usize = 20_000;

/// An arbitrary site graph with exclusion occupancy: vertices `1..=Z`,
/// symmetric adjacency without self-loops, and an occupied vertex subset.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralLattice {
    adjacency: Vec<Vec<u32>>,
    occupied: Vec<bool>,
}

impl GeneralLattice {
    /// Builds a lattice from 1-based undirected edges. Duplicate edges
    /// collapse; self-loops are rejected.
    pub fn from_edges(z: usize, edges: &[(u32, u32)]) -> Result<GeneralLattice> {
        if z == 0 {
            return Err(Error::InvalidGraph("vertex count must be positive".into()));
        }
        let mut adjacency = vec![Vec::new(); z];
        for &(i, j) in edges {
            if i == j {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
            }
            if i < 1 || j < 1 || i as usize > z || j as usize > z {
                return Err(Error::InvalidGraph(format!(
                    "edge ({i},{j}) out of range 1..={z}"
                )));
            }
            let (a, b) = ((i - 1) as usize, (j - 1) as usize);
            if !adjacency[a].contains(&(b as u32)) {
                adjacency[a].push(b as u32);
                adjacency[b].push(a as u32);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(GeneralLattice {
            adjacency,
            occupied: vec![false; z],
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// 1-based neighbour ids of a 1-based vertex id.
    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        self.adjacency[(v - 1) as usize]
            .iter()
            .map(|&w| w + 1)
            .collect()
    }

    /// Undirected edges as 1-based pairs `(i, j)` with `i < j`.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, list) in self.adjacency.iter().enumerate() {
            for &b in list {
                if (a as u32) < b {
                    out.push((a as u32 + 1, b + 1));
                }
            }
        }
        out
    }

    pub fn occupied_count(&self) -> u64 {
        self.occupied.iter().filter(|b| **b).count() as u64
    }

    pub fn is_occupied(&self, v: u32) -> bool {
        self.occupied[(v - 1) as usize]
    }

    /// Occupied vertex ids (1-based, ascending).
    pub fn occupied_vertices(&self) -> Vec<u32> {
        self.occupied
            .iter()
            .enumerate()
            .filter(|(_, o)| **o)
            .map(|(i, _)| i as u32 + 1)
            .collect()
    }

    pub fn density(&self) -> f64 {
        self.occupied_count() as f64 / self.vertex_count() as f64
    }

    /// Replaces the occupied set. Ids are 1-based; out-of-range ids are
    /// rejected.
    pub fn with_occupied(mut self, vertices: &[u32]) -> Result<GeneralLattice> {
        let z = self.vertex_count();
        self.occupied = vec![false; z];
        for &v in vertices {
            if v < 1 || v as usize > z {
                return Err(Error::InvalidGraph(format!(
                    "occupied vertex {v} out of range 1..={z}"
                )));
            }
            self.occupied[(v - 1) as usize] = true;
        }
        Ok(self)
    }

    pub(crate) fn occupied_mask(&self) -> &[bool] {
        &self.occupied
    }

    pub(crate) fn set_occupied_mask(&mut self, mask: Vec<bool>) {
        debug_assert_eq!(mask.len(), self.adjacency.len());
        self.occupied = mask;
    }

    pub(crate) fn adjacency(&self) -> &[Vec<u32>] {
        &self.adjacency
    }
}

/// Z×Z shortest-path distances; `INFINITE` marks disconnected pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    z: usize,
    data: Vec<u32>,
}

impl DistanceMatrix {
    pub const INFINITE: u32 = u32::MAX;

    pub fn get(&self, i: u32, j: u32) -> u32 {
        self.data[(i as usize - 1) * self.z + (j as usize - 1)]
    }

    pub fn size(&self) -> usize {
        self.z
    }
}

/// Per-source BFS distance matrix realising the min-matrix-power
/// definition. Rejected above [`MATRIX_CAP`] vertices; use [`graph_pcf`],
/// which streams counts without materialising the matrix.
pub fn build_distance_matrix(lattice: &GeneralLattice) -> Result<DistanceMatrix> {
    let z = lattice.vertex_count();
    if z > MATRIX_CAP {
        return Err(Error::MatrixTooLarge { z, cap: MATRIX_CAP });
    }
    let adj = lattice.adjacency();
    let rows = map_sources(z, |s| bfs_distances(adj, s));
    let mut data = Vec::with_capacity(z * z);
    for row in rows {
        data.extend_from_slice(&row);
    }
    Ok(DistanceMatrix { z, data })
}

#[cfg(feature = "parallel")]
fn map_sources<F>(z: usize, per_source: F) -> Vec<Vec<u32>>
where
    F: Fn(usize) -> Vec<u32> + Sync + Send,
{
    (0..z).into_par_iter().map(per_source).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_sources<F>(z: usize, per_source: F) -> Vec<Vec<u32>>
where
    F: Fn(usize) -> Vec<u32> + Sync + Send,
{
    (0..z).map(per_source).collect()
}

/// Histograms over a prebuilt distance matrix: agent pairs `c(m)` and site
/// pairs `s(m)` over finite distances, plus the unreachable pair counts.
pub struct MatrixCounts {
    pub agent_pairs: PairCounts,
    pub site_pairs: PairCounts,
    pub unreachable_agent_pairs: u64,
    pub unreachable_site_pairs: u64,
}

pub fn pair_counts_from_matrix(
    lattice: &GeneralLattice,
    matrix: &DistanceMatrix,
) -> Result<MatrixCounts> {
    let z = lattice.vertex_count();
    if matrix.size() != z {
        return Err(Error::InvalidGraph(format!(
            "distance matrix is {}x{0} but the lattice has {z} vertices",
            matrix.size()
        )));
    }
    let occ = lattice.occupied_mask();
    let mut counts = MatrixCounts {
        agent_pairs: PairCounts::new(),
        site_pairs: PairCounts::new(),
        unreachable_agent_pairs: 0,
        unreachable_site_pairs: 0,
    };
    for i in 0..z {
        for j in i + 1..z {
            let d = matrix.data[i * z + j];
            let occupied_pair = occ[i] && occ[j];
            if d == DistanceMatrix::INFINITE {
                counts.unreachable_site_pairs += 1;
                if occupied_pair {
                    counts.unreachable_agent_pairs += 1;
                }
            } else {
                *counts.site_pairs.entry(d).or_insert(0) += 1;
                if occupied_pair {
                    *counts.agent_pairs.entry(d).or_insert(0) += 1;
                }
            }
        }
    }
    Ok(counts)
}

/// Streaming twin of [`pair_counts_from_matrix`]: per-source BFS without
/// materialising the Z×Z matrix. Used by [`graph_pcf`] and the oracle.
pub fn pair_counts_streaming(lattice: &GeneralLattice) -> MatrixCounts {
    let z = lattice.vertex_count();
    let adj = lattice.adjacency();
    let occ = lattice.occupied_mask();
    // (site histogram, agent histogram, inf sites, inf agents) per source
    let per_source = |i: usize| {
        let dist = bfs_distances(adj, i);
        let mut site = PairCounts::new();
        let mut agent = PairCounts::new();
        let mut inf_sites = 0u64;
        let mut inf_agents = 0u64;
        for j in i + 1..z {
            let d = dist[j];
            let occupied_pair = occ[i] && occ[j];
            if d == u32::MAX {
                inf_sites += 1;
                if occupied_pair {
                    inf_agents += 1;
                }
            } else {
                *site.entry(d).or_insert(0) += 1;
                if occupied_pair {
                    *agent.entry(d).or_insert(0) += 1;
                }
            }
        }
        (site, agent, inf_sites, inf_agents)
    };
    let merged = fold_counts(z, per_source);
    MatrixCounts {
        agent_pairs: merged.1,
        site_pairs: merged.0,
        unreachable_agent_pairs: merged.3,
        unreachable_site_pairs: merged.2,
    }
}

type CountsTuple = (PairCounts, PairCounts, u64, u64);

fn merge_tuple(mut a: CountsTuple, b: CountsTuple) -> CountsTuple {
    for (m, c) in b.0 {
        *a.0.entry(m).or_insert(0) += c;
    }
    for (m, c) in b.1 {
        *a.1.entry(m).or_insert(0) += c;
    }
    a.2 += b.2;
    a.3 += b.3;
    a
}

#[cfg(feature = "parallel")]
fn fold_counts<F>(z: usize, per_source: F) -> CountsTuple
where
    F: Fn(usize) -> CountsTuple + Sync + Send,
{
    (0..z)
        .into_par_iter()
        .map(per_source)
        .reduce(
            || (PairCounts::new(), PairCounts::new(), 0, 0),
            merge_tuple,
        )
}

#[cfg(not(feature = "parallel"))]
fn fold_counts<F>(z: usize, per_source: F) -> CountsTuple
where
    F: Fn(usize) -> CountsTuple + Sync + Send,
{
    (0..z)
        .map(per_source)
        .fold((PairCounts::new(), PairCounts::new(), 0, 0), merge_tuple)
}

/// The General PCF: `f(m) = c(m) / [(N/Z)((N−1)/(Z−1)) s(m)]` over every
/// finite distance with `s(m) > 0`.
pub fn graph_pcf(lattice: &GeneralLattice) -> Result<PcfProfile> {
    let n = lattice.occupied_count();
    if n < 2 {
        return Err(Error::TooFewAgents { n });
    }
    let z = lattice.vertex_count() as u64;
    if z < 2 {
        return Err(Error::TooFewSites { z });
    }
    let counts = pair_counts_streaming(lattice);
    let nn = BigRational::from_u64(n).unwrap() * BigRational::from_u64(n - 1).unwrap();
    let zz = BigRational::from_u64(z).unwrap() * BigRational::from_u64(z - 1).unwrap();
    let occupancy_factor = nn / zz;
    let mut entries = Vec::with_capacity(counts.site_pairs.len());
    for (&m, &s) in &counts.site_pairs {
        let expected = BigRational::from_u64(s).unwrap() * occupancy_factor.clone();
        let count = counts.agent_pairs.get(&m).copied().unwrap_or(0);
        let f = if expected.is_zero() {
            BigRational::zero()
        } else {
            BigRational::from_u64(count).unwrap() / expected.clone()
        };
        entries.push(ProfileEntry {
            m,
            count,
            expected: Value::Exact(expected),
            f: Value::Exact(f),
        });
    }
    Ok(PcfProfile {
        meta: ProfileMeta {
            kind: DomainLabel::Graph,
            metric: MetricKind::Graph,
            bc: None,
            dims: None,
            sites: z,
            agents: Some(n),
            seed: None,
            generator: None,
            normalization: Normalization::Exact,
            unreachable_pairs: counts.unreachable_agent_pairs,
        },
        entries,
    })
}

/// Converts a regular grid to its distance-one adjacency graph. Vertices
/// are numbered in canonical site order; wrapped duplicate edges collapse.
pub fn grid_to_graph(kind: TessellationKind, dims: &Dims, bc: BoundaryKind) -> Result<GeneralLattice> {
    // validate parameters exactly as make_grid does
    let _ = crate::lattice::make_grid(kind, *dims, bc)?;
    let adjacency = adjacency_indices(kind, bc, dims);
    Ok(GeneralLattice {
        occupied: vec![false; adjacency.len()],
        adjacency,
    })
}

/// Grid-to-graph including the grid's occupancy (vertex i occupied iff
/// canonical site i is).
pub fn grid_to_graph_with_occupancy(grid: &OccupancyGrid) -> Result<GeneralLattice> {
    let mut lattice = grid_to_graph(grid.kind(), grid.dims(), grid.bc())?;
    lattice.set_occupied_mask(grid.occupancy().to_vec());
    Ok(lattice)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{make_grid, Coord};
    use crate::metric::neighbor_list;
    use crate::profile::pcf_profile;
    use num::One;

    #[test]
    fn path_graph_distance_matrix() {
        let lat = GeneralLattice::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        let d = build_distance_matrix(&lat).unwrap();
        let expect = [[0, 1, 2], [1, 0, 1], [2, 1, 0]];
        for i in 1..=3u32 {
            for j in 1..=3u32 {
                assert_eq!(d.get(i, j), expect[i as usize - 1][j as usize - 1]);
            }
        }
    }

    #[test]
    fn four_cycle_distances() {
        let lat = GeneralLattice::from_edges(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap();
        let d = build_distance_matrix(&lat).unwrap();
        assert_eq!(d.get(1, 3), 2);
        assert_eq!(d.get(2, 4), 2);
        for (i, j) in [(1, 2), (2, 3), (3, 4), (4, 1)] {
            assert_eq!(d.get(i, j), 1);
        }
    }

    #[test]
    fn grid_graph_distance_matches_taxicab() {
        let dims = Dims::d2(3, 3).unwrap();
        let lat = grid_to_graph(TessellationKind::Square, &dims, BoundaryKind::NonPeriodic).unwrap();
        let d = build_distance_matrix(&lat).unwrap();
        // (1,1) is vertex 1, (3,3) is vertex 9
        assert_eq!(d.get(1, 9), 4);
    }

    #[test]
    fn path_counts_and_disconnected() {
        let lat = GeneralLattice::from_edges(3, &[(1, 2), (2, 3)])
            .unwrap()
            .with_occupied(&[1, 3])
            .unwrap();
        let d = build_distance_matrix(&lat).unwrap();
        let c = pair_counts_from_matrix(&lat, &d).unwrap();
        assert_eq!(c.agent_pairs.get(&2), Some(&1));
        assert_eq!(c.agent_pairs.get(&1), None);
        assert_eq!(c.site_pairs.get(&1), Some(&2));
        assert_eq!(c.site_pairs.get(&2), Some(&1));

        // two components: 2 vertices and 3 vertices
        let lat = GeneralLattice::from_edges(5, &[(1, 2), (3, 4), (4, 5)]).unwrap();
        let c = pair_counts_streaming(&lat);
        assert_eq!(c.unreachable_site_pairs, 2 * 3);
    }

    #[test]
    fn degenerate_graphs_rejected() {
        assert!(GeneralLattice::from_edges(3, &[(1, 1)]).is_err());
        assert!(GeneralLattice::from_edges(3, &[(1, 4)]).is_err());
        // duplicate edges collapse
        let lat = GeneralLattice::from_edges(2, &[(1, 2), (2, 1), (1, 2)]).unwrap();
        assert_eq!(lat.edge_count(), 1);
    }

    #[test]
    fn fully_occupied_graph_pcf_is_unity() {
        let lat = GeneralLattice::from_edges(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])
            .unwrap()
            .with_occupied(&[1, 2, 3, 4, 5])
            .unwrap();
        let p = graph_pcf(&lat).unwrap();
        for e in &p.entries {
            assert_eq!(e.f.as_exact(), Some(&BigRational::one()));
            assert_eq!(e.count as u128, {
                let exp = e.expected.as_exact().unwrap();
                assert!(exp.is_integer());
                exp.to_integer().try_into().unwrap()
            });
        }
    }

    #[test]
    fn wrapped_2x2_graph_deduplicates_edges() {
        let dims = Dims::d2(2, 2).unwrap();
        let lat = grid_to_graph(TessellationKind::Square, &dims, BoundaryKind::Periodic).unwrap();
        assert_eq!(lat.vertex_count(), 4);
        assert_eq!(lat.edge_count(), 4);
        for v in 1..=4 {
            assert_eq!(lat.neighbors(v).len(), 2);
        }
    }

    #[test]
    fn hexagon_interior_degree_six() {
        let dims = Dims::d2(6, 6).unwrap();
        let lat = grid_to_graph(TessellationKind::Hexagon, &dims, BoundaryKind::NonPeriodic).unwrap();
        let g = make_grid(TessellationKind::Hexagon, dims, BoundaryKind::NonPeriodic).unwrap();
        let interior = g.index_of(Coord::xy(3, 3)) as u32 + 1;
        assert_eq!(lat.neighbors(interior).len(), 6);
        let nl = neighbor_list(TessellationKind::Hexagon, BoundaryKind::NonPeriodic, &dims, Coord::xy(3, 3)).unwrap();
        assert_eq!(nl.len(), 6);
    }

    #[test]
    fn equivalence_with_native_taxicab_profile() {
        let dims = Dims::d2(5, 4).unwrap();
        let coords = [
            Coord::xy(1, 1),
            Coord::xy(3, 2),
            Coord::xy(5, 4),
            Coord::xy(2, 3),
            Coord::xy(4, 1),
        ];
        for bc in [BoundaryKind::Periodic, BoundaryKind::NonPeriodic] {
            let grid = make_grid(TessellationKind::Square, dims, bc)
                .unwrap()
                .occupy(&coords)
                .unwrap();
            let native = pcf_profile(&grid, &MetricKind::Taxicab).unwrap();
            let lat = grid_to_graph_with_occupancy(&grid).unwrap();
            let gp = graph_pcf(&lat).unwrap();
            for e in &native.entries {
                let ge = gp.entry(e.m).expect("graph profile covers native domain");
                assert_eq!(ge.count, e.count);
                assert_eq!(ge.expected, e.expected);
                assert_eq!(ge.f, e.f);
            }
        }
    }

    #[test]
    fn site_pair_total_with_infinity() {
        let lat = GeneralLattice::from_edges(6, &[(1, 2), (2, 3), (4, 5)]).unwrap();
        let c = pair_counts_streaming(&lat);
        let finite: u64 = c.site_pairs.values().sum();
        assert_eq!(finite + c.unreachable_site_pairs, 6 * 5 / 2);
    }
}
