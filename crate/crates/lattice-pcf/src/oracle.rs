//! Independent brute-force enumeration used to validate every analytic
//! formula. The oracle never calls the analytic normaliser; its only shared
//! dependency is the pair-distance machinery, which is itself
//! property-tested against coordinate arithmetic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    distance_domain, site_coord, BoundaryKind, Dims, TessellationKind,
};
use crate::metric::{
    adjacency_indices, bfs_distances, offsets3, MetricKind, PairCounts,
};
use crate::norm::site_pairs_analytic;

/// Default cap on total sites for a single enumeration (12⁴-scale).
pub const DEFAULT_SITE_CAP: u64 = 20_736;

/// Exact unordered site-pair histogram over every reachable distance,
/// by enumeration of all site pairs (or all-sources BFS for the step
/// tessellations). `O(Z²)`; a test-time tool, not a runtime path.
pub fn brute_site_pairs(
    kind: TessellationKind,
    metric: MetricKind,
    bc: BoundaryKind,
    dims: &Dims,
) -> Result<PairCounts> {
    brute_site_pairs_capped(kind, metric, bc, dims, DEFAULT_SITE_CAP)
}

pub fn brute_site_pairs_capped(
    kind: TessellationKind,
    metric: MetricKind,
    bc: BoundaryKind,
    dims: &Dims,
    cap: u64,
) -> Result<PairCounts> {
    metric.check_compatible(kind)?;
    let z = dims.total_sites();
    if z > cap {
        return Err(Error::OracleCapExceeded { z, cap });
    }
    let zu = z as usize;
    let counts = match kind {
        TessellationKind::Square | TessellationKind::Cube => {
            let taxicab = match metric {
                MetricKind::Taxicab => true,
                MetricKind::Uniform => false,
                _ => {
                    return Err(Error::UnsupportedCombination(
                        "brute_site_pairs covers taxicab/uniform".into(),
                    ))
                }
            };
            let dims = *dims;
            crate::metric::fold_over_sources(zu, move |i| {
                let a = site_coord(&dims, i);
                let mut h = PairCounts::new();
                for j in i + 1..zu {
                    let b = site_coord(&dims, j);
                    let (dx, dy, dz) = offsets3(&dims, bc, a, b);
                    let m = if taxicab { dx + dy + dz } else { dx.max(dy).max(dz) };
                    *h.entry(m).or_insert(0) += 1;
                }
                h
            })
        }
        TessellationKind::Triangle | TessellationKind::Hexagon => {
            let adj = adjacency_indices(kind, bc, dims);
            let adj = &adj;
            crate::metric::fold_over_sources(zu, move |i| {
                let dist = bfs_distances(adj, i);
                let mut h = PairCounts::new();
                for &d in dist.iter().skip(i + 1) {
                    if d != u32::MAX && d > 0 {
                        *h.entry(d).or_insert(0) += 1;
                    }
                }
                h
            })
        }
    };
    Ok(counts)
}

/// One comparison point of the oracle sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationRow {
    pub kind: TessellationKind,
    pub metric: MetricKind,
    pub bc: BoundaryKind,
    pub dims: Dims,
    pub m: u32,
    pub analytic: u128,
    pub brute: u64,
    pub matches: bool,
}

/// Exhaustive comparison of the analytic site-pair formulas against brute
/// enumeration; any mismatch is report content, not an exception.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| !r.matches).count()
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches() == 0
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# format=1\nkind,metric,bc,dims,m,analytic,brute,match\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.kind,
                r.metric.label(),
                r.bc,
                r.dims,
                r.m,
                r.analytic,
                r.brute,
                r.matches
            ));
        }
        out
    }
}

/// The sweep grid: inclusive extent ranges per tessellation family.
#[derive(Debug, Clone, Copy)]
pub struct SweepSpec {
    pub planar_extents: (u32, u32),
    pub cube_extents: (u32, u32),
    pub site_cap: u64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            planar_extents: (4, 12),
            cube_extents: (4, 8),
            site_cap: DEFAULT_SITE_CAP,
        }
    }
}

fn sweep_points(spec: &SweepSpec) -> Vec<(TessellationKind, MetricKind, BoundaryKind, Dims)> {
    let (lo, hi) = spec.planar_extents;
    let (clo, chi) = spec.cube_extents;
    let mut pts = Vec::new();
    let bcs = [BoundaryKind::Periodic, BoundaryKind::NonPeriodic];
    for lx in lo..=hi {
        for ly in lo..=hi {
            let dims = Dims::d2(lx, ly).expect("extents >= 4");
            for metric in [MetricKind::Taxicab, MetricKind::Uniform] {
                for bc in bcs {
                    pts.push((TessellationKind::Square, metric, bc, dims));
                }
            }
            for kind in [TessellationKind::Triangle, TessellationKind::Hexagon] {
                for bc in bcs {
                    pts.push((kind, MetricKind::Taxicab, bc, dims));
                }
            }
        }
    }
    for lx in clo..=chi {
        for ly in clo..=chi {
            for lz in clo..=chi {
                let dims = Dims::d3(lx, ly, lz).expect("extents >= 4");
                for metric in [MetricKind::Taxicab, MetricKind::Uniform] {
                    for bc in bcs {
                        pts.push((TessellationKind::Cube, metric, bc, dims));
                    }
                }
            }
        }
    }
    pts
}

/// Runs the full sweep: for every in-scope combination and every m in its
/// declared distance domain, compare [`site_pairs_analytic`] with
/// [`brute_site_pairs`]. Combinations whose domain is empty or whose
/// parameters are outside a formula's validity constraints (odd-`L_x`
/// triangles, odd-extent periodic triangle/hexagon) are skipped, exactly
/// as `distance_domain` rejects them.
pub fn verify_normalization(spec: &SweepSpec) -> Result<ValidationReport> {
    let points = sweep_points(spec);
    let rows: Vec<Vec<ValidationRow>> = run_points(&points, |&(kind, metric, bc, dims)| {
        let domain = match distance_domain(kind, metric, bc, &dims) {
            Ok(d) => d,
            Err(_) => return Ok(Vec::new()),
        };
        let brute = brute_site_pairs_capped(kind, metric, bc, &dims, spec.site_cap)?;
        let mut out = Vec::with_capacity(domain.len());
        for m in domain.iter() {
            let analytic = site_pairs_analytic(kind, &metric, bc, &dims, m)?;
            let b = brute.get(&m).copied().unwrap_or(0);
            out.push(ValidationRow {
                kind,
                metric,
                bc,
                dims,
                m,
                analytic: analytic.s,
                brute: b,
                matches: analytic.s == b as u128,
            });
        }
        Ok(out)
    })?;
    Ok(ValidationReport {
        rows: rows.into_iter().flatten().collect(),
    })
}

#[cfg(feature = "parallel")]
fn run_points<P, F>(points: &[P], f: F) -> Result<Vec<Vec<ValidationRow>>>
where
    P: Sync,
    F: Fn(&P) -> Result<Vec<ValidationRow>> + Sync,
{
    points.par_iter().map(|p| f(p)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_points<P, F>(points: &[P], f: F) -> Result<Vec<Vec<ValidationRow>>>
where
    P: Sync,
    F: Fn(&P) -> Result<Vec<ValidationRow>> + Sync,
{
    points.iter().map(|p| f(p)).collect()
}

/// The machine-readable validity table shipped with the library: the
/// distance-domain constraint confirmed by the sweep for each combination.
pub fn validity_table() -> String {
    let rows = [
        ("square", "taxicab", "periodic", "1 <= m <= min(floor(Lx/2), floor(Ly/2))"),
        ("square", "taxicab", "nonperiodic", "1 <= m <= min(Lx, Ly) - 1"),
        ("square", "uniform", "periodic", "1 <= m <= min(floor(Lx/2), floor(Ly/2))"),
        ("square", "uniform", "nonperiodic", "1 <= m <= min(Lx, Ly) - 1"),
        ("triangle", "taxicab", "periodic", "Lx, Ly even; 1 <= m <= min(Lx/2 - 1, Ly - 1)"),
        ("triangle", "taxicab", "nonperiodic", "Lx even; 1 <= m <= min(Lx, 2*Ly)"),
        ("hexagon", "taxicab", "periodic", "Lx, Ly even; 1 <= m <= min(Lx, Ly)/2 - 1"),
        ("hexagon", "taxicab", "nonperiodic", "1 <= m <= min(Lx, Ly)"),
        ("cube", "taxicab", "periodic", "1 <= m <= min(floor(Lx/2), floor(Ly/2), floor(Lz/2))"),
        ("cube", "taxicab", "nonperiodic", "1 <= m <= min(Lx, Ly, Lz) - 1"),
        ("cube", "uniform", "periodic", "1 <= m <= min(floor(Lx/2), floor(Ly/2), floor(Lz/2))"),
        ("cube", "uniform", "nonperiodic", "1 <= m <= min(Lx, Ly, Lz) - 1"),
    ];
    let mut out = String::from("# format=1\nkind,metric,bc,constraint\n");
    for (k, m, b, c) in rows {
        out.push_str(&format!("{k},{m},{b},\"{c}\"\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_examples() {
        let dims = Dims::d2(4, 4).unwrap();
        let h = brute_site_pairs(TessellationKind::Square, MetricKind::Taxicab, BoundaryKind::Periodic, &dims).unwrap();
        assert_eq!(h.get(&1), Some(&32));
        // m = 2 hits the wrap collapse: 48, not the printed 64
        assert_eq!(h.get(&2), Some(&48));

        let dims6 = Dims::d2(6, 6).unwrap();
        let h = brute_site_pairs(TessellationKind::Square, MetricKind::Uniform, BoundaryKind::Periodic, &dims6).unwrap();
        for m in 1..=2u32 {
            assert_eq!(h.get(&m), Some(&(4 * m as u64 * 36)));
        }

        let c = Dims::d3(4, 4, 4).unwrap();
        let h = brute_site_pairs(TessellationKind::Cube, MetricKind::Taxicab, BoundaryKind::Periodic, &c).unwrap();
        assert_eq!(h.get(&1), Some(&192));
    }

    #[test]
    fn cap_enforced() {
        let dims = Dims::d2(200, 200).unwrap();
        assert!(matches!(
            brute_site_pairs_capped(
                TessellationKind::Square,
                MetricKind::Taxicab,
                BoundaryKind::Periodic,
                &dims,
                1000
            ),
            Err(Error::OracleCapExceeded { .. })
        ));
    }

    #[test]
    fn small_sweep_is_clean() {
        let spec = SweepSpec {
            planar_extents: (4, 6),
            cube_extents: (4, 5),
            site_cap: DEFAULT_SITE_CAP,
        };
        let report = verify_normalization(&spec).unwrap();
        assert!(!report.rows.is_empty());
        let bad: Vec<_> = report.rows.iter().filter(|r| !r.matches).collect();
        assert!(bad.is_empty(), "mismatches: {bad:?}");
    }

    #[test]
    fn corrupted_formula_is_flagged() {
        // negative control: an off-by-one analytic value must not match
        let dims = Dims::d2(5, 5).unwrap();
        let brute = brute_site_pairs(TessellationKind::Square, MetricKind::Taxicab, BoundaryKind::Periodic, &dims).unwrap();
        let analytic = site_pairs_analytic(
            TessellationKind::Square,
            &MetricKind::Taxicab,
            BoundaryKind::Periodic,
            &dims,
            1,
        )
        .unwrap();
        let corrupted = analytic.s + 1;
        assert_ne!(corrupted, *brute.get(&1).unwrap() as u128);
    }
}
