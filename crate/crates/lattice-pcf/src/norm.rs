//! Closed-form site-pair counts `s_d(m)` and expected pair counts
//! `E[c̄_d(m)]` for every tessellation/metric/BC combination, plus the
//! Annular and Rectilinear expectations.
//!
//! All counts are unordered. Every formula is evaluated in exact integer
//! arithmetic; divisions happen only after the numerator is checked
//! divisible. The oracle sweep (`crate::oracle`) verifies each closed form
//! against brute enumeration over its declared distance domain.

use std::f64::consts::PI;

use num::{BigInt, BigRational};

use crate::error::{Error, Result};
use crate::lattice::{distance_domain, BoundaryKind, Dims, TessellationKind};
use crate::metric::{Bandwidth, MetricKind};

/// Number of unordered site pairs at distance m, regardless of occupancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SitePairCount {
    pub m: u32,
    pub s: u128,
}

/// Expected unordered occupied-pair count under uniform random placement.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedCount {
    pub m: u32,
    pub value: BigRational,
}

impl ExpectedCount {
    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.value)
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn exact_div(n: i128, d: i128, what: &str) -> i128 {
    assert!(
        n % d == 0,
        "integrality violated: {what} numerator {n} not divisible by {d}"
    );
    n / d
}

/// Raw closed forms from the normalisation table, one function per
/// tessellation/metric/BC row. These evaluate the algebra for any extents;
/// use [`site_pairs_analytic`] for the domain-checked entry point.
pub mod formulas {
    use super::exact_div;

    fn collapse(m: i128, l: i128) -> i128 {
        // a per-axis offset of exactly L/2 wraps to a single site, not two
        i128::from(2 * m == l)
    }

    /// Periodic square taxicab: `2mL_xL_y`, corrected at `m = L/2`.
    pub fn square_taxicab_periodic(m: u32, lx: u32, ly: u32) -> i128 {
        let (m, lx, ly) = (m as i128, lx as i128, ly as i128);
        let z = lx * ly;
        2 * m * z - exact_div(z * (collapse(m, lx) + collapse(m, ly)), 2, "sq tax periodic")
    }

    /// Periodic square uniform: `4mL_xL_y`, corrected at `m = L/2`.
    pub fn square_uniform_periodic(m: u32, lx: u32, ly: u32) -> i128 {
        let (m, lx, ly) = (m as i128, lx as i128, ly as i128);
        let z = lx * ly;
        let ring = (2 * m + 1 - collapse(m, lx)) * (2 * m + 1 - collapse(m, ly))
            - (2 * m - 1) * (2 * m - 1);
        exact_div(z * ring, 2, "sq uni periodic")
    }

    /// Non-periodic square taxicab: `2mL_xL_y − (L_x+L_y)m² + (m³−m)/3`.
    pub fn square_taxicab_nonperiodic(m: u32, lx: u32, ly: u32) -> i128 {
        let (m, lx, ly) = (m as i128, lx as i128, ly as i128);
        2 * m * lx * ly - (lx + ly) * m * m + exact_div(m * m * m - m, 3, "sq tax nonperiodic")
    }

    /// Non-periodic square uniform: `4mL_xL_y − 3(L_x+L_y)m² + 2m³`.
    pub fn square_uniform_nonperiodic(m: u32, lx: u32, ly: u32) -> i128 {
        let (m, lx, ly) = (m as i128, lx as i128, ly as i128);
        4 * m * lx * ly - 3 * (lx + ly) * m * m + 2 * m * m * m
    }

    /// Periodic triangle: `3mL_xL_y/2`.
    pub fn triangle_periodic(m: u32, lx: u32, ly: u32) -> i128 {
        let (m, lx, ly) = (m as i128, lx as i128, ly as i128);
        exact_div(3 * m * lx * ly, 2, "triangle periodic")
    }

    /// Non-periodic triangle; three cases with `k_j = ⌊(m−j)/4⌋`. Requires
    /// even `L_x` (odd `L_x` makes the closed form non-integral).
    pub fn triangle_nonperiodic(m: u32, lx: u32, ly: u32) -> i128 {
        let (m, lx, ly) = (m as i128, lx as i128, ly as i128);
        match m {
            1 => exact_div(3 * lx * ly - lx - 2 * ly, 2, "triangle m=1"),
            2 => 3 * lx * ly - 2 * lx - 4 * ly + 2,
            _ => {
                let kf = |j: i128| (m - j).div_euclid(4);
                let (k3, k6, k7) = (kf(3), kf(6), kf(7));
                exact_div(3 * m * lx * ly, 2, "triangle bulk")
                    - exact_div(lx * m * m, 2, "triangle x-term")
                    + ly * (2 * k6 * (k6 - 2 * k3 + 1) + k3 * (m - 6) - m * m + m - 2)
                    + exact_div((m - 1) * (m * m - 2 * m + 6), 3, "triangle c1")
                    - exact_div((k7 + 1) * (20 * k7 * k7 + 37 * k7 + 12), 3, "triangle c2")
                    - (m - 7 - 4 * k7) * (k7 + 1) * (m + k7 - 2)
            }
        }
    }

    /// Periodic hexagon: `3mL_xL_y`.
    pub fn hexagon_periodic(m: u32, lx: u32, ly: u32) -> i128 {
        let (m, lx, ly) = (m as i128, lx as i128, ly as i128);
        3 * m * lx * ly
    }

    /// Non-periodic hexagon, `k = m mod 2`:
    /// `3mL_xL_y − (7m²+k)L_x/4 − 2m²L_y + 11m³/12 − (2−3k)m/12`.
    pub fn hexagon_nonperiodic(m: u32, lx: u32, ly: u32) -> i128 {
        let (m, lx, ly) = (m as i128, lx as i128, ly as i128);
        let k = m % 2;
        // gather the /4 and /12 parts over a common denominator of 12
        let twelfths =
            -3 * (7 * m * m + k) * lx + 11 * m * m * m - (2 - 3 * k) * m;
        3 * m * lx * ly - 2 * m * m * ly + exact_div(twelfths, 12, "hexagon")
    }

    /// Periodic cube taxicab: `(2m²+1)L_xL_yL_z`, corrected at `m = L/2`.
    pub fn cube_taxicab_periodic(m: u32, lx: u32, ly: u32, lz: u32) -> i128 {
        let (m, lx, ly, lz) = (m as i128, lx as i128, ly as i128, lz as i128);
        let z = lx * ly * lz;
        let corr = collapse(m, lx) + collapse(m, ly) + collapse(m, lz);
        (2 * m * m + 1) * z - exact_div(z * corr, 2, "cube tax periodic")
    }

    /// Periodic cube uniform: `(12m²+1)L_xL_yL_z`, corrected at `m = L/2`.
    pub fn cube_uniform_periodic(m: u32, lx: u32, ly: u32, lz: u32) -> i128 {
        let (m, lx, ly, lz) = (m as i128, lx as i128, ly as i128, lz as i128);
        let z = lx * ly * lz;
        let ring = (2 * m + 1 - collapse(m, lx))
            * (2 * m + 1 - collapse(m, ly))
            * (2 * m + 1 - collapse(m, lz))
            - (2 * m - 1).pow(3);
        exact_div(z * ring, 2, "cube uni periodic")
    }

    /// Non-periodic cube taxicab.
    pub fn cube_taxicab_nonperiodic(m: u32, lx: u32, ly: u32, lz: u32) -> i128 {
        let (m, lx, ly, lz) = (m as i128, lx as i128, ly as i128, lz as i128);
        let z = lx * ly * lz;
        let faces = lx * ly + ly * lz + lz * lx;
        let edges = lx + ly + lz;
        // corner term −m⁵/30 + m³/6 − 2m/15 = −(m⁵ − 5m³ + 4m)/30
        (2 * m * m + 1) * z
            - exact_div((2 * m * m * m + m) * faces, 3, "cube tax faces")
            + exact_div(m * m * (m * m - 1) * edges, 6, "cube tax edges")
            - exact_div(m.pow(5) - 5 * m.pow(3) + 4 * m, 30, "cube tax corner")
    }

    /// Non-periodic cube uniform.
    pub fn cube_uniform_nonperiodic(m: u32, lx: u32, ly: u32, lz: u32) -> i128 {
        let (m, lx, ly, lz) = (m as i128, lx as i128, ly as i128, lz as i128);
        let z = lx * ly * lz;
        let faces = lx * ly + ly * lz + lz * lx;
        let edges = lx + ly + lz;
        (12 * m * m + 1) * z - m * (8 * m * m + 1) * faces + m * m * (5 * m * m + 1) * edges
            - m.pow(3) * (3 * m * m + 1)
    }
}

/// Exact unordered site-pair count at distance m, for m inside the
/// declared distance domain of the combination.
pub fn site_pairs_analytic(
    kind: TessellationKind,
    metric: &MetricKind,
    bc: BoundaryKind,
    dims: &Dims,
    m: u32,
) -> Result<SitePairCount> {
    match metric {
        MetricKind::Taxicab | MetricKind::Uniform => {}
        _ => {
            return Err(Error::UnsupportedCombination(format!(
                "site_pairs_analytic covers taxicab/uniform; {} has its own expectation",
                metric.label()
            )))
        }
    }
    let domain = distance_domain(kind, metric.clone(), bc, dims)?;
    if !domain.contains(m) {
        return Err(Error::DistanceOutOfDomain {
            m,
            m_max: domain.m_max,
        });
    }
    let (lx, ly, lz) = (dims.lx(), dims.ly(), dims.lz());
    let taxicab = matches!(metric, MetricKind::Taxicab);
    let s = match (kind, bc, taxicab) {
        (TessellationKind::Square, BoundaryKind::Periodic, true) => {
            formulas::square_taxicab_periodic(m, lx, ly)
        }
        (TessellationKind::Square, BoundaryKind::Periodic, false) => {
            formulas::square_uniform_periodic(m, lx, ly)
        }
        (TessellationKind::Square, BoundaryKind::NonPeriodic, true) => {
            formulas::square_taxicab_nonperiodic(m, lx, ly)
        }
        (TessellationKind::Square, BoundaryKind::NonPeriodic, false) => {
            formulas::square_uniform_nonperiodic(m, lx, ly)
        }
        (TessellationKind::Triangle, BoundaryKind::Periodic, _) => {
            formulas::triangle_periodic(m, lx, ly)
        }
        (TessellationKind::Triangle, BoundaryKind::NonPeriodic, _) => {
            formulas::triangle_nonperiodic(m, lx, ly)
        }
        (TessellationKind::Hexagon, BoundaryKind::Periodic, _) => {
            formulas::hexagon_periodic(m, lx, ly)
        }
        (TessellationKind::Hexagon, BoundaryKind::NonPeriodic, _) => {
            formulas::hexagon_nonperiodic(m, lx, ly)
        }
        (TessellationKind::Cube, BoundaryKind::Periodic, true) => {
            formulas::cube_taxicab_periodic(m, lx, ly, lz)
        }
        (TessellationKind::Cube, BoundaryKind::Periodic, false) => {
            formulas::cube_uniform_periodic(m, lx, ly, lz)
        }
        (TessellationKind::Cube, BoundaryKind::NonPeriodic, true) => {
            formulas::cube_taxicab_nonperiodic(m, lx, ly, lz)
        }
        (TessellationKind::Cube, BoundaryKind::NonPeriodic, false) => {
            formulas::cube_uniform_nonperiodic(m, lx, ly, lz)
        }
    };
    debug_assert!(s >= 0, "negative site-pair count for {kind}/{bc:?} m={m} at {dims}");
    Ok(SitePairCount { m, s: s as u128 })
}

/// `E[c̄(m)] = (N/Z) · ((N−1)/(Z−1)) · s(m)`, exact.
pub fn expected_pairs(n: u64, z: u64, s: &SitePairCount) -> Result<ExpectedCount> {
    if z < 2 {
        return Err(Error::TooFewSites { z });
    }
    if n > z {
        return Err(Error::TooManyAgents { n, z });
    }
    let num = BigInt::from(n) * BigInt::from(n.saturating_sub(1)) * BigInt::from(s.s);
    let den = BigInt::from(z) * BigInt::from(z - 1);
    Ok(ExpectedCount {
        m: s.m,
        value: BigRational::new(num, den),
    })
}

/// Rectilinear expectation along one axis:
/// `E[c̄_Rx(m)] = (N/Z)((N−1)/(Z−1)) · L_y²(L_x−m)` (x-axis; y analogous).
///
/// The printed normalisation is already consistent with unordered pair
/// counts: at full occupancy it equals the unordered count exactly, so no
/// halving is applied.
pub fn expected_rectilinear(m: u32, axis: Axis, n: u64, dims: &Dims) -> Result<ExpectedCount> {
    if dims.is_3d() {
        return Err(Error::UnsupportedCombination(
            "rectilinear expectation is defined on square lattices".into(),
        ));
    }
    let (along, across) = match axis {
        Axis::X => (dims.lx(), dims.ly()),
        Axis::Y => (dims.ly(), dims.lx()),
    };
    if m < 1 || m > along - 1 {
        return Err(Error::DistanceOutOfDomain { m, m_max: along - 1 });
    }
    let z = dims.total_sites();
    if n > z {
        return Err(Error::TooManyAgents { n, z });
    }
    let sites = BigInt::from(across) * BigInt::from(across) * BigInt::from(along - m);
    let num = BigInt::from(n) * BigInt::from(n.saturating_sub(1)) * sites;
    let den = BigInt::from(z) * BigInt::from(z - 1);
    Ok(ExpectedCount {
        m,
        value: BigRational::new(num, den),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Annular expectation for bin k (right edge m = kδ), halved to the
/// unordered convention: `N(N−1)·2π(kδ)δ / (2 L_xL_y)`.
///
/// This is the approximation as printed — intentionally miscalibrated on a
/// lattice; the artifact demonstrates the flaw.
pub fn expected_annular(m_bin: u32, delta: Bandwidth, n: u64, dims: &Dims) -> Result<ExpectedCount> {
    if dims.is_3d() {
        return Err(Error::UnsupportedCombination(
            "annular expectation is defined on square lattices".into(),
        ));
    }
    if m_bin < 1 {
        return Err(Error::DistanceOutOfDomain { m: m_bin, m_max: u32::MAX });
    }
    let z = dims.total_sites();
    if n > z {
        return Err(Error::TooManyAgents { n, z });
    }
    let d = delta.value();
    let value = n as f64 * n.saturating_sub(1) as f64 * PI * (m_bin as f64 * d) * d / z as f64;
    // carried as a rational approximation of an inherently irrational quantity
    Ok(ExpectedCount {
        m: m_bin,
        value: BigRational::from_float(value).unwrap_or_else(|| BigRational::from_integer(0.into())),
    })
}
