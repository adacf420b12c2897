//! PCF profile assembly: `f(m) = c(m) / E[c̄(m)]`, the Rectilinear and
//! Annular comparison PCFs, profile averaging and summary statistics.
//!
//! `f` is carried as an exact rational wherever counts and normalisations
//! are integers (everything except the Annular PCF, whose expectation is an
//! area approximation), so calibration identities like `f ≡ 1` at full
//! occupancy are literal equalities. Values convert to floats only at
//! serialisation.

use std::cmp::Ordering;
use std::fmt;

use num::{BigRational, FromPrimitive, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::{distance_domain, BoundaryKind, Dims, OccupancyGrid, TessellationKind};
use crate::metric::{
    annular_bin_counts, count_agent_pairs, rectilinear_counts, Bandwidth, MetricKind,
};
use crate::norm::{
    expected_annular, expected_pairs, expected_rectilinear, rational_to_f64, site_pairs_analytic,
    Axis,
};

/// A profile value: exact rational for analytically normalised PCFs,
/// floating point for the approximate Annular normalisation.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Real(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => rational_to_f64(r),
            Value::Real(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Real(_) => None,
        }
    }

    fn order(&self, other: &Value) -> Ordering {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

/// One distance entry of a PCF profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileEntry {
    pub m: u32,
    pub count: u64,
    pub expected: Value,
    pub f: Value,
}

/// Which domain a profile was computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainLabel {
    Tessellation(TessellationKind),
    Graph,
}

impl fmt::Display for DomainLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainLabel::Tessellation(k) => f.write_str(k.label()),
            DomainLabel::Graph => f.write_str("graph"),
        }
    }
}

/// Whether the normalisation is an exact combinatorial count or the
/// annular area approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Exact,
    Approximate,
}

/// Provenance metadata carried by every profile; enough to reproduce the
/// computation byte for byte.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileMeta {
    pub kind: DomainLabel,
    pub metric: MetricKind,
    pub bc: Option<BoundaryKind>,
    pub dims: Option<Dims>,
    pub sites: u64,
    /// Agent count; `None` on averaged profiles (inputs may differ).
    pub agents: Option<u64>,
    pub seed: Option<u64>,
    pub generator: Option<String>,
    pub normalization: Normalization,
    /// Unordered pairs at infinite distance (disconnected graphs only).
    pub unreachable_pairs: u64,
}

impl ProfileMeta {
    fn same_domain(&self, other: &ProfileMeta) -> bool {
        self.kind == other.kind
            && self.metric == other.metric
            && self.bc == other.bc
            && self.dims == other.dims
            && self.sites == other.sites
    }
}

/// Per-distance PCF record over a distance domain.
///
/// For primitive profiles `f(m) · expected(m) = count(m)` holds exactly
/// (to one ulp for the float-valued Annular PCF). For averaged or
/// axis-combined profiles, `count`/`expected` are diagnostic sums and `f`
/// is the authoritative (pointwise mean / axis-average) value.
#[derive(Debug, Clone, PartialEq)]
pub struct PcfProfile {
    pub meta: ProfileMeta,
    pub entries: Vec<ProfileEntry>,
}

impl PcfProfile {
    pub fn entry(&self, m: u32) -> Option<&ProfileEntry> {
        self.entries.iter().find(|e| e.m == m)
    }

    pub fn f_at(&self, m: u32) -> Option<&Value> {
        self.entry(m).map(|e| &e.f)
    }

    pub fn max_abs_deviation_from_unity(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| (e.f.to_f64() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

fn require_agents(grid: &OccupancyGrid) -> Result<u64> {
    let n = grid.agent_count();
    if n < 2 {
        return Err(Error::TooFewAgents { n });
    }
    Ok(n)
}

fn ratio(count: u64, expected: &BigRational) -> BigRational {
    if expected.is_zero() {
        BigRational::zero()
    } else {
        BigRational::from_u64(count).expect("u64 fits") / expected.clone()
    }
}

/// Square/Triangle/Hexagon/Cube PCF under the taxicab or uniform metric,
/// over the full analytic distance domain of the grid.
pub fn pcf_profile(grid: &OccupancyGrid, metric: &MetricKind) -> Result<PcfProfile> {
    match metric {
        MetricKind::Taxicab | MetricKind::Uniform => {}
        _ => {
            return Err(Error::UnsupportedCombination(format!(
                "pcf_profile takes taxicab or uniform; use the dedicated {} profile",
                metric.label()
            )))
        }
    }
    let n = require_agents(grid)?;
    let dims = *grid.dims();
    let domain = distance_domain(grid.kind(), metric.clone(), grid.bc(), &dims)?;
    let counts = count_agent_pairs(grid, metric)?;
    let z = grid.total_sites();
    let mut entries = Vec::with_capacity(domain.len());
    for m in domain.iter() {
        let s = site_pairs_analytic(grid.kind(), metric, grid.bc(), &dims, m)?;
        let e = expected_pairs(n, z, &s)?;
        let count = counts.get(&m).copied().unwrap_or(0);
        let f = ratio(count, &e.value);
        entries.push(ProfileEntry {
            m,
            count,
            expected: Value::Exact(e.value),
            f: Value::Exact(f),
        });
    }
    Ok(PcfProfile {
        meta: ProfileMeta {
            kind: DomainLabel::Tessellation(grid.kind()),
            metric: metric.clone(),
            bc: Some(grid.bc()),
            dims: Some(dims),
            sites: z,
            agents: Some(n),
            seed: None,
            generator: None,
            normalization: Normalization::Exact,
            unreachable_pairs: 0,
        },
        entries,
    })
}

/// The three Rectilinear profiles: per-axis `f_Rx`, `f_Ry` and their
/// arithmetic average `f_R` over `m ∈ 1..=min(L_x,L_y)−1`.
#[derive(Debug, Clone)]
pub struct RectilinearProfiles {
    pub x: PcfProfile,
    pub y: PcfProfile,
    pub averaged: PcfProfile,
}

pub fn rectilinear_profile(grid: &OccupancyGrid) -> Result<RectilinearProfiles> {
    let n = require_agents(grid)?;
    let (cx, cy) = rectilinear_counts(grid)?;
    let dims = *grid.dims();
    let z = grid.total_sites();

    let meta = |metric: MetricKind| ProfileMeta {
        kind: DomainLabel::Tessellation(TessellationKind::Square),
        metric,
        bc: Some(BoundaryKind::NonPeriodic),
        dims: Some(dims),
        sites: z,
        agents: Some(n),
        seed: None,
        generator: None,
        normalization: Normalization::Exact,
        unreachable_pairs: 0,
    };

    let axis_profile = |axis: Axis, counts: &std::collections::BTreeMap<u32, u64>| -> Result<PcfProfile> {
        let along = match axis {
            Axis::X => dims.lx(),
            Axis::Y => dims.ly(),
        };
        let mut entries = Vec::new();
        for m in 1..=along - 1 {
            let e = expected_rectilinear(m, axis, n, &dims)?;
            let count = counts.get(&m).copied().unwrap_or(0);
            let f = ratio(count, &e.value);
            entries.push(ProfileEntry {
                m,
                count,
                expected: Value::Exact(e.value),
                f: Value::Exact(f),
            });
        }
        Ok(PcfProfile {
            meta: meta(match axis {
                Axis::X => MetricKind::RectilinearX,
                Axis::Y => MetricKind::RectilinearY,
            }),
            entries,
        })
    };

    let px = axis_profile(Axis::X, &cx)?;
    let py = axis_profile(Axis::Y, &cy)?;

    let half = BigRational::new(1.into(), 2.into());
    let m_max = dims.lx().min(dims.ly()) - 1;
    let mut entries = Vec::new();
    for m in 1..=m_max {
        let ex = px.entry(m).expect("m within x domain");
        let ey = py.entry(m).expect("m within y domain");
        let fx = ex.f.as_exact().expect("rectilinear f is exact");
        let fy = ey.f.as_exact().expect("rectilinear f is exact");
        let f = (fx + fy) * half.clone();
        let expected = ex.expected.as_exact().unwrap() + ey.expected.as_exact().unwrap();
        entries.push(ProfileEntry {
            m,
            count: ex.count + ey.count,
            expected: Value::Exact(expected),
            f: Value::Exact(f),
        });
    }
    let averaged = PcfProfile {
        meta: meta(MetricKind::Rectilinear),
        entries,
    };
    Ok(RectilinearProfiles {
        x: px,
        y: py,
        averaged,
    })
}

/// Annular PCF with bandwidth δ on a periodic square grid. The profile is
/// flagged `Approximate`: its normalisation is the continuum annulus-area
/// estimate, which does not calibrate on a lattice.
pub fn annular_profile(grid: &OccupancyGrid, delta: Bandwidth) -> Result<PcfProfile> {
    if grid.kind() != TessellationKind::Square {
        return Err(Error::UnsupportedMetric {
            metric: MetricKind::Annular(delta).label(),
            kind: grid.kind().label().to_string(),
        });
    }
    if grid.bc() != BoundaryKind::Periodic {
        return Err(Error::UnsupportedCombination(
            "the annular PCF applies to periodic square grids".into(),
        ));
    }
    let n = require_agents(grid)?;
    let dims = *grid.dims();
    let counts = annular_bin_counts(grid, delta)?;
    // cover every bin up to the largest possible wrapped separation
    let max_d2 = {
        let hx = (dims.lx() / 2) as u64;
        let hy = (dims.ly() / 2) as u64;
        hx * hx + hy * hy
    };
    let k_max = delta.bin_of_squared(max_d2).max(1);
    let z = grid.total_sites();
    let mut entries = Vec::with_capacity(k_max as usize);
    for k in 1..=k_max {
        let e = expected_annular(k, delta, n, &dims)?;
        let count = counts.get(&k).copied().unwrap_or(0);
        let expected = e.to_f64();
        let f = if expected == 0.0 { 0.0 } else { count as f64 / expected };
        entries.push(ProfileEntry {
            m: k,
            count,
            expected: Value::Real(expected),
            f: Value::Real(f),
        });
    }
    Ok(PcfProfile {
        meta: ProfileMeta {
            kind: DomainLabel::Tessellation(TessellationKind::Square),
            metric: MetricKind::Annular(delta),
            bc: Some(grid.bc()),
            dims: Some(dims),
            sites: z,
            agents: Some(n),
            seed: None,
            generator: None,
            normalization: Normalization::Approximate,
            unreachable_pairs: 0,
        },
        entries,
    })
}

/// Pointwise arithmetic mean of `f` over profiles sharing a domain
/// (kind, metric, BC, dims and m-range). Counts and expectations are
/// summed as diagnostics. Exact inputs give an exact mean; float inputs
/// are summed in profile order, so the result is deterministic.
pub fn average_profiles(profiles: &[PcfProfile]) -> Result<PcfProfile> {
    let first = profiles
        .first()
        .ok_or_else(|| Error::ProfileMismatch("empty profile list".into()))?;
    for p in &profiles[1..] {
        if !p.meta.same_domain(&first.meta) {
            return Err(Error::ProfileMismatch(
                "kind/metric/bc/dims differ across inputs".into(),
            ));
        }
        if p.entries.len() != first.entries.len()
            || p.entries.iter().zip(&first.entries).any(|(a, b)| a.m != b.m)
        {
            return Err(Error::ProfileMismatch("distance domains differ".into()));
        }
    }
    let r = profiles.len();
    let all_exact = profiles
        .iter()
        .all(|p| p.entries.iter().all(|e| matches!(e.f, Value::Exact(_))));
    let mut entries = Vec::with_capacity(first.entries.len());
    for i in 0..first.entries.len() {
        let m = first.entries[i].m;
        let count: u64 = profiles.iter().map(|p| p.entries[i].count).sum();
        let (expected, f) = if all_exact {
            let mut esum = BigRational::zero();
            let mut fsum = BigRational::zero();
            for p in profiles {
                esum += p.entries[i].expected.as_exact().unwrap();
                fsum += p.entries[i].f.as_exact().unwrap();
            }
            let rr = BigRational::from_usize(r).expect("usize fits");
            (Value::Exact(esum), Value::Exact(fsum / rr))
        } else {
            let mut esum = 0.0;
            let mut fsum = 0.0;
            for p in profiles {
                esum += p.entries[i].expected.to_f64();
                fsum += p.entries[i].f.to_f64();
            }
            (Value::Real(esum), Value::Real(fsum / r as f64))
        };
        entries.push(ProfileEntry { m, count, expected, f });
    }
    Ok(PcfProfile {
        meta: ProfileMeta {
            agents: None,
            seed: None,
            generator: Some(format!("average-of-{r}")),
            ..first.meta.clone()
        },
        entries,
    })
}

/// The first distance at which `f` attains a minimum: the smallest m with
/// `f(m) ≤ f(m+1)` (the last m if `f` decreases throughout). Ties break
/// toward smaller m, so a constant profile gives m = 1. On an aggregated
/// pattern this estimates the aggregate diameter.
///
/// This is the first trough, not the global minimum: on multi-cluster
/// data the profile dips once at the cluster diameter and again (often to
/// exactly zero) in the gaps between cluster shells, and the diameter
/// estimate must not jump to those later gaps.
pub fn first_minimum(profile: &PcfProfile) -> Result<u32> {
    if profile.entries.is_empty() {
        return Err(Error::ProfileMismatch("empty profile".into()));
    }
    for pair in profile.entries.windows(2) {
        if pair[0].f.order(&pair[1].f) != Ordering::Greater {
            return Ok(pair[0].m);
        }
    }
    Ok(profile.entries.last().unwrap().m)
}

/// Convenience: `max_m |f̂(m) − 1|` of an exact profile as a rational.
pub fn max_abs_deviation_exact(profile: &PcfProfile) -> Option<BigRational> {
    let one = BigRational::one();
    profile
        .entries
        .iter()
        .map(|e| e.f.as_exact().map(|f| (f - &one).abs()))
        .collect::<Option<Vec<_>>>()
        .map(|v| v.into_iter().max().unwrap_or_else(BigRational::zero))
}
