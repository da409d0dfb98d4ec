//! Entropy curves, the 3-photon error region, the concave envelope of the
//! phase-error entropy, thresholds and key rates.
//!
//! Curves used throughout:
//!
//! * `h(x)`: binary entropy (bits).
//! * `h12(e)`: phase-error entropy for 1- and 2-photon events,
//!   e + (1−e)·h(e / (2(1−e))).
//! * `h3(e_b, e_y)`: phase-error entropy for 3-photon events given the
//!   fictitious Ỹ error rate.
//!
//! The upper bound on H(Z|X) follows `h12` up to the abscissa `e_d`, then
//! the tangent from (e_d, h12(e_d)) through the triangle vertex
//! (1/4, h3(1/4, 1/3)).

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hull::{upper_hull, UpperHull};
use crate::photon::MinErrorRow;
use crate::roots::{bisect_root, golden_section_max};
use crate::symmetry::{ErrorModel, RCoefficients};

/// Bisection width for thresholds and tangent abscissae.
pub const TOL_BISECT: f64 = 1e-10;

/// Triangle vertices in the (e_b, e_ỹ) plane.
pub const VERTEX_LOW: ErrorPoint = ErrorPoint {
    e_b: 0.25,
    e_y: 1.0 / 3.0,
};
pub const VERTEX_TOP: ErrorPoint = ErrorPoint {
    e_b: 7.0 / 12.0,
    e_y: 2.0 / 3.0,
};
pub const VERTEX_RIGHT: ErrorPoint = ErrorPoint {
    e_b: 0.75,
    e_y: 0.5,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorPoint {
    pub e_b: f64,
    pub e_y: f64,
}

fn domain(what: &'static str, value: f64, domain: &'static str) -> Error {
    Error::DomainError {
        what,
        value,
        domain,
    }
}

/// Binary entropy without domain checks; 0·log 0 = 0.
pub(crate) fn h(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        0.0
    } else {
        -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
    }
}

/// h(x) = −x log2 x − (1−x) log2(1−x) on [0, 1].
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("x", x, "[0, 1]"));
    }
    Ok(h(x))
}

/// h'(x) = log2((1−x)/x) on (0, 1).
pub fn binary_entropy_derivative(x: f64) -> f64 {
    ((1.0 - x) / x).log2()
}

pub(crate) fn h12_unchecked(e: f64) -> f64 {
    e + (1.0 - e) * h(e / (2.0 * (1.0 - e)))
}

/// Phase-error entropy of 1- and 2-photon events on [0, 1/2].
pub fn h12(e_b: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&e_b) {
        return Err(domain("e_b", e_b, "[0, 1/2]"));
    }
    Ok(h12_unchecked(e_b))
}

/// d h12/de = 1 − h(x) + h'(x)/(2(1−e)) with x = e/(2(1−e)), on (0, 1/2).
pub fn h12_prime(e_b: f64) -> f64 {
    let x = e_b / (2.0 * (1.0 - e_b));
    1.0 - h(x) + binary_entropy_derivative(x) / (2.0 * (1.0 - e_b))
}

pub(crate) fn h3_unchecked(e_b: f64, e_y: f64) -> f64 {
    let a = ((2.0 * e_b - e_y) / (2.0 * e_b)).clamp(0.0, 1.0);
    let b = (e_y / (2.0 - 2.0 * e_b)).clamp(0.0, 1.0);
    e_b * h(a) + (1.0 - e_b) * h(b)
}

/// Phase-error entropy of 3-photon events:
/// e_b·h((2e_b − e_ỹ)/(2e_b)) + (1−e_b)·h(e_ỹ/(2 − 2e_b)).
pub fn h3(e_b: f64, e_y: f64) -> Result<f64> {
    if !(e_b > 0.0 && e_b < 1.0) {
        return Err(domain("e_b", e_b, "(0, 1)"));
    }
    const SLACK: f64 = 1e-12;
    let a = (2.0 * e_b - e_y) / (2.0 * e_b);
    let b = e_y / (2.0 - 2.0 * e_b);
    if !(-SLACK..=1.0 + SLACK).contains(&a) {
        return Err(domain("(2e_b - e_y)/(2e_b)", a, "[0, 1]"));
    }
    if !(-SLACK..=1.0 + SLACK).contains(&b) {
        return Err(domain("e_y/(2 - 2e_b)", b, "[0, 1]"));
    }
    Ok(h3_unchecked(e_b, e_y))
}

/// Box parameters of the symmetrized 3-photon state:
/// r0 = ut(1+s)/6, r1 = ut(1−s)/6, r2 = u(1−t)/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionParams {
    pub u: f64,
    pub t: f64,
    pub s: f64,
}

impl RegionParams {
    pub fn new(u: f64, t: f64, s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&u) {
            return Err(domain("u", u, "[0, 1]"));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(domain("t", t, "[0, 1]"));
        }
        if !(-1.0..=1.0).contains(&s) {
            return Err(domain("s", s, "[-1, 1]"));
        }
        Ok(Self { u, t, s })
    }

    pub fn coefficients(&self) -> RCoefficients {
        let Self { u, t, s } = *self;
        RCoefficients::normalized(u * t * (1.0 + s) / 6.0, u * t * (1.0 - s) / 6.0, u * (1.0 - t) / 2.0)
    }
}

pub fn region_map(p: &RegionParams, model: &ErrorModel) -> Result<ErrorPoint> {
    model.error_rates(&p.coefficients())
}

/// (lower, upper) edge of the triangle at `e_b`:
/// lower e_b/3 + 1/4; upper e_b + 1/12 up to 7/12, then 5/4 − e_b.
pub fn region_bounds(e_b: f64) -> Result<(f64, f64)> {
    if !(0.25..=0.75).contains(&e_b) {
        return Err(domain("e_b", e_b, "[1/4, 3/4]"));
    }
    let lower = e_b / 3.0 + 0.25;
    let upper = if e_b <= 7.0 / 12.0 {
        e_b + 1.0 / 12.0
    } else {
        1.25 - e_b
    };
    Ok((lower, upper))
}

pub fn in_triangle(pt: &ErrorPoint, tol: f64) -> bool {
    if pt.e_b < 0.25 - tol || pt.e_b > 0.75 + tol {
        return false;
    }
    let e = pt.e_b.clamp(0.25, 0.75);
    let (lo, hi) = region_bounds(e).expect("clamped");
    pt.e_y >= lo - tol && pt.e_y <= hi + tol
}

/// max over the feasible column of h3(e_b, ·); returns (e_ỹ*, value).
pub fn argmax_h3_at(e_b: f64) -> Result<(f64, f64)> {
    let (lo, hi) = region_bounds(e_b)?;
    Ok(golden_section_max(|y| h3_unchecked(e_b, y), lo, hi, 1e-10))
}

pub fn max_h3_at(e_b: f64) -> Result<f64> {
    Ok(argmax_h3_at(e_b)?.1)
}

/// Tangent to h12 at its crossing B with 1 − h.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TangentAtB {
    pub e_b: f64,
    /// h(e_B), the ordinate printed for B in the literature.
    pub h_at_b: f64,
    /// 1 − h(e_B) = h12(e_B), the actual crossing ordinate.
    pub one_minus_h_at_b: f64,
    pub slope: f64,
    pub intercept: f64,
    /// Where this tangent meets h on (e_B, 1/2).
    pub e_c: f64,
}

pub fn tangent_at_b() -> Result<TangentAtB> {
    let e_b = bisect_root(|e| h12_unchecked(e) - (1.0 - h(e)), 0.01, 0.25, TOL_BISECT)?;
    let slope = h12_prime(e_b);
    let intercept = h12_unchecked(e_b) - slope * e_b;
    let e_c = bisect_root(|e| h(e) - (slope * e + intercept), e_b + 1e-6, 0.5, TOL_BISECT)?;
    Ok(TangentAtB {
        e_b,
        h_at_b: h(e_b),
        one_minus_h_at_b: 1.0 - h(e_b),
        slope,
        intercept,
        e_c,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Envelope {
    /// Tangent abscissa D.
    pub e_d: f64,
    pub h_at_d: f64,
    pub slope: f64,
    pub intercept: f64,
    /// h3(1/4, 1/3), the line's value at e_b = 1/4.
    pub v3: f64,
    /// Where the line meets h beyond D: photon numbers whose minimum bit
    /// error exceeds this cannot raise the envelope.
    pub neglect_edge: f64,
}

impl Envelope {
    pub fn line(&self, e: f64) -> f64 {
        self.slope * e + self.intercept
    }

    fn value(&self, e: f64) -> f64 {
        if e <= self.e_d {
            h12_unchecked(e)
        } else {
            self.line(e)
        }
    }
}

pub fn tangent_envelope() -> Result<Envelope> {
    let v3 = h3(VERTEX_LOW.e_b, VERTEX_LOW.e_y)?;
    let e_d = bisect_root(
        |e| h12_unchecked(e) + h12_prime(e) * (0.25 - e) - v3,
        0.05,
        0.2,
        TOL_BISECT,
    )?;
    let slope = h12_prime(e_d);
    let h_at_d = h12_unchecked(e_d);
    let intercept = h_at_d - slope * e_d;
    let neglect_edge = bisect_root(|e| h(e) - (slope * e + intercept), e_d, 0.5, TOL_BISECT)?;
    Ok(Envelope {
        e_d,
        h_at_d,
        slope,
        intercept,
        v3,
        neglect_edge,
    })
}

/// Piecewise upper bound on H(Z|X) for e_b ∈ [0, 1/4].
pub fn hzx_upper(e_b: f64, env: &Envelope) -> Result<f64> {
    if !(0.0..=0.25).contains(&e_b) {
        return Err(domain("e_b", e_b, "[0, 1/4]"));
    }
    Ok(env.value(e_b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    /// Six-state with threshold detectors (envelope over N = 1, 2, 3).
    SixstateThreshold,
    /// Qubit-based six-state.
    SixstateQubit,
    Bb84,
}

impl Protocol {
    pub const ALL: [Protocol; 3] = [Protocol::SixstateThreshold, Protocol::SixstateQubit, Protocol::Bb84];

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::SixstateThreshold => "sixstate-threshold",
            Protocol::SixstateQubit => "sixstate-qubit",
            Protocol::Bb84 => "bb84",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownProtocol(pub String);

impl fmt::Display for UnknownProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unknown protocol '{}' (expected sixstate-threshold, sixstate-qubit or bb84)",
            self.0
        )
    }
}

impl std::error::Error for UnknownProtocol {}

impl FromStr for Protocol {
    type Err = UnknownProtocol;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Protocol::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| UnknownProtocol(s.to_string()))
    }
}

/// Bit error rate at which the key rate 1 − h(e) − H(Z|X) reaches zero.
pub fn threshold(protocol: Protocol) -> Result<f64> {
    let root = match protocol {
        Protocol::SixstateThreshold => {
            let env = tangent_envelope()?;
            bisect_root(|e| 1.0 - h(e) - env.value(e), 0.0, 0.25, TOL_BISECT)?
        }
        Protocol::SixstateQubit => {
            bisect_root(|e| 1.0 - h(e) - h12_unchecked(e), 0.0, 0.25, TOL_BISECT)?
        }
        Protocol::Bb84 => bisect_root(|e| 1.0 - 2.0 * h(e), 0.0, 0.5, TOL_BISECT)?,
    };
    Ok(root)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KeyRateRow {
    pub e_b: f64,
    pub hzx_upper: f64,
    /// n_sif · (1 − h(e_b) − hzx_upper).
    pub rate: f64,
    pub n_sif: f64,
}

pub fn keyrate(e_b: f64, env: &Envelope, n_sif: f64) -> Result<KeyRateRow> {
    if n_sif.is_nan() || n_sif < 0.0 {
        return Err(domain("n_sif", n_sif, "[0, inf)"));
    }
    let upper = hzx_upper(e_b, env)?;
    Ok(KeyRateRow {
        e_b,
        hzx_upper: upper,
        rate: n_sif * (1.0 - h(e_b) - upper),
        n_sif,
    })
}

fn lattice(lo: f64, hi: f64, step: f64) -> impl Iterator<Item = f64> {
    let n = ((hi - lo) / step).round().max(1.0) as usize;
    (0..=n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
}

/// Independent check of the envelope: the upper concave hull of
/// h12 over [0, 1/2], h3 over the triangle, and h above the multi-photon
/// floor (the smallest minimum bit error among N ≥ 4).
pub fn envelope_oracle(grid_step: f64, multiphoton_floor: f64) -> Result<UpperHull> {
    if !(1e-5..=1e-2).contains(&grid_step) {
        return Err(domain("grid_step", grid_step, "[1e-5, 1e-2]"));
    }
    let mut cloud: Vec<(f64, f64)> = lattice(0.0, 0.5, grid_step)
        .map(|e| (e, h12_unchecked(e)))
        .collect();

    let tri_step = grid_step.max(1e-3);
    for v in [VERTEX_LOW, VERTEX_TOP, VERTEX_RIGHT] {
        cloud.push((v.e_b, h3_unchecked(v.e_b, v.e_y)));
    }
    for e_b in lattice(0.25, 0.75, tri_step) {
        let (lo, hi) = region_bounds(e_b.clamp(0.25, 0.75))?;
        for e_y in lattice(lo, hi, tri_step) {
            cloud.push((e_b, h3_unchecked(e_b, e_y)));
        }
    }

    if multiphoton_floor < 1.0 {
        cloud.extend(lattice(multiphoton_floor, 1.0, grid_step).map(|e| (e, h(e))));
    }
    Ok(upper_hull(&cloud))
}

/// Worst excess of h3 over the envelope line on a grid×grid lattice over
/// (t, s) at u = 1, which maps onto the whole triangle.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DominanceReport {
    pub samples: usize,
    pub max_excess: f64,
    pub worst_point: ErrorPoint,
    /// Largest distance from (1/4, 1/3) among points within 1e-4 of the line.
    pub near_equality_radius: f64,
}

pub fn region_dominance(grid: usize, env: &Envelope, model: &ErrorModel) -> Result<DominanceReport> {
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst_point = VERTEX_LOW;
    let mut near_equality_radius: f64 = 0.0;
    let mut samples = 0;
    for i in 0..grid {
        let t = i as f64 / (grid - 1) as f64;
        for j in 0..grid {
            let s = -1.0 + 2.0 * j as f64 / (grid - 1) as f64;
            let pt = region_map(&RegionParams::new(1.0, t, s)?, model)?;
            let excess = h3_unchecked(pt.e_b, pt.e_y) - env.line(pt.e_b);
            samples += 1;
            if excess > max_excess {
                max_excess = excess;
                worst_point = pt;
            }
            if excess > -1e-4 {
                let d = ((pt.e_b - VERTEX_LOW.e_b).powi(2) + (pt.e_y - VERTEX_LOW.e_y).powi(2)).sqrt();
                near_equality_radius = near_equality_radius.max(d);
            }
        }
    }
    Ok(DominanceReport {
        samples,
        max_excess,
        worst_point,
        near_equality_radius,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NeglectReport {
    pub neglect_edge: f64,
    pub rows: Vec<NeglectRow>,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NeglectRow {
    pub n: usize,
    pub min_e_b: f64,
    /// min over e ∈ [min_e_b, 1] of line(e) − h(e).
    pub line_margin: f64,
}

/// Checks that photon numbers `rows` (N ≥ 4) sit beyond the neglect edge and
/// that h stays below the envelope line from their minimum bit error up.
pub fn neglect_check_rows(rows: &[MinErrorRow], env: &Envelope) -> Result<NeglectReport> {
    let mut out = Vec::new();
    for row in rows.iter().filter(|r| r.n.get() >= 4) {
        if row.min_e_b <= env.neglect_edge {
            return Err(Error::NeglectViolation {
                n: row.n.get(),
                e_b: row.min_e_b,
                reason: format!("minimum bit error does not exceed {}", env.neglect_edge),
            });
        }
        let mut margin = f64::INFINITY;
        for e in lattice(row.min_e_b, 1.0, 1e-4) {
            let gap = env.line(e) - h(e);
            if gap < 0.0 {
                return Err(Error::NeglectViolation {
                    n: row.n.get(),
                    e_b: e,
                    reason: format!("h(e) exceeds the envelope line by {}", -gap),
                });
            }
            margin = margin.min(gap);
        }
        out.push(NeglectRow {
            n: row.n.get(),
            min_e_b: row.min_e_b,
            line_margin: margin,
        });
    }
    Ok(NeglectReport {
        neglect_edge: env.neglect_edge,
        passed: true,
        rows: out,
    })
}

pub fn neglect_check(nmax: crate::states::PhotonNumber) -> Result<NeglectReport> {
    if nmax.get() < 4 {
        return Err(Error::BadPhotonNumber {
            n: nmax.get(),
            max: crate::states::N_MAX,
        });
    }
    let rows = crate::photon::min_error_table(nmax)?;
    neglect_check_rows(&rows, &tangent_envelope()?)
}

/// Largest second central difference of `f` on `[lo, hi]` with step `step`.
pub fn max_second_difference(f: impl Fn(f64) -> f64, lo: f64, hi: f64, step: f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    let mut x = lo + step;
    while x + step <= hi {
        worst = worst.max(f(x - step) + f(x + step) - 2.0 * f(x));
        x += step;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::squash::construct_squash_y;
    use proptest::prelude::*;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.110028).unwrap() - 0.5).abs() < 1e-5);
        assert!(binary_entropy(1.1).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn bb84_root_via_bisection() {
        let x = bisect_root(|x| h(x) - 0.5, 0.05, 0.3, 1e-12).unwrap();
        assert!((x - 0.110028).abs() < 1e-6);
    }

    #[test]
    fn h12_values() {
        assert_eq!(h12(0.0).unwrap(), 0.0);
        let want = 1.0 / 3.0 + 2.0 / 3.0 * h(0.25);
        assert!((h12(1.0 / 3.0).unwrap() - want).abs() < 1e-15);
        assert!((h12(1.0 / 3.0).unwrap() - 0.874185).abs() < 1e-6);
        assert!(h12(0.6).is_err());
    }

    #[test]
    fn h12_prime_matches_central_differences() {
        for i in 1..50 {
            let e = i as f64 * 0.009;
            let step = 1e-6;
            let fd = (h12_unchecked(e + step) - h12_unchecked(e - step)) / (2.0 * step);
            assert!((fd - h12_prime(e)).abs() < 1e-6, "e = {e}: {fd} vs {}", h12_prime(e));
        }
    }

    #[test]
    fn h3_values() {
        assert!((h3(0.2, 0.2).unwrap() - h12(0.2).unwrap()).abs() < 1e-12);
        assert!((h3(0.25, 1.0 / 3.0).unwrap() - 0.802728).abs() < 1e-6);
        let want = 0.75 * h(2.0 / 3.0);
        assert!((h3(0.75, 0.5).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.688722).abs() < 1e-6);
        assert!(h3(0.0, 0.1).is_err());
        assert!(h3(0.1, 0.5).is_err());
    }

    #[test]
    fn region_bounds_examples() {
        let (lo, hi) = region_bounds(0.25).unwrap();
        assert!((lo - 1.0 / 3.0).abs() < 1e-15 && (hi - 1.0 / 3.0).abs() < 1e-15);
        let (lo, hi) = region_bounds(7.0 / 12.0).unwrap();
        assert!((lo - 4.0 / 9.0).abs() < 1e-15 && (hi - 2.0 / 3.0).abs() < 1e-15);
        let (lo, hi) = region_bounds(0.75).unwrap();
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
        assert!(region_bounds(0.2).is_err());
    }

    #[test]
    fn region_map_corners() {
        let sq = construct_squash_y().unwrap();
        let model = ErrorModel::new(&sq);
        let cases = [
            ((1.0, 1.0, -1.0), VERTEX_LOW),
            ((1.0, 1.0, 1.0), VERTEX_TOP),
            ((1.0, 0.0, 0.3), VERTEX_RIGHT),
            ((0.0, 0.4, 0.2), ErrorPoint { e_b: 0.5, e_y: 0.5 }),
        ];
        for ((u, t, s), want) in cases {
            let pt = region_map(&RegionParams::new(u, t, s).unwrap(), &model).unwrap();
            assert!((pt.e_b - want.e_b).abs() <= 1e-12 && (pt.e_y - want.e_y).abs() <= 1e-12);
        }
        assert!(RegionParams::new(1.2, 0.0, 0.0).is_err());
        assert!(RegionParams::new(1.0, 0.0, -1.5).is_err());
    }

    #[test]
    fn max_h3_pinch_points_and_dominance() {
        assert!((max_h3_at(0.25).unwrap() - 0.802728).abs() < 1e-6);
        assert!((max_h3_at(0.75).unwrap() - 0.688722).abs() < 1e-6);
        assert!(max_h3_at(0.26).unwrap() <= 2.82 * 0.26 + 0.0976 + 1e-3);
        let env = tangent_envelope().unwrap();
        for i in 0..=100 {
            let e = 0.25 + 0.5 * i as f64 / 100.0;
            assert!(max_h3_at(e).unwrap() <= env.line(e) + 1e-6);
        }
        assert!(max_h3_at(0.1).is_err());
    }

    #[test]
    fn tangent_at_b_values() {
        let tb = tangent_at_b().unwrap();
        assert!((tb.e_b - 0.12619).abs() < 5e-5);
        assert!((tb.one_minus_h_at_b - h12_unchecked(tb.e_b)).abs() < 1e-9);
        assert!((tb.h_at_b - 0.54690).abs() < 5e-4);
        // the B tangent meets h further out than the envelope line does
        let env = tangent_envelope().unwrap();
        assert!(tb.e_c > env.neglect_edge);
        assert!((tb.e_c - 0.266305).abs() < 5e-6);
    }

    #[test]
    fn envelope_values() {
        let env = tangent_envelope().unwrap();
        assert!(env.e_d > 0.115 && env.e_d < 0.116, "{}", env.e_d);
        assert!((env.slope - 2.82).abs() < 0.01);
        assert!((env.intercept - 0.0976).abs() < 0.001);
        assert!((env.h_at_d - 0.42407).abs() < 5e-4);
        assert!((env.v3 - 0.802728).abs() < 1e-6);
        assert!((env.line(0.25) - env.v3).abs() < 1e-9);
        assert!((h12_unchecked(env.e_d) - env.line(env.e_d)).abs() < 1e-9);
        assert!((h12_prime(env.e_d) - env.slope).abs() < 1e-7);
        assert!((env.neglect_edge - 0.25677).abs() < 5e-5);
    }

    #[test]
    fn hzx_upper_branches() {
        let env = tangent_envelope().unwrap();
        assert_eq!(hzx_upper(0.05, &env).unwrap(), h12(0.05).unwrap());
        assert!((hzx_upper(0.2, &env).unwrap() - 0.6616).abs() < 2e-3);
        let left = hzx_upper(env.e_d - 1e-13, &env).unwrap();
        let right = hzx_upper(env.e_d + 1e-13, &env).unwrap();
        assert!((left - right).abs() < 1e-9);
        assert!(hzx_upper(0.3, &env).is_err());
        assert!(max_second_difference(|e| env.value(e), 0.0, 0.25, 1e-4) <= 1e-8);
    }

    #[test]
    fn thresholds() {
        let six = threshold(Protocol::SixstateThreshold).unwrap();
        let qubit = threshold(Protocol::SixstateQubit).unwrap();
        let bb84 = threshold(Protocol::Bb84).unwrap();
        assert!((six - 0.126112).abs() < 5e-6, "{six}");
        assert!((qubit - 0.12619).abs() < 5e-5);
        assert!((bb84 - 0.110028).abs() < 5e-5);
        assert!(bb84 + 1e-5 < six && six + 1e-5 < qubit);
        assert_eq!("bb84".parse::<Protocol>().unwrap(), Protocol::Bb84);
        assert!("nonsense".parse::<Protocol>().is_err());
    }

    #[test]
    fn keyrate_examples() {
        let env = tangent_envelope().unwrap();
        assert_eq!(keyrate(0.0, &env, 0.3).unwrap().rate, 0.3);
        let thr = threshold(Protocol::SixstateThreshold).unwrap();
        assert!(keyrate(thr, &env, 1.0).unwrap().rate.abs() < 1e-6);
        assert!(keyrate(0.11, &env, 1.0).unwrap().rate > 0.0);
        assert!(keyrate(0.3, &env, 1.0).is_err());
        assert!(keyrate(0.1, &env, -1.0).is_err());
        let mut prev = f64::INFINITY;
        for i in 0..=250 {
            let r = keyrate(i as f64 * 1e-3, &env, 1.0).unwrap().rate;
            assert!(r <= prev + 1e-15);
            prev = r;
        }
    }

    #[test]
    fn oracle_matches_analytic_envelope() {
        let env = tangent_envelope().unwrap();
        let hull = envelope_oracle(1e-3, 0.2916).unwrap();
        assert!(hull.max_slope_increase() <= 1e-12);
        for i in 0..=250 {
            let e = i as f64 * 1e-3;
            let v = hull.value_at(e).unwrap();
            assert!((v - env.value(e)).abs() <= 3e-3, "e = {e}");
        }
        assert!(envelope_oracle(0.5, 0.3).is_err());
    }

    #[test]
    fn coarse_dominance_grid() {
        let sq = construct_squash_y().unwrap();
        let model = ErrorModel::new(&sq);
        let env = tangent_envelope().unwrap();
        let rep = region_dominance(40, &env, &model).unwrap();
        assert!(rep.max_excess <= 1e-6);
        assert!(rep.near_equality_radius < 0.01);
    }

    proptest! {
        #[test]
        fn entropy_symmetry(x in 0.0f64..=1.0) {
            prop_assert!((h(x) - h(1.0 - x)).abs() < 1e-12);
            prop_assert!(h(x) <= 1.0 + 1e-15);
        }

        #[test]
        fn h3_concave_in_ey(e_b in 0.26f64..0.74, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = region_bounds(e_b).unwrap();
            let y1 = lo + a * (hi - lo);
            let y2 = lo + b * (hi - lo);
            let mid = h3_unchecked(e_b, 0.5 * (y1 + y2));
            let avg = 0.5 * (h3_unchecked(e_b, y1) + h3_unchecked(e_b, y2));
            prop_assert!(mid >= avg - 1e-12);
        }

        #[test]
        fn region_map_stays_in_triangle(u in 0.0f64..=1.0, t in 0.0f64..=1.0, s in -1.0f64..=1.0) {
            let p = RegionParams::new(u, t, s).unwrap();
            let r = p.coefficients();
            let pt = ErrorPoint {
                e_b: crate::symmetry::LinearForm::BIT_ERROR.eval(&r),
                e_y: crate::symmetry::LinearForm::YTILDE_ERROR.eval(&r),
            };
            prop_assert!(in_triangle(&pt, 1e-12));
        }
    }
}
