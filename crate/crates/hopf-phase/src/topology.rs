//! Topology of closed curves on S^2: simplicity, winding numbers, the pole
//! indices I+/I- of the regularized Gauss curve, left/right enclosed areas,
//! and the area-index identity delta_g = A+ - 2 pi I+.
//!
//! Conventions are pinned by the latitude loop: traversing a circle of
//! constant tilt with theta increasing puts the north pole in the *left*
//! region, so I+ = 1, I- = 1 and A+ is the area of the polar cap above the
//! loop.
//!
//! The membership oracle is winding-number based and independent of every
//! phase quadrature: a query point is classified by the winding of the
//! curve, stereographically projected from the point's antipode, around the
//! image of the point. Area integration walks meridian columns, flipping
//! membership at each exact curve crossing, which keeps the oracle accurate
//! to the longitude resolution even where a region straddles its own
//! antipode.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::vec3::{self, V3};
use crate::geometry::SpherePoint;
use crate::motion::SampledPath;
use crate::phase;
use crate::quad::pairwise_sum;
use crate::regularize;

/// Query points may not sit closer to the polyline than this.
pub const ON_CURVE_TOL: f64 = 1e-9;
/// Orientation-test tolerance for the segment intersection predicate.
pub const CROSS_TOL: f64 = 1e-12;
/// Default longitude resolution of the area oracle.
pub const AREA_COLUMNS: usize = 2048;
/// Two successive area grids must agree this well, else resolution doubles.
pub const AREA_STABLE_TOL: f64 = 1e-3;

/// Which pole names the chart; each chart is singular at the other pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartPole {
    North,
    South,
}

/// Side of an oriented curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// Topological summary of one regularized Gauss curve.
#[derive(Debug, Clone)]
pub struct CurveTopology {
    pub simple: bool,
    pub n_winding: i64,
    pub i_plus: u8,
    pub i_minus: u8,
    /// Areas are only defined for simple curves.
    pub a_plus: Option<f64>,
    pub a_minus: Option<f64>,
}

/// The Gauss curve of a sampled motion, one point per grid node.
pub fn gauss_curve(path: &SampledPath) -> Vec<SpherePoint> {
    path.theta
        .iter()
        .zip(&path.beta)
        .map(|(&t, &b)| {
            let (sb, cb) = (b.sin(), b.cos());
            SpherePoint {
                x: sb * t.cos(),
                y: sb * t.sin(),
                z: cb,
            }
        })
        .collect()
}

/// Drop the duplicated closing node so the polyline wraps around cleanly.
fn open_loop(curve: &[SpherePoint]) -> &[SpherePoint] {
    let n = curve.len();
    if n >= 2 {
        let d = vec3::norm(vec3::sub(curve[0].v3(), curve[n - 1].v3()));
        if d < 1e-7 {
            return &curve[..n - 1];
        }
    }
    curve
}

/// Stereographic chart of the whole curve, the paper's atlas:
/// the north chart reads (a - ib)/(1 + c), the south chart (a + ib)/(1 - c).
pub fn stereographic(curve: &[SpherePoint], pole: ChartPole) -> Result<Vec<Complex64>> {
    curve
        .iter()
        .enumerate()
        .map(|(node, p)| match pole {
            ChartPole::North => {
                if p.z + 1.0 < ON_CURVE_TOL {
                    Err(Error::PoleHit {
                        node,
                        tol: ON_CURVE_TOL,
                    })
                } else {
                    Ok(Complex64::new(p.x, -p.y) / (1.0 + p.z))
                }
            }
            ChartPole::South => {
                if 1.0 - p.z < ON_CURVE_TOL {
                    Err(Error::PoleHit {
                        node,
                        tol: ON_CURVE_TOL,
                    })
                } else {
                    Ok(Complex64::new(p.x, p.y) / (1.0 - p.z))
                }
            }
        })
        .collect()
}

/// Winding number of a closed polyline around a point: the summed angle
/// increments divided by 2 pi, rounded. Exact for polylines.
pub fn winding_number(curve: &[Complex64], point: Complex64) -> Result<i64> {
    let poly = open_complex_loop(curve);
    let n = poly.len();
    if n < 3 {
        return Ok(0);
    }
    // on-curve guard
    for k in 0..n {
        let d = point_segment_distance(point, poly[k], poly[(k + 1) % n]);
        if d < ON_CURVE_TOL {
            return Err(Error::PointOnCurve {
                segment: k,
                dist: d,
            });
        }
    }
    let mut total = 0.0;
    for k in 0..n {
        let a = poly[k] - point;
        let b = poly[(k + 1) % n] - point;
        total += (b * a.conj()).arg();
    }
    let turns = total / std::f64::consts::TAU;
    Ok(turns.round() as i64)
}

fn open_complex_loop(curve: &[Complex64]) -> &[Complex64] {
    let n = curve.len();
    if n >= 2 && (curve[0] - curve[n - 1]).norm() < 1e-12 {
        &curve[..n - 1]
    } else {
        curve
    }
}

fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

/// First pair of non-adjacent segments that intersect, if any.
///
/// Segments are tested with orientation cross products; |cross| below
/// `CROSS_TOL` times the parallelogram scale counts as collinear, and
/// collinear overlaps (a retraced curve) count as intersections.
pub fn find_self_intersection(curve: &[Complex64]) -> Option<(usize, usize)> {
    let poly = open_complex_loop(curve);
    let n = poly.len();
    if n < 4 {
        return None;
    }
    // sweep over segments ordered by their smaller x coordinate
    let mut order: Vec<usize> = (0..n).collect();
    let min_x = |i: usize| poly[i].re.min(poly[(i + 1) % n].re);
    let max_x = |i: usize| poly[i].re.max(poly[(i + 1) % n].re);
    order.sort_by(|&i, &j| min_x(i).partial_cmp(&min_x(j)).unwrap());

    for (rank, &i) in order.iter().enumerate() {
        let hi = max_x(i);
        for &j in &order[rank + 1..] {
            if min_x(j) > hi {
                break;
            }
            let adjacent = (i + 1) % n == j || (j + 1) % n == i;
            if adjacent {
                continue;
            }
            if segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                let (lo, hi) = if i < j { (i, j) } else { (j, i) };
                return Some((lo, hi));
            }
        }
    }
    None
}

/// True iff the closed polyline has no self-intersections.
pub fn is_simple(curve: &[Complex64]) -> bool {
    find_self_intersection(curve).is_none()
}

fn cross2(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_intersect(p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64) -> bool {
    let d12 = p2 - p1;
    let d34 = p4 - p3;
    let scale = (d12.norm() * d34.norm()).max(f64::MIN_POSITIVE);
    let tol = CROSS_TOL * scale.max(1.0);
    let o1 = cross2(d12, p3 - p1);
    let o2 = cross2(d12, p4 - p1);
    let o3 = cross2(d34, p1 - p3);
    let o4 = cross2(d34, p2 - p3);

    if (o1 > tol && o2 < -tol || o1 < -tol && o2 > tol)
        && (o3 > tol && o4 < -tol || o3 < -tol && o4 > tol)
    {
        return true;
    }

    // collinear / touching cases: any contact between non-adjacent segments
    let on_segment = |a: Complex64, b: Complex64, q: Complex64, o: f64| -> bool {
        o.abs() <= tol
            && q.re >= a.re.min(b.re) - CROSS_TOL
            && q.re <= a.re.max(b.re) + CROSS_TOL
            && q.im >= a.im.min(b.im) - CROSS_TOL
            && q.im <= a.im.max(b.im) + CROSS_TOL
    };
    on_segment(p1, p2, p3, o1)
        || on_segment(p1, p2, p4, o2)
        || on_segment(p3, p4, p1, o3)
        || on_segment(p3, p4, p2, o4)
}

// ---------------------------------------------------------------------
// membership machinery
// ---------------------------------------------------------------------

/// Orientation-preserving stereographic projection with singular point
/// `center`; the antipode of the center lands at the origin.
struct Projector {
    u: V3,
    v: V3,
    w: V3,
}

impl Projector {
    fn from_center(center: V3) -> Self {
        let w = vec3::scale(center, -1.0);
        // pick the axis least aligned with w to seed the frame
        let (ax, _) = [
            ([1.0, 0.0, 0.0], w[0].abs()),
            ([0.0, 1.0, 0.0], w[1].abs()),
            ([0.0, 0.0, 1.0], w[2].abs()),
        ]
        .into_iter()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
        let u = vec3::normalize(vec3::cross(ax, w));
        let v = vec3::cross(w, u);
        Self { u, v, w }
    }

    fn project(&self, x: V3) -> Complex64 {
        let denom = 1.0 + vec3::dot(x, self.w);
        Complex64::new(vec3::dot(x, self.u), vec3::dot(x, self.v)) / denom
    }
}

/// Winding of the curve around `point`, seen through the projection from
/// the point's antipode. +1 pins `point` to the left region, -1 to the
/// right; 0 means the point shares its region with its antipode.
pub fn antipodal_winding(curve: &[SpherePoint], point: SpherePoint) -> Result<i64> {
    winding_from_center(curve, vec3::scale(point.v3(), -1.0), point.v3())
}

fn winding_from_center(curve: &[SpherePoint], center: V3, query: V3) -> Result<i64> {
    let proj = Projector::from_center(center);
    let poly: Vec<Complex64> = open_loop(curve)
        .iter()
        .map(|p| proj.project(p.v3()))
        .collect();
    winding_number(&poly, proj.project(query))
}

fn min_chord_distance(point: V3, curve: &[SpherePoint]) -> f64 {
    let poly = open_loop(curve);
    let n = poly.len();
    let mut best = f64::INFINITY;
    for k in 0..n {
        let a = poly[k].v3();
        let b = poly[(k + 1) % n].v3();
        let d = vec3::sub(b, a);
        let len2 = vec3::dot(d, d);
        let t = if len2 == 0.0 {
            0.0
        } else {
            (vec3::dot(vec3::sub(point, a), d) / len2).clamp(0.0, 1.0)
        };
        let c = vec3::add(a, vec3::scale(d, t));
        best = best.min(vec3::norm(vec3::sub(point, c)));
    }
    best
}

/// A point guaranteed to lie in the left region: step off the curve along
/// the left normal g x T by a margin that clears the discretization.
fn anchor_in_left_region(curve: &[SpherePoint]) -> Result<V3> {
    let poly = open_loop(curve);
    let n = poly.len();
    let mut seg_max = 0.0f64;
    for k in 0..n {
        seg_max = seg_max.max(vec3::norm(vec3::sub(poly[(k + 1) % n].v3(), poly[k].v3())));
    }
    for trial in 0..16 {
        let k = (n * (2 * trial + 1)) / 32 % n;
        let g = poly[k].v3();
        let t = vec3::sub(poly[(k + 1) % n].v3(), poly[(k + n - 1) % n].v3());
        let tn = vec3::norm(t);
        if tn < 1e-14 {
            continue;
        }
        let left = vec3::cross(g, vec3::scale(t, 1.0 / tn));
        let ln = vec3::norm(left);
        if ln < 1e-9 {
            continue;
        }
        let left = vec3::scale(left, 1.0 / ln);
        for mult in [3.0, 6.0, 12.0] {
            let delta = mult * seg_max;
            if delta > 0.3 {
                break;
            }
            let cand = vec3::normalize(vec3::add(g, vec3::scale(left, delta)));
            if min_chord_distance(cand, curve) > 0.55 * delta {
                return Ok(cand);
            }
        }
    }
    Err(Error::DegenerateCurve(seg_max))
}

const NORTH: V3 = [0.0, 0.0, 1.0];
const SOUTH: V3 = [0.0, 0.0, -1.0];

/// Classify both poles against the oriented curve. Fast path: the winding of
/// the curve around the north pole projected from the south separates the
/// poles; a zero winding puts both poles in one region, resolved through an
/// anchor point just left of the curve.
fn classify_poles(curve: &[SpherePoint]) -> Result<(Side, Side)> {
    let w_n = winding_from_center(curve, SOUTH, NORTH)?;
    if w_n > 0 {
        return Ok((Side::Left, Side::Right));
    }
    if w_n < 0 {
        return Ok((Side::Right, Side::Left));
    }
    // both poles in one region
    let anchor = anchor_in_left_region(curve)?;
    let side = side_of_point_with_anchor(curve, NORTH, anchor)?;
    Ok((side, side))
}

/// Side of `query` given a point known to lie in the left region: project
/// from the query itself; the anchor's winding then reads the relation.
fn side_of_point_with_anchor(curve: &[SpherePoint], query: V3, anchor: V3) -> Result<Side> {
    let w = winding_from_center(curve, query, anchor)?;
    if w > 0 {
        // anchor left, query on the opposite side
        Ok(Side::Right)
    } else {
        Ok(Side::Left)
    }
}

/// Membership of an arbitrary point, the antipodal-winding oracle with the
/// anchor fallback for points whose antipode shares their region.
pub fn side_of_point(curve: &[SpherePoint], point: SpherePoint) -> Result<Side> {
    match antipodal_winding(curve, point)? {
        w if w > 0 => Ok(Side::Left),
        w if w < 0 => Ok(Side::Right),
        _ => {
            let anchor = anchor_in_left_region(curve)?;
            side_of_point_with_anchor(curve, point.v3(), anchor)
        }
    }
}

/// Pole indices (I+, I-): how many of the two poles lie in the left /
/// right region of the oriented curve. Always sums to 2.
pub fn pole_indices(curve: &[SpherePoint]) -> Result<(u8, u8)> {
    let (n_side, s_side) = classify_poles(curve)?;
    let i_plus = [n_side, s_side]
        .iter()
        .filter(|&&s| s == Side::Left)
        .count() as u8;
    Ok((i_plus, 2 - i_plus))
}

// ---------------------------------------------------------------------
// area oracle
// ---------------------------------------------------------------------

/// Both region areas by the meridian-column sweep at a given longitude
/// resolution. Crossing colatitudes are interpolated exactly, so the only
/// discretization is the longitude midpoint rule.
fn areas_at_resolution(curve: &[SpherePoint], side_north: Side, columns: usize) -> (f64, f64) {
    let poly = open_loop(curve);
    let n = poly.len();
    let d_lam = std::f64::consts::TAU / columns as f64;

    // unwrapped azimuth and colatitude per node
    let mut lam = Vec::with_capacity(n + 1);
    let mut colat = Vec::with_capacity(n + 1);
    let mut prev = f64::NAN;
    for k in 0..=n {
        let p = poly[k % n].v3();
        let raw = p[1].atan2(p[0]);
        let l = if k == 0 {
            raw
        } else {
            prev + crate::quad::principal_angle(raw - prev)
        };
        lam.push(l);
        colat.push(p[2].clamp(-1.0, 1.0).acos());
        prev = l;
    }

    // bucket signed crossings by column
    let mut crossings: Vec<Vec<(f64, i8)>> = vec![Vec::new(); columns];
    for k in 0..n {
        let (a, b) = (lam[k], lam[k + 1]);
        if a == b {
            continue;
        }
        let (ca, cb) = (colat[k], colat[k + 1]);
        // candidate meridians x = (i + 1/2) d_lam inside the azimuth span;
        // the range over-approximates by one on each side, the filters pick
        // the half-open interval ((a, b] eastward, [b, a) westward) so a
        // node sitting exactly on a meridian is counted once
        let lo = a.min(b);
        let hi = a.max(b);
        let i_lo = (lo / d_lam - 0.5).floor() as i64 - 1;
        let i_hi = (hi / d_lam - 0.5).floor() as i64 + 1;
        for i in i_lo..=i_hi {
            let x = (i as f64 + 0.5) * d_lam;
            let hit = if b > a {
                x > a && x <= b
            } else {
                x >= b && x < a
            };
            if !hit {
                continue;
            }
            let frac = (x - a) / (b - a);
            let col = i.rem_euclid(columns as i64) as usize;
            let dir: i8 = if b > a { 1 } else { -1 };
            crossings[col].push((ca + frac * (cb - ca), dir));
        }
    }

    // walk each column from the north pole south, flipping at crossings
    let per_column: Vec<(f64, f64)> = crossings
        .into_par_iter()
        .map(|mut list| {
            list.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
            let mut side = side_north;
            let mut cos_prev = 1.0f64;
            let (mut left, mut right) = (0.0f64, 0.0f64);
            for (c, _) in list {
                let strip = d_lam * (cos_prev - c.cos());
                match side {
                    Side::Left => left += strip,
                    Side::Right => right += strip,
                }
                cos_prev = c.cos();
                side = side.flip();
            }
            let strip = d_lam * (cos_prev + 1.0);
            match side {
                Side::Left => left += strip,
                Side::Right => right += strip,
            }
            (left, right)
        })
        .collect();

    let lefts: Vec<f64> = per_column.iter().map(|p| p.0).collect();
    let rights: Vec<f64> = per_column.iter().map(|p| p.1).collect();
    (pairwise_sum(&lefts), pairwise_sum(&rights))
}

/// Left and right enclosed areas of a simple closed curve, with one
/// resolution doubling if two successive grids disagree.
pub fn areas(curve: &[SpherePoint]) -> Result<(f64, f64)> {
    require_simple(curve)?;
    let (n_side, _) = classify_poles(curve)?;
    let mut cols = AREA_COLUMNS;
    let mut prev = areas_at_resolution(curve, n_side, cols / 2);
    for _ in 0..2 {
        let cur = areas_at_resolution(curve, n_side, cols);
        if (cur.0 - prev.0).abs() <= AREA_STABLE_TOL {
            return Ok(cur);
        }
        prev = cur;
        cols *= 2;
    }
    Ok(prev)
}

/// Area of the region on the requested side of a simple curve.
pub fn enclosed_area(curve: &[SpherePoint], side: Side) -> Result<f64> {
    let (l, r) = areas(curve)?;
    Ok(match side {
        Side::Left => l,
        Side::Right => r,
    })
}

fn require_simple(curve: &[SpherePoint]) -> Result<()> {
    let poly = best_chart_projection(curve)?;
    if let Some((i, j)) = find_self_intersection(&poly) {
        return Err(Error::NotSimple(i, j));
    }
    Ok(())
}

/// Project from whichever pole sits farther from the curve; the regularized
/// curve always clears both.
pub fn best_chart_projection(curve: &[SpherePoint]) -> Result<Vec<Complex64>> {
    let mut max_z = -1.0f64;
    let mut min_z = 1.0f64;
    for p in curve {
        max_z = max_z.max(p.z);
        min_z = min_z.min(p.z);
    }
    // north chart is singular at the south pole and vice versa
    if 1.0 - max_z >= min_z + 1.0 {
        stereographic(curve, ChartPole::South)
    } else {
        stereographic(curve, ChartPole::North)
    }
}

/// Residuals of the three expressions of the area-index identity.
#[derive(Debug, Clone)]
pub struct MainTheoremCheck {
    pub delta_g: f64,
    pub i_plus: u8,
    pub i_minus: u8,
    pub a_plus: f64,
    pub a_minus: f64,
    /// |delta_g - (A+ - 2 pi I+)|, |delta_g - (-A- + 2 pi I-)|,
    /// |delta_g - ((A+ - A-)/2 - pi (I+ - I-))|
    pub residuals: [f64; 3],
}

/// Check delta_g = A+ - 2 pi I+ (and its two companions) on one motion:
/// the phase is the raw line integral, the indices and areas come from the
/// regularized curve at the given cut-off.
pub fn main_theorem_check(path: &SampledPath, epsilon: f64) -> Result<MainTheoremCheck> {
    let delta_g = phase::geometric_phase(path);
    let reg = regularize::clamp(path, epsilon)?.as_path();
    let curve = gauss_curve(&reg);
    require_simple(&curve)?;
    let (i_plus, i_minus) = pole_indices(&curve)?;
    let (a_plus, a_minus) = areas(&curve)?;
    let pi = std::f64::consts::PI;
    let tau = std::f64::consts::TAU;
    let r1 = (delta_g - (a_plus - tau * i_plus as f64)).abs();
    let r2 = (delta_g - (-a_minus + tau * i_minus as f64)).abs();
    let r3 = (delta_g - (0.5 * (a_plus - a_minus) - pi * (i_plus as f64 - i_minus as f64))).abs();
    Ok(MainTheoremCheck {
        delta_g,
        i_plus,
        i_minus,
        a_plus,
        a_minus,
        residuals: [r1, r2, r3],
    })
}

/// Full topological record of a motion's regularized Gauss curve.
pub fn curve_topology(path: &SampledPath, epsilon: f64) -> Result<CurveTopology> {
    let n_winding = path.closure_winding()?;
    let reg = regularize::clamp(path, epsilon)?.as_path();
    let curve = gauss_curve(&reg);
    let poly = best_chart_projection(&curve)?;
    let simple = is_simple(&poly);
    let (i_plus, i_minus) = pole_indices(&curve)?;
    let (a_plus, a_minus) = if simple {
        let (l, r) = areas(&curve)?;
        (Some(l), Some(r))
    } else {
        (None, None)
    };
    Ok(CurveTopology {
        simple,
        n_winding,
        i_plus,
        i_minus,
        a_plus,
        a_minus,
    })
}
