//! Equilibrium points: triangular and collinear, via the model's closed-form
//! and series expressions and via Newton refinement on the exact gradient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{SystemParams, PRIMARY_GUARD};

/// Residual target for refined equilibria.
pub const REFINE_TOL: f64 = 1e-12;
const MAX_NEWTON_ITERS: usize = 50;

/// Equilibrium point labels. L4 is the positive-y triangular point by
/// convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    L1,
    L2,
    L3,
    L4,
    L5,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::L1 => write!(f, "L1"),
            Label::L2 => write!(f, "L2"),
            Label::L3 => write!(f, "L3"),
            Label::L4 => write!(f, "L4"),
            Label::L5 => write!(f, "L5"),
        }
    }
}

/// How an equilibrium point was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Series,
    Refined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumPoint {
    pub label: Label,
    pub x: f64,
    pub y: f64,
    /// max(|Omega_x|, |Omega_y|) at the point.
    pub residual: f64,
    pub method: Method,
}

/// Equilibrium distances to the two primaries from the printed first-order
/// expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumRadii {
    pub r1: f64,
    pub r2: f64,
}

/// Distances r1, r2 of the triangular points per the first-order
/// expressions in the perturbations.
pub fn equilibrium_radii(params: &SystemParams) -> EquilibriumRadii {
    let mu = params.mu;
    let q1 = params.q1();
    let a2 = params.a2;
    let mb = params.mb();
    let rc = params.rc;
    let t = params.t();
    let denom = 3.0 * (rc * rc + t * t).powf(1.5);
    let r1 = q1.powf(1.0 / 3.0)
        * (1.0 - a2 / 2.0
            + (1.0 - 2.0 * rc) * mb * (1.0 - 3.0 * mu * a2 / (2.0 * (1.0 - mu))) / denom);
    let r2 = 1.0 + mu * (1.0 - 2.0 * rc) * mb / denom;
    EquilibriumRadii { r1, r2 }
}

/// Both +/- branches of the two distance loci at height `y`: the x-values on
/// the r1-locus (circle-like curve about the bigger primary) and on the
/// r2-locus (about the smaller primary).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceLoci {
    pub r1_locus: (f64, f64),
    pub r2_locus: (f64, f64),
}

pub fn distance_loci(params: &SystemParams, y: f64) -> Result<DistanceLoci> {
    let mu = params.mu;
    let q1 = params.q1();
    let a2 = params.a2;
    let mb = params.mb();
    let rc = params.rc;
    let t = params.t();
    let n2 = params.n * params.n;
    let denom = (rc * rc + t * t).powf(1.5);

    let b1 = 1.0 + 1.5 * a2
        - (1.0 - 2.0 * rc) * mb * (1.0 - 3.0 * mu * a2 / (2.0 * (1.0 - mu))) / denom;
    let rad1 = (q1 / n2).powf(2.0 / 3.0) * b1.powf(-2.0 / 3.0) - y * y;
    // The smaller-primary locus; the printed form carries a stray r_0 that is
    // read as rc.
    let b2 = 1.0 - mu * (1.0 - 2.0 * rc) * mb / denom;
    let rad2 = b2.powf(-2.0 / 3.0) - y * y;
    if rad1 < 0.0 || rad2 < 0.0 {
        return Err(Error::NegativeRadicand { y });
    }
    let s1 = rad1.sqrt();
    let s2 = rad2.sqrt();
    Ok(DistanceLoci {
        r1_locus: (-mu + s1, -mu - s1),
        r2_locus: (1.0 - mu + s2, 1.0 - mu - s2),
    })
}

/// Triangular points L4 (y > 0) and L5 (y < 0) from the printed closed
/// forms, first order in the perturbations.
pub fn triangular_points_closed(
    params: &SystemParams,
) -> Result<(EquilibriumPoint, EquilibriumPoint)> {
    let mu = params.mu;
    let q23 = params.q1().powf(2.0 / 3.0);
    let a2 = params.a2;
    let mb = params.mb();
    let rc = params.rc;
    let t = params.t();
    let denom = 3.0 * (rc * rc + t * t).powf(1.5);

    let x = -mu
        + q23 / 2.0 * (1.0 - a2)
        + (1.0 - 2.0 * rc) * mb * ((1.0 - 3.0 * mu * a2 / (1.0 - mu)) * q23 - 1.0) / denom;
    let radicand = 4.0 - q23 + 2.0 * (q23 - 2.0) * a2
        - 4.0 * (2.0 * rc - 1.0)
            * mb
            * ((q23 - 3.0) - 3.0 * mu * a2 * (q23 - 3.0) / (2.0 * (1.0 - mu)))
            / denom;
    if radicand < 0.0 {
        return Err(Error::DegenerateTriangular { radicand });
    }
    let y = q23 / 2.0 * radicand.sqrt();
    let res = gradient_residual(params, x, y);
    let l4 = EquilibriumPoint { label: Label::L4, x, y, residual: res, method: Method::ClosedForm };
    let l5 = EquilibriumPoint {
        label: Label::L5,
        x,
        y: -y,
        residual: res,
        method: Method::ClosedForm,
    };
    Ok((l4, l5))
}

/// L4 from the epsilon-series, together with the shifted offsets (a, b) of
/// the origin translation to L4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriangularSeries {
    pub x: f64,
    pub y: f64,
    /// a = x + mu per the printed offset series.
    pub a: f64,
    /// b per the printed offset series (its epsilon coefficient differs from
    /// the y series as printed).
    pub b: f64,
}

pub fn triangular_points_series(params: &SystemParams) -> TriangularSeries {
    let mu = params.mu;
    let eps = params.epsilon();
    let a2 = params.a2;
    let mb = params.mb();
    let gamma = 1.0 - 2.0 * mu;
    let mix = mu * a2 * mb / (1.0 - mu);

    let x = gamma / 2.0 - eps / 3.0 - a2 / 2.0 + a2 * eps / 3.0 + 2.0 * mb * eps / 9.0
        - mix / 2.0 * (1.0 - 2.0 * eps / 3.0);
    let y = 3f64.sqrt() / 2.0
        * (1.0 - 5.0 * eps / 9.0 - a2 / 3.0 - 2.0 * a2 * eps / 9.0 - 4.0 * mb / 9.0
            - 8.0 * mb * eps / 27.0
            + mix * eps / 9.0);
    let a = 0.5
        * (1.0 - 2.0 * eps / 3.0 - a2 + 2.0 * a2 * eps / 3.0 + 4.0 * mb * eps / 9.0
            - mix * (1.0 - 2.0 * eps / 3.0));
    let b = 3f64.sqrt() / 2.0
        * (1.0 - 2.0 * eps / 9.0 - a2 / 3.0 - 2.0 * a2 * eps / 9.0 - 4.0 * mb / 9.0
            - 8.0 * mb * eps / 27.0
            + mix * eps / 9.0);
    TriangularSeries { x, y, a, b }
}

fn gradient_residual(params: &SystemParams, x: f64, y: f64) -> f64 {
    let (gx, gy) = params.potential_gradient_unguarded(x, y);
    gx.abs().max(gy.abs())
}

fn classify(params: &SystemParams, x: f64, y: f64) -> Label {
    if y.abs() > 1e-9 {
        if y > 0.0 {
            Label::L4
        } else {
            Label::L5
        }
    } else if x > 1.0 - params.mu {
        Label::L2
    } else if x > -params.mu {
        Label::L1
    } else {
        Label::L3
    }
}

/// Newton refinement of an equilibrium guess on the exact gradient.
pub fn refine_equilibrium(guess: (f64, f64), params: &SystemParams) -> Result<EquilibriumPoint> {
    let (mut x, mut y) = guess;
    for iter in 0..=MAX_NEWTON_ITERS {
        let (r1, r2) = params.primary_distances(x, y);
        if r1 < 10.0 * PRIMARY_GUARD {
            return Err(Error::ConvergedToPrimary { index: 1 });
        }
        if r2 < 10.0 * PRIMARY_GUARD {
            return Err(Error::ConvergedToPrimary { index: 2 });
        }
        let (gx, gy) = params.potential_gradient_unguarded(x, y);
        let res = gx.abs().max(gy.abs());
        if res < REFINE_TOL {
            return Ok(EquilibriumPoint {
                label: classify(params, x, y),
                x,
                y,
                residual: res,
                method: Method::Refined,
            });
        }
        if iter == MAX_NEWTON_ITERS {
            return Err(Error::NoConvergence { residual: res, iterations: iter });
        }
        let (oxx, oxy, oyy) = params.potential_hessian_unguarded(x, y);
        let det = oxx * oyy - oxy * oxy;
        if det.abs() < 1e-300 {
            return Err(Error::NoConvergence { residual: res, iterations: iter });
        }
        x -= (oyy * gx - oxy * gy) / det;
        y -= (oxx * gy - oxy * gx) / det;
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NoConvergence { residual: f64::INFINITY, iterations: iter });
        }
    }
    unreachable!()
}

/// Refined L4 (seeded from the closed form).
pub fn refined_l4(params: &SystemParams) -> Result<EquilibriumPoint> {
    let (l4, _) = triangular_points_closed(params)?;
    let mut p = refine_equilibrium((l4.x, l4.y), params)?;
    if p.y <= 0.0 {
        return Err(Error::DegenerateTriangular { radicand: p.y });
    }
    p.label = Label::L4;
    Ok(p)
}

fn omega_x_on_axis(params: &SystemParams, x: f64) -> f64 {
    params.potential_gradient_unguarded(x, 0.0).0
}

/// Bisection on the on-axis gradient until the residual target is met.
fn bisect_on_axis(params: &SystemParams, mut lo: f64, mut hi: f64, label: &'static str) -> Result<f64> {
    let mut flo = omega_x_on_axis(params, lo);
    let fhi = omega_x_on_axis(params, hi);
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::RootNotBracketed { label });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = omega_x_on_axis(params, mid);
        if fmid == 0.0 || (hi - lo) < f64::EPSILON * mid.abs().max(1.0) {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if flo.abs().min(omega_x_on_axis(params, hi).abs()) < REFINE_TOL * 1e-2 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Newton polish of an on-axis root.
fn polish_on_axis(params: &SystemParams, mut x: f64) -> f64 {
    for _ in 0..20 {
        let f = omega_x_on_axis(params, x);
        if f.abs() < REFINE_TOL * 1e-3 {
            break;
        }
        let (oxx, _, _) = params.potential_hessian_unguarded(x, 0.0);
        if oxx == 0.0 {
            break;
        }
        let step = f / oxx;
        x -= step;
        if step.abs() < f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// The three collinear points, one per interval
/// (-mu, 1-mu), (1-mu, inf), (-inf, -mu).
pub fn collinear_points(params: &SystemParams) -> Result<[EquilibriumPoint; 3]> {
    let mu = params.mu;
    let inner = 1e-6;

    // L1 between the primaries.
    let x1 = bisect_on_axis(params, -mu + inner, 1.0 - mu - inner, "L1")?;
    // L2 beyond the smaller primary; expand the right end until the gradient
    // turns positive.
    let mut hi = 1.0 - mu + 0.5;
    let mut tries = 0;
    while omega_x_on_axis(params, hi) < 0.0 {
        hi += 0.5;
        tries += 1;
        if tries > 100 {
            return Err(Error::RootNotBracketed { label: "L2" });
        }
    }
    let x2 = bisect_on_axis(params, 1.0 - mu + inner, hi, "L2")?;
    // L3 on the far side of the bigger primary.
    let mut lo = -mu - 0.5;
    tries = 0;
    while omega_x_on_axis(params, lo) > 0.0 {
        lo -= 0.5;
        tries += 1;
        if tries > 100 {
            return Err(Error::RootNotBracketed { label: "L3" });
        }
    }
    let x3 = bisect_on_axis(params, lo, -mu - inner, "L3")?;

    let mk = |label, x: f64| {
        let x = polish_on_axis(params, x);
        EquilibriumPoint {
            label,
            x,
            y: 0.0,
            residual: omega_x_on_axis(params, x).abs(),
            method: Method::Refined,
        }
    };
    Ok([mk(Label::L1, x1), mk(Label::L2, x2), mk(Label::L3, x3)])
}

/// All five refined equilibrium points in label order.
pub fn all_points(params: &SystemParams) -> Result<Vec<EquilibriumPoint>> {
    let [l1, l2, l3] = collinear_points(params)?;
    let l4 = refined_l4(params)?;
    let l5 = EquilibriumPoint { label: Label::L5, y: -l4.y, ..l4 };
    Ok(vec![l1, l2, l3, l4, l5])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_system;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn classical(mu: f64) -> SystemParams {
        SystemParams::classical(mu).unwrap()
    }

    #[test]
    fn radii_classical_unity() {
        let r = equilibrium_radii(&classical(0.025));
        assert_eq!(r.r1, 1.0);
        assert_eq!(r.r2, 1.0);
    }

    #[test]
    fn radii_oblate() {
        let p = build_system(0.1, 1.0, 0.02, 0.0, 0.0, 0.0, None).unwrap();
        let r = equilibrium_radii(&p);
        assert_relative_eq!(r.r1, 0.99, max_relative = 1e-15);
        assert_eq!(r.r2, 1.0);
    }

    #[test]
    fn radii_belt_direct_arithmetic() {
        let p = build_system(0.025, 1.0, 0.0, 0.1, 0.005, 0.005, Some(0.9999)).unwrap();
        let r = equilibrium_radii(&p);
        // Independent re-evaluation of the printed expression.
        let expect = 1.0 + 0.025 * (1.0 - 2.0 * 0.9999) * 0.1
            / (3.0 * (0.9999f64 * 0.9999 + 0.0001).powf(1.5));
        assert_relative_eq!(r.r2, expect, max_relative = 1e-15);
        assert!(r.r2 < 1.0);
    }

    #[test]
    fn loci_classical_unit_circles() {
        let p = classical(0.025);
        let l = distance_loci(&p, 0.0).unwrap();
        assert_relative_eq!(l.r1_locus.0, -p.mu + 1.0, max_relative = 1e-14);
        assert_relative_eq!(l.r1_locus.1, -p.mu - 1.0, max_relative = 1e-14);
        let l = distance_loci(&p, 3f64.sqrt() / 2.0).unwrap();
        assert_relative_eq!(l.r1_locus.0, -p.mu + 0.5, max_relative = 1e-12);
        assert_relative_eq!(l.r1_locus.1, -p.mu - 0.5, max_relative = 1e-12);
    }

    #[test]
    fn loci_outside_range_is_error() {
        let p = classical(0.025);
        assert!(matches!(distance_loci(&p, 1.5), Err(Error::NegativeRadicand { .. })));
    }

    #[test]
    fn loci_intersection_is_l4() {
        // Find y where the + branches of both loci coincide; classically both
        // circles have radius 1 and meet at L4.
        let p = classical(0.025);
        // L4 sits on the + branch of the r1 locus and the - branch of the
        // r2 locus.
        let f = |y: f64| {
            let l = distance_loci(&p, y).unwrap();
            l.r1_locus.0 - l.r2_locus.1
        };
        let (mut lo, mut hi) = (0.5, 0.99);
        assert!(f(lo) * f(hi) < 0.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if f(mid) * f(lo) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let y = 0.5 * (lo + hi);
        let x = distance_loci(&p, y).unwrap().r1_locus.0;
        assert_relative_eq!(x, 0.5 - p.mu, max_relative = 1e-10);
        assert_relative_eq!(y, 3f64.sqrt() / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn triangular_closed_classical() {
        let p = classical(0.025);
        let (l4, l5) = triangular_points_closed(&p).unwrap();
        assert_relative_eq!(l4.x, 0.475, max_relative = 1e-15);
        assert_relative_eq!(l4.y, 3f64.sqrt() / 2.0, max_relative = 1e-15);
        assert_eq!(l5.x, l4.x);
        assert_eq!(l5.y, -l4.y);
    }

    #[test]
    fn triangular_closed_oblate_direct_substitution() {
        let p = build_system(0.025, 1.0, 0.01, 0.0, 0.0, 0.0, None).unwrap();
        let (l4, _) = triangular_points_closed(&p).unwrap();
        assert_relative_eq!(l4.x, -0.025 + (1.0 - 0.01) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(l4.x, 0.470, max_relative = 1e-15);
        let y_expect = 0.5 * (4.0 - 1.0 + 2.0 * (1.0 - 2.0) * 0.01f64).sqrt();
        assert_relative_eq!(l4.y, y_expect, max_relative = 1e-15);
    }

    #[test]
    fn triangular_y_scales_with_q1() {
        // y from the closed form decreases to 0 as q1 -> 0 (all other
        // perturbations off), scaling with the leading q1^(2/3).
        let mut prev = f64::INFINITY;
        for &q1 in &[1.0, 0.75, 0.5, 0.25, 0.1, 0.01, 1e-4] {
            let p = build_system(0.025, q1, 0.0, 0.0, 0.0, 0.0, None).unwrap();
            let (l4, _) = triangular_points_closed(&p).unwrap();
            assert!(l4.y < prev);
            assert!(l4.y > 0.0);
            let q23 = q1.powf(2.0 / 3.0);
            assert!(l4.y <= q23 && l4.y >= q23 * 0.8);
            prev = l4.y;
        }
    }

    #[test]
    fn series_classical_offsets() {
        let s = triangular_points_series(&classical(0.01));
        assert_relative_eq!(s.a, 0.5, max_relative = 1e-15);
        assert_relative_eq!(s.b, 3f64.sqrt() / 2.0, max_relative = 1e-15);
    }

    #[test]
    fn series_radiation_direct_arithmetic() {
        let p = build_system(0.01, 0.9, 0.0, 0.0, 0.0, 0.0, None).unwrap();
        let s = triangular_points_series(&p);
        assert_relative_eq!(s.a, (1.0 - 0.2 / 3.0) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.a, 0.4666666666666667, max_relative = 1e-14);
        assert_relative_eq!(s.b, 3f64.sqrt() / 2.0 * (1.0 - 0.2 / 9.0), max_relative = 1e-14);
    }

    #[test]
    fn series_close_to_refined_for_small_perturbations() {
        // The printed epsilon coefficient of the y series overshoots the true
        // first-order response (-5/9 against -2/9), so the agreement is
        // O(1e-3) with a small constant rather than exact to second order.
        let p = build_system(0.01, 1.0 - 0.01, 0.001, 0.001, 0.005, 0.005, None).unwrap();
        let s = triangular_points_series(&p);
        let refined = refine_equilibrium((s.x, s.y), &p).unwrap();
        let disp = (s.x - refined.x).hypot(s.y - refined.y);
        assert!(disp < 5e-3, "series-to-refined displacement {disp}");
    }

    #[test]
    fn refine_fixed_point() {
        let p = classical(0.025);
        let guess = (0.5 - p.mu, 3f64.sqrt() / 2.0);
        let r = refine_equilibrium(guess, &p).unwrap();
        assert!(r.residual < REFINE_TOL);
        assert_abs_diff_eq!(r.x, guess.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r.y, guess.1, epsilon = 1e-13);
        assert_eq!(r.label, Label::L4);
    }

    #[test]
    fn refine_from_series_radiated() {
        let p = build_system(0.01, 0.9, 0.0, 0.0, 0.0, 0.0, None).unwrap();
        let s = triangular_points_series(&p);
        let r = refine_equilibrium((s.x, s.y), &p).unwrap();
        assert!(r.residual < REFINE_TOL);
        // Displacement from the first-order series is O(eps^2).
        let eps: f64 = 0.1;
        let disp = (s.x - r.x).hypot(s.y - r.y);
        assert!(disp < 5.0 * eps * eps, "displacement {disp}");
    }

    #[test]
    fn refine_to_collinear_with_bisection_crosscheck() {
        let mu = 3.00348e-6;
        let p = classical(mu);
        let r = refine_equilibrium((0.99, 0.0), &p).unwrap();
        assert_eq!(r.label, Label::L1);
        assert_eq!(r.y, 0.0);
        // Plain-bisection oracle on the on-axis gradient.
        let f = |x: f64| p.potential_gradient(x, 0.0).unwrap().0;
        let (mut lo, mut hi) = (0.985, 0.9999);
        assert!(f(lo) * f(hi) < 0.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid) * f(lo) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert_abs_diff_eq!(r.x, 0.5 * (lo + hi), epsilon = 1e-10);
    }

    #[test]
    fn collinear_sun_earth() {
        let mu = 3.00348e-6;
        let p = classical(mu);
        let [l1, l2, l3] = collinear_points(&p).unwrap();
        // Hill-radius sanity oracle.
        let hill = (mu / 3.0_f64).powf(1.0 / 3.0);
        assert_abs_diff_eq!(l1.x, 1.0 - hill, epsilon = 1e-4);
        assert_abs_diff_eq!(l2.x, 1.0 + hill, epsilon = 1e-4);
        // Classical series oracle for L3.
        assert_abs_diff_eq!(l3.x, -1.0 - 5.0 * mu / 12.0, epsilon = 1e-4);
        for l in [l1, l2, l3] {
            assert_eq!(l.y, 0.0);
            assert_eq!(p.potential_gradient(l.x, 0.0).unwrap().1, 0.0);
            assert!(l.residual < 1e-11, "{} residual {}", l.label, l.residual);
        }
        // Interval placement.
        assert!(l1.x > -mu && l1.x < 1.0 - mu);
        assert!(l2.x > 1.0 - mu);
        assert!(l3.x < -mu);
    }

    #[test]
    fn collinear_interval_placement_perturbed() {
        for &(mu, q1, a2, mb) in &[
            (0.1, 1.0, 0.0, 0.0),
            (0.01, 0.8, 0.01, 0.0),
            (0.3, 0.9, 0.02, 0.1),
            (0.025, 0.5, 0.0, 0.05),
        ] {
            let p = build_system(mu, q1, a2, mb, 0.005, 0.005, None).unwrap();
            let [l1, l2, l3] = collinear_points(&p).unwrap();
            assert!(l1.x > -mu && l1.x < 1.0 - mu);
            assert!(l2.x > 1.0 - mu);
            assert!(l3.x < -mu);
        }
    }

    #[test]
    fn closed_forms_seed_refinement() {
        // The printed closed forms err at first order in eps and Mb (their
        // oblateness response is second-order accurate), so the seed quality
        // is linear in the perturbation sizes. Refinement always lands.
        for &(eps, a2, mb) in &[(1e-2, 0.0, 0.0), (0.0, 1e-2, 0.0), (0.0, 0.0, 1e-2), (1e-2, 1e-2, 1e-2)] {
            let p = build_system(0.01, 1.0 - eps, a2, mb, 0.005, 0.005, None).unwrap();
            let (l4, _) = triangular_points_closed(&p).unwrap();
            let r = refine_equilibrium((l4.x, l4.y), &p).unwrap();
            assert!(r.residual < REFINE_TOL);
            let disp = (l4.x - r.x).hypot(l4.y - r.y);
            let bound = 1.0 * (eps + a2 + mb) + 1e-12;
            assert!(disp < bound, "disp {disp} vs bound {bound}");
        }
        // The oblateness direction alone is second-order accurate.
        let a2 = 1e-2;
        let p = build_system(0.01, 1.0, a2, 0.0, 0.0, 0.0, None).unwrap();
        let (l4, _) = triangular_points_closed(&p).unwrap();
        let r = refine_equilibrium((l4.x, l4.y), &p).unwrap();
        let disp = (l4.x - r.x).hypot(l4.y - r.y);
        assert!(disp < 25.0 * a2 * a2, "oblate disp {disp}");
    }

    #[test]
    fn l5_mirrors_l4() {
        let p = build_system(0.025, 0.9, 0.01, 0.02, 0.005, 0.005, None).unwrap();
        let pts = all_points(&p).unwrap();
        let l4 = pts.iter().find(|p| p.label == Label::L4).unwrap();
        let l5 = pts.iter().find(|p| p.label == Label::L5).unwrap();
        assert_eq!(l4.x, l5.x);
        assert_eq!(l4.y, -l5.y);
        assert!(l4.y > 0.0);
    }
}
