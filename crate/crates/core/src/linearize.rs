//! Quadratic Hamiltonian at L4, characteristic quartic, stability verdicts,
//! and critical mass ratios — each computed exactly from the Hessian and,
//! where the paper prints a series, also evaluated verbatim for audit.

use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equilibria::{refined_l4, EquilibriumPoint};
use crate::error::{Error, Result};
use crate::model::{build_system, SystemParams};

/// Classical critical mass ratio printed alongside the stability inequality.
pub const MU_C0_PRINTED: f64 = 0.0385209;

/// Where a coefficient set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoeffSource {
    Exact,
    Series,
}

/// Coefficients of the quadratic Hamiltonian
/// `H2 = (px^2 + py^2)/2 + n (y px - x py) + E x^2 + F y^2 + G x y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticCoeffs {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub n: f64,
    pub source: CoeffSource,
}

/// Exact coefficients from the Hessian of the effective potential at the
/// refined L4: `E = n^2/2 - Omega_xx/2`, `F = n^2/2 - Omega_yy/2`,
/// `G = -Omega_xy`.
pub fn coefficients_exact(params: &SystemParams) -> Result<QuadraticCoeffs> {
    let l4 = refined_l4(params)?;
    Ok(coefficients_at(params, &l4))
}

/// Exact coefficients at a given (already refined) equilibrium point.
pub fn coefficients_at(params: &SystemParams, point: &EquilibriumPoint) -> QuadraticCoeffs {
    let (oxx, oxy, oyy) = params.potential_hessian_unguarded(point.x, point.y);
    let n2 = params.n * params.n;
    QuadraticCoeffs {
        e: n2 / 2.0 - oxx / 2.0,
        f: n2 / 2.0 - oyy / 2.0,
        g: -oxy,
        n: params.n,
        source: CoeffSource::Exact,
    }
}

/// The three printed coefficient series, evaluated verbatim. The F and G
/// leading terms reproduce the classical values; the E constant term is
/// printed as 2/1728 where the exact classical value is 1/8, so the series
/// E is informational only.
pub fn coefficients_series(params: &SystemParams) -> QuadraticCoeffs {
    let mu = params.mu;
    let eps = params.epsilon();
    let a2 = params.a2;
    let mb = params.mb();
    let rc = params.rc;
    let t = params.t();
    let d = (rc * rc + t * t).powf(1.5);
    let w = 2.0 * rc - 1.0;

    let e = (2.0 - 324.0 * (2.0 - 25.0 * mu) * mb
        - w * (2.0 + 15.0 * (2.0 - 7.0 * mu) * mb) * mb / d
        + 2.0 * eps
            * (-54.0 - 270.0 * mu + 135.0 * (10.0 - 81.0 * mu) * mb
                - w * (146.0 - 33.0 * mu + 15.0 * (118.0 - 205.0 * mu) * mb) * mb / d)
        + 6.0 * a2
            * (162.0 - 432.0 * mu + 135.0 * (2.0 + 39.0 * mu) * mb
                + w * (146.0 - 240.0 * mu - 15.0 * (10.0 - 259.0 * mu) * mb) * mb / d)
        + eps * a2
            * (144.0 - 5022.0 * mu - 270.0 * (4.0 - 395.0 * mu) * mb
                - w * (458.0 + 540.0 * mu + 15.0 * (1926.0 - 7399.0 * mu) * mb) * mb / d))
        / 1728.0;

    let f = -(360.0 + 108.0 * (22.0 + 85.0 * mu) * mb
        + w * (2.0 + 5.0 * (6.0 + 35.0 * mu) * mb) * mb / d
        + 2.0 * eps
            * (54.0 - 18.0 * mu + 45.0 * (62.0 + 309.0 * mu) * mb
                - w * (10.0 + 39.0 * mu + 5.0 * (202.0 + 1565.0 * mu) * mb) * mb / d)
        + 6.0 * a2
            * (126.0 + 45.0 * (26.0 + 99.0 * mu) * mb
                + w * (46.0 + 5.0 * (142.0 + 791.0 * mu) * mb) * mb / d)
        + eps * a2
            * (576.0 - 18.0 * mu + 90.0 * (228.0 + 1147.0 * mu) * mb
                + w * (522.0 + 526.0 * mu + 5.0 * (3834.0 + 27923.0 * mu) * mb) * mb / d))
        / 576.0;

    let g = -(648.0 - 1296.0 * mu + 1620.0 * (2.0 + 3.0 * mu) * mb
        + 12.0 * w * (22.0 - 44.0 * mu + 5.0 * (34.0 + 39.0 * mu) * mb) * mb / d
        + 2.0 * eps
            * (198.0 - 666.0 * mu + 45.0 * (94.0 + 201.0 * mu) * mb
                + 2.0 * w * (190.0 - 423.0 * mu + 135.0 * (18.0 + 65.0 * mu) * mb) * mb / d)
        + 6.0 * a2
            * (126.0 - 468.0 * mu + 45.0 * (26.0 + 15.0 * mu) * mb
                + w * (96.0 - 260.0 * mu + 15.0 * (66.0 + 133.0 * mu) * mb) * mb / d)
        + eps * a2
            * (1368.0 - 4806.0 * mu + 90.0 * (280.0 + 429.0 * mu) * mb
                + w * (2106.0 - 655.0 * mu + 35.0 * (982.0 + 3025.0 * mu) * mb) * mb / d))
        / (288.0 * 3f64.sqrt());

    QuadraticCoeffs { e, f, g, n: params.n, source: CoeffSource::Series }
}

/// The quadratic form matrix M of H2 on (x, y, px, py): `H2 = z^T M z / 2`.
pub fn h2_matrix(c: &QuadraticCoeffs) -> Matrix4<f64> {
    let n = c.n;
    Matrix4::new(
        2.0 * c.e, c.g, 0.0, -n, //
        c.g, 2.0 * c.f, n, 0.0, //
        0.0, n, 1.0, 0.0, //
        -n, 0.0, 0.0, 1.0,
    )
}

/// H2 evaluated on a phase offset (x, y, px, py) from the equilibrium.
pub fn h2_value(c: &QuadraticCoeffs, z: [f64; 4]) -> f64 {
    let [x, y, px, py] = z;
    (px * px + py * py) / 2.0 + c.n * (y * px - x * py) + c.e * x * x + c.f * y * y + c.g * x * y
}

/// Which stability condition failed, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Stable,
    /// D < 0: the lambda^2 roots form a complex pair.
    NegativeDiscriminant,
    /// D >= 0 but a lambda^2 root is non-negative.
    NonNegativeRoot,
}

/// Outcome of the characteristic quartic
/// `lambda^4 + 2(E+F+n^2) lambda^2 + (4EF - G^2 + n^4 - 2n^2(E+F)) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Roots of the quadratic in lambda^2 as (re, im) pairs; real when D >= 0.
    pub lambda_squared: [(f64, f64); 2],
    /// Discriminant D of the quadratic in lambda^2.
    pub discriminant: f64,
    /// Libration frequencies, omega1 > omega2, present iff stable.
    pub omega: Option<(f64, f64)>,
    pub stable: bool,
    pub verdict: Verdict,
}

impl StabilityReport {
    pub fn omega1(&self) -> Option<f64> {
        self.omega.map(|(w1, _)| w1)
    }

    pub fn omega2(&self) -> Option<f64> {
        self.omega.map(|(_, w2)| w2)
    }

    /// Frequencies of a stable report.
    pub fn frequencies(&self) -> Result<(f64, f64)> {
        self.omega.ok_or(Error::NotStable)
    }
}

/// Solve the characteristic quartic as a quadratic in lambda^2 and apply
/// the full stability condition: D > 0 and both roots negative. The paper
/// states only D > 0; a positive lambda^2 root is still unstable.
pub fn stability_analysis(c: &QuadraticCoeffs) -> StabilityReport {
    let n2 = c.n * c.n;
    let b = 2.0 * (c.e + c.f + n2);
    let q = 4.0 * c.e * c.f - c.g * c.g + n2 * n2 - 2.0 * n2 * (c.e + c.f);
    let d = b * b - 4.0 * q;

    if d < 0.0 {
        let re = -b / 2.0;
        let im = (-d).sqrt() / 2.0;
        return StabilityReport {
            lambda_squared: [(re, im), (re, -im)],
            discriminant: d,
            omega: None,
            stable: false,
            verdict: Verdict::NegativeDiscriminant,
        };
    }
    // Stable quadratic formula keeps the Vieta identities tight.
    let sd = d.sqrt();
    let (z1, z2) = if b == 0.0 {
        (sd / 2.0, -sd / 2.0)
    } else {
        let qf = -(b + b.signum() * sd) / 2.0;
        if qf == 0.0 {
            (0.0, 0.0)
        } else {
            (qf, q / qf)
        }
    };
    let (zmax, zmin) = if z1 > z2 { (z1, z2) } else { (z2, z1) };
    let stable = d > 0.0 && zmax < 0.0;
    let omega = if stable {
        // The more negative root carries the larger frequency.
        Some(((-zmin).sqrt(), (-zmax).sqrt()))
    } else {
        None
    };
    StabilityReport {
        lambda_squared: [(zmax, 0.0), (zmin, 0.0)],
        discriminant: d,
        omega,
        stable,
        verdict: if stable { Verdict::Stable } else { Verdict::NonNegativeRoot },
    }
}

/// The Taylor pieces of the Lagrangian at the triangular point, both as the
/// paper prints them and exactly. The printed L0/L1 double the n^2 term and
/// carry a belt exponent typo, so the exact values are reported alongside;
/// the exact first-order pair vanishes at a refined equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagrangianTerms {
    /// Printed constant term.
    pub l0_printed: f64,
    /// Exact constant term: Omega at the expansion point.
    pub l0_exact: f64,
    /// Printed first-order coefficient pair.
    pub l1_printed: (f64, f64),
    /// Exact first-order coefficient pair (the gradient of Omega).
    pub l1_exact: (f64, f64),
    /// Exact quadratic coefficient set.
    pub l2: QuadraticCoeffs,
    /// Offsets (a, b) of the expansion point: a = x + mu, b = y.
    pub offsets: (f64, f64),
}

/// Evaluate the Lagrangian expansion pieces at the refined L4.
pub fn lagrangian_terms(params: &SystemParams) -> Result<LagrangianTerms> {
    let l4 = refined_l4(params)?;
    let a = l4.x + params.mu;
    let b = l4.y;
    let mu = params.mu;
    let q1 = params.q1();
    let a2 = params.a2;
    let mb = params.mb();
    let t = params.t();
    let n2 = params.n * params.n;

    let r1sq = a * a + b * b;
    let r2sq = (a - 1.0) * (a - 1.0) + b * b;
    let rsq = (a - mu) * (a - mu) + b * b;

    let l0_printed = rsq * n2
        + (1.0 - mu) * q1 / r1sq.sqrt()
        + mu / r2sq.sqrt() * (1.0 + a2 / (2.0 * r2sq))
        + mb / (rsq + t * t).powf(1.5);
    let l0_exact = params.effective_potential(l4.x, l4.y)?;

    let r13 = r1sq.powf(1.5);
    let r23 = r2sq.powf(1.5);
    let s5 = (rsq + t * t).powf(2.5);
    let common = 1.0 + 3.0 * a2 / (2.0 * r2sq);
    let l1x = 2.0 * n2 * (a - mu)
        - a * (1.0 - mu) * q1 / r13
        - 3.0 * (a - mu) * mb / s5
        - (a - 1.0) * mu / r23 * common;
    let l1y = 2.0 * b * n2
        - b * (1.0 - mu) * q1 / r13
        - 3.0 * b * mb / s5
        - b * mu / r23 * common;
    let l1_exact = params.potential_gradient(l4.x, l4.y)?;

    Ok(LagrangianTerms {
        l0_printed,
        l0_exact,
        l1_printed: (l1x, l1y),
        l1_exact,
        l2: coefficients_at(params, &l4),
        offsets: (a, b),
    })
}

/// Printed-vs-exact frequency relations. The printed equations fail the
/// classical limit, so discrepancies are reported, never asserted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyRelations {
    /// omega1^2 + omega2^2 as printed.
    pub printed_sum: f64,
    /// omega1^2 * omega2^2 as printed.
    pub printed_product: f64,
    /// Exact sum from the quartic (Vieta): 2(E + F + n^2).
    pub exact_sum: f64,
    /// Exact product from the quartic (Vieta).
    pub exact_product: f64,
}

pub fn frequency_relations_series(params: &SystemParams) -> Result<FrequencyRelations> {
    let mu = params.mu;
    let eps = params.epsilon();
    let a2 = params.a2;
    let mb = params.mb();
    let rc = params.rc;
    let t = params.t();
    let d = (rc * rc + t * t).powf(1.5);
    let w = 2.0 * rc - 1.0;

    // The printed sum contains the orphaned fragment (22 + 69 mu) and the
    // orphaned factor (44 + 21); both evaluated as printed.
    let printed_sum = (27.0 * ((1.0 + mu) * eps - 2.0)
        + 9.0 * (-18.0 + 36.0 * mu + (22.0 + 69.0 * mu))
        + 81.0 * mb / 2.0 * (12.0 + 30.0 * eps + 30.0 * mu + 95.0 * mu * eps)
        + 135.0 * mb * a2 * (18.0 + 58.0 * eps + 45.0 * mu + 188.0 * mu * eps)
        + 1.0 / (2.0 * d)
            * mb
            * (180.0
                + 2.0 * w * (44.0 + 21.0) * mu * eps
                + 72.0 * rc
                + 4.0 * rc * a2 * (78.0 + 180.0 * mu + (253.0 + 873.0 * mu) * eps)))
        / 54.0;

    let printed_product = -(108.0 * (eps + 3.0 * mb * (2.0 + 7.0 * eps))
        + 18.0 * (31.0 * eps + mb * (144.0 + 647.0 * eps)) * a2
        + mb
            * (4.0 * (36.0 - 47.0 * eps + 4.0 * rc * (9.0 + 28.0 * eps))
                + 3.0 * (74.0 - 297.0 * eps + 4.0 * rc * (44.0 + 175.0 * eps)) * a2)
            / d)
        / 72.0
        + mu * (27.0 / 4.0
            + 99.0 * eps / 8.0
            + 117.0 / 4.0
            + 73.0 * a2 * eps
            + mb * (45.0 / 4.0
                + 81.0 * a2
                + 273.0 * eps / 8.0
                + 2357.0 * a2 * eps / 8.0
                + (396.0 * w
                    + 4.0 * (772.0 * rc - 395.0) * eps
                    + 12.0 * (326.0 * rc - 181.0) * a2
                    + (18452.0 * rc - 9667.0) * a2 * eps)
                    / (72.0 * d)))
        + mu * mu
            * (-27.0 / 4.0
                + 111.0 * eps / 8.0
                + 117.0 / 4.0
                + 161.0 * a2 * eps / 2.0
                + mb * (405.0 / 4.0
                    + 495.0 * a2 / 2.0
                    + 4185.0 * eps / 16.0
                    + 25275.0 * a2 * eps / 16.0
                    + w * (198.0 - 838.0 * eps - 1014.0 * a2 - 5117.0 * a2 * eps) / (36.0 * d)));

    let c = coefficients_exact(params)?;
    let n2 = c.n * c.n;
    Ok(FrequencyRelations {
        printed_sum,
        printed_product,
        exact_sum: 2.0 * (c.e + c.f + n2),
        exact_product: 4.0 * c.e * c.f - c.g * c.g + n2 * n2 - 2.0 * n2 * (c.e + c.f),
    })
}

/// Every model parameter except the mass ratio: the input to critical-mass
/// searches and atlas sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemTemplate {
    pub q1: f64,
    pub a2: f64,
    pub mb: f64,
    pub flatness_a: f64,
    pub core_b: f64,
    pub rc_override: Option<f64>,
}

impl SystemTemplate {
    pub fn classical() -> Self {
        Self { q1: 1.0, a2: 0.0, mb: 0.0, flatness_a: 0.0, core_b: 0.0, rc_override: None }
    }

    pub fn with_mu(&self, mu: f64) -> Result<SystemParams> {
        build_system(mu, self.q1, self.a2, self.mb, self.flatness_a, self.core_b, self.rc_override)
    }
}

/// Full exact pipeline for one mass ratio: refined L4, exact coefficients,
/// stability verdict.
pub fn stability_at(template: &SystemTemplate, mu: f64) -> Result<StabilityReport> {
    let params = template.with_mu(mu)?;
    Ok(stability_analysis(&coefficients_exact(&params)?))
}

fn is_stable(template: &SystemTemplate, mu: f64) -> bool {
    matches!(stability_at(template, mu), Ok(r) if r.stable)
}

/// Critical mass ratio by bisection of the exact stability boundary over
/// mu in (1e-6, 1/2); tolerance 1e-9 in mu. Parameter sets for which the
/// triangular point degenerates count as unstable.
pub fn critical_mass_numeric(template: &SystemTemplate) -> Result<f64> {
    let mut lo = 1e-6;
    let mut hi = 0.5 - 1e-9;
    let slo = is_stable(template, lo);
    let shi = is_stable(template, hi);
    if slo == shi {
        return Err(Error::NoSignChange);
    }
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if is_stable(template, mid) == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// How to read the printed critical-mass inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesMode {
    /// Exactly as printed: the trailing bracket is subtracted whole, which
    /// makes the classical limit negative.
    AsPrinted,
    /// The standalone bracket multiplies A2 (default reading).
    A2Corrected,
}

/// The printed critical-mass series. `rc` and `t` are taken from the system
/// the caller is studying (the printed right-hand side contains them).
pub fn critical_mass_series(eps: f64, mb: f64, a2: f64, rc: f64, t: f64, mode: SeriesMode) -> f64 {
    let d = (rc * rc + t * t).powf(1.5);
    let base = MU_C0_PRINTED
        + 0.125885 * eps
        + mb * (0.571136
            + 1.73097 * eps
            + (0.219964 - 0.398363 * eps + rc * (0.202129 + 0.114305 * eps)) / d);
    let inner = mb
        * (0.281354 - 1.53665 * eps
            + (0.654936 - 0.669428 * eps + rc * (0.195486 + 0.350878 * eps)) / d);
    match mode {
        SeriesMode::AsPrinted => base - (0.0627796 - 0.112691 * eps + a2 * inner),
        SeriesMode::A2Corrected => base - a2 * (0.0627796 - 0.112691 * eps + inner),
    }
}

/// One node of the stability atlas.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtlasNode {
    /// Grid indices (i_mu, i_q1, i_a2, i_mb).
    pub idx: [usize; 4],
    pub mu: f64,
    pub q1: f64,
    pub a2: f64,
    pub mb: f64,
    /// Per-node outcome; errors are recorded, never abort the sweep.
    pub outcome: std::result::Result<AtlasData, String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AtlasData {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub n: f64,
    pub discriminant: f64,
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
    pub stable: bool,
}

/// Grid for the atlas sweep.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct AtlasGrid {
    pub mu: Vec<f64>,
    pub q1: Vec<f64>,
    pub a2: Vec<f64>,
    pub mb: Vec<f64>,
}

/// Stability verdicts over a parameter grid. Nodes are computed in parallel
/// and emitted in lexicographic index order regardless of scheduling.
pub fn stability_atlas(grid: &AtlasGrid, belt_geometry: &SystemTemplate) -> Vec<AtlasNode> {
    let mut nodes = Vec::new();
    for (i, &mu) in grid.mu.iter().enumerate() {
        for (j, &q1) in grid.q1.iter().enumerate() {
            for (k, &a2) in grid.a2.iter().enumerate() {
                for (l, &mb) in grid.mb.iter().enumerate() {
                    nodes.push(([i, j, k, l], mu, q1, a2, mb));
                }
            }
        }
    }
    nodes
        .into_par_iter()
        .map(|(idx, mu, q1, a2, mb)| {
            let template = SystemTemplate {
                q1,
                a2,
                mb,
                flatness_a: belt_geometry.flatness_a,
                core_b: belt_geometry.core_b,
                rc_override: belt_geometry.rc_override,
            };
            let outcome = template
                .with_mu(mu)
                .and_then(|p| coefficients_exact(&p))
                .map(|c| {
                    let r = stability_analysis(&c);
                    AtlasData {
                        e: c.e,
                        f: c.f,
                        g: c.g,
                        n: c.n,
                        discriminant: r.discriminant,
                        omega1: r.omega1(),
                        omega2: r.omega2(),
                        stable: r.stable,
                    }
                })
                .map_err(|e| e.to_string());
            AtlasNode { idx, mu, q1, a2, mb, outcome }
        })
        .collect()
}

/// Side-by-side audit of the printed algebra against the exact pipeline at
/// the classical point: the series constants that disagree with the exact
/// values are reproduced here, not repaired.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesAudit {
    pub mu: f64,
    pub e_series: f64,
    pub e_exact: f64,
    pub f_series: f64,
    pub f_exact: f64,
    pub g_series: f64,
    pub g_exact: f64,
    pub freq_sum_printed: f64,
    pub freq_sum_exact: f64,
    pub freq_product_printed: f64,
    pub freq_product_exact: f64,
    pub mu_crit_as_printed: f64,
    pub mu_crit_corrected: f64,
    pub mu_crit_bisection: f64,
}

/// Audit at the classical point (all perturbations zero) for the given mu.
pub fn series_audit(mu: f64) -> Result<SeriesAudit> {
    let params = SystemParams::classical(mu)?;
    let cs = coefficients_series(&params);
    let ce = coefficients_exact(&params)?;
    let fr = frequency_relations_series(&params)?;
    let template = SystemTemplate::classical();
    Ok(SeriesAudit {
        mu,
        e_series: cs.e,
        e_exact: ce.e,
        f_series: cs.f,
        f_exact: ce.f,
        g_series: cs.g,
        g_exact: ce.g,
        freq_sum_printed: fr.printed_sum,
        freq_sum_exact: fr.exact_sum,
        freq_product_printed: fr.printed_product,
        freq_product_exact: fr.exact_product,
        mu_crit_as_printed: critical_mass_series(0.0, 0.0, 0.0, params.rc, 0.0, SeriesMode::AsPrinted),
        mu_crit_corrected: critical_mass_series(0.0, 0.0, 0.0, params.rc, 0.0, SeriesMode::A2Corrected),
        mu_crit_bisection: critical_mass_numeric(&template)?,
    })
}
