//! Canonical reduction of the quadratic Hamiltonian at L4 to
//! `H2 = omega1 I1 - omega2 I2`: eigen-solution sets from the printed ratio
//! chain, normalization against the normality conditions, the real 4x4
//! transformation with the Breakwell gauge `J11 = J12 = 0`, the action-angle
//! contact transformation, and linear-orbit synthesis.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linearize::{h2_matrix, h2_value, QuadraticCoeffs, StabilityReport};

/// Frequencies closer than this are treated as resonant and rejected.
pub const DEGENERACY_CUTOFF: f64 = 1e-8;

/// Standard symplectic form for the ordering (Q1, Q2, P1, P2).
pub fn symplectic_form() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

/// The coefficient matrix A(lambda) of the linear system A X = 0 on
/// X = (x, y, px, py).
pub fn char_matrix(c: &QuadraticCoeffs, lambda: Complex64) -> [[Complex64; 4]; 4] {
    let r = |v: f64| Complex64::new(v, 0.0);
    let n = c.n;
    [
        [r(2.0 * c.e), r(c.g), lambda, r(-n)],
        [r(c.g), r(2.0 * c.f), r(n), lambda],
        [-lambda, r(n), r(1.0), r(0.0)],
        [r(-n), -lambda, r(0.0), r(1.0)],
    ]
}

/// Unnormalized null vector of A(lambda) from the printed ratio chain
/// x : y : px : py =
/// (2 n lambda - G) : (lambda^2 - n^2 + 2E) :
/// (n lambda^2 - G lambda - 2nE + n^3) : (lambda^3 + n^2 lambda + 2E lambda - nG).
fn chain_vector(c: &QuadraticCoeffs, lambda: Complex64) -> [Complex64; 4] {
    let n = c.n;
    let n2 = n * n;
    let l2 = lambda * lambda;
    [
         2.0 * n * lambda - c.g,
        l2 - n2 + 2.0 * c.e,
        n * l2 - c.g * lambda - 2.0 * n * c.e + n2 * n,
        l2 * lambda + (n2 + 2.0 * c.e) * lambda - n * c.g,
    ]
}

fn apply_char(a: &[[Complex64; 4]; 4], x: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [Complex64::new(0.0, 0.0); 4];
    for (i, row) in a.iter().enumerate() {
        out[i] = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
    }
    out
}

/// Symplectic product a^T S b on complex 4-vectors.
fn sigma_c(a: &[Complex64; 4], b: &[Complex64; 4]) -> Complex64 {
    a[0] * b[2] + a[1] * b[3] - a[2] * b[0] - a[3] * b[1]
}

fn sigma_r(a: &Vector4<f64>, b: &Vector4<f64>) -> f64 {
    a[0] * b[2] + a[1] * b[3] - a[2] * b[0] - a[3] * b[1]
}

/// Per-mode ingredients of the construction.
struct Mode {
    omega: f64,
    /// Real part of the gauge-phased eigenvector (x-component exactly 0).
    u: Vector4<f64>,
    /// Imaginary part of the gauge-phased eigenvector.
    v: Vector4<f64>,
    /// Symplectic area sigma(u, v); its sign is the mode signature.
    area: f64,
    /// Gauge phase placed on the chain vector.
    phase: Complex64,
}

fn build_mode(c: &QuadraticCoeffs, omega: f64) -> Result<Mode> {
    let lambda = Complex64::new(0.0, omega);
    let w = chain_vector(c, lambda);
    // Breakwell gauge: rotate the vector so its x-component is purely
    // imaginary; the real parts then satisfy J11 = J12 = 0 identically.
    // The phase is i * conj(u)/|u| = (2 n omega - i G)/|2 n omega - i G|.
    let ux = w[0];
    let norm = ux.norm();
    if norm < 1e-14 {
        return Err(Error::GaugeUnreachable);
    }
    let phase = Complex64::new(0.0, 1.0) * ux.conj() / norm;
    let mut u = Vector4::zeros();
    let mut v = Vector4::zeros();
    for i in 0..4 {
        let z = phase * w[i];
        u[i] = z.re;
        v[i] = z.im;
    }
    // The x-component is i |u| analytically; pin the rounding residue to 0.
    u[0] = 0.0;
    let area = sigma_r(&u, &v);
    if area.abs() < 1e-12 {
        return Err(Error::GaugeUnreachable);
    }
    Ok(Mode { omega, u, v, area, phase })
}

fn stable_frequencies(report: &StabilityReport) -> Result<(f64, f64)> {
    let (w1, w2) = report.frequencies()?;
    if (w1 - w2).abs() < DEGENERACY_CUTOFF {
        return Err(Error::DegenerateFrequencies { gap: (w1 - w2).abs() });
    }
    Ok((w1, w2))
}

/// The four eigen solution sets X_j = K_j W(+-i omega_j), j = 1..4, with
/// the proportionality constants fixed by the Breakwell gauge phase and the
/// normality conditions sigma(X_j, X_{j+2}) = 1.
#[derive(Debug, Clone)]
pub struct EigenSolutionSet {
    pub omega1: f64,
    pub omega2: f64,
    /// X_1, X_2 at +i omega_j and their partners X_3, X_4 at -i omega_j.
    pub vectors: [[Complex64; 4]; 4],
    /// K_1, K_2, K_3, K_4.
    pub constants: [Complex64; 4],
    /// max |A(lambda) X| per vector.
    pub eigen_residual: [f64; 4],
    /// |sigma(X_j, X_{j+2}) - 1| per mode.
    pub normality_residual: [f64; 2],
}

/// Build the eigen solution sets for a stable system.
pub fn eigen_solution_sets(
    coeffs: &QuadraticCoeffs,
    report: &StabilityReport,
) -> Result<EigenSolutionSet> {
    let (w1, w2) = stable_frequencies(report)?;
    let m1 = build_mode(coeffs, w1)?;
    let m2 = build_mode(coeffs, w2)?;
    if m1.area <= 0.0 || m2.area >= 0.0 {
        return Err(Error::SignatureConflict);
    }

    let mut vectors = [[Complex64::new(0.0, 0.0); 4]; 4];
    let mut constants = [Complex64::new(0.0, 0.0); 4];
    for (j, mode) in [&m1, &m2].into_iter().enumerate() {
        // Amplitude from the normality condition: with X = (t/2) (u + i v)
        // and the partner below, sigma(X_j, X_{j+2}) = zeta t^2 area / omega
        // where zeta = +1 for mode 1 and -1 for mode 2.
        let t = (mode.omega / mode.area.abs()).sqrt();
        let zeta = if j == 0 { 1.0 } else { -1.0 };
        let k = mode.phase * (t / 2.0);
        let kp = Complex64::new(0.0, zeta * 2.0 / mode.omega) * k.conj();
        constants[j] = k;
        constants[j + 2] = kp;
        let w = chain_vector(coeffs, Complex64::new(0.0, mode.omega));
        let wc = chain_vector(coeffs, Complex64::new(0.0, -mode.omega));
        for i in 0..4 {
            vectors[j][i] = k * w[i];
            vectors[j + 2][i] = kp * wc[i];
        }
    }

    let mut eigen_residual = [0.0; 4];
    for (j, &omega) in [w1, w2, -w1, -w2].iter().enumerate() {
        let a = char_matrix(coeffs, Complex64::new(0.0, omega));
        let r = apply_char(&a, &vectors[j]);
        eigen_residual[j] = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let normality_residual = [
        (sigma_c(&vectors[0], &vectors[2]) - 1.0).norm(),
        (sigma_c(&vectors[1], &vectors[3]) - 1.0).norm(),
    ];
    Ok(EigenSolutionSet {
        omega1: w1,
        omega2: w2,
        vectors,
        constants,
        eigen_residual,
        normality_residual,
    })
}

/// The printed closed-form scalars M_j, M_j*, M-bar_j and h_j, evaluated
/// verbatim (complex where radicands are negative) and compared against the
/// numerically determined constants. Informational only; the construction
/// never uses them.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PrintedScalars {
    /// (M_j)^2 = omega_j^2 - 2F + n^2 per mode.
    pub m_squared: [f64; 2],
    /// (M_j*)^2 = omega_j^2 - 2E + n^2 per mode.
    pub m_star_squared: [f64; 2],
    /// M-bar_j^2 radicand omega_j^2 - E - 2 - n^2 per mode (negative in the
    /// classical regime, so M-bar_j is imaginary as printed).
    pub m_bar_radicand: [f64; 2],
    /// h_j = 1 / (2 omega_j M_j Mbar_j (M_j*)^2) as printed, as (re, im).
    pub h_printed: [(f64, f64); 2],
    /// |h_j| from the numerically determined K_j.
    pub h_numeric: [f64; 2],
}

pub fn printed_scalars(coeffs: &QuadraticCoeffs, report: &StabilityReport) -> Result<PrintedScalars> {
    let (w1, w2) = stable_frequencies(report)?;
    let n2 = coeffs.n * coeffs.n;
    let mut m_squared = [0.0; 2];
    let mut m_star_squared = [0.0; 2];
    let mut m_bar_radicand = [0.0; 2];
    let mut h_printed = [(0.0, 0.0); 2];
    let mut h_numeric = [0.0; 2];
    for (j, &w) in [w1, w2].iter().enumerate() {
        let w2j = w * w;
        m_squared[j] = w2j - 2.0 * coeffs.f + n2;
        m_star_squared[j] = w2j - 2.0 * coeffs.e + n2;
        m_bar_radicand[j] = w2j - coeffs.e - 2.0 - n2;
        let m = Complex64::new(m_squared[j], 0.0).sqrt();
        let m_star_sq = Complex64::new(m_star_squared[j], 0.0);
        let m_bar = Complex64::new(2.0, 0.0).sqrt() * Complex64::new(m_bar_radicand[j], 0.0).sqrt();
        let h = (2.0 * w * m * m_bar * m_star_sq).inv();
        h_printed[j] = (h.re, h.im);
        // Numeric h_j: K_j / (omega_j (2 n omega_j - i G)) with the K_j the
        // construction actually uses.
        let mode = build_mode(coeffs, w)?;
        let t = (w / mode.area.abs()).sqrt();
        let k = mode.phase * (t / 2.0);
        let denom = Complex64::new(2.0 * coeffs.n * w, -coeffs.g) * w;
        h_numeric[j] = (k / denom).norm();
    }
    Ok(PrintedScalars { m_squared, m_star_squared, m_bar_radicand, h_printed, h_numeric })
}

/// Real symplectic transformation X = J T with T = (Q1, Q2, P1, P2),
/// reducing H2 to (P1^2 - P2^2 + omega1^2 Q1^2 - omega2^2 Q2^2)/2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormalFormTransform {
    /// Column-major content is irrelevant to callers; row i, column j is
    /// J[(i, j)].
    pub j: Matrix4<f64>,
    pub omega1: f64,
    pub omega2: f64,
    /// |sigma(X_j, X_{j+2}) - 1| per mode.
    pub residual_normality: [f64; 2],
    /// max-norm of J^T S J - S.
    pub residual_canonical: f64,
    /// max-norm of J^T M J - diag(omega1^2, -omega2^2, 1, -1).
    pub residual_diagonal: f64,
    /// Column rescale factors (alpha1, alpha2, beta1, beta2) applied to the
    /// real/imaginary eigenvector parts to reach exact canonicity.
    pub column_scales: [f64; 4],
    /// Coefficients the transform was built from.
    pub coeffs: QuadraticCoeffs,
}

/// Assemble the real transformation from the eigen solution sets.
pub fn build_transform(
    coeffs: &QuadraticCoeffs,
    report: &StabilityReport,
) -> Result<NormalFormTransform> {
    let (w1, w2) = stable_frequencies(report)?;
    let m1 = build_mode(coeffs, w1)?;
    let m2 = build_mode(coeffs, w2)?;
    // H2 = omega1 I1 - omega2 I2 requires the first mode to carry positive
    // symplectic area and the second negative.
    if m1.area <= 0.0 || m2.area >= 0.0 {
        return Err(Error::SignatureConflict);
    }

    let alpha1 = (w1 / m1.area).sqrt();
    let beta1 = 1.0 / (w1 * m1.area).sqrt();
    let alpha2 = (w2 / m2.area.abs()).sqrt();
    let beta2 = -1.0 / (w2 * m2.area.abs()).sqrt();

    let q1 = m1.u * alpha1;
    let q2 = m2.u * alpha2;
    let p1 = m1.v * beta1;
    let p2 = m2.v * beta2;
    let j = Matrix4::from_columns(&[q1, q2, p1, p2]);

    let s = symplectic_form();
    let residual_canonical = (j.transpose() * s * j - s).abs().max();
    let m = h2_matrix(coeffs);
    let d = Matrix4::from_diagonal(&Vector4::new(w1 * w1, -w2 * w2, 1.0, -1.0));
    let residual_diagonal = (j.transpose() * m * j - d).abs().max();

    let sets = eigen_solution_sets(coeffs, report)?;

    Ok(NormalFormTransform {
        j,
        omega1: w1,
        omega2: w2,
        residual_normality: sets.normality_residual,
        residual_canonical,
        residual_diagonal,
        column_scales: [alpha1, alpha2, beta1, beta2],
        coeffs: *coeffs,
    })
}

/// Action-angle coordinates of one mode pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionAngle {
    pub i1: f64,
    pub i2: f64,
    /// Angles in [0, 2 pi).
    pub phi1: f64,
    pub phi2: f64,
}

fn wrap_angle(phi: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut p = phi % two_pi;
    if p < 0.0 {
        p += two_pi;
    }
    p
}

/// (Q1, Q2, P1, P2) -> action-angle, using
/// `Q_j = sqrt(2 I_j / omega_j) sin phi_j`, `P_j = sqrt(2 I_j omega_j) cos phi_j`.
/// Zero action maps the angle to 0.
pub fn to_action_angle(t: [f64; 4], report: &StabilityReport) -> Result<ActionAngle> {
    let (w1, w2) = report.frequencies()?;
    let [q1, q2, p1, p2] = t;
    let mode = |q: f64, p: f64, w: f64| {
        let i = (p * p + w * w * q * q) / (2.0 * w);
        let phi = if i < 1e-300 { 0.0 } else { wrap_angle((w.sqrt() * q).atan2(p / w.sqrt())) };
        (i, phi)
    };
    let (i1, phi1) = mode(q1, p1, w1);
    let (i2, phi2) = mode(q2, p2, w2);
    Ok(ActionAngle { i1, i2, phi1, phi2 })
}

/// Inverse of [`to_action_angle`].
pub fn from_action_angle(aa: &ActionAngle, report: &StabilityReport) -> Result<[f64; 4]> {
    let (w1, w2) = report.frequencies()?;
    Ok([
        (2.0 * aa.i1 / w1).sqrt() * aa.phi1.sin(),
        (2.0 * aa.i2 / w2).sqrt() * aa.phi2.sin(),
        (2.0 * aa.i1 * w1).sqrt() * aa.phi1.cos(),
        (2.0 * aa.i2 * w2).sqrt() * aa.phi2.cos(),
    ])
}

/// The normal form `H2 = omega1 I1 - omega2 I2`.
pub fn normal_form_h2(i1: f64, i2: f64, report: &StabilityReport) -> Result<f64> {
    let (w1, w2) = report.frequencies()?;
    Ok(w1 * i1 - w2 * i2)
}

/// Phase offset (x, y, px, py) of the linear orbit at time t. The angles
/// advance per the normal-form flow: phi1 with +omega1, phi2 with -omega2.
pub fn linear_phase_offset(
    i1: f64,
    i2: f64,
    phi1_0: f64,
    phi2_0: f64,
    t: f64,
    tf: &NormalFormTransform,
) -> [f64; 4] {
    let phi1 = tf.omega1 * t + phi1_0;
    let phi2 = -tf.omega2 * t + phi2_0;
    let tvec = Vector4::new(
        (2.0 * i1 / tf.omega1).sqrt() * phi1.sin(),
        (2.0 * i2 / tf.omega2).sqrt() * phi2.sin(),
        (2.0 * i1 * tf.omega1).sqrt() * phi1.cos(),
        (2.0 * i2 * tf.omega2).sqrt() * phi2.cos(),
    );
    let z = tf.j * tvec;
    [z[0], z[1], z[2], z[3]]
}

/// Position offset (x, y) of the linear orbit at time t.
pub fn linear_orbit(
    i1: f64,
    i2: f64,
    phi1_0: f64,
    phi2_0: f64,
    t: f64,
    tf: &NormalFormTransform,
) -> (f64, f64) {
    let z = linear_phase_offset(i1, i2, phi1_0, phi2_0, t, tf);
    (z[0], z[1])
}

/// H2 evaluated through the transform on normal coordinates; used by
/// self-consistency checks.
pub fn h2_through_transform(t: [f64; 4], tf: &NormalFormTransform) -> f64 {
    let tvec = Vector4::new(t[0], t[1], t[2], t[3]);
    let z = tf.j * tvec;
    h2_value(&tf.coeffs, [z[0], z[1], z[2], z[3]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linearize::{coefficients_exact, stability_analysis};
    use crate::model::SystemParams;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn setup(mu: f64) -> (QuadraticCoeffs, StabilityReport) {
        let p = SystemParams::classical(mu).unwrap();
        let c = coefficients_exact(&p).unwrap();
        let r = stability_analysis(&c);
        (c, r)
    }

    #[test]
    fn chain_vectors_are_null_vectors() {
        let (c, r) = setup(0.01);
        let sets = eigen_solution_sets(&c, &r).unwrap();
        for res in sets.eigen_residual {
            assert!(res < 1e-10, "eigen residual {res}");
        }
    }

    #[test]
    fn normality_conditions_hold() {
        let (c, r) = setup(0.01);
        let sets = eigen_solution_sets(&c, &r).unwrap();
        for res in sets.normality_residual {
            assert!(res < 1e-9, "normality residual {res}");
        }
        // Substitute the constants back into the defining sums explicitly.
        let v = &sets.vectors;
        let s1 = v[0][0] * v[2][2] - v[2][0] * v[0][2] + v[0][1] * v[2][3] - v[2][1] * v[0][3];
        assert_abs_diff_eq!(s1.re, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(s1.im, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn equal_mass_ratio_chain_simplifies() {
        // With G = 0 the x,y chain components reduce to 2 n i omega and
        // -(omega^2 + n^2 - 2E).
        let c = QuadraticCoeffs {
            e: 0.125,
            f: -0.625,
            g: 0.0,
            n: 1.0,
            source: crate::linearize::CoeffSource::Exact,
        };
        let w = chain_vector(&c, Complex64::new(0.0, 0.7));
        assert_abs_diff_eq!(w[0].re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(w[0].im, 2.0 * 0.7, max_relative = 1e-15);
        assert_relative_eq!(w[1].re, -(0.49 + 1.0 - 0.25), max_relative = 1e-15);
        assert_abs_diff_eq!(w[1].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn printed_scalars_classical() {
        let (c, r) = setup(0.01);
        let (w1, _) = r.frequencies().unwrap();
        let ps = printed_scalars(&c, &r).unwrap();
        assert_relative_eq!(ps.m_squared[0], w1 * w1 + 2.25, max_relative = 1e-12);
        assert_abs_diff_eq!(ps.m_squared[0], 3.17799, epsilon = 1e-5);
        assert_relative_eq!(ps.m_star_squared[0], w1 * w1 - 0.25 + 1.0, max_relative = 1e-12);
        assert_abs_diff_eq!(ps.m_star_squared[0], 1.67799, epsilon = 1e-5);
        // The printed Mbar radicand is negative classically, so h_j as
        // printed cannot be real.
        assert!(ps.m_bar_radicand[0] < 0.0);
        assert_abs_diff_eq!(ps.m_bar_radicand[0], -2.197, epsilon = 1e-3);
        assert!(ps.h_printed[0].1.abs() > 0.0);
        assert!(ps.h_numeric[0] > 0.0);
    }

    #[test]
    fn transform_gauge_and_residuals() {
        let (c, r) = setup(0.01);
        let tf = build_transform(&c, &r).unwrap();
        assert_eq!(tf.j[(0, 0)], 0.0);
        assert_eq!(tf.j[(0, 1)], 0.0);
        assert!(tf.residual_canonical < 1e-9, "canonical {}", tf.residual_canonical);
        assert!(tf.residual_diagonal < 1e-9, "diagonal {}", tf.residual_diagonal);
    }

    #[test]
    fn transform_diagonal_coefficients() {
        // H2 on (Q1^2, Q2^2, P1^2, P2^2) has coefficients
        // (omega1^2/2, -omega2^2/2, 1/2, -1/2).
        let (c, r) = setup(0.01);
        let tf = build_transform(&c, &r).unwrap();
        let m = h2_matrix(&c);
        let d = tf.j.transpose() * m * tf.j;
        assert_relative_eq!(d[(0, 0)] / 2.0, tf.omega1 * tf.omega1 / 2.0, max_relative = 1e-12);
        assert_relative_eq!(d[(1, 1)] / 2.0, -tf.omega2 * tf.omega2 / 2.0, max_relative = 1e-12);
        assert_relative_eq!(d[(2, 2)] / 2.0, 0.5, max_relative = 1e-12);
        assert_relative_eq!(d[(3, 3)] / 2.0, -0.5, max_relative = 1e-12);
    }

    #[test]
    fn transform_rejects_unstable() {
        let (c, r) = setup(0.05);
        assert!(matches!(build_transform(&c, &r), Err(Error::NotStable)));
    }

    #[test]
    fn action_angle_roundtrip() {
        use rand::{Rng, SeedableRng};
        let (_, r) = setup(0.01);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut max_err: f64 = 0.0;
        for _ in 0..1000 {
            let t: [f64; 4] = [
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ];
            let aa = to_action_angle(t, &r).unwrap();
            let back = from_action_angle(&aa, &r).unwrap();
            for i in 0..4 {
                max_err = max_err.max((t[i] - back[i]).abs());
            }
        }
        assert!(max_err < 1e-12, "roundtrip error {max_err}");
    }

    #[test]
    fn action_angle_conventions() {
        let (_, r) = setup(0.01);
        let aa = to_action_angle([0.0, 0.0, 0.0, 0.0], &r).unwrap();
        assert_eq!(aa.i1, 0.0);
        assert_eq!(aa.i2, 0.0);
        assert_eq!(aa.phi1, 0.0);
        // Q1 = sqrt(2 I / omega1), P1 = 0 gives I1 = I, phi1 = pi/2.
        let (w1, _) = r.frequencies().unwrap();
        let i = 0.37;
        let aa = to_action_angle([(2.0 * i / w1).sqrt(), 0.0, 0.0, 0.0], &r).unwrap();
        assert_relative_eq!(aa.i1, i, max_relative = 1e-14);
        assert_relative_eq!(aa.phi1, std::f64::consts::FRAC_PI_2, max_relative = 1e-14);
    }

    #[test]
    fn normal_form_energy() {
        let (c, r) = setup(0.01);
        let (w1, _) = r.frequencies().unwrap();
        assert_eq!(normal_form_h2(0.0, 0.0, &r).unwrap(), 0.0);
        assert_relative_eq!(normal_form_h2(1.0, 0.0, &r).unwrap(), w1, max_relative = 1e-15);
        // Random actions and angles: H2 through J equals omega1 I1 - omega2 I2.
        use rand::{Rng, SeedableRng};
        let tf = build_transform(&c, &r).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let aa = ActionAngle {
                i1: rng.gen_range(0.0..1.0),
                i2: rng.gen_range(0.0..1.0),
                phi1: rng.gen_range(0.0..6.28),
                phi2: rng.gen_range(0.0..6.28),
            };
            let t = from_action_angle(&aa, &r).unwrap();
            let h = h2_through_transform(t, &tf);
            let expect = normal_form_h2(aa.i1, aa.i2, &r).unwrap();
            assert_relative_eq!(h, expect, max_relative = 1e-9, epsilon = 1e-12);
        }
    }

    #[test]
    fn linear_orbit_basics() {
        let (c, r) = setup(0.01);
        let tf = build_transform(&c, &r).unwrap();
        // Zero actions stay at the equilibrium.
        for &t in &[0.0, 1.0, 5.5] {
            let (x, y) = linear_orbit(0.0, 0.0, 0.0, 0.0, t, &tf);
            assert_eq!(x, 0.0);
            assert_eq!(y, 0.0);
        }
        // Single-frequency motion is periodic with period 2 pi / omega1.
        let period = 2.0 * std::f64::consts::PI / tf.omega1;
        let (x0, y0) = linear_orbit(1e-10, 0.0, 0.3, 0.0, 0.2, &tf);
        let (x1, y1) = linear_orbit(1e-10, 0.0, 0.3, 0.0, 0.2 + period, &tf);
        assert_abs_diff_eq!(x0, x1, epsilon = 1e-10);
        assert_abs_diff_eq!(y0, y1, epsilon = 1e-10);
    }

    #[test]
    fn linear_flow_preserves_actions_and_energy() {
        let (_, r) = setup(0.01);
        let tfc = build_transform(&coefficients_exact(&SystemParams::classical(0.01).unwrap()).unwrap(), &r).unwrap();
        let (i1, i2) = (3e-4, 1e-4);
        let h0 = normal_form_h2(i1, i2, &r).unwrap();
        for &t in &[0.0, 1.0, 10.0, 100.0] {
            let z = linear_phase_offset(i1, i2, 0.4, 1.1, t, &tfc);
            let h = h2_value(&tfc.coeffs, z);
            assert_relative_eq!(h, h0, max_relative = 1e-12);
        }
    }

    #[test]
    fn amplitude_scales_linearly_with_sqrt_action() {
        let (c, r) = setup(0.01);
        let tf = build_transform(&c, &r).unwrap();
        let (x1, y1) = linear_orbit(4e-8, 1e-8, 0.7, 0.2, 2.3, &tf);
        let (x2, y2) = linear_orbit(1e-8, 0.25e-8, 0.7, 0.2, 2.3, &tf);
        assert_relative_eq!(x1, 2.0 * x2, max_relative = 1e-12);
        assert_relative_eq!(y1, 2.0 * y2, max_relative = 1e-12);
    }

    #[test]
    fn canonicity_over_random_stable_sets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let mut tested = 0;
        while tested < 100 {
            let eps = rng.gen_range(0.0..1e-2);
            let a2 = rng.gen_range(0.0..1e-2);
            let mb = rng.gen_range(0.0..1e-2);
            let fa = rng.gen_range(0.0..0.05);
            let cb = rng.gen_range(0.0..0.05);
            let template = crate::linearize::SystemTemplate {
                q1: 1.0 - eps,
                a2,
                mb,
                flatness_a: fa,
                core_b: cb,
                rc_override: None,
            };
            let Ok(mu_crit) = crate::linearize::critical_mass_numeric(&template) else {
                continue;
            };
            let mu = rng.gen_range(1e-4..mu_crit * 0.9);
            let Ok(params) = template.with_mu(mu) else { continue };
            let Ok(c) = coefficients_exact(&params) else { continue };
            let r = stability_analysis(&c);
            if !r.stable {
                continue;
            }
            let tf = build_transform(&c, &r).unwrap();
            assert!(tf.residual_canonical < 1e-9);
            assert!(tf.residual_diagonal < 1e-9);
            tested += 1;
        }
    }
}
