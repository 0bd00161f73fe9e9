//! Physical model: system parameters, belt potential, perturbed mean motion,
//! effective potential with gradient and Hessian, equations of motion, and
//! the Jacobi constant.
//!
//! Units are normalized: the mass sum and the primary separation are 1 and
//! the gravitational constant is 1. The frame rotates with the perturbed
//! mean motion `n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radius around each primary inside which evaluations return a typed error
/// instead of blowing up.
pub const PRIMARY_GUARD: f64 = 1e-9;

/// CGS constant in the mass-reduction relation q1 = 1 - 5.6e-5 * chi / (a * rho).
const RADIATION_COEFF: f64 = 5.6e-5;

/// Compute the mass-reduction factor q1 from particle radius (cm), density
/// (g/cm^3) and radiation-pressure efficiency chi. Fails with
/// [`Error::NegativeFactor`] when radiation exceeds gravity; see
/// [`mass_reduction_factor_clamped`] for the clamping variant.
pub fn mass_reduction_factor(radius_cm: f64, density: f64, chi: f64) -> Result<f64> {
    if !(radius_cm > 0.0) {
        return Err(Error::NonPositiveInput { name: "radius" });
    }
    if !(density > 0.0) {
        return Err(Error::NonPositiveInput { name: "density" });
    }
    if chi < 0.0 {
        return Err(Error::ParameterOutOfRange { name: "chi", value: chi });
    }
    let q1 = 1.0 - RADIATION_COEFF * chi / (radius_cm * density);
    if q1 < 0.0 {
        return Err(Error::NegativeFactor { q1 });
    }
    Ok(q1)
}

/// Same as [`mass_reduction_factor`] but clamps the result into [0, 1].
pub fn mass_reduction_factor_clamped(radius_cm: f64, density: f64, chi: f64) -> Result<f64> {
    match mass_reduction_factor(radius_cm, density, chi) {
        Ok(q1) => Ok(q1.min(1.0)),
        Err(Error::NegativeFactor { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// Particle properties from which a mass-reduction factor can be derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleProperties {
    /// Particle radius in cm.
    pub radius_cm: f64,
    /// Particle density in g/cm^3.
    pub density: f64,
    /// Radiation-pressure efficiency factor.
    pub chi: f64,
}

/// Radiation pressure of the bigger primary, held as the dimensionless
/// mass-reduction factor q1 in [0, 1] (epsilon = 1 - q1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiationSource {
    q1: f64,
    particle: Option<ParticleProperties>,
}

impl RadiationSource {
    /// A source with the given mass-reduction factor.
    pub fn from_q1(q1: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q1) {
            return Err(Error::ParameterOutOfRange { name: "q1", value: q1 });
        }
        Ok(Self { q1, particle: None })
    }

    /// A source with q1 = 1 - epsilon.
    pub fn from_epsilon(epsilon: f64) -> Result<Self> {
        Self::from_q1(1.0 - epsilon)
    }

    /// Derive q1 from particle properties; `clamp` maps a negative factor to 0.
    pub fn from_particle(radius_cm: f64, density: f64, chi: f64, clamp: bool) -> Result<Self> {
        let q1 = if clamp {
            mass_reduction_factor_clamped(radius_cm, density, chi)?
        } else {
            let q1 = mass_reduction_factor(radius_cm, density, chi)?;
            if q1 > 1.0 {
                return Err(Error::ParameterOutOfRange { name: "q1", value: q1 });
            }
            q1
        };
        Ok(Self {
            q1,
            particle: Some(ParticleProperties { radius_cm, density, chi }),
        })
    }

    pub fn q1(&self) -> f64 {
        self.q1
    }

    pub fn epsilon(&self) -> f64 {
        1.0 - self.q1
    }

    pub fn particle(&self) -> Option<ParticleProperties> {
        self.particle
    }
}

/// Flattened belt mass distribution. In-plane it contributes
/// `-Mb / sqrt(r^2 + T^2)` with `T = flatness_a + core_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeltProfile {
    /// Total belt mass (normalized units).
    pub mb: f64,
    /// Flatness parameter.
    pub flatness_a: f64,
    /// Core parameter.
    pub core_b: f64,
}

impl BeltProfile {
    pub fn new(mb: f64, flatness_a: f64, core_b: f64) -> Result<Self> {
        if mb < 0.0 {
            return Err(Error::ParameterOutOfRange { name: "mb", value: mb });
        }
        if flatness_a < 0.0 {
            return Err(Error::ParameterOutOfRange { name: "flatness_a", value: flatness_a });
        }
        if core_b < 0.0 {
            return Err(Error::ParameterOutOfRange { name: "core_b", value: core_b });
        }
        Ok(Self { mb, flatness_a, core_b })
    }

    /// A massless belt.
    pub fn none() -> Self {
        Self { mb: 0.0, flatness_a: 0.0, core_b: 0.0 }
    }

    /// T = flatness + core.
    pub fn t(&self) -> f64 {
        self.flatness_a + self.core_b
    }
}

/// Planar belt potential `V(r, 0) = -Mb / sqrt(r^2 + T^2)`.
pub fn belt_potential_planar(r: f64, belt: &BeltProfile) -> Result<f64> {
    if belt.mb == 0.0 {
        return Ok(0.0);
    }
    let t = belt.t();
    let s2 = r * r + t * t;
    if s2 < PRIMARY_GUARD * PRIMARY_GUARD {
        return Err(Error::Singularity);
    }
    Ok(-belt.mb / s2.sqrt())
}

/// Full parameter set of the system; `rc` and `n` are derived on
/// construction unless `rc` is overridden.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Mass ratio of the smaller primary, in (0, 1/2).
    pub mu: f64,
    /// Radiation pressure of the bigger primary.
    pub radiation: RadiationSource,
    /// Oblateness coefficient of the smaller primary.
    pub a2: f64,
    /// Belt mass distribution.
    pub belt: BeltProfile,
    /// Reference radius entering the mean motion; derived from mu, q1 by
    /// default, optionally overridden.
    pub rc: f64,
    /// Whether `rc` was overridden rather than derived.
    pub rc_overridden: bool,
    /// Perturbed mean motion of the rotating frame.
    pub n: f64,
}

impl SystemParams {
    /// Assemble a parameter set, deriving `rc` (unless overridden) and `n`.
    pub fn build(
        mu: f64,
        radiation: RadiationSource,
        a2: f64,
        belt: BeltProfile,
        rc_override: Option<f64>,
    ) -> Result<Self> {
        if !(mu > 0.0 && mu < 0.5) {
            return Err(Error::ParameterOutOfRange { name: "mu", value: mu });
        }
        if a2 < 0.0 {
            return Err(Error::ParameterOutOfRange { name: "a2", value: a2 });
        }
        let q1 = radiation.q1();
        let rc = match rc_override {
            Some(rc) => {
                if !(rc > 0.0) {
                    return Err(Error::ParameterOutOfRange { name: "rc", value: rc });
                }
                rc
            }
            None => ((1.0 - mu) * q1.powf(2.0 / 3.0) + mu * mu).sqrt(),
        };
        let t = belt.t();
        let n2 = 1.0 + 1.5 * a2 + 2.0 * belt.mb * rc / (rc * rc + t * t).powf(1.5);
        Ok(Self {
            mu,
            radiation,
            a2,
            belt,
            rc,
            rc_overridden: rc_override.is_some(),
            n: n2.sqrt(),
        })
    }

    /// The classical circular restricted problem: no radiation, no
    /// oblateness, no belt.
    pub fn classical(mu: f64) -> Result<Self> {
        Self::build(mu, RadiationSource::from_q1(1.0)?, 0.0, BeltProfile::none(), None)
    }

    pub fn q1(&self) -> f64 {
        self.radiation.q1()
    }

    pub fn epsilon(&self) -> f64 {
        self.radiation.epsilon()
    }

    pub fn mb(&self) -> f64 {
        self.belt.mb
    }

    pub fn t(&self) -> f64 {
        self.belt.t()
    }

    /// Distances to the bigger and smaller primary.
    pub fn primary_distances(&self, x: f64, y: f64) -> (f64, f64) {
        let r1 = ((x + self.mu) * (x + self.mu) + y * y).sqrt();
        let r2 = ((x + self.mu - 1.0) * (x + self.mu - 1.0) + y * y).sqrt();
        (r1, r2)
    }

    fn check_guard(&self, x: f64, y: f64) -> Result<()> {
        let (r1, r2) = self.primary_distances(x, y);
        if r1 < PRIMARY_GUARD {
            return Err(Error::SingularityAtPrimary { index: 1 });
        }
        if r2 < PRIMARY_GUARD {
            return Err(Error::SingularityAtPrimary { index: 2 });
        }
        Ok(())
    }

    /// Effective potential
    /// `Omega = n^2 (x^2+y^2)/2 + (1-mu) q1 / r1 + mu / r2 + mu A2 / (2 r2^3)
    ///  + Mb / sqrt(x^2+y^2+T^2)`.
    pub fn effective_potential(&self, x: f64, y: f64) -> Result<f64> {
        self.check_guard(x, y)?;
        Ok(self.effective_potential_unguarded(x, y))
    }

    /// Same as [`Self::effective_potential`] without the singularity guard;
    /// used by grid sweeps that mask singular cells themselves.
    pub fn effective_potential_unguarded(&self, x: f64, y: f64) -> f64 {
        let (r1, r2) = self.primary_distances(x, y);
        let t = self.t();
        let r2sq = x * x + y * y;
        self.n * self.n * r2sq / 2.0
            + (1.0 - self.mu) * self.q1() / r1
            + self.mu / r2
            + self.mu * self.a2 / (2.0 * r2 * r2 * r2)
            + self.belt.mb / (r2sq + t * t).sqrt()
    }

    /// Analytic gradient (Omega_x, Omega_y).
    pub fn potential_gradient(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        self.check_guard(x, y)?;
        Ok(self.potential_gradient_unguarded(x, y))
    }

    pub fn potential_gradient_unguarded(&self, x: f64, y: f64) -> (f64, f64) {
        let mu = self.mu;
        let q1 = self.q1();
        let (r1, r2) = self.primary_distances(x, y);
        let r13 = r1 * r1 * r1;
        let r23 = r2 * r2 * r2;
        let r25 = r23 * r2 * r2;
        let t = self.t();
        let s3 = (x * x + y * y + t * t).powf(1.5);
        let n2 = self.n * self.n;
        let gx = n2 * x
            - (1.0 - mu) * q1 * (x + mu) / r13
            - mu * (x + mu - 1.0) / r23
            - 1.5 * mu * self.a2 * (x + mu - 1.0) / r25
            - self.belt.mb * x / s3;
        let gy = n2 * y
            - (1.0 - mu) * q1 * y / r13
            - mu * y / r23
            - 1.5 * mu * self.a2 * y / r25
            - self.belt.mb * y / s3;
        (gx, gy)
    }

    /// Analytic Hessian (Omega_xx, Omega_xy, Omega_yy).
    pub fn potential_hessian(&self, x: f64, y: f64) -> Result<(f64, f64, f64)> {
        self.check_guard(x, y)?;
        Ok(self.potential_hessian_unguarded(x, y))
    }

    pub fn potential_hessian_unguarded(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let mu = self.mu;
        let q1 = self.q1();
        let n2 = self.n * self.n;
        let dx1 = x + mu;
        let dx2 = x + mu - 1.0;
        let (r1, r2) = self.primary_distances(x, y);

        // d^2/dx^2 and friends of 1/r for a center offset dx.
        let inv_r = |r: f64, dx: f64| {
            let r3 = r * r * r;
            let r5 = r3 * r * r;
            let fxx = -1.0 / r3 + 3.0 * dx * dx / r5;
            let fyy = -1.0 / r3 + 3.0 * y * y / r5;
            let fxy = 3.0 * dx * y / r5;
            (fxx, fxy, fyy)
        };
        // Same for 1/r^3 (the oblateness term).
        let inv_r3 = |r: f64, dx: f64| {
            let r5 = r.powi(5);
            let r7 = r5 * r * r;
            let gxx = -3.0 / r5 + 15.0 * dx * dx / r7;
            let gyy = -3.0 / r5 + 15.0 * y * y / r7;
            let gxy = 15.0 * dx * y / r7;
            (gxx, gxy, gyy)
        };
        let (f1xx, f1xy, f1yy) = inv_r(r1, dx1);
        let (f2xx, f2xy, f2yy) = inv_r(r2, dx2);
        let (g2xx, g2xy, g2yy) = inv_r3(r2, dx2);

        // Belt term 1/sqrt(x^2 + y^2 + T^2).
        let t = self.t();
        let s2 = x * x + y * y + t * t;
        let s3 = s2.powf(1.5);
        let s5 = s3 * s2;
        let hxx = -1.0 / s3 + 3.0 * x * x / s5;
        let hyy = -1.0 / s3 + 3.0 * y * y / s5;
        let hxy = 3.0 * x * y / s5;

        let k1 = (1.0 - mu) * q1;
        let ka = mu * self.a2 / 2.0;
        let mb = self.belt.mb;
        let oxx = n2 + k1 * f1xx + mu * f2xx + ka * g2xx + mb * hxx;
        let oxy = k1 * f1xy + mu * f2xy + ka * g2xy + mb * hxy;
        let oyy = n2 + k1 * f1yy + mu * f2yy + ka * g2yy + mb * hyy;
        (oxx, oxy, oyy)
    }

    /// Jacobi constant `C = 2 Omega - v^2`.
    pub fn jacobi_constant(&self, state: &PhaseState) -> Result<f64> {
        let omega = self.effective_potential(state.x, state.y)?;
        Ok(2.0 * omega - state.vx * state.vx - state.vy * state.vy)
    }

    /// Right-hand side of the equations of motion,
    /// `(dx, dy, ddx, ddy)` with `ddx = 2 n dy + Omega_x`,
    /// `ddy = -2 n dx + Omega_y`.
    pub fn eom_rhs(&self, state: &PhaseState) -> Result<[f64; 4]> {
        self.check_guard(state.x, state.y)?;
        Ok(self.eom_rhs_unguarded(state))
    }

    pub fn eom_rhs_unguarded(&self, state: &PhaseState) -> [f64; 4] {
        let (gx, gy) = self.potential_gradient_unguarded(state.x, state.y);
        [
            state.vx,
            state.vy,
            2.0 * self.n * state.vy + gx,
            -2.0 * self.n * state.vx + gy,
        ]
    }
}

/// Convenience wrapper matching the scalar-argument construction used by the
/// CLI: build a system from raw numbers.
#[allow(clippy::too_many_arguments)]
pub fn build_system(
    mu: f64,
    q1: f64,
    a2: f64,
    mb: f64,
    flatness_a: f64,
    core_b: f64,
    rc_override: Option<f64>,
) -> Result<SystemParams> {
    SystemParams::build(
        mu,
        RadiationSource::from_q1(q1)?,
        a2,
        BeltProfile::new(mb, flatness_a, core_b)?,
        rc_override,
    )
}

/// Planar rotating-frame state in velocity form. Momentum form
/// (`px = vx - n y`, `py = vy + n x`) is available through the conversion
/// methods for a given mean motion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl PhaseState {
    pub fn new(x: f64, y: f64, vx: f64, vy: f64) -> Self {
        Self { x, y, vx, vy }
    }

    pub fn at_rest(x: f64, y: f64) -> Self {
        Self { x, y, vx: 0.0, vy: 0.0 }
    }

    /// Build from momentum form for the given mean motion.
    pub fn from_momenta(x: f64, y: f64, px: f64, py: f64, n: f64) -> Self {
        Self {
            x,
            y,
            vx: px + n * y,
            vy: py - n * x,
        }
    }

    /// Conjugate momenta for the given mean motion.
    pub fn momenta(&self, n: f64) -> (f64, f64) {
        (self.vx - n * self.y, self.vy + n * self.x)
    }

    pub fn speed(&self) -> f64 {
        (self.vx * self.vx + self.vy * self.vy).sqrt()
    }
}
