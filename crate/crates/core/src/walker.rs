//! Walker magnetostatic modes of a uniformly magnetized sphere.
//!
//! Only the azimuthal structure of a mode enters the scattering selection
//! rules. The transverse magnetization is modelled as
//!
//! ```text
//! M_±(ρ, φ, z) = M_⊥(ρ, z) · exp(∓ i L_z φ),   L_z = -(m_mag - 1)
//! ```
//!
//! with an axially symmetric envelope `M_⊥` taken from a small catalog of
//! model shapes. The envelopes are qualitative stand-ins for the true
//! Walker-mode solutions; they fix the node structure and vanish on the axis
//! whenever the mode winds. Eigenfrequencies are inputs.
//!
//! All lengths are fractions of the sphere radius and every envelope is
//! normalized to `∫ |M_⊥|² dV = 1` over the unit sphere.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::GaussLegendre;

/// Largest phase defect tolerated when rounding an unwrapped phase to a
/// whole number of turns.
pub const WINDING_REJECTION_RAD: f64 = 0.1;

/// Envelopes below this magnitude make the local phase meaningless.
pub const DEGENERATE_ENVELOPE: f64 = 1e-12;

/// Walker-mode label `(n, m_mag, r)`. Negative `m_mag` is the barred index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WalkerIndex {
    pub n: u32,
    pub m_mag: i32,
    pub r: u32,
}

impl WalkerIndex {
    pub fn new(n: u32, m_mag: i32, r: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidIndex(format!(
                "Walker n must be >= 1, got {n}"
            )));
        }
        if m_mag.unsigned_abs() > n {
            return Err(Error::InvalidIndex(format!(
                "Walker |m_mag| must not exceed n: ({n}, {m_mag}, {r})"
            )));
        }
        Ok(Self { n, m_mag, r })
    }

    pub fn kittel() -> Self {
        Self {
            n: 1,
            m_mag: 1,
            r: 0,
        }
    }

    pub fn oam(&self) -> i32 {
        walker_oam(self.m_mag)
    }
}

impl fmt::Display for WalkerIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.m_mag < 0 {
            write!(f, "({}, {}bar, {})", self.n, -self.m_mag, self.r)
        } else {
            write!(f, "({}, {}, {})", self.n, self.m_mag, self.r)
        }
    }
}

/// Orbital angular momentum carried by a Walker mode with azimuthal index
/// `m_mag`, in the high-field limit where it is an exact integer.
pub fn walker_oam(m_mag: i32) -> i32 {
    -(m_mag - 1)
}

/// Shape factor multiplying `ρ^|L_z|` in the envelope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeShape {
    /// Spatially uniform (Kittel-like).
    Uniform,
    /// `(1 - 2 r²)²`: one spherical nodal shell at `r = 1/√2`.
    RadialNode,
    /// `1 - z²`: weight concentrated near the equatorial plane.
    Vortex,
}

impl EnvelopeShape {
    fn factor(self, rho: f64, z: f64) -> f64 {
        match self {
            EnvelopeShape::Uniform => 1.0,
            EnvelopeShape::RadialNode => {
                let s = 1.0 - 2.0 * (rho * rho + z * z);
                s * s
            }
            EnvelopeShape::Vortex => 1.0 - z * z,
        }
    }
}

/// Point in spherical coordinates, radius in units of the sphere radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta: f64, phi: f64) -> Self {
        Self { r, theta, phi }
    }

    pub fn cylindrical(&self) -> (f64, f64) {
        (self.r * self.theta.sin(), self.r * self.theta.cos())
    }
}

/// `M_± = M_x ± i M_y` at one point, oscillation phase zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseMagnetization {
    pub plus: Complex64,
    pub minus: Complex64,
}

impl TransverseMagnetization {
    pub const ZERO: Self = Self {
        plus: Complex64 { re: 0.0, im: 0.0 },
        minus: Complex64 { re: 0.0, im: 0.0 },
    };

    pub fn magnitude(&self) -> f64 {
        self.plus.norm()
    }
}

/// Anything that can report the transverse magnetization at a point.
pub trait TransverseField {
    fn magnetization(&self, point: SphericalPoint) -> TransverseMagnetization;
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkerMode {
    pub index: WalkerIndex,
    /// Angular frequency in rad/s.
    pub omega_m: f64,
    pub shape: EnvelopeShape,
    oam: i32,
    azimuth_offset: f64,
    norm: f64,
}

impl WalkerMode {
    pub fn new(index: WalkerIndex, omega_m: f64, shape: EnvelopeShape) -> Result<Self> {
        let index = WalkerIndex::new(index.n, index.m_mag, index.r)?;
        if !(omega_m > 0.0) || !omega_m.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Walker frequency must be positive, got {omega_m}"
            )));
        }
        let oam = index.oam();
        let mut mode = Self {
            index,
            omega_m,
            shape,
            oam,
            azimuth_offset: 0.0,
            norm: 1.0,
        };
        let weight = mode.raw_norm_squared();
        if !(weight > 0.0) {
            return Err(Error::ZeroNorm(format!(
                "envelope of {index} integrates to zero"
            )));
        }
        mode.norm = weight.sqrt().recip();
        Ok(mode)
    }

    /// Mode with the given OAM; the Walker index is the smallest one
    /// consistent with it.
    pub fn with_oam(oam: i32, omega_m: f64, shape: EnvelopeShape) -> Result<Self> {
        let m_mag = 1 - oam;
        let n = m_mag.unsigned_abs().max(1);
        Self::new(WalkerIndex::new(n, m_mag, 0)?, omega_m, shape)
    }

    /// Same mode rotated rigidly about the symmetry axis by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        Self {
            azimuth_offset: self.azimuth_offset + angle,
            ..self.clone()
        }
    }

    pub fn with_frequency(&self, omega_m: f64) -> Self {
        Self {
            omega_m,
            ..self.clone()
        }
    }

    pub fn oam(&self) -> i32 {
        self.oam
    }

    pub fn azimuth_offset(&self) -> f64 {
        self.azimuth_offset
    }

    fn raw_envelope(&self, rho: f64, z: f64) -> f64 {
        if rho * rho + z * z > 1.0 {
            return 0.0;
        }
        rho.powi(self.oam.abs()) * self.shape.factor(rho, z)
    }

    /// Normalized `M_⊥(ρ, z)`; zero outside the sphere.
    pub fn envelope(&self, rho: f64, z: f64) -> f64 {
        self.norm * self.raw_envelope(rho, z)
    }

    /// `∫ |raw envelope|² dV`; Gauss–Legendre in (r, cos θ) is exact for the
    /// polynomial catalog.
    fn raw_norm_squared(&self) -> f64 {
        let order = 16 + self.oam.unsigned_abs() as usize;
        let gl = GaussLegendre::new(order).expect("nonzero order");
        let mut total = 0.0;
        for (r, wr) in gl.on(0.0, 1.0) {
            for (c, wc) in gl.on(-1.0, 1.0) {
                let s = (1.0 - c * c).max(0.0).sqrt();
                let m = self.raw_envelope(r * s, r * c);
                total += wr * wc * r * r * m * m;
            }
        }
        2.0 * PI * total
    }
}

impl TransverseField for WalkerMode {
    fn magnetization(&self, point: SphericalPoint) -> TransverseMagnetization {
        magnetization_field(self, point)
    }
}

/// `M_+ = M_⊥ e^{-i L_z φ}`, `M_- = M_⊥ e^{+i L_z φ}`; zero outside the
/// sphere.
pub fn magnetization_field(mode: &WalkerMode, point: SphericalPoint) -> TransverseMagnetization {
    if point.r > 1.0 {
        return TransverseMagnetization::ZERO;
    }
    let (rho, z) = point.cylindrical();
    let amplitude = mode.envelope(rho, z);
    let phase = mode.oam as f64 * (point.phi - mode.azimuth_offset);
    TransverseMagnetization {
        plus: Complex64::from_polar(amplitude, -phase),
        minus: Complex64::from_polar(amplitude, phase),
    }
}

/// Winding number of `M_+` around the horizontal circle of radius `rho` at
/// height `z`, by phase unwrapping over `samples` points.
pub fn extract_winding<F: TransverseField + ?Sized>(
    field: &F,
    rho: f64,
    z: f64,
    samples: usize,
) -> Result<i32> {
    if samples < 16 {
        return Err(Error::InvalidParameter(format!(
            "winding extraction needs at least 16 samples, got {samples}"
        )));
    }
    if !(rho > 0.0) || rho * rho + z * z >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "sampling circle (rho = {rho}, z = {z}) is not inside the sphere"
        )));
    }
    let r = (rho * rho + z * z).sqrt();
    let theta = rho.atan2(z);

    let sample = |k: usize| -> Result<Complex64> {
        let phi = 2.0 * PI * k as f64 / samples as f64;
        let m = field.magnetization(SphericalPoint::new(r, theta, phi));
        if m.magnitude() < DEGENERATE_ENVELOPE {
            return Err(Error::DegenerateEnvelope(m.magnitude()));
        }
        Ok(m.plus)
    };

    // the endpoint is evaluated at 2π rather than reused, so a field that
    // fails to close on itself shows up as a fractional total
    let mut previous = sample(0)?;
    let mut total = 0.0;
    for k in 1..=samples {
        let current = sample(k)?;
        total += (current * previous.conj()).arg();
        previous = current;
    }
    let turns = total / (-2.0 * PI);
    let winding = turns.round();
    let deviation = (total + 2.0 * PI * winding).abs();
    if deviation > WINDING_REJECTION_RAD {
        return Err(Error::WindingInconsistent { total, deviation });
    }
    Ok(winding as i32)
}

/// Grid used by [`oam_volume_integral`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VolumeGrid {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl Default for VolumeGrid {
    fn default() -> Self {
        Self {
            radial: 24,
            polar: 24,
            azimuthal: 32,
        }
    }
}

/// `∫ l_z |M_⊥|² dV / ∫ |M_⊥|² dV`, where the local OAM density is read off
/// the azimuthal phase gradient of `M_+`.
pub fn oam_volume_integral<F: TransverseField + ?Sized>(
    field: &F,
    grid: VolumeGrid,
) -> Result<f64> {
    if grid.radial == 0 || grid.polar == 0 || grid.azimuthal < 3 {
        return Err(Error::InvalidParameter(format!("degenerate grid {grid:?}")));
    }
    let radial = GaussLegendre::new(grid.radial)?;
    let polar = GaussLegendre::new(grid.polar)?;
    let dphi = 2.0 * PI / grid.azimuthal as f64;
    let h = 1e-4;

    let mut weighted = 0.0;
    let mut weight = 0.0;
    for (r, wr) in radial.on(0.0, 1.0) {
        for (c, wc) in polar.on(-1.0, 1.0) {
            let theta = c.acos();
            for k in 0..grid.azimuthal {
                let phi = (k as f64 + 0.5) * dphi;
                let at = |p: f64| field.magnetization(SphericalPoint::new(r, theta, p)).plus;
                let m0 = at(phi);
                let density = m0.norm_sqr();
                if density == 0.0 {
                    continue;
                }
                let step = (at(phi + h) * at(phi - h).conj()).arg() / (2.0 * h);
                let dv = wr * wc * r * r * dphi;
                weighted += -step * density * dv;
                weight += density * dv;
            }
        }
    }
    if weight <= 0.0 {
        return Err(Error::ZeroNorm(
            "transverse magnetization vanishes everywhere".into(),
        ));
    }
    Ok(weighted / weight)
}

/// Four representative modes: the Kittel mode, two quasi-vortices and a radial-node mode.
pub fn reference_catalog(omega_m: f64) -> Vec<WalkerMode> {
    [
        ((1, 1, 0), EnvelopeShape::Uniform),
        ((3, -1, 1), EnvelopeShape::Vortex),
        ((3, 1, 1), EnvelopeShape::RadialNode),
        ((4, 0, 1), EnvelopeShape::Vortex),
    ]
    .into_iter()
    .map(|((n, m, r), shape)| {
        WalkerMode::new(WalkerIndex { n, m_mag: m, r }, omega_m, shape)
            .expect("catalog entries are valid")
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn mode(n: u32, m: i32, r: u32, shape: EnvelopeShape) -> WalkerMode {
        WalkerMode::new(WalkerIndex::new(n, m, r).unwrap(), 2.0 * PI * 5e9, shape).unwrap()
    }

    #[test]
    fn oam_of_reference_indices() {
        assert_eq!(walker_oam(1), 0);
        assert_eq!(walker_oam(0), 1);
        assert_eq!(walker_oam(-1), 2);
    }

    #[test]
    fn index_validation() {
        assert!(WalkerIndex::new(0, 0, 0).is_err());
        assert!(WalkerIndex::new(2, 3, 0).is_err());
        assert!(WalkerIndex::new(3, -3, 1).is_ok());
        assert_eq!(
            WalkerIndex::new(3, -1, 1).unwrap().to_string(),
            "(3, 1bar, 1)"
        );
    }

    #[test]
    fn kittel_has_no_winding() {
        let m = mode(1, 1, 0, EnvelopeShape::Uniform);
        let a = magnetization_field(&m, SphericalPoint::new(0.5, PI / 2.0, 0.3));
        let b = magnetization_field(&m, SphericalPoint::new(0.5, PI / 2.0, 2.1));
        assert_relative_eq!(a.plus.re, b.plus.re, epsilon = 1e-15);
        assert_relative_eq!(a.plus.im, b.plus.im, epsilon = 1e-15);
    }

    #[test]
    fn single_winding_flips_sign_over_half_turn() {
        let m = mode(4, 0, 1, EnvelopeShape::Vortex);
        let a = magnetization_field(&m, SphericalPoint::new(0.5, PI / 2.0, 0.0)).plus;
        let b = magnetization_field(&m, SphericalPoint::new(0.5, PI / 2.0, PI)).plus;
        assert_relative_eq!(b.re, -a.re, epsilon = 1e-14);
        assert!(b.im.abs() < 1e-14);
    }

    #[test]
    fn double_winding_phase_at_quarter_turn() {
        let m = mode(3, -1, 1, EnvelopeShape::Vortex);
        let a = magnetization_field(&m, SphericalPoint::new(0.5, PI / 2.0, 0.0)).plus;
        let b = magnetization_field(&m, SphericalPoint::new(0.5, PI / 2.0, PI / 2.0)).plus;
        let relative = (b / a).arg();
        // -π and +π are the same phase
        assert_relative_eq!(relative.abs(), PI, epsilon = 1e-12);
    }

    #[test]
    fn outside_sphere_is_zero() {
        let m = mode(1, 1, 0, EnvelopeShape::Uniform);
        assert_eq!(
            magnetization_field(&m, SphericalPoint::new(1.01, 1.0, 0.0)),
            TransverseMagnetization::ZERO
        );
    }

    #[test]
    fn envelopes_are_unit_normalized() {
        for m in reference_catalog(1.0) {
            let gl = GaussLegendre::new(40).unwrap();
            let mut total = 0.0;
            for (r, wr) in gl.on(0.0, 1.0) {
                for (c, wc) in gl.on(-1.0, 1.0) {
                    let s = (1.0 - c * c).sqrt();
                    let e = m.envelope(r * s, r * c);
                    total += wr * wc * r * r * e * e;
                }
            }
            assert_relative_eq!(2.0 * PI * total, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn winding_of_reference_modes() {
        let cat = reference_catalog(1.0);
        for m in &cat {
            assert_eq!(
                extract_winding(m, 0.5, 0.0, 64).unwrap(),
                walker_oam(m.index.m_mag)
            );
        }
    }

    #[test]
    fn winding_of_injected_mode() {
        let m = WalkerMode::with_oam(5, 1.0, EnvelopeShape::Vortex).unwrap();
        assert_eq!(extract_winding(&m, 0.5, 0.1, 64).unwrap(), 5);
    }

    #[test]
    fn winding_on_axis_is_degenerate() {
        let m = mode(4, 0, 1, EnvelopeShape::Vortex);
        // envelope ~ rho, vanishes in the limit
        assert!(matches!(
            extract_winding(&m, 1e-14, 0.0, 32),
            Err(Error::DegenerateEnvelope(_))
        ));
    }

    #[test]
    fn aliased_sampling_is_rejected() {
        struct Wild;
        impl TransverseField for Wild {
            fn magnetization(&self, p: SphericalPoint) -> TransverseMagnetization {
                // 0.7 turns per revolution cannot close on itself
                let plus = Complex64::from_polar(1.0, -0.7 * p.phi);
                TransverseMagnetization {
                    plus,
                    minus: plus.conj(),
                }
            }
        }
        assert!(matches!(
            extract_winding(&Wild, 0.5, 0.0, 64),
            Err(Error::WindingInconsistent { .. })
        ));
    }

    #[test]
    fn volume_integral_recovers_oam() {
        let kittel = mode(1, 1, 0, EnvelopeShape::Uniform);
        assert!(
            oam_volume_integral(&kittel, VolumeGrid::default())
                .unwrap()
                .abs()
                < 1e-6
        );
        let vortex = mode(3, -1, 1, EnvelopeShape::Vortex);
        assert_relative_eq!(
            oam_volume_integral(&vortex, VolumeGrid::default()).unwrap(),
            2.0,
            epsilon = 1e-6
        );
        let synthetic = WalkerMode::with_oam(3, 1.0, EnvelopeShape::RadialNode).unwrap();
        assert_relative_eq!(
            oam_volume_integral(&synthetic, VolumeGrid::default()).unwrap(),
            3.0,
            epsilon = 1e-6
        );
    }

    #[test]
    fn volume_integral_of_null_field_errors() {
        struct Null;
        impl TransverseField for Null {
            fn magnetization(&self, _: SphericalPoint) -> TransverseMagnetization {
                TransverseMagnetization::ZERO
            }
        }
        assert!(matches!(
            oam_volume_integral(&Null, VolumeGrid::default()),
            Err(Error::ZeroNorm(_))
        ));
    }

    #[test]
    fn rotation_is_a_pure_phase() {
        let m = mode(3, -1, 1, EnvelopeShape::Vortex);
        let rotated = m.rotated(0.4);
        let p = SphericalPoint::new(0.6, 1.2, 0.9);
        let a = magnetization_field(&m, p);
        let b = magnetization_field(&rotated, p);
        assert_relative_eq!(a.magnitude(), b.magnitude(), epsilon = 1e-15);
        assert_relative_eq!((b.plus / a.plus).arg(), 2.0 * 0.4, epsilon = 1e-12);
    }
}
