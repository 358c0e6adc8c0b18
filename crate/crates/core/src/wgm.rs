//! Whispering-gallery modes of a dielectric sphere.
//!
//! Resonances are roots of the real (lossless) characteristic equations of a
//! sphere of index `n` in vacuum, written in the size parameter `x = k₀R`
//! with Riccati–Bessel functions `ψ(z) = z j_l(z)` and `χ(z) = z y_l(z)`:
//!
//! ```text
//! TE:  n ψ'(nx) − ψ(nx) χ'(x)/χ(x) = 0
//! TM:  ψ'(nx) − n ψ(nx) χ'(x)/χ(x) = 0
//! ```
//!
//! Both are multiplied by `sign χ(x)` so that they stay finite and keep the
//! sign pattern of the unscaled (pole-free) determinant.
//!
//! Only the fundamental polar family is modelled (`l = m`), so on the
//! equatorial plane a TE mode is described by one radial function and a TM
//! mode by its radial and azimuthal components. Radii are in units of the
//! sphere radius and the time dependence is `e^{−iωt}`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{
    find_root, scan_for_bracket, spherical_bessel_j, spherical_bessel_j_triplet, GaussLegendre,
    ScaledNeumann,
};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereGeometry {
    pub radius: f64,
    pub refractive_index: f64,
}

impl SphereGeometry {
    pub fn new(radius: f64, refractive_index: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if !(refractive_index > 1.0) || !refractive_index.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "refractive index must exceed 1, got {refractive_index}"
            )));
        }
        Ok(Self {
            radius,
            refractive_index,
        })
    }

    /// Angular frequency of size parameter `x`.
    pub fn omega(&self, x: f64) -> f64 {
        SPEED_OF_LIGHT * x / self.radius
    }

    pub fn size_parameter(&self, omega: f64) -> f64 {
        omega * self.radius / SPEED_OF_LIGHT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orbit {
    Cw,
    Ccw,
}

impl Orbit {
    pub const BOTH: [Orbit; 2] = [Orbit::Cw, Orbit::Ccw];

    pub fn mirrored(self) -> Self {
        match self {
            Orbit::Cw => Orbit::Ccw,
            Orbit::Ccw => Orbit::Cw,
        }
    }

    fn sign(self) -> i64 {
        match self {
            Orbit::Cw => -1,
            Orbit::Ccw => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Te,
    Tm,
}

/// Circular component of a TM field on the equatorial plane. TE fields have
/// a single linear component, labelled `None`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    None,
    Inner,
    Outer,
}

macro_rules! lower_display {
    ($($ty:ty => { $($variant:path => $name:literal),* }),*) => {$(
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($variant => $name),* })
            }
        }
    )*};
}

lower_display! {
    Orbit => { Orbit::Cw => "cw", Orbit::Ccw => "ccw" },
    Polarization => { Polarization::Te => "te", Polarization::Tm => "tm" },
    Component => { Component::None => "none", Component::Inner => "inner", Component::Outer => "outer" }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WgmIndex {
    pub orbit: Orbit,
    pub polarization: Polarization,
    pub m: u32,
    pub q: u32,
}

impl WgmIndex {
    pub fn new(orbit: Orbit, polarization: Polarization, m: u32, q: u32) -> Result<Self> {
        if m < 1 || q < 1 {
            return Err(Error::InvalidIndex(format!(
                "WGM indices must be >= 1, got m = {m}, q = {q}"
            )));
        }
        Ok(Self {
            orbit,
            polarization,
            m,
            q,
        })
    }
}

fn check_combination(polarization: Polarization, component: Component) -> Result<()> {
    match (polarization, component) {
        (Polarization::Te, Component::None) => Ok(()),
        (Polarization::Tm, Component::Inner | Component::Outer) => Ok(()),
        _ => Err(Error::InvalidCombination(format!(
            "{polarization} field has no {component} component"
        ))),
    }
}

/// Orbital angular momentum of one field component.
pub fn wgm_oam(
    orbit: Orbit,
    polarization: Polarization,
    component: Component,
    m: u32,
) -> Result<i64> {
    check_combination(polarization, component)?;
    let m = m as i64;
    let ccw = match component {
        Component::None => m,
        Component::Inner => m - 1,
        Component::Outer => m + 1,
    };
    Ok(orbit.sign() * ccw)
}

/// Spin angular momentum of one field component.
pub fn wgm_spin(orbit: Orbit, polarization: Polarization, component: Component) -> Result<i64> {
    check_combination(polarization, component)?;
    let ccw = match component {
        Component::None => 0,
        Component::Inner => 1,
        Component::Outer => -1,
    };
    Ok(orbit.sign() * ccw)
}

pub fn wgm_total_j(
    orbit: Orbit,
    polarization: Polarization,
    component: Component,
    m: u32,
) -> Result<i64> {
    Ok(wgm_oam(orbit, polarization, component, m)? + wgm_spin(orbit, polarization, component)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AngularMomentumTriple {
    pub l: i64,
    pub s: i64,
    pub j: i64,
}

impl AngularMomentumTriple {
    pub fn of(
        orbit: Orbit,
        polarization: Polarization,
        component: Component,
        m: u32,
    ) -> Result<Self> {
        let l = wgm_oam(orbit, polarization, component, m)?;
        let s = wgm_spin(orbit, polarization, component)?;
        Ok(Self { l, s, j: l + s })
    }
}

/// Sampling of the sign scan used to isolate resonances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanWindow {
    /// Scan step in `x`, multiplied by `1/n`.
    pub step: f64,
    /// The scan ends at `x = l + extent`.
    pub extent: f64,
}

impl Default for ScanWindow {
    fn default() -> Self {
        Self {
            step: 0.02,
            extent: 10.0,
        }
    }
}

/// Characteristic function of the given polarization, scaled by `|χ(x)|`.
pub fn characteristic(n: f64, polarization: Polarization, l: u32, x: f64) -> Result<f64> {
    let z = n * x;
    let [jm1, j, _] = spherical_bessel_j_triplet(l, z)?;
    let psi = z * j;
    let dpsi = z * jm1 - l as f64 * j;
    let y = ScaledNeumann::new(l, x)?;
    let chi_log_derivative = 1.0 / x + y.log_derivative;
    Ok(y.sign
        * match polarization {
            Polarization::Te => n * dpsi - psi * chi_log_derivative,
            Polarization::Tm => dpsi - n * psi * chi_log_derivative,
        })
}

pub fn resonance_size_parameter(
    geometry: &SphereGeometry,
    polarization: Polarization,
    l: u32,
    q: u32,
) -> Result<f64> {
    resonance_size_parameter_in(geometry, polarization, l, q, &ScanWindow::default())
}

/// `q`-th root of the characteristic equation in `[l/n, l + extent]`.
pub fn resonance_size_parameter_in(
    geometry: &SphereGeometry,
    polarization: Polarization,
    l: u32,
    q: u32,
    window: &ScanWindow,
) -> Result<f64> {
    if l < 1 || q < 1 {
        return Err(Error::InvalidIndex(format!("l = {l}, q = {q}")));
    }
    if !(window.step > 0.0) || !(window.extent > 0.0) {
        return Err(Error::InvalidParameter(format!("scan window {window:?}")));
    }
    let n = geometry.refractive_index;
    let f = |x: f64| characteristic(n, polarization, l, x).unwrap_or(f64::NAN);
    let start = l as f64 / n;
    let end = l as f64 + window.extent;
    let bracket = scan_for_bracket(f, start, end, window.step / n, q).map_err(|e| match e {
        Error::RootNotFound(msg) => {
            Error::RootNotFound(format!("{polarization} l = {l}, q = {q}: {msg}"))
        }
        other => other,
    })?;
    find_root(f, bracket, 1e-14 * bracket.hi)
}

/// Angular resonance frequency of the mode with azimuthal index `m`.
pub fn resonance_omega(
    geometry: &SphereGeometry,
    polarization: Polarization,
    m: u32,
    q: u32,
) -> Result<f64> {
    resonance_omega_in(geometry, polarization, m, q, &ScanWindow::default())
}

pub fn resonance_omega_in(
    geometry: &SphereGeometry,
    polarization: Polarization,
    m: u32,
    q: u32,
    window: &ScanWindow,
) -> Result<f64> {
    Ok(geometry.omega(resonance_size_parameter_in(
        geometry,
        polarization,
        m,
        q,
        window,
    )?))
}

/// `ω(m+1) − ω(m)` at fixed polarization and radial order.
pub fn fsr(geometry: &SphereGeometry, m: u32, polarization: Polarization, q: u32) -> Result<f64> {
    fsr_in(geometry, m, polarization, q, &ScanWindow::default())
}

pub fn fsr_in(
    geometry: &SphereGeometry,
    m: u32,
    polarization: Polarization,
    q: u32,
    window: &ScanWindow,
) -> Result<f64> {
    let lower = resonance_omega_in(geometry, polarization, m, q, window)?;
    let upper = resonance_omega_in(geometry, polarization, m + 1, q, window)?;
    Ok(upper - lower)
}

/// TM−TE offset at equal `(m, q)`, reduced modulo the TE free spectral
/// range at `m`.
pub fn geometric_birefringence(geometry: &SphereGeometry, m: u32, q: u32) -> Result<f64> {
    geometric_birefringence_in(geometry, m, q, &ScanWindow::default())
}

pub fn geometric_birefringence_in(
    geometry: &SphereGeometry,
    m: u32,
    q: u32,
    window: &ScanWindow,
) -> Result<f64> {
    let te = resonance_omega_in(geometry, Polarization::Te, m, q, window)?;
    let tm = resonance_omega_in(geometry, Polarization::Tm, m, q, window)?;
    let free = resonance_omega_in(geometry, Polarization::Te, m + 1, q, window)? - te;
    Ok((tm - te).rem_euclid(free))
}

/// Solves `(polarization, m)` resonances for every `m` in `ms` in parallel.
pub fn solve_comb(
    geometry: &SphereGeometry,
    orbit: Orbit,
    polarization: Polarization,
    ms: std::ops::RangeInclusive<u32>,
    q: u32,
) -> Result<Vec<WgmMode>> {
    solve_comb_in(geometry, orbit, polarization, ms, q, &ScanWindow::default())
}

pub fn solve_comb_in(
    geometry: &SphereGeometry,
    orbit: Orbit,
    polarization: Polarization,
    ms: std::ops::RangeInclusive<u32>,
    q: u32,
    window: &ScanWindow,
) -> Result<Vec<WgmMode>> {
    let ms: Vec<u32> = ms.collect();
    ms.par_iter()
        .map(|&m| WgmMode::solve_in(geometry, WgmIndex::new(orbit, polarization, m, q)?, window))
        .collect()
}

/// `(E_r, E_φ) → (E_i, E_o)`.
pub fn inner_outer_decompose(e_r: Complex64, e_phi: Complex64) -> (Complex64, Complex64) {
    ((e_r - e_phi) * FRAC_1_SQRT_2, (e_r + e_phi) * FRAC_1_SQRT_2)
}

/// `(E_i, E_o) → (E_r, E_φ)`.
pub fn inner_outer_recompose(e_i: Complex64, e_o: Complex64) -> (Complex64, Complex64) {
    ((e_i + e_o) * FRAC_1_SQRT_2, -(e_i - e_o) * FRAC_1_SQRT_2)
}

/// `∫₀^π sin^{2m+1} θ dθ`.
pub fn polar_norm(m: u32) -> f64 {
    (1..=m).fold(2.0, |acc, k| acc * (2 * k) as f64 / (2 * k + 1) as f64)
}

/// Solved WGM. Field values are normalized to unit `∫|E|² dV` over the
/// sphere interior, with the polar envelope `sin^m θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct WgmMode {
    pub index: WgmIndex,
    pub geometry: SphereGeometry,
    pub size_parameter: f64,
    pub omega: f64,
    norm: f64,
    exterior_reference: ScaledNeumann,
    boundary_j: f64,
}

impl WgmMode {
    pub fn solve(geometry: &SphereGeometry, index: WgmIndex) -> Result<Self> {
        Self::solve_in(geometry, index, &ScanWindow::default())
    }

    pub fn solve_in(
        geometry: &SphereGeometry,
        index: WgmIndex,
        window: &ScanWindow,
    ) -> Result<Self> {
        let x =
            resonance_size_parameter_in(geometry, index.polarization, index.m, index.q, window)?;
        Self::at_size_parameter(geometry, index, x)
    }

    /// Mode fields evaluated at a given size parameter, resonant or not.
    pub fn at_size_parameter(geometry: &SphereGeometry, index: WgmIndex, x: f64) -> Result<Self> {
        let index = WgmIndex::new(index.orbit, index.polarization, index.m, index.q)?;
        let mut mode = Self {
            index,
            geometry: *geometry,
            size_parameter: x,
            omega: geometry.omega(x),
            norm: 1.0,
            exterior_reference: ScaledNeumann::new(index.m, x)?,
            boundary_j: spherical_bessel_j(index.m, geometry.refractive_index * x)?,
        };
        let (lo, hi) = mode.radial_window();
        let rule = GaussLegendre::new(32)?;
        let panels = 4;
        let width = (hi - lo) / panels as f64;
        let mut radial = 0.0;
        for p in 0..panels {
            let a = lo + p as f64 * width;
            for (r, w) in rule.on(a, a + width) {
                radial += w * r * r * mode.raw_intensity(r)?;
            }
        }
        let total = 2.0 * PI * polar_norm(index.m) * radial;
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::ZeroNorm(format!("interior field of {index:?}")));
        }
        mode.norm = total.sqrt().recip();
        Ok(mode)
    }

    pub fn l(&self) -> u32 {
        self.index.m
    }

    /// Interior radial range outside of which the field is negligible
    /// (below the evanescent tail of the inner caustic).
    pub fn radial_window(&self) -> (f64, f64) {
        let nu = self.l() as f64 + 0.5;
        let u = self.geometry.refractive_index * self.size_parameter;
        let lo = ((nu - 6.0 * nu.cbrt() - 10.0) / u).max(0.0);
        (lo, 1.0)
    }

    fn check_radius(r: f64) -> Result<()> {
        if r > 0.0 && r.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("radius must be positive, got {r}")))
        }
    }

    fn raw_intensity(&self, r: f64) -> Result<f64> {
        Ok(match self.index.polarization {
            Polarization::Te => self.raw_te(r)?.powi(2),
            Polarization::Tm => {
                let (er, ephi) = self.raw_tm(r)?;
                er * er + ephi * ephi
            }
        })
    }

    /// Exterior radial function `j_l(nx) y_l(xr) / y_l(x)` and its
    /// derivative in `r`.
    fn exterior(&self, r: f64) -> Result<(f64, f64)> {
        let x = self.size_parameter;
        let y = ScaledNeumann::new(self.l(), x * r)?;
        let g = self.boundary_j * y.ratio_to(&self.exterior_reference);
        Ok((g, g * x * y.log_derivative))
    }

    fn raw_te(&self, r: f64) -> Result<f64> {
        Self::check_radius(r)?;
        if r <= 1.0 {
            spherical_bessel_j(
                self.l(),
                self.geometry.refractive_index * self.size_parameter * r,
            )
        } else {
            Ok(self.exterior(r)?.0)
        }
    }

    fn raw_tm(&self, r: f64) -> Result<(f64, f64)> {
        Self::check_radius(r)?;
        let l = self.l() as f64;
        if r <= 1.0 {
            let n2 = self.geometry.refractive_index.powi(2);
            let u = self.geometry.refractive_index * self.size_parameter * r;
            let [jm1, j, _] = spherical_bessel_j_triplet(self.l(), u)?;
            let dpsi = u * jm1 - l * j;
            Ok(((l + 1.0) * j / (n2 * r), -dpsi / (n2 * r)))
        } else {
            let (g, dg) = self.exterior(r)?;
            Ok(((l + 1.0) * g / r, -(g / r + dg)))
        }
    }

    /// Normalized TE radial function `E^{(m)}(r)` on the equator.
    pub fn te_profile(&self, r: f64) -> Result<f64> {
        self.require(Polarization::Te)?;
        Ok(self.norm * self.raw_te(r)?)
    }

    /// Normalized inner or outer TM component on the equator.
    pub fn tm_component(&self, component: Component, r: f64) -> Result<f64> {
        self.require(Polarization::Tm)?;
        check_combination(Polarization::Tm, component)?;
        let (er, ephi) = self.raw_tm(r)?;
        let value = match component {
            Component::Inner => (er - ephi) * FRAC_1_SQRT_2,
            _ => (er + ephi) * FRAC_1_SQRT_2,
        };
        Ok(self.norm * value)
    }

    /// Field value of the given component: the TE profile for `None`.
    pub fn component_profile(&self, component: Component, r: f64) -> Result<f64> {
        match component {
            Component::None => self.te_profile(r),
            _ => self.tm_component(component, r),
        }
    }

    fn require(&self, polarization: Polarization) -> Result<()> {
        if self.index.polarization == polarization {
            Ok(())
        } else {
            Err(Error::InvalidCombination(format!(
                "operation needs a {polarization} mode, got {}",
                self.index.polarization
            )))
        }
    }

    /// Samples `|E|²` of one component on `radii`.
    pub fn intensity_profile(
        &self,
        component: Component,
        radii: &[f64],
    ) -> Result<Vec<(f64, f64)>> {
        radii
            .iter()
            .map(|&r| Ok((r, self.component_profile(component, r)?.powi(2))))
            .collect()
    }
}

/// Normalized `(E_r, E_φ)` of a TM mode on the equatorial plane.
pub fn tm_equatorial_components(mode: &WgmMode, r: f64) -> Result<(Complex64, Complex64)> {
    mode.require(Polarization::Tm)?;
    let (er, ephi) = mode.raw_tm(r)?;
    Ok((
        Complex64::new(mode.norm * er, 0.0),
        Complex64::new(mode.norm * ephi, 0.0),
    ))
}

/// Abscissa of the largest sample, refined by a parabola through it and its
/// neighbours. The maximum must not sit on either end of the sampled range.
pub fn peak_radius(profile: &[(f64, f64)]) -> Result<f64> {
    let (k, _) = profile
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .ok_or(Error::NoInteriorMaximum)?;
    if k == 0 || k + 1 >= profile.len() {
        return Err(Error::NoInteriorMaximum);
    }
    let (x0, y0) = profile[k - 1];
    let (x1, y1) = profile[k];
    let (x2, y2) = profile[k + 1];
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curvature = (d12 - d01) / (x2 - x0);
    if curvature >= 0.0 {
        return Ok(x1);
    }
    // vertex of the interpolating parabola
    Ok(0.5 * (x0 + x1) - d01 / (2.0 * curvature))
}

/// `count` uniformly spaced radii on `(0, upper]`.
pub fn radial_grid(upper: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| upper * k as f64 / count as f64)
        .collect()
}
