//! Brillouin scattering of a TE whispering-gallery mode into TM modes by a
//! Walker-mode magnon.
//!
//! Field vectors are handled as coefficient triples `(c₊, c₀, c₋)` on the
//! conjugate spherical basis `{ê₊*, ê₀*, ê₋*}`. A component with orbital
//! angular momentum `L` carries the azimuthal phase `e^{−iLφ}`, as does
//! `M₊` for a magnon of OAM `L`. With the dynamic permittivity
//!
//! ```text
//! ε̃ = ε₀ f/√2 · (M₋ 𝗠₊ + M₊ 𝗠₋)
//! ```
//!
//! the Stokes term (`M₋ 𝗠₊`) feeds the `ê₊*` coefficient of the output and
//! the anti-Stokes term (`M₊ 𝗠₋`) the `ê₋*` coefficient, which enters with
//! a minus sign in both orbits. The azimuthal integral is a Kronecker delta
//! in the OAM mismatch and is evaluated analytically.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::GaussLegendre;
use crate::walker::{walker_oam, WalkerIndex, WalkerMode};
use crate::wgm::{wgm_oam, Component, Orbit, Polarization, WgmIndex, WgmMode};

pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8188e-12;

pub type Tensor = Matrix3<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    pub epsilon_r: f64,
    /// Saturation magnetization, A/m.
    pub m_s: f64,
    /// Verdet constant, rad/m.
    pub verdet: f64,
    /// Vacuum wavenumber, 1/m.
    pub k0: f64,
    /// Faraday coefficient `2√ε_r 𝓥 / (k₀ M_s)`.
    pub f: f64,
}

impl MaterialParams {
    pub fn new(epsilon_r: f64, m_s: f64, verdet: f64, k0: f64) -> Result<Self> {
        for (name, value) in [
            ("epsilon_r", epsilon_r),
            ("M_s", m_s),
            ("verdet", verdet),
            ("k0", k0),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive, got {value}"
                )));
            }
        }
        Ok(Self {
            epsilon_r,
            m_s,
            verdet,
            k0,
            f: 2.0 * epsilon_r.sqrt() * verdet / (k0 * m_s),
        })
    }

    pub fn from_wavelength(epsilon_r: f64, m_s: f64, verdet: f64, wavelength: f64) -> Result<Self> {
        if !(wavelength > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "vacuum wavelength must be positive, got {wavelength}"
            )));
        }
        Self::new(epsilon_r, m_s, verdet, 2.0 * PI / wavelength)
    }

    /// Yttrium iron garnet near 1.55 µm.
    pub fn yig() -> Self {
        Self::from_wavelength(2.19 * 2.19, 1.4e5, 349.0, 1.55e-6).expect("constants are positive")
    }

    pub fn with_verdet(&self, verdet: f64) -> Result<Self> {
        Self::new(self.epsilon_r, self.m_s, verdet, self.k0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Process {
    Stokes,
    AntiStokes,
}

impl Process {
    pub const BOTH: [Process; 2] = [Process::Stokes, Process::AntiStokes];

    /// `+1` for Stokes, `−1` for anti-Stokes.
    pub fn sign(self) -> i64 {
        match self {
            Process::Stokes => 1,
            Process::AntiStokes => -1,
        }
    }
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Process::Stokes => "stokes",
            Process::AntiStokes => "anti_stokes",
        })
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real_matrix(rows: [[f64; 3]; 3]) -> Tensor {
    Tensor::from_fn(|i, j| c(rows[i][j], 0.0))
}

pub fn basis_m0() -> Tensor {
    real_matrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
}
pub fn basis_m1() -> Tensor {
    real_matrix([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
}
pub fn basis_m2() -> Tensor {
    real_matrix([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [-1.0, 0.0, 0.0]])
}
pub fn basis_m3() -> Tensor {
    real_matrix([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
}
/// Raising ladder in the `(+, 0, −)` ordering.
pub fn ladder_plus() -> Tensor {
    real_matrix([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]])
}
pub fn ladder_minus() -> Tensor {
    real_matrix([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
}

/// Columns `ê₊, ê₀, ê₋` in Cartesian components.
pub fn spherical_basis() -> Tensor {
    let s = 1.0 / SQRT_2;
    Tensor::new(
        c(-s, 0.0),
        c(0.0, 0.0),
        c(s, 0.0),
        c(0.0, -s),
        c(0.0, 0.0),
        c(0.0, -s),
        c(0.0, 0.0),
        c(1.0, 0.0),
        c(0.0, 0.0),
    )
}

/// `ε₀ (ε_r 𝗠₀ + i f M_x 𝗠₁ + i f M_y 𝗠₂ + i f M_s 𝗠₃)`.
pub fn permittivity_tensor_cartesian(mx: f64, my: f64, params: &MaterialParams) -> Tensor {
    let i_f = c(0.0, params.f);
    (basis_m0() * c(params.epsilon_r, 0.0)
        + basis_m1() * (i_f * mx)
        + basis_m2() * (i_f * my)
        + basis_m3() * (i_f * params.m_s))
        * c(VACUUM_PERMITTIVITY, 0.0)
}

/// Static part of the Cartesian tensor, `ε₀ (ε_r 𝗠₀ + i f M_s 𝗠₃)`.
pub fn static_permittivity(params: &MaterialParams) -> Tensor {
    permittivity_tensor_cartesian(0.0, 0.0, params)
}

/// Dynamic permittivity on the spherical basis,
/// `ε₀ f/√2 (M₋ 𝗠₊ + M₊ 𝗠₋)`.
pub fn permittivity_tensor_spherical(
    m_plus: Complex64,
    m_minus: Complex64,
    params: &MaterialParams,
) -> Tensor {
    (ladder_plus() * m_minus + ladder_minus() * m_plus)
        * c(VACUUM_PERMITTIVITY * params.f / SQRT_2, 0.0)
}

/// Output TM component addressed by each process in each orbit.
pub fn output_component(orbit: Orbit, process: Process) -> Component {
    match (orbit, process) {
        (Orbit::Cw, Process::Stokes) | (Orbit::Ccw, Process::AntiStokes) => Component::Outer,
        (Orbit::Cw, Process::AntiStokes) | (Orbit::Ccw, Process::Stokes) => Component::Inner,
    }
}

/// `L(TM component) − L(TE) ± L(magnon)`, `+` for Stokes.
pub fn delta_l(orbit: Orbit, process: Process, m_te: u32, m_tm: u32, m_mag: i32) -> i64 {
    let component = output_component(orbit, process);
    let l_tm = wgm_oam(orbit, Polarization::Tm, component, m_tm).expect("TM component");
    let l_te = wgm_oam(orbit, Polarization::Te, Component::None, m_te).expect("TE");
    l_tm - l_te + process.sign() * walker_oam(m_mag) as i64
}

/// The unique `m_TM` for which [`delta_l`] vanishes.
pub fn allowed_m_tm(orbit: Orbit, process: Process, m_te: u32, m_mag: i32) -> Result<u32> {
    let shift = match (orbit, process) {
        (Orbit::Cw, Process::Stokes) | (Orbit::Ccw, Process::AntiStokes) => -(m_mag as i64),
        _ => m_mag as i64,
    };
    let m_tm = m_te as i64 + shift;
    if m_tm < 1 {
        return Err(Error::NonphysicalIndex(format!(
            "{orbit} {process} with m_TE = {m_te}, m_mag = {m_mag} needs m_TM = {m_tm}"
        )));
    }
    u32::try_from(m_tm).map_err(|_| Error::NonphysicalIndex(format!("m_TM = {m_tm}")))
}

/// `∫₀^{2π} e^{iΔL φ} dφ`.
pub fn azimuthal_overlap(delta_l: i64) -> f64 {
    if delta_l == 0 {
        2.0 * PI
    } else {
        0.0
    }
}

/// Midpoint-rule version of [`azimuthal_overlap`] on `samples` points.
pub fn azimuthal_overlap_numeric(delta_l: i64, samples: usize) -> Complex64 {
    let h = 2.0 * PI / samples as f64;
    (0..samples)
        .map(|k| Complex64::from_polar(h, delta_l as f64 * (k as f64 + 0.5) * h))
        .sum()
}

pub fn scattered_frequency(process: Process, omega1: f64, omega_m: f64) -> Result<f64> {
    let omega2 = match process {
        Process::Stokes => omega1 - omega_m,
        Process::AntiStokes => omega1 + omega_m,
    };
    if !(omega2 > 0.0) {
        return Err(Error::NonpositiveResult(format!(
            "{process} output frequency {omega2} from omega1 = {omega1}, omega_m = {omega_m}"
        )));
    }
    Ok(omega2)
}

/// Radial function sampled on a fixed set of radii.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialProfile {
    pub fn sample(mode: &WgmMode, component: Component, radii: &[f64]) -> Result<Self> {
        let values = radii
            .iter()
            .map(|&r| mode.component_profile(component, r))
            .collect::<Result<_>>()?;
        Ok(Self {
            radii: radii.to_vec(),
            values,
        })
    }
}

/// Orders of the tensor-product Gauss–Legendre rule used for overlaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverlapQuadrature {
    pub radial: usize,
    pub polar: usize,
}

impl Default for OverlapQuadrature {
    fn default() -> Self {
        Self {
            radial: 64,
            polar: 32,
        }
    }
}

/// `∫∫ M_⊥ E₁ E₂ sin^{m₁+m₂}θ r² sinθ dθ dr` on the nodes of `polar`, with
/// both radial profiles sampled at the same radii and `weights` the radial
/// quadrature weights.
pub fn radial_polar_overlap(
    magnon: &WalkerMode,
    input: &RadialProfile,
    output: &RadialProfile,
    weights: &[f64],
    powers: (u32, u32),
    polar: &[(f64, f64)],
) -> Result<f64> {
    if input.radii != output.radii
        || weights.len() != input.radii.len()
        || input.values.len() != output.values.len()
    {
        return Err(Error::GridMismatch(format!(
            "input has {} radii, output {}, weights {}",
            input.radii.len(),
            output.radii.len(),
            weights.len()
        )));
    }
    let power = (powers.0 + powers.1) as i32;
    let polar: Vec<(f64, f64, f64, f64)> = polar
        .iter()
        .map(|&(theta, w)| {
            let (s, c) = theta.sin_cos();
            (s, c, w, s.powi(power) * s)
        })
        .collect();
    let mut total = 0.0;
    for (k, &r) in input.radii.iter().enumerate() {
        let radial = input.values[k] * output.values[k] * r * r * weights[k];
        if radial == 0.0 {
            continue;
        }
        let angular: f64 = polar
            .iter()
            .map(|&(s, c, w, envelope)| w * envelope * magnon.envelope(r * s, r * c))
            .sum();
        total += radial * angular;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatteringChannel {
    pub input: WgmIndex,
    pub output: WgmIndex,
    pub component: Component,
    pub magnon: WalkerIndex,
    pub process: Process,
    pub delta_l: i64,
    pub omega_in: f64,
    pub omega_out: f64,
    /// Resonance frequency of the output TM mode.
    pub omega_resonance: f64,
    /// Coupling amplitude in units of ε₀.
    pub amplitude: Complex64,
}

impl ScatteringChannel {
    pub fn detuning(&self) -> f64 {
        self.omega_out - self.omega_resonance
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringEngine {
    pub params: MaterialParams,
    pub quadrature: OverlapQuadrature,
}

impl ScatteringEngine {
    pub fn new(params: MaterialParams, quadrature: OverlapQuadrature) -> Result<Self> {
        if quadrature.radial == 0 || quadrature.polar == 0 {
            return Err(Error::InvalidParameter(format!(
                "quadrature orders {quadrature:?}"
            )));
        }
        Ok(Self { params, quadrature })
    }

    /// Coupling amplitude (units of ε₀) of a TE input into one TM component
    /// through `process`.
    pub fn coupling_amplitude(
        &self,
        input: &WgmMode,
        output: &WgmMode,
        process: Process,
        magnon: &WalkerMode,
    ) -> Result<Complex64> {
        if input.index.polarization != Polarization::Te
            || output.index.polarization != Polarization::Tm
        {
            return Err(Error::InvalidCombination(
                "input must be TE and output TM".into(),
            ));
        }
        if input.index.orbit != output.index.orbit {
            return Err(Error::InvalidCombination(format!(
                "{} input cannot scatter into the {} orbit",
                input.index.orbit, output.index.orbit
            )));
        }
        let orbit = input.index.orbit;
        let mismatch = delta_l(
            orbit,
            process,
            input.index.m,
            output.index.m,
            magnon.index.m_mag,
        );
        let azimuthal = azimuthal_overlap(mismatch);
        if azimuthal == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let component = output_component(orbit, process);

        let (lo_in, _) = input.radial_window();
        let (lo_out, _) = output.radial_window();
        let radial = GaussLegendre::new(self.quadrature.radial)?;
        let (radii, weights): (Vec<f64>, Vec<f64>) = radial.on(lo_in.min(lo_out), 1.0).unzip();
        let te = RadialProfile::sample(input, Component::None, &radii)?;
        let tm = RadialProfile::sample(output, component, &radii)?;

        let (m1, m2) = (input.index.m, output.index.m);
        let half_width = (10.0 / ((m1 + m2) as f64).sqrt()).min(PI / 2.0);
        let polar: Vec<_> = GaussLegendre::new(self.quadrature.polar)?
            .on(PI / 2.0 - half_width, PI / 2.0 + half_width)
            .collect();
        let spatial = radial_polar_overlap(magnon, &te, &tm, &weights, (m1, m2), &polar)?;

        // a rigid rotation α of the magnon multiplies M₋ by e^{−iLα} and M₊
        // by e^{+iLα}
        let gauge = Complex64::from_polar(
            1.0,
            -(process.sign() as f64) * magnon.oam() as f64 * magnon.azimuth_offset(),
        );
        let prefactor = process.sign() as f64 * self.params.f / (2.0 * SQRT_2);
        Ok(gauge * prefactor * azimuthal * spatial)
    }

    /// One Stokes and one anti-Stokes channel, each into the allowed TM mode
    /// of the input's own orbit.
    pub fn enumerate_channels(
        &self,
        input: &WgmMode,
        magnon: &WalkerMode,
        tm_catalog: &[WgmMode],
    ) -> Result<Vec<ScatteringChannel>> {
        if tm_catalog.is_empty() {
            return Err(Error::EmptyCatalog("no TM modes to scatter into".into()));
        }
        if input.index.polarization != Polarization::Te {
            return Err(Error::InvalidCombination(
                "scattering input must be a TE mode".into(),
            ));
        }
        let orbit = input.index.orbit;
        Process::BOTH
            .iter()
            .map(|&process| {
                let m_tm = allowed_m_tm(orbit, process, input.index.m, magnon.index.m_mag)?;
                let found = tm_catalog
                    .iter()
                    .find(|mode| {
                        mode.index.polarization == Polarization::Tm && mode.index.m == m_tm
                    })
                    .ok_or_else(|| {
                        Error::InvalidIndex(format!("TM catalog has no mode with m = {m_tm}"))
                    })?;
                let mut output = found.clone();
                output.index.orbit = orbit;
                let amplitude = self.coupling_amplitude(input, &output, process, magnon)?;
                Ok(ScatteringChannel {
                    input: input.index,
                    output: output.index,
                    component: output_component(orbit, process),
                    magnon: magnon.index,
                    process,
                    delta_l: delta_l(orbit, process, input.index.m, m_tm, magnon.index.m_mag),
                    omega_in: input.omega,
                    omega_out: scattered_frequency(process, input.omega, magnon.omega_m)?,
                    omega_resonance: output.omega,
                    amplitude,
                })
            })
            .collect()
    }
}
