//! TOML run configuration.
//!
//! Every section is optional and falls back to the desk-scale defaults. Unknown
//! keys are rejected. Frequencies given in Hz are ordinary frequencies and
//! are converted to angular frequencies on use.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::brillouin::{MaterialParams, OverlapQuadrature};
use crate::error::{Error, Result};
use crate::spectra::{
    AmplitudeModel, Linewidth, MagnonTuning, ScatteringScenario, SpectrumGrid, Thresholds,
};
use crate::walker::{EnvelopeShape, WalkerIndex, WalkerMode};
use crate::wgm::{ScanWindow, SphereGeometry};

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub radius_m: f64,
    pub refractive_index: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            radius_m: 0.5e-3,
            refractive_index: 2.19,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaterialConfig {
    pub epsilon_r: f64,
    /// Saturation magnetization, A/m.
    pub m_s: f64,
    /// Verdet constant, rad/m.
    pub verdet: f64,
    pub vacuum_wavelength_m: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        Self {
            epsilon_r: 2.19 * 2.19,
            m_s: 1.4e5,
            verdet: 349.0,
            vacuum_wavelength_m: 1.55e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkerEntry {
    pub n: u32,
    pub m_mag: i32,
    pub r: u32,
    pub omega_m_hz: f64,
    pub envelope_id: EnvelopeShape,
}

fn default_catalog() -> Vec<WalkerEntry> {
    [
        (1, 1, 0, EnvelopeShape::Uniform),
        (3, -1, 1, EnvelopeShape::Vortex),
        (3, 1, 1, EnvelopeShape::RadialNode),
        (4, 0, 1, EnvelopeShape::Vortex),
    ]
    .into_iter()
    .map(|(n, m_mag, r, envelope_id)| WalkerEntry {
        n,
        m_mag,
        r,
        omega_m_hz: 5e9,
        envelope_id,
    })
    .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WgmConfig {
    pub m_te: u32,
    pub q: u32,
    /// Number of azimuthal indices tabulated on either side of `m_te`.
    pub table_half_width: u32,
    pub scan: ScanWindow,
}

impl Default for WgmConfig {
    fn default() -> Self {
        Self {
            m_te: 100,
            q: 1,
            table_half_width: 5,
            scan: ScanWindow::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TuningId {
    ExactFsrMinusGb,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectraConfig {
    /// Absolute optical linewidth; overrides `optical_linewidth_fsr`.
    pub optical_linewidth_hz: Option<f64>,
    pub optical_linewidth_fsr: f64,
    /// Absolute magnon linewidth; overrides `magnon_linewidth_fsr`.
    pub magnon_linewidth_hz: Option<f64>,
    pub magnon_linewidth_fsr: f64,
    pub tuning: TuningId,
    /// Used with `tuning = "explicit"`.
    pub magnon_frequency_hz: Option<f64>,
    pub model: AmplitudeModel,
    pub thresholds: Thresholds,
    pub grid: SpectrumGrid,
    pub quadrature: OverlapQuadrature,
}

impl Default for SpectraConfig {
    fn default() -> Self {
        Self {
            optical_linewidth_hz: None,
            optical_linewidth_fsr: 0.005,
            magnon_linewidth_hz: None,
            magnon_linewidth_fsr: 0.005,
            tuning: TuningId::ExactFsrMinusGb,
            magnon_frequency_hz: None,
            model: AmplitudeModel::SelectionRule,
            thresholds: Thresholds::default(),
            grid: SpectrumGrid::default(),
            quadrature: OverlapQuadrature::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub geometry: GeometryConfig,
    pub material: MaterialConfig,
    pub walker_catalog: Vec<WalkerEntry>,
    pub wgm: WgmConfig,
    pub spectra: SpectraConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            geometry: GeometryConfig::default(),
            material: MaterialConfig::default(),
            walker_catalog: default_catalog(),
            wgm: WgmConfig::default(),
            spectra: SpectraConfig::default(),
        }
    }
}

fn positive(field: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{field} must be positive and finite, got {value}"
        )))
    }
}

impl Config {
    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text)
            .map_err(|e| Error::Config(e.to_string().trim().replace('\n', " ")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        positive("geometry.radius_m", self.geometry.radius_m)?;
        if !(self.geometry.refractive_index > 1.0) || !self.geometry.refractive_index.is_finite() {
            return Err(Error::Config(format!(
                "geometry.refractive_index must exceed 1, got {}",
                self.geometry.refractive_index
            )));
        }
        positive("material.epsilon_r", self.material.epsilon_r)?;
        positive("material.m_s", self.material.m_s)?;
        positive("material.verdet", self.material.verdet)?;
        positive(
            "material.vacuum_wavelength_m",
            self.material.vacuum_wavelength_m,
        )?;
        if self.walker_catalog.is_empty() {
            return Err(Error::Config(
                "walker_catalog must list at least one mode".into(),
            ));
        }
        for (k, entry) in self.walker_catalog.iter().enumerate() {
            WalkerIndex::new(entry.n, entry.m_mag, entry.r)
                .map_err(|e| Error::Config(format!("walker_catalog[{k}]: {e}")))?;
            positive(&format!("walker_catalog[{k}].omega_m_hz"), entry.omega_m_hz)?;
        }
        if self.wgm.m_te < 2 {
            return Err(Error::Config(format!(
                "wgm.m_te must be at least 2, got {}",
                self.wgm.m_te
            )));
        }
        if self.wgm.q < 1 {
            return Err(Error::Config("wgm.q must be at least 1".into()));
        }
        if self.wgm.table_half_width >= self.wgm.m_te {
            return Err(Error::Config(
                "wgm.table_half_width must be below wgm.m_te".into(),
            ));
        }
        positive("wgm.scan.step", self.wgm.scan.step)?;
        positive("wgm.scan.extent", self.wgm.scan.extent)?;
        let s = &self.spectra;
        positive("spectra.optical_linewidth_fsr", s.optical_linewidth_fsr)?;
        positive("spectra.magnon_linewidth_fsr", s.magnon_linewidth_fsr)?;
        if let Some(v) = s.optical_linewidth_hz {
            positive("spectra.optical_linewidth_hz", v)?;
        }
        if let Some(v) = s.magnon_linewidth_hz {
            positive("spectra.magnon_linewidth_hz", v)?;
        }
        match (s.tuning, s.magnon_frequency_hz) {
            (TuningId::Explicit, None) => {
                return Err(Error::Config(
                    "spectra.tuning = \"explicit\" needs spectra.magnon_frequency_hz".into(),
                ))
            }
            (_, Some(v)) => positive("spectra.magnon_frequency_hz", v)?,
            _ => {}
        }
        positive("spectra.thresholds.cw_dominant", s.thresholds.cw_dominant)?;
        positive("spectra.thresholds.ccw_dominant", s.thresholds.ccw_dominant)?;
        if s.thresholds.ccw_dominant > s.thresholds.cw_dominant {
            return Err(Error::Config(
                "spectra.thresholds.ccw_dominant must not exceed cw_dominant".into(),
            ));
        }
        positive("spectra.grid.half_span_fsr", s.grid.half_span_fsr)?;
        positive("spectra.grid.step_fsr", s.grid.step_fsr)?;
        if s.quadrature.radial == 0 || s.quadrature.polar == 0 {
            return Err(Error::Config(
                "spectra.quadrature orders must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn geometry(&self) -> Result<SphereGeometry> {
        SphereGeometry::new(self.geometry.radius_m, self.geometry.refractive_index)
    }

    pub fn material(&self) -> Result<MaterialParams> {
        let m = &self.material;
        MaterialParams::from_wavelength(m.epsilon_r, m.m_s, m.verdet, m.vacuum_wavelength_m)
    }

    pub fn walker_modes(&self) -> Result<Vec<WalkerMode>> {
        self.walker_catalog
            .iter()
            .map(|e| {
                WalkerMode::new(
                    WalkerIndex::new(e.n, e.m_mag, e.r)?,
                    2.0 * PI * e.omega_m_hz,
                    e.envelope_id,
                )
            })
            .collect()
    }

    /// Scenario for `magnon` with every other setting taken from the config.
    pub fn scenario(&self, magnon: WalkerMode) -> Result<ScatteringScenario> {
        let s = &self.spectra;
        let linewidth = |hz: Option<f64>, fsr: f64| match hz {
            Some(v) => Linewidth::Absolute(2.0 * PI * v),
            None => Linewidth::FsrFraction(fsr),
        };
        let tuning = match s.tuning {
            TuningId::ExactFsrMinusGb => MagnonTuning::ExactFsrMinusGb,
            TuningId::Explicit => MagnonTuning::Explicit(
                2.0 * PI
                    * s.magnon_frequency_hz
                        .ok_or_else(|| Error::Config("missing magnon_frequency_hz".into()))?,
            ),
        };
        Ok(ScatteringScenario {
            geometry: self.geometry()?,
            material: self.material()?,
            m_te: self.wgm.m_te,
            q: self.wgm.q,
            magnon,
            optical_linewidth: linewidth(s.optical_linewidth_hz, s.optical_linewidth_fsr),
            magnon_linewidth: linewidth(s.magnon_linewidth_hz, s.magnon_linewidth_fsr),
            tuning,
            model: s.model,
            thresholds: s.thresholds,
            quadrature: s.quadrature,
            grid: s.grid,
            scan: self.wgm.scan,
            mirror_orbits: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn defaults_round_trip() {
        let text = Config::default().to_toml();
        assert_eq!(Config::from_toml(&text).unwrap(), Config::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = Config::from_toml("[geometry]\nradius = 1.0\n").unwrap_err();
        assert!(
            matches!(err, Error::Config(ref m) if m.contains("radius")),
            "{err}"
        );
    }

    #[test]
    fn nonpositive_values_are_rejected() {
        let err = Config::from_toml("[geometry]\nradius_m = -1.0\n").unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("geometry.radius_m")));
        let err = Config::from_toml("[spectra]\ntuning = \"explicit\"\n").unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("magnon_frequency_hz")));
    }

    #[test]
    fn walker_entries_are_validated() {
        let text = "[[walker_catalog]]\nn = 1\nm_mag = 3\nr = 0\nomega_m_hz = 1e9\nenvelope_id = \"uniform\"\n";
        let err = Config::from_toml(text).unwrap_err();
        assert!(matches!(err, Error::Config(ref m) if m.contains("walker_catalog[0]")));
    }

    #[test]
    fn explicit_tuning_converts_to_angular_frequency() {
        let text = "[spectra]\ntuning = \"explicit\"\nmagnon_frequency_hz = 2.0\n";
        let config = Config::from_toml(text).unwrap();
        let magnon = config.walker_modes().unwrap()[0].clone();
        let scenario = config.scenario(magnon).unwrap();
        assert_eq!(scenario.tuning, MagnonTuning::Explicit(4.0 * PI));
    }
}
