//! TOML experiment configuration and `key=value` overrides.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::ScenarioKind;
use crate::error::{PassError, Result};
use crate::rates::Method;
use crate::system::{RoomGeometry, SystemParams};

/// Figure presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::Fig9,
        Figure::Fig10,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = PassError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|fig| fig.name() == s)
            .ok_or_else(|| PassError::Config(format!("unknown figure preset '{s}' (expected fig3..fig10)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub carrier_frequency_hz: f64,
    pub bandwidth_hz: f64,
    pub num_users: usize,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self { carrier_frequency_hz: 2.4e9, bandwidth_hz: 1e6, num_users: 2 }
    }
}

impl SystemSection {
    /// Parameters at transmit power `dbm`.
    pub fn params(&self, dbm: f64) -> Result<SystemParams> {
        crate::system::make_params(self.carrier_frequency_hz, self.bandwidth_hz, dbm, self.num_users)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoomSection {
    pub extent: f64,
    pub height: f64,
}

impl RoomSection {
    pub fn geometry(&self) -> Result<RoomGeometry> {
        RoomGeometry::new(self.extent, self.height)
    }
}

/// What a swept value represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantity {
    /// Ergodic rate of one user.
    #[default]
    PerUser,
    /// Ergodic sum rate over all users.
    Sum,
}

/// Transmit-power sweep shared by all curves of a figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub power_dbm: Vec<f64>,
    pub methods: Vec<Method>,
    pub seed: u64,
    pub samples: u64,
    #[serde(default)]
    pub quantity: Quantity,
    pub out_dir: String,
}

/// One plotted curve. Unset fields fall back to the figure-level sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub label: String,
    /// User-to-PA distance for placement figures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<Method>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room: Option<RoomSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioKind>,
}

/// A complete, self-contained figure description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FigureConfig {
    pub figure: Figure,
    pub system: SystemSection,
    pub room: RoomSection,
    pub scenario: ScenarioKind,
    pub sweep: SweepSpec,
    #[serde(rename = "curve")]
    pub curves: Vec<CurveSpec>,
}

impl FigureConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: FigureConfig = toml::from_str(text).map_err(|e| PassError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| PassError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.figure != Figure::Fig3 && self.sweep.power_dbm.is_empty() {
            return Err(PassError::Config("sweep.power_dbm must not be empty".into()));
        }
        if self.sweep.power_dbm.iter().any(|p| !p.is_finite()) {
            return Err(PassError::Config("sweep.power_dbm entries must be finite".into()));
        }
        if self.sweep.samples == 0 {
            return Err(PassError::Config("sweep.samples must be at least 1".into()));
        }
        if self.curves.is_empty() {
            return Err(PassError::Config("a figure needs at least one [[curve]]".into()));
        }
        if self.system.num_users == 0 {
            return Err(PassError::Config("system.num_users must be at least 1".into()));
        }
        self.room.geometry().map_err(|e| PassError::Config(e.to_string()))?;
        for c in &self.curves {
            self.curve_room(c).geometry().map_err(|e| PassError::Config(format!("curve '{}': {e}", c.label)))?;
        }
        Ok(())
    }

    pub fn curve_room(&self, curve: &CurveSpec) -> RoomSection {
        curve.room.unwrap_or(self.room)
    }

    pub fn curve_scenario(&self, curve: &CurveSpec) -> ScenarioKind {
        curve.scenario.unwrap_or(self.scenario)
    }

    pub fn curve_methods<'a>(&'a self, curve: &'a CurveSpec) -> &'a [Method] {
        curve.methods.as_deref().unwrap_or(&self.sweep.methods)
    }

    /// Applies `key=value` overrides such as `room.height=2`, `sweep.seed=7`
    /// or `curve.1.scenario.n_pas=5`.
    ///
    /// A `room.*` or `scenario.*` key also replaces that key in every curve
    /// that sets it, so an override always reaches all curves.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self.clone());
        }
        let mut tree = toml::Value::try_from(self).map_err(|e| PassError::Config(e.to_string()))?;
        for raw in overrides {
            let raw = raw.as_ref();
            let (key, value) =
                raw.split_once('=').ok_or_else(|| PassError::Config(format!("override '{raw}' is not key=value")))?;
            let path: Vec<&str> = key.trim().split('.').collect();
            let value = parse_value(value.trim());
            set_path(&mut tree, &path, value.clone(), true)?;
            if matches!(path.first(), Some(&"room") | Some(&"scenario")) && path.len() > 1 {
                if let Some(toml::Value::Array(curves)) = tree.get_mut("curve") {
                    for c in curves.iter_mut() {
                        let _ = set_path(c, &path, value.clone(), false);
                    }
                }
            }
        }
        let cfg: FigureConfig = tree.try_into().map_err(|e: toml::de::Error| PassError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_value(raw: &str) -> toml::Value {
    let wrap = |s: String| toml::from_str::<toml::Table>(&s).ok().and_then(|mut t| t.remove("v"));
    wrap(format!("v = {raw}"))
        .or_else(|| wrap(format!("v = [{raw}]")))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Lets `methods=theorem` or `methods=theorem,montecarlo` fill a list field.
fn coerce_like(existing: &toml::Value, value: toml::Value) -> toml::Value {
    match (existing, value) {
        (toml::Value::Array(_), toml::Value::String(s)) => {
            toml::Value::Array(s.split(',').map(|p| parse_value(p.trim())).collect())
        }
        (toml::Value::Array(_), v @ toml::Value::Array(_)) => v,
        (toml::Value::Array(_), v) => toml::Value::Array(vec![v]),
        (_, v) => v,
    }
}

/// Sets `path` in `tree`. With `create`, missing table keys are inserted;
/// otherwise only existing keys are replaced.
fn set_path(tree: &mut toml::Value, path: &[&str], value: toml::Value, create: bool) -> Result<()> {
    let (last, parents) = path.split_last().ok_or_else(|| PassError::Config("empty override key".into()))?;
    let mut node = tree;
    for seg in parents {
        node = match node {
            toml::Value::Table(t) => {
                t.get_mut(*seg).ok_or_else(|| PassError::Config(format!("unknown config key '{}'", path.join("."))))?
            }
            toml::Value::Array(a) => {
                let idx: usize = seg
                    .parse()
                    .map_err(|_| PassError::Config(format!("expected an index at '{seg}' in '{}'", path.join("."))))?;
                let len = a.len();
                a.get_mut(idx).ok_or_else(|| PassError::Config(format!("index {idx} out of range ({len} entries)")))?
            }
            _ => return Err(PassError::Config(format!("'{}' does not name a table", path.join(".")))),
        };
    }
    match node {
        toml::Value::Table(t) => {
            if !create && !t.contains_key(*last) {
                return Err(PassError::Config(format!("key '{last}' not present")));
            }
            let value = match t.get(*last) {
                Some(existing) => coerce_like(existing, value),
                None => value,
            };
            t.insert((*last).to_string(), value);
            Ok(())
        }
        toml::Value::Array(a) => {
            let idx: usize = last.parse().map_err(|_| PassError::Config(format!("expected an index at '{last}'")))?;
            let len = a.len();
            *a.get_mut(idx).ok_or_else(|| PassError::Config(format!("index {idx} out of range ({len} entries)")))? =
                value;
            Ok(())
        }
        _ => Err(PassError::Config(format!("'{}' does not name a table", path.join(".")))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::presets::preset;

    #[test]
    fn figure_names() {
        assert_eq!("fig10".parse::<Figure>().unwrap(), Figure::Fig10);
        assert!(matches!("fig11".parse::<Figure>(), Err(PassError::Config(_))));
    }

    #[test]
    fn overrides_reach_curves() {
        let cfg = preset(Figure::Fig7).with_overrides(&["room.height=2", "sweep.seed=9"]).unwrap();
        assert_eq!(cfg.sweep.seed, 9);
        assert_eq!(cfg.room.height, 2.0);
        assert!(cfg.curves.iter().all(|c| cfg.curve_room(c).height == 2.0));
    }

    #[test]
    fn list_overrides() {
        let base = preset(Figure::Fig4);
        let a = base.with_overrides(&["sweep.methods=theorem,montecarlo"]).unwrap();
        assert_eq!(a.sweep.methods, vec![Method::Theorem, Method::Montecarlo]);
        let b = base.with_overrides(&["sweep.methods=high_snr"]).unwrap();
        assert_eq!(b.sweep.methods, vec![Method::HighSnr]);
        let c = base.with_overrides(&["sweep.power_dbm=[0, 30]"]).unwrap();
        assert_eq!(c.sweep.power_dbm, vec![0.0, 30.0]);
        let d = base.with_overrides(&["sweep.power_dbm=5"]).unwrap();
        assert_eq!(d.sweep.power_dbm, vec![5.0]);
    }

    #[test]
    fn indexed_curve_override() {
        let cfg = preset(Figure::Fig4).with_overrides(&["curve.1.scenario.n_pas=7"]).unwrap();
        assert_eq!(cfg.curve_scenario(&cfg.curves[1]).tag(), "mpsu");
        assert!(matches!(cfg.curves[1].scenario, Some(ScenarioKind::Mpsu { n_pas: 7, .. })));
        assert!(matches!(cfg.curves[0].scenario, Some(ScenarioKind::Mpsu { n_pas: 4, .. })));
    }

    #[test]
    fn bad_overrides() {
        let base = preset(Figure::Fig4);
        for bad in
            ["nokey", "sweep.nope.x=1", "curve.9.label=x", "room.height=-1", "sweep.samples=0", "sweep.methods=bogus"]
        {
            assert!(matches!(base.with_overrides(&[bad]), Err(PassError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut text = preset(Figure::Fig4).to_toml().unwrap();
        text.push_str("\n[extra]\nx = 1\n");
        assert!(matches!(FigureConfig::from_toml(&text), Err(PassError::Config(_))));
    }
}
