//! Spectrum reports: one row per level, one column per method.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use spectra_core::aim::AimResult;
use spectra_core::hdm::{HdmSpectrum, PlateauReport};
use spectra_core::PotentialParams;

/// Twelve significant digits, `E` exponent.
pub fn e12(x: f64) -> String {
    format!("{x:.11E}")
}

pub fn round12(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    e12(x).parse().expect("formatted float parses")
}

/// A number serialized in the fixed `E` notation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E12(pub f64);

impl Serialize for E12 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        opt_e12::serialize(&Some(self.0), s)
    }
}

/// Optional energies written as `E`-notation literals.
mod opt_e12 {
    use serde::{de::Error as _, ser::Error as _, Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) if x.is_finite() => RawValue::from_string(super::e12(*x))
                .map_err(S::Error::custom)?
                .serialize(s),
            Some(x) => Err(S::Error::custom(format!("cannot write non-finite value {x}"))),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Option::<f64>::deserialize(d).map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsOut {
    #[serde(rename = "V0")]
    pub v0: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub ell: u32,
}

impl From<&PotentialParams> for ParamsOut {
    fn from(p: &PotentialParams) -> Self {
        ParamsOut {
            v0: p.v0,
            lambda: p.lambda,
            gamma: p.gamma,
            ell: p.ell,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub n: usize,
    #[serde(rename = "E_aim", with = "opt_e12", default, skip_serializing_if = "Option::is_none")]
    pub e_aim: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aim_converged: Option<bool>,
    #[serde(rename = "E_hdm", with = "opt_e12", default, skip_serializing_if = "Option::is_none")]
    pub e_hdm: Option<f64>,
    #[serde(with = "opt_e12", default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(with = "opt_e12", default, skip_serializing_if = "Option::is_none")]
    pub rel_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AimMeta {
    pub n_max: usize,
    pub x0: f64,
    pub digits: u32,
    pub converged: usize,
    /// Last successive-depth change per level; `None` if only one depth was refined.
    #[serde(default)]
    pub drift: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HdmMeta {
    #[serde(rename = "N")]
    pub n: usize,
    pub mu: f64,
    /// `"user"` or `"plateau"`.
    pub mu_source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plateau_window: Option<[f64; 2]>,
    #[serde(default)]
    pub no_plateau: bool,
    pub spurious: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aim: Option<AimMeta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hdm: Option<HdmMeta>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub params: ParamsOut,
    pub methods: Vec<String>,
    pub levels: Vec<Level>,
    pub meta: Meta,
}

/// HDM output plus how μ was chosen.
pub struct HdmRun {
    pub spectrum: HdmSpectrum,
    pub plateau: Option<PlateauReport>,
}

impl SpectrumReport {
    pub fn build(p: &PotentialParams, aim: Option<(&AimResult, u32)>, hdm: Option<&HdmRun>) -> Self {
        let mut methods = Vec::new();
        let aim_e: Vec<(f64, bool)> = match aim {
            Some((r, _)) => {
                methods.push("aim".to_string());
                r.levels.iter().map(|l| (l.energy, l.converged)).collect()
            }
            None => Vec::new(),
        };
        let hdm_e: Vec<f64> = match hdm {
            Some(h) => {
                methods.push("hdm".to_string());
                h.spectrum.bound.clone()
            }
            None => Vec::new(),
        };
        let rows = aim_e.len().max(hdm_e.len());
        let levels = (0..rows)
            .map(|n| {
                let a = aim_e.get(n);
                let h = hdm_e.get(n).copied();
                let (delta, rel_delta) = match (a, h) {
                    (Some(&(a, _)), Some(h)) => {
                        let d = (a - h).abs();
                        (Some(round12(d)), Some(round12(d / h.abs())))
                    }
                    _ => (None, None),
                };
                Level {
                    n,
                    e_aim: a.map(|x| round12(x.0)),
                    aim_converged: a.map(|x| x.1),
                    e_hdm: h.map(round12),
                    delta,
                    rel_delta,
                }
            })
            .collect();
        let meta = Meta {
            aim: aim.map(|(r, digits)| AimMeta {
                n_max: r.n_max,
                x0: r.x0,
                digits,
                converged: r.eigenvalues().len(),
                drift: r
                    .levels
                    .iter()
                    .map(|l| l.drift.is_finite().then(|| round12(l.drift)))
                    .collect(),
            }),
            hdm: hdm.map(|h| HdmMeta {
                n: h.spectrum.n,
                mu: h.spectrum.mu,
                mu_source: if h.plateau.is_some() { "plateau" } else { "user" }.to_string(),
                plateau_window: h.plateau.as_ref().and_then(|pl| pl.window_mu()).map(|(a, b)| [a, b]),
                no_plateau: h.plateau.as_ref().is_some_and(PlateauReport::no_plateau),
                spurious: h.spectrum.spurious.len(),
            }),
        };
        SpectrumReport {
            params: p.into(),
            methods,
            levels,
            meta,
        }
    }

    fn has(&self, method: &str) -> bool {
        self.methods.iter().any(|m| m == method)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let (aim, hdm) = (self.has("aim"), self.has("hdm"));
        let mut head = vec!["n"];
        if aim {
            head.extend(["E_aim", "aim_converged"]);
        }
        if hdm {
            head.push("E_hdm");
        }
        if aim && hdm {
            head.extend(["delta", "rel_delta"]);
        }
        let opt = |v: Option<f64>| v.map(e12).unwrap_or_default();
        let mut out = head.join(",");
        out.push('\n');
        for l in &self.levels {
            let mut row = vec![l.n.to_string()];
            if aim {
                row.push(opt(l.e_aim));
                row.push(l.aim_converged.map(|c| c.to_string()).unwrap_or_default());
            }
            if hdm {
                row.push(opt(l.e_hdm));
            }
            if aim && hdm {
                row.push(opt(l.delta));
                row.push(opt(l.rel_delta));
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_table(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "V0 = {}  lambda = {}  gamma = {}  ell = {}",
            p.v0, p.lambda, p.gamma, p.ell
        );
        if let Some(a) = &self.meta.aim {
            let _ = writeln!(
                out,
                "AIM: n_max = {}, x0 = {}, {} digits; {} of {} levels stable (* = not stable)",
                a.n_max,
                a.x0,
                a.digits,
                a.converged,
                a.drift.len()
            );
        }
        if let Some(h) = &self.meta.hdm {
            let window = match h.plateau_window {
                Some([a, b]) => format!(", plateau {a:.4} .. {b:.4}"),
                None if h.no_plateau => ", no plateau found".to_string(),
                None => String::new(),
            };
            let _ = writeln!(out, "HDM: N = {}, mu = {:.6} ({}{window})", h.n, h.mu, h.mu_source);
        }
        let (aim, hdm) = (self.has("aim"), self.has("hdm"));
        let mut head = format!("{:>3}", "n");
        if aim {
            head += &format!("  {:>19}", "E_aim");
        }
        if hdm {
            head += &format!("  {:>18}", "E_hdm");
        }
        if aim && hdm {
            head += &format!("  {:>18}  {:>18}", "delta", "rel_delta");
        }
        let _ = writeln!(out, "{}", head.trim_end());
        let cell = |v: Option<f64>| v.map(e12).unwrap_or_else(|| "-".into());
        for l in &self.levels {
            let mut row = format!("{:>3}", l.n);
            if aim {
                let mark = if l.aim_converged == Some(false) { "*" } else { " " };
                row += &format!("  {:>18}{mark}", cell(l.e_aim));
            }
            if hdm {
                row += &format!("  {:>18}", cell(l.e_hdm));
            }
            if aim && hdm {
                row += &format!("  {:>18}  {:>18}", cell(l.delta), cell(l.rel_delta));
            }
            let _ = writeln!(out, "{}", row.trim_end());
        }
        out
    }
}
