//! Space parameters, the threshold exponents, and the hypothesis windows of
//! the characterization theorems.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LpError, Result};

/// Serde helpers for exponents in `(0, inf]`: numbers or the string `"inf"`.
pub mod extended_real {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(v),
            Raw::Text(t) => parse_extended(&t).map_err(serde::de::Error::custom),
        }
    }
}

/// Parses a real number, accepting `inf`, `infinity` and `∞`.
pub fn parse_extended(text: &str) -> std::result::Result<f64, String> {
    match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "∞" => Ok(f64::INFINITY),
        t => t.parse::<f64>().map_err(|e| format!("{text:?}: {e}")),
    }
}

pub fn format_extended(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Scale {
    /// Triebel-Lizorkin: `L^p` over position of `l^q` over scales.
    #[default]
    F,
    /// Besov: `l^q` over scales of `L^p` norms.
    B,
}

impl FromStr for Scale {
    type Err = LpError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "F" | "f" => Ok(Self::F),
            "B" | "b" => Ok(Self::B),
            other => Err(LpError::InvalidParams(format!("scale {other:?} is neither F nor B"))),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::F => "F",
            Self::B => "B",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub s: f64,
    #[serde(with = "extended_real")]
    pub p: f64,
    #[serde(with = "extended_real")]
    pub q: f64,
    #[serde(rename = "L", alias = "order", default = "default_order")]
    pub order: u32,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default = "default_homogeneous")]
    pub homogeneous: bool,
}

fn default_order() -> u32 {
    1
}

fn default_r() -> f64 {
    1.0
}

fn default_homogeneous() -> bool {
    true
}

impl SpaceParams {
    pub fn new(s: f64, p: f64, q: f64, order: u32, scale: Scale) -> Self {
        Self { s, p, q, order, r: 1.0, scale, homogeneous: true }
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = r;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for v in [self.p, self.q] {
            if !(v > 0.0) {
                return Err(LpError::InvalidExponent(v));
            }
        }
        if !self.s.is_finite() {
            return Err(LpError::InvalidParams(format!("smoothness s = {} must be finite", self.s)));
        }
        if self.order == 0 {
            return Err(LpError::InvalidParams("difference order L must be at least 1".into()));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(LpError::InvalidParams(format!("maximal parameter r = {} must be positive", self.r)));
        }
        if self.scale == Scale::F && self.homogeneous && self.p.is_infinite() {
            return Err(LpError::InvalidParams("homogeneous F-scale requires p < inf".into()));
        }
        Ok(())
    }
}

/// `sigma_pq`, `sigma~_pq`, `sigma~^1_pq` and `sigma_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub sigma_pq: f64,
    pub sigma_tilde_pq: f64,
    pub sigma_tilde1_pq: f64,
    pub sigma_p: f64,
}

pub fn thresholds(p: f64, q: f64, n: usize) -> Result<Thresholds> {
    for v in [p, q] {
        if !(v > 0.0) {
            return Err(LpError::InvalidExponent(v));
        }
    }
    let n = n as f64;
    let inv = |v: f64| 1.0 / v;
    Ok(Thresholds {
        sigma_pq: (n * (inv(p.min(q)) - 1.0)).max(0.0),
        sigma_tilde_pq: (n * (inv(p) - inv(q))).max(0.0),
        sigma_tilde1_pq: (inv(p) - inv(q)).max(0.0),
        sigma_p: (n * (inv(p) - 1.0)).max(0.0),
    })
}

/// Theorem parts whose hypotheses can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    T2i,
    T2ii,
    T2iii,
    T2iv,
    T4,
    T5,
    T6i,
    T6ii,
    T6iii,
    T6iv,
    T7i,
    T7ii,
    T7iii,
    T7iv,
    T8i,
    T8ii,
    T8iii,
    T8iv,
    T8v,
}

impl TheoremId {
    pub const ALL: [TheoremId; 19] = [
        Self::T2i,
        Self::T2ii,
        Self::T2iii,
        Self::T2iv,
        Self::T4,
        Self::T5,
        Self::T6i,
        Self::T6ii,
        Self::T6iii,
        Self::T6iv,
        Self::T7i,
        Self::T7ii,
        Self::T7iii,
        Self::T7iv,
        Self::T8i,
        Self::T8ii,
        Self::T8iii,
        Self::T8iv,
        Self::T8v,
    ];
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for TheoremId {
    type Err = LpError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|t| t.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| LpError::UnknownTheoremId(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub theorem: TheoremId,
    pub satisfied: bool,
    /// The admissible `s` interval (and `r` interval where one applies), or
    /// the failed side condition.
    pub window: String,
}

/// An open interval `lo < v < hi`.
#[derive(Debug, Clone, Copy)]
struct Open(f64, f64);

impl Open {
    fn contains(&self, v: f64) -> bool {
        self.0 < v && v < self.1
    }

    fn describe(&self, var: &str) -> String {
        format!("{} < {var} < {}", format_extended(self.0), format_extended(self.1))
    }
}

const ALL_S: Open = Open(f64::NEG_INFINITY, f64::INFINITY);

/// Evaluates the hypotheses of one theorem part for `params` in dimension `n`.
pub fn hypothesis_window(theorem: TheoremId, params: &SpaceParams, n: usize) -> Result<HypothesisCheck> {
    params.validate()?;
    let (p, q, s) = (params.p, params.q, params.s);
    let l = params.order as f64;
    let nf = n as f64;
    let th = thresholds(p, q, n)?;
    let pmin = p.min(q);

    // Either a failed side condition, or an s-window plus an optional r-window.
    let side = |ok: bool, what: &str| if ok { None } else { Some(format!("requires {what}")) };
    let (failed, s_win, r_win): (Option<String>, Open, Option<Open>) = match theorem {
        TheoremId::T2i => (side(p.is_finite() && q.is_finite(), "p, q < inf"), Open(th.sigma_tilde_pq, l), None),
        TheoremId::T2ii => {
            let w = if q < 1.0 { Open(th.sigma_pq + th.sigma_tilde_pq, f64::INFINITY) } else { Open(-nf, f64::INFINITY) };
            (side(p.is_finite() && q.is_finite(), "p, q < inf"), w, None)
        }
        TheoremId::T2iii => (side(p.is_finite() && q.is_infinite(), "p < inf, q = inf"), Open(nf / p, l), None),
        TheoremId::T2iv => (side(p.is_finite() && q.is_infinite(), "p < inf, q = inf"), Open(-nf, f64::INFINITY), None),
        TheoremId::T4 => (
            side(n >= 2, "n >= 2").or(side(p.is_finite(), "p < inf")),
            Open(nf / pmin, l),
            Some(Open(nf / s, pmin)),
        ),
        TheoremId::T5 => (side(n >= 2, "n >= 2"), Open(nf / p, l), Some(Open(nf / s, p))),
        TheoremId::T6i => (side(p.is_finite() && q.is_finite(), "p, q < inf"), Open(th.sigma_tilde1_pq, l), None),
        TheoremId::T6ii => {
            let w = if pmin > 1.0 { ALL_S } else { Open(th.sigma_pq + th.sigma_tilde1_pq, f64::INFINITY) };
            (side(p.is_finite() && q.is_finite(), "p, q < inf"), w, None)
        }
        TheoremId::T6iii => (side(p.is_finite() && q.is_infinite(), "p < inf, q = inf"), Open(1.0 / p, l), None),
        TheoremId::T6iv => {
            let w = if p > 1.0 { ALL_S } else { Open(th.sigma_p + 1.0 / p, f64::INFINITY) };
            (side(p.is_finite() && q.is_infinite(), "p < inf, q = inf"), w, None)
        }
        TheoremId::T7i | TheoremId::T8i => (side(q.is_finite(), "q < inf"), Open(0.0, l), None),
        TheoremId::T7ii => {
            let w = if p > 1.0 && q >= 1.0 {
                ALL_S
            } else if p > 1.0 {
                Open(0.0, l)
            } else {
                Open(th.sigma_p, l)
            };
            (side(q.is_finite(), "q < inf"), w, None)
        }
        TheoremId::T7iii | TheoremId::T8iii => (side(q.is_infinite(), "q = inf"), Open(0.0, l), None),
        TheoremId::T7iv => {
            let w = if p > 1.0 { ALL_S } else { Open(th.sigma_p, f64::INFINITY) };
            (side(q.is_infinite(), "q = inf"), w, None)
        }
        TheoremId::T8ii => {
            let w = if p > 1.0 { ALL_S } else { Open(th.sigma_p, f64::INFINITY) };
            (side(q.is_finite(), "q < inf").or(side(p != 1.0, "p != 1")), w, None)
        }
        TheoremId::T8iv => {
            let w = if p > 1.0 { ALL_S } else { Open(th.sigma_p, f64::INFINITY) };
            (side(q.is_infinite(), "q = inf").or(side(p != 1.0, "p != 1")), w, None)
        }
        TheoremId::T8v => {
            let w = if (1.0..f64::INFINITY).contains(&q) || q.is_infinite() {
                Open(-nf, f64::INFINITY)
            } else {
                Open(0.0, f64::INFINITY)
            };
            (side(p == 1.0, "p = 1"), w, None)
        }
    };

    let mut window = s_win.describe("s");
    if let Some(r) = r_win {
        window.push_str("; ");
        window.push_str(&r.describe("r"));
    }
    if let Some(why) = failed {
        return Ok(HypothesisCheck { theorem, satisfied: false, window: format!("{why} ({window})") });
    }
    let satisfied = s_win.contains(s) && r_win.is_none_or(|w| w.contains(params.r));
    Ok(HypothesisCheck { theorem, satisfied, window })
}
