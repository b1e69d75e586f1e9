//! Named codes from the constructions, addressable by string.
//!
//! | name | tower | depth | box |
//! |---|---|---|---|
//! | `gs-thm34-q{q}` | GS over GF(q^2) | 2 | `(q^2/2 - q, q - 1, q - 2)` |
//! | `gs-thm36-q{q}` | GS over GF(q^2) | 2 | `(q^2/2, q - 1, q - 2)` |
//! | `gs-cor38-q{q}-l{l}` | GS over GF(q^2) | 2 | `(l, q - 1, q - 2)` |
//! | `f4-prop41-j{j}` | GF(4) | j | `(1, ..., 1)`, j entries |
//! | `f4-prop41-j{j}-l0` | GF(4) | j | `(0, 1, ..., 1)`, j entries |
//! | `f4-rem42a` | GF(4) | 2 | `(1, 1)` |
//! | `f4-rem42b` | GF(4) | 2 | `(1, 0, 1)` |
//! | `f8-prop44` | GF(8) | 2 | `(4, 1)` |
//! | `f8-prop45` | GF(8) | 3 | `(4, 1, 1)` |

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::distance::{
    self, certify_lower_bound, construct_h, degree_lower_bound, exhaustive_min_distance, sampled_weight_floor,
    weight_of_factored, DistanceError, DistanceReport, FactoredCodeword, HVariant, LowerProvenance,
    UpperProvenance,
};
use crate::evalcode::{EvalCode, EvalCodeError, MonomialBox};
use crate::tower::{TowerError, TowerSpec, DEFAULT_PLACE_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresetError {
    #[error("unknown preset `{0}`; known families: {families}", families = FAMILIES.join(", "))]
    Unknown(String),
    #[error("preset `{name}`: {reason}")]
    OutOfRange { name: String, reason: String },
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    EvalCode(#[from] EvalCodeError),
    #[error(transparent)]
    Distance(#[from] DistanceError),
}

pub const FAMILIES: &[&str] = &[
    "gs-thm34-q{q}",
    "gs-thm36-q{q}",
    "gs-cor38-q{q}-l{l}",
    "f4-prop41-j{j}",
    "f4-prop41-j{j}-l0",
    "f4-rem42a",
    "f4-rem42b",
    "f8-prop44",
    "f8-prop45",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TowerChoice {
    GarciaStichtenoth { q: u64 },
    F4,
    F8,
}

impl TowerChoice {
    pub fn build(self) -> Result<TowerSpec, TowerError> {
        match self {
            TowerChoice::GarciaStichtenoth { q } => TowerSpec::garcia_stichtenoth(q),
            TowerChoice::F4 => Ok(TowerSpec::quadratic_f4()),
            TowerChoice::F8 => Ok(TowerSpec::quadratic_f8()),
        }
    }
}

/// Parameters stated for a construction, `d_at_most` marking an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Claimed {
    pub n: u64,
    pub k: u64,
    pub d: u64,
    pub r: u64,
    pub d_at_most: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Preset {
    pub name: String,
    pub tower: TowerChoice,
    pub depth: usize,
    pub bounds: Vec<u32>,
    pub variant: Option<HVariant>,
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn parse_num(s: &str) -> Option<u64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn out_of_range(name: &str, reason: impl Into<String>) -> PresetError {
    PresetError::OutOfRange { name: name.into(), reason: reason.into() }
}

fn gs_q(name: &str, s: &str) -> Result<u64, PresetError> {
    let q = parse_num(s).ok_or_else(|| PresetError::Unknown(name.into()))?;
    if !(4..=32).contains(&q) || !q.is_power_of_two() {
        return Err(out_of_range(name, "q must be a power of two between 4 and 32"));
    }
    Ok(q)
}

impl Preset {
    pub fn parse(name: &str) -> Result<Preset, PresetError> {
        let unknown = || PresetError::Unknown(name.into());
        let preset = |tower, depth, bounds: Vec<u32>, variant| Preset {
            name: name.to_string(),
            tower,
            depth,
            bounds,
            variant,
        };
        match name {
            "f4-rem42a" => return Ok(preset(TowerChoice::F4, 2, vec![1, 1], None)),
            "f4-rem42b" => return Ok(preset(TowerChoice::F4, 2, vec![1, 0, 1], None)),
            "f8-prop44" => return Ok(preset(TowerChoice::F8, 2, vec![4, 1], None)),
            "f8-prop45" => return Ok(preset(TowerChoice::F8, 3, vec![4, 1, 1], None)),
            _ => {}
        }
        if let Some(rest) = name.strip_prefix("f4-prop41-j") {
            let (j, l0) = match rest.strip_suffix("-l0") {
                Some(j) => (j, true),
                None => (rest, false),
            };
            let j = parse_num(j).ok_or_else(unknown)? as usize;
            if !(1..=12).contains(&j) || (l0 && j < 2) {
                return Err(out_of_range(name, "j must be in 1..=12 (2..=12 with -l0)"));
            }
            let mut bounds = vec![1u32; j];
            if l0 {
                bounds[0] = 0;
            }
            return Ok(preset(TowerChoice::F4, j, bounds, None));
        }
        if let Some(rest) = name.strip_prefix("gs-thm34-q") {
            let q = gs_q(name, rest)?;
            let e0 = (q * q / 2 - q) as u32;
            let b = vec![e0, q as u32 - 1, q as u32 - 2];
            return Ok(preset(TowerChoice::GarciaStichtenoth { q }, 2, b, Some(HVariant::Thm34)));
        }
        if let Some(rest) = name.strip_prefix("gs-thm36-q") {
            let q = gs_q(name, rest)?;
            let b = vec![(q * q / 2) as u32, q as u32 - 1, q as u32 - 2];
            return Ok(preset(TowerChoice::GarciaStichtenoth { q }, 2, b, Some(HVariant::Thm36)));
        }
        if let Some(rest) = name.strip_prefix("gs-cor38-q") {
            let (q, l) = rest.split_once("-l").ok_or_else(unknown)?;
            let q = gs_q(name, q)?;
            let l = parse_num(l).ok_or_else(unknown)?;
            if !(1..=q * q / 2).contains(&l) {
                return Err(out_of_range(name, format!("l must be in 1..={}", q * q / 2)));
            }
            let b = vec![l as u32, q as u32 - 1, q as u32 - 2];
            return Ok(preset(TowerChoice::GarciaStichtenoth { q }, 2, b, Some(HVariant::Cor38 { l: l as u32 })));
        }
        Err(unknown())
    }

    pub fn monomial_box(&self) -> MonomialBox {
        MonomialBox::new(self.bounds.clone()).expect("presets have nonempty boxes")
    }

    pub fn build(&self) -> Result<EvalCode, PresetError> {
        let tower = Arc::new(self.tower.build()?);
        let places = Arc::new(tower.enumerate_places(self.depth, DEFAULT_PLACE_CAP)?);
        Ok(EvalCode::new(places, self.monomial_box())?)
    }

    /// Parameters as stated for the construction the preset reproduces.
    pub fn claimed(&self) -> Option<Claimed> {
        let c = |n, k, d, r| Some(Claimed { n, k, d, r, d_at_most: false });
        match (self.tower, self.name.as_str()) {
            (_, "f4-rem42a") | (_, "f4-rem42b") => c(8, 4, 2, 1),
            (_, "f8-prop44") => c(24, 10, 4, 1),
            (_, "f8-prop45") => Some(Claimed { n: 48, k: 20, d: 4, r: 1, d_at_most: true }),
            (TowerChoice::GarciaStichtenoth { q }, _) => {
                let n = q * q * (q * q - q);
                let k = (self.bounds[0] as u64 + 1) * q * (q - 1);
                let d = n - q * q * (self.bounds[0] as u64 + 2 * q - 3);
                c(n, k, d, q - 1)
            }
            (TowerChoice::F4, _) if !self.name.ends_with("-l0") => {
                // statement of the proposition: [2^j, 2^(j-2), 2], r = 1
                let j = self.depth as u32;
                (j >= 2).then(|| Claimed { n: 1 << j, k: 1 << (j - 2), d: 2, r: 1, d_at_most: false })
            }
            _ => None,
        }
    }

    /// An explicit codeword of small weight, if one is known for the preset.
    pub fn witness(&self, code: &EvalCode) -> Result<Option<FactoredCodeword>, PresetError> {
        match self.name.as_str() {
            "f8-prop44" => Ok(Some(prop44_witness(code)?)),
            "f8-prop45" => Ok(Some(prop45_witness(code))),
            _ if self.tower == TowerChoice::F4 => Ok(Some(f4_witness(code))),
            _ => Ok(None),
        }
    }
}

/// `(x_1 - b) prod (x_0 - a)` over the `a` in S_0 that are not predecessors
/// of `b` in the splitting digraph, `b` the generator: the only zeros of
/// `x_1 - b` lie over the predecessors, so the two zero sets are disjoint.
fn prop44_witness(code: &EvalCode) -> Result<FactoredCodeword, PresetError> {
    let tower = code.places().tower();
    let b = tower.field().generator();
    let graph = tower.split_graph()?;
    let preds: Vec<u32> = graph.edges.iter().filter(|e| e.1 == b).map(|e| e.0).collect();
    let h0: Vec<u32> = graph.vertices.iter().copied().filter(|a| !preds.contains(a)).collect();
    Ok(FactoredCodeword::new(vec![(1, vec![b]), (0, h0)]))
}

/// `prod (x_i - c_i)` over the active variables, `c` the first place: over
/// GF(4) every coordinate takes two values, so the product vanishes
/// everywhere except where each active coordinate takes its other value.
fn f4_witness(code: &EvalCode) -> FactoredCodeword {
    let first = &code.places().get(0).coords;
    let factors = code.monomial_box().active_variables().into_iter().map(|v| (v, vec![first[v]])).collect();
    FactoredCodeword::new(factors)
}

/// `(x_0 - b)(x_0 - b - 1)(x_0 - b^2 - b)(x_0 - b^2 - 1)(x_1 - b^2)(x_2 - b)`
/// with `b^3 = b + 1`.
fn prop45_witness(code: &EvalCode) -> FactoredCodeword {
    let f = code.field();
    let b = f.generator();
    let b2 = f.mul(b, b);
    FactoredCodeword::new(vec![(0, vec![b, b ^ 1, b2 ^ b, b2 ^ 1]), (1, vec![b2]), (2, vec![b])])
}

/// What to spend on a distance report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistanceOptions {
    pub budget: u128,
    pub sample_trials: u64,
    pub seed: u64,
    /// Cap on rank checks for erasure-rank certificates; 0 disables them.
    pub certificate_budget: u128,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions { budget: distance::DEFAULT_BUDGET, sample_trials: 0, seed: 0, certificate_budget: 0 }
    }
}

/// Combines every applicable distance technique for a preset code. Errata
/// and fallbacks are recorded in `notes`.
pub fn distance_report(
    preset: &Preset,
    code: &EvalCode,
    opts: &DistanceOptions,
) -> Result<DistanceReport, PresetError> {
    let bound = degree_lower_bound(code)?;
    let mut report = DistanceReport::new(code, (bound.value, LowerProvenance::DegreeBound));
    if bound.clamped {
        report.notes.push(format!("degree bound is negative ({}), clamped to 0", bound.raw));
    }
    match exhaustive_min_distance(code, opts.budget) {
        Ok(exact) => {
            report.raise_lower(exact.d_lower, LowerProvenance::Exhaustive);
            report.lower_upper(exact.d_lower, UpperProvenance::Exhaustive);
        }
        Err(DistanceError::BudgetExceeded { required, budget }) => {
            report.notes.push(format!("exhaustive search skipped: needs {required} codewords, budget {budget}"));
        }
        Err(e) => return Err(e.into()),
    }
    if let Some(w) = preset.witness(code)? {
        let fw = weight_of_factored(code, &w)?;
        report.lower_upper(fw.weight, UpperProvenance::ExplicitCodeword);
    }
    if let Some(variant) = preset.variant {
        match construct_h(code, variant) {
            Ok(h) => report.lower_upper(h.weight, UpperProvenance::ExplicitCodeword),
            Err(DistanceError::Construction(e)) => {
                report.notes.push(e.to_string());
                if let Some(h) = &e.fallback {
                    report.lower_upper(h.weight, UpperProvenance::ExplicitCodeword);
                }
            }
            Err(e) => return Err(e.into()),
        }
        report.notes.extend(distance::construction_notes());
    }
    if opts.certificate_budget > 0 && !report.exact {
        certify_lower_bound(code, &mut report, opts.certificate_budget);
    }
    if opts.sample_trials > 0 {
        match sampled_weight_floor(code, opts.sample_trials, opts.seed) {
            Some(w) => {
                report.notes.push(format!("sampled floor over {} trials (seed {}): {w}", opts.sample_trials, opts.seed));
                report.lower_upper(w, UpperProvenance::Sampled);
            }
            None => report.notes.push("sampled floor: no codeword drawn".into()),
        }
    }
    Ok(report)
}
