//! Exhaustive checks of the trace/norm counting statements, the color
//! partition of `S_0` and the splitting digraph over GF(8).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::galois::{Field, GaloisError};
use crate::tower::{color_classes, color_of, TowerError, TowerSpec, DEFAULT_PLACE_CAP};

/// Largest `q` whose GF(q^2) is scanned exhaustively.
pub const MAX_Q: u64 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("{id:?} is not available at q = {q}: {reason}")]
    Unsupported { id: PropositionId, q: u64, reason: String },
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum PropositionId {
    TraceFibers,
    NormFibers,
    JointFibers,
    ColorPartition,
    PairPartition,
    SelfColor,
    GraphDegrees,
    GraphDiameter3,
    PathZeroLemma,
}

impl PropositionId {
    pub const ALL: [PropositionId; 9] = [
        PropositionId::TraceFibers,
        PropositionId::NormFibers,
        PropositionId::JointFibers,
        PropositionId::ColorPartition,
        PropositionId::PairPartition,
        PropositionId::SelfColor,
        PropositionId::GraphDegrees,
        PropositionId::GraphDiameter3,
        PropositionId::PathZeroLemma,
    ];

    /// Checks on the GF(8) tower, which does not depend on `q`.
    pub fn is_graph_check(self) -> bool {
        matches!(self, PropositionId::GraphDegrees | PropositionId::GraphDiameter3 | PropositionId::PathZeroLemma)
    }

    pub fn parse(s: &str) -> Option<PropositionId> {
        PropositionId::ALL.into_iter().find(|id| id.name().eq_ignore_ascii_case(s))
    }

    pub fn name(self) -> &'static str {
        match self {
            PropositionId::TraceFibers => "traceFibers",
            PropositionId::NormFibers => "normFibers",
            PropositionId::JointFibers => "jointFibers",
            PropositionId::ColorPartition => "colorPartition",
            PropositionId::PairPartition => "pairPartition",
            PropositionId::SelfColor => "selfColor",
            PropositionId::GraphDegrees => "graphDegrees",
            PropositionId::GraphDiameter3 => "graphDiameter3",
            PropositionId::PathZeroLemma => "pathZeroLemma",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Passed,
    Failed,
    /// The statement's hypothesis excludes this `q`; `measured` still holds
    /// the counts.
    HypothesisNotMet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropositionResult {
    pub proposition_id: PropositionId,
    pub q: u64,
    pub status: CheckStatus,
    pub passed: bool,
    pub measured: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl PropositionResult {
    fn new(id: PropositionId, q: u64, measured: Value, witness: Option<Value>) -> Self {
        let passed = witness.is_none();
        PropositionResult {
            proposition_id: id,
            q,
            status: if passed { CheckStatus::Passed } else { CheckStatus::Failed },
            passed,
            measured,
            witness,
        }
    }

    pub fn is_failure(&self) -> bool {
        self.status == CheckStatus::Failed
    }
}

fn quadratic_field(id: PropositionId, q: u64) -> Result<Field, StructureError> {
    if !(2..=MAX_Q).contains(&q) || !q.is_power_of_two() {
        return Err(StructureError::Unsupported { id, q, reason: format!("q must be a power of two in 2..={MAX_Q}") });
    }
    Ok(Field::with_degree(2 * q.trailing_zeros())?)
}

fn units(field: &Field, q: u64) -> Vec<u32> {
    field.subfield(q).expect("quadratic field").units()
}

fn hex(x: u32) -> String {
    format!("{x:#x}")
}

/// Runs one check exhaustively.
pub fn check(id: PropositionId, q: u64) -> Result<PropositionResult, StructureError> {
    if id.is_graph_check() {
        if q != 8 {
            return Err(StructureError::Unsupported { id, q, reason: "digraph checks live on the GF(8) tower".into() });
        }
        return Ok(graph_check(id));
    }
    let field = quadratic_field(id, q)?;
    if q == 2 && matches!(id, PropositionId::ColorPartition | PropositionId::PairPartition | PropositionId::SelfColor) {
        return Err(StructureError::Unsupported { id, q, reason: "a single color; no partition structure".into() });
    }
    let f = &field;
    let tr = |b: u32| f.trace_to(q, b).expect("quadratic field");
    let nm = |b: u32| f.norm_to(q, b).expect("quadratic field");
    let all = f.elements();
    Ok(match id {
        PropositionId::TraceFibers => {
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for &g in &all {
                *counts.entry(tr(g)).or_default() += 1;
            }
            let bad: Vec<Value> = std::iter::once(0)
                .chain(units(f, q))
                .filter(|b| counts.get(b).copied().unwrap_or(0) != q)
                .map(|b| json!({"trace": hex(b), "count": counts.get(&b).copied().unwrap_or(0)}))
                .collect();
            let measured = json!({"fibers": counts.len(), "sizes": counts.values().collect::<Vec<_>>()});
            PropositionResult::new(id, q, measured, (!bad.is_empty()).then(|| json!(bad)))
        }
        PropositionId::NormFibers => {
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for &g in &all {
                *counts.entry(nm(g)).or_default() += 1;
            }
            let bad: Vec<Value> = units(f, q)
                .into_iter()
                .filter(|c| counts.get(c).copied().unwrap_or(0) != q + 1)
                .map(|c| json!({"norm": hex(c), "count": counts.get(&c).copied().unwrap_or(0)}))
                .collect();
            let measured = json!({"nonzero_fibers": counts.len() - 1, "size": q + 1});
            PropositionResult::new(id, q, measured, (!bad.is_empty()).then(|| json!(bad)))
        }
        PropositionId::JointFibers => {
            let mut counts: BTreeMap<(u32, u32), u64> = BTreeMap::new();
            for &g in &all {
                *counts.entry((tr(g), nm(g))).or_default() += 1;
            }
            let u = units(f, q);
            let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
            let mut bad = Vec::new();
            for &b in &u {
                for &c in &u {
                    let n = counts.get(&(b, c)).copied().unwrap_or(0);
                    *histogram.entry(n).or_default() += 1;
                    if n != 0 && n != 2 {
                        bad.push(json!({"trace": hex(b), "norm": hex(c), "count": n}));
                    }
                }
            }
            let measured = json!({"pairs_by_count": histogram});
            PropositionResult::new(id, q, measured, (!bad.is_empty()).then(|| json!(bad)))
        }
        PropositionId::ColorPartition => {
            let sub = f.subfield(q)?;
            let classes = color_classes(&sub);
            let mut seen: BTreeMap<u32, u32> = BTreeMap::new();
            let mut bad = Vec::new();
            for c in &classes {
                if c.members.len() as u64 != q || c.trace_fiber.len() as u64 != q {
                    bad.push(json!({"color": hex(c.label), "members": c.members.len(), "trace_fiber": c.trace_fiber.len()}));
                }
                for &m in &c.members {
                    if let Some(prev) = seen.insert(m, c.label) {
                        bad.push(json!({"element": hex(m), "colors": [hex(prev), hex(c.label)]}));
                    }
                }
            }
            let s0 = sub.split_set();
            for &b in &s0 {
                if !seen.contains_key(&b) {
                    bad.push(json!({"uncolored": hex(b)}));
                }
            }
            let measured = json!({"classes": classes.len(), "covered": seen.len(), "split_set": s0.len()});
            PropositionResult::new(id, q, measured, (!bad.is_empty()).then(|| json!(bad)))
        }
        PropositionId::PairPartition => {
            let tower = TowerSpec::garcia_stichtenoth(q)?;
            let sub = f.subfield(q)?;
            let mut bad = Vec::new();
            for a in sub.split_set() {
                let lifts = tower.lifts(a, 1)?;
                let mut by_color: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
                for g in lifts {
                    match color_of(f, q, g) {
                        Ok(c) => by_color.entry(c).or_default().push(g),
                        Err(_) => bad.push(json!({"place": hex(a), "lift_with_zero_trace": hex(g)})),
                    }
                }
                if by_color.len() as u64 != q / 2 {
                    bad.push(json!({"place": hex(a), "colors": by_color.len()}));
                }
                for (c, pair) in &by_color {
                    if pair.len() != 2 || sub.conjugate(pair[0]) != pair[1] {
                        bad.push(json!({"place": hex(a), "color": hex(*c), "lifts": pair.iter().map(|&x| hex(x)).collect::<Vec<_>>()}));
                    }
                }
            }
            let measured = json!({"places_checked": sub.split_set().len(), "pairs_per_place": q / 2});
            PropositionResult::new(id, q, measured, (!bad.is_empty()).then(|| json!(bad)))
        }
        PropositionId::SelfColor => {
            let sub = f.subfield(q)?;
            let classes = color_classes(&sub);
            let per_color: Vec<usize> =
                classes.iter().map(|c| c.members.iter().filter(|m| c.trace_fiber.contains(m)).count()).collect();
            let solutions: Vec<u32> = sub
                .split_set()
                .into_iter()
                .filter(|&a| {
                    let s = f.frobenius(a, q.trailing_zeros());
                    f.mul(s, s) ^ f.mul(a, a) == f.mul(s, a)
                })
                .collect();
            let measured = json!({"per_color": per_color, "solutions": solutions.len()});
            let hypothesis = q.trailing_zeros() % 2 == 1;
            let mut bad = Vec::new();
            if per_color.iter().any(|&c| c != 2) {
                bad.push(json!({"per_color": per_color}));
            }
            if solutions.len() as u64 != 2 * q - 2 {
                bad.push(json!({"solutions": solutions.len(), "expected": 2 * q - 2}));
            }
            let mut r = PropositionResult::new(id, q, measured, (!bad.is_empty()).then(|| json!(bad)));
            if !hypothesis {
                r.status = CheckStatus::HypothesisNotMet;
                r.passed = false;
                r.witness = None;
            }
            r
        }
        _ => unreachable!("graph checks handled above"),
    })
}

fn graph_check(id: PropositionId) -> PropositionResult {
    let tower = Arc::new(TowerSpec::quadratic_f8());
    let f = tower.field().clone();
    let graph = tower.split_graph().expect("GF(8) splitting set is closed under lifting");
    match id {
        PropositionId::GraphDegrees => {
            let b = f.generator();
            let b2 = f.mul(b, b);
            let mut expected_loops = vec![b, b2, b2 ^ b];
            expected_loops.sort();
            let mut loops = graph.self_loops();
            loops.sort();
            let mut bad = Vec::new();
            for &v in &graph.vertices {
                if graph.out_degree(v) != 2 || graph.in_degree(v) != 2 {
                    bad.push(json!({"vertex": hex(v), "out": graph.out_degree(v), "in": graph.in_degree(v)}));
                }
            }
            if loops != expected_loops {
                bad.push(json!({"self_loops": loops.iter().map(|&x| hex(x)).collect::<Vec<_>>()}));
            }
            let measured = json!({"vertices": graph.vertices.len(), "edges": graph.edges.len(), "self_loops": loops.len()});
            PropositionResult::new(id, 8, measured, (!bad.is_empty()).then(|| json!(bad)))
        }
        PropositionId::GraphDiameter3 => {
            let n = graph.vertices.len();
            let mut reach = vec![vec![false; n]; n];
            for len in 0..=3 {
                for (a, row) in graph.path_counts(len).iter().enumerate() {
                    for (b, &c) in row.iter().enumerate() {
                        reach[a][b] |= c > 0;
                    }
                }
            }
            let bad: Vec<Value> = (0..n)
                .flat_map(|a| (0..n).map(move |b| (a, b)))
                .filter(|&(a, b)| !reach[a][b])
                .map(|(a, b)| json!({"from": hex(graph.vertices[a]), "to": hex(graph.vertices[b])}))
                .collect();
            let measured = json!({"ordered_pairs": n * n, "within_3": n * n - bad.len()});
            PropositionResult::new(id, 8, measured, (!bad.is_empty()).then(|| json!(bad)))
        }
        PropositionId::PathZeroLemma => {
            let depth = 3;
            let places = tower.enumerate_places(depth, DEFAULT_PLACE_CAP).expect("48 places");
            let mut bad = Vec::new();
            let mut checked = 0;
            for i in 0..=depth {
                let counts = graph.path_counts(i);
                for (t, &target) in graph.vertices.iter().enumerate() {
                    let paths: u64 = counts.iter().map(|row| row[t]).sum();
                    let expected = paths << (depth - i);
                    let zeros: Vec<_> = places.places().iter().filter(|p| p.coords[i] == target).collect();
                    let mut starts: Vec<u32> = zeros.iter().map(|p| p.coords[0]).collect();
                    starts.sort();
                    starts.dedup();
                    let mut path_starts: Vec<u32> = graph.paths_of_length(i, target).into_iter().map(|s| s.0).collect();
                    path_starts.sort();
                    if zeros.len() as u64 != expected || starts != path_starts {
                        bad.push(json!({"i": i, "target": hex(target), "zeros": zeros.len(), "expected": expected}));
                    }
                    checked += 1;
                }
            }
            let measured = json!({"places": places.len(), "pairs_checked": checked});
            PropositionResult::new(id, 8, measured, (!bad.is_empty()).then(|| json!(bad)))
        }
        _ => unreachable!("only graph checks"),
    }
}

/// Every check applicable at `q`.
pub fn applicable(q: u64) -> Vec<PropositionId> {
    PropositionId::ALL
        .into_iter()
        .filter(|id| {
            if id.is_graph_check() {
                return q == 8;
            }
            q > 2 || matches!(id, PropositionId::TraceFibers | PropositionId::NormFibers | PropositionId::JointFibers)
        })
        .collect()
}

pub fn verify_all(q: u64) -> Result<Vec<PropositionResult>, StructureError> {
    applicable(q).into_iter().map(|id| check(id, q)).collect()
}

pub fn report_json(results: &[PropositionResult]) -> String {
    serde_json::to_string_pretty(results).expect("results serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_nine_pass_at_q8() {
        let results = verify_all(8).unwrap();
        assert_eq!(results.len(), 9);
        for r in &results {
            assert!(r.passed, "{:?} {}", r.proposition_id, r.measured);
        }
    }

    #[test]
    fn q2_only_field_level() {
        let results = verify_all(2).unwrap();
        assert_eq!(results.len(), 3);
        assert!(results.iter().all(|r| r.passed));
        assert!(check(PropositionId::ColorPartition, 2).is_err());
    }

    #[test]
    fn self_color_at_q4_reports_counts() {
        let r = check(PropositionId::SelfColor, 4).unwrap();
        assert_eq!(r.status, CheckStatus::HypothesisNotMet);
        assert!(!r.passed && !r.is_failure());
        assert!(r.measured["solutions"].is_number());
    }

    #[test]
    fn unsupported_q() {
        assert!(check(PropositionId::TraceFibers, 128).is_err());
        assert!(check(PropositionId::TraceFibers, 6).is_err());
        assert!(check(PropositionId::GraphDegrees, 4).is_err());
    }

    #[test]
    fn failures_carry_witnesses() {
        let r = PropositionResult::new(PropositionId::TraceFibers, 8, json!({}), Some(json!([1])));
        assert!(r.is_failure() && r.witness.is_some());
        assert_eq!(PropositionId::parse("selfcolor"), Some(PropositionId::SelfColor));
        let v: Value = serde_json::from_str(&report_json(&[r])).unwrap();
        assert_eq!(v[0]["proposition_id"], "traceFibers");
        assert_eq!(v[0]["status"], "failed");
    }
}
