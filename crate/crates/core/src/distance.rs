//! Minimum distance: pole-degree lower bounds, explicit low-weight codewords
//! `prod (x_i - a)`, exhaustive search, random sampling and an erasure-rank
//! certificate.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::evalcode::{weight, EvalCode, EvalCodeError};
use crate::galois::GaloisError;
use crate::linalg;
use crate::poly;
use crate::tower::{color_classes, color_of, TowerKind};

/// Default cap on the number of messages an exhaustive search may visit.
pub const DEFAULT_BUDGET: u128 = 1 << 31;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistanceError {
    #[error(transparent)]
    EvalCode(#[from] EvalCodeError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error("exhaustive search needs {required} codewords, above the budget of {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("no pole degrees declared for depth {0}")]
    MissingPoleDegrees(usize),
    #[error("factor on x_{variable} has degree {used}, above the box bound {bound}")]
    NotInBox { variable: usize, used: usize, bound: u32 },
    #[error("zero count {direct} disagrees with the expanded codeword ({expanded})")]
    ExpansionMismatch { direct: u64, expanded: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Construction(#[from] Box<ConstructionError>),
}

/// `n - sum E_i deg(x_i)`, clamped at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeBound {
    pub value: u64,
    pub raw: i64,
    pub clamped: bool,
}

pub fn degree_lower_bound(code: &EvalCode) -> Result<DegreeBound, DistanceError> {
    let depth = code.places().depth();
    let degrees =
        code.places().tower().pole_degrees(depth).ok_or(DistanceError::MissingPoleDegrees(depth))?;
    let used: i64 = code.monomial_box().bounds().iter().zip(degrees).map(|(&e, &d)| e as i64 * d as i64).sum();
    let raw = code.len() as i64 - used;
    Ok(DegreeBound { value: raw.max(0) as u64, raw, clamped: raw < 0 })
}

/// `f = prod_i prod_{a in H_i} (x_i - a)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct FactoredCodeword {
    pub factors: Vec<(usize, Vec<u32>)>,
}

impl FactoredCodeword {
    pub fn new(factors: Vec<(usize, Vec<u32>)>) -> Self {
        FactoredCodeword { factors }
    }

    /// Roots grouped per variable.
    pub fn roots_by_variable(&self) -> BTreeMap<usize, Vec<u32>> {
        let mut out: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (v, roots) in &self.factors {
            out.entry(*v).or_default().extend_from_slice(roots);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FactoredWeight {
    pub zeros: u64,
    pub weight: u64,
}

/// Coefficients of `f` on the box monomials, in monomial order.
pub fn expand_factored(code: &EvalCode, f: &FactoredCodeword) -> Result<Vec<u32>, DistanceError> {
    let field = code.field();
    let bounds = code.monomial_box().bounds();
    let by_var = f.roots_by_variable();
    let mut univariate: Vec<Vec<u32>> = vec![vec![1]; bounds.len()];
    for (&v, roots) in &by_var {
        let bound = bounds.get(v).copied().unwrap_or(0);
        if v >= bounds.len() || roots.len() > bound as usize {
            return Err(DistanceError::NotInBox { variable: v, used: roots.len(), bound });
        }
        univariate[v] = poly::from_roots(field, roots);
    }
    Ok(code
        .monomial_box()
        .monomials()
        .iter()
        .map(|exps| {
            exps.iter()
                .enumerate()
                .fold(1, |acc, (i, &e)| field.mul(acc, univariate[i].get(e as usize).copied().unwrap_or(0)))
        })
        .collect())
}

/// Weight of `f` counted from its factors, cross-checked against the
/// encoding of its expansion.
pub fn weight_of_factored(code: &EvalCode, f: &FactoredCodeword) -> Result<FactoredWeight, DistanceError> {
    let coeffs = expand_factored(code, f)?;
    let by_var = f.roots_by_variable();
    let zeros = code
        .places()
        .places()
        .iter()
        .filter(|p| by_var.iter().any(|(&v, roots)| roots.contains(&p.coords[v])))
        .count() as u64;
    let word = code.evaluate_coefficients(&coeffs)?;
    let expanded = (code.len() - weight(&word)) as u64;
    if expanded != zeros {
        return Err(DistanceError::ExpansionMismatch { direct: zeros, expanded });
    }
    Ok(FactoredWeight { zeros, weight: code.len() as u64 - zeros })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HVariant {
    Thm34,
    Thm36,
    Cor38 { l: u32 },
}

/// An explicit `h = h_0 h_1 h_2` with its bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConstructedH {
    pub variant: HVariant,
    pub h0: Vec<u32>,
    pub h1: Vec<u32>,
    pub h2: Vec<u32>,
    /// New zeros contributed by each factor, in order.
    pub new_zeros: [u64; 3],
    pub zeros: u64,
    pub weight: u64,
    pub target_weight: u64,
}

impl ConstructedH {
    pub fn codeword(&self) -> FactoredCodeword {
        FactoredCodeword::new(vec![(0, self.h0.clone()), (1, self.h1.clone()), (2, self.h2.clone())])
    }
}

/// A counting claim of the construction that does not hold. When the failure
/// happens after all three factor sets were chosen, `fallback` carries the
/// resulting codeword, still a valid upper bound.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("construction of h failed: {claim}: {detail}")]
pub struct ConstructionError {
    pub claim: String,
    pub detail: String,
    pub fallback: Option<ConstructedH>,
}

fn construction_error(claim: &str, detail: String, fallback: Option<ConstructedH>) -> DistanceError {
    DistanceError::Construction(Box::new(ConstructionError { claim: claim.into(), detail, fallback }))
}

/// Builds `h = h_0 h_1 h_2` for the depth-2 Garcia-Stichtenoth codes.
pub fn construct_h(code: &EvalCode, variant: HVariant) -> Result<ConstructedH, DistanceError> {
    let places = code.places();
    let TowerKind::GarciaStichtenoth { q } = places.tower().kind() else {
        return Err(DistanceError::Unsupported("construct_h needs a Garcia-Stichtenoth code".into()));
    };
    if places.depth() != 2 || code.monomial_box().len() != 3 {
        return Err(DistanceError::Unsupported("construct_h needs depth 2 and a box on x_0, x_1, x_2".into()));
    }
    if q < 8 {
        return Err(construction_error(
            "q^2/2 - 2q > q",
            format!("fails at q = {q}; the construction needs q >= 8"),
            None,
        ));
    }
    let field = places.field();
    let sub = field.subfield(q)?;
    let classes = color_classes(&sub);
    let s1 = classes.iter().find(|c| c.label == 1).expect("color 1 exists").clone();
    let n = code.len() as u64;
    let bounds = code.monomial_box().bounds().to_vec();

    // alpha whose lifts avoid S_1
    let mut hh0 = Vec::new();
    for a in sub.split_set() {
        let lifts = &classes.iter().find(|c| c.label == color_of(field, q, a).expect("a in S_0")).unwrap().trace_fiber;
        if lifts.iter().all(|g| !s1.members.contains(g)) {
            hh0.push(a);
        }
    }
    field.sort_canonical(&mut hh0);
    let half = q * q / 2 - q;
    if hh0.len() as u64 != half {
        return Err(construction_error(
            "|H_0| = q^2/2 - q",
            format!("found {} values whose lifts avoid S_1, expected {half}", hh0.len()),
            None,
        ));
    }
    let h0: Vec<u32> = match variant {
        HVariant::Thm34 => hh0.clone(),
        HVariant::Thm36 => hh0.iter().chain(&s1.members).copied().collect(),
        HVariant::Cor38 { l } => hh0.iter().chain(&s1.members).copied().take(l as usize).collect(),
    };
    let e0 = bounds[0] as usize;
    if h0.len() != e0 {
        return Err(construction_error(
            "|H_0| = E_0",
            format!("{} values for H_0 but the box bound on x_0 is {e0}", h0.len()),
            None,
        ));
    }
    let want1 = bounds[1] as usize;
    let want2 = bounds[2] as usize;
    if want1 as u64 != q - 1 || want2 as u64 != q - 2 {
        return Err(DistanceError::Unsupported(format!(
            "box bounds on x_1, x_2 must be q-1, q-2; got {want1}, {want2}"
        )));
    }

    let mut is_zero = vec![false; places.len()];
    let mark = |is_zero: &mut Vec<bool>, var: usize, a: u32| -> u64 {
        let mut added = 0;
        for p in places.places() {
            if p.coords[var] == a && !is_zero[p.index] {
                is_zero[p.index] = true;
                added += 1;
            }
        }
        added
    };
    let overlap = |is_zero: &Vec<bool>, var: usize, a: u32| -> u64 {
        places.places().iter().filter(|p| p.coords[var] == a && is_zero[p.index]).count() as u64
    };

    let mut new_zeros = [0u64; 3];
    for &a in &h0 {
        new_zeros[0] += mark(&mut is_zero, 0, a);
    }

    let mut candidates1: Vec<u32> = sub.split_set().into_iter().filter(|b| !s1.members.contains(b)).collect();
    field.sort_canonical(&mut candidates1);
    let admissible1: Vec<u32> = candidates1.into_iter().filter(|&b| overlap(&is_zero, 1, b) == 0).collect();
    if admissible1.len() < want1 {
        return Err(construction_error(
            "enough admissible values for H_1",
            format!("{} values of x_1 outside S_1 avoid the zeros of h_0, need {want1}", admissible1.len()),
            None,
        ));
    }
    let h1: Vec<u32> = admissible1[..want1].to_vec();
    for &b in &h1 {
        new_zeros[1] += mark(&mut is_zero, 1, b);
    }

    let b1 = &s1.trace_fiber;
    let mut candidates2: Vec<u32> = b1.clone();
    field.sort_canonical(&mut candidates2);
    let admissible2: Vec<u32> = candidates2.iter().copied().filter(|&g| overlap(&is_zero, 2, g) == 0).collect();
    let broken = admissible2.len() < want2;
    let h2: Vec<u32> = if broken {
        // best effort: most new zeros first, canonical order on ties
        let mut ranked: Vec<(u64, usize, u32)> =
            candidates2.iter().enumerate().map(|(i, &g)| (overlap(&is_zero, 2, g), i, g)).collect();
        ranked.sort();
        ranked.iter().take(want2).map(|t| t.2).collect()
    } else {
        admissible2[..want2].to_vec()
    };
    for &g in &h2 {
        new_zeros[2] += mark(&mut is_zero, 2, g);
    }

    let zeros: u64 = new_zeros.iter().sum();
    let target_weight = degree_lower_bound(code)?.value;
    let built = ConstructedH {
        variant,
        h0,
        h1,
        h2,
        new_zeros,
        zeros,
        weight: n - zeros,
        target_weight,
    };
    let checked = weight_of_factored(code, &built.codeword())?;
    debug_assert_eq!(checked.zeros, zeros);
    let per_value = q * q;
    if broken {
        return Err(construction_error(
            "zeros of h_2 are disjoint from those of h_0 h_1",
            format!(
                "only {} of the {} values of x_2 in B_1 avoid earlier zeros, need {want2}; h_2 adds {} new zeros instead of {}",
                admissible2.len(),
                b1.len(),
                built.new_zeros[2],
                want2 as u64 * per_value
            ),
            Some(built),
        ));
    }
    if built.weight != target_weight {
        return Err(construction_error(
            "weight of h equals the degree bound",
            format!("weight {} but the degree bound is {target_weight}", built.weight),
            Some(built),
        ));
    }
    Ok(built)
}

/// Notes on readings of the construction that differ from a literal one.
pub fn construction_notes() -> Vec<String> {
    vec![
        "H_1 has q-1 elements (not q): the box bounds x_1 by q-1 and h_1 has q^2(q-1) zeros".into(),
        "zero count for the q = 2^(2l+1) code read as (q^2/2) q^2 + (q-1) q^2 + (q-2) q^2".into(),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LowerProvenance {
    DegreeBound,
    Exhaustive,
    ErasureRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperProvenance {
    ExplicitCodeword,
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceReport {
    pub n: usize,
    pub k: usize,
    pub d_lower: u64,
    pub lower_provenance: LowerProvenance,
    pub d_upper: Option<u64>,
    pub upper_provenance: Option<UpperProvenance>,
    pub exact: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl DistanceReport {
    pub fn new(code: &EvalCode, lower: (u64, LowerProvenance)) -> Self {
        DistanceReport {
            n: code.len(),
            k: code.dimension(),
            d_lower: lower.0,
            lower_provenance: lower.1,
            d_upper: None,
            upper_provenance: None,
            exact: false,
            notes: Vec::new(),
        }
    }

    /// Keeps the larger lower bound.
    pub fn raise_lower(&mut self, value: u64, provenance: LowerProvenance) {
        if value > self.d_lower {
            self.d_lower = value;
            self.lower_provenance = provenance;
        }
        self.refresh();
    }

    /// Keeps the smaller upper bound.
    pub fn lower_upper(&mut self, value: u64, provenance: UpperProvenance) {
        if self.d_upper.map_or(true, |u| value < u) {
            self.d_upper = Some(value);
            self.upper_provenance = Some(provenance);
        }
        self.refresh();
    }

    fn refresh(&mut self) {
        self.exact = self.d_upper == Some(self.d_lower);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Number of messages an exhaustive search visits, `|K|^k`.
pub fn exhaustive_cost(code: &EvalCode) -> u128 {
    let bits = code.field().degree() as u128 * code.dimension() as u128;
    if bits >= 127 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

/// Every codeword of the GF(2)-span as bit planes: `planes[s * words + w]`
/// holds bit `s` of the symbols at positions `64 w .. 64 w + 63`.
fn gf2_generators(code: &EvalCode) -> (Vec<Vec<u64>>, usize) {
    let field = code.field();
    let m = field.degree() as usize;
    let n = code.len();
    let words = n.div_ceil(64).max(1);
    let basis = code.basis_matrix();
    let mut gens = Vec::with_capacity(m * basis.rows());
    for r in 0..basis.rows() {
        for t in 0..m as u32 {
            let c = 1u32 << t;
            let mut planes = vec![0u64; m * words];
            for (p, &x) in basis.row(r).iter().enumerate() {
                let y = field.mul(c, x);
                for s in 0..m {
                    if y >> s & 1 == 1 {
                        planes[s * words + p / 64] |= 1 << (p % 64);
                    }
                }
            }
            gens.push(planes);
        }
    }
    (gens, words)
}

#[inline]
fn plane_weight(planes: &[u64], words: usize) -> u32 {
    let m = planes.len() / words;
    (0..words).map(|w| (0..m).fold(0u64, |acc, s| acc | planes[s * words + w]).count_ones()).sum()
}

/// Exact minimum distance by visiting every nonzero codeword in Gray-code
/// order, split by message prefix across threads.
pub fn exhaustive_min_distance(code: &EvalCode, budget: u128) -> Result<DistanceReport, DistanceError> {
    let required = exhaustive_cost(code);
    if required > budget {
        return Err(DistanceError::BudgetExceeded { required, budget });
    }
    let mut report = DistanceReport::new(code, (0, LowerProvenance::Exhaustive));
    if code.dimension() == 0 {
        report.notes.push("zero code".into());
        return Ok(report);
    }
    let (gens, words) = gf2_generators(code);
    let total = gens.len();
    let split = total.min(8);
    let low = total - split;
    let best = (0u64..1 << split)
        .into_par_iter()
        .map(|prefix| {
            let len = gens[0].len();
            let mut cur = vec![0u64; len];
            for (b, g) in gens[low..].iter().enumerate() {
                if prefix >> b & 1 == 1 {
                    cur.iter_mut().zip(g).for_each(|(c, x)| *c ^= x);
                }
            }
            let mut best = if prefix == 0 { u32::MAX } else { plane_weight(&cur, words) };
            for step in 1u64..(1u64 << low) {
                let g = &gens[step.trailing_zeros() as usize];
                cur.iter_mut().zip(g).for_each(|(c, x)| *c ^= x);
                let w = plane_weight(&cur, words);
                if w < best {
                    best = w;
                }
            }
            best
        })
        .min()
        .expect("at least one partition");
    report.d_lower = best as u64;
    report.d_upper = Some(best as u64);
    report.upper_provenance = Some(UpperProvenance::Exhaustive);
    report.exact = true;
    Ok(report)
}

/// Smallest weight among `trials` random nonzero codewords; `None` when no
/// codeword was drawn. Only an upper bound on the minimum distance.
pub fn sampled_weight_floor(code: &EvalCode, trials: u64, seed: u64) -> Option<u64> {
    const BLOCK: u64 = 1 << 14;
    let k = code.dimension();
    if trials == 0 || k == 0 {
        return None;
    }
    let size = code.field().size() as u32;
    let blocks = trials.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BLOCK.min(trials - b * BLOCK);
            let mut best: Option<u64> = None;
            let mut msg = vec![0u32; k];
            for _ in 0..count {
                loop {
                    msg.iter_mut().for_each(|x| *x = rng.gen_range(0..size));
                    if msg.iter().any(|&x| x != 0) {
                        break;
                    }
                }
                let w = weight(&code.encode(&msg).expect("message has length k")) as u64;
                best = Some(best.map_or(w, |b: u64| b.min(w)));
            }
            best
        })
        .min()
}

/// Whether every codeword has weight above `w`: equivalently, deleting any
/// `w` coordinates leaves a generator matrix of full rank. Returns the first
/// deleted set that drops the rank, if any.
pub fn find_low_weight_support(code: &EvalCode, w: usize) -> Option<Vec<usize>> {
    let n = code.len();
    let k = code.dimension();
    if w >= n {
        return Some((0..n).collect());
    }
    if n - w < k {
        return Some((0..w).collect());
    }
    let field = code.field();
    let basis = code.basis_matrix();
    let check = |deleted: &[usize]| -> bool {
        let keep: Vec<usize> = (0..n).filter(|i| !deleted.contains(i)).collect();
        linalg::rank(field, &basis.select_columns(&keep)) == k
    };
    if w == 0 {
        return if check(&[]) { None } else { Some(Vec::new()) };
    }
    (0..n).into_par_iter().find_map_first(|first| {
        let mut combo: Vec<usize> = (first..first + w).collect();
        if combo[w - 1] >= n {
            return None;
        }
        loop {
            if !check(&combo) {
                return Some(combo);
            }
            // advance positions 1..w, keeping combo[0] fixed
            let mut i = w - 1;
            loop {
                if i == 0 {
                    return None;
                }
                if combo[i] < n - (w - i) {
                    combo[i] += 1;
                    for j in i + 1..w {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
                i -= 1;
            }
        }
    })
}

/// Number of rank checks `find_low_weight_support` performs for `w`.
pub fn erasure_certificate_cost(n: usize, w: usize) -> u128 {
    (0..w).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Raises `d_lower` with erasure-rank certificates while the number of
/// rank checks for the next step stays within `budget`.
pub fn certify_lower_bound(code: &EvalCode, report: &mut DistanceReport, budget: u128) {
    while report.d_upper.map_or(true, |u| report.d_lower < u) {
        let w = report.d_lower as usize;
        if w >= code.len() || erasure_certificate_cost(code.len(), w) > budget {
            break;
        }
        match find_low_weight_support(code, w) {
            None => report.raise_lower(w as u64 + 1, LowerProvenance::ErasureRank),
            Some(_) => break,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evalcode::MonomialBox;
    use crate::tower::{TowerSpec, DEFAULT_PLACE_CAP};
    use std::sync::Arc;

    fn code(tower: TowerSpec, depth: usize, bounds: &[u32]) -> EvalCode {
        let set = Arc::new(Arc::new(tower).enumerate_places(depth, DEFAULT_PLACE_CAP).unwrap());
        EvalCode::new(set, MonomialBox::new(bounds.to_vec()).unwrap()).unwrap()
    }

    /// Minimum weight by plain enumeration of all messages over the field.
    fn brute_force_distance(code: &EvalCode) -> u64 {
        let q = code.field().size() as u32;
        let k = code.dimension();
        let mut best = u64::MAX;
        let total = (q as u64).pow(k as u32);
        for idx in 1..total {
            let mut x = idx;
            let msg: Vec<u32> = (0..k)
                .map(|_| {
                    let d = (x % q as u64) as u32;
                    x /= q as u64;
                    d
                })
                .collect();
            best = best.min(weight(&code.encode(&msg).unwrap()) as u64);
        }
        best
    }

    #[test]
    fn degree_bounds() {
        assert_eq!(degree_lower_bound(&code(TowerSpec::quadratic_f8(), 2, &[4, 1])).unwrap().value, 4);
        let b = degree_lower_bound(&code(TowerSpec::quadratic_f8(), 3, &[4, 1, 1])).unwrap();
        assert_eq!((b.value, b.raw, b.clamped), (0, 0, false));
        let b = degree_lower_bound(&code(TowerSpec::quadratic_f4(), 1, &[3])).unwrap();
        assert!(b.clamped);
    }

    #[test]
    fn exhaustive_agrees_with_brute_force() {
        for (tower, depth, bounds) in [
            (TowerSpec::quadratic_f4(), 2, vec![1, 1]),
            (TowerSpec::quadratic_f4(), 2, vec![1, 0, 1]),
            (TowerSpec::quadratic_f4(), 3, vec![0, 1, 1]),
            (TowerSpec::quadratic_f8(), 2, vec![2, 1]),
            (TowerSpec::quadratic_f8(), 2, vec![0]),
        ] {
            let c = code(tower, depth, &bounds);
            let r = exhaustive_min_distance(&c, DEFAULT_BUDGET).unwrap();
            assert!(r.exact);
            assert_eq!(r.d_lower, brute_force_distance(&c), "{bounds:?}");
        }
    }

    #[test]
    fn constant_code_has_full_weight() {
        let c = code(TowerSpec::quadratic_f8(), 2, &[0]);
        assert_eq!(exhaustive_min_distance(&c, 100).unwrap().d_upper, Some(24));
    }

    #[test]
    fn budget_is_enforced() {
        let c = code(TowerSpec::quadratic_f8(), 2, &[4, 1]);
        match exhaustive_min_distance(&c, 1000) {
            Err(DistanceError::BudgetExceeded { required, .. }) => assert_eq!(required, 1 << 30),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn factored_weights() {
        let c = code(TowerSpec::quadratic_f8(), 2, &[4, 1]);
        assert_eq!(weight_of_factored(&c, &FactoredCodeword::default()).unwrap().weight, 24);
        let f = FactoredCodeword::new(vec![(0, vec![3, 4, 5, 6, 7])]);
        assert!(matches!(weight_of_factored(&c, &f), Err(DistanceError::NotInBox { variable: 0, .. })));
        let f = FactoredCodeword::new(vec![(1, vec![2]), (0, vec![3, 4, 6, 7])]);
        assert_eq!(weight_of_factored(&c, &f).unwrap().zeros, 20);
    }

    #[test]
    fn sampling_dominates_minimum() {
        let c = code(TowerSpec::quadratic_f4(), 2, &[1, 1]);
        assert_eq!(sampled_weight_floor(&c, 0, 1), None);
        let s = sampled_weight_floor(&c, 5000, 1).unwrap();
        assert_eq!(s, 2);
        assert_eq!(sampled_weight_floor(&c, 5000, 1), sampled_weight_floor(&c, 5000, 1));
    }

    #[test]
    fn erasure_certificate_matches_exhaustive() {
        let c = code(TowerSpec::quadratic_f8(), 2, &[3, 1]);
        let d = exhaustive_min_distance(&c, DEFAULT_BUDGET).unwrap().d_lower as usize;
        assert!(find_low_weight_support(&c, d - 1).is_none());
        let support = find_low_weight_support(&c, d).unwrap();
        assert_eq!(support.len(), d);
        let mut report = DistanceReport::new(&c, (degree_lower_bound(&c).unwrap().value, LowerProvenance::DegreeBound));
        report.lower_upper(d as u64, UpperProvenance::Exhaustive);
        certify_lower_bound(&c, &mut report, 1 << 20);
        assert!(report.exact);
        assert_eq!(report.d_lower, d as u64);
        assert_eq!(erasure_certificate_cost(48, 3), 17296);
    }

    #[test]
    fn construct_h_rejects_small_q() {
        let c = code(TowerSpec::garcia_stichtenoth(4).unwrap(), 2, &[4, 3, 2]);
        match construct_h(&c, HVariant::Thm34) {
            Err(DistanceError::Construction(e)) => assert!(e.claim.contains("> q")),
            other => panic!("unexpected {other:?}"),
        }
        let f = code(TowerSpec::quadratic_f8(), 2, &[4, 1]);
        assert!(matches!(construct_h(&f, HVariant::Thm34), Err(DistanceError::Unsupported(_))));
    }

    #[test]
    fn report_json_and_bookkeeping() {
        let c = code(TowerSpec::quadratic_f8(), 2, &[4, 1]);
        let mut r = DistanceReport::new(&c, (4, LowerProvenance::DegreeBound));
        assert!(!r.exact);
        r.lower_upper(6, UpperProvenance::Sampled);
        r.lower_upper(4, UpperProvenance::ExplicitCodeword);
        r.lower_upper(5, UpperProvenance::Sampled);
        assert!(r.exact);
        assert_eq!(r.upper_provenance, Some(UpperProvenance::ExplicitCodeword));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["lower_provenance"], "degree-bound");
        assert_eq!(v["upper_provenance"], "explicit-codeword");
    }
}
