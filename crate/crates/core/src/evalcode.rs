//! Evaluation codes `C(B, V)`: the span `V` of a monomial box in the tower
//! coordinates, evaluated at the ordered place set `B`.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::galois::{Field, GaloisError};
use crate::linalg::{greedy_row_basis, Matrix, RowBasis};
use crate::poly;
use crate::tower::{Place, PlaceSet, TowerError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalCodeError {
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error("box has {len} variables but places only have {coords} coordinates")]
    BoxTooLong { len: usize, coords: usize },
    #[error("a monomial box needs at least one variable")]
    EmptyBox,
    #[error("expected a vector of length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("position {0} is out of range")]
    PositionOutOfRange(usize),
    #[error("position {position}: not enough surviving symbols in its recovery set {fiber:?}")]
    InsufficientRepairData { position: usize, fiber: Vec<usize> },
    #[error("position {position}: repeated interpolation node in its recovery set")]
    DuplicateNode { position: usize },
    #[error("locality undefined: {0}")]
    LocalityUndefined(String),
    #[error("box {sub} does not list a prefix of the monomials of {parent}")]
    NotAPrefix { sub: MonomialBox, parent: MonomialBox },
}

/// Exponent bounds `(E_0, ..., E_t)`, inclusive, on the coordinates
/// `x_0, ..., x_t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MonomialBox {
    bounds: Vec<u32>,
}

impl fmt::Display for MonomialBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bounds.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl MonomialBox {
    pub fn new(bounds: Vec<u32>) -> Result<MonomialBox, EvalCodeError> {
        if bounds.is_empty() {
            return Err(EvalCodeError::EmptyBox);
        }
        Ok(MonomialBox { bounds })
    }

    pub fn bounds(&self) -> &[u32] {
        &self.bounds
    }

    /// Number of coordinates the box ranges over.
    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates with a positive exponent bound.
    pub fn active_variables(&self) -> Vec<usize> {
        (0..self.bounds.len()).filter(|&i| self.bounds[i] > 0).collect()
    }

    /// `prod (E_i + 1)`.
    pub fn nominal_dimension(&self) -> usize {
        self.bounds.iter().map(|&e| e as usize + 1).product()
    }

    /// Exponent tuples in lexicographic order, `e_0` most significant.
    pub fn monomials(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::with_capacity(self.nominal_dimension());
        let mut cur = vec![0u32; self.bounds.len()];
        loop {
            out.push(cur.clone());
            let mut i = self.bounds.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < self.bounds[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 0;
            }
        }
    }

    /// Whether the monomials of `self` are the first rows of those of `parent`.
    pub fn is_prefix_of(&self, parent: &MonomialBox) -> bool {
        self.bounds.len() == parent.bounds.len()
            && self.bounds[1..] == parent.bounds[1..]
            && self.bounds[0] <= parent.bounds[0]
    }
}

/// `prod x_i(P)^e_i` with `0^0 = 1`.
pub fn evaluate(field: &Field, exps: &[u32], place: &Place) -> u32 {
    assert!(exps.len() <= place.coords.len(), "exponent tuple longer than the place");
    exps.iter().zip(&place.coords).fold(1, |acc, (&e, &x)| field.mul(acc, field.pow(x, e as u64)))
}

/// One row per monomial, one column per place.
pub fn generator_matrix(places: &PlaceSet, bx: &MonomialBox) -> Result<Matrix, EvalCodeError> {
    let coords = places.depth() + 1;
    if bx.len() > coords {
        return Err(EvalCodeError::BoxTooLong { len: bx.len(), coords });
    }
    let field = places.field();
    let n = places.len();
    // powers[i][e][p] = x_i(P_p)^e
    let powers: Vec<Vec<Vec<u32>>> = bx
        .bounds()
        .iter()
        .enumerate()
        .map(|(i, &e_max)| {
            let mut table = vec![vec![1u32; n]];
            for e in 1..=e_max as usize {
                let next = table[e - 1].iter().zip(places.places()).map(|(&v, p)| field.mul(v, p.coords[i])).collect();
                table.push(next);
            }
            table
        })
        .collect();
    let monomials = bx.monomials();
    let mut m = Matrix::zeros(monomials.len(), n);
    let cols = n.max(1);
    m.as_flat_mut().par_chunks_mut(cols).zip(monomials.par_iter()).for_each(|(row, exps)| {
        row.iter_mut().for_each(|v| *v = 1);
        for (i, &e) in exps.iter().enumerate() {
            if e > 0 {
                let pw = &powers[i][e as usize];
                row.iter_mut().zip(pw).for_each(|(v, &x)| *v = field.mul(*v, x));
            }
        }
    });
    Ok(m)
}

/// How a single erased symbol is rebuilt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RepairRule {
    /// Lagrange interpolation in `x_variable` over the places sharing all
    /// earlier coordinates; the restriction has degree at most `degree`.
    Interpolation { variable: usize, degree: u32 },
    /// Codewords are constant on places agreeing on `key`; read one partner.
    Copy { key: Vec<usize> },
}

/// Recovery sets for every coordinate.
#[derive(Debug, Clone)]
pub struct RepairIndex {
    rule: RepairRule,
    groups: Vec<Vec<usize>>,
    group_of: Vec<usize>,
}

impl RepairIndex {
    fn build(places: &PlaceSet, bx: &MonomialBox) -> Result<RepairIndex, EvalCodeError> {
        let depth = places.depth();
        let q_loc = places.tower().q_loc();
        let last = bx.len() - 1;
        let interpolates = last == depth && bx.bounds()[last] > 0 && u64::from(bx.bounds()[last]) + 2 <= q_loc;
        let rule = if interpolates {
            RepairRule::Interpolation { variable: last, degree: bx.bounds()[last] }
        } else {
            RepairRule::Copy { key: bx.active_variables() }
        };
        let groups = match &rule {
            RepairRule::Interpolation { variable, .. } => places.classes_by(&(0..*variable).collect::<Vec<_>>()),
            RepairRule::Copy { key } => places.classes_by(key),
        };
        if let Some(g) = groups.iter().find(|g| g.len() < 2) {
            return Err(EvalCodeError::LocalityUndefined(format!(
                "box {bx} is neither interpolable in x_{last} nor constant on any class; place {} has no recovery set",
                g[0]
            )));
        }
        let mut group_of = vec![0; places.len()];
        for (gi, g) in groups.iter().enumerate() {
            for &p in g {
                group_of[p] = gi;
            }
        }
        Ok(RepairIndex { rule, groups, group_of })
    }

    pub fn rule(&self) -> &RepairRule {
        &self.rule
    }

    /// Classes of mutually recovering positions.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    /// The recovery set `A_i` of position `i`.
    pub fn fiber(&self, i: usize) -> Vec<usize> {
        self.groups[self.group_of[i]].iter().copied().filter(|&p| p != i).collect()
    }

    /// Number of symbols read by a repair.
    pub fn locality(&self) -> usize {
        match self.rule {
            RepairRule::Copy { .. } => 1,
            RepairRule::Interpolation { .. } => self.groups.iter().map(|g| g.len() - 1).max().unwrap_or(0),
        }
    }
}

/// A received word with erased positions, and the one to rebuild.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePattern {
    pub symbols: Vec<Option<u32>>,
    pub target: usize,
}

impl ErasurePattern {
    pub fn single(codeword: &[u32], position: usize) -> ErasurePattern {
        let mut symbols: Vec<Option<u32>> = codeword.iter().copied().map(Some).collect();
        if let Some(s) = symbols.get_mut(position) {
            *s = None;
        }
        ErasurePattern { symbols, target: position }
    }

    /// Erases one more position without changing the target.
    pub fn erase(mut self, position: usize) -> ErasurePattern {
        if let Some(s) = self.symbols.get_mut(position) {
            *s = None;
        }
        self
    }
}

/// An evaluation code with its generator matrix, greedy row basis and
/// repair structure.
#[derive(Debug, Clone)]
pub struct EvalCode {
    places: Arc<PlaceSet>,
    bx: MonomialBox,
    generator: Arc<Matrix>,
    nominal_rows: usize,
    basis: RowBasis,
    basis_matrix: Matrix,
    repair: RepairIndex,
    d_lower: Option<u64>,
    d_upper: Option<u64>,
}

impl EvalCode {
    pub fn new(places: Arc<PlaceSet>, bx: MonomialBox) -> Result<EvalCode, EvalCodeError> {
        let generator = generator_matrix(&places, &bx)?;
        let basis = greedy_row_basis(places.field(), &generator);
        let basis_matrix = generator.select_rows(&basis.independent);
        let repair = RepairIndex::build(&places, &bx)?;
        let nominal_rows = generator.rows();
        Ok(EvalCode {
            places,
            bx,
            generator: Arc::new(generator),
            nominal_rows,
            basis,
            basis_matrix,
            repair,
            d_lower: None,
            d_upper: None,
        })
    }

    /// The code of a sub-box whose monomials are a prefix of this code's,
    /// reusing the generator matrix and the greedy basis.
    pub fn prefix_subcode(&self, bx: MonomialBox) -> Result<EvalCode, EvalCodeError> {
        if !bx.is_prefix_of(&self.bx) {
            return Err(EvalCodeError::NotAPrefix { sub: bx, parent: self.bx.clone() });
        }
        let rows = bx.nominal_dimension();
        let independent: Vec<usize> = self.basis.independent.iter().copied().filter(|&i| i < rows).collect();
        let basis = RowBasis { prefix_ranks: self.basis.prefix_ranks[..rows].to_vec(), independent };
        let basis_matrix = self.basis_matrix.top_rows(basis.rank());
        let repair = RepairIndex::build(&self.places, &bx)?;
        Ok(EvalCode {
            places: Arc::clone(&self.places),
            bx,
            generator: Arc::clone(&self.generator),
            nominal_rows: rows,
            basis,
            basis_matrix,
            repair,
            d_lower: None,
            d_upper: None,
        })
    }

    pub fn places(&self) -> &Arc<PlaceSet> {
        &self.places
    }

    pub fn field(&self) -> &Field {
        self.places.field()
    }

    pub fn monomial_box(&self) -> &MonomialBox {
        &self.bx
    }

    /// All box monomials as rows, including dependent ones.
    pub fn generator_matrix(&self) -> Matrix {
        self.generator.top_rows(self.nominal_rows)
    }

    /// The independent rows, `k x n`.
    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis_matrix
    }

    /// Indices of the box monomials kept in the basis.
    pub fn basis_rows(&self) -> &[usize] {
        &self.basis.independent
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn nominal_dimension(&self) -> usize {
        self.nominal_rows
    }

    pub fn dimension(&self) -> usize {
        self.basis.rank()
    }

    pub fn repair_index(&self) -> &RepairIndex {
        &self.repair
    }

    pub fn locality(&self) -> usize {
        self.repair.locality()
    }

    pub fn distance_bounds(&self) -> (Option<u64>, Option<u64>) {
        (self.d_lower, self.d_upper)
    }

    pub fn set_distance_bounds(&mut self, lower: Option<u64>, upper: Option<u64>) {
        self.d_lower = lower;
        self.d_upper = upper;
    }

    pub fn encode(&self, message: &[u32]) -> Result<Vec<u32>, EvalCodeError> {
        if message.len() != self.dimension() {
            return Err(EvalCodeError::LengthMismatch { expected: self.dimension(), got: message.len() });
        }
        for &s in message {
            self.field().elem(s)?;
        }
        Ok(self.basis_matrix.left_mul(self.field(), message))
    }

    /// Evaluation vector of `sum c_e x^e` given coefficients for every box
    /// monomial in order.
    pub fn evaluate_coefficients(&self, coeffs: &[u32]) -> Result<Vec<u32>, EvalCodeError> {
        if coeffs.len() != self.nominal_rows {
            return Err(EvalCodeError::LengthMismatch { expected: self.nominal_rows, got: coeffs.len() });
        }
        let mut out = vec![0u32; self.len()];
        for (i, &c) in coeffs.iter().enumerate() {
            self.field().mul_add_assign(&mut out, self.generator.row(i), c);
        }
        Ok(out)
    }

    pub fn repair(&self, pattern: &ErasurePattern) -> Result<u32, EvalCodeError> {
        if pattern.symbols.len() != self.len() {
            return Err(EvalCodeError::LengthMismatch { expected: self.len(), got: pattern.symbols.len() });
        }
        let i = pattern.target;
        if i >= self.len() {
            return Err(EvalCodeError::PositionOutOfRange(i));
        }
        let fiber = self.repair.fiber(i);
        let known: Vec<(usize, u32)> =
            fiber.iter().filter_map(|&p| pattern.symbols[p].map(|s| (p, s))).collect();
        match &self.repair.rule {
            RepairRule::Copy { .. } => match known.first() {
                Some(&(_, s)) => Ok(s),
                None => Err(EvalCodeError::InsufficientRepairData { position: i, fiber }),
            },
            RepairRule::Interpolation { variable, degree } => {
                if known.len() < *degree as usize + 1 {
                    return Err(EvalCodeError::InsufficientRepairData { position: i, fiber });
                }
                let xs: Vec<u32> = known.iter().map(|&(p, _)| self.places.get(p).coords[*variable]).collect();
                let ys: Vec<u32> = known.iter().map(|&(_, s)| s).collect();
                let at = self.places.get(i).coords[*variable];
                if xs.contains(&at) {
                    return Err(EvalCodeError::DuplicateNode { position: i });
                }
                poly::lagrange_eval(self.field(), &xs, &ys, at).map_err(|_| EvalCodeError::DuplicateNode { position: i })
            }
        }
    }

    /// Whether `word` takes a single value on every recovery class.
    pub fn is_constant_on_groups(&self, word: &[u32]) -> bool {
        self.repair.groups().iter().all(|g| g.iter().all(|&p| word[p] == word[g[0]]))
    }
}

/// Hamming weight.
pub fn weight(word: &[u32]) -> usize {
    word.iter().filter(|&&x| x != 0).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::{TowerSpec, DEFAULT_PLACE_CAP};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn places(tower: TowerSpec, depth: usize) -> Arc<PlaceSet> {
        Arc::new(Arc::new(tower).enumerate_places(depth, DEFAULT_PLACE_CAP).unwrap())
    }

    fn code(tower: TowerSpec, depth: usize, bounds: &[u32]) -> EvalCode {
        EvalCode::new(places(tower, depth), MonomialBox::new(bounds.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn monomial_order() {
        let b = MonomialBox::new(vec![1, 1]).unwrap();
        assert_eq!(b.monomials(), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(MonomialBox::new(vec![0]).unwrap().monomials(), vec![vec![0]]);
        assert_eq!(MonomialBox::new(vec![4, 1, 1]).unwrap().monomials().len(), 20);
        assert!(MonomialBox::new(vec![]).is_err());
        let parent = MonomialBox::new(vec![32, 7, 6]).unwrap();
        let sub = MonomialBox::new(vec![5, 7, 6]).unwrap();
        assert!(sub.is_prefix_of(&parent));
        assert_eq!(parent.monomials()[..sub.nominal_dimension()], sub.monomials()[..]);
        assert!(!MonomialBox::new(vec![5, 6, 6]).unwrap().is_prefix_of(&parent));
    }

    #[test]
    fn evaluate_basics() {
        let set = places(TowerSpec::quadratic_f8(), 2);
        let f = set.field();
        for p in set.places() {
            assert_eq!(evaluate(f, &[0, 0, 0], p), 1);
            assert_eq!(evaluate(f, &[1], p), p.coords[0]);
        }
    }

    #[test]
    fn x0_is_constant_on_gs_fibers() {
        let set = places(TowerSpec::garcia_stichtenoth(8).unwrap(), 2);
        let f = set.field();
        for p in set.places() {
            for k in set.recovery_fiber(&p.coords).unwrap() {
                assert_eq!(evaluate(f, &[1, 0, 0], p), evaluate(f, &[1, 0, 0], set.get(k)));
            }
        }
    }

    #[test]
    fn small_code_ranks() {
        let c = code(TowerSpec::quadratic_f4(), 2, &[1, 1]);
        assert_eq!((c.len(), c.dimension()), (8, 4));
        assert_eq!(c.locality(), 1);
        let c = code(TowerSpec::quadratic_f8(), 2, &[4, 1]);
        assert_eq!((c.len(), c.dimension()), (24, 10));
        let c = code(TowerSpec::quadratic_f8(), 2, &[0]);
        assert_eq!(c.generator_matrix().row(0), vec![1u32; 24].as_slice());
        assert_eq!(c.dimension(), 1);
    }

    #[test]
    fn dependent_box_is_detected() {
        // x_0 takes only two values over F_4, so x_0^2 is a combination of 1, x_0
        let c = code(TowerSpec::quadratic_f4(), 1, &[2]);
        assert_eq!(c.nominal_dimension(), 3);
        assert_eq!(c.dimension(), 2);
        assert_eq!(c.basis_rows(), &[0, 1]);
    }

    #[test]
    fn encode_is_linear() {
        let c = code(TowerSpec::quadratic_f8(), 2, &[4, 1]);
        let f = c.field();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let m1: Vec<u32> = (0..10).map(|_| rng.gen_range(0..8)).collect();
            let m2: Vec<u32> = (0..10).map(|_| rng.gen_range(0..8)).collect();
            let a = rng.gen_range(0..8);
            let mix: Vec<u32> = m1.iter().zip(&m2).map(|(&x, &y)| f.mul(a, x) ^ y).collect();
            let lhs = c.encode(&mix).unwrap();
            let (c1, c2) = (c.encode(&m1).unwrap(), c.encode(&m2).unwrap());
            let rhs: Vec<u32> = c1.iter().zip(&c2).map(|(&x, &y)| f.mul(a, x) ^ y).collect();
            assert_eq!(lhs, rhs);
        }
        assert!(c.encode(&[0; 10]).unwrap().iter().all(|&x| x == 0));
        let mut e1 = vec![0; 10];
        e1[0] = 1;
        assert_eq!(c.encode(&e1).unwrap(), c.basis_matrix().row(0));
        assert!(matches!(c.encode(&[0; 9]), Err(EvalCodeError::LengthMismatch { .. })));
    }

    #[test]
    fn repair_on_small_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (tower, depth, bounds) in [
            (TowerSpec::quadratic_f4(), 2, vec![1, 1]),
            (TowerSpec::quadratic_f4(), 2, vec![1, 0, 1]),
            (TowerSpec::quadratic_f8(), 2, vec![4, 1]),
            (TowerSpec::quadratic_f8(), 3, vec![4, 1, 1]),
            (TowerSpec::garcia_stichtenoth(4).unwrap(), 2, vec![4, 3, 2]),
        ] {
            let c = code(tower, depth, &bounds);
            let size = c.field().size() as u32;
            for _ in 0..20 {
                let msg: Vec<u32> = (0..c.dimension()).map(|_| rng.gen_range(0..size)).collect();
                let word = c.encode(&msg).unwrap();
                for i in 0..c.len() {
                    assert_eq!(c.repair(&ErasurePattern::single(&word, i)).unwrap(), word[i], "{bounds:?} at {i}");
                }
            }
        }
    }

    #[test]
    fn gs_locality_and_rule() {
        let c = code(TowerSpec::garcia_stichtenoth(4).unwrap(), 2, &[4, 3, 2]);
        assert_eq!(c.locality(), 3);
        assert_eq!(c.repair_index().rule(), &RepairRule::Interpolation { variable: 2, degree: 2 });
        let set = places(TowerSpec::garcia_stichtenoth(4).unwrap(), 2);
        let err = EvalCode::new(set, MonomialBox::new(vec![1, 1, 3]).unwrap()).unwrap_err();
        assert!(matches!(err, EvalCodeError::LocalityUndefined(_)));
    }

    #[test]
    fn rem42b_pairs_differ_in_middle_coordinate() {
        let c = code(TowerSpec::quadratic_f4(), 2, &[1, 0, 1]);
        assert_eq!(c.repair_index().rule(), &RepairRule::Copy { key: vec![0, 2] });
        for g in c.repair_index().groups() {
            assert_eq!(g.len(), 2);
            let (a, b) = (&c.places().get(g[0]).coords, &c.places().get(g[1]).coords);
            assert_eq!((a[0], a[2]), (b[0], b[2]));
            assert_ne!(a[1], b[1]);
        }
    }

    #[test]
    fn missing_partner_is_reported() {
        let c = code(TowerSpec::quadratic_f4(), 2, &[1, 1]);
        let word = c.encode(&[1, 2, 3, 1]).unwrap();
        let partner = c.repair_index().fiber(0)[0];
        let pattern = ErasurePattern::single(&word, 0).erase(partner);
        assert!(matches!(c.repair(&pattern), Err(EvalCodeError::InsufficientRepairData { position: 0, .. })));

        let g = code(TowerSpec::garcia_stichtenoth(4).unwrap(), 2, &[4, 3, 2]);
        let word = vec![0; g.len()];
        let fiber = g.repair_index().fiber(5);
        let pattern = ErasurePattern::single(&word, 5).erase(fiber[0]);
        assert!(matches!(g.repair(&pattern), Err(EvalCodeError::InsufficientRepairData { .. })));
        assert_eq!(g.repair(&ErasurePattern::single(&word, 5)).unwrap(), 0);
    }

    #[test]
    fn prefix_subcode_matches_direct_build() {
        let set = places(TowerSpec::garcia_stichtenoth(4).unwrap(), 2);
        let parent = EvalCode::new(Arc::clone(&set), MonomialBox::new(vec![6, 3, 2]).unwrap()).unwrap();
        for l in 0..=6 {
            let bx = MonomialBox::new(vec![l, 3, 2]).unwrap();
            let sub = parent.prefix_subcode(bx.clone()).unwrap();
            let direct = EvalCode::new(Arc::clone(&set), bx).unwrap();
            assert_eq!(sub.dimension(), direct.dimension());
            assert_eq!(sub.basis_matrix(), direct.basis_matrix());
            assert_eq!(sub.generator_matrix(), direct.generator_matrix());
        }
        assert!(parent.prefix_subcode(MonomialBox::new(vec![1, 2, 2]).unwrap()).is_err());
    }

    #[test]
    fn fiber_constancy_when_last_variable_is_omitted() {
        let c = code(TowerSpec::quadratic_f8(), 3, &[4, 1, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let msg: Vec<u32> = (0..c.dimension()).map(|_| rng.gen_range(0..8)).collect();
            assert!(c.is_constant_on_groups(&c.encode(&msg).unwrap()));
        }
    }
}
