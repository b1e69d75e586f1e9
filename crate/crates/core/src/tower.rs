//! Recursive Artin-Schreier towers and their completely splitting places.
//!
//! A tower is given by a constant field `K`, an additive left-hand side
//! `y^q_loc + y` and a rational right-hand side `rho`, so that level `i + 1`
//! is cut out by `x_{i+1}^q_loc + x_{i+1} = rho(x_i)`. Only rational places
//! lying over a declared splitting set are ever materialized, each as its
//! coordinate tuple `(x_0(P), ..., x_j(P))`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::galois::{Field, GaloisError, SubfieldView};
use crate::poly;

/// Default ceiling on the number of places `enumerate_places` will build.
pub const DEFAULT_PLACE_CAP: u64 = 1 << 22;

/// Depths for which the built-in towers declare pole degrees.
pub const DECLARED_DEPTHS: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error("{element:#x} does not split completely at depth {depth}: {roots} roots instead of {expected}")]
    NotSplitting { element: u32, depth: usize, roots: usize, expected: u64 },
    #[error("right-hand side has a pole at {element:#x} (depth {depth})")]
    Pole { element: u32, depth: usize },
    #[error("enumeration would produce {expected} places, above the cap of {cap}")]
    CapExceeded { expected: u64, cap: u64 },
    #[error("depth must be at least 1")]
    ZeroDepth,
    #[error("place {0:?} is not in the enumerated set")]
    UnknownPlace(Vec<u32>),
    #[error("color is undefined at {0:#x}: its trace is zero")]
    ZeroTrace(u32),
    #[error("lift {lift:#x} of {element:#x} leaves the splitting set; no splitting digraph")]
    NotClosed { element: u32, lift: u32 },
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
}

/// `rho(x) = num(x) / den(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMap {
    num: Vec<u32>,
    den: Vec<u32>,
}

impl RationalMap {
    pub fn new(num: Vec<u32>, den: Vec<u32>) -> Self {
        RationalMap { num, den }
    }

    pub fn polynomial(num: Vec<u32>) -> Self {
        RationalMap { num, den: vec![1] }
    }

    /// `None` at a pole.
    pub fn eval(&self, field: &Field, x: u32) -> Option<u32> {
        let d = poly::eval(field, &self.den, x);
        if d == 0 {
            return None;
        }
        Some(field.mul(poly::eval(field, &self.num, x), field.inv(d).ok()?))
    }

    /// Finite poles in the constant field.
    pub fn poles(&self, field: &Field) -> Vec<u32> {
        field.elements().into_iter().filter(|&x| poly::eval(field, &self.den, x) == 0).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TowerKind {
    /// `x_{i+1}^q + x_{i+1} = x_i^q / (x_i^(q-1) + 1)` over GF(q^2).
    GarciaStichtenoth { q: u64 },
    /// `x_i^2 + x_i = x_{i-1}^2 / (x_{i-1} + 1)` over GF(4).
    QuadraticF4,
    /// `x_{i+1}^2 + x_{i+1} = x_i + 1 + 1/x_i` over GF(8).
    QuadraticF8,
    Custom,
}

#[derive(Debug, Clone)]
pub struct TowerSpec {
    name: String,
    kind: TowerKind,
    field: Arc<Field>,
    q_loc: u64,
    rhs: RationalMap,
    split_base: Vec<u32>,
    pole_degrees: BTreeMap<usize, Vec<u64>>,
}

fn uniform_pole_degrees(q_loc: u64) -> BTreeMap<usize, Vec<u64>> {
    (1..=DECLARED_DEPTHS).map(|j| (j, vec![q_loc.pow(j as u32); j + 1])).collect()
}

impl TowerSpec {
    /// A user-defined tower. The splitting set must be declared; it is
    /// verified, never discovered.
    pub fn custom(
        name: impl Into<String>,
        field: Arc<Field>,
        q_loc: u64,
        rhs: RationalMap,
        mut split_base: Vec<u32>,
        pole_degrees: BTreeMap<usize, Vec<u64>>,
    ) -> Result<TowerSpec, TowerError> {
        // validates q_loc against the field
        field.linearized_roots(q_loc, 0)?;
        for &b in &split_base {
            field.elem(b)?;
        }
        field.sort_canonical(&mut split_base);
        split_base.dedup();
        Ok(TowerSpec { name: name.into(), kind: TowerKind::Custom, field, q_loc, rhs, split_base, pole_degrees })
    }

    /// The Garcia-Stichtenoth tower over GF(q^2), q a power of two.
    pub fn garcia_stichtenoth(q: u64) -> Result<TowerSpec, TowerError> {
        if q < 2 || !q.is_power_of_two() || q > 1 << 10 {
            return Err(TowerError::Unsupported(format!("q = {q} must be a power of two in 2..=1024")));
        }
        let field = Arc::new(Field::with_degree(2 * q.trailing_zeros())?);
        let q_usize = q as usize;
        let mut num = vec![0u32; q_usize + 1];
        num[q_usize] = 1;
        let mut den = vec![0u32; q_usize];
        den[0] = 1;
        den[q_usize - 1] ^= 1;
        let split_base = field.subfield(q)?.split_set();
        Ok(TowerSpec {
            name: format!("gs-q{q}"),
            kind: TowerKind::GarciaStichtenoth { q },
            rhs: RationalMap::new(num, den),
            field,
            q_loc: q,
            split_base,
            pole_degrees: uniform_pole_degrees(q),
        })
    }

    /// The quadratic tower over GF(4) with splitting set `{a, a + 1}`,
    /// `a^2 + a + 1 = 0`.
    pub fn quadratic_f4() -> TowerSpec {
        let field = Arc::new(Field::new(2, Some(0b111)).expect("x^2+x+1 is irreducible"));
        let a = field.generator();
        let mut split_base = vec![a, a ^ 1];
        field.sort_canonical(&mut split_base);
        TowerSpec {
            name: "f4".into(),
            kind: TowerKind::QuadraticF4,
            field,
            q_loc: 2,
            rhs: RationalMap::new(vec![0, 0, 1], vec![1, 1]),
            split_base,
            pole_degrees: uniform_pole_degrees(2),
        }
    }

    /// The quadratic tower over GF(8) = GF(2)(b), `b^3 = b + 1`, with
    /// splitting set GF(8) minus GF(2).
    pub fn quadratic_f8() -> TowerSpec {
        let field = Arc::new(Field::new(3, Some(0b1011)).expect("x^3+x+1 is irreducible"));
        let split_base = field.elements().into_iter().filter(|&x| x > 1).collect();
        TowerSpec {
            name: "f8".into(),
            kind: TowerKind::QuadraticF8,
            field,
            q_loc: 2,
            rhs: RationalMap::new(vec![1, 1, 1], vec![0, 1]),
            split_base,
            pole_degrees: uniform_pole_degrees(2),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> TowerKind {
        self.kind
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn q_loc(&self) -> u64 {
        self.q_loc
    }

    pub fn rhs(&self) -> &RationalMap {
        &self.rhs
    }

    /// Declared splitting set, unverified.
    pub fn declared_split_base(&self) -> &[u32] {
        &self.split_base
    }

    /// Declared pole degrees `deg(x_0), ..., deg(x_j)` inside level `depth`.
    pub fn pole_degrees(&self, depth: usize) -> Option<&[u64]> {
        self.pole_degrees.get(&depth).map(Vec::as_slice)
    }

    /// All `y` with `y^q_loc + y = rho(x)`; errors if `x` is a pole or the
    /// equation does not have exactly `q_loc` roots.
    pub fn lifts(&self, x: u32, depth: usize) -> Result<Vec<u32>, TowerError> {
        let r = self.rhs.eval(&self.field, x).ok_or(TowerError::Pole { element: x, depth })?;
        let roots = self.field.linearized_roots(self.q_loc, r)?;
        if roots.len() as u64 != self.q_loc {
            return Err(TowerError::NotSplitting { element: x, depth, roots: roots.len(), expected: self.q_loc });
        }
        Ok(roots)
    }

    /// The declared splitting set, after checking that every element splits
    /// completely through `depth` levels.
    pub fn split_base(&self, depth: usize) -> Result<Vec<u32>, TowerError> {
        let mut cache = HashMap::new();
        for &b in &self.split_base {
            let mut frontier = vec![b];
            for level in 1..=depth {
                let mut next = Vec::new();
                for &x in &frontier {
                    next.extend_from_slice(self.cached_lifts(&mut cache, x, level)?);
                }
                frontier = next;
            }
        }
        Ok(self.split_base.clone())
    }

    fn cached_lifts<'c>(
        &self,
        cache: &'c mut HashMap<u32, Vec<u32>>,
        x: u32,
        depth: usize,
    ) -> Result<&'c Vec<u32>, TowerError> {
        if !cache.contains_key(&x) {
            let l = self.lifts(x, depth)?;
            cache.insert(x, l);
        }
        Ok(&cache[&x])
    }

    /// Number of places at `depth`: `|split base| * q_loc^depth`.
    pub fn expected_place_count(&self, depth: usize) -> u64 {
        (self.split_base.len() as u64).saturating_mul(self.q_loc.saturating_pow(depth as u32))
    }

    /// Enumerates every place of level `depth` over the splitting set, in
    /// lexicographic order of coordinate tuples under the canonical element
    /// order.
    pub fn enumerate_places(self: &Arc<Self>, depth: usize, cap: u64) -> Result<PlaceSet, TowerError> {
        if depth == 0 {
            return Err(TowerError::ZeroDepth);
        }
        let expected = self.expected_place_count(depth);
        if expected > cap {
            return Err(TowerError::CapExceeded { expected, cap });
        }
        let mut cache = HashMap::new();
        let mut places = Vec::with_capacity(expected as usize);
        let mut stack: Vec<Vec<u32>> = self.split_base.iter().rev().map(|&b| vec![b]).collect();
        while let Some(prefix) = stack.pop() {
            if prefix.len() == depth + 1 {
                places.push(Place { index: places.len(), coords: prefix });
                continue;
            }
            let last = *prefix.last().expect("nonempty");
            let lifts = self.cached_lifts(&mut cache, last, prefix.len())?;
            for &y in lifts.iter().rev() {
                let mut next = prefix.clone();
                next.push(y);
                stack.push(next);
            }
        }
        let index = places.iter().map(|p| (p.coords.clone(), p.index)).collect();
        Ok(PlaceSet { tower: Arc::clone(self), depth, places, index })
    }

    /// The splitting digraph: vertices are the splitting set, with an edge
    /// `a -> b` whenever `b` is a lift of `a`.
    pub fn split_graph(&self) -> Result<SplitGraph, TowerError> {
        let vertices = self.split_base.clone();
        let mut edges = Vec::new();
        for &a in &vertices {
            for b in self.lifts(a, 1)? {
                if !vertices.contains(&b) {
                    return Err(TowerError::NotClosed { element: a, lift: b });
                }
                edges.push((a, b));
            }
        }
        Ok(SplitGraph { vertices, edges })
    }
}

/// A completely splitting rational place, as its coordinate tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Place {
    pub index: usize,
    pub coords: Vec<u32>,
}

impl Place {
    pub fn depth(&self) -> usize {
        self.coords.len() - 1
    }
}

/// The ordered set `B` of places at one depth.
#[derive(Debug, Clone)]
pub struct PlaceSet {
    tower: Arc<TowerSpec>,
    depth: usize,
    places: Vec<Place>,
    index: HashMap<Vec<u32>, usize>,
}

impl PlaceSet {
    pub fn tower(&self) -> &Arc<TowerSpec> {
        &self.tower
    }

    pub fn field(&self) -> &Field {
        &self.tower.field
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn get(&self, i: usize) -> &Place {
        &self.places[i]
    }

    pub fn position(&self, coords: &[u32]) -> Option<usize> {
        self.index.get(coords).copied()
    }

    /// Places sharing all but the last coordinate with `coords`, excluding
    /// the place itself.
    pub fn recovery_fiber(&self, coords: &[u32]) -> Result<Vec<usize>, TowerError> {
        let i = self.position(coords).ok_or_else(|| TowerError::UnknownPlace(coords.to_vec()))?;
        let prefix = &coords[..self.depth];
        // places are lexicographic, so the fiber is the contiguous block around i
        let mut lo = i;
        while lo > 0 && self.places[lo - 1].coords[..self.depth] == *prefix {
            lo -= 1;
        }
        let mut hi = i + 1;
        while hi < self.places.len() && self.places[hi].coords[..self.depth] == *prefix {
            hi += 1;
        }
        Ok((lo..hi).filter(|&k| k != i).collect())
    }

    /// Groups of place indices with equal values on the given coordinates,
    /// each group in place order; groups ordered by first member.
    pub fn classes_by(&self, vars: &[usize]) -> Vec<Vec<usize>> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut seen: HashMap<Vec<u32>, usize> = HashMap::new();
        for p in &self.places {
            let key: Vec<u32> = vars.iter().map(|&v| p.coords[v]).collect();
            match seen.get(&key) {
                Some(&g) => groups[g].push(p.index),
                None => {
                    seen.insert(key, groups.len());
                    groups.push(vec![p.index]);
                }
            }
        }
        groups
    }

    /// Whether every consecutive pair of coordinates satisfies the defining
    /// equation, re-evaluated from scratch.
    pub fn verify_recursion(&self) -> bool {
        let f = &self.tower.field;
        let s = self.tower.q_loc.trailing_zeros();
        self.places.iter().all(|p| {
            p.coords.windows(2).all(|w| match self.tower.rhs.eval(f, w[0]) {
                Some(r) => f.frobenius(w[1], s) ^ w[1] == r,
                None => false,
            }) && self.tower.split_base.contains(&p.coords[0])
        })
    }

    /// Counts places per value of each coordinate and compares with the
    /// declared pole degrees.
    pub fn fiber_degree_check(&self) -> FiberDegreeReport {
        let declared = self.tower.pole_degrees(self.depth).map(<[u64]>::to_vec);
        let mut variables = Vec::new();
        for i in 0..=self.depth {
            let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
            for p in &self.places {
                *counts.entry(p.coords[i]).or_default() += 1;
            }
            let min = counts.values().copied().min().unwrap_or(0);
            let max = counts.values().copied().max().unwrap_or(0);
            variables.push(VariableFiberCount {
                variable: i,
                declared: declared.as_ref().map(|d| d[i]),
                distinct_values: counts.len(),
                min_count: min,
                max_count: max,
            });
        }
        let consistent = variables.iter().all(|v| v.declared == Some(v.min_count) && v.min_count == v.max_count);
        FiberDegreeReport { depth: self.depth, variables, consistent }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariableFiberCount {
    pub variable: usize,
    pub declared: Option<u64>,
    pub distinct_values: usize,
    pub min_count: u64,
    pub max_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberDegreeReport {
    pub depth: usize,
    pub variables: Vec<VariableFiberCount>,
    /// Every value taken by `x_i` is taken at exactly `deg(x_i)` places.
    pub consistent: bool,
}

/// `N(b) / Tr(b)`, the color of `b` in GF(q^2) with nonzero trace.
pub fn color_of(field: &Field, q: u64, b: u32) -> Result<u32, TowerError> {
    let tr = field.trace_to(q, b)?;
    if tr == 0 {
        return Err(TowerError::ZeroTrace(b));
    }
    Ok(field.div(field.norm_to(q, b)?, tr)?)
}

/// One color class `S_b` together with the trace fiber `B_b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ColorClass {
    pub label: u32,
    pub members: Vec<u32>,
    pub trace_fiber: Vec<u32>,
}

/// The `q - 1` color classes of `S_0`, ordered by label.
pub fn color_classes(sub: &SubfieldView<'_>) -> Vec<ColorClass> {
    let field = sub.big();
    let s0 = sub.split_set();
    sub.units()
        .into_iter()
        .map(|label| {
            let members = s0
                .iter()
                .copied()
                .filter(|&b| sub.trace(b) != 0 && field.div(sub.norm(b), sub.trace(b)).ok() == Some(label))
                .collect();
            let trace_fiber = field.elements().into_iter().filter(|&b| sub.trace(b) == label).collect();
            ColorClass { label, members, trace_fiber }
        })
        .collect()
}

/// Directed graph on a splitting set with an edge for each lift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitGraph {
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl SplitGraph {
    pub fn out_degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.0 == v).count()
    }

    pub fn in_degree(&self, v: u32) -> usize {
        self.edges.iter().filter(|e| e.1 == v).count()
    }

    pub fn self_loops(&self) -> Vec<u32> {
        self.edges.iter().filter(|e| e.0 == e.1).map(|e| e.0).collect()
    }

    fn vertex_index(&self, v: u32) -> usize {
        self.vertices.iter().position(|&x| x == v).expect("vertex of the graph")
    }

    /// `counts[a][b]` = number of directed paths of length `len` from
    /// vertex `a` to vertex `b` (indices into `vertices`).
    pub fn path_counts(&self, len: usize) -> Vec<Vec<u64>> {
        let n = self.vertices.len();
        let mut acc: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        for _ in 0..len {
            let mut next = vec![vec![0u64; n]; n];
            for (a, row) in acc.iter().enumerate() {
                for &(u, v) in &self.edges {
                    let (ui, vi) = (self.vertex_index(u), self.vertex_index(v));
                    next[a][vi] += row[ui];
                }
            }
            acc = next;
        }
        acc
    }

    /// Start vertices of paths of length `len` ending at `target`, with
    /// multiplicity; starts without such a path are omitted.
    pub fn paths_of_length(&self, len: usize, target: u32) -> Vec<(u32, u64)> {
        let t = self.vertex_index(target);
        let counts = self.path_counts(len);
        self.vertices
            .iter()
            .enumerate()
            .filter(|(a, _)| counts[*a][t] > 0)
            .map(|(a, &v)| (v, counts[a][t]))
            .collect()
    }

    /// Whether every ordered pair is joined by a path of length at most `len`.
    pub fn connected_within(&self, len: usize) -> bool {
        let n = self.vertices.len();
        let mut reach = vec![vec![false; n]; n];
        for l in 0..=len {
            for (a, row) in self.path_counts(l).iter().enumerate() {
                for (b, &c) in row.iter().enumerate() {
                    reach[a][b] |= c > 0;
                }
            }
        }
        reach.iter().all(|r| r.iter().all(|&x| x))
    }
}
