//! Arithmetic in GF(2^m) for 1 <= m <= 20.
//!
//! Elements are bitmasks over the polynomial basis `1, x, ..., x^(m-1)`;
//! addition is XOR. A [`Field`] owns its modulus, a fixed primitive element
//! and the lookup tables used by the hot loops. The raw-`u32` methods on
//! [`Field`] are what the rest of the crate uses; [`FieldElem`] is the
//! checked, field-carrying wrapper for callers that mix fields.
//!
//! Elements have a canonical total order used everywhere a deterministic
//! enumeration is needed: `0` first, then `g^0, g^1, ..., g^(2^m - 2)` for the
//! field's generator `g`.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_DEGREE: u32 = 20;
/// Log/exp tables are built at construction up to this degree.
const EAGER_TABLE_DEGREE: u32 = 16;
/// A full `2^m x 2^m` product table is built up to this degree.
const FULL_TABLE_DEGREE: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaloisError {
    #[error("extension degree {0} is outside the supported range 1..=20")]
    UnsupportedDegree(u32),
    #[error("modulus {modulus:#x} has degree {actual}, expected {expected}")]
    ModulusDegree { modulus: u32, expected: u32, actual: u32 },
    #[error("modulus {modulus:#x} is reducible: it is divisible by {factor:#x}")]
    Reducible { modulus: u32, factor: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {left} vs {right}")]
    FieldMismatch { left: String, right: String },
    #[error("{field} does not have q^2 elements for q = {q}")]
    NotQuadratic { field: String, q: u64 },
    #[error("{q_loc} is not 2^s with s dividing the extension degree {m}")]
    BadSubfield { q_loc: u64, m: u32 },
    #[error("{value:#x} is not an element of {field}")]
    OutOfRange { value: u64, field: String },
    #[error("cannot parse field element {0:?}")]
    Parse(String),
    #[error("generator {generator:#x} does not match the field's generator {expected:#x}")]
    GeneratorMismatch { generator: u32, expected: u32 },
}

/// Serializable description of a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldDescription {
    pub m: u32,
    pub modulus_bits: u32,
    pub generator_bits: u32,
}

/// The finite field GF(2^m).
pub struct Field {
    m: u32,
    modulus: u32,
    generator: u32,
    // exp has length 2 * (2^m - 1) so that exp[log a + log b] needs no reduction.
    tables: OnceLock<LogTables>,
    mul_table: Vec<u32>,
}

struct LogTables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl Clone for Field {
    fn clone(&self) -> Self {
        let tables = OnceLock::new();
        if let Some(t) = self.tables.get() {
            let _ = tables.set(LogTables { exp: t.exp.clone(), log: t.log.clone() });
        }
        Field {
            m: self.m,
            modulus: self.modulus,
            generator: self.generator,
            tables,
            mul_table: self.mul_table.clone(),
        }
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("m", &self.m)
            .field("modulus", &format_args!("{:#x}", self.modulus))
            .field("generator", &format_args!("{:#x}", self.generator))
            .finish()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}) mod {:#x}", self.m, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for Field {}

fn degree(p: u64) -> u32 {
    63 - p.leading_zeros()
}

fn gf2_poly_rem(mut a: u64, b: u64) -> u64 {
    let db = degree(b);
    while a != 0 && degree(a) >= db {
        a ^= b << (degree(a) - db);
    }
    a
}

/// Smallest nontrivial factor of `p` over GF(2), if any.
fn smallest_factor(p: u32) -> Option<u32> {
    let d = degree(p as u64);
    (2u32..(1u32 << (d / 2 + 1)))
        .filter(|&c| degree(c as u64) <= d / 2)
        .find(|&c| gf2_poly_rem(p as u64, c as u64) == 0)
}

/// Whether `p` (bitmask, bit i = coefficient of x^i) is irreducible over GF(2).
pub fn is_irreducible(p: u32) -> bool {
    p >= 2 && smallest_factor(p).is_none()
}

/// Lexicographically smallest irreducible polynomial of degree `m`.
pub fn smallest_irreducible(m: u32) -> u32 {
    ((1u32 << m)..(1u32 << (m + 1)))
        .find(|&p| is_irreducible(p))
        .expect("irreducible polynomials exist in every degree")
}

fn clmul_mod(a: u32, b: u32, m: u32, modulus: u32) -> u32 {
    let top = 1u64 << m;
    let (mut a, mut b, mut r) = (a as u64, b, 0u64);
    while b != 0 {
        if b & 1 == 1 {
            r ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & top != 0 {
            a ^= modulus as u64;
        }
    }
    r as u32
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Field {
    /// Builds GF(2^m). Without an explicit modulus the lexicographically
    /// smallest irreducible polynomial of degree `m` is used.
    pub fn new(m: u32, modulus: Option<u32>) -> Result<Field, GaloisError> {
        if m == 0 || m > MAX_DEGREE {
            return Err(GaloisError::UnsupportedDegree(m));
        }
        let modulus = match modulus {
            Some(p) => {
                let actual = if p == 0 { 0 } else { degree(p as u64) };
                if p == 0 || actual != m {
                    return Err(GaloisError::ModulusDegree { modulus: p, expected: m, actual });
                }
                if let Some(factor) = smallest_factor(p) {
                    return Err(GaloisError::Reducible { modulus: p, factor });
                }
                p
            }
            None => smallest_irreducible(m),
        };
        let order = (1u64 << m) - 1;
        let factors = prime_factors(order);
        let pow = |g: u32, mut e: u64| {
            let (mut base, mut acc) = (g, 1u32);
            while e > 0 {
                if e & 1 == 1 {
                    acc = clmul_mod(acc, base, m, modulus);
                }
                base = clmul_mod(base, base, m, modulus);
                e >>= 1;
            }
            acc
        };
        let generator = (1u32..(1u32 << m))
            .find(|&g| factors.iter().all(|&p| pow(g, order / p) != 1))
            .expect("the multiplicative group of a finite field is cyclic");

        let mut field = Field { m, modulus, generator, tables: OnceLock::new(), mul_table: Vec::new() };
        if m <= EAGER_TABLE_DEGREE {
            let _ = field.tables.set(field.build_tables());
        }
        if m <= FULL_TABLE_DEGREE {
            let size = 1usize << m;
            let mut table = vec![0u32; size * size];
            for a in 1..size {
                for b in 1..size {
                    table[(a << m) | b] = field.mul_slow(a as u32, b as u32);
                }
            }
            field.mul_table = table;
        }
        Ok(field)
    }

    /// GF(2^m) with the default modulus.
    pub fn with_degree(m: u32) -> Result<Field, GaloisError> {
        Field::new(m, None)
    }

    pub fn from_description(desc: &FieldDescription) -> Result<Field, GaloisError> {
        let field = Field::new(desc.m, Some(desc.modulus_bits))?;
        if field.generator != desc.generator_bits {
            return Err(GaloisError::GeneratorMismatch {
                generator: desc.generator_bits,
                expected: field.generator,
            });
        }
        Ok(field)
    }

    fn build_tables(&self) -> LogTables {
        let n = self.group_order() as usize;
        let size = 1usize << self.m;
        let mut exp = vec![0u32; 2 * n.max(1)];
        let mut log = vec![0u32; size];
        let mut x = 1u32;
        for i in 0..n {
            exp[i] = x;
            exp[i + n] = x;
            log[x as usize] = i as u32;
            x = clmul_mod(x, self.generator, self.m, self.modulus);
        }
        LogTables { exp, log }
    }

    fn tables(&self) -> &LogTables {
        self.tables.get_or_init(|| self.build_tables())
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn generator(&self) -> u32 {
        self.generator
    }

    /// Number of elements, 2^m.
    pub fn size(&self) -> u64 {
        1u64 << self.m
    }

    /// Order of the multiplicative group, 2^m - 1.
    pub fn group_order(&self) -> u64 {
        self.size() - 1
    }

    pub fn description(&self) -> FieldDescription {
        FieldDescription { m: self.m, modulus_bits: self.modulus, generator_bits: self.generator }
    }

    pub fn contains(&self, a: u32) -> bool {
        (a as u64) < self.size()
    }

    pub fn elem(&self, repr: u32) -> Result<FieldElem<'_>, GaloisError> {
        if !self.contains(repr) {
            return Err(GaloisError::OutOfRange { value: repr as u64, field: self.to_string() });
        }
        Ok(FieldElem { repr, field: self })
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    /// Carry-less multiplication followed by reduction; the table-free path.
    pub fn mul_slow(&self, a: u32, b: u32) -> u32 {
        clmul_mod(a, b, self.m, self.modulus)
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if !self.mul_table.is_empty() {
            return self.mul_table[((a as usize) << self.m) | b as usize];
        }
        if self.m <= EAGER_TABLE_DEGREE {
            if a == 0 || b == 0 {
                return 0;
            }
            let t = self.tables();
            return t.exp[(t.log[a as usize] + t.log[b as usize]) as usize];
        }
        self.mul_slow(a, b)
    }

    pub fn inv(&self, a: u32) -> Result<u32, GaloisError> {
        if a == 0 {
            return Err(GaloisError::DivisionByZero);
        }
        if self.m <= EAGER_TABLE_DEGREE {
            let t = self.tables();
            let n = self.group_order() as u32;
            return Ok(t.exp[((n - t.log[a as usize]) % n) as usize]);
        }
        Ok(self.pow(a, self.group_order() - 1))
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32, GaloisError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` by square-and-multiply, with `0^0 = 1`.
    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let (mut base, mut acc) = (a, 1u32);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(2^k)`.
    pub fn frobenius(&self, a: u32, k: u32) -> u32 {
        (0..k).fold(a, |x, _| self.mul(x, x))
    }

    /// `dst[i] += c * src[i]`.
    pub fn mul_add_assign(&self, dst: &mut [u32], src: &[u32], c: u32) {
        if c == 0 {
            return;
        }
        if c == 1 {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= *s);
            return;
        }
        if !self.mul_table.is_empty() {
            let row = &self.mul_table[(c as usize) << self.m..((c as usize) + 1) << self.m];
            dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= row[*s as usize]);
        } else {
            dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= self.mul(c, *s));
        }
    }

    /// `dst[i] *= c`.
    pub fn scale_assign(&self, dst: &mut [u32], c: u32) {
        dst.iter_mut().for_each(|d| *d = self.mul(c, *d));
    }

    /// Discrete logarithm to the base of the generator.
    pub fn log(&self, a: u32) -> Option<u64> {
        if a == 0 || !self.contains(a) {
            return None;
        }
        Some(self.tables().log[a as usize] as u64)
    }

    /// `g^k` for the field's generator.
    pub fn gen_pow(&self, k: u64) -> u32 {
        let n = self.group_order();
        self.tables().exp[(k % n) as usize]
    }

    /// Position of `a` in the canonical element order (`0`, `g^0`, `g^1`, ...).
    pub fn order_index(&self, a: u32) -> u64 {
        match self.log(a) {
            None => 0,
            Some(k) => k + 1,
        }
    }

    /// All elements in the canonical order.
    pub fn elements(&self) -> Vec<u32> {
        let n = self.group_order();
        std::iter::once(0).chain((0..n).map(|k| self.gen_pow(k))).collect()
    }

    /// Sorts a slice of elements into canonical order.
    pub fn sort_canonical(&self, xs: &mut [u32]) {
        xs.sort_by_key(|&x| self.order_index(x));
    }

    fn check_quadratic(&self, q: u64) -> Result<u32, GaloisError> {
        if q < 2 || !q.is_power_of_two() || q.checked_mul(q) != Some(self.size()) {
            return Err(GaloisError::NotQuadratic { field: self.to_string(), q });
        }
        Ok(q.trailing_zeros())
    }

    /// `Tr(b) = b^q + b`, for this field of size `q^2`.
    pub fn trace_to(&self, q: u64, b: u32) -> Result<u32, GaloisError> {
        let s = self.check_quadratic(q)?;
        Ok(self.frobenius(b, s) ^ b)
    }

    /// `N(b) = b^(q+1)`, for this field of size `q^2`.
    pub fn norm_to(&self, q: u64, b: u32) -> Result<u32, GaloisError> {
        let s = self.check_quadratic(q)?;
        Ok(self.mul(self.frobenius(b, s), b))
    }

    /// The subfield GF(q) inside this field of size `q^2`.
    pub fn subfield(&self, q: u64) -> Result<SubfieldView<'_>, GaloisError> {
        let s = self.check_quadratic(q)?;
        let embedding = self.elements().into_iter().filter(|&x| self.frobenius(x, s) == x).collect();
        Ok(SubfieldView { big: self, q, log_q: s, embedding })
    }

    /// All roots in this field of `y^q_loc + y = rhs`.
    ///
    /// `y -> y^q_loc + y` is GF(2)-linear, so the roots are found by solving
    /// an `m x m` linear system over GF(2): either none, or a coset of the
    /// kernel GF(q_loc). Returned in canonical order.
    pub fn linearized_roots(&self, q_loc: u64, rhs: u32) -> Result<Vec<u32>, GaloisError> {
        if q_loc < 2 || !q_loc.is_power_of_two() || self.m % q_loc.trailing_zeros() != 0 {
            return Err(GaloisError::BadSubfield { q_loc, m: self.m });
        }
        if !self.contains(rhs) {
            return Err(GaloisError::OutOfRange { value: rhs as u64, field: self.to_string() });
        }
        let s = q_loc.trailing_zeros();
        let m = self.m as usize;
        let cols: Vec<u32> = (0..m).map(|i| self.frobenius(1 << i, s) ^ (1 << i)).collect();
        let (particular, kernel) = match solve_gf2(&cols, rhs, m) {
            Some(sol) => sol,
            None => return Ok(Vec::new()),
        };
        let mut roots = Vec::with_capacity(1 << kernel.len());
        for mask in 0u32..(1u32 << kernel.len()) {
            let mut x = particular;
            for (i, k) in kernel.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    x ^= k;
                }
            }
            roots.push(x);
        }
        self.sort_canonical(&mut roots);
        Ok(roots)
    }

    /// Formats `a` as `g^k` (or `0`).
    pub fn power_notation(&self, a: u32) -> String {
        match self.log(a) {
            None => "0".to_string(),
            Some(k) => format!("g^{k}"),
        }
    }

    /// Parses `0x1f`, `1f` (hex bitmask) or `g^k`.
    pub fn parse_elem(&self, s: &str) -> Result<FieldElem<'_>, GaloisError> {
        let t = s.trim();
        let repr = if let Some(k) = t.strip_prefix("g^") {
            let k: u64 = k.parse().map_err(|_| GaloisError::Parse(s.to_string()))?;
            self.gen_pow(k)
        } else {
            let hex = t.strip_prefix("0x").unwrap_or(t);
            u32::from_str_radix(hex, 16).map_err(|_| GaloisError::Parse(s.to_string()))?
        };
        self.elem(repr)
    }
}

/// Solves `sum_i x_i cols[i] = rhs` over GF(2); returns a particular solution
/// and a kernel basis.
fn solve_gf2(cols: &[u32], rhs: u32, m: usize) -> Option<(u32, Vec<u32>)> {
    // row r: bits 0..m are coefficients of the unknowns, bit m the right-hand side
    let mut rows: Vec<u64> = (0..m)
        .map(|r| {
            let coeffs = cols.iter().enumerate().fold(0u64, |acc, (i, c)| acc | (((c >> r) & 1) as u64) << i);
            coeffs | (((rhs >> r) & 1) as u64) << m
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut rank = 0;
    for c in 0..m {
        let Some(p) = (rank..m).find(|&r| rows[r] >> c & 1 == 1) else { continue };
        rows.swap(rank, p);
        for r in 0..m {
            if r != rank && rows[r] >> c & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        pivots.push((rank, c));
        rank += 1;
    }
    let coeff_mask = (1u64 << m) - 1;
    if rows[rank..].iter().any(|&r| r & coeff_mask == 0 && r >> m & 1 == 1) {
        return None;
    }
    let mut particular = 0u32;
    for &(r, c) in &pivots {
        if rows[r] >> m & 1 == 1 {
            particular |= 1 << c;
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let kernel = (0..m)
        .filter(|f| !pivot_cols.contains(f))
        .map(|f| {
            let mut v = 1u32 << f;
            for &(r, c) in &pivots {
                if rows[r] >> f & 1 == 1 {
                    v |= 1 << c;
                }
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

/// GF(q) sitting inside a field of size q^2, realized as the fixed points of
/// `x -> x^q`.
#[derive(Debug, Clone)]
pub struct SubfieldView<'f> {
    big: &'f Field,
    q: u64,
    log_q: u32,
    embedding: Vec<u32>,
}

impl<'f> SubfieldView<'f> {
    pub fn big(&self) -> &'f Field {
        self.big
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// The `q` elements of the subfield, in canonical order.
    pub fn embedding(&self) -> &[u32] {
        &self.embedding
    }

    pub fn contains(&self, a: u32) -> bool {
        self.big.frobenius(a, self.log_q) == a
    }

    /// Nonzero subfield elements, in canonical order.
    pub fn units(&self) -> Vec<u32> {
        self.embedding.iter().copied().filter(|&x| x != 0).collect()
    }

    /// `S_0`: elements of the big field outside the subfield (`Tr != 0`).
    pub fn split_set(&self) -> Vec<u32> {
        self.big.elements().into_iter().filter(|&x| !self.contains(x)).collect()
    }

    pub fn trace(&self, b: u32) -> u32 {
        self.big.frobenius(b, self.log_q) ^ b
    }

    pub fn norm(&self, b: u32) -> u32 {
        self.big.mul(self.big.frobenius(b, self.log_q), b)
    }

    /// The conjugate `b^q`.
    pub fn conjugate(&self, b: u32) -> u32 {
        self.big.frobenius(b, self.log_q)
    }
}

/// A field element bound to its field. Arithmetic between elements of
/// different fields is an error in the `checked_*` methods and a panic in
/// the operator impls.
#[derive(Clone, Copy)]
pub struct FieldElem<'f> {
    repr: u32,
    field: &'f Field,
}

impl<'f> FieldElem<'f> {
    pub fn repr(&self) -> u32 {
        self.repr
    }

    pub fn field(&self) -> &'f Field {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.repr == 0
    }

    fn same_field(&self, other: &FieldElem<'_>) -> Result<(), GaloisError> {
        if std::ptr::eq(self.field, other.field) || self.field == other.field {
            Ok(())
        } else {
            Err(GaloisError::FieldMismatch { left: self.field.to_string(), right: other.field.to_string() })
        }
    }

    pub fn checked_add(self, other: FieldElem<'_>) -> Result<FieldElem<'f>, GaloisError> {
        self.same_field(&other)?;
        Ok(FieldElem { repr: self.repr ^ other.repr, field: self.field })
    }

    pub fn checked_mul(self, other: FieldElem<'_>) -> Result<FieldElem<'f>, GaloisError> {
        self.same_field(&other)?;
        Ok(FieldElem { repr: self.field.mul(self.repr, other.repr), field: self.field })
    }

    pub fn checked_div(self, other: FieldElem<'_>) -> Result<FieldElem<'f>, GaloisError> {
        self.same_field(&other)?;
        Ok(FieldElem { repr: self.field.div(self.repr, other.repr)?, field: self.field })
    }

    pub fn inv(self) -> Result<FieldElem<'f>, GaloisError> {
        Ok(FieldElem { repr: self.field.inv(self.repr)?, field: self.field })
    }

    pub fn pow(self, e: u64) -> FieldElem<'f> {
        FieldElem { repr: self.field.pow(self.repr, e), field: self.field }
    }

    pub fn trace_to(self, q: u64) -> Result<FieldElem<'f>, GaloisError> {
        Ok(FieldElem { repr: self.field.trace_to(q, self.repr)?, field: self.field })
    }

    pub fn norm_to(self, q: u64) -> Result<FieldElem<'f>, GaloisError> {
        Ok(FieldElem { repr: self.field.norm_to(q, self.repr)?, field: self.field })
    }

    pub fn to_hex(&self) -> String {
        format!("{:#x}", self.repr)
    }

    pub fn to_power_notation(&self) -> String {
        self.field.power_notation(self.repr)
    }
}

impl PartialEq for FieldElem<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr && self.field == other.field
    }
}

impl Eq for FieldElem<'_> {}

impl fmt::Debug for FieldElem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x} in {}", self.repr, self.field)
    }
}

impl fmt::Display for FieldElem<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.repr)
    }
}

impl<'f> Add for FieldElem<'f> {
    type Output = FieldElem<'f>;
    fn add(self, rhs: Self) -> Self::Output {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl<'f> Sub for FieldElem<'f> {
    type Output = FieldElem<'f>;
    fn sub(self, rhs: Self) -> Self::Output {
        self.checked_add(rhs).expect("field mismatch")
    }
}

impl<'f> Mul for FieldElem<'f> {
    type Output = FieldElem<'f>;
    fn mul(self, rhs: Self) -> Self::Output {
        self.checked_mul(rhs).expect("field mismatch")
    }
}
