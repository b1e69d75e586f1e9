//! Relative parameters `(delta, R)` and the rate thresholds they are
//! compared against: the Barg-Tamo-Vladut line, the sharper line satisfied
//! by the Garcia-Stichtenoth family, and a Gilbert-Varshamov type curve.

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::evalcode::EvalCode;

pub type Q = Ratio<i128>;

/// Version tag written on the first line of every CSV export.
pub const CSV_SCHEMA: &str = "# lrclab-scatter v1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("code has no distance information")]
    MissingDistance,
    #[error("delta = {0} is outside (0, 1)")]
    DeltaOutOfRange(f64),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

fn q(n: i128, d: i128) -> Q {
    Ratio::new(n, d)
}

fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceKind {
    Exact,
    AtMost,
    AtLeast,
}

/// `(n, k, d, r)` of a code; the ratios are always derived from these.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RatePoint {
    pub label: String,
    pub n: u64,
    pub k: u64,
    pub d: u64,
    pub r: u64,
    pub distance: DistanceKind,
}

impl RatePoint {
    pub fn new(label: impl Into<String>, n: u64, k: u64, d: u64, r: u64) -> RatePoint {
        RatePoint { label: label.into(), n, k, d, r, distance: DistanceKind::Exact }
    }

    pub fn delta(&self) -> Q {
        q(self.d as i128, self.n as i128)
    }

    pub fn rate(&self) -> Q {
        q(self.k as i128, self.n as i128)
    }

    pub fn r_over_n(&self) -> Q {
        q(self.r as i128, self.n as i128)
    }

    pub fn delta_f64(&self) -> f64 {
        to_f64(&self.delta())
    }

    pub fn rate_f64(&self) -> f64 {
        to_f64(&self.rate())
    }
}

/// The relative parameters of a built code, using its exact distance if
/// known and otherwise its best bound.
pub fn rate_point(label: &str, code: &EvalCode) -> Result<RatePoint, BoundsError> {
    let (lower, upper) = code.distance_bounds();
    let (d, distance) = match (lower, upper) {
        (Some(l), Some(u)) if l == u => (l, DistanceKind::Exact),
        (_, Some(u)) => (u, DistanceKind::AtMost),
        (Some(l), None) => (l, DistanceKind::AtLeast),
        (None, None) => return Err(BoundsError::MissingDistance),
    };
    Ok(RatePoint {
        label: label.into(),
        n: code.len() as u64,
        k: code.dimension() as u64,
        d,
        r: code.locality() as u64,
        distance,
    })
}

fn check_rq(r: u64, qq: u64) -> Result<(), BoundsError> {
    if r == 0 || qq < 2 {
        return Err(BoundsError::InvalidParameters(format!("need r >= 1 and q >= 2, got r = {r}, q = {qq}")));
    }
    Ok(())
}

fn clamp0(x: Q) -> Q {
    if x < Q::from_integer(0) {
        Q::from_integer(0)
    } else {
        x
    }
}

/// `r/(r+1) (1 - delta - 3/(q+1))`, clamped at 0.
pub fn btv_threshold(r: u64, qq: u64, delta: Q) -> Result<Q, BoundsError> {
    check_rq(r, qq)?;
    let (r, qq) = (r as i128, qq as i128);
    Ok(clamp0(q(r, r + 1) * (Q::from_integer(1) - delta - q(3, qq + 1))))
}

/// `r/(r+1) (1 - delta - 2/(q+1))`, clamped at 0. A point satisfies the
/// bound when `R` is strictly above it.
pub fn paper_threshold(r: u64, qq: u64, delta: Q) -> Result<Q, BoundsError> {
    check_rq(r, qq)?;
    let (r, qq) = (r as i128, qq as i128);
    Ok(clamp0(q(r, r + 1) * (Q::from_integer(1) - delta - q(2, qq + 1))))
}

/// `R + (q-1)/q delta` against `(q-1)(q-2)/q^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineCheck {
    pub lhs: Q,
    pub rhs: Q,
    pub holds: bool,
}

pub fn paper_affine_check(qq: u64, point: &RatePoint) -> AffineCheck {
    let qq = qq as i128;
    let lhs = point.rate() + q(qq - 1, qq) * point.delta();
    let rhs = q((qq - 1) * (qq - 2), qq * qq);
    AffineCheck { holds: lhs > rhs, lhs, rhs }
}

fn ln_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// `(1/(r+1)) log_q b_2(s) - delta log_q s` on `(0, 1]`.
pub fn gv_minimand(r: u64, qq: u64, delta: f64, s: f64) -> f64 {
    let (r1, qf) = ((r + 1) as f64, qq as f64);
    let a = r1 * (1.0 + (qf - 1.0) * s).ln();
    let b = if s >= 1.0 { f64::NEG_INFINITY } else { (qf - 1.0).ln() + r1 * (1.0 - s).ln() };
    let ln_b2 = ln_add_exp(a, b) - qf.ln();
    (ln_b2 / r1 - delta * s.ln()) / qf.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GvValue {
    pub rate: f64,
    pub s_star: f64,
    /// The minimum sits at an end of the grid.
    pub at_boundary: bool,
}

/// `r/(r+1) - min_{0 < s <= 1} gv_minimand`, by a uniform grid of `grid`
/// points followed by golden-section search to `tol`.
pub fn gv_threshold_with_grid(r: u64, qq: u64, delta: f64, tol: f64, grid: usize) -> Result<GvValue, BoundsError> {
    check_rq(r, qq)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BoundsError::DeltaOutOfRange(delta));
    }
    if tol.is_nan() || tol <= 0.0 || grid < 2 {
        return Err(BoundsError::InvalidParameters("tol must be positive and the grid at least 2 points".into()));
    }
    let g = |s: f64| gv_minimand(r, qq, delta, s);
    let h = 1.0 / grid as f64;
    let (mut best_i, mut best) = (1usize, f64::INFINITY);
    for i in 1..=grid {
        let v = g(i as f64 * h);
        if v < best {
            best = v;
            best_i = i;
        }
    }
    let mut lo = (best_i as f64 - 1.0) * h;
    let mut hi = ((best_i as f64 + 1.0) * h).min(1.0);
    if lo <= 0.0 {
        lo = h * 1e-6;
    }
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let (mut f1, mut f2) = (g(x1), g(x2));
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = g(x2);
        }
    }
    let mut s_star = 0.5 * (lo + hi);
    let mut min = g(s_star);
    if best < min {
        s_star = best_i as f64 * h;
        min = best;
    }
    let r1 = (r + 1) as f64;
    Ok(GvValue { rate: r as f64 / r1 - min, s_star, at_boundary: best_i == 1 || best_i == grid })
}

pub fn gv_threshold(r: u64, qq: u64, delta: f64, tol: f64) -> Result<GvValue, BoundsError> {
    gv_threshold_with_grid(r, qq, delta, tol, 10_000)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Btv,
    PaperIneq,
    Gv,
}

/// One threshold curve `delta -> R` for fixed `(r, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundCurve {
    pub kind: BoundKind,
    pub r: u64,
    pub q: u64,
}

impl BoundCurve {
    pub fn eval(&self, delta: f64) -> Result<f64, BoundsError> {
        let exact = |f: fn(u64, u64, Q) -> Result<Q, BoundsError>| -> Result<f64, BoundsError> {
            let d = Q::approximate_float(delta).ok_or(BoundsError::DeltaOutOfRange(delta))?;
            Ok(to_f64(&f(self.r, self.q, d)?))
        };
        match self.kind {
            BoundKind::Btv => exact(btv_threshold),
            BoundKind::PaperIneq => exact(paper_threshold),
            BoundKind::Gv => Ok(gv_threshold(self.r, self.q, delta, 1e-9)?.rate),
        }
    }

    /// Checks monotone non-increase on `points` interior grid points.
    pub fn is_monotone(&self, points: usize) -> bool {
        let vals: Vec<f64> =
            (1..points).map(|i| self.eval(i as f64 / points as f64).expect("interior delta")).collect();
        vals.windows(2).all(|w| w[1] <= w[0] + 1e-12)
    }
}

/// Parameters of the Garcia-Stichtenoth code with box bound `e0` on `x_0`
/// over GF(q^2), with the distance of the corresponding construction.
pub fn gs_point(label: impl Into<String>, qq: u64, e0: u64) -> RatePoint {
    let n = qq * qq * (qq * qq - qq);
    let k = (e0 + 1) * qq * (qq - 1);
    let d = (qq * qq * (qq * qq + 3)).saturating_sub(qq * qq * (e0 + 3 * qq));
    RatePoint::new(label, n, k, d, qq - 1)
}

/// The seven rows of the examples table, from the stated parameters, with
/// the GS rows instantiated at `qq`.
pub fn table_rows(qq: u64) -> Vec<RatePoint> {
    let mut prop45 = RatePoint::new("prop45", 48, 20, 4, 1);
    prop45.distance = DistanceKind::AtMost;
    vec![
        gs_point(format!("thm34-q{qq}"), qq, qq * qq / 2 - qq),
        gs_point(format!("thm36-q{qq}"), qq, qq * qq / 2),
        RatePoint::new("prop41-i2", 8, 2, 2, 1),
        RatePoint::new("rem42a", 8, 4, 2, 1),
        RatePoint::new("rem42b", 8, 4, 2, 1),
        RatePoint::new("prop44", 24, 10, 4, 1),
        prop45,
    ]
}

/// The family with box `(l, q-1, q-2)` for `1 <= l <= min(q^2/2, (q-1)(q-2))`.
pub fn cor38_sweep(qq: u64) -> Vec<RatePoint> {
    let top = (qq * qq / 2).min((qq - 1) * (qq - 2));
    (1..=top).map(|l| gs_point(format!("cor38-q{qq}-l{l}"), qq, l)).collect()
}

/// A table entry as printed, for comparison with the rows above.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrintedRow {
    pub label: &'static str,
    pub n: i128,
    /// Leading terms only for the GS rows.
    pub delta: Q,
    pub rate: Q,
    pub r_over_n: Q,
}

pub fn printed_table(qq: u64) -> Vec<PrintedRow> {
    let qi = qq as i128;
    let i = 2i128;
    vec![
        PrintedRow {
            label: "thm34",
            n: qi.pow(4) - qi.pow(2),
            delta: q(1, 2) - q(3, 2 * qi),
            rate: q(1, 2) - q(1, qi) + q(1, qi * qi),
            r_over_n: q(1, qi.pow(3)),
        },
        PrintedRow {
            label: "thm36",
            n: qi.pow(4) - qi.pow(2),
            delta: q(1, 2) - q(5, 2 * qi),
            rate: q(1, 2) + q(1, qi * qi),
            r_over_n: q(1, qi.pow(3)),
        },
        PrintedRow { label: "prop41-i2", n: 2 << i, delta: q(1, 1 << i), rate: q(1, 4), r_over_n: q(1, 2 << i) },
        PrintedRow { label: "rem42a", n: 8, delta: q(1, 4), rate: q(1, 2), r_over_n: q(1, 8) },
        PrintedRow { label: "rem42b", n: 8, delta: q(1, 4), rate: q(1, 2), r_over_n: q(1, 8) },
        PrintedRow { label: "prop44", n: 24, delta: q(1, 6), rate: q(5, 12), r_over_n: q(1, 24) },
        PrintedRow { label: "prop45", n: 48, delta: q(1, 12), rate: q(5, 12), r_over_n: q(1, 48) },
    ]
}

/// Row-by-row comparison of `table_rows` against the printed values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableComparison {
    pub label: String,
    pub n_matches: bool,
    pub rate_matches: bool,
    pub r_over_n_matches: bool,
    /// `delta - printed delta`; zero except for the GS rows, whose printed
    /// delta keeps only the leading terms.
    pub delta_residual: Q,
}

pub fn compare_table(qq: u64) -> Vec<TableComparison> {
    table_rows(qq)
        .iter()
        .zip(printed_table(qq))
        .map(|(row, printed)| TableComparison {
            label: row.label.clone(),
            n_matches: row.n as i128 == printed.n,
            rate_matches: row.rate() == printed.rate,
            r_over_n_matches: row.r_over_n() == printed.r_over_n,
            delta_residual: row.delta() - printed.delta,
        })
        .collect()
}

/// Discrepancies between the printed table and the constructions.
pub fn table_errata(qq: u64) -> Vec<String> {
    let mut notes = Vec::new();
    for c in compare_table(qq) {
        if !c.n_matches {
            notes.push(format!(
                "{}: printed length q^4 - q^2 = {} but the code has n = q^2(q^2 - q) = q^4 - q^3 = {}",
                c.label,
                (qq as i128).pow(4) - (qq as i128).pow(2),
                qq.pow(4) - qq.pow(3)
            ));
        }
        if c.delta_residual != Q::from_integer(0) {
            notes.push(format!(
                "{}: delta exceeds its printed leading terms by {} (order q^-2, not o(q^-2))",
                c.label, c.delta_residual
            ));
        }
    }
    notes.push(
        "prop41: statement gives [2^j, 2^(j-2), 2], the proof [2^j, 2^(j-1), 2^(j-1)], the table [2*2^i, 2^(i-1), 2]; \
         the depth-j place set has 2^(j+1) places"
            .into(),
    );
    notes
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterRow {
    pub point: RatePoint,
    pub btv_ok: bool,
    pub paper_ok: bool,
    pub gv_ok: bool,
}

/// Compares each point with the three thresholds at alphabet parameter `qq`
/// and the point's own locality.
pub fn scatter(points: &[RatePoint], qq: u64) -> Result<Vec<ScatterRow>, BoundsError> {
    points
        .iter()
        .map(|p| {
            let btv = btv_threshold(p.r, qq, p.delta())?;
            let paper = paper_threshold(p.r, qq, p.delta())?;
            let gv_ok = match gv_threshold(p.r, qq, p.delta_f64(), 1e-9) {
                Ok(g) => p.rate_f64() > g.rate,
                Err(BoundsError::DeltaOutOfRange(_)) => false,
                Err(e) => return Err(e),
            };
            Ok(ScatterRow { point: p.clone(), btv_ok: p.rate() >= btv, paper_ok: p.rate() > paper, gv_ok })
        })
        .collect()
}

pub fn scatter_csv(rows: &[ScatterRow]) -> String {
    let mut out = String::new();
    out.push_str(CSV_SCHEMA);
    out.push('\n');
    out.push_str("label,n,k,d,r,delta_num,delta_den,R_num,R_den,btv_ok,paper_ok,gv_ok\n");
    for row in rows {
        let p = &row.point;
        let (dl, r) = (p.delta(), p.rate());
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            p.label,
            p.n,
            p.k,
            p.d,
            p.r,
            dl.numer(),
            dl.denom(),
            r.numer(),
            r.denom(),
            row.btv_ok,
            row.paper_ok,
            row.gv_ok
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_points() {
        let rows = table_rows(8);
        let prop44 = &rows[5];
        assert_eq!((prop44.delta(), prop44.rate(), prop44.r_over_n()), (q(1, 6), q(5, 12), q(1, 24)));
        let rem = &rows[3];
        assert_eq!((rem.delta(), rem.rate(), rem.r_over_n()), (q(1, 4), q(1, 2), q(1, 8)));
        let thm36 = &rows[1];
        assert_eq!((thm36.n, thm36.k, thm36.d), (3584, 1848, 704));
        assert_eq!((thm36.delta(), thm36.rate()), (q(11, 56), q(33, 64)));
        assert_eq!((rows[0].k, rows[0].d), (1400, 1216));
    }

    #[test]
    fn printed_table_comparison() {
        for c in compare_table(8) {
            assert!(c.rate_matches && c.r_over_n_matches, "{}", c.label);
            match c.label.as_str() {
                "thm34-q8" => {
                    assert!(!c.n_matches);
                    assert_eq!(c.delta_residual, q(3, 2 * 8 * 7));
                }
                "thm36-q8" => {
                    assert!(!c.n_matches);
                    assert_eq!(c.delta_residual, q(1, 2 * 8 * 7));
                }
                "prop45" => assert_eq!(c.delta_residual, Q::from_integer(0)),
                _ => assert!(c.n_matches && c.delta_residual == Q::from_integer(0), "{}", c.label),
            }
        }
        assert!(table_errata(8).len() >= 3);
    }

    #[test]
    fn btv_examples() {
        assert_eq!(btv_threshold(7, 8, Q::from_integer(0)).unwrap(), q(7, 12));
        assert_eq!(btv_threshold(7, 8, Q::from_integer(1)).unwrap(), Q::from_integer(0));
        let v = to_f64(&btv_threshold(31, 32, q(1, 2)).unwrap());
        assert!((v - 0.396_306_818).abs() < 1e-6, "{v}");
        assert!(btv_threshold(0, 8, Q::from_integer(0)).is_err());
    }

    #[test]
    fn thm36_affine_and_strict() {
        let p = &table_rows(8)[1];
        let a = paper_affine_check(8, p);
        assert_eq!((a.lhs, a.rhs), (q(44, 64), q(42, 64)));
        assert!(a.holds);
        assert!(p.rate() > paper_threshold(7, 8, p.delta()).unwrap());
        assert_eq!(paper_threshold(7, 8, Q::from_integer(1)).unwrap(), Q::from_integer(0));
    }

    #[test]
    fn sweep_margin_is_constant() {
        for qq in [8u64, 32] {
            let sweep = cor38_sweep(qq);
            assert_eq!(sweep.len() as u64, (qq * qq / 2).min((qq - 1) * (qq - 2)));
            let qi = qq as i128;
            for p in &sweep {
                let margin = p.rate() - paper_threshold(qq - 1, qq, p.delta()).unwrap();
                assert_eq!(margin, q(4, qi * qi * (qi + 1)));
            }
        }
        assert!(cor38_sweep(2).is_empty());
    }

    #[test]
    fn affine_form_differs_from_threshold() {
        // the affine constant is (q-1)(q-2)/q^2, the threshold's is (q-1)^2/(q(q+1))
        let p = RatePoint::new("x", 1000, 400, 200, 7);
        let affine = paper_affine_check(8, &p);
        let via_threshold = p.rate() + q(7, 8) * p.delta() - paper_threshold(7, 8, p.delta()).unwrap() - q(7, 8) * p.delta();
        assert_ne!(affine.lhs - affine.rhs, via_threshold);
    }

    #[test]
    fn gv_grid_refinement_is_stable() {
        for &(r, qq, delta) in &[(31u64, 32u64, 0.5f64), (7, 8, 0.2), (1, 8, 0.25)] {
            let a = gv_threshold_with_grid(r, qq, delta, 1e-9, 10_000).unwrap();
            let b = gv_threshold_with_grid(r, qq, delta, 1e-9, 100_000).unwrap();
            assert!((a.rate - b.rate).abs() < 1e-9, "{r} {qq} {delta}: {} vs {}", a.rate, b.rate);
        }
        assert!(gv_threshold(7, 8, 0.0, 1e-9).is_err());
        assert!(gv_threshold(7, 8, 1.0, 1e-9).is_err());
    }

    #[test]
    fn gv_endpoint_and_limit() {
        // b_2(1) = q^r, so the minimand at s = 1 is r/(r+1)
        let v = gv_minimand(7, 8, 0.3, 1.0);
        assert!((v - 7.0 / 8.0).abs() < 1e-12);
        let small = gv_threshold(7, 8, 1e-6, 1e-12).unwrap();
        assert!(small.rate > 7.0 / 8.0 - 1e-3);
        let g = gv_threshold(7, 8, 0.9, 1e-9).unwrap();
        assert!(g.rate >= 0.0);
    }

    #[test]
    fn curves_are_monotone() {
        for kind in [BoundKind::Btv, BoundKind::PaperIneq, BoundKind::Gv] {
            assert!(BoundCurve { kind, r: 31, q: 32 }.is_monotone(50), "{kind:?}");
        }
    }

    #[test]
    fn csv_layout() {
        let rows = scatter(&table_rows(8), 8).unwrap();
        let csv = scatter_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_SCHEMA));
        assert_eq!(lines.next(), Some("label,n,k,d,r,delta_num,delta_den,R_num,R_den,btv_ok,paper_ok,gv_ok"));
        assert_eq!(csv.lines().count(), 9);
        assert!(scatter(&[], 8).unwrap().is_empty());
    }
}
