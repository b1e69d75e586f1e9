//! Univariate polynomial helpers over a [`Field`]; coefficient vectors are
//! stored lowest degree first.

use crate::galois::{Field, GaloisError};

/// Horner evaluation.
pub fn eval(field: &Field, coeffs: &[u32], x: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| field.mul(acc, x) ^ c)
}

/// Coefficients of `prod (x - r)` over the given roots.
pub fn from_roots(field: &Field, roots: &[u32]) -> Vec<u32> {
    let mut p = vec![1u32];
    for &r in roots {
        let mut next = vec![0u32; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            next[i + 1] ^= c;
            next[i] ^= field.mul(c, r);
        }
        p = next;
    }
    p
}

/// Evaluates at `x` the unique polynomial of degree `< xs.len()` through the
/// points `(xs[i], ys[i])`. The `xs` must be distinct.
pub fn lagrange_eval(field: &Field, xs: &[u32], ys: &[u32], x: u32) -> Result<u32, GaloisError> {
    let mut acc = 0u32;
    for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
        if yi == 0 {
            continue;
        }
        let mut num = 1u32;
        let mut den = 1u32;
        for (j, &xj) in xs.iter().enumerate() {
            if i != j {
                num = field.mul(num, x ^ xj);
                den = field.mul(den, xi ^ xj);
            }
        }
        acc ^= field.mul(yi, field.div(num, den)?);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_roots_vanishes_exactly_on_roots() {
        let f = Field::with_degree(4).unwrap();
        let roots = [3, 7, 9];
        let p = from_roots(&f, &roots);
        assert_eq!(p.len(), 4);
        assert_eq!(*p.last().unwrap(), 1);
        for x in 0..16 {
            assert_eq!(eval(&f, &p, x) == 0, roots.contains(&x));
        }
    }

    #[test]
    fn lagrange_recovers_polynomial() {
        let f = Field::with_degree(6).unwrap();
        let coeffs = [5u32, 0, 17, 33, 1, 2, 60];
        let xs: Vec<u32> = (1..=7).collect();
        let ys: Vec<u32> = xs.iter().map(|&x| eval(&f, &coeffs, x)).collect();
        for x in 0..64 {
            assert_eq!(lagrange_eval(&f, &xs, &ys, x).unwrap(), eval(&f, &coeffs, x));
        }
        assert!(lagrange_eval(&f, &[1, 1], &[1, 2], 0).is_err());
    }
}
