//! Exact evaluation of integer combinations of roots of unity.
//!
//! `sum_j h_j zeta_n^j` is reduced modulo the cyclotomic polynomial
//! `Phi_n`; the powers `1, zeta, ..., zeta^(phi(n)-1)` are linearly
//! independent over the rationals, so the sum is a rational integer exactly
//! when the remainder is a constant.

use std::collections::HashMap;

use crate::arith::divisors;

fn poly_div_exact(num: &[i128], den: &[i128]) -> Vec<i128> {
    // den is monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if num.len() < den.len() {
        return vec![0];
    }
    let mut quot = vec![0i128; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

fn cyclotomic(n: u64, memo: &mut HashMap<u64, Vec<i128>>) -> Vec<i128> {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    // x^n - 1
    let mut poly = vec![0i128; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in divisors(n) {
        if d < n {
            let phi_d = cyclotomic(d, memo);
            poly = poly_div_exact(&poly, &phi_d);
        }
    }
    memo.insert(n, poly.clone());
    poly
}

/// Coefficients of `Phi_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i128> {
    cyclotomic(n, &mut HashMap::new())
}

/// `sum_j hist[j] * zeta_n^j` if it is a rational integer, else `None`.
pub fn root_of_unity_sum(hist: &[i64], n: u64) -> Option<i64> {
    reduce_by(hist, &cyclotomic_polynomial(n))
}

/// As [`root_of_unity_sum`] with `Phi_n` supplied.
pub fn reduce_by(hist: &[i64], phi: &[i128]) -> Option<i64> {
    let deg = phi.len() - 1;
    let mut rem: Vec<i128> = hist.iter().map(|&h| h as i128).collect();
    for i in (deg..rem.len()).rev() {
        let c = rem[i];
        if c != 0 {
            for (j, &p) in phi.iter().enumerate() {
                rem[i - deg + j] -= c * p;
            }
        }
    }
    rem.truncate(deg.max(1));
    if rem.iter().skip(1).all(|&c| c == 0) {
        i64::try_from(rem[0]).ok()
    } else {
        None
    }
}
