//! Slow reference implementations shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use covertab::hasse_witt::PrimeContext;
use covertab::residue::pow_mod;
use covertab::CoverDatum;

/// Every `n . A` by looping over all of `(Z/N)^m`.
pub fn naive_span(d: &CoverDatum) -> BTreeSet<Vec<u32>> {
    let n = d.modulus();
    let m = d.row_count();
    let mut out = BTreeSet::new();
    for idx in 0..(n as u64).pow(m as u32) {
        let mut c = idx;
        let coeffs: Vec<u32> = (0..m)
            .map(|_| {
                let x = (c % n as u64) as u32;
                c /= n as u64;
                x
            })
            .collect();
        out.insert(d.alpha(&coeffs).unwrap());
    }
    out
}

pub fn naive_dim(alpha: &[u32], n: u32) -> i64 {
    if alpha.iter().all(|&a| a == 0) {
        return 0;
    }
    let total: i64 = alpha.iter().map(|&a| ((n - a) % n) as i64).sum();
    total / n as i64 - 1
}

/// Pair-counting `dim S(G)` straight from the span.
pub fn naive_dim_sg(d: &CoverDatum) -> u64 {
    let n = d.modulus();
    let mut total = 0i64;
    let mut seen = BTreeSet::new();
    for a in naive_span(d) {
        if a.iter().all(|&x| x == 0) || seen.contains(&a) {
            continue;
        }
        let dual: Vec<u32> = a.iter().map(|&x| (n - x) % n).collect();
        let (da, db) = (naive_dim(&a, n), naive_dim(&dual, n));
        total += if dual == a { da * (da + 1) / 2 } else { da * db };
        seen.insert(a);
        seen.insert(dual);
    }
    total as u64
}

/// Literal sum over compositions `l_1 + .. + l_s = degree`, `l_k <= caps_k`.
pub fn composition_sum(ctx: &PrimeContext, caps: &[u64], z: &[u64], degree: u64) -> u64 {
    let p = ctx.p();
    fn go(ctx: &PrimeContext, caps: &[u64], z: &[u64], left: u64, acc: u64) -> u64 {
        let p = ctx.p();
        if caps.is_empty() {
            return if left == 0 { acc } else { 0 };
        }
        let mut total = 0;
        for l in 0..=caps[0].min(left) {
            let term = acc * ctx.binom(caps[0], l) % p * pow_mod(z[0], l, p) % p;
            total = (total + go(ctx, &caps[1..], &z[1..], left - l, term)) % p;
        }
        total
    }
    go(ctx, caps, z, degree, 1) % p
}

