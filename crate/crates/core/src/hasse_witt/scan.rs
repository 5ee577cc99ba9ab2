use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{elliptic_trace_oracle, is_ordinary_at, PrimeContext};
use crate::cover::CoverDatum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    /// Every ordered tuple of distinct residues.
    Exhaustive,
    /// `count` tuples drawn with a seeded generator.
    Sampled { count: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinarityScan {
    pub p: u64,
    pub tuples: u64,
    pub ordinary: u64,
    /// `(agreements, comparisons)` against the elliptic oracle; only for the
    /// family `(2, (1,1,1,1))`.
    pub oracle: Option<(u64, u64)>,
}

impl OrdinarityScan {
    pub fn density(&self) -> f64 {
        if self.tuples == 0 {
            0.0
        } else {
            self.ordinary as f64 / self.tuples as f64
        }
    }
}

fn distinct_tuples(p: u64, s: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(s);
    fn go(p: u64, s: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for x in 0..p {
            if !cur.contains(&x) {
                cur.push(x);
                go(p, s, cur, out);
                cur.pop();
            }
        }
    }
    go(p, s, &mut cur, &mut out);
    out
}

fn sampled_tuples(p: u64, s: usize, count: usize, seed: u64) -> Vec<Vec<u64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<u64> = (0..p).collect();
    (0..count).map(|_| pool.choose_multiple(&mut rng, s).copied().collect()).collect()
}

/// Ordinarity over many point tuples, with the elliptic cross-check when the
/// datum is the Legendre-type family.
pub fn ordinarity_scan(datum: &CoverDatum, ctx: &PrimeContext, mode: ScanMode) -> Result<OrdinarityScan> {
    let s = datum.branch_points();
    if (ctx.p() as usize) < s {
        return Err(Error::InvalidSpec(format!("p = {} has fewer than {s} residues", ctx.p())));
    }
    let tuples = match mode {
        ScanMode::Exhaustive => distinct_tuples(ctx.p(), s),
        ScanMode::Sampled { count, seed } => sampled_tuples(ctx.p(), s, count, seed),
    };
    let legendre = datum.modulus() == 2 && s == 4 && ctx.p() > 2;
    let results: Vec<Result<(bool, Option<bool>)>> = tuples
        .par_iter()
        .map(|z| {
            let ordinary = is_ordinary_at(datum, ctx, z)?;
            let agrees = if legendre {
                let trace = elliptic_trace_oracle(ctx.p(), &[z[0], z[1], z[2], z[3]])?;
                Some(ordinary == (trace.rem_euclid(ctx.p() as i64) != 0))
            } else {
                None
            };
            Ok((ordinary, agrees))
        })
        .collect();
    let mut scan = OrdinarityScan { p: ctx.p(), tuples: 0, ordinary: 0, oracle: legendre.then_some((0, 0)) };
    for r in results {
        let (ordinary, agrees) = r?;
        scan.tuples += 1;
        scan.ordinary += ordinary as u64;
        if let (Some((hit, total)), Some(a)) = (scan.oracle.as_mut(), agrees) {
            *hit += a as u64;
            *total += 1;
        }
    }
    Ok(scan)
}
