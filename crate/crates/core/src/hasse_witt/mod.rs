//! Hasse-Witt blocks in characteristic `p = 1 mod N`.
//!
//! For a character with associated tuple `alpha` and `d = d_n >= 1`, entry
//! `(i, j)` (1-based) of the block is
//!
//! ```text
//! sum_{l_1 + ... + l_s = U(i,j)}  prod_k binom(q [-alpha_k]_N, l_k) z_k^{l_k}
//! U(i,j) = (d - i + 1)(p - 1) + (i - j),   q = (p - 1) / N
//! ```
//!
//! which is the coefficient of `t^U` in `prod_k (1 + t z_k)^{q [-alpha_k]_N}`.

mod elliptic;
mod poly;
mod scan;

pub use elliptic::elliptic_trace_oracle;
pub use poly::{divisibility_order, SparsePoly, Term};
pub use scan::{ordinarity_scan, OrdinarityScan, ScanMode};

use serde::{Deserialize, Serialize};

use crate::cover::{CoverDatum, Tuple};
use crate::error::{Error, Result};
use crate::residue::{det_mod, inv_mod, is_prime, neg_mod};
use crate::spectrum::{dim_for_alpha, spectrum_table, Character};

/// A prime `p = 1 mod N` with factorial tables mod `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeContext {
    p: u64,
    modulus: u32,
    q: u64,
    fact: Vec<u64>,
    inv_fact: Vec<u64>,
}

impl PrimeContext {
    pub fn new(p: u64, modulus: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !(p - 1).is_multiple_of(modulus as u64) {
            return Err(Error::CharacterMismatch { p, modulus });
        }
        let mut fact = vec![1u64; p as usize];
        for k in 1..p as usize {
            fact[k] = fact[k - 1] * k as u64 % p;
        }
        let mut inv_fact = vec![1u64; p as usize];
        inv_fact[p as usize - 1] = inv_mod(fact[p as usize - 1], p);
        for k in (1..p as usize).rev() {
            inv_fact[k - 1] = inv_fact[k] * k as u64 % p;
        }
        Ok(PrimeContext { p, modulus, q: (p - 1) / modulus as u64, fact, inv_fact })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// `binom(a, b) mod p` for `a < p`.
    pub fn binom(&self, a: u64, b: u64) -> u64 {
        assert!(a < self.p, "binomial top {a} must stay below p = {}", self.p);
        if b > a {
            return 0;
        }
        self.fact[a as usize] * self.inv_fact[b as usize] % self.p * self.inv_fact[(a - b) as usize] % self.p
    }

    /// Exponents `q [-alpha_k]_N`.
    pub fn caps(&self, alpha: &[u32]) -> Vec<u64> {
        alpha.iter().map(|&a| self.q * neg_mod(a, self.modulus) as u64).collect()
    }

    /// `U(i, j)` for a block of size `d`, indices 1-based.
    pub fn degree(&self, d: u32, i: u32, j: u32) -> u64 {
        ((d - i + 1) as u64 * (self.p - 1) + i as u64).checked_sub(j as u64).expect("p - 1 >= d - 1")
    }
}

/// Smallest prime `p >= min` with `p = 1 mod N`.
pub fn choose_prime(modulus: u32, min: u64) -> PrimeContext {
    let big_n = modulus as u64;
    let mut p = min.max(2);
    p += (big_n + 1 - p % big_n) % big_n;
    while !is_prime(p) {
        p += big_n;
    }
    PrimeContext::new(p, modulus).expect("p = 1 mod N and prime by construction")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockEntries {
    /// Residues mod `p`, row-major.
    Numeric(Vec<Vec<u64>>),
    Symbolic(Vec<Vec<SparsePoly>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HwBlock {
    pub character: Character,
    pub size: u32,
    pub entries: BlockEntries,
}

impl HwBlock {
    pub fn numeric(&self) -> Option<&[Vec<u64>]> {
        match &self.entries {
            BlockEntries::Numeric(m) => Some(m),
            BlockEntries::Symbolic(_) => None,
        }
    }

    pub fn symbolic(&self) -> Option<&[Vec<SparsePoly>]> {
        match &self.entries {
            BlockEntries::Symbolic(m) => Some(m),
            BlockEntries::Numeric(_) => None,
        }
    }

    /// Row-major integer CSV, one block row per line.
    pub fn to_csv(&self) -> String {
        match &self.entries {
            BlockEntries::Numeric(m) => m
                .iter()
                .map(|row| row.iter().map(u64::to_string).collect::<Vec<_>>().join(",") + "\n")
                .collect(),
            BlockEntries::Symbolic(_) => String::new(),
        }
    }
}

fn character(datum: &CoverDatum, n: &[u32]) -> Result<(Character, u32)> {
    let alpha = datum.alpha(n)?;
    let d = dim_for_alpha(&alpha, datum.modulus());
    Ok((Character { n: n.to_vec(), alpha }, d))
}

fn check_context(datum: &CoverDatum, ctx: &PrimeContext) -> Result<()> {
    if !(ctx.p - 1).is_multiple_of(datum.modulus() as u64) || ctx.modulus != datum.modulus() {
        return Err(Error::CharacterMismatch { p: ctx.p, modulus: datum.modulus() });
    }
    Ok(())
}

fn check_points(datum: &CoverDatum, ctx: &PrimeContext, z: &[u64]) -> Result<Vec<u64>> {
    if z.len() != datum.branch_points() {
        return Err(Error::ShapeMismatch { expected: datum.branch_points(), got: z.len() });
    }
    let z: Vec<u64> = z.iter().map(|&x| x % ctx.p).collect();
    for (i, x) in z.iter().enumerate() {
        if z[..i].contains(x) {
            return Err(Error::RepeatedPoint);
        }
    }
    Ok(z)
}

/// Coefficient of `t^degree` in `prod_k (1 + t z_k)^{caps_k}` over `F_p`.
pub fn coefficient(ctx: &PrimeContext, caps: &[u64], z: &[u64], degree: u64) -> u64 {
    let p = ctx.p;
    let top = degree as usize;
    let mut acc = vec![0u64; top + 1];
    acc[0] = 1;
    let mut reach = 0usize;
    for (&c, &zk) in caps.iter().zip(z) {
        if c == 0 {
            continue;
        }
        // factor_l = binom(c, l) z^l
        let mut factor = Vec::with_capacity(c as usize + 1);
        let mut power = 1u64;
        for l in 0..=c.min(degree) {
            factor.push(ctx.binom(c, l) * power % p);
            power = power * zk % p;
        }
        let new_reach = (reach + c as usize).min(top);
        let mut next = vec![0u64; top + 1];
        for (a, &x) in acc.iter().enumerate().take(reach + 1) {
            if x == 0 {
                continue;
            }
            for (l, &f) in factor.iter().enumerate() {
                if a + l > top {
                    break;
                }
                next[a + l] = (next[a + l] + x * f) % p;
            }
        }
        acc = next;
        reach = new_reach;
    }
    acc[top]
}

/// Numeric block of character `n` at the points `z`.
pub fn hw_block_numeric(datum: &CoverDatum, n: &[u32], ctx: &PrimeContext, z: &[u64]) -> Result<HwBlock> {
    check_context(datum, ctx)?;
    let z = check_points(datum, ctx, z)?;
    let (character, d) = character(datum, n)?;
    let caps = ctx.caps(&character.alpha);
    let entries = (1..=d)
        .map(|i| (1..=d).map(|j| coefficient(ctx, &caps, &z, ctx.degree(d, i, j))).collect())
        .collect();
    Ok(HwBlock { character, size: d, entries: BlockEntries::Numeric(entries) })
}

/// Symbolic block of character `n`; fails when an entry would need more than
/// `term_limit` monomials.
pub fn hw_block_symbolic(datum: &CoverDatum, n: &[u32], ctx: &PrimeContext, term_limit: u128) -> Result<HwBlock> {
    check_context(datum, ctx)?;
    let (character, d) = character(datum, n)?;
    let caps = ctx.caps(&character.alpha);
    let mut total: u128 = 0;
    for i in 1..=d {
        for j in 1..=d {
            total = total.saturating_add(poly::count_terms(&caps, ctx.degree(d, i, j)));
        }
    }
    if total > term_limit {
        return Err(Error::TermLimitExceeded { terms: total, limit: term_limit });
    }
    let entries = (1..=d)
        .map(|i| (1..=d).map(|j| poly::expand(ctx, &caps, ctx.degree(d, i, j))).collect())
        .collect();
    Ok(HwBlock { character, size: d, entries: BlockEntries::Symbolic(entries) })
}

/// Numeric blocks for every nonzero character with `d_n >= 1`, in canonical
/// character order.
pub fn all_blocks_numeric(datum: &CoverDatum, ctx: &PrimeContext, z: &[u64]) -> Result<Vec<HwBlock>> {
    let table = spectrum_table(datum)?;
    table
        .records
        .iter()
        .filter(|r| r.d >= 1)
        .map(|r| hw_block_numeric(datum, &r.character.n, ctx, z))
        .collect()
}

/// Every block over characters with `d_n >= 1` is invertible mod `p`.
pub fn is_ordinary_at(datum: &CoverDatum, ctx: &PrimeContext, z: &[u64]) -> Result<bool> {
    for block in all_blocks_numeric(datum, ctx, z)? {
        let m = block.numeric().expect("numeric block");
        if det_mod(m, ctx.p) == 0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Associated tuples of the characters of `datum` whose block has size
/// `d`, helper for experiments.
pub fn characters_of_size(datum: &CoverDatum, d: u32) -> Result<Vec<Tuple>> {
    Ok(spectrum_table(datum)?.records.into_iter().filter(|r| r.d == d).map(|r| r.character.n).collect())
}
