use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::PrimeContext;

/// One monomial of a [`SparsePoly`] in wire form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub exp: Vec<u32>,
    pub coef: u64,
}

/// Polynomial in `z_1..z_s` over `F_p`, stored as exponent vector -> nonzero
/// coefficient. Serializes as a list of `{"exp": [...], "coef": c}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<Term>", try_from = "PolyWire")]
pub struct SparsePoly {
    p: u64,
    vars: usize,
    terms: BTreeMap<Vec<u32>, u64>,
}

/// Deserialization needs `p` and `s` from the context; a bare term list is
/// read with `p = 0` (unknown) and `s` taken from the first exponent.
#[derive(Deserialize)]
#[serde(transparent)]
struct PolyWire(Vec<Term>);

impl TryFrom<PolyWire> for SparsePoly {
    type Error = String;

    fn try_from(wire: PolyWire) -> Result<Self, String> {
        let vars = wire.0.first().map_or(0, |t| t.exp.len());
        let mut terms = BTreeMap::new();
        for t in wire.0 {
            if t.exp.len() != vars {
                return Err("exponent vectors of different lengths".into());
            }
            terms.insert(t.exp, t.coef);
        }
        Ok(SparsePoly { p: 0, vars, terms })
    }
}

impl From<SparsePoly> for Vec<Term> {
    fn from(poly: SparsePoly) -> Self {
        poly.terms.into_iter().map(|(exp, coef)| Term { exp, coef }).collect()
    }
}

impl SparsePoly {
    pub fn zero(p: u64, vars: usize) -> Self {
        SparsePoly { p, vars, terms: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn total_degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.keys().map(|e| e.iter().sum())
    }

    pub fn evaluate(&self, z: &[u64]) -> u64 {
        let p = self.p;
        self.terms
            .iter()
            .map(|(exp, &c)| exp.iter().zip(z).fold(c % p, |acc, (&e, &x)| acc * crate::residue::pow_mod(x, e as u64, p) % p))
            .fold(0, |a, b| (a + b) % p)
    }

    /// Substitutes `z_var = 0`.
    pub fn restrict_zero(&self, var: usize) -> SparsePoly {
        SparsePoly {
            p: self.p,
            vars: self.vars,
            terms: self.terms.iter().filter(|(e, _)| e[var] == 0).map(|(e, &c)| (e.clone(), c)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("terms serialize")
    }
}

/// Largest `r` with `z_j^r` dividing `e |_{z_i = 0}`; `None` when the
/// restriction vanishes. Indices are 0-based.
pub fn divisibility_order(entry: &SparsePoly, i: usize, j: usize) -> Option<u32> {
    assert_ne!(i, j, "branch indices must differ");
    entry.restrict_zero(i).terms.keys().map(|e| e[j]).min()
}

/// Number of exponent vectors `0 <= l_k <= caps_k` with `sum l = degree`.
pub(crate) fn count_terms(caps: &[u64], degree: u64) -> u128 {
    let top = degree as usize;
    let mut ways = vec![0u128; top + 1];
    ways[0] = 1;
    for &c in caps {
        let mut next = vec![0u128; top + 1];
        // prefix sums over the window [a - c, a]
        let mut window: u128 = 0;
        for a in 0..=top {
            window = window.saturating_add(ways[a]);
            if a > c as usize {
                window -= ways[a - c as usize - 1];
            }
            next[a] = window;
        }
        ways = next;
    }
    ways[top]
}

/// Sum over compositions of `degree` bounded by `caps` of
/// `prod binom(caps_k, l_k) z^l`.
pub(crate) fn expand(ctx: &PrimeContext, caps: &[u64], degree: u64) -> SparsePoly {
    let p = ctx.p();
    let s = caps.len();
    let mut poly = SparsePoly::zero(p, s);
    // suffix capacity lets the recursion skip dead branches
    let mut suffix = vec![0u64; s + 1];
    for k in (0..s).rev() {
        suffix[k] = suffix[k + 1] + caps[k];
    }
    let mut exp = vec![0u32; s];
    #[allow(clippy::too_many_arguments)]
    fn go(
        ctx: &PrimeContext,
        caps: &[u64],
        suffix: &[u64],
        k: usize,
        left: u64,
        coef: u64,
        exp: &mut Vec<u32>,
        out: &mut BTreeMap<Vec<u32>, u64>,
    ) {
        if k == caps.len() {
            if left == 0 && coef != 0 {
                out.insert(exp.clone(), coef);
            }
            return;
        }
        let lo = left.saturating_sub(suffix[k + 1]);
        let hi = caps[k].min(left);
        for l in lo..=hi {
            exp[k] = l as u32;
            let c = coef * ctx.binom(caps[k], l) % ctx.p();
            go(ctx, caps, suffix, k + 1, left - l, c, exp, out);
        }
        exp[k] = 0;
    }
    if suffix[0] >= degree {
        go(ctx, caps, &suffix, 0, degree, 1, &mut exp, &mut poly.terms);
    }
    poly
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hasse_witt::choose_prime;

    #[test]
    fn counts_match_expansion() {
        let ctx = choose_prime(3, 7);
        let caps = [2, 4, 0, 2, 4];
        for degree in 0..=12 {
            assert_eq!(count_terms(&caps, degree), expand(&ctx, &caps, degree).len() as u128, "degree {degree}");
        }
        assert_eq!(count_terms(&caps, 13), 0);
    }

    #[test]
    fn orders() {
        let ctx = choose_prime(2, 3);
        // e_2(z_1..z_4)
        let e2 = expand(&ctx, &[1, 1, 1, 1], 2);
        // z_1 = 0 leaves z2z3 + z2z4 + z3z4: not divisible by z_2
        assert_eq!(divisibility_order(&e2, 0, 1), Some(0));
        let zero = SparsePoly::zero(3, 4);
        assert_eq!(divisibility_order(&zero, 0, 1), None);
        // e_3 with z_1 = 0 is z2 z3 z4
        let e3 = expand(&ctx, &[1, 1, 1, 1], 3);
        assert_eq!(divisibility_order(&e3, 0, 1), Some(1));
        let e4 = expand(&ctx, &[1, 1, 1, 1], 4);
        assert_eq!(divisibility_order(&e4, 0, 1), None);
    }

    #[test]
    fn json_terms() {
        let ctx = choose_prime(2, 3);
        let e = expand(&ctx, &[1, 1, 0], 2);
        assert_eq!(e.to_json(), r#"[{"exp":[1,1,0],"coef":1}]"#);
        let back: SparsePoly = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(back.terms().collect::<Vec<_>>(), e.terms().collect::<Vec<_>>());
    }
}
