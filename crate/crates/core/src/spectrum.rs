//! Character eigenspace inventory: associated tuples, eigenspace dimensions
//! `d_n`, `dim S(G)` and condition (*).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cover::{CoverDatum, Tuple};
use crate::error::Result;
use crate::residue::{gcd_with, neg_mod};

/// A character `n` together with its associated tuple `alpha = n . A`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character {
    pub n: Tuple,
    pub alpha: Tuple,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenspaceRecord {
    pub character: Character,
    /// `d_n`
    pub d: u32,
    /// `d_{-n}`
    pub d_dual: u32,
    /// `2n = 0` with `n != 0`
    pub order2: bool,
    pub nonzero_count: u32,
}

impl EigenspaceRecord {
    /// Unordered type `{d_n, d_{-n}}` as `(max, min)`.
    pub fn type_pair(&self) -> (u32, u32) {
        (self.d.max(self.d_dual), self.d.min(self.d_dual))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumTable {
    /// One record per distinct nonzero associated tuple, ordered by `alpha`.
    pub records: Vec<EigenspaceRecord>,
    pub genus: u64,
    pub branch_points: usize,
}

/// `d` for an associated tuple: `-1 + sum <-alpha_j / N>`, and 0 for the
/// trivial character.
pub fn dim_for_alpha(alpha: &[u32], modulus: u32) -> u32 {
    if alpha.iter().all(|&a| a == 0) {
        return 0;
    }
    let total: u64 = alpha.iter().map(|&a| neg_mod(a, modulus) as u64).sum();
    assert_eq!(total % modulus as u64, 0, "associated tuple {alpha:?} does not sum to 0 mod {modulus}");
    (total / modulus as u64 - 1) as u32
}

fn negate(alpha: &[u32], modulus: u32) -> Tuple {
    alpha.iter().map(|&a| neg_mod(a, modulus)).collect()
}

pub fn alpha_tuple(datum: &CoverDatum, n: &[u32]) -> Result<Tuple> {
    datum.alpha(n)
}

pub fn eigenspace_dim(datum: &CoverDatum, n: &[u32]) -> Result<u32> {
    Ok(dim_for_alpha(&datum.alpha(n)?, datum.modulus()))
}

/// Eigenspace records in canonical (lexicographic `alpha`) order.
pub fn spectrum_table(datum: &CoverDatum) -> Result<SpectrumTable> {
    let modulus = datum.modulus();
    let mut first_n: BTreeMap<Tuple, Tuple> = BTreeMap::new();
    for (n, alpha) in datum.characters() {
        if alpha.iter().any(|&a| a != 0) {
            first_n.entry(alpha).or_insert(n);
        }
    }
    let records = first_n
        .into_iter()
        .map(|(alpha, n)| {
            let dual = negate(&alpha, modulus);
            EigenspaceRecord {
                d: dim_for_alpha(&alpha, modulus),
                d_dual: dim_for_alpha(&dual, modulus),
                order2: dual == alpha,
                nonzero_count: alpha.iter().filter(|&&a| a != 0).count() as u32,
                character: Character { n, alpha },
            }
        })
        .collect();
    Ok(SpectrumTable { records, genus: datum.genus()?, branch_points: datum.branch_points() })
}

impl SpectrumTable {
    /// `sum over pairs {n,-n}, 2n != 0, of d_n d_{-n}` plus
    /// `sum over 2n = 0 of d_n (d_n + 1) / 2`.
    pub fn dim_sg(&self) -> u64 {
        self.records
            .iter()
            .map(|r| {
                if r.order2 {
                    // each order-2 character appears once
                    2 * (r.d as u64 * (r.d as u64 + 1) / 2)
                } else {
                    // each unordered pair appears twice
                    r.d as u64 * r.d_dual as u64
                }
            })
            .sum::<u64>()
            / 2
    }

    /// First record (canonical order) with `{d, d_dual} != {0, s-2}` and
    /// `d + d_dual >= s - 2`.
    pub fn condition_star(&self) -> Option<&EigenspaceRecord> {
        let target = self.branch_points as u32 - 2;
        self.records.iter().find(|r| r.type_pair() != (target, 0) && r.d + r.d_dual >= target)
    }

    pub fn to_csv(&self) -> String {
        let s = self.branch_points;
        let mut out = String::new();
        let header: Vec<String> = (1..=s).map(|j| format!("alpha_{j}")).collect();
        out.push_str(&header.join(","));
        out.push_str(",d,d_dual,order2\n");
        for r in &self.records {
            let cells: Vec<String> = r.character.alpha.iter().map(u32::to_string).collect();
            out.push_str(&format!("{},{},{},{}\n", cells.join(","), r.d, r.d_dual, r.order2));
        }
        out
    }
}

pub fn dim_sg(datum: &CoverDatum) -> Result<u64> {
    Ok(spectrum_table(datum)?.dim_sg())
}

pub fn condition_star(datum: &CoverDatum) -> Result<Option<Character>> {
    Ok(spectrum_table(datum)?.condition_star().map(|r| r.character.clone()))
}

/// The single-row datum `(N/f, alpha/f)` of a character whose associated
/// tuple has no zero entry; `None` otherwise.
pub fn cyclic_datum_of_character(datum: &CoverDatum, n: &[u32]) -> Result<Option<CoverDatum>> {
    let alpha = datum.alpha(n)?;
    Ok(cyclic_datum_of_alpha(&alpha, datum.modulus()))
}

pub(crate) fn cyclic_datum_of_alpha(alpha: &[u32], modulus: u32) -> Option<CoverDatum> {
    if alpha.contains(&0) {
        return None;
    }
    let f = gcd_with(modulus, alpha.iter().copied());
    let row: Vec<i64> = alpha.iter().map(|&a| (a / f) as i64).collect();
    Some(CoverDatum::new(modulus / f, &[row]).expect("associated tuple with nonzero entries is a valid row"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(text: &str) -> CoverDatum {
        text.parse().unwrap()
    }

    #[test]
    fn alpha_examples() {
        let d = datum("3:21210/00111");
        assert_eq!(alpha_tuple(&d, &[1, 1]).unwrap(), vec![2, 1, 0, 2, 1]);
        assert_eq!(alpha_tuple(&d, &[0, 0]).unwrap(), vec![0; 5]);
        assert_eq!(alpha_tuple(&datum("12:4,6,7,7"), &[7]).unwrap(), vec![4, 6, 1, 1]);
        assert!(alpha_tuple(&d, &[1]).is_err());
    }

    #[test]
    fn dimension_examples() {
        assert_eq!(eigenspace_dim(&datum("3:21210/00111"), &[1, 1]), Ok(1));
        assert_eq!(eigenspace_dim(&datum("11:1,1,1,1,7"), &[1]), Ok(3));
        assert_eq!(eigenspace_dim(&datum("3:21210/00111"), &[0, 0]), Ok(0));
    }

    #[test]
    fn tables() {
        let t = spectrum_table(&datum("3:21210/00111")).unwrap();
        assert_eq!(t.records.len(), 8);
        assert_eq!(t.records.iter().filter(|r| r.d == 1).count(), 7);
        assert_eq!(t.records.iter().map(|r| r.d as u64).sum::<u64>(), 7);

        let t = spectrum_table(&datum("6:112233")).unwrap();
        let ds: Vec<u32> = t.records.iter().map(|r| r.d).collect();
        // alpha order: n=1 (1,1,2,2,3,3), n=2 (2,2,4,4,0,0), n=3 (3,3,0,0,3,3), n=4, n=5
        assert_eq!(ds, vec![3, 1, 1, 1, 1]);

        let t = spectrum_table(&datum("2:11111111")).unwrap();
        assert_eq!(t.records.len(), 1);
        assert!(t.records[0].order2);
        assert_eq!(t.records[0].d, 3);
    }

    #[test]
    fn dim_sg_examples() {
        assert_eq!(dim_sg(&datum("6:112233")), Ok(5));
        assert_eq!(dim_sg(&datum("12:4,6,7,7")), Ok(1));
        assert_eq!(dim_sg(&datum("3:21210/00111")), Ok(3));
    }

    #[test]
    fn condition_star_examples() {
        assert_eq!(condition_star(&datum("3:21210/00111")), Ok(None));
        let w = condition_star(&datum("11:1,1,1,1,7")).unwrap().unwrap();
        assert_eq!(w.n, vec![3]);
        let w = condition_star(&datum("2:11111111")).unwrap().unwrap();
        assert_eq!(w.n, vec![1]);
    }

    #[test]
    fn cyclic_quotients() {
        let d = datum("3:21210/00111");
        assert_eq!(cyclic_datum_of_character(&d, &[1, 0]), Ok(None));
        assert_eq!(cyclic_datum_of_character(&d, &[1, 1]), Ok(None));
        let d = datum("6:112233");
        assert_eq!(cyclic_datum_of_character(&d, &[1]).unwrap(), Some(d.clone()));
        // 2 * (1,1,2,2,3,3) has a zero; 5 * row = (5,5,4,4,3,3) stays over Z/6
        assert_eq!(cyclic_datum_of_character(&d, &[5]).unwrap().unwrap().to_text(), "6:554433");
        let d = datum("12:4,6,7,7");
        assert_eq!(cyclic_datum_of_character(&d, &[2]), Ok(None));
        assert_eq!(cyclic_datum_of_character(&d, &[3]), Ok(None));
    }

    #[test]
    fn csv_layout() {
        let csv = spectrum_table(&datum("2:1111")).unwrap().to_csv();
        assert_eq!(csv, "alpha_1,alpha_2,alpha_3,alpha_4,d,d_dual,order2\n1,1,1,1,1,1,true\n");
    }
}
