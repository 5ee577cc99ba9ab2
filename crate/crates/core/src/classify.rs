//! Decision rules turning a spectrum into a verdict, plus the two table
//! generators built on them.
//!
//! Rules are tried in order and the first hit is reported:
//!
//! * `R1` Special: `dim S(G) = s - 3`.
//! * `R2` NotSpecial: the sum of `delta` over distinct non-unitary
//!   eigenspace types exceeds `s - 3`.
//! * `R3` NotSpecial: `dim S(G) > s - 3` and condition (*) holds.
//! * `R4` NotSpecial: some character with no zero in its associated tuple
//!   defines a cyclic family that is not special. For single-row data,
//!   special is equivalent to `dim S(G) = s - 3`.
//!
//! Anything else is `Undecided`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cover::{CanonicalKey, CoverDatum, Equivalence, Tuple};
use crate::enumerate::{shape_patterns, Shape};
use crate::error::{Error, Result};
use crate::residue::{gcd_with, units};
use crate::spectrum::{cyclic_datum_of_alpha, dim_for_alpha, spectrum_table, SpectrumTable};

/// Unordered eigenspace type `{a, b}` with `a >= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EigenspaceType {
    pub a: u32,
    pub b: u32,
    pub order2: bool,
}

impl EigenspaceType {
    pub fn new(d: u32, d_dual: u32, order2: bool) -> Result<Self> {
        let (a, b) = (d.max(d_dual), d.min(d_dual));
        if order2 && a != b {
            return Err(Error::UnsupportedFactor { a, b, order2 });
        }
        Ok(EigenspaceType { a, b, order2 })
    }

    pub fn is_unitary(&self) -> bool {
        self.b == 0
    }
}

/// Dimension of the symmetric space of the simple factor attached to a type:
/// `pq` for `psu(p,q)`, `p(p+1)/2` for `psp_2p`, 0 for compact factors.
pub fn delta(t: EigenspaceType) -> u64 {
    if t.b == 0 {
        0
    } else if t.order2 {
        t.a as u64 * (t.a as u64 + 1) / 2
    } else {
        t.a as u64 * t.b as u64
    }
}

/// Distinct non-unitary types, each with the first record carrying it.
fn distinct_types(table: &SpectrumTable) -> Result<BTreeMap<EigenspaceType, Tuple>> {
    let mut types = BTreeMap::new();
    for r in &table.records {
        let t = EigenspaceType::new(r.d, r.d_dual, r.order2)?;
        if !t.is_unitary() {
            types.entry(t).or_insert_with(|| r.character.alpha.clone());
        }
    }
    Ok(types)
}

/// Sum of `delta` over the distinct non-unitary types of the table.
pub fn monodromy_lower_bound(table: &SpectrumTable) -> Result<u64> {
    Ok(distinct_types(table)?.keys().map(|&t| delta(t)).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    Special,
    NotSpecial,
    Undecided,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Special => "Special",
            Verdict::NotSpecial => "NotSpecial",
            Verdict::Undecided => "Undecided",
        })
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Special" | "special" => Ok(Verdict::Special),
            "NotSpecial" | "not-special" => Ok(Verdict::NotSpecial),
            "Undecided" | "undecided" => Ok(Verdict::Undecided),
            other => Err(Error::Parse(format!("unknown verdict {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    R1,
    R2,
    R3,
    R4,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `dim S(G)` equals the moduli dimension.
    Dimension { dim_sg: u64, moduli_dim: u64 },
    /// A non-unitary eigenspace type and its simple-factor contribution.
    Factor { alpha: Tuple, a: u32, b: u32, order2: bool, delta: u64 },
    /// The character satisfying condition (*).
    StarCharacter { alpha: Tuple, d: u32, d_dual: u32 },
    /// A character whose cyclic quotient family is not special.
    CyclicQuotient { alpha: Tuple, datum: String, dim_sg: u64, moduli_dim: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    /// `s - 3`
    pub moduli: u64,
    pub dim_sg: u64,
    pub monodromy_bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub rule: Option<Rule>,
    pub witnesses: Vec<Witness>,
    pub dims: Dims,
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub const CSV_HEADER: &'static str = "verdict,rule,moduli_dim,dim_sg,monodromy_bound";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.verdict,
            self.rule.map(|r| r.to_string()).unwrap_or_default(),
            self.dims.moduli,
            self.dims.dim_sg,
            self.dims.monodromy_bound
        )
    }
}

/// `dim S(G) = s - 3` decides specialness for single-row data.
fn cyclic_is_special(datum: &CoverDatum) -> Result<(bool, u64)> {
    let dim = spectrum_table(datum)?.dim_sg();
    Ok((dim == datum.branch_points() as u64 - 3, dim))
}

pub fn classify(datum: &CoverDatum) -> Result<ClassificationReport> {
    let datum = datum.reduced();
    let table = spectrum_table(&datum)?;
    classify_table(&table, datum.modulus())
}

/// Applies R1..R4 to a precomputed spectrum.
pub fn classify_table(table: &SpectrumTable, modulus: u32) -> Result<ClassificationReport> {
    let moduli = table.branch_points as u64 - 3;
    let dim_sg = table.dim_sg();
    let dims = Dims { moduli, dim_sg, monodromy_bound: monodromy_lower_bound(table)? };
    let report = |verdict, rule, witnesses| Ok(ClassificationReport { verdict, rule, witnesses, dims });

    if dim_sg == moduli {
        return report(Verdict::Special, Some(Rule::R1), vec![Witness::Dimension { dim_sg, moduli_dim: moduli }]);
    }
    if let Some(w) = rule_monodromy(table)? {
        return report(Verdict::NotSpecial, Some(Rule::R2), w);
    }
    if let Some(w) = rule_condition_star(table) {
        return report(Verdict::NotSpecial, Some(Rule::R3), w);
    }
    if let Some(w) = rule_cyclic_quotient(table, modulus)? {
        return report(Verdict::NotSpecial, Some(Rule::R4), w);
    }
    report(Verdict::Undecided, None, Vec::new())
}

/// R2: one witness per distinct non-unitary type when their `delta` sum
/// exceeds `s - 3`.
pub fn rule_monodromy(table: &SpectrumTable) -> Result<Option<Vec<Witness>>> {
    let types = distinct_types(table)?;
    let bound: u64 = types.keys().map(|&t| delta(t)).sum();
    if bound <= table.branch_points as u64 - 3 {
        return Ok(None);
    }
    Ok(Some(
        types
            .iter()
            .map(|(&t, alpha)| Witness::Factor { alpha: alpha.clone(), a: t.a, b: t.b, order2: t.order2, delta: delta(t) })
            .collect(),
    ))
}

/// R3: `dim S(G) > s - 3` together with condition (*).
pub fn rule_condition_star(table: &SpectrumTable) -> Option<Vec<Witness>> {
    if table.dim_sg() <= table.branch_points as u64 - 3 {
        return None;
    }
    let r = table.condition_star()?;
    Some(vec![Witness::StarCharacter { alpha: r.character.alpha.clone(), d: r.d, d_dual: r.d_dual }])
}

/// R4: first character (canonical order) without zeros in its associated
/// tuple whose cyclic family has `dim S(G) != s - 3`.
pub fn rule_cyclic_quotient(table: &SpectrumTable, modulus: u32) -> Result<Option<Vec<Witness>>> {
    let moduli = table.branch_points as u64 - 3;
    for r in &table.records {
        let Some(cyclic) = cyclic_datum_of_alpha(&r.character.alpha, modulus) else { continue };
        let (special, cyclic_dim) = cyclic_is_special(&cyclic)?;
        if !special {
            return Ok(Some(vec![Witness::CyclicQuotient {
                alpha: r.character.alpha.clone(),
                datum: cyclic.to_text(),
                dim_sg: cyclic_dim,
                moduli_dim: moduli,
            }]));
        }
    }
    Ok(None)
}

/// `dim S(G)` of the single-row datum `(N, a)` with `gcd(N, a) = 1`, where
/// `k -> k a` is injective.
pub fn cyclic_dim_sg(row: &[u32], modulus: u32) -> u64 {
    let big_n = modulus as u64;
    let dims: Vec<u64> = (0..big_n)
        .map(|k| {
            let alpha: Vec<u32> = row.iter().map(|&a| (k * a as u64 % big_n) as u32).collect();
            dim_for_alpha(&alpha, modulus) as u64
        })
        .collect();
    let twice: u64 = (1..big_n)
        .map(|k| {
            let dual = big_n - k;
            if dual == k {
                dims[k as usize] * (dims[k as usize] + 1)
            } else {
                dims[k as usize] * dims[dual as usize]
            }
        })
        .sum();
    twice / 2
}

/// Representative of the unit orbit of a primitive row: `min_u sort(u a)`.
pub fn cyclic_orbit_key(row: &[u32], modulus: u32) -> Tuple {
    units(modulus)
        .into_iter()
        .map(|u| {
            let mut v: Tuple = row.iter().map(|&a| ((u as u64 * a as u64) % modulus as u64) as u32).collect();
            v.sort_unstable();
            v
        })
        .min()
        .expect("1 is a unit")
}

/// Single-row special families with `4 <= s <= s_max`, `N <= n_max`, up to
/// isomorphism, sorted by `(N, s, canonical key)`.
pub fn cyclic_special_table(n_max: u32, s_max: usize) -> Vec<CoverDatum> {
    let jobs: Vec<(u32, usize)> = (2..=n_max).flat_map(|n| (4..=s_max).map(move |s| (n, s))).collect();
    let mut found: Vec<(u32, usize, CanonicalKey, CoverDatum)> = jobs
        .into_par_iter()
        .flat_map_iter(|(modulus, s)| {
            let mut hits = Vec::new();
            for_each_sorted_row(modulus, s, &mut |row| {
                if gcd_with(modulus, row.iter().copied()) != 1 || cyclic_orbit_key(row, modulus) != row {
                    return;
                }
                if cyclic_dim_sg(row, modulus) == s as u64 - 3 {
                    hits.push(CoverDatum::from_rows(modulus, &[row]).expect("enumerated rows are valid"));
                }
            });
            hits.into_iter().map(move |d| (modulus, s, d.canonical_key(Equivalence::RowSpanColumns), d))
        })
        .collect();
    found.sort_by(|x, y| (x.0, x.1, &x.2).cmp(&(y.0, y.1, &y.2)));
    found.into_iter().map(|x| x.3).collect()
}

/// Calls `f` on every non-decreasing row in `[1, N)^s` summing to 0 mod N.
fn for_each_sorted_row(modulus: u32, s: usize, f: &mut impl FnMut(&[u32])) {
    fn go(modulus: u32, s: usize, row: &mut Vec<u32>, sum: u32, f: &mut impl FnMut(&[u32])) {
        if row.len() + 1 == s {
            let last = (modulus - sum % modulus) % modulus;
            if last != 0 && last >= *row.last().unwrap_or(&1) {
                row.push(last);
                f(row);
                row.pop();
            }
            return;
        }
        let lo = *row.last().unwrap_or(&1);
        for x in lo..modulus {
            row.push(x);
            go(modulus, s, row, (sum + x) % modulus, f);
            row.pop();
        }
    }
    go(modulus, s, &mut Vec::with_capacity(s), 0, f);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanOptions {
    /// Skip data with a row `r` where `gcd(N, r) > 1` (reducible covers).
    pub require_primitive_rows: bool,
    pub equivalence: Equivalence,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { require_primitive_rows: true, equivalence: Equivalence::RowSpanColumns }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Survivor {
    pub shape: Shape,
    pub datum: CoverDatum,
    pub key: CanonicalKey,
    pub report: ClassificationReport,
}

#[derive(Debug, Clone, Default)]
pub struct Theorem2Scan {
    pub survivors: BTreeMap<Shape, Vec<Survivor>>,
    /// Raw shape instances examined (after the primitivity filter).
    pub examined: u64,
}

impl Theorem2Scan {
    pub fn keys(&self) -> BTreeSet<CanonicalKey> {
        self.survivors.values().flatten().map(|s| s.key.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.survivors.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Classifies every 2x5 datum of shapes I-IV over the given moduli and keeps
/// those not excluded, one per canonical key.
pub fn theorem2_scan(moduli: &[u32], options: ScanOptions) -> Result<Theorem2Scan> {
    if let Some(&bad) = moduli.iter().find(|&&n| n < 3) {
        return Err(Error::InvalidSpec(format!("modulus {bad} < 3")));
    }
    let jobs: Vec<(Shape, u32)> = Shape::ALL.iter().flat_map(|&sh| moduli.iter().map(move |&n| (sh, n))).collect();
    let results: Vec<Result<(u64, Vec<Survivor>)>> = jobs
        .into_par_iter()
        .map(|(shape, modulus)| {
            let mut examined = 0;
            let mut hits = Vec::new();
            for datum in shape_patterns(shape, modulus) {
                if options.require_primitive_rows && !datum.rows_primitive() {
                    continue;
                }
                examined += 1;
                let report = classify(&datum)?;
                if report.verdict != Verdict::NotSpecial {
                    let key = datum.canonical_key(options.equivalence);
                    hits.push(Survivor { shape, datum, key, report });
                }
            }
            Ok((examined, hits))
        })
        .collect();
    let mut scan = Theorem2Scan::default();
    let mut seen = BTreeSet::new();
    // jobs are ordered by (shape, modulus); first occurrence wins
    for result in results {
        let (examined, hits) = result?;
        scan.examined += examined;
        for hit in hits {
            if seen.insert(hit.key.clone()) {
                scan.survivors.entry(hit.shape).or_default().push(hit);
            }
        }
    }
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum(text: &str) -> CoverDatum {
        text.parse().unwrap()
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta(EigenspaceType::new(1, 2, false).unwrap()), 2);
        assert_eq!(delta(EigenspaceType::new(4, 0, false).unwrap()), 0);
        assert_eq!(delta(EigenspaceType::new(3, 3, true).unwrap()), 6);
        assert!(matches!(EigenspaceType::new(2, 1, true), Err(Error::UnsupportedFactor { .. })));
    }

    #[test]
    fn bound_examples() {
        let t = spectrum_table(&datum("3:11100/00111")).unwrap();
        assert_eq!(monodromy_lower_bound(&t), Ok(3));
        let t = spectrum_table(&datum("3:21210/00111")).unwrap();
        assert_eq!(monodromy_lower_bound(&t), Ok(1));
        let t = spectrum_table(&datum("3:111")).unwrap();
        assert!(t.records.iter().all(|r| r.d == 0 || r.d_dual == 0));
        assert_eq!(monodromy_lower_bound(&t), Ok(0));
    }

    #[test]
    fn verdict_examples() {
        let r = classify(&datum("12:4,6,7,7")).unwrap();
        assert_eq!((r.verdict, r.rule), (Verdict::Special, Some(Rule::R1)));
        let r = classify(&datum("6:112233")).unwrap();
        assert_eq!(r.verdict, Verdict::NotSpecial);
        assert_eq!((r.dims.moduli, r.dims.dim_sg), (3, 5));
        assert_eq!(classify(&datum("3:21210/00111")).unwrap().verdict, Verdict::Undecided);
        assert_eq!(classify(&datum("4:22310/00112")).unwrap().verdict, Verdict::Undecided);
        let r = classify(&datum("2:11111111")).unwrap();
        assert_eq!((r.verdict, r.rule), (Verdict::NotSpecial, Some(Rule::R2)));
        let r = classify(&datum("11:1,1,1,1,7")).unwrap();
        assert_eq!((r.verdict, r.rule), (Verdict::NotSpecial, Some(Rule::R3)));
    }

    #[test]
    fn cyclic_quotient_rule() {
        let t = spectrum_table(&datum("6:112233")).unwrap();
        let w = rule_cyclic_quotient(&t, 6).unwrap().unwrap();
        assert_eq!(
            w,
            vec![Witness::CyclicQuotient { alpha: vec![1, 1, 2, 2, 3, 3], datum: "6:112233".into(), dim_sg: 5, moduli_dim: 3 }]
        );
        // every associated tuple of III* has a zero entry
        let t = spectrum_table(&datum("3:21210/00111")).unwrap();
        assert_eq!(rule_cyclic_quotient(&t, 3), Ok(None));
        // a special cyclic family is its own quotient and is not excluded
        let t = spectrum_table(&datum("4:11222")).unwrap();
        assert_eq!(rule_cyclic_quotient(&t, 4), Ok(None));
    }

    #[test]
    fn hyperelliptic_octic_satisfies_r3_as_well() {
        let t = spectrum_table(&datum("2:11111111")).unwrap();
        assert!(rule_condition_star(&t).is_some());
        assert!(rule_monodromy(&t).unwrap().is_some());
    }

    #[test]
    fn shape_two_witnesses() {
        for text in ["3:11100/00111", "4:11200/00211", "4:21100/00112", "4:11200/00112"] {
            let r = classify(&datum(text)).unwrap();
            assert_eq!((r.verdict, r.rule), (Verdict::NotSpecial, Some(Rule::R2)), "{text}");
            let pairs: Vec<(u32, u32)> = r
                .witnesses
                .iter()
                .filter_map(|w| match w {
                    Witness::Factor { a, b, .. } => Some((*a, *b)),
                    _ => None,
                })
                .collect();
            assert!(pairs.contains(&(2, 1)) && pairs.contains(&(1, 1)), "{text}: {pairs:?}");
        }
    }

    #[test]
    fn cyclic_fast_paths_agree() {
        for text in ["12:4,6,7,7", "6:112233", "11:1,1,1,1,7", "8:5542", "2:111111"] {
            let d = datum(text);
            assert_eq!(cyclic_dim_sg(&d.rows()[0], d.modulus()), spectrum_table(&d).unwrap().dim_sg(), "{text}");
        }
        assert_eq!(cyclic_orbit_key(&[5, 5, 4, 2], 8), vec![1, 1, 2, 4]);
    }

    #[test]
    fn small_cyclic_table() {
        let table = cyclic_special_table(8, 6);
        let texts: Vec<String> = table.iter().map(CoverDatum::to_text).collect();
        assert!(texts.contains(&"4:11222".to_string()), "{texts:?}");
        assert!(table.iter().any(|d| d.is_isomorphic(&datum("8:5542"), Equivalence::RowSpanColumns)));
        assert_eq!(cyclic_special_table(2, 4).iter().map(CoverDatum::to_text).collect::<Vec<_>>(), vec!["2:1111"]);
    }

    #[test]
    fn report_json_round_trip() {
        let r = classify(&datum("6:112233")).unwrap();
        let back: ClassificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(r.to_csv_row(), "NotSpecial,R2,3,5,5");
    }
}
