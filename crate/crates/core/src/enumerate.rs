//! Bounded sweeps over cover data with canonical deduplication.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{classify, ClassificationReport, Verdict};
use crate::cover::{AbelianGroupStructure, CanonicalKey, CoverDatum, Equivalence, Tuple};
use crate::error::{Error, Result};

/// Zero patterns of the 2x5 families I-IV (`true` = nonzero entry).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Shape {
    I,
    II,
    III,
    IV,
}

impl Shape {
    pub const ALL: [Shape; 4] = [Shape::I, Shape::II, Shape::III, Shape::IV];

    pub fn mask(self) -> [[bool; 5]; 2] {
        const T: bool = true;
        const F: bool = false;
        match self {
            Shape::I => [[T, T, T, F, F], [F, F, F, T, T]],
            Shape::II => [[T, T, T, F, F], [F, F, T, T, T]],
            Shape::III => [[T, T, T, T, F], [F, F, T, T, T]],
            Shape::IV => [[T, T, T, T, F], [F, F, F, T, T]],
        }
    }

    pub fn matches(self, datum: &CoverDatum) -> bool {
        datum.row_count() == 2
            && datum.branch_points() == 5
            && self.mask().iter().zip(datum.rows()).all(|(mask, row)| mask.iter().zip(row).all(|(&nz, &x)| nz == (x != 0)))
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" => Ok(Shape::I),
            "II" => Ok(Shape::II),
            "III" => Ok(Shape::III),
            "IV" => Ok(Shape::IV),
            other => Err(Error::Parse(format!("unknown shape {other:?}"))),
        }
    }
}

/// Rows with nonzero entries exactly where `mask` says, summing to 0 mod N.
fn masked_rows(mask: &[bool], modulus: u32) -> Vec<Tuple> {
    let mut out = Vec::new();
    let mut row = vec![0u32; mask.len()];
    fn go(mask: &[bool], modulus: u32, j: usize, sum: u32, row: &mut Tuple, out: &mut Vec<Tuple>) {
        if j == mask.len() {
            if sum == 0 {
                out.push(row.clone());
            }
            return;
        }
        if !mask[j] {
            row[j] = 0;
            go(mask, modulus, j + 1, sum, row, out);
            return;
        }
        for x in 1..modulus {
            row[j] = x;
            go(mask, modulus, j + 1, (sum + x) % modulus, row, out);
        }
    }
    go(mask, modulus, 0, 0, &mut row, &mut out);
    out
}

/// Every 2x5 datum of the given shape over `Z/N`.
pub fn shape_patterns(shape: Shape, modulus: u32) -> impl Iterator<Item = CoverDatum> {
    let [m1, m2] = shape.mask();
    let first = masked_rows(&m1, modulus);
    let second = masked_rows(&m2, modulus);
    first.into_iter().flat_map(move |r1| {
        let second = second.clone();
        second.into_iter().map(move |r2| CoverDatum::from_rows(modulus, &[&r1, &r2]).expect("shape rows are valid"))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpec {
    pub moduli: Vec<u32>,
    pub rows: RangeInclusive<usize>,
    pub branch_points: RangeInclusive<usize>,
    pub shape: Option<Shape>,
    pub genus: Option<RangeInclusive<u64>>,
    pub rows_independent: Option<bool>,
    pub verdict: Option<Verdict>,
    pub equivalence: Equivalence,
    /// Upper bound on raw matrices visited.
    pub max_raw: u128,
}

impl SearchSpec {
    pub fn new(moduli: Vec<u32>, rows: RangeInclusive<usize>, branch_points: RangeInclusive<usize>) -> Self {
        SearchSpec {
            moduli,
            rows,
            branch_points,
            shape: None,
            genus: None,
            rows_independent: None,
            verdict: None,
            equivalence: Equivalence::RowSpanColumns,
            max_raw: 50_000_000,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.moduli.is_empty() || self.moduli.iter().any(|&n| n < 2) {
            return Err(Error::InvalidSpec("moduli must be non-empty and >= 2".into()));
        }
        if self.rows.is_empty() || *self.rows.start() == 0 {
            return Err(Error::InvalidSpec("row range must be non-empty and positive".into()));
        }
        if self.branch_points.is_empty() || *self.branch_points.start() < 3 {
            return Err(Error::InvalidSpec("branch point range must be non-empty and >= 3".into()));
        }
        if self.shape.is_some() && (!self.rows.contains(&2) || !self.branch_points.contains(&5)) {
            return Err(Error::InvalidSpec("shapes I-IV need m = 2 and s = 5 in range".into()));
        }
        Ok(())
    }

    /// Number of raw matrices in the box (rows summing to zero).
    pub fn raw_cardinality(&self) -> u128 {
        let mut total: u128 = 0;
        for &n in &self.moduli {
            if let Some(shape) = self.shape {
                let [m1, m2] = shape.mask();
                let per_row = |mask: &[bool; 5]| (n as u128 - 1).saturating_pow(mask.iter().filter(|&&b| b).count() as u32);
                total = total.saturating_add(per_row(&m1).saturating_mul(per_row(&m2)));
                continue;
            }
            for m in self.rows.clone() {
                for s in self.branch_points.clone() {
                    let per_row = (n as u128).saturating_pow(s as u32 - 1);
                    total = total.saturating_add(per_row.saturating_pow(m as u32));
                }
            }
        }
        total
    }

    fn accepts(&self, record: &EnumerationRecord) -> bool {
        self.genus.as_ref().is_none_or(|g| g.contains(&record.genus))
            && self.rows_independent.is_none_or(|flag| record.datum.rows_independent() == flag)
            && self.verdict.is_none_or(|v| record.report.verdict == v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationRecord {
    pub datum: CoverDatum,
    pub key: CanonicalKey,
    pub genus: u64,
    pub group: AbelianGroupStructure,
    pub report: ClassificationReport,
}

impl EnumerationRecord {
    pub fn new(datum: CoverDatum, equivalence: Equivalence) -> Result<Self> {
        Ok(EnumerationRecord {
            key: datum.canonical_key(equivalence),
            genus: datum.genus()?,
            group: datum.group_structure(),
            report: classify(&datum)?,
            datum,
        })
    }

    pub const CSV_HEADER: [&'static str; 12] =
        ["key", "N", "m", "s", "matrix", "genus", "group", "verdict", "rule", "dim_SG", "bound", "condition_star"];

    pub fn csv_fields(&self) -> Result<Vec<String>> {
        let star = crate::spectrum::spectrum_table(&self.datum)?.condition_star().is_some();
        let factors: Vec<String> = self.group.invariant_factors.iter().map(u64::to_string).collect();
        Ok(vec![
            self.key.to_hex(),
            self.datum.modulus().to_string(),
            self.datum.row_count().to_string(),
            self.datum.branch_points().to_string(),
            self.datum.to_text(),
            self.genus.to_string(),
            format!("[{}]", factors.join(";")),
            self.report.verdict.to_string(),
            self.report.rule.map(|r| r.to_string()).unwrap_or_default(),
            self.report.dims.dim_sg.to_string(),
            self.report.dims.monodromy_bound.to_string(),
            star.to_string(),
        ])
    }
}

/// The raw rows of length `s` summing to zero mod N, in lexicographic order.
fn zero_sum_rows(modulus: u32, s: usize) -> Vec<Tuple> {
    let mut out = Vec::new();
    let mut row = vec![0u32; s];
    loop {
        let head: u64 = row[..s - 1].iter().map(|&x| x as u64).sum();
        row[s - 1] = ((modulus as u64 - head % modulus as u64) % modulus as u64) as u32;
        out.push(row.clone());
        let mut i = s - 1;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            row[i] += 1;
            if row[i] < modulus {
                break;
            }
            row[i] = 0;
        }
    }
}

/// One slab of the search box: fixed `(N, m, s)` and first-row index.
#[derive(Debug, Clone, Copy)]
struct Slab {
    modulus: u32,
    m: usize,
    s: usize,
    first: usize,
}

fn slabs(spec: &SearchSpec) -> Vec<Slab> {
    let mut out = Vec::new();
    for &modulus in &spec.moduli {
        for m in spec.rows.clone() {
            for s in spec.branch_points.clone() {
                if spec.shape.is_some() && (m, s) != (2, 5) {
                    continue;
                }
                let count = if spec.shape.is_some() { 1 } else { (modulus as usize).pow(s as u32 - 1) };
                out.extend((0..count).map(|first| Slab { modulus, m, s, first }));
            }
        }
    }
    out
}

/// Visits the valid data of one slab; rows are taken in non-decreasing
/// order, which visits one row-permutation of every datum.
fn visit_slab(spec: &SearchSpec, slab: Slab, rows: &[Tuple], f: &mut impl FnMut(CoverDatum) -> Result<()>) -> Result<()> {
    if let Some(shape) = spec.shape {
        for datum in shape_patterns(shape, slab.modulus) {
            f(datum)?;
        }
        return Ok(());
    }
    let mut idx = vec![slab.first; slab.m];
    loop {
        let chosen: Vec<&[u32]> = idx.iter().map(|&i| rows[i].as_slice()).collect();
        if (0..slab.s).all(|j| chosen.iter().any(|r| r[j] != 0)) {
            f(CoverDatum::from_rows(slab.modulus, &chosen)?)?;
        }
        // advance idx[1..] as a non-decreasing tuple, idx[0] fixed
        let mut k = slab.m;
        loop {
            if k <= 1 {
                return Ok(());
            }
            k -= 1;
            if idx[k] + 1 < rows.len() {
                idx[k] += 1;
                let v = idx[k];
                for slot in idx.iter_mut().skip(k + 1) {
                    *slot = v;
                }
                break;
            }
        }
    }
}

fn guard(spec: &SearchSpec) -> Result<()> {
    spec.validate()?;
    let raw = spec.raw_cardinality();
    if raw > spec.max_raw {
        return Err(Error::SpecTooLarge { raw, limit: spec.max_raw });
    }
    Ok(())
}

/// One record per canonical key, sorted by key. For each key the
/// lexicographically smallest datum visited is kept, so the output does not
/// depend on scheduling.
pub fn enumerate_data(spec: &SearchSpec) -> Result<Vec<EnumerationRecord>> {
    guard(spec)?;
    let mut row_cache: BTreeMap<(u32, usize), Vec<Tuple>> = BTreeMap::new();
    let slabs = slabs(spec);
    for slab in &slabs {
        row_cache.entry((slab.modulus, slab.s)).or_insert_with(|| zero_sum_rows(slab.modulus, slab.s));
    }
    let partial: Vec<Result<BTreeMap<CanonicalKey, CoverDatum>>> = slabs
        .par_iter()
        .map(|&slab| {
            let rows = &row_cache[&(slab.modulus, slab.s)];
            let mut best: BTreeMap<CanonicalKey, CoverDatum> = BTreeMap::new();
            visit_slab(spec, slab, rows, &mut |datum| {
                if spec.shape.is_some_and(|sh| !sh.matches(&datum)) {
                    return Ok(());
                }
                let key = datum.canonical_key(spec.equivalence);
                match best.get(&key) {
                    Some(existing) if *existing <= datum => {}
                    _ => {
                        best.insert(key, datum);
                    }
                }
                Ok(())
            })?;
            Ok(best)
        })
        .collect();
    let mut merged: BTreeMap<CanonicalKey, CoverDatum> = BTreeMap::new();
    for part in partial {
        for (key, datum) in part? {
            match merged.get(&key) {
                Some(existing) if *existing <= datum => {}
                _ => {
                    merged.insert(key, datum);
                }
            }
        }
    }
    let records: Vec<Result<EnumerationRecord>> =
        merged.into_par_iter().map(|(_, datum)| EnumerationRecord::new(datum, spec.equivalence)).collect();
    let mut out = Vec::new();
    for r in records {
        let r = r?;
        if spec.accepts(&r) {
            out.push(r);
        }
    }
    Ok(out)
}

/// Streaming variant: emits each class the first time it is met, in visit
/// order (not sorted), on the calling thread.
pub fn for_each_class(spec: &SearchSpec, mut emit: impl FnMut(EnumerationRecord)) -> Result<()> {
    guard(spec)?;
    let mut seen: HashSet<CanonicalKey> = HashSet::new();
    let mut cache: BTreeMap<(u32, usize), Vec<Tuple>> = BTreeMap::new();
    for slab in slabs(spec) {
        let rows = cache.entry((slab.modulus, slab.s)).or_insert_with(|| zero_sum_rows(slab.modulus, slab.s));
        visit_slab(spec, slab, rows, &mut |datum| {
            if spec.shape.is_some_and(|sh| !sh.matches(&datum)) {
                return Ok(());
            }
            let key = datum.canonical_key(spec.equivalence);
            if seen.insert(key) {
                let record = EnumerationRecord::new(datum, spec.equivalence)?;
                if spec.accepts(&record) {
                    emit(record);
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

/// Stable removal of canonical-key duplicates.
pub fn dedup_stream(records: impl IntoIterator<Item = EnumerationRecord>) -> Vec<EnumerationRecord> {
    let mut seen = HashSet::new();
    records.into_iter().filter(|r| seen.insert(r.key.clone())).collect()
}
