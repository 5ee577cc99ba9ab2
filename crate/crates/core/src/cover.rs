//! Abelian cover data `(N, s, A)`: validation, genus, Galois group, row span
//! and isomorphism classes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{gcd_with, reduce};
use crate::snf::invariant_factors;

/// An element of `(Z/N)^s`, entries in `[0, N)`.
pub type Tuple = Vec<u32>;

/// A validated `m x s` matrix over `Z/N` whose rows sum to zero and whose
/// columns are nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoverDatum {
    modulus: u32,
    rows: Vec<Tuple>,
    rows_independent: bool,
}

impl CoverDatum {
    /// Validates raw integer rows, reducing every entry into `[0, N)`.
    pub fn new(modulus: u32, rows: &[Vec<i64>]) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::BadShape(format!("modulus {modulus} < 2")));
        }
        let Some(first) = rows.first() else {
            return Err(Error::BadShape("no rows".into()));
        };
        let s = first.len();
        if s < 3 {
            return Err(Error::BadShape(format!("{s} branch points, need at least 3")));
        }
        if let Some(bad) = rows.iter().find(|r| r.len() != s) {
            return Err(Error::BadShape(format!("ragged rows: {} vs {}", bad.len(), s)));
        }
        let rows: Vec<Tuple> = rows.iter().map(|r| r.iter().map(|&x| reduce(x, modulus)).collect()).collect();
        for (i, row) in rows.iter().enumerate() {
            if row.iter().map(|&x| x as u64).sum::<u64>() % modulus as u64 != 0 {
                return Err(Error::RowSumNonzero(i + 1));
            }
        }
        for j in 0..s {
            if rows.iter().all(|r| r[j] == 0) {
                return Err(Error::ZeroColumn(j + 1));
            }
        }
        let mut datum = CoverDatum { modulus, rows, rows_independent: false };
        let m = datum.rows.len() as u32;
        datum.rows_independent =
            (modulus as u128).checked_pow(m).is_some_and(|full| datum.row_span().len() as u128 == full);
        Ok(datum)
    }

    /// Convenience constructor from unsigned rows.
    pub fn from_rows(modulus: u32, rows: &[&[u32]]) -> Result<Self> {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect();
        Self::new(modulus, &rows)
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Number of branch points `s`.
    pub fn branch_points(&self) -> usize {
        self.rows[0].len()
    }

    /// Number of rows `m`.
    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Tuple] {
        &self.rows
    }

    pub fn column(&self, j: usize) -> Tuple {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Whether the rows are independent over `Z/N`, i.e. `|row span| = N^m`.
    /// Informational only.
    pub fn rows_independent(&self) -> bool {
        self.rows_independent
    }

    /// Whether every row, taken alone, generates a cyclic group of order `N`.
    pub fn rows_primitive(&self) -> bool {
        self.rows.iter().all(|r| gcd_with(self.modulus, r.iter().copied()) == 1)
    }

    /// Common factor `f > 1` of `N` and every entry, if one exists.
    pub fn common_factor(&self) -> u32 {
        gcd_with(self.modulus, self.rows.iter().flatten().copied())
    }

    pub fn reducible_modulus(&self) -> bool {
        self.common_factor() > 1
    }

    /// The presentation `(N/f, A/f)`; `self` when no common factor exists.
    pub fn reduced(&self) -> CoverDatum {
        let f = self.common_factor();
        if f == 1 {
            return self.clone();
        }
        let rows: Vec<Vec<i64>> = self.rows.iter().map(|r| r.iter().map(|&x| (x / f) as i64).collect()).collect();
        CoverDatum::new(self.modulus / f, &rows).expect("dividing a valid datum keeps it valid")
    }

    /// `n . A mod N`.
    pub fn alpha(&self, n: &[u32]) -> Result<Tuple> {
        if n.len() != self.row_count() {
            return Err(Error::ShapeMismatch { expected: self.row_count(), got: n.len() });
        }
        let big_n = self.modulus as u64;
        Ok((0..self.branch_points())
            .map(|j| {
                let acc: u64 = n.iter().zip(&self.rows).map(|(&c, r)| (c as u64 % big_n) * r[j] as u64).sum();
                (acc % big_n) as u32
            })
            .collect())
    }

    /// All characters `n` in lexicographic order, paired with `n . A`.
    pub(crate) fn characters(&self) -> impl Iterator<Item = (Tuple, Tuple)> + '_ {
        let m = self.row_count();
        let big_n = self.modulus;
        let mut next = Some(vec![0u32; m]);
        std::iter::from_fn(move || {
            let n = next.take()?;
            let mut succ = n.clone();
            let mut i = m;
            let mut carried = true;
            while carried && i > 0 {
                i -= 1;
                succ[i] += 1;
                if succ[i] == big_n {
                    succ[i] = 0;
                } else {
                    carried = false;
                }
            }
            if !carried {
                next = Some(succ);
            }
            let alpha = self.alpha(&n).expect("length matches");
            Some((n, alpha))
        })
    }

    /// The set `{n . A}` of distinct associated tuples, sorted.
    pub fn row_span(&self) -> BTreeSet<Tuple> {
        let big_n = self.modulus;
        let s = self.branch_points();
        let mut span: BTreeSet<Tuple> = BTreeSet::from([vec![0; s]]);
        for row in &self.rows {
            let mut grown = span.clone();
            for v in &span {
                let mut w = v.clone();
                for _ in 1..big_n {
                    for (x, &r) in w.iter_mut().zip(row) {
                        *x = (*x + r) % big_n;
                    }
                    if !grown.insert(w.clone()) {
                        break;
                    }
                }
            }
            span = grown;
        }
        span
    }

    /// Degree of the cover, `|G|`.
    pub fn degree(&self) -> u64 {
        self.row_span().len() as u64
    }

    /// `1 + deg((s-2)/2 - (1/2N) sum_j gcd(N, column j))`, exactly.
    pub fn genus(&self) -> Result<u64> {
        let big_n = self.modulus as i64;
        let s = self.branch_points() as i64;
        let gcd_sum: i64 = (0..self.branch_points()).map(|j| gcd_with(self.modulus, self.column(j)) as i64).sum();
        let deg = Ratio::from_integer(self.degree() as i64);
        let g = Ratio::from_integer(1) + deg * (Ratio::new(s - 2, 2) - Ratio::new(gcd_sum, 2 * big_n));
        if !g.is_integer() || *g.numer() < 0 {
            return Err(Error::NonIntegralGenus(g.to_string()));
        }
        Ok(g.to_integer() as u64)
    }

    /// Invariant factors of the column span inside `(Z/N)^m`.
    pub fn group_structure(&self) -> AbelianGroupStructure {
        let m = self.row_count();
        let big_n = self.modulus as i64;
        let matrix: Vec<Vec<i64>> = (0..m)
            .map(|i| {
                let mut row: Vec<i64> = self.rows[i].iter().map(|&x| x as i64).collect();
                row.extend((0..m).map(|k| if k == i { big_n } else { 0 }));
                row
            })
            .collect();
        // Z^m / L = sum Z/e_i, and the column span is L / N Z^m = sum Z/(N/e_i)
        let mut factors: Vec<u64> =
            invariant_factors(&matrix).iter().map(|&e| (big_n / e) as u64).filter(|&f| f > 1).collect();
        factors.sort_unstable();
        AbelianGroupStructure::new(factors)
    }

    pub fn canonical_key(&self, equivalence: Equivalence) -> CanonicalKey {
        CanonicalKey::of(self, equivalence)
    }

    /// Row-span equality up to the chosen equivalence.
    pub fn is_isomorphic(&self, other: &CoverDatum, equivalence: Equivalence) -> bool {
        self.canonical_key(equivalence) == other.canonical_key(equivalence)
    }

    /// Compact text form `N:row1/row2`; digits when `N <= 10`, commas otherwise.
    pub fn to_text(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                if self.modulus <= 10 {
                    r.iter().map(|x| char::from_digit(*x, 10).unwrap()).collect()
                } else {
                    r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
                }
            })
            .collect();
        format!("{}:{}", self.modulus, rows.join("/"))
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let (n, body) = text.trim().split_once(':').ok_or_else(|| Error::Parse(format!("missing ':' in {text:?}")))?;
        let modulus: u32 = n.trim().parse().map_err(|_| Error::Parse(format!("bad modulus {n:?}")))?;
        let rows = body
            .split('/')
            .map(|row| {
                if row.contains(',') {
                    row.split(',')
                        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad entry {x:?}"))))
                        .collect::<Result<Vec<_>>>()
                } else {
                    row.trim()
                        .chars()
                        .map(|c| c.to_digit(10).map(i64::from).ok_or_else(|| Error::Parse(format!("bad digit {c:?}"))))
                        .collect::<Result<Vec<_>>>()
                }
            })
            .collect::<Result<Vec<_>>>()?;
        CoverDatum::new(modulus, &rows)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&DatumJson::from(self)).expect("plain data serializes")
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let raw: DatumJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.try_into()
    }
}

impl fmt::Display for CoverDatum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for CoverDatum {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim_start().starts_with('{') {
            Self::parse_json(s)
        } else {
            Self::parse_text(s)
        }
    }
}

/// Wire form `{"N": int, "A": [[int, ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatumJson {
    #[serde(rename = "N")]
    pub modulus: u32,
    #[serde(rename = "A")]
    pub rows: Vec<Vec<i64>>,
}

impl From<&CoverDatum> for DatumJson {
    fn from(d: &CoverDatum) -> Self {
        DatumJson { modulus: d.modulus, rows: d.rows.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect() }
    }
}

impl TryFrom<DatumJson> for CoverDatum {
    type Error = Error;

    fn try_from(raw: DatumJson) -> Result<Self> {
        CoverDatum::new(raw.modulus, &raw.rows)
    }
}

impl Serialize for CoverDatum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DatumJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoverDatum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        DatumJson::deserialize(deserializer)?.try_into().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianGroupStructure {
    pub invariant_factors: Vec<u64>,
    pub order: u64,
}

impl AbelianGroupStructure {
    fn new(invariant_factors: Vec<u64>) -> Self {
        let order = invariant_factors.iter().product();
        AbelianGroupStructure { invariant_factors, order }
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors.len() <= 1
    }
}

impl fmt::Display for AbelianGroupStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.invariant_factors.iter().map(|e| format!("Z/{e}")).collect();
        f.write_str(&parts.join(" x "))
    }
}

/// Which relabelings count as isomorphisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equivalence {
    /// Equal row spans only.
    RowSpan,
    /// Equal row spans after some permutation of the branch points.
    #[default]
    RowSpanColumns,
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Equivalence::RowSpan => "row-span",
            Equivalence::RowSpanColumns => "row-span-columns",
        })
    }
}

impl FromStr for Equivalence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "row-span" => Ok(Equivalence::RowSpan),
            "row-span-columns" => Ok(Equivalence::RowSpanColumns),
            other => Err(Error::Parse(format!("unknown equivalence {other:?}"))),
        }
    }
}

/// Isomorphism-class identifier: `N`, `s`, then the sorted (and, under
/// [`Equivalence::RowSpanColumns`], lexicographically minimal) row span.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    fn of(datum: &CoverDatum, equivalence: Equivalence) -> Self {
        let span: Vec<Tuple> = datum.row_span().into_iter().collect();
        let best = match equivalence {
            Equivalence::RowSpan => span,
            Equivalence::RowSpanColumns => minimal_column_form(&span, datum.branch_points()),
        };
        Self::encode(datum.modulus, datum.branch_points(), &best)
    }

    fn encode(modulus: u32, s: usize, span: &[Tuple]) -> Self {
        let mut bytes = Vec::with_capacity(8 + span.len() * s * 2);
        bytes.extend_from_slice(&modulus.to_be_bytes());
        bytes.extend_from_slice(&(s as u32).to_be_bytes());
        for v in span {
            for &x in v {
                if modulus <= 256 {
                    bytes.push(x as u8);
                } else {
                    bytes.extend_from_slice(&(x as u16).to_be_bytes());
                }
            }
        }
        CanonicalKey(bytes)
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

/// Lexicographic minimum of `sort(pi(span))` over column orderings `pi` that
/// list columns in non-decreasing order of an intrinsic column invariant.
/// Identical columns are interchangeable, so each block is walked as a
/// multiset permutation.
fn minimal_column_form(span: &[Tuple], s: usize) -> Vec<Tuple> {
    let invariant = |c: usize| {
        let image: BTreeSet<u32> = span.iter().map(|v| v[c]).collect();
        let mut joint: Vec<usize> =
            (0..s).filter(|&d| d != c).map(|d| span.iter().map(|v| (v[c], v[d])).collect::<BTreeSet<_>>().len()).collect();
        joint.sort_unstable();
        (image.len(), joint)
    };
    let columns: Vec<Tuple> = (0..s).map(|c| span.iter().map(|v| v[c]).collect()).collect();
    let mut order: Vec<usize> = (0..s).collect();
    let invariants: Vec<_> = (0..s).map(invariant).collect();
    order.sort_by(|&a, &b| invariants[a].cmp(&invariants[b]).then_with(|| columns[a].cmp(&columns[b])));

    // blocks of equal invariant; inside a block, label = distinct column class
    let mut blocks: Vec<(usize, Vec<usize>, Vec<Vec<usize>>)> = Vec::new();
    let mut start = 0;
    while start < s {
        let mut end = start;
        while end < s && invariants[order[end]] == invariants[order[start]] {
            end += 1;
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut labels = Vec::new();
        for &c in &order[start..end] {
            match classes.iter().position(|cls| columns[cls[0]] == columns[c]) {
                Some(k) => {
                    classes[k].push(c);
                    labels.push(k);
                }
                None => {
                    labels.push(classes.len());
                    classes.push(vec![c]);
                }
            }
        }
        blocks.push((start, labels, classes));
        start = end;
    }

    let mut states: Vec<Vec<usize>> = blocks.iter().map(|b| b.1.clone()).collect();
    let mut best: Option<Vec<Tuple>> = None;
    let mut perm = vec![0usize; s];
    loop {
        for ((start, _, classes), labels) in blocks.iter().zip(&states) {
            let mut used = vec![0usize; classes.len()];
            for (offset, &l) in labels.iter().enumerate() {
                perm[start + offset] = classes[l][used[l]];
                used[l] += 1;
            }
        }
        let mut candidate: Vec<Tuple> = span.iter().map(|v| perm.iter().map(|&c| v[c]).collect()).collect();
        candidate.sort_unstable();
        if best.as_ref().is_none_or(|b| candidate < *b) {
            best = Some(candidate);
        }
        // odometer over the blocks' multiset permutations
        let mut k = states.len();
        let mut advanced = false;
        while k > 0 {
            k -= 1;
            if next_permutation(&mut states[k]) {
                advanced = true;
                break;
            }
            // next_permutation wrapped this block back to sorted order
        }
        if !advanced {
            break;
        }
    }
    best.expect("at least one ordering")
}

/// Advances to the next lexicographic permutation; on the last one, resets to
/// the first and returns false.
fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let mut i = xs.len() - 1;
    while i > 0 && xs[i - 1] >= xs[i] {
        i -= 1;
    }
    if i == 0 {
        xs.reverse();
        return false;
    }
    let mut j = xs.len() - 1;
    while xs[j] <= xs[i - 1] {
        j -= 1;
    }
    xs.swap(i - 1, j);
    xs[i..].reverse();
    true
}
