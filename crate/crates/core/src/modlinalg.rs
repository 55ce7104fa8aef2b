//! Sparse Gaussian elimination over `Z/p`.
//!
//! Rows are folded one at a time into a reduced row echelon structure.
//! Each stored row has a unit pivot at its largest column and no entries in
//! the pivot columns of other rows, so reducing a vector is a single pass.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qalgebra::Zp;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("column {col} out of range for {ncols} columns")]
    ColumnOverflow { col: u32, ncols: u32 },
    #[error("malformed row: {0}")]
    MalformedRow(String),
}

/// A prime modulus below `2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u64) -> Result<Self, LinAlgError> {
        if p < 2 || p >= 1 << 31 {
            return Err(LinAlgError::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p % d == 0 {
                return Err(LinAlgError::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p as u32))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn field(self) -> Zp {
        Zp::new(self.0)
    }
}

impl TryFrom<u64> for Prime {
    type Error = LinAlgError;
    fn try_from(p: u64) -> Result<Self, LinAlgError> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0 as u64
    }
}

/// Sparse row: strictly increasing columns, nonzero residues.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRow {
    entries: Vec<(u32, u32)>,
}

impl SparseRow {
    pub fn new(entries: Vec<(u32, u32)>) -> Result<Self, LinAlgError> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(LinAlgError::MalformedRow("columns not strictly increasing".into()));
            }
        }
        if entries.iter().any(|&(_, v)| v == 0) {
            return Err(LinAlgError::MalformedRow("zero residue".into()));
        }
        Ok(Self { entries })
    }

    /// Reduces integer entries mod `p`, merging repeated columns.
    pub fn from_integers(entries: impl IntoIterator<Item = (u32, i64)>, field: Zp) -> Self {
        let mut merged: BTreeMap<u32, u32> = BTreeMap::new();
        for (c, v) in entries {
            let r = field.reduce_i64(v);
            let slot = merged.entry(c).or_insert(0);
            *slot = field.addm(*slot, r);
        }
        Self {
            entries: merged.into_iter().filter(|&(_, v)| v != 0).collect(),
        }
    }

    pub(crate) fn from_sorted_unchecked(entries: Vec<(u32, u32)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(_, v)| v != 0));
        Self { entries }
    }

    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(u32, u32)> {
        self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_column(&self) -> Option<u32> {
        self.entries.last().map(|e| e.0)
    }

    pub fn get(&self, col: u32) -> u32 {
        self.entries
            .binary_search_by_key(&col, |e| e.0)
            .map(|k| self.entries[k].1)
            .unwrap_or(0)
    }
}

/// Rank summary for one prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub prime: u32,
    pub rank: u64,
    pub corank: u64,
    pub rows_consumed: u64,
    pub rows_zero: u64,
}

/// Dense scratch accumulator reused across reductions.
#[derive(Clone, Debug)]
struct Scratch {
    values: Vec<u32>,
    touched: Vec<u32>,
}

impl Scratch {
    fn new(ncols: usize) -> Self {
        Self {
            values: vec![0; ncols],
            touched: Vec::new(),
        }
    }

    #[inline]
    fn add(&mut self, field: Zp, col: u32, v: u32) {
        let slot = &mut self.values[col as usize];
        if *slot == 0 {
            self.touched.push(col);
        }
        *slot = field.addm(*slot, v);
    }

    fn drain(&mut self) -> SparseRow {
        self.touched.sort_unstable();
        let mut out = Vec::with_capacity(self.touched.len());
        for &c in &self.touched {
            let v = std::mem::take(&mut self.values[c as usize]);
            if v != 0 {
                out.push((c, v));
            }
        }
        self.touched.clear();
        SparseRow::from_sorted_unchecked(out)
    }
}

/// Incremental reduced row echelon form over `Z/p`.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Zp,
    ncols: u32,
    /// Pivot row by pivot column.
    rows: Vec<Option<SparseRow>>,
    rank: u64,
    rows_consumed: u64,
    rows_zero: u64,
    scratch: Scratch,
}

impl Echelon {
    pub fn new(ncols: u32, prime: Prime) -> Self {
        Self {
            field: prime.field(),
            ncols,
            rows: vec![None; ncols as usize],
            rank: 0,
            rows_consumed: 0,
            rows_zero: 0,
            scratch: Scratch::new(ncols as usize),
        }
    }

    pub fn field(&self) -> Zp {
        self.field
    }

    pub fn ncols(&self) -> u32 {
        self.ncols
    }

    pub fn rank(&self) -> u64 {
        self.rank
    }

    pub fn corank(&self) -> u64 {
        self.ncols as u64 - self.rank
    }

    pub fn is_pivot(&self, col: u32) -> bool {
        self.rows[col as usize].is_some()
    }

    fn check(&self, row: &SparseRow) -> Result<(), LinAlgError> {
        match row.max_column() {
            Some(col) if col >= self.ncols => Err(LinAlgError::ColumnOverflow { col, ncols: self.ncols }),
            _ => Ok(()),
        }
    }

    /// Normal form of `row` modulo the current row space.
    pub fn reduce(&mut self, row: &SparseRow) -> Result<SparseRow, LinAlgError> {
        self.check(row)?;
        Ok(self.reduce_unchecked(row.entries()))
    }

    pub(crate) fn reduce_unchecked(&mut self, entries: &[(u32, u32)]) -> SparseRow {
        let field = self.field;
        let mut scratch = std::mem::replace(&mut self.scratch, Scratch::new(0));
        for &(c, v) in entries {
            match &self.rows[c as usize] {
                None => scratch.add(field, c, v),
                Some(pivot_row) => {
                    let factor = field.negm(v);
                    for &(c2, v2) in pivot_row.entries() {
                        if c2 != c {
                            scratch.add(field, c2, field.mulm(factor, v2));
                        }
                    }
                }
            }
        }
        let out = scratch.drain();
        self.scratch = scratch;
        out
    }

    /// Whether every entry of `row` sits in a non-pivot column.
    pub fn is_reduced(&self, row: &SparseRow) -> bool {
        row.entries().iter().all(|&(c, _)| self.rows[c as usize].is_none())
    }

    /// Folds a row in; returns whether it was independent.
    pub fn insert(&mut self, row: &SparseRow) -> Result<bool, LinAlgError> {
        self.check(row)?;
        self.rows_consumed += 1;
        let reduced = self.reduce_unchecked(row.entries());
        Ok(self.insert_reduced(reduced))
    }

    /// Folds in a row already in normal form; returns whether it was nonzero.
    pub(crate) fn insert_reduced(&mut self, reduced: SparseRow) -> bool {
        let Some(pivot) = reduced.max_column() else {
            self.rows_zero += 1;
            return false;
        };
        let field = self.field;
        let inv = field.inv(reduced.get(pivot));
        let normalized: Vec<(u32, u32)> = reduced
            .into_entries()
            .into_iter()
            .map(|(c, v)| (c, field.mulm(v, inv)))
            .collect();
        let new_row = SparseRow::from_sorted_unchecked(normalized);
        for slot in self.rows.iter_mut() {
            let Some(existing) = slot else { continue };
            let a = existing.get(pivot);
            if a == 0 {
                continue;
            }
            let factor = field.negm(a);
            let mut merged = Vec::with_capacity(existing.len() + new_row.len());
            let (x, y) = (existing.entries(), new_row.entries());
            let (mut i, mut j) = (0, 0);
            while i < x.len() || j < y.len() {
                let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
                let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
                if take_x {
                    merged.push(x[i]);
                    i += 1;
                } else if take_y {
                    merged.push((y[j].0, field.mulm(factor, y[j].1)));
                    j += 1;
                } else {
                    let v = field.addm(x[i].1, field.mulm(factor, y[j].1));
                    if v != 0 {
                        merged.push((x[i].0, v));
                    }
                    i += 1;
                    j += 1;
                }
            }
            *existing = SparseRow::from_sorted_unchecked(merged);
        }
        self.rows[pivot as usize] = Some(new_row);
        self.rank += 1;
        true
    }

    pub(crate) fn note_consumed(&mut self) {
        self.rows_consumed += 1;
    }

    pub fn pivot_rows(&self) -> impl Iterator<Item = (u32, &SparseRow)> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(c, r)| r.as_ref().map(|r| (c as u32, r)))
    }

    pub fn report(&self) -> RankReport {
        RankReport {
            prime: self.field.modulus(),
            rank: self.rank,
            corank: self.corank(),
            rows_consumed: self.rows_consumed,
            rows_zero: self.rows_zero,
        }
    }

    /// Binary form: header, counters, then pivot rows.
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_u32::<LittleEndian>(self.field.modulus())?;
        w.write_u32::<LittleEndian>(self.ncols)?;
        w.write_u64::<LittleEndian>(self.rows_consumed)?;
        w.write_u64::<LittleEndian>(self.rows_zero)?;
        w.write_u64::<LittleEndian>(self.rank)?;
        for (pivot, row) in self.pivot_rows() {
            w.write_u32::<LittleEndian>(pivot)?;
            w.write_u32::<LittleEndian>(row.len() as u32)?;
            for &(c, v) in row.entries() {
                w.write_u32::<LittleEndian>(c)?;
                w.write_u32::<LittleEndian>(v)?;
            }
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> std::io::Result<Self> {
        let bad = |m: &str| std::io::Error::new(std::io::ErrorKind::InvalidData, m.to_string());
        let p = r.read_u32::<LittleEndian>()?;
        let prime = Prime::new(p as u64).map_err(|e| bad(&e.to_string()))?;
        let ncols = r.read_u32::<LittleEndian>()?;
        let mut e = Echelon::new(ncols, prime);
        e.rows_consumed = r.read_u64::<LittleEndian>()?;
        e.rows_zero = r.read_u64::<LittleEndian>()?;
        let rank = r.read_u64::<LittleEndian>()?;
        if rank > ncols as u64 {
            return Err(bad("rank exceeds column count"));
        }
        for _ in 0..rank {
            let pivot = r.read_u32::<LittleEndian>()?;
            let len = r.read_u32::<LittleEndian>()? as usize;
            if pivot >= ncols || len > ncols as usize {
                return Err(bad("pivot row out of range"));
            }
            let mut entries = Vec::with_capacity(len);
            for _ in 0..len {
                let c = r.read_u32::<LittleEndian>()?;
                let v = r.read_u32::<LittleEndian>()?;
                entries.push((c, v));
            }
            let row = SparseRow::new(entries).map_err(|e| bad(&e.to_string()))?;
            if row.max_column() != Some(pivot) || row.get(pivot) != 1 {
                return Err(bad("inconsistent pivot row"));
            }
            e.rows[pivot as usize] = Some(row);
        }
        e.rank = rank;
        Ok(e)
    }
}

/// Rank and corank of the span of `rows` over `Z/p`.
pub fn eliminate(
    rows: impl IntoIterator<Item = SparseRow>,
    ncols: u32,
    p: u64,
) -> Result<RankReport, LinAlgError> {
    let prime = Prime::new(p)?;
    let mut e = Echelon::new(ncols, prime);
    for row in rows {
        e.insert(&row)?;
    }
    Ok(e.report())
}

/// Independent elimination of the same integer rows modulo each prime.
pub fn corank_profile(
    rows: &[Vec<(u32, i64)>],
    ncols: u32,
    primes: &[u64],
) -> Result<BTreeMap<u32, RankReport>, LinAlgError> {
    let mut out = BTreeMap::new();
    for &p in primes {
        let field = Prime::new(p)?.field();
        let report = eliminate(
            rows.iter().map(|r| SparseRow::from_integers(r.iter().copied(), field)),
            ncols,
            p,
        )?;
        out.insert(report.prime, report);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    /// Plain dense Gaussian elimination, used as the reference rank.
    fn dense_rank(rows: &[Vec<(u32, i64)>], ncols: usize, p: u64) -> u64 {
        let p = p as i64;
        let mut m: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| {
                let mut d = vec![0i64; ncols];
                for &(c, v) in r {
                    d[c as usize] = (d[c as usize] + v).rem_euclid(p);
                }
                d
            })
            .collect();
        let mut rank = 0;
        for col in 0..ncols {
            let Some(k) = (rank..m.len()).find(|&k| m[k][col] != 0) else { continue };
            m.swap(rank, k);
            let mut inv = 1;
            while m[rank][col] * inv % p != 1 {
                inv += 1;
            }
            for c in 0..ncols {
                m[rank][c] = m[rank][c] * inv % p;
            }
            for k in 0..m.len() {
                if k != rank && m[k][col] != 0 {
                    let f = m[k][col];
                    for c in 0..ncols {
                        m[k][c] = (m[k][c] - f * m[rank][c]).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank as u64
    }

    #[test]
    fn primes() {
        assert!(Prime::new(2).is_ok());
        assert!(Prime::new(131).is_ok());
        assert_eq!(Prime::new(1), Err(LinAlgError::NotPrime(1)));
        assert_eq!(Prime::new(91), Err(LinAlgError::NotPrime(91)));
        assert!(Prime::new(1 << 31).is_err());
        assert!(eliminate(Vec::new(), 3, 4).is_err());
    }

    #[test]
    fn empty_and_identity() {
        let r = eliminate(Vec::new(), 1365, 7).unwrap();
        assert_eq!((r.rank, r.corank), (0, 1365));
        let id = (0..1365).map(|c| SparseRow::new(vec![(c, 1)]).unwrap());
        let r = eliminate(id, 1365, 7).unwrap();
        assert_eq!((r.rank, r.corank, r.rows_consumed, r.rows_zero), (1365, 0, 1365, 0));
    }

    #[test]
    fn malformed_and_overflow() {
        assert!(SparseRow::new(vec![(2, 1), (1, 1)]).is_err());
        assert!(SparseRow::new(vec![(1, 0)]).is_err());
        let mut e = Echelon::new(4, Prime::new(5).unwrap());
        assert_eq!(
            e.insert(&SparseRow::new(vec![(4, 1)]).unwrap()),
            Err(LinAlgError::ColumnOverflow { col: 4, ncols: 4 })
        );
    }

    #[test]
    fn dependence_mod_two() {
        // 2 * e0 vanishes mod 2 but not mod 3.
        let rows = vec![vec![(0u32, 2i64)], vec![(0, 1), (1, 1)], vec![(1, 1), (2, 1)], vec![(0, 1), (2, -1)]];
        let prof = corank_profile(&rows, 3, &[2, 3]).unwrap();
        assert_eq!(prof[&2].rank, 2);
        assert_eq!(prof[&3].rank, 3);
        assert_eq!(prof[&2].rows_zero, 2);
    }

    #[test]
    fn echelon_stays_reduced() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let ncols = 30u32;
        let field = Zp::new(11);
        let mut e = Echelon::new(ncols, Prime::new(11).unwrap());
        for _ in 0..25 {
            let row = SparseRow::from_integers(
                (0..4).map(|_| {
                    use rand::Rng;
                    (rng.gen_range(0..ncols), rng.gen_range(-5..5))
                }),
                field,
            );
            e.insert(&row).unwrap();
            let pivots: Vec<u32> = e.pivot_rows().map(|(c, _)| c).collect();
            for (pivot, r) in e.pivot_rows() {
                assert_eq!(r.max_column(), Some(pivot));
                assert_eq!(r.get(pivot), 1);
                for &q in &pivots {
                    if q != pivot {
                        assert_eq!(r.get(q), 0);
                    }
                }
            }
            let reduced = e.reduce(&row).unwrap();
            assert!(reduced.is_zero());
        }
    }

    #[test]
    fn checkpoint_roundtrip() {
        let field = Zp::new(13);
        let mut e = Echelon::new(10, Prime::new(13).unwrap());
        for k in 0..6i64 {
            e.insert(&SparseRow::from_integers([(k as u32, 1), ((k + 3) as u32 % 10, k + 2)], field))
                .unwrap();
        }
        let mut buf = Vec::new();
        e.write_to(&mut buf).unwrap();
        let back = Echelon::read_from(&mut &buf[..]).unwrap();
        assert_eq!(back.report(), e.report());
        assert_eq!(
            back.pivot_rows().collect::<Vec<_>>(),
            e.pivot_rows().collect::<Vec<_>>()
        );
        assert!(Echelon::read_from(&mut &buf[..buf.len() - 3]).is_err());
    }

    fn arb_rows() -> impl Strategy<Value = Vec<Vec<(u32, i64)>>> {
        prop::collection::vec(prop::collection::vec((0u32..12, -6i64..6), 0..5), 0..20)
    }

    proptest! {
        #[test]
        fn rank_matches_dense_and_ignores_order(rows in arb_rows(), seed in any::<u64>(), pi in 0usize..4) {
            let p = [2u64, 3, 7, 101][pi];
            let expected = dense_rank(&rows, 12, p);
            let prof = corank_profile(&rows, 12, &[p]).unwrap();
            prop_assert_eq!(prof[&(p as u32)].rank, expected);
            prop_assert_eq!(prof[&(p as u32)].rank + prof[&(p as u32)].corank, 12);
            let mut shuffled = rows.clone();
            shuffled.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
            let prof2 = corank_profile(&shuffled, 12, &[p]).unwrap();
            prop_assert_eq!(prof2[&(p as u32)].rank, expected);
        }
    }
}
