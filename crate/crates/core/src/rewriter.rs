//! Reduction of monomials of `S` to coordinates over the admissible basis
//! `T`.
//!
//! A step replaces a word `w` by `w - c * (u * rel * v)` for an exact
//! relation instance in which `w` has coefficient `c = +-1`. The phases are
//!
//! 1. move the rightmost `q12` to the right end, where it vanishes;
//! 2. move the rightmost `q13` / `q23` to the right end and exchange it for
//!    `q14` / `q24`;
//! 3. move the leftmost `q_{i,4}` to the left end and exchange it for
//!    `q_{i,5}`;
//! 4. fix the first and last letters of a word in `q_{i,5}`.
//!
//! Moving letter `M` past a letter `S` that shares a strand uses the cyclic
//! relation whose quadratic part is `[S, M + Z]`, `Z` being the third
//! generator of the triple, so every new term either has `M` one step
//! further along or has `M` replaced by `Z`. Interleaved pairs use the
//! four-strand relation and other disjoint pairs commute exactly.
//!
//! Every other term of a step is either of higher degree or smaller in the
//! lexicographic [`measure`], so reduction terminates.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::modlinalg::{Echelon, Prime, SparseRow};
use crate::qalgebra::{
    expand_word, AlgebraElement, Int64, Integers, QMonomial, SignedBraidLetter, StrandPair, Zp,
};
use crate::relations::{braid_relation_set, expand_relation_terms, sandwich_terms, IntTerms, RelationKind};

pub const DEFAULT_FUEL: u64 = 1_000_000_000;

const Q12: u8 = 0;
const Q13: u8 = 1;
const Q23: u8 = 2;
const Q14: u8 = 3;
const Q24: u8 = 4;
const Q34: u8 = 5;
const Q15: u8 = 6;
const Q25: u8 = 7;
const Q35: u8 = 8;
const Q45: u8 = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("fuel exhausted while reducing {monomial} after {steps} rewrite steps")]
    FuelExhausted { monomial: String, steps: u64 },
    #[error("monomial {monomial} exceeds cutoff {cutoff}")]
    TooLong { monomial: String, cutoff: u8 },
}

fn is_t3(c: u8) -> bool {
    c == Q13 || c == Q23
}

fn is_t4(c: u8) -> bool {
    (Q14..=Q34).contains(&c)
}

fn is_t5(c: u8) -> bool {
    c >= Q15
}

/// The admissible monomials: words in `q15, q25, q35, q45` that are empty or
/// begin with `q15` / `q35` and end with `q25` / `q45`, in degree-lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TBasis {
    cutoff: u8,
    offsets: Vec<u32>,
    len: u32,
}

impl TBasis {
    pub fn new(cutoff: u8) -> Self {
        let mut offsets = Vec::with_capacity(cutoff as usize + 1);
        let mut total = 0u32;
        for d in 0..=cutoff as u32 {
            offsets.push(total);
            total += Self::count_of_degree(d as usize);
        }
        Self {
            cutoff,
            offsets,
            len: total,
        }
    }

    pub fn count_of_degree(d: usize) -> u32 {
        match d {
            0 => 1,
            1 => 0,
            _ => 4u32.pow(d as u32 - 1),
        }
    }

    pub fn cutoff(&self) -> u8 {
        self.cutoff
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// First index of the degree-`d` block.
    pub fn offset(&self, d: usize) -> u32 {
        self.offsets[d]
    }

    pub fn is_admissible(x: QMonomial) -> bool {
        let n = x.len();
        if n == 0 {
            return true;
        }
        if n == 1 || !x.codes().all(is_t5) {
            return false;
        }
        matches!(x.code(0), Q15 | Q35) && matches!(x.code(n - 1), Q25 | Q45)
    }

    pub fn index_of(&self, x: QMonomial) -> Option<u32> {
        let n = x.len();
        if n > self.cutoff as usize || !Self::is_admissible(x) {
            return None;
        }
        if n == 0 {
            return Some(0);
        }
        let first = ((x.code(0) - Q15) / 2) as u32;
        let last = ((x.code(n - 1) - Q25) / 2) as u32;
        let middle = (1..n - 1).fold(0u32, |acc, k| acc * 4 + (x.code(k) - Q15) as u32);
        let rank = (first * 4u32.pow(n as u32 - 2) + middle) * 2 + last;
        Some(self.offsets[n] + rank)
    }

    pub fn get(&self, index: u32) -> QMonomial {
        assert!(index < self.len, "basis index out of range");
        let n = self.offsets.partition_point(|&o| o <= index) - 1;
        if n == 0 {
            return QMonomial::ONE;
        }
        let mut rank = index - self.offsets[n];
        let last = rank % 2;
        rank /= 2;
        let mut codes = vec![0u8; n];
        codes[n - 1] = Q25 + 2 * last as u8;
        for k in (1..n - 1).rev() {
            codes[k] = Q15 + (rank % 4) as u8;
            rank /= 4;
        }
        codes[0] = Q15 + 2 * rank as u8;
        QMonomial::from_codes(&codes).expect("fits")
    }

    pub fn members(&self) -> impl Iterator<Item = QMonomial> + '_ {
        (0..self.len).map(|i| self.get(i))
    }

    pub fn degree_profile(&self) -> Vec<u32> {
        (0..=self.cutoff as usize).map(Self::count_of_degree).collect()
    }
}

/// Which relation a step used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Commutation,
    ThreeStrand,
    FourStrand,
    /// Index into the top stabilizer generators.
    Left(u8),
    /// Index into the bottom stabilizer generators.
    Right(u8),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Admissible,
    /// `w` equals the combination `terms` in the quotient.
    Rewrite { rule: Rule, position: usize, terms: IntTerms },
}

/// Lexicographic termination measure for words of a fixed degree.
pub fn measure(x: QMonomial) -> [usize; 7] {
    let n = x.len();
    let mut m = [0usize; 7];
    for (k, c) in x.codes().enumerate() {
        if c == Q12 {
            m[0] += 1;
            m[1] += n - 1 - k;
        } else if is_t3(c) {
            m[2] += 1;
            m[3] += n - 1 - k;
        } else if is_t4(c) {
            m[4] += 1;
            m[5] += k;
        }
    }
    if m[0] + m[2] + m[4] == 0 && n > 0 {
        m[6] = if n == 1 {
            match x.code(0) {
                Q15 => 3,
                Q25 => 2,
                Q35 => 1,
                _ => 0,
            }
        } else {
            let first_bad = matches!(x.code(0), Q25 | Q45) as usize;
            let last_bad = matches!(x.code(n - 1), Q15 | Q35) as usize;
            2 * first_bad + last_bad
        };
    }
    m
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stay {
    First,
    Second,
}

/// Relation tables expanded at a fixed cutoff.
#[derive(Clone, Debug)]
pub struct RuleTable {
    cutoff: u8,
    /// `swap[x][y][stay]`: relation with quadratic part containing `x y`.
    swap: Vec<Option<(Rule, IntTerms)>>,
    left: [Option<(u8, IntTerms)>; 10],
    right: [Option<(u8, IntTerms)>; 10],
}

fn letter(code: u8) -> SignedBraidLetter {
    SignedBraidLetter::pos(StrandPair::from_code(code))
}

fn int_terms(e: &AlgebraElement<Int64>) -> IntTerms {
    e.terms().map(|(x, c)| (*x, *c)).collect()
}

impl RuleTable {
    pub fn new(cutoff: u8) -> Self {
        // Bodies keep their quadratic part; instances are truncated later.
        let expand_at = cutoff.max(2);
        let mut swap = vec![None; 200];
        let four: Vec<_> = braid_relation_set(5)
            .into_iter()
            .filter(|r| r.kind == RelationKind::FourStrand)
            .collect();
        for x in 0..10u8 {
            for y in 0..10u8 {
                if x == y {
                    continue;
                }
                for (s, stay) in [Stay::First, Stay::Second].into_iter().enumerate() {
                    let rule = Self::swap_relation(x, y, stay, expand_at, &four);
                    let xy = QMonomial::from_codes(&[x, y]).expect("fits");
                    let c = rule.1.iter().find(|(w, _)| *w == xy).map(|t| t.1);
                    assert!(matches!(c, Some(1) | Some(-1)), "swap relation lacks unit lead");
                    swap[(x as usize * 10 + y as usize) * 2 + s] = Some(rule);
                }
            }
        }
        let body = |g: &[SignedBraidLetter]| {
            int_terms(
                &expand_word(Int64, g, expand_at)
                    .sub(&AlgebraElement::one(Int64, expand_at))
                    .expect("same cutoff"),
            )
        };
        let top = crate::relations::top_generators();
        let bottom = crate::relations::bottom_generators();
        let mut left: [Option<(u8, IntTerms)>; 10] = Default::default();
        let mut right: [Option<(u8, IntTerms)>; 10] = Default::default();
        // Keyed by the letter the rule removes from the boundary.
        for (code, idx) in [(Q23, 0u8), (Q45, 1), (Q14, 3), (Q24, 4), (Q34, 5), (Q25, 7)] {
            left[code as usize] = Some((idx, body(&top[idx as usize])));
        }
        for (code, idx) in [(Q12, 0u8), (Q34, 1), (Q15, 4), (Q13, 5), (Q23, 6), (Q35, 7)] {
            right[code as usize] = Some((idx, body(&bottom[idx as usize])));
        }
        Self {
            cutoff,
            swap,
            left,
            right,
        }
    }

    fn swap_relation(
        x: u8,
        y: u8,
        stay: Stay,
        cutoff: u8,
        four: &[crate::relations::BraidRelation],
    ) -> (Rule, IntTerms) {
        let (px, py) = (StrandPair::from_code(x), StrandPair::from_code(y));
        if px.shares_strand(py) {
            let mut s = [px.i(), px.j(), py.i(), py.j()];
            s.sort_unstable();
            let mut t: Vec<u8> = s.to_vec();
            t.dedup();
            let (a, b, c) = (t[0], t[1], t[2]);
            let code = |i, j| StrandPair::new(i, j).expect("pair").code();
            let (la, lb, lc) = (code(a, b), code(a, c), code(b, c));
            let staying = if stay == Stay::First { x } else { y };
            let (lhs, rhs) = if staying == la {
                ([la, lb, lc], [lb, lc, la])
            } else if staying == lb {
                ([lb, lc, la], [lc, la, lb])
            } else {
                ([lc, la, lb], [la, lb, lc])
            };
            let word = |w: [u8; 3]| w.iter().map(|&c| letter(c)).collect::<Vec<_>>();
            let e = expand_word(Int64, &word(lhs), cutoff)
                .sub(&expand_word(Int64, &word(rhs), cutoff))
                .expect("same cutoff");
            return (Rule::ThreeStrand, int_terms(&e));
        }
        let (lo, hi) = if px.i() < py.i() { (px, py) } else { (py, px) };
        let interleaved = lo.i() < hi.i() && hi.i() < lo.j() && lo.j() < hi.j();
        if interleaved {
            let (i, j, k, l) = (lo.i(), hi.i(), lo.j(), hi.j());
            let r = four
                .iter()
                .find(|r| r.lhs[0].pair == StrandPair::new(i, k).unwrap() && r.lhs[2].pair == StrandPair::new(j, l).unwrap())
                .expect("four-strand relation");
            return (Rule::FourStrand, expand_relation_terms(r, cutoff));
        }
        let xy = QMonomial::from_codes(&[x, y]).expect("fits");
        let yx = QMonomial::from_codes(&[y, x]).expect("fits");
        let mut terms = vec![(xy, 1), (yx, -1)];
        terms.sort();
        (Rule::Commutation, terms)
    }

    pub fn cutoff(&self) -> u8 {
        self.cutoff
    }

    fn replace(&self, w: QMonomial, rule: Rule, position: usize, body: &IntTerms, u: QMonomial, v: QMonomial) -> Step {
        let inst = sandwich_terms(body, u, v, self.cutoff as usize);
        let c = inst
            .iter()
            .find(|(x, _)| *x == w)
            .map(|t| t.1)
            .expect("word occurs in its relation instance");
        debug_assert!(c == 1 || c == -1);
        let terms = inst.into_iter().filter(|(x, _)| *x != w).map(|(x, k)| (x, -c * k)).collect();
        Step::Rewrite { rule, position, terms }
    }

    fn swap_step(&self, w: QMonomial, pos: usize, stay: Stay) -> Step {
        let (x, y) = (w.code(pos), w.code(pos + 1));
        let s = if stay == Stay::First { 0 } else { 1 };
        let (rule, body) = self.swap[(x as usize * 10 + y as usize) * 2 + s]
            .as_ref()
            .expect("swap rule");
        self.replace(w, *rule, pos, body, w.slice(0, pos), w.slice(pos + 2, w.len()))
    }

    fn left_step(&self, w: QMonomial) -> Step {
        let (idx, body) = self.left[w.code(0) as usize].as_ref().expect("left rule");
        self.replace(w, Rule::Left(*idx), 0, body, QMonomial::ONE, w.slice(1, w.len()))
    }

    fn right_step(&self, w: QMonomial) -> Step {
        let n = w.len();
        let (idx, body) = self.right[w.code(n - 1) as usize].as_ref().expect("right rule");
        self.replace(w, Rule::Right(*idx), n - 1, body, w.slice(0, n - 1), QMonomial::ONE)
    }

    /// One rewrite of `w`, or `Admissible` when `w` lies in `T`.
    pub fn step(&self, w: QMonomial) -> Step {
        if TBasis::is_admissible(w) {
            return Step::Admissible;
        }
        let n = w.len();
        let (first, last) = (w.code(0), w.code(n - 1));
        // Boundary letters killed outright by a stabilizer generator.
        if first == Q23 || first == Q45 {
            return self.left_step(w);
        }
        if last == Q12 || last == Q34 {
            return self.right_step(w);
        }
        let codes: Vec<u8> = w.codes().collect();
        if let Some(pos) = codes.iter().rposition(|&c| c == Q12) {
            return self.swap_step(w, pos, Stay::Second);
        }
        if let Some(pos) = codes.iter().rposition(|&c| is_t3(c)) {
            if pos == n - 1 {
                return self.right_step(w);
            }
            return self.swap_step(w, pos, Stay::Second);
        }
        if let Some(pos) = codes.iter().position(|&c| is_t4(c)) {
            if pos == 0 {
                return self.left_step(w);
            }
            return self.swap_step(w, pos - 1, Stay::First);
        }
        if first == Q25 {
            return self.left_step(w);
        }
        self.right_step(w)
    }
}

/// Coordinate arithmetic used by [`Reducer`].
pub trait CoordSystem {
    type Vector: Clone + std::fmt::Debug;

    fn unit(&mut self, index: u32) -> Self::Vector;

    fn combine<'a>(&mut self, parts: impl Iterator<Item = (i64, &'a Self::Vector)>) -> Self::Vector
    where
        Self::Vector: 'a;

    fn is_zero(v: &Self::Vector) -> bool;

    /// Changes whenever cached vectors need [`CoordSystem::refresh`].
    fn epoch(&self) -> u64 {
        0
    }

    fn refresh(&mut self, _v: &mut Self::Vector) {}
}

/// Coordinates modulo a prime, optionally reduced modulo a row space.
#[derive(Clone, Debug)]
pub struct ModCoords {
    echelon: Echelon,
    scratch: Vec<u32>,
    touched: Vec<u32>,
}

impl ModCoords {
    pub fn new(prime: Prime, ncols: u32) -> Self {
        Self {
            echelon: Echelon::new(ncols, prime),
            scratch: vec![0; ncols as usize],
            touched: Vec::new(),
        }
    }

    pub fn with_echelon(echelon: Echelon) -> Self {
        let n = echelon.ncols() as usize;
        Self {
            echelon,
            scratch: vec![0; n],
            touched: Vec::new(),
        }
    }

    pub fn field(&self) -> Zp {
        self.echelon.field()
    }

    pub fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    pub fn echelon_mut(&mut self) -> &mut Echelon {
        &mut self.echelon
    }

    pub fn into_echelon(self) -> Echelon {
        self.echelon
    }
}

impl CoordSystem for ModCoords {
    type Vector = SparseRow;

    fn unit(&mut self, index: u32) -> SparseRow {
        self.echelon.reduce_unchecked(&[(index, 1)])
    }

    fn combine<'a>(&mut self, parts: impl Iterator<Item = (i64, &'a SparseRow)>) -> SparseRow {
        let field = self.field();
        for (k, v) in parts {
            let k = field.reduce_i64(k);
            if k == 0 {
                continue;
            }
            for &(c, a) in v.entries() {
                let slot = &mut self.scratch[c as usize];
                if *slot == 0 {
                    self.touched.push(c);
                }
                *slot = field.addm(*slot, field.mulm(k, a));
            }
        }
        self.touched.sort_unstable();
        self.touched.dedup();
        let mut out = Vec::with_capacity(self.touched.len());
        for &c in &self.touched {
            let v = std::mem::take(&mut self.scratch[c as usize]);
            if v != 0 {
                out.push((c, v));
            }
        }
        self.touched.clear();
        SparseRow::new(out).expect("sorted nonzero entries")
    }

    fn is_zero(v: &SparseRow) -> bool {
        v.is_zero()
    }

    fn epoch(&self) -> u64 {
        self.echelon.rank()
    }

    fn refresh(&mut self, v: &mut SparseRow) {
        *v = self.echelon.reduce_unchecked(v.entries());
    }
}

/// Exact integer coordinates, for auditing.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExactCoords;

impl CoordSystem for ExactCoords {
    type Vector = BTreeMap<u32, BigInt>;

    fn unit(&mut self, index: u32) -> Self::Vector {
        BTreeMap::from([(index, BigInt::from(1))])
    }

    fn combine<'a>(&mut self, parts: impl Iterator<Item = (i64, &'a Self::Vector)>) -> Self::Vector {
        let mut out: BTreeMap<u32, BigInt> = BTreeMap::new();
        for (k, v) in parts {
            for (c, a) in v {
                *out.entry(*c).or_default() += a * k;
            }
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    fn is_zero(v: &Self::Vector) -> bool {
        v.is_empty()
    }
}

/// Memoized reduction `S -> T`.
pub struct Reducer<C: CoordSystem> {
    rules: RuleTable,
    basis: TBasis,
    system: C,
    cache: FxHashMap<QMonomial, (u64, C::Vector)>,
    fuel: u64,
    steps: u64,
    use_cache: bool,
}

impl<C: CoordSystem> Reducer<C> {
    pub fn new(cutoff: u8, system: C) -> Self {
        Self {
            rules: RuleTable::new(cutoff),
            basis: TBasis::new(cutoff),
            system,
            cache: FxHashMap::default(),
            fuel: DEFAULT_FUEL,
            steps: 0,
            use_cache: true,
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> Self {
        self.fuel = fuel;
        self
    }

    /// Without the cache every call re-derives its whole rewrite tree.
    pub fn without_cache(mut self) -> Self {
        self.use_cache = false;
        self
    }

    pub fn basis(&self) -> &TBasis {
        &self.basis
    }

    pub fn rules(&self) -> &RuleTable {
        &self.rules
    }

    pub fn system(&self) -> &C {
        &self.system
    }

    pub fn system_mut(&mut self) -> &mut C {
        &mut self.system
    }

    pub fn into_system(self) -> C {
        self.system
    }

    pub fn cache_len(&self) -> usize {
        self.cache.len()
    }

    pub fn cached(&self) -> impl Iterator<Item = (&QMonomial, &C::Vector)> {
        self.cache.iter().map(|(k, v)| (k, &v.1))
    }

    pub fn insert_cached(&mut self, x: QMonomial, v: C::Vector) {
        let epoch = self.system.epoch();
        self.cache.insert(x, (epoch, v));
    }

    pub fn clear_cache(&mut self) {
        self.cache.clear();
    }

    /// Rewrite steps performed since construction.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn ensure(&mut self, w: QMonomial, budget: &mut u64, root: QMonomial) -> Result<(), RewriteError> {
        let epoch = self.system.epoch();
        if let Some(entry) = self.cache.get_mut(&w) {
            if entry.0 != epoch {
                self.system.refresh(&mut entry.1);
                entry.0 = epoch;
            }
            return Ok(());
        }
        if *budget == 0 {
            return Err(RewriteError::FuelExhausted {
                monomial: root.to_string(),
                steps: self.fuel,
            });
        }
        *budget -= 1;
        self.steps += 1;
        let v = match self.rules.step(w) {
            Step::Admissible => {
                let idx = self.basis.index_of(w).expect("admissible index");
                self.system.unit(idx)
            }
            Step::Rewrite { terms, .. } => {
                for (t, _) in &terms {
                    self.ensure(*t, budget, root)?;
                }
                let cache = &self.cache;
                self.system
                    .combine(terms.iter().map(|(t, k)| (*k, &cache.get(t).expect("child reduced").1)))
            }
        };
        self.cache.insert(w, (epoch, v));
        Ok(())
    }

    fn check(&self, x: QMonomial) -> Result<(), RewriteError> {
        if x.len() > self.rules.cutoff as usize {
            return Err(RewriteError::TooLong {
                monomial: x.to_string(),
                cutoff: self.rules.cutoff,
            });
        }
        Ok(())
    }

    /// Coordinates of `x` over `T`.
    pub fn reduce_monomial(&mut self, x: QMonomial) -> Result<C::Vector, RewriteError> {
        self.check(x)?;
        let mut budget = self.fuel;
        self.ensure(x, &mut budget, x)?;
        let v = self.cache[&x].1.clone();
        if !self.use_cache {
            self.cache.clear();
        }
        Ok(v)
    }

    /// Linear extension of [`Reducer::reduce_monomial`] to integer terms.
    pub fn reduce_terms(&mut self, terms: &[(QMonomial, i64)]) -> Result<C::Vector, RewriteError> {
        for (x, _) in terms {
            self.check(*x)?;
            let mut budget = self.fuel;
            self.ensure(*x, &mut budget, *x)?;
        }
        let cache = &self.cache;
        let v = self
            .system
            .combine(terms.iter().map(|(x, k)| (*k, &cache.get(x).expect("reduced").1)));
        if !self.use_cache {
            self.cache.clear();
        }
        Ok(v)
    }

    pub fn reduce_element(&mut self, e: &AlgebraElement<Integers>) -> Result<C::Vector, RewriteError> {
        let terms: IntTerms = e
            .terms()
            .map(|(x, c)| (*x, i64::try_from(c).expect("coefficient fits in i64")))
            .collect();
        self.reduce_terms(&terms)
    }

    /// Re-derives a cached entry from its rewrite step and compares.
    pub fn audit(&mut self, x: QMonomial) -> Result<bool, RewriteError>
    where
        C::Vector: PartialEq,
    {
        let stored = self.reduce_monomial(x)?;
        let fresh = match self.rules.step(x) {
            Step::Admissible => {
                let idx = self.basis.index_of(x).expect("admissible index");
                self.system.unit(idx)
            }
            Step::Rewrite { terms, .. } => self.reduce_terms(&terms)?,
        };
        Ok(stored == fresh)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::{monomials_up_to, qword};
    use proptest::prelude::*;

    fn exact(cutoff: u8) -> Reducer<ExactCoords> {
        Reducer::new(cutoff, ExactCoords)
    }

    #[test]
    fn basis_sizes_and_order() {
        let b = TBasis::new(6);
        assert_eq!(b.len(), 1365);
        assert_eq!(b.degree_profile(), vec![1, 0, 4, 16, 64, 256, 1024]);
        assert_eq!(TBasis::new(1).len(), 1);
        let two: Vec<String> = TBasis::new(2).members().map(|x| x.to_string()).collect();
        assert_eq!(
            two,
            vec!["1", "q[1,5]q[2,5]", "q[1,5]q[4,5]", "q[3,5]q[2,5]", "q[3,5]q[4,5]"]
        );
        let members: Vec<QMonomial> = b.members().collect();
        assert!(members.windows(2).all(|w| w[0] < w[1]));
        for (i, x) in members.iter().enumerate() {
            assert_eq!(b.index_of(*x), Some(i as u32));
        }
        let brute = monomials_up_to(10, 6).filter(|x| TBasis::is_admissible(*x)).count();
        assert_eq!(brute, 1365);
    }

    #[test]
    fn admissible_is_unit() {
        let mut r = exact(4);
        let x = qword(&[(3, 5), (1, 5), (4, 5)]);
        let idx = r.basis().index_of(x).unwrap();
        assert_eq!(r.reduce_monomial(x).unwrap(), BTreeMap::from([(idx, BigInt::from(1))]));
    }

    #[test]
    fn boundary_zeros() {
        let mut r = exact(6);
        for x in [
            qword(&[(2, 3)]),
            qword(&[(2, 3), (1, 5), (2, 4)]),
            qword(&[(1, 2), (3, 4), (1, 2)]),
            qword(&[(1, 5), (3, 4)]),
            qword(&[(4, 5), (1, 5), (2, 5)]),
        ] {
            assert!(r.reduce_monomial(x).unwrap().is_empty(), "{x}");
        }
        assert!(exact(1).reduce_monomial(qword(&[(1, 3)])).unwrap().is_empty());
    }

    #[test]
    fn step_examples() {
        let rules = RuleTable::new(6);
        // Trailing q13 becomes -q14 - q13 q14.
        let x = qword(&[(1, 5), (1, 3)]);
        assert_eq!(
            rules.step(x),
            Step::Rewrite {
                rule: Rule::Right(5),
                position: 1,
                terms: vec![
                    (qword(&[(1, 5), (1, 4)]), -1),
                    (qword(&[(1, 5), (1, 3), (1, 4)]), -1)
                ]
            }
        );
        // q12 moves right past q34 by exact commutation.
        assert_eq!(
            rules.step(qword(&[(1, 2), (3, 4), (2, 5)])),
            Step::Rewrite {
                rule: Rule::Commutation,
                position: 0,
                terms: vec![(qword(&[(3, 4), (1, 2), (2, 5)]), 1)]
            }
        );
        // q12 q23 = q23 q12 + q23 q13 - q13 q23 + higher terms.
        let Step::Rewrite { rule, terms, .. } = rules.step(qword(&[(1, 2), (2, 3), (2, 5)])) else {
            panic!()
        };
        assert_eq!(rule, Rule::ThreeStrand);
        let deg3: Vec<_> = terms.iter().filter(|t| t.0.len() == 3).cloned().collect();
        assert_eq!(
            deg3,
            vec![
                (qword(&[(1, 3), (2, 3), (2, 5)]), -1),
                (qword(&[(2, 3), (1, 2), (2, 5)]), 1),
                (qword(&[(2, 3), (1, 3), (2, 5)]), 1),
            ]
        );
        assert!(terms.iter().all(|t| t.0.len() >= 3));
        // Leading q25 is exchanged for q35.
        assert_eq!(
            rules.step(qword(&[(2, 5), (2, 5)])),
            Step::Rewrite {
                rule: Rule::Left(7),
                position: 0,
                terms: vec![
                    (qword(&[(3, 5), (2, 5)]), -1),
                    (qword(&[(2, 5), (3, 5), (2, 5)]), -1)
                ]
            }
        );
        assert_eq!(rules.step(qword(&[(1, 5), (2, 5)])), Step::Admissible);
    }

    #[test]
    fn measure_decreases() {
        let cutoff = 5;
        let rules = RuleTable::new(cutoff);
        for w in monomials_up_to(10, cutoff as usize) {
            match rules.step(w) {
                Step::Admissible => assert!(TBasis::is_admissible(w)),
                Step::Rewrite { terms, .. } => {
                    for (t, _) in terms {
                        assert!(t.len() >= w.len(), "{w} -> {t}");
                        if t.len() == w.len() {
                            assert!(measure(t) < measure(w), "{w} -> {t}");
                            let lower = |x: QMonomial| x.codes().filter(|&c| c < Q15).count();
                            assert!(lower(t) <= lower(w), "{w} -> {t}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn steps_are_relation_instances() {
        // Each step's combination differs from the word by +-(u rel v) with
        // unit coefficient on the word itself.
        let rules = RuleTable::new(4);
        for w in monomials_up_to(10, 4) {
            if let Step::Rewrite { terms, .. } = rules.step(w) {
                assert!(terms.iter().all(|(t, _)| *t != w));
            }
        }
    }

    #[test]
    fn fuel_exhaustion_reports_monomial() {
        let mut r = Reducer::new(6, ExactCoords).with_fuel(3);
        let x = qword(&[(1, 2), (1, 3), (2, 4), (3, 4), (1, 4)]);
        match r.reduce_monomial(x) {
            Err(RewriteError::FuelExhausted { monomial, .. }) => assert_eq!(monomial, x.to_string()),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            exact(2).reduce_monomial(qword(&[(1, 5), (1, 5), (2, 5)])),
            Err(RewriteError::TooLong { .. })
        ));
    }

    #[test]
    fn mod_path_matches_exact_path() {
        let cutoff = 4;
        let mut ex = exact(cutoff);
        let n = TBasis::new(cutoff).len();
        for p in [2u64, 3, 101] {
            let prime = Prime::new(p).unwrap();
            let field = prime.field();
            let mut m = Reducer::new(cutoff, ModCoords::new(prime, n));
            for x in monomials_up_to(10, cutoff as usize).step_by(7) {
                let e = ex.reduce_monomial(x).unwrap();
                let expect = SparseRow::from_integers(
                    e.iter().map(|(c, v)| (*c, i64::try_from(v).unwrap())),
                    field,
                );
                assert_eq!(m.reduce_monomial(x).unwrap(), expect, "{x}");
            }
        }
    }

    #[test]
    fn reduce_element_linear() {
        let mut r = exact(3);
        let t = qword(&[(1, 5), (2, 5)]);
        let e = AlgebraElement::from_terms(Integers, 3, [(t, BigInt::from(1))]);
        assert!(r.reduce_element(&e.sub(&e).unwrap()).unwrap().is_empty());
        assert!(r.reduce_element(&AlgebraElement::zero(Integers, 3)).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn cache_transparent_and_idempotent(codes in prop::collection::vec(0u8..10, 0..=5)) {
            let x = QMonomial::from_codes(&codes).unwrap();
            let mut cached = exact(5);
            let mut fresh = exact(5).without_cache();
            let a = cached.reduce_monomial(x).unwrap();
            prop_assert_eq!(&a, &fresh.reduce_monomial(x).unwrap());
            prop_assert!(cached.audit(x).unwrap());
            // Re-embedding the coordinates reproduces them.
            let basis = TBasis::new(5);
            let terms: IntTerms = a.iter().map(|(i, v)| (basis.get(*i), i64::try_from(v).unwrap())).collect();
            prop_assert_eq!(cached.reduce_terms(&terms).unwrap(), a);
        }
    }
}
