//! Truncated group algebra `Z P_m / I^{d+1}` of the pure braid group in the
//! generators `q_{i,j} = p_{i,j} - 1`.
//!
//! Letters are stored as small codes in colexicographic order of the strand
//! pair, `code(i, j) = C(j-1, 2) + (i - 1)`, so the generators of `P_m` are
//! exactly the codes `0..C(m, 2)` for every `m`. A monomial packs its letters
//! into one `u64`: the length lives in the top four bits and the letters are
//! left-aligned below it, which makes the integer order on the packed value
//! the degree-lexicographic order on words.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest strand count whose pairs fit in a 4-bit letter code.
pub const MAX_STRANDS: u8 = 6;
/// Longest word a packed monomial can hold.
pub const MAX_DEGREE: usize = 15;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("strand pair ({0},{1}) is not of the form 1 <= i < j <= {MAX_STRANDS}")]
    BadPair(u8, u8),
    #[error("strand pair ({i},{j}) does not live on {strands} strands")]
    PairOutOfRange { i: u8, j: u8, strands: u8 },
    #[error("monomial of degree {0} exceeds the packed capacity of {MAX_DEGREE}")]
    TooLong(usize),
    #[error("cutoff mismatch: {0} vs {1}")]
    CutoffMismatch(u8, u8),
    #[error("coefficient ring mismatch")]
    RingMismatch,
    #[error("exponent must be +1 or -1, got {0}")]
    BadExponent(i8),
    #[error("cannot parse algebra element: {0}")]
    Parse(String),
}

/// Unordered pair of strands `i < j`, 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrandPair {
    i: u8,
    j: u8,
}

impl StrandPair {
    pub fn new(i: u8, j: u8) -> Result<Self, AlgebraError> {
        if i >= 1 && i < j && j <= MAX_STRANDS {
            Ok(Self { i, j })
        } else {
            Err(AlgebraError::BadPair(i, j))
        }
    }

    /// Checked constructor that also requires `j <= strands`.
    pub fn on_strands(i: u8, j: u8, strands: u8) -> Result<Self, AlgebraError> {
        let pair = Self::new(i, j)?;
        if j > strands {
            return Err(AlgebraError::PairOutOfRange { i, j, strands });
        }
        Ok(pair)
    }

    pub fn i(self) -> u8 {
        self.i
    }

    pub fn j(self) -> u8 {
        self.j
    }

    pub fn code(self) -> u8 {
        let j = self.j - 1;
        j * (j - 1) / 2 + (self.i - 1)
    }

    pub fn from_code(code: u8) -> Self {
        debug_assert!(code < 15);
        let mut j = 2u8;
        while j * (j - 1) / 2 <= code {
            j += 1;
        }
        let i = code - (j - 1) * (j - 2) / 2 + 1;
        Self { i, j }
    }

    pub fn shares_strand(self, other: StrandPair) -> bool {
        self.i == other.i || self.i == other.j || self.j == other.i || self.j == other.j
    }

    /// Image under the 180 degree rotation of an `m`-strand braid.
    pub fn rotated(self, strands: u8) -> StrandPair {
        StrandPair {
            i: strands + 1 - self.j,
            j: strands + 1 - self.i,
        }
    }
}

impl fmt::Display for StrandPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q[{},{}]", self.i, self.j)
    }
}

/// Number of generators `q_{i,j}` of `P_m`.
pub fn generator_count(strands: u8) -> usize {
    let m = strands as usize;
    m * (m.saturating_sub(1)) / 2
}

/// All generators of `P_m` in code order.
pub fn generators(strands: u8) -> Vec<StrandPair> {
    (0..generator_count(strands) as u8)
        .map(StrandPair::from_code)
        .collect()
}

/// A word in the generators `q_{i,j}`, leftmost letter first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QMonomial(u64);

const LEN_SHIFT: u32 = 60;
const LETTER_MASK: u64 = (1 << LEN_SHIFT) - 1;

impl QMonomial {
    pub const ONE: QMonomial = QMonomial(0);

    #[inline]
    fn shift(k: usize) -> u32 {
        (56 - 4 * k) as u32
    }

    pub fn from_codes(codes: &[u8]) -> Result<Self, AlgebraError> {
        if codes.len() > MAX_DEGREE {
            return Err(AlgebraError::TooLong(codes.len()));
        }
        let mut raw = (codes.len() as u64) << LEN_SHIFT;
        for (k, &c) in codes.iter().enumerate() {
            debug_assert!(c < 15);
            raw |= (c as u64) << Self::shift(k);
        }
        Ok(Self(raw))
    }

    pub fn from_pairs(pairs: &[StrandPair]) -> Result<Self, AlgebraError> {
        let codes: Vec<u8> = pairs.iter().map(|p| p.code()).collect();
        Self::from_codes(&codes)
    }

    pub fn letter(code: u8) -> Self {
        Self((1u64 << LEN_SHIFT) | ((code as u64) << Self::shift(0)))
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub fn from_raw(raw: u64) -> Self {
        Self(raw)
    }

    #[inline]
    pub fn len(self) -> usize {
        (self.0 >> LEN_SHIFT) as usize
    }

    #[inline]
    pub fn is_one(self) -> bool {
        self.0 == 0
    }

    pub fn degree(self) -> usize {
        self.len()
    }

    #[inline]
    pub fn code(self, k: usize) -> u8 {
        debug_assert!(k < self.len());
        ((self.0 >> Self::shift(k)) & 0xf) as u8
    }

    pub fn codes(self) -> impl Iterator<Item = u8> {
        (0..self.len()).map(move |k| self.code(k))
    }

    pub fn pairs(self) -> impl Iterator<Item = StrandPair> {
        self.codes().map(StrandPair::from_code)
    }

    pub fn first(self) -> Option<u8> {
        (self.len() > 0).then(|| self.code(0))
    }

    pub fn last(self) -> Option<u8> {
        let n = self.len();
        (n > 0).then(|| self.code(n - 1))
    }

    /// Concatenation; `None` if the result would not fit.
    #[inline]
    pub fn concat(self, other: QMonomial) -> Option<QMonomial> {
        let (a, b) = (self.len(), other.len());
        if a + b > MAX_DEGREE {
            return None;
        }
        let letters = (self.0 & LETTER_MASK) | ((other.0 & LETTER_MASK) >> (4 * a));
        Some(QMonomial((((a + b) as u64) << LEN_SHIFT) | letters))
    }

    /// Letters `start..end`.
    pub fn slice(self, start: usize, end: usize) -> QMonomial {
        debug_assert!(start <= end && end <= self.len());
        let n = end - start;
        if n == 0 {
            return QMonomial::ONE;
        }
        let letters = ((self.0 & LETTER_MASK) << (4 * start)) & LETTER_MASK;
        let keep = if n == MAX_DEGREE {
            LETTER_MASK
        } else {
            LETTER_MASK & !(LETTER_MASK >> (4 * n))
        };
        QMonomial(((n as u64) << LEN_SHIFT) | (letters & keep))
    }

    pub fn reversed(self) -> QMonomial {
        let codes: Vec<u8> = self.codes().collect::<Vec<_>>().into_iter().rev().collect();
        QMonomial::from_codes(&codes).expect("same length")
    }

    /// Position of a word among all words of degree `<= len` over `base`
    /// letters: words of lower degree come first, then base-`base` digits.
    pub fn dense_index(self, base: u64) -> u64 {
        let mut offset = 0u64;
        let mut pow = 1u64;
        for _ in 0..self.len() {
            offset += pow;
            pow *= base;
        }
        let mut digits = 0u64;
        for c in self.codes() {
            digits = digits * base + c as u64;
        }
        offset + digits
    }

    pub fn from_dense_index(mut index: u64, base: u64) -> QMonomial {
        let mut len = 0usize;
        let mut pow = 1u64;
        while index >= pow {
            index -= pow;
            pow *= base;
            len += 1;
        }
        let mut codes = vec![0u8; len];
        for k in (0..len).rev() {
            codes[k] = (index % base) as u8;
            index /= base;
        }
        QMonomial::from_codes(&codes).expect("index within capacity")
    }
}

impl fmt::Debug for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for p in self.pairs() {
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// Number of monomials of degree `<= cutoff` in `generators` letters.
pub fn monomial_count(generators: u64, cutoff: usize) -> u64 {
    (0..=cutoff).map(|d| generators.pow(d as u32)).sum()
}

/// All monomials of degree exactly `degree` over `generators` letters, in
/// degree-lex order.
pub fn monomials_of_degree(generators: u8, degree: usize) -> impl Iterator<Item = QMonomial> {
    let base = generators as u64;
    let start = monomial_count(base, degree) - base.pow(degree as u32);
    let count = base.pow(degree as u32);
    (start..start + count).map(move |i| QMonomial::from_dense_index(i, base))
}

/// All monomials of degree `<= cutoff`, degree-lex order.
pub fn monomials_up_to(generators: u8, cutoff: usize) -> impl Iterator<Item = QMonomial> {
    let base = generators as u64;
    (0..monomial_count(base, cutoff)).map(move |i| QMonomial::from_dense_index(i, base))
}

/// 180 degree rotation of an `m`-strand braid: reverse the word and send
/// `(i, j)` to `(m+1-j, m+1-i)`.
pub fn reverse_monomial(x: QMonomial, strands: u8) -> QMonomial {
    let codes: Vec<u8> = x
        .pairs()
        .map(|p| p.rotated(strands).code())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    QMonomial::from_codes(&codes).expect("same length")
}

/// Coefficient ring of an [`AlgebraElement`].
pub trait Ring: Clone + fmt::Debug + PartialEq {
    type Elem: Clone + fmt::Debug + PartialEq;

    fn zero(&self) -> Self::Elem;
    fn from_i64(&self, v: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Symmetric integer representative, used for printing.
    fn to_bigint(&self, a: &Self::Elem) -> BigInt;

    fn one(&self) -> Self::Elem {
        self.from_i64(1)
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

/// Arbitrary-precision integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Integers;

impl Ring for Integers {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn from_i64(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn to_bigint(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
}

/// Machine integers with overflow checks; panics on overflow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Int64;

impl Ring for Int64 {
    type Elem = i64;

    fn zero(&self) -> i64 {
        0
    }
    fn from_i64(&self, v: i64) -> i64 {
        v
    }
    fn add(&self, a: &i64, b: &i64) -> i64 {
        a.checked_add(*b).expect("i64 coefficient overflow")
    }
    fn neg(&self, a: &i64) -> i64 {
        a.checked_neg().expect("i64 coefficient overflow")
    }
    fn mul(&self, a: &i64, b: &i64) -> i64 {
        a.checked_mul(*b).expect("i64 coefficient overflow")
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn to_bigint(&self, a: &i64) -> BigInt {
        BigInt::from(*a)
    }
}

/// Residues modulo a prime `p < 2^31`, stored in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Zp {
    p: u32,
}

impl Zp {
    pub fn new(p: u32) -> Self {
        assert!(p >= 2 && p < (1 << 31), "modulus out of range");
        Self { p }
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce_i64(self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn addm(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn mulm(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn negm(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn inv(self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let mut result = 1u64;
        let mut base = a as u64;
        let mut e = self.p as u64 - 2;
        let m = self.p as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % m;
            }
            base = base * base % m;
            e >>= 1;
        }
        result as u32
    }
}

impl Ring for Zp {
    type Elem = u32;

    fn zero(&self) -> u32 {
        0
    }
    fn from_i64(&self, v: i64) -> u32 {
        self.reduce_i64(v)
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        self.addm(*a, *b)
    }
    fn neg(&self, a: &u32) -> u32 {
        self.negm(*a)
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        self.mulm(*a, *b)
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn to_bigint(&self, a: &u32) -> BigInt {
        let a = *a as i64;
        let p = self.p as i64;
        BigInt::from(if a > p / 2 { a - p } else { a })
    }
}

/// A braid generator `p_{i,j}` or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedBraidLetter {
    pub pair: StrandPair,
    pub exponent: i8,
}

impl SignedBraidLetter {
    pub fn new(pair: StrandPair, exponent: i8) -> Result<Self, AlgebraError> {
        if exponent == 1 || exponent == -1 {
            Ok(Self { pair, exponent })
        } else {
            Err(AlgebraError::BadExponent(exponent))
        }
    }

    pub fn pos(pair: StrandPair) -> Self {
        Self { pair, exponent: 1 }
    }

    pub fn neg(pair: StrandPair) -> Self {
        Self { pair, exponent: -1 }
    }

    pub fn inverse(self) -> Self {
        Self {
            pair: self.pair,
            exponent: -self.exponent,
        }
    }
}

impl fmt::Display for SignedBraidLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p[{},{}]", self.pair.i, self.pair.j)?;
        if self.exponent < 0 {
            f.write_str("^-1")?;
        }
        Ok(())
    }
}

/// Finite linear combination of monomials of degree `<= cutoff`.
#[derive(Clone, PartialEq)]
pub struct AlgebraElement<R: Ring> {
    ring: R,
    cutoff: u8,
    terms: BTreeMap<QMonomial, R::Elem>,
}

impl<R: Ring> AlgebraElement<R> {
    pub fn zero(ring: R, cutoff: u8) -> Self {
        Self {
            ring,
            cutoff,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: R, cutoff: u8) -> Self {
        Self::monomial(ring.clone(), cutoff, QMonomial::ONE, ring.one())
    }

    /// `coeff * x`, or zero if `x` is above the cutoff.
    pub fn monomial(ring: R, cutoff: u8, x: QMonomial, coeff: R::Elem) -> Self {
        let mut e = Self::zero(ring, cutoff);
        e.add_term(x, coeff);
        e
    }

    pub fn from_terms<I>(ring: R, cutoff: u8, terms: I) -> Self
    where
        I: IntoIterator<Item = (QMonomial, R::Elem)>,
    {
        let mut e = Self::zero(ring, cutoff);
        for (x, c) in terms {
            e.add_term(x, c);
        }
        e
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn cutoff(&self) -> u8 {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&QMonomial, &R::Elem)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, x: QMonomial) -> R::Elem {
        self.terms.get(&x).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// Adds `coeff * x` in place, dropping `x` above the cutoff and any
    /// coefficient that cancels to zero.
    pub fn add_term(&mut self, x: QMonomial, coeff: R::Elem) {
        if x.len() > self.cutoff as usize || self.ring.is_zero(&coeff) {
            return;
        }
        match self.terms.get_mut(&x) {
            Some(c) => {
                let s = self.ring.add(c, &coeff);
                if self.ring.is_zero(&s) {
                    self.terms.remove(&x);
                } else {
                    *c = s;
                }
            }
            None => {
                self.terms.insert(x, coeff);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.cutoff != other.cutoff {
            return Err(AlgebraError::CutoffMismatch(self.cutoff, other.cutoff));
        }
        if self.ring != other.ring {
            return Err(AlgebraError::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (x, c) in &other.terms {
            out.add_term(*x, c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.ring.neg(c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &R::Elem) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.cutoff);
        for (x, c) in &self.terms {
            out.add_term(*x, self.ring.mul(c, k));
        }
        out
    }

    /// Truncated product: terms above the cutoff are dropped.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let limit = self.cutoff as usize;
        let mut out = Self::zero(self.ring.clone(), self.cutoff);
        for (x, a) in &self.terms {
            for (y, b) in &other.terms {
                if x.len() + y.len() > limit {
                    continue;
                }
                let xy = x.concat(*y).expect("within cutoff");
                out.add_term(xy, self.ring.mul(a, b));
            }
        }
        Ok(out)
    }

    /// `left * self * right` for monomials, truncated.
    pub fn sandwich(&self, left: QMonomial, right: QMonomial) -> Self {
        let mut out = Self::zero(self.ring.clone(), self.cutoff);
        let extra = left.len() + right.len();
        for (x, c) in &self.terms {
            if x.len() + extra > self.cutoff as usize {
                continue;
            }
            let w = left.concat(*x).and_then(|w| w.concat(right)).expect("fits");
            out.add_term(w, c.clone());
        }
        out
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|x| x.len()).min()
    }

    /// Homogeneous component of the given degree.
    pub fn degree_part(&self, degree: usize) -> Self {
        Self::from_terms(
            self.ring.clone(),
            self.cutoff,
            self.terms
                .iter()
                .filter(|(x, _)| x.len() == degree)
                .map(|(x, c)| (*x, c.clone())),
        )
    }

    /// Lowers the cutoff, dropping terms above it.
    pub fn truncate(&self, cutoff: u8) -> Self {
        Self::from_terms(
            self.ring.clone(),
            cutoff.min(self.cutoff),
            self.terms.iter().map(|(x, c)| (*x, c.clone())),
        )
    }

    /// Re-expresses coefficients in another ring through the integers.
    pub fn map_ring<S: Ring>(&self, target: S) -> AlgebraElement<S> {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(x, c)| {
                let v = self.ring.to_bigint(c);
                (*x, bigint_into(&target, &v))
            })
            .collect();
        AlgebraElement::from_terms(target, self.cutoff, terms)
    }
}

fn bigint_into<S: Ring>(ring: &S, v: &BigInt) -> S::Elem {
    if let Some(small) = v.to_i64() {
        return ring.from_i64(small);
    }
    // Horner in base 2^32 for values outside i64.
    let (sign, digits) = v.to_u32_digits();
    let base = ring.from_i64(1 << 32);
    let mut acc = ring.zero();
    for d in digits.iter().rev() {
        acc = ring.add(&ring.mul(&acc, &base), &ring.from_i64(*d as i64));
    }
    if sign == num_bigint::Sign::Minus {
        ring.neg(&acc)
    } else {
        acc
    }
}

impl AlgebraElement<Integers> {
    /// Parses the text form produced by `Display`.
    pub fn parse(text: &str, cutoff: u8) -> Result<Self, AlgebraError> {
        let err = || AlgebraError::Parse(text.to_string());
        let mut out = Self::zero(Integers, cutoff);
        let s = text.trim();
        if s == "0" {
            return Ok(out);
        }
        // Split on the joiners " + " and " - " while keeping signs.
        let mut pieces: Vec<(bool, &str)> = Vec::new();
        let mut rest = s;
        let mut negative = false;
        if let Some(r) = rest.strip_prefix('-') {
            negative = true;
            rest = r;
        }
        loop {
            let plus = rest.find(" + ");
            let minus = rest.find(" - ");
            let next = match (plus, minus) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            match next {
                Some(pos) => {
                    pieces.push((negative, &rest[..pos]));
                    negative = &rest[pos..pos + 3] == " - ";
                    rest = &rest[pos + 3..];
                }
                None => {
                    pieces.push((negative, rest));
                    break;
                }
            }
        }
        for (neg, piece) in pieces {
            let (coeff, mono) = piece.split_once('*').ok_or_else(err)?;
            let mut c: BigInt = coeff.trim().parse().map_err(|_| err())?;
            if neg {
                c = -c;
            }
            let x = parse_monomial(mono.trim()).ok_or_else(err)?;
            out.add_term(x, c);
        }
        Ok(out)
    }
}

/// Parses `1` or a run of `q[i,j]` letters.
pub fn parse_monomial(s: &str) -> Option<QMonomial> {
    if s == "1" {
        return Some(QMonomial::ONE);
    }
    let mut pairs = Vec::new();
    let mut rest = s;
    while !rest.is_empty() {
        let body = rest.strip_prefix("q[")?;
        let close = body.find(']')?;
        let (i, j) = body[..close].split_once(',')?;
        pairs.push(StrandPair::new(i.trim().parse().ok()?, j.trim().parse().ok()?).ok()?);
        rest = &body[close + 1..];
    }
    QMonomial::from_pairs(&pairs).ok()
}

impl<R: Ring> fmt::Display for AlgebraElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (x, c)) in self.terms.iter().enumerate() {
            let v = self.ring.to_bigint(c);
            let negative = v.is_negative();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{}*{}", v.abs(), x)?;
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for AlgebraElement<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgebraElement(cutoff={}, {})", self.cutoff, self)
    }
}

/// Image of `p_{i,j}^{\pm 1}` in the truncated algebra.
pub fn expand_letter<R: Ring>(ring: R, letter: SignedBraidLetter, cutoff: u8) -> AlgebraElement<R> {
    let code = letter.pair.code();
    let mut out = AlgebraElement::one(ring.clone(), cutoff);
    if letter.exponent > 0 {
        out.add_term(QMonomial::letter(code), ring.one());
    } else {
        let mut power = QMonomial::ONE;
        for k in 1..=cutoff as usize {
            power = power.concat(QMonomial::letter(code)).expect("fits");
            let sign = if k % 2 == 0 { 1 } else { -1 };
            out.add_term(power, ring.from_i64(sign));
        }
    }
    out
}

/// Image of a braid word, left to right.
pub fn expand_word<R: Ring>(ring: R, word: &[SignedBraidLetter], cutoff: u8) -> AlgebraElement<R> {
    word.iter().fold(AlgebraElement::one(ring.clone(), cutoff), |acc, l| {
        acc.mul(&expand_letter(ring.clone(), *l, cutoff))
            .expect("same cutoff and ring")
    })
}

/// Convenience for tests and tables: builds `p_{i,j}` letters.
pub fn braid_word(letters: &[(u8, u8, i8)]) -> Vec<SignedBraidLetter> {
    letters
        .iter()
        .map(|&(i, j, e)| {
            SignedBraidLetter::new(StrandPair::new(i, j).expect("valid pair"), e).expect("valid exponent")
        })
        .collect()
}

/// Convenience: monomial from `(i, j)` pairs.
pub fn qword(pairs: &[(u8, u8)]) -> QMonomial {
    let ps: Vec<StrandPair> = pairs
        .iter()
        .map(|&(i, j)| StrandPair::new(i, j).expect("valid pair"))
        .collect();
    QMonomial::from_pairs(&ps).expect("fits")
}

impl<R: Ring> AlgebraElement<R> {
    /// Whether every coefficient is `+-1` (used by rule tables).
    pub fn is_unit_coefficient(&self, x: QMonomial) -> Option<i64> {
        let v = self.ring.to_bigint(&self.coefficient(x));
        if v.is_one() {
            Some(1)
        } else if (-v).is_one() {
            Some(-1)
        } else {
            None
        }
    }
}
