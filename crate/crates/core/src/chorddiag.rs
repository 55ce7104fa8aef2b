//! Morse chord diagrams on `2n+1` strands, ordinary chord diagrams of long
//! knots, and the forgetful map between them.
//!
//! Strands are joined by minima at `(1,2), (3,4), ...` and by maxima at
//! `(2,3), (4,5), ...`; the long knot runs down strand 1, up strand 2, and so
//! on, leaving downward along strand `2n+1`. Words are read bottom to top.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::modlinalg::{Echelon, Prime, SparseRow};
use crate::qalgebra::StrandPair;

/// Modulus for eliminations too large for exact rationals.
pub const LARGE_PRIME: u64 = 2_147_483_647;
/// Column count up to which eliminations run over the rationals.
pub const EXACT_LIMIT: usize = 1500;

pub const MAX_MAXIMA: usize = 2;
pub const MAX_CHORDS: usize = 6;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChordError {
    #[error("size guard: n = {n}, k = {k} (supported: n <= 2, k <= 6)")]
    TooLarge { n: usize, k: usize },
    #[error("chord {0} is not on the strands of the diagram")]
    BadChord(String),
    #[error("{k} chords cannot be presented on {strands} strands")]
    TooManyChords { k: usize, strands: usize },
    #[error("arrange needs n chords on 2n+1 strands, got {k} chords on {strands} strands")]
    NotArrangeable { k: usize, strands: usize },
    #[error("cannot parse {0:?}")]
    Parse(String),
}

/// A chord `t_{i,j}`, stored by its colex pair code.
pub type Chord = u8;

pub fn chord(i: u8, j: u8) -> Chord {
    StrandPair::new(i, j).expect("valid chord").code()
}

fn ends(c: Chord) -> (u8, u8) {
    let p = StrandPair::from_code(c);
    (p.i(), p.j())
}

fn commute(a: Chord, b: Chord) -> bool {
    a != b && !StrandPair::from_code(a).shares_strand(StrandPair::from_code(b))
}

/// A word of chords, bottom to top, on `2n+1` strands.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MorseChordDiagram {
    pub n: usize,
    pub word: Vec<Chord>,
}

impl MorseChordDiagram {
    pub fn new(n: usize, word: Vec<Chord>) -> Result<Self, ChordError> {
        let strands = 2 * n as u8 + 1;
        for &c in &word {
            if ends(c).1 > strands {
                return Err(ChordError::BadChord(format_chord(c)));
            }
        }
        Ok(Self { n, word })
    }

    pub fn strands(&self) -> usize {
        2 * self.n + 1
    }

    pub fn chords(&self) -> usize {
        self.word.len()
    }

    pub fn canonical(&self) -> Self {
        Self {
            n: self.n,
            word: canonical_word(&self.word),
        }
    }

    /// Parses "1-3,2-4" (bottom to top). The maxima count defaults to the
    /// smallest that fits when `n` is `None`.
    pub fn parse(spec: &str, n: Option<usize>) -> Result<Self, ChordError> {
        let word = parse_chords(spec)?;
        let needed = word.iter().map(|&c| ends(c).1 as usize).max().unwrap_or(1);
        let n = n.unwrap_or(needed / 2);
        Self::new(n, word)
    }

    /// Ends per strand.
    pub fn profile(&self) -> Vec<usize> {
        let mut n = vec![0; self.strands()];
        for &c in &self.word {
            let (i, j) = ends(c);
            n[i as usize - 1] += 1;
            n[j as usize - 1] += 1;
        }
        n
    }

    /// Exactly one chord end on each of the first `2n` strands.
    pub fn is_arranged(&self) -> bool {
        let p = self.profile();
        p[..2 * self.n].iter().all(|&c| c == 1)
    }
}

fn format_chord(c: Chord) -> String {
    let (i, j) = ends(c);
    format!("{i}-{j}")
}

impl fmt::Display for MorseChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "(empty on {} strands)", self.strands());
        }
        let parts: Vec<String> = self.word.iter().map(|&c| format_chord(c)).collect();
        f.write_str(&parts.join(","))
    }
}

fn parse_chords(spec: &str) -> Result<Vec<Chord>, ChordError> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    spec.split(',')
        .map(|tok| {
            let err = || ChordError::Parse(tok.to_string());
            let (a, b) = tok.trim().split_once('-').ok_or_else(err)?;
            let (a, b): (u8, u8) = (a.trim().parse().map_err(|_| err())?, b.trim().parse().map_err(|_| err())?);
            let (i, j) = (a.min(b), a.max(b));
            StrandPair::new(i, j).map(|p| p.code()).map_err(|_| err())
        })
        .collect()
}

/// Lexicographically least word in the far-commutation class.
pub fn canonical_word(w: &[Chord]) -> Vec<Chord> {
    let mut rest = w.to_vec();
    let mut out = Vec::with_capacity(w.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for i in 0..rest.len() {
            if rest[..i].iter().all(|&c| commute(c, rest[i])) && best.map_or(true, |b| rest[i] < rest[b]) {
                best = Some(i);
            }
        }
        out.push(rest.remove(best.expect("first letter is always available")));
    }
    out
}

fn check_size(n: usize, k: usize) -> Result<(), ChordError> {
    if n > MAX_MAXIMA || k > MAX_CHORDS || n == 0 {
        return Err(ChordError::TooLarge { n, k });
    }
    Ok(())
}

fn all_words(letters: usize, k: usize) -> impl Iterator<Item = Vec<Chord>> {
    let total = letters.pow(k as u32);
    (0..total).map(move |mut idx| {
        let mut w = vec![0u8; k];
        for slot in w.iter_mut().rev() {
            *slot = (idx % letters) as u8;
            idx /= letters;
        }
        w
    })
}

fn letter_count(n: usize) -> usize {
    let s = 2 * n + 1;
    s * (s - 1) / 2
}

/// One canonical word per far-commutation class of `k`-chord words.
pub fn enumerate(n: usize, k: usize) -> Result<Vec<MorseChordDiagram>, ChordError> {
    check_size(n, k)?;
    let mut set: Vec<Vec<Chord>> = all_words(letter_count(n), k)
        .filter(|w| canonical_word(w) == *w)
        .collect();
    set.sort();
    Ok(set.into_iter().map(|word| MorseChordDiagram { n, word }).collect())
}

/// Exact or modular rank of integer rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Dimension {
    pub columns: usize,
    pub rank: usize,
    pub dim: usize,
    /// False when computed modulo [`LARGE_PRIME`].
    pub exact: bool,
}

fn rational_rank(rows: &[Vec<(u32, i64)>]) -> usize {
    let mut pivots: HashMap<u32, BTreeMap<u32, BigRational>> = HashMap::new();
    for r in rows {
        let mut row: BTreeMap<u32, BigRational> = BTreeMap::new();
        for &(c, v) in r {
            *row.entry(c).or_insert_with(BigRational::zero) += BigRational::from_integer(BigInt::from(v));
        }
        row.retain(|_, v| !v.is_zero());
        while let Some((&col, lead)) = row.iter().next_back() {
            let Some(p) = pivots.get(&col) else { break };
            let f = lead.clone();
            for (c, v) in p {
                let e = row.entry(*c).or_insert_with(BigRational::zero);
                *e -= &f * v;
            }
            row.retain(|_, v| !v.is_zero());
        }
        if let Some((&col, lead)) = row.iter().next_back() {
            let inv = lead.recip();
            for v in row.values_mut() {
                *v *= &inv;
            }
            pivots.insert(col, row);
        }
    }
    pivots.len()
}

fn modular_echelon(rows: &[Vec<(u32, i64)>], ncols: usize) -> Echelon {
    let prime = Prime::new(LARGE_PRIME).expect("prime");
    let field = prime.field();
    let mut e = Echelon::new(ncols as u32, prime);
    for r in rows {
        e.insert(&SparseRow::from_integers(r.iter().copied(), field))
            .expect("columns in range");
    }
    e
}

pub fn dimension(rows: &[Vec<(u32, i64)>], ncols: usize) -> Dimension {
    let (rank, exact) = if ncols <= EXACT_LIMIT {
        (rational_rank(rows), true)
    } else {
        (modular_echelon(rows, ncols).rank() as usize, false)
    };
    Dimension {
        columns: ncols,
        rank,
        dim: ncols - rank,
        exact,
    }
}

/// Basis and relation rows of `A_k^n`.
#[derive(Clone, Debug)]
pub struct DiagramSpace {
    pub n: usize,
    pub k: usize,
    pub basis: Vec<MorseChordDiagram>,
    pub index: HashMap<Vec<Chord>, u32>,
    pub rows: Vec<Vec<(u32, i64)>>,
}

fn top_pairs(n: usize) -> Vec<(u8, u8)> {
    (1..=n as u8).map(|m| (2 * m, 2 * m + 1)).collect()
}

fn bottom_pairs(n: usize) -> Vec<(u8, u8)> {
    (1..=n as u8).map(|m| (2 * m - 1, 2 * m)).collect()
}

fn normalize_row(mut row: Vec<(u32, i64)>) -> Vec<(u32, i64)> {
    row.sort_unstable();
    let mut out: Vec<(u32, i64)> = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| e.1 != 0);
    if out.first().is_some_and(|e| e.1 < 0) {
        for e in out.iter_mut() {
            e.1 = -e.1;
        }
    }
    out
}

impl DiagramSpace {
    fn col(&self, w: &[Chord]) -> u32 {
        self.index[&canonical_word(w)]
    }

    /// Relations of `A_k^n`: 4T, framing independence and strand exchange.
    pub fn new(n: usize, k: usize) -> Result<Self, ChordError> {
        let basis = enumerate(n, k)?;
        let index: HashMap<Vec<Chord>, u32> = basis
            .iter()
            .enumerate()
            .map(|(i, d)| (d.word.clone(), i as u32))
            .collect();
        let mut space = Self {
            n,
            k,
            basis,
            index,
            rows: Vec::new(),
        };
        let letters = letter_count(n);
        let strands = 2 * n as u8 + 1;
        let mut seen: HashSet<Vec<(u32, i64)>> = HashSet::new();
        let mut rows = Vec::new();
        let mut push = |row: Vec<(u32, i64)>| {
            let row = normalize_row(row);
            if !row.is_empty() && seen.insert(row.clone()) {
                rows.push(row);
            }
        };
        if k >= 2 {
            for a in 1..=strands {
                for b in a + 1..=strands {
                    for c in b + 1..=strands {
                        let (ab, ac, bc) = (chord(a, b), chord(a, c), chord(b, c));
                        for (x, y, z) in [(ab, ac, bc), (ac, ab, bc), (bc, ab, ac)] {
                            // [x, y + z]
                            for split in 0..=k - 2 {
                                for u in all_words(letters, split) {
                                    for v in all_words(letters, k - 2 - split) {
                                        let w = |p: Chord, q: Chord| {
                                            let mut s = u.clone();
                                            s.push(p);
                                            s.push(q);
                                            s.extend_from_slice(&v);
                                            space.col(&s)
                                        };
                                        push(vec![(w(x, y), 1), (w(y, x), -1), (w(x, z), 1), (w(z, x), -1)]);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        if k >= 1 {
            for w in all_words(letters, k - 1) {
                let at_top = |c: Chord| {
                    let mut s = w.clone();
                    s.push(c);
                    space.col(&s)
                };
                let at_bottom = |c: Chord| {
                    let mut s = vec![c];
                    s.extend_from_slice(&w);
                    space.col(&s)
                };
                for (p, q) in top_pairs(n) {
                    push(vec![(at_top(chord(p, q)), 1)]);
                    for x in (1..=strands).filter(|&x| x != p && x != q) {
                        let pair = |s: u8| chord(x.min(s), x.max(s));
                        push(vec![(at_top(pair(p)), 1), (at_top(pair(q)), 1)]);
                    }
                }
                for (p, q) in bottom_pairs(n) {
                    push(vec![(at_bottom(chord(p, q)), 1)]);
                    for x in (1..=strands).filter(|&x| x != p && x != q) {
                        let pair = |s: u8| chord(x.min(s), x.max(s));
                        push(vec![(at_bottom(pair(p)), 1), (at_bottom(pair(q)), 1)]);
                    }
                }
            }
        }
        space.rows = rows;
        Ok(space)
    }

    pub fn dim(&self) -> Dimension {
        dimension(&self.rows, self.basis.len())
    }
}

pub fn relation_matrix(n: usize, k: usize) -> Result<DiagramSpace, ChordError> {
    DiagramSpace::new(n, k)
}

/// A perfect matching on `2k` points of a line, labelled by first
/// occurrence: `[0, 1, 0, 1]` is the crossing pair of chords.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StableChordDiagram {
    labels: Vec<u8>,
}

impl StableChordDiagram {
    /// Relabels any chord labelling by first occurrence.
    pub fn from_labels(raw: &[u8]) -> Option<Self> {
        let mut map: HashMap<u8, u8> = HashMap::new();
        let mut count: HashMap<u8, usize> = HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &r in raw {
            let next = map.len() as u8;
            labels.push(*map.entry(r).or_insert(next));
            *count.entry(r).or_default() += 1;
        }
        count.values().all(|&c| c == 2).then_some(Self { labels })
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn chords(&self) -> usize {
        self.labels.len() / 2
    }

    /// Endpoint positions `(first, second)` per chord label.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = vec![(usize::MAX, usize::MAX); self.chords()];
        for (pos, &l) in self.labels.iter().enumerate() {
            let e = &mut out[l as usize];
            if e.0 == usize::MAX {
                e.0 = pos;
            } else {
                e.1 = pos;
            }
        }
        out
    }

    pub fn has_isolated_chord(&self) -> bool {
        self.labels.windows(2).any(|w| w[0] == w[1])
    }
}

impl fmt::Display for StableChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().iter().map(|(a, b)| format!("{}-{}", a + 1, b + 1)).collect();
        f.write_str(&parts.join(","))
    }
}

/// All perfect matchings on `2k` points, in lexicographic label order.
pub fn matchings(k: usize) -> Vec<StableChordDiagram> {
    fn rec(labels: &mut Vec<Option<u8>>, next: u8, out: &mut Vec<StableChordDiagram>) {
        let Some(first) = labels.iter().position(|l| l.is_none()) else {
            out.push(StableChordDiagram {
                labels: labels.iter().map(|l| l.expect("filled")).collect(),
            });
            return;
        };
        labels[first] = Some(next);
        for j in first + 1..labels.len() {
            if labels[j].is_none() {
                labels[j] = Some(next);
                rec(labels, next + 1, out);
                labels[j] = None;
            }
        }
        labels[first] = None;
    }
    let mut out = Vec::new();
    rec(&mut vec![None; 2 * k], 0, &mut out);
    out.sort();
    out
}

/// Basis and relation rows of the stable space `A_k`.
#[derive(Clone, Debug)]
pub struct StableSpace {
    pub k: usize,
    pub basis: Vec<StableChordDiagram>,
    pub index: HashMap<StableChordDiagram, u32>,
    pub rows: Vec<Vec<(u32, i64)>>,
}

impl StableSpace {
    /// Rows: isolated chords vanish; for every chord `a` and moving end of
    /// another chord, the sum over the ends `e` of `a` of (moving end just
    /// after `e`) minus (just before `e`) vanishes.
    pub fn new(k: usize) -> Result<Self, ChordError> {
        if k > MAX_CHORDS {
            return Err(ChordError::TooLarge { n: 0, k });
        }
        let basis = matchings(k);
        let index: HashMap<StableChordDiagram, u32> =
            basis.iter().enumerate().map(|(i, d)| (d.clone(), i as u32)).collect();
        let mut seen = HashSet::new();
        let mut rows = Vec::new();
        for (i, d) in basis.iter().enumerate() {
            if d.has_isolated_chord() {
                rows.push(vec![(i as u32, 1)]);
            }
        }
        for d in &basis {
            let pairs = d.pairs();
            for (b, &(b0, b1)) in pairs.iter().enumerate() {
                for moving in [b0, b1] {
                    let mut reduced: Vec<u8> = d.labels.clone();
                    reduced.remove(moving);
                    let moving_label = b as u8;
                    for (a, _) in pairs.iter().enumerate().filter(|(a, _)| *a != b) {
                        let ends_of_a: Vec<usize> = reduced
                            .iter()
                            .enumerate()
                            .filter(|(_, &l)| l == a as u8)
                            .map(|(p, _)| p)
                            .collect();
                        let place = |pos: usize| {
                            let mut v = reduced.clone();
                            v.insert(pos, moving_label);
                            index[&StableChordDiagram::from_labels(&v).expect("matching")]
                        };
                        let mut row = Vec::new();
                        for &e in &ends_of_a {
                            row.push((place(e + 1), 1));
                            row.push((place(e), -1));
                        }
                        let row = normalize_row(row);
                        if !row.is_empty() && seen.insert(row.clone()) {
                            rows.push(row);
                        }
                    }
                }
            }
        }
        Ok(Self { k, basis, index, rows })
    }

    pub fn dim(&self) -> Dimension {
        dimension(&self.rows, self.basis.len())
    }

    /// Echelon of the relations modulo [`LARGE_PRIME`].
    pub fn relation_echelon(&self) -> Echelon {
        modular_echelon(&self.rows, self.basis.len())
    }
}

/// Dimension of the stable space of `k`-chord diagrams.
pub fn stable_dim(k: usize) -> Result<Dimension, ChordError> {
    Ok(StableSpace::new(k)?.dim())
}

/// Stable image with the orientation sign `(-1)^(ends on downward strands)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedImage {
    pub diagram: StableChordDiagram,
    pub sign: i64,
}

/// The forgetful map: order chord ends along the long knot.
pub fn forgetful(d: &MorseChordDiagram) -> SignedImage {
    let k = d.word.len();
    let mut points: Vec<(usize, u8)> = Vec::with_capacity(2 * k);
    let mut odd_ends = 0;
    for (pos, &c) in d.word.iter().enumerate() {
        let h = pos + 1;
        let (i, j) = ends(c);
        for s in [i, j] {
            let s = s as usize;
            let param = if s % 2 == 0 {
                (s - 1) * (k + 1) + h
            } else {
                odd_ends += 1;
                (s - 1) * (k + 1) + (k + 1 - h)
            };
            points.push((param, pos as u8));
        }
    }
    points.sort_unstable();
    let raw: Vec<u8> = points.iter().map(|p| p.1).collect();
    SignedImage {
        diagram: StableChordDiagram::from_labels(&raw).expect("two ends per chord"),
        sign: if odd_ends % 2 == 0 { 1 } else { -1 },
    }
}

/// Whether the images of the `A_k^n` basis span the stable space.
#[derive(Clone, Debug, Serialize)]
pub struct SurjectivityReport {
    pub n: usize,
    pub k: usize,
    pub morse_diagrams: usize,
    pub distinct_images: usize,
    pub stable_dim: usize,
    pub image_rank: usize,
    pub surjective: bool,
}

pub fn check_surjectivity(n: usize, k: usize) -> Result<SurjectivityReport, ChordError> {
    let basis = enumerate(n, k)?;
    let stable = StableSpace::new(k)?;
    let mut e = stable.relation_echelon();
    let relation_rank = e.rank();
    let field = e.field();
    let images: HashSet<u32> = basis.iter().map(|d| stable.index[&forgetful(d).diagram]).collect();
    let mut sorted: Vec<u32> = images.iter().copied().collect();
    sorted.sort_unstable();
    for c in &sorted {
        e.insert(&SparseRow::from_integers([(*c, 1)], field)).expect("in range");
    }
    let ncols = stable.basis.len();
    let stable_dim = ncols - relation_rank as usize;
    let image_rank = (e.rank() - relation_rank) as usize;
    Ok(SurjectivityReport {
        n,
        k,
        morse_diagrams: basis.len(),
        distinct_images: sorted.len(),
        stable_dim,
        image_rank,
        surjective: image_rank == stable_dim,
    })
}

#[derive(Clone, Copy, Debug)]
struct Placed {
    a: u8,
    b: u8,
    height: f64,
}

fn param(strand: u8, height: f64) -> f64 {
    let base = (strand - 1) as f64;
    if strand % 2 == 0 {
        base + height
    } else {
        base + 1.0 - height
    }
}

fn point_at(t: f64) -> (u8, f64) {
    let s = t.floor();
    let frac = t - s;
    let strand = s as u8 + 1;
    let h = if strand % 2 == 0 { frac } else { 1.0 - frac };
    (strand, h)
}

fn present_placed(d: &StableChordDiagram, n: usize) -> Vec<Placed> {
    let k = d.chords();
    if k == 0 {
        return Vec::new();
    }
    if k + 2 <= 2 * n {
        return present_placed(d, n - 1);
    }
    // Chords by right end, largest first.
    let mut pairs = d.pairs();
    pairs.sort_by_key(|p| std::cmp::Reverse(p.1));
    let strip = if k == 2 * n { 2 } else { 1 };
    let stripped: Vec<(usize, usize)> = pairs[..strip].to_vec();
    let removed: HashSet<usize> = stripped.iter().flat_map(|p| [p.0, p.1]).collect();
    let rest_raw: Vec<u8> = d
        .labels
        .iter()
        .enumerate()
        .filter(|(p, _)| !removed.contains(p))
        .map(|(_, &l)| l)
        .collect();
    let rest = StableChordDiagram::from_labels(&rest_raw).expect("sub-matching");
    let mut placed = present_placed(&rest, n - 1);
    // Old points in traversal order, tagged with their position in `d`.
    let old_positions: Vec<usize> = (0..2 * k).filter(|p| !removed.contains(p)).collect();
    let mut old_params: Vec<f64> = placed
        .iter()
        .flat_map(|c| [param(c.a, c.height), param(c.b, c.height)])
        .collect();
    old_params.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let mut anchors: Vec<(usize, f64)> = old_positions.into_iter().zip(old_params).collect();
    let old_end = (2 * n - 1) as f64;
    let mut heights: Vec<f64> = placed.iter().map(|c| c.height).collect();
    let top_strand = 2 * n as u8;
    let last_strand = top_strand + 1;
    // Left ends on old strands, in position order.
    let (c2, c1) = if strip == 2 {
        (Some(stripped[1]), stripped[0])
    } else {
        (None, stripped[0])
    };
    let c1_on_new = c2.map_or(c1.0 + 2 == 2 * k, |c2| c1.0 > c2.1);
    let mut lefts: Vec<(usize, usize)> = Vec::new();
    if let Some(c2) = c2 {
        lefts.push((c2.0, 2));
    }
    if !c1_on_new {
        lefts.push((c1.0, 1));
    }
    lefts.sort();
    let mut h_of = [0.0f64; 3];
    for (pos, which) in lefts {
        let lo = anchors.iter().filter(|a| a.0 < pos).map(|a| a.1).fold(0.0, f64::max);
        let hi = anchors.iter().filter(|a| a.0 > pos).map(|a| a.1).fold(old_end, f64::min);
        let mut t = (lo + hi) / 2.0;
        loop {
            let (_, h) = point_at(t);
            let frac = t - t.floor();
            if frac > 0.0 && !heights.contains(&h) {
                break;
            }
            t = (lo + t) / 2.0;
        }
        let (strand, h) = point_at(t);
        anchors.push((pos, t));
        heights.push(h);
        h_of[which] = h;
        let other = if which == 2 { top_strand } else { last_strand };
        placed.push(Placed { a: strand, b: other, height: h });
    }
    if c1_on_new {
        let top = heights.iter().copied().fold(0.0, f64::max);
        let h = (top + 1.0) / 2.0;
        placed.push(Placed {
            a: top_strand,
            b: last_strand,
            height: h,
        });
    }
    placed
}

/// A Morse diagram on `2n+1` strands whose forgetful image is `d`.
pub fn present_on_strands(d: &StableChordDiagram, n: usize) -> Result<MorseChordDiagram, ChordError> {
    let k = d.chords();
    if k > 2 * n {
        return Err(ChordError::TooManyChords { k, strands: 2 * n + 1 });
    }
    let mut placed = present_placed(d, n);
    placed.sort_by(|x, y| x.height.partial_cmp(&y.height).expect("finite"));
    let word = placed.iter().map(|c| chord(c.a.min(c.b), c.a.max(c.b))).collect();
    let out = MorseChordDiagram { n, word };
    assert_eq!(forgetful(&out).diagram, *d, "presentation round-trip");
    Ok(out)
}

/// One strand-exchange move in [`arrange`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExchangeMove {
    /// Index of the chord in the word (bottom = 0).
    pub position: usize,
    pub from_strand: u8,
    pub to_strand: u8,
    /// The diagram changes sign under each exchange.
    pub sign: i64,
}

#[derive(Clone, Debug)]
pub struct Arrangement {
    pub diagram: MorseChordDiagram,
    pub trace: Vec<ExchangeMove>,
    /// Product of the move signs: input = sign * output modulo relations.
    pub sign: i64,
}

/// Applies exchange moves to a word.
pub fn replay(d: &MorseChordDiagram, trace: &[ExchangeMove]) -> MorseChordDiagram {
    let mut word = d.word.clone();
    for m in trace {
        let (i, j) = ends(word[m.position]);
        let other = if i == m.from_strand { j } else { i };
        word[m.position] = chord(other.min(m.to_strand), other.max(m.to_strand));
    }
    MorseChordDiagram { n: d.n, word }
}

/// Moves chord ends across critical points into empty strands until each of
/// the first `2n` strands carries exactly one end.
pub fn arrange(d: &MorseChordDiagram) -> Result<Arrangement, ChordError> {
    let n = d.n;
    if d.word.len() != n {
        return Err(ChordError::NotArrangeable {
            k: d.word.len(),
            strands: d.strands(),
        });
    }
    let mut cur = d.clone();
    let mut trace = Vec::new();
    while !cur.is_arranged() {
        let prof = cur.profile();
        let m = (0..2 * n).find(|&i| prof[i] == 0).expect("an empty strand") + 1;
        let before: usize = prof[..m - 1].iter().sum();
        let (from, to) = if before >= m {
            (m - 1, m)
        } else {
            let j = (m + 1..=2 * n + 1).find(|&j| prof[j - 1] > 0).expect("an occupied strand");
            (j, j - 1)
        };
        let (from, to) = (from as u8, to as u8);
        // Joined at a maximum when the lower strand of the pair is even.
        let at_top = from.min(to) % 2 == 0;
        let touching: Vec<usize> = (0..cur.word.len())
            .filter(|&p| {
                let (i, j) = ends(cur.word[p]);
                i == from || j == from
            })
            .collect();
        let position = if at_top {
            *touching.last().expect("occupied")
        } else {
            touching[0]
        };
        let mv = ExchangeMove {
            position,
            from_strand: from,
            to_strand: to,
            sign: -1,
        };
        cur = replay(&cur, std::slice::from_ref(&mv));
        trace.push(mv);
    }
    let sign = if trace.len() % 2 == 0 { 1 } else { -1 };
    Ok(Arrangement {
        diagram: cur,
        trace,
        sign,
    })
}

/// Parses "1-3,2-4" into a stable diagram given by endpoint positions.
pub fn parse_stable(spec: &str) -> Result<StableChordDiagram, ChordError> {
    let err = || ChordError::Parse(spec.to_string());
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(StableChordDiagram { labels: Vec::new() });
    }
    let pairs: Vec<(usize, usize)> = spec
        .split(',')
        .map(|tok| {
            let (a, b) = tok.trim().split_once('-').ok_or_else(err)?;
            Ok((a.trim().parse().map_err(|_| err())?, b.trim().parse().map_err(|_| err())?))
        })
        .collect::<Result<_, ChordError>>()?;
    let total = 2 * pairs.len();
    let mut raw = vec![u8::MAX; total];
    for (l, &(a, b)) in pairs.iter().enumerate() {
        for p in [a, b] {
            if p == 0 || p > total || raw[p - 1] != u8::MAX {
                return Err(err());
            }
            raw[p - 1] = l as u8;
        }
    }
    StableChordDiagram::from_labels(&raw).ok_or_else(err)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn md(n: usize, spec: &str) -> MorseChordDiagram {
        MorseChordDiagram::parse(spec, Some(n)).unwrap()
    }

    /// Brute-force class count: breadth-first closure under adjacent swaps.
    fn class_count(n: usize, k: usize) -> usize {
        let mut seen: HashSet<Vec<Chord>> = HashSet::new();
        let mut classes = 0;
        for w in all_words(letter_count(n), k) {
            if seen.contains(&w) {
                continue;
            }
            classes += 1;
            let mut stack = vec![w.clone()];
            seen.insert(w);
            while let Some(x) = stack.pop() {
                for i in 0..x.len().saturating_sub(1) {
                    if commute(x[i], x[i + 1]) {
                        let mut y = x.clone();
                        y.swap(i, i + 1);
                        if seen.insert(y.clone()) {
                            stack.push(y);
                        }
                    }
                }
            }
        }
        classes
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate(1, 1).unwrap().len(), 3);
        assert_eq!(enumerate(1, 2).unwrap().len(), 9);
        assert_eq!(enumerate(2, 2).unwrap().len(), 85);
        assert_eq!(enumerate(2, 2).unwrap().len(), class_count(2, 2));
        assert_eq!(enumerate(2, 3).unwrap().len(), class_count(2, 3));
        assert!(enumerate(3, 1).is_err());
        assert!(enumerate(1, 7).is_err());
    }

    #[test]
    fn canonical_is_class_invariant() {
        let w = vec![chord(3, 4), chord(1, 2), chord(2, 5)];
        let swapped = vec![chord(1, 2), chord(3, 4), chord(2, 5)];
        assert_eq!(canonical_word(&w), canonical_word(&swapped));
        assert_eq!(canonical_word(&w), swapped);
    }

    #[test]
    fn morse_dimensions() {
        assert_eq!(relation_matrix(1, 0).unwrap().dim().dim, 1);
        assert_eq!(relation_matrix(1, 1).unwrap().dim().dim, 0);
        let d3 = relation_matrix(1, 3).unwrap().dim();
        assert!(d3.exact);
        assert_eq!(d3.dim, 2);
        assert_eq!(relation_matrix(2, 0).unwrap().dim().dim, 1);
    }

    #[test]
    fn stable_dimensions() {
        let dims: Vec<usize> = (0..=5).map(|k| stable_dim(k).unwrap().dim).collect();
        assert_eq!(dims, vec![1, 0, 1, 1, 3, 4]);
        assert_eq!(matchings(4).len(), 105);
        assert!(stable_dim(4).unwrap().exact);
    }

    #[test]
    fn forgetful_examples() {
        let one = forgetful(&md(1, "1-3"));
        assert_eq!(one.diagram.labels(), &[0, 0]);
        let a = md(2, "3-4,1-2,2-5");
        let b = md(2, "1-2,3-4,2-5");
        assert_eq!(forgetful(&a), forgetful(&b));
        // Ends ordered along the knot: strand 1 down, strand 2 up, ...
        let d = forgetful(&md(1, "1-2,2-3"));
        assert_eq!(d.diagram.to_string(), "1-2,3-4");
    }

    fn image_row(stable: &StableSpace, space: &DiagramSpace, row: &[(u32, i64)]) -> Vec<(u32, i64)> {
        row.iter()
            .map(|&(c, v)| {
                let im = forgetful(&space.basis[c as usize]);
                (stable.index[&im.diagram], v * im.sign)
            })
            .collect()
    }

    #[test]
    fn forgetful_respects_relations() {
        for (n, k) in [(1, 2), (1, 3), (1, 4), (2, 2), (2, 3)] {
            let space = relation_matrix(n, k).unwrap();
            let stable = StableSpace::new(k).unwrap();
            let mut e = stable.relation_echelon();
            let field = e.field();
            for row in &space.rows {
                let img = SparseRow::from_integers(image_row(&stable, &space, row), field);
                assert!(e.reduce(&img).unwrap().is_zero(), "n={n} k={k} row {row:?}");
            }
        }
    }

    #[test]
    fn degree_three_generators_have_proportional_images() {
        let space = relation_matrix(1, 3).unwrap();
        let stable = StableSpace::new(3).unwrap();
        let mut e = stable.relation_echelon();
        let field = e.field();
        let images: Vec<SparseRow> = space
            .basis
            .iter()
            .map(|d| {
                let im = forgetful(d);
                e.reduce(&SparseRow::from_integers([(stable.index[&im.diagram], im.sign)], field))
                    .unwrap()
            })
            .collect();
        assert!(images.iter().any(|r| !r.is_zero()));
        let support: HashSet<u32> = images.iter().flat_map(|r| r.entries().iter().map(|e| e.0)).collect();
        assert_eq!(support.len(), 1);
    }

    #[test]
    fn surjectivity_small() {
        for k in 0..=4 {
            let r = check_surjectivity(2, k).unwrap();
            assert!(r.surjective, "{r:?}");
        }
    }

    #[test]
    fn presentation_round_trip() {
        for n in 1..=2 {
            for k in 0..=(2 * n).min(4) {
                for d in matchings(k) {
                    let m = present_on_strands(&d, n).unwrap();
                    assert_eq!(m.strands(), 2 * n + 1);
                    assert_eq!(forgetful(&m).diagram, d);
                }
            }
        }
        assert!(present_on_strands(&matchings(3)[0], 1).is_err());
        assert_eq!(present_on_strands(&matchings(0)[0], 2).unwrap().word, Vec::<Chord>::new());
    }

    #[test]
    fn arrange_examples() {
        let done = md(1, "1-2");
        let r = arrange(&done).unwrap();
        assert!(r.trace.is_empty());
        assert_eq!(r.diagram, done);
        let r = arrange(&md(1, "2-3")).unwrap();
        assert_eq!(r.trace[0].from_strand, 2);
        assert_eq!(r.trace[0].to_strand, 1);
        assert_eq!(replay(&md(1, "2-3"), &r.trace[..1]).word, vec![chord(1, 3)]);
        assert_eq!(r.diagram.profile(), vec![1, 1, 0]);
        assert!(arrange(&md(2, "1-2")).is_err());
    }

    #[test]
    fn arrange_terminates_on_all_two_chord_diagrams() {
        let mut longest = 0;
        for w in all_words(letter_count(2), 2) {
            let d = MorseChordDiagram { n: 2, word: w };
            let r = arrange(&d).unwrap();
            assert!(r.diagram.is_arranged());
            assert_eq!(replay(&d, &r.trace), r.diagram);
            longest = longest.max(r.trace.len());
        }
        assert!(longest <= 8, "{longest}");
    }

    #[test]
    fn parsing() {
        assert_eq!(md(2, "1-3,2-4").to_string(), "1-3,2-4");
        assert!(MorseChordDiagram::parse("1-6", Some(2)).is_err());
        assert!(MorseChordDiagram::parse("1-x", None).is_err());
        assert_eq!(parse_stable("1-3,2-4").unwrap().labels(), &[0, 1, 0, 1]);
        assert!(parse_stable("1-2,2-3").is_err());
    }
}
