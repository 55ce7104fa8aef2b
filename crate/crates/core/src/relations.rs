//! Relation elements of `Z P_5 / I^7`: expanded pure braid relations with
//! their two-sided saturations, the subgroup relations coming from the top
//! and bottom stabilizers of the short-circuit closure, and the reversal
//! relations.
//!
//! Every stream is deterministic: family, then relation index, then the
//! multiplier monomials in degree-lex order.

use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qalgebra::{
    expand_word, monomials_of_degree, monomials_up_to, parse_monomial, reverse_monomial, AlgebraElement,
    Int64, Integers, QMonomial, SignedBraidLetter, StrandPair,
};

/// Sparse integer combination with distinct monomials, sorted.
pub type IntTerms = Vec<(QMonomial, i64)>;

#[derive(Debug, Error)]
pub enum RelationError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad relation record on line {line}: {reason}")]
    Record { line: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    Commutation,
    ThreeStrand,
    FourStrand,
}

/// `lhs = rhs` in the pure braid group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BraidRelation {
    pub kind: RelationKind,
    pub lhs: Vec<SignedBraidLetter>,
    pub rhs: Vec<SignedBraidLetter>,
}

impl fmt::Display for BraidRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |w: &[SignedBraidLetter]| w.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "{} = {}", side(&self.lhs), side(&self.rhs))
    }
}

fn pair(i: u8, j: u8) -> StrandPair {
    StrandPair::new(i, j).expect("valid strand pair")
}

fn pos(i: u8, j: u8) -> SignedBraidLetter {
    SignedBraidLetter::pos(pair(i, j))
}

fn neg(i: u8, j: u8) -> SignedBraidLetter {
    SignedBraidLetter::neg(pair(i, j))
}

fn combinations(n: u8, k: usize) -> Vec<Vec<u8>> {
    fn rec(start: u8, n: u8, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for s in start..=n {
            cur.push(s);
            rec(s + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(1, n, k, &mut Vec::new(), &mut out);
    out
}

/// Standard presentation of `P_m`, grouped by kind.
///
/// For every four strands `a < b < c < d` the non-interleaved pair
/// `(a,b),(c,d)` and the nested pair `(a,d),(b,c)` commute, and
/// `p_{a,c}` commutes with `p_{c,d}^{-1} p_{b,d} p_{c,d}`. For every triple
/// `a < b < c` with `A = p_{a,b}`, `B = p_{a,c}`, `C = p_{b,c}` the cyclic
/// products agree: `ABC = BCA` and `BCA = CAB`.
pub fn braid_relation_set(strands: u8) -> Vec<BraidRelation> {
    let quads = combinations(strands, 4);
    let triples = combinations(strands, 3);
    let mut out = Vec::new();
    for q in &quads {
        let (a, b, c, d) = (q[0], q[1], q[2], q[3]);
        for (x, y) in [((a, b), (c, d)), ((a, d), (b, c))] {
            out.push(BraidRelation {
                kind: RelationKind::Commutation,
                lhs: vec![pos(x.0, x.1), pos(y.0, y.1)],
                rhs: vec![pos(y.0, y.1), pos(x.0, x.1)],
            });
        }
    }
    for t in &triples {
        let (a, b, c) = (t[0], t[1], t[2]);
        let (pa, pb, pc) = (pos(a, b), pos(a, c), pos(b, c));
        out.push(BraidRelation {
            kind: RelationKind::ThreeStrand,
            lhs: vec![pa, pb, pc],
            rhs: vec![pb, pc, pa],
        });
        out.push(BraidRelation {
            kind: RelationKind::ThreeStrand,
            lhs: vec![pb, pc, pa],
            rhs: vec![pc, pa, pb],
        });
    }
    for q in &quads {
        let (i, j, k, l) = (q[0], q[1], q[2], q[3]);
        let conj = [neg(k, l), pos(j, l), pos(k, l)];
        let mut lhs = vec![pos(i, k)];
        lhs.extend(conj);
        let mut rhs = conj.to_vec();
        rhs.push(pos(i, k));
        out.push(BraidRelation {
            kind: RelationKind::FourStrand,
            lhs,
            rhs,
        });
    }
    out
}

/// `expand(lhs) - expand(rhs)` over the integers.
pub fn expand_relation(r: &BraidRelation, cutoff: u8) -> AlgebraElement<Integers> {
    expand_word(Integers, &r.lhs, cutoff)
        .sub(&expand_word(Integers, &r.rhs, cutoff))
        .expect("same cutoff")
}

pub(crate) fn expand_relation_terms(r: &BraidRelation, cutoff: u8) -> IntTerms {
    let e = expand_word(Int64, &r.lhs, cutoff)
        .sub(&expand_word(Int64, &r.rhs, cutoff))
        .expect("same cutoff");
    element_terms(&e)
}

pub(crate) fn element_terms(e: &AlgebraElement<Int64>) -> IntTerms {
    e.terms().map(|(x, c)| (*x, *c)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Commutation,
    ThreeStrand,
    FourStrand,
    TopologicalLeft,
    TopologicalRight,
    Reversal,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Commutation,
        Family::ThreeStrand,
        Family::FourStrand,
        Family::TopologicalLeft,
        Family::TopologicalRight,
        Family::Reversal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Commutation => "commutation",
            Family::ThreeStrand => "three_strand",
            Family::FourStrand => "four_strand",
            Family::TopologicalLeft => "topological_left",
            Family::TopologicalRight => "topological_right",
            Family::Reversal => "reversal",
        }
    }

    fn of_kind(kind: RelationKind) -> Family {
        match kind {
            RelationKind::Commutation => Family::Commutation,
            RelationKind::ThreeStrand => Family::ThreeStrand,
            RelationKind::FourStrand => Family::FourStrand,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One relation `left * body * right = 0`, already multiplied out and
/// truncated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationInstance {
    pub family: Family,
    /// Index of the generating relation within its family.
    pub relation: u32,
    pub left: QMonomial,
    pub right: QMonomial,
    pub terms: IntTerms,
}

impl RelationInstance {
    pub fn element(&self, cutoff: u8) -> AlgebraElement<Integers> {
        AlgebraElement::from_terms(Integers, cutoff, self.terms.iter().map(|(x, c)| (*x, (*c).into())))
    }

    pub fn min_degree(&self) -> usize {
        self.terms.iter().map(|(x, _)| x.len()).min().unwrap_or(0)
    }
}

/// `left * body * right`, truncated; terms stay distinct because
/// concatenation with fixed ends is injective.
pub fn sandwich_terms(body: &[(QMonomial, i64)], left: QMonomial, right: QMonomial, cutoff: usize) -> IntTerms {
    let extra = left.len() + right.len();
    body.iter()
        .filter(|(x, _)| x.len() + extra <= cutoff)
        .map(|(x, c)| (left.concat(*x).and_then(|w| w.concat(right)).expect("fits"), *c))
        .collect()
}

/// Multiplier pairs `(u, v)` with `deg u + deg v == total`, degree-lex in
/// `u` then `v`.
pub fn multiplier_pairs(total: usize) -> impl Iterator<Item = (QMonomial, QMonomial)> {
    (0..=total).flat_map(move |du| {
        monomials_of_degree(10, du).flat_map(move |u| monomials_of_degree(10, total - du).map(move |v| (u, v)))
    })
}

/// Two-sided saturation of a relation element: `u * r * v` for every pair
/// of monomials with `deg u + deg v <= cutoff - mindeg(r)`, in degree-lex
/// order of `u` then `v`. Instances that truncate to zero are skipped.
pub fn saturate(r: &AlgebraElement<Integers>, cutoff: u8) -> impl Iterator<Item = RelationInstance> + '_ {
    let d0 = r.min_degree().unwrap_or(0);
    let slack = (cutoff as usize).saturating_sub(d0);
    let body: IntTerms = r
        .terms()
        .map(|(x, c)| (*x, i64::try_from(c).expect("small coefficient")))
        .collect();
    let empty = r.is_zero() || d0 > cutoff as usize;
    let limit = if empty { 0 } else { slack + 1 };
    (0..limit)
        .flat_map(move |du| monomials_of_degree(10, du))
        .flat_map(move |u| (0..=slack - u.len()).flat_map(move |dv| monomials_of_degree(10, dv).map(move |v| (u, v))))
        .filter_map(move |(u, v)| {
            let terms = sandwich_terms(&body, u, v, cutoff as usize);
            (!terms.is_empty()).then(|| RelationInstance {
                family: Family::Commutation,
                relation: 0,
                left: u,
                right: v,
                terms,
            })
        })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Acts on the top of the braid: relations `(h - 1) * x`.
    Left,
    /// Acts on the bottom: relations `x * (h - 1)`.
    Right,
}

/// A generator `h` of a stabilizer subgroup, with body `h - 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TopologicalRule {
    pub side: Side,
    pub generator: Vec<SignedBraidLetter>,
    pub body: AlgebraElement<Integers>,
}

/// Generators of the top stabilizer subgroup of `P_5`.
pub fn top_generators() -> Vec<Vec<SignedBraidLetter>> {
    vec![
        vec![pos(2, 3)],
        vec![pos(4, 5)],
        vec![pos(1, 2), pos(1, 3)],
        vec![pos(1, 4), pos(1, 5)],
        vec![pos(2, 4), pos(2, 5)],
        vec![pos(3, 4), pos(3, 5)],
        vec![pos(2, 4), pos(3, 4)],
        vec![pos(2, 5), pos(3, 5)],
    ]
}

/// Generators of the bottom stabilizer subgroup of `P_5`.
pub fn bottom_generators() -> Vec<Vec<SignedBraidLetter>> {
    vec![
        vec![pos(1, 2)],
        vec![pos(3, 4)],
        vec![pos(1, 3), pos(2, 3)],
        vec![pos(1, 4), pos(2, 4)],
        vec![pos(1, 5), pos(2, 5)],
        vec![pos(1, 3), pos(1, 4)],
        vec![pos(2, 3), pos(2, 4)],
        vec![pos(3, 5), pos(4, 5)],
    ]
}

/// Eight left rules followed by eight right rules, with bodies `h - 1`
/// expanded at the given cutoff.
pub fn topological_rules_at(cutoff: u8) -> Vec<TopologicalRule> {
    let make = |side, g: Vec<SignedBraidLetter>| {
        let body = expand_word(Integers, &g, cutoff)
            .sub(&AlgebraElement::one(Integers, cutoff))
            .expect("same cutoff");
        TopologicalRule {
            side,
            generator: g,
            body,
        }
    };
    top_generators()
        .into_iter()
        .map(|g| make(Side::Left, g))
        .chain(bottom_generators().into_iter().map(|g| make(Side::Right, g)))
        .collect()
}

/// The sixteen rules with untruncated bodies (degree at most 2).
pub fn topological_rules() -> Vec<TopologicalRule> {
    topological_rules_at(2)
}

fn rule_terms(rule: &TopologicalRule) -> IntTerms {
    rule.body
        .terms()
        .map(|(x, c)| (*x, i64::try_from(c).expect("small coefficient")))
        .collect()
}

/// Instances of the braid-relation families whose lowest-degree part has
/// exactly `degree`, i.e. `deg u + deg v = degree - 2`.
pub fn braid_instances_at(cutoff: u8, degree: usize) -> impl Iterator<Item = RelationInstance> {
    let rels: Vec<(Family, IntTerms)> = braid_relation_set(5)
        .iter()
        .map(|r| (Family::of_kind(r.kind), expand_relation_terms(r, cutoff)))
        .collect();
    let mut index_in_family = Vec::with_capacity(rels.len());
    let mut counters = [0u32; 3];
    for (fam, _) in &rels {
        let k = *fam as usize;
        index_in_family.push(counters[k]);
        counters[k] += 1;
    }
    let valid = degree >= 2 && degree <= cutoff as usize;
    let total = degree.saturating_sub(2);
    let count = if valid { rels.len() } else { 0 };
    (0..count).flat_map(move |ri| {
        let (fam, body) = rels[ri].clone();
        let idx = index_in_family[ri];
        multiplier_pairs(total).map(move |(u, v)| RelationInstance {
            family: fam,
            relation: idx,
            left: u,
            right: v,
            terms: sandwich_terms(&body, u, v, cutoff as usize),
        })
    })
}

/// Subgroup instances whose lowest-degree part has exactly `degree`:
/// `body * x` for left rules and `x * body` for right rules with
/// `deg x = degree - 1`.
pub fn topological_instances_at(cutoff: u8, degree: usize) -> impl Iterator<Item = RelationInstance> {
    let rules: Vec<(Side, IntTerms)> = topological_rules_at(cutoff)
        .iter()
        .map(|r| (r.side, rule_terms(r)))
        .collect();
    let valid = degree >= 1 && degree <= cutoff as usize;
    let count = if valid { rules.len() } else { 0 };
    (0..count).flat_map(move |ri| {
        let (side, body) = rules[ri].clone();
        let idx = (ri % 8) as u32;
        monomials_of_degree(10, degree - 1).filter_map(move |x| {
            let (left, right, family) = match side {
                Side::Left => (QMonomial::ONE, x, Family::TopologicalLeft),
                Side::Right => (x, QMonomial::ONE, Family::TopologicalRight),
            };
            let terms = sandwich_terms(&body, left, right, cutoff as usize);
            (!terms.is_empty()).then_some(RelationInstance {
                family,
                relation: idx,
                left,
                right,
                terms,
            })
        })
    })
}

/// `x - reverse(x)` for the degree-`degree` monomials with `x < reverse(x)`.
pub fn reversal_instances_at(degree: usize) -> impl Iterator<Item = RelationInstance> {
    monomials_of_degree(10, degree).filter_map(|x| {
        let r = reverse_monomial(x, 5);
        (x < r).then(|| RelationInstance {
            family: Family::Reversal,
            relation: 0,
            left: x,
            right: QMonomial::ONE,
            terms: vec![(x, 1), (r, -1)],
        })
    })
}

/// All commutation, three-strand and four-strand instances up to the cutoff.
pub fn braid_instances(cutoff: u8) -> impl Iterator<Item = RelationInstance> {
    // Family-major order: regroup the per-degree streams by relation.
    let rels = braid_relation_set(5);
    let mut index_in_family = Vec::new();
    let mut counters = [0u32; 3];
    for r in &rels {
        let k = Family::of_kind(r.kind) as usize;
        index_in_family.push(counters[k]);
        counters[k] += 1;
    }
    rels.into_iter().enumerate().flat_map(move |(ri, r)| {
        let fam = Family::of_kind(r.kind);
        let idx = index_in_family[ri];
        let element = expand_relation(&r, cutoff);
        saturate(&element, cutoff)
            .map(move |mut inst| {
                inst.family = fam;
                inst.relation = idx;
                inst
            })
            .collect::<Vec<_>>()
    })
}

/// All subgroup instances up to the cutoff: left rules then right rules.
pub fn topological_instances(cutoff: u8) -> impl Iterator<Item = RelationInstance> {
    let rules = topological_rules_at(cutoff);
    (0..rules.len()).flat_map(move |ri| {
        let rule = rules[ri].clone();
        let body = rule_terms(&rule);
        let d0 = rule.body.min_degree().unwrap_or(0);
        let max_x = (cutoff as usize).saturating_sub(d0);
        monomials_up_to(10, max_x).filter_map(move |x| {
            let (left, right, family) = match rule.side {
                Side::Left => (QMonomial::ONE, x, Family::TopologicalLeft),
                Side::Right => (x, QMonomial::ONE, Family::TopologicalRight),
            };
            let terms = sandwich_terms(&body, left, right, cutoff as usize);
            (!terms.is_empty()).then_some(RelationInstance {
                family,
                relation: (ri % 8) as u32,
                left,
                right,
                terms,
            })
        })
    })
}

/// Reversal relations `x - reverse(x)` for all monomials up to the cutoff,
/// each unordered pair once.
pub fn reversal_instances(cutoff: u8) -> impl Iterator<Item = RelationInstance> {
    (0..=cutoff as usize).flat_map(reversal_instances_at)
}

/// Non-t5 letter count: letters `q_{i,j}` with `j < 5`.
pub(crate) fn lower_letter_count(x: QMonomial) -> usize {
    x.codes().filter(|&c| c < 6).count()
}

/// One line of the relation dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationRecord {
    pub family: Family,
    pub relation: u32,
    pub left: String,
    pub right: String,
    pub element: String,
}

impl RelationRecord {
    pub fn from_instance(inst: &RelationInstance, cutoff: u8) -> Self {
        Self {
            family: inst.family,
            relation: inst.relation,
            left: inst.left.to_string(),
            right: inst.right.to_string(),
            element: inst.element(cutoff).to_string(),
        }
    }

    pub fn to_instance(&self, cutoff: u8) -> Result<RelationInstance, String> {
        let left = parse_monomial(&self.left).ok_or("bad left multiplier")?;
        let right = parse_monomial(&self.right).ok_or("bad right multiplier")?;
        let e = AlgebraElement::parse(&self.element, cutoff).map_err(|e| e.to_string())?;
        let terms = e
            .terms()
            .map(|(x, c)| Ok((*x, i64::try_from(c).map_err(|_| "coefficient too large")?)))
            .collect::<Result<IntTerms, &str>>()?;
        Ok(RelationInstance {
            family: self.family,
            relation: self.relation,
            left,
            right,
            terms,
        })
    }
}

pub fn write_ndjson<W: Write>(
    out: &mut W,
    instances: impl IntoIterator<Item = RelationInstance>,
    cutoff: u8,
) -> Result<u64, RelationError> {
    let mut n = 0;
    for inst in instances {
        let rec = RelationRecord::from_instance(&inst, cutoff);
        serde_json::to_writer(&mut *out, &rec).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
        n += 1;
    }
    Ok(n)
}

pub fn read_ndjson<R: BufRead>(input: R, cutoff: u8) -> Result<Vec<RelationInstance>, RelationError> {
    let mut out = Vec::new();
    for (k, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: RelationRecord = serde_json::from_str(&line).map_err(|e| RelationError::Record {
            line: k + 1,
            reason: e.to_string(),
        })?;
        out.push(rec.to_instance(cutoff).map_err(|reason| RelationError::Record { line: k + 1, reason })?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qalgebra::{qword, Ring};
    use num_bigint::BigInt;

    fn el(terms: &[(QMonomial, i64)], cutoff: u8) -> AlgebraElement<Integers> {
        AlgebraElement::from_terms(Integers, cutoff, terms.iter().map(|(x, c)| (*x, BigInt::from(*c))))
    }

    fn counts(strands: u8) -> (usize, usize, usize) {
        let rels = braid_relation_set(strands);
        let c = |k| rels.iter().filter(|r| r.kind == k).count();
        (c(RelationKind::Commutation), c(RelationKind::ThreeStrand), c(RelationKind::FourStrand))
    }

    #[test]
    fn family_sizes() {
        assert_eq!(counts(5), (10, 20, 5));
        assert_eq!(counts(3).0, 0);
        assert_eq!(counts(4), (2, 8, 1));
    }

    #[test]
    fn commutation_expansion() {
        let r = &braid_relation_set(5)[0];
        assert_eq!(r.to_string(), "p[1,2] p[3,4] = p[3,4] p[1,2]");
        let q = |a: &[(u8, u8)]| qword(a);
        assert_eq!(
            expand_relation(r, 6),
            el(&[(q(&[(1, 2), (3, 4)]), 1), (q(&[(3, 4), (1, 2)]), -1)], 6)
        );
    }

    #[test]
    fn three_strand_expansion() {
        let r = braid_relation_set(5)
            .into_iter()
            .find(|r| r.kind == RelationKind::ThreeStrand)
            .unwrap();
        assert_eq!(r.to_string(), "p[1,2] p[1,3] p[2,3] = p[1,3] p[2,3] p[1,2]");
        let q = |a: &[(u8, u8)]| qword(a);
        let expected = el(
            &[
                (q(&[(1, 2), (1, 3), (2, 3)]), 1),
                (q(&[(1, 2), (1, 3)]), 1),
                (q(&[(1, 2), (2, 3)]), 1),
                (q(&[(1, 3), (2, 3), (1, 2)]), -1),
                (q(&[(1, 3), (1, 2)]), -1),
                (q(&[(2, 3), (1, 2)]), -1),
            ],
            6,
        );
        assert_eq!(expand_relation(&r, 6), expected);
    }

    #[test]
    fn four_strand_expansion_matches_displayed_element() {
        let r = braid_relation_set(5)
            .into_iter()
            .find(|r| r.kind == RelationKind::FourStrand)
            .unwrap();
        assert_eq!(
            r.to_string(),
            "p[1,3] p[3,4]^-1 p[2,4] p[3,4] = p[3,4]^-1 p[2,4] p[3,4] p[1,3]"
        );
        let (a, b, c) = ((1, 3), (2, 4), (3, 4));
        let q = |w: &[(u8, u8)]| qword(w);
        let expected = el(
            &[
                (q(&[a, b]), 1),
                (q(&[b, a]), -1),
                (q(&[a, b, c]), 1),
                (q(&[a, c, b]), -1),
                (q(&[b, c, a]), -1),
                (q(&[c, b, a]), 1),
                (q(&[a, c, b, c]), -1),
                (q(&[a, c, c, b]), 1),
                (q(&[c, b, c, a]), 1),
                (q(&[c, c, b, a]), -1),
                (q(&[a, c, c, b, c]), 1),
                (q(&[a, c, c, c, b]), -1),
                (q(&[c, c, b, c, a]), -1),
                (q(&[c, c, c, b, a]), 1),
                (q(&[a, c, c, c, b, c]), -1),
                (q(&[a, c, c, c, c, b]), 1),
                (q(&[c, c, c, b, c, a]), 1),
                (q(&[c, c, c, c, b, a]), -1),
            ],
            6,
        );
        let got = expand_relation(&r, 6);
        assert_eq!(got.len(), 18);
        assert_eq!(got, expected);
    }

    #[test]
    fn low_degree_parts() {
        for r in braid_relation_set(5) {
            let e = expand_relation(&r, 6);
            assert!(e.degree_part(0).is_zero() && e.degree_part(1).is_zero(), "{r}");
            let d2 = e.degree_part(2);
            // The quadratic part is a commutator sum: coefficients sum to zero
            // and each word appears with its transpose negated.
            for (x, c) in d2.terms() {
                let swapped = x.reversed();
                assert_eq!(d2.coefficient(swapped), Integers.neg(c), "{r}");
            }
            match r.kind {
                RelationKind::Commutation | RelationKind::FourStrand => assert_eq!(d2.len(), 2, "{r}"),
                RelationKind::ThreeStrand => assert_eq!(d2.len(), 4, "{r}"),
            }
        }
        let four = braid_relation_set(5)
            .into_iter()
            .find(|r| r.kind == RelationKind::FourStrand)
            .unwrap();
        assert_eq!(
            expand_relation(&four, 6).degree_part(2),
            el(&[(qword(&[(1, 3), (2, 4)]), 1), (qword(&[(2, 4), (1, 3)]), -1)], 6)
        );
    }

    #[test]
    fn saturation_counts() {
        let r = expand_relation(&braid_relation_set(5)[0], 2);
        let insts: Vec<_> = saturate(&r, 2).collect();
        assert_eq!(insts.len(), 1);
        assert!(insts[0].left.is_one() && insts[0].right.is_one());
        let r3 = expand_relation(&braid_relation_set(5)[0], 3);
        assert_eq!(saturate(&r3, 3).count(), 21);
        // Closed form sum_{s=0}^{4} (s+1) 10^s for a degree-2 relation.
        let closed: u64 = (0..=4u32).map(|s| (s as u64 + 1) * 10u64.pow(s)).sum();
        assert_eq!(closed, 54_321);
        let pairs: u64 = (0..=4).map(|s| multiplier_pairs(s).count() as u64).sum();
        assert_eq!(pairs, closed);
    }

    #[test]
    fn topological_tables() {
        let rules = topological_rules();
        assert_eq!(rules.len(), 16);
        assert_eq!(rules.iter().filter(|r| r.side == Side::Left).count(), 8);
        assert_eq!(rules[0].body.to_string(), "1*q[2,3]");
        assert_eq!(rules[2].body.to_string(), "1*q[1,2] + 1*q[1,3] + 1*q[1,2]q[1,3]");
        assert_eq!(rules[8].body.to_string(), "1*q[1,2]");
        assert_eq!(rules[9].body.to_string(), "1*q[3,4]");
        assert_eq!(rules[15].body.to_string(), "1*q[3,5] + 1*q[4,5] + 1*q[3,5]q[4,5]");
        for r in &rules {
            assert!(r.body.degree_part(0).is_zero());
        }
    }

    #[test]
    fn topological_instance_counts_and_truncation() {
        let left_q23: Vec<_> = topological_instances(1)
            .filter(|i| i.family == Family::TopologicalLeft && i.relation == 0)
            .collect();
        assert_eq!(left_q23.len(), 1);
        assert_eq!(left_q23[0].terms, vec![(qword(&[(2, 3)]), 1)]);
        let n = topological_instances(6)
            .filter(|i| i.family == Family::TopologicalLeft && i.relation == 0)
            .count();
        assert_eq!(n, 111_111);
        // Right rule q13 + q23 + q13 q23 against a degree-5 monomial.
        let x = qword(&[(1, 5), (1, 5), (2, 5), (3, 5), (4, 5)]);
        let inst = topological_instances_at(6, 6)
            .find(|i| i.family == Family::TopologicalRight && i.relation == 2 && i.left == x)
            .unwrap();
        assert_eq!(
            inst.terms,
            vec![
                (x.concat(qword(&[(1, 3)])).unwrap(), 1),
                (x.concat(qword(&[(2, 3)])).unwrap(), 1)
            ]
        );
    }

    #[test]
    fn reversal_relations() {
        let insts: Vec<_> = reversal_instances(2).collect();
        assert!(insts.iter().all(|i| i.left != qword(&[(1, 5)])));
        assert!(insts
            .iter()
            .any(|i| i.terms == vec![(qword(&[(1, 2)]), 1), (qword(&[(4, 5)]), -1)]));
        assert_eq!(insts.len(), 49);
    }

    #[test]
    fn degree_split_streams_match_full_streams() {
        let cutoff = 4;
        let mut split: Vec<_> = (0..=4).flat_map(|d| braid_instances_at(cutoff, d)).collect();
        let mut full: Vec<_> = braid_instances(cutoff).collect();
        split.sort_by_key(|i| (i.family, i.relation, i.left, i.right));
        full.sort_by_key(|i| (i.family, i.relation, i.left, i.right));
        assert_eq!(split, full);
        let mut split: Vec<_> = (0..=4).flat_map(|d| topological_instances_at(cutoff, d)).collect();
        let mut full: Vec<_> = topological_instances(cutoff).collect();
        split.sort_by_key(|i| (i.family, i.relation, i.left, i.right));
        full.sort_by_key(|i| (i.family, i.relation, i.left, i.right));
        assert_eq!(split, full);
    }

    #[test]
    fn ndjson_roundtrip() {
        let insts: Vec<_> = braid_instances(3).take(40).chain(topological_instances(2).take(20)).collect();
        let mut buf = Vec::new();
        write_ndjson(&mut buf, insts.clone(), 3).unwrap();
        let back = read_ndjson(&buf[..], 3).unwrap();
        assert_eq!(back, insts);
        assert!(read_ndjson(&b"{\"family\":\"x\"}\n"[..], 3).is_err());
    }
}
