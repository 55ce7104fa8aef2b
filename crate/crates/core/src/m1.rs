//! Morse knots with one maximum, as double cosets
//! `<a, c> \ (F_2 x Z) / <b, c>`.
//!
//! Normal form: reduced words in `a`, `b` that are empty or start with a
//! power of `b` and end with a power of `a`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum M1Error {
    #[error("unknown letter {0:?}; expected a, b or c")]
    BadLetter(String),
    #[error("bad exponent in {0:?}")]
    BadExponent(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    B,
    C,
}

impl Letter {
    fn symbol(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
        }
    }
}

/// A word in `a`, `b`, `c` with runs of letters merged into powers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct P3Word {
    pub syllables: Vec<(Letter, i64)>,
}

impl P3Word {
    /// Expands to unit letters.
    pub fn letters(&self) -> impl Iterator<Item = (Letter, i8)> + '_ {
        self.syllables
            .iter()
            .flat_map(|&(l, e)| std::iter::repeat((l, e.signum() as i8)).take(e.unsigned_abs() as usize))
    }
}

impl FromStr for P3Word {
    type Err = M1Error;

    /// Accepts tokens like `a`, `b^2`, `c^-1`, separated by whitespace or
    /// juxtaposed (`ab^2a`). Also accepts `TRIVIAL` and the empty string.
    fn from_str(s: &str) -> Result<Self, M1Error> {
        let s = s.trim();
        let mut syllables = Vec::new();
        if s.eq_ignore_ascii_case("trivial") {
            return Ok(Self { syllables });
        }
        let mut chars = s.chars().peekable();
        while let Some(ch) = chars.next() {
            if ch.is_whitespace() {
                continue;
            }
            let letter = match ch {
                'a' => Letter::A,
                'b' => Letter::B,
                'c' => Letter::C,
                other => return Err(M1Error::BadLetter(other.to_string())),
            };
            let mut exp = 1i64;
            if chars.peek() == Some(&'^') {
                chars.next();
                let mut num = String::new();
                if chars.peek() == Some(&'-') {
                    num.push('-');
                    chars.next();
                }
                while let Some(d) = chars.peek().filter(|c| c.is_ascii_digit()) {
                    num.push(*d);
                    chars.next();
                }
                exp = num.parse().map_err(|_| M1Error::BadExponent(s.to_string()))?;
            }
            if exp != 0 {
                syllables.push((letter, exp));
            }
        }
        Ok(Self { syllables })
    }
}

/// Alternating syllables in `a`, `b`; empty or starting with `b` and ending
/// with `a`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ReducedWord {
    syllables: Vec<(Letter, i64)>,
}

impl ReducedWord {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn syllables(&self) -> &[(Letter, i64)] {
        &self.syllables
    }

    pub fn is_trivial(&self) -> bool {
        self.syllables.is_empty()
    }

    /// Checks the normal-form invariant.
    pub fn from_syllables(syllables: Vec<(Letter, i64)>) -> Option<Self> {
        let ok_letters = syllables.iter().all(|&(l, e)| l != Letter::C && e != 0);
        let alternating = syllables.windows(2).all(|w| w[0].0 != w[1].0);
        let ends = syllables.is_empty()
            || (syllables[0].0 == Letter::B && syllables[syllables.len() - 1].0 == Letter::A);
        (ok_letters && alternating && ends).then_some(Self { syllables })
    }

    pub fn to_word(&self) -> P3Word {
        P3Word {
            syllables: self.syllables.clone(),
        }
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.syllables.is_empty() {
            return f.write_str("TRIVIAL");
        }
        let parts: Vec<String> = self
            .syllables
            .iter()
            .map(|&(l, e)| {
                if e == 1 {
                    l.symbol().to_string()
                } else {
                    format!("{}^{}", l.symbol(), e)
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Double-coset normal form.
pub fn normalize(w: &P3Word) -> ReducedWord {
    let mut stack: Vec<(Letter, i64)> = Vec::new();
    for &(l, e) in &w.syllables {
        if l == Letter::C || e == 0 {
            continue;
        }
        match stack.last_mut() {
            Some(top) if top.0 == l => {
                top.1 += e;
                if top.1 == 0 {
                    stack.pop();
                }
            }
            _ => stack.push((l, e)),
        }
    }
    let mut start = 0;
    let mut end = stack.len();
    if end > 0 && stack[0].0 == Letter::A {
        start = 1;
    }
    if end > start && stack[end - 1].0 == Letter::B {
        end -= 1;
    }
    ReducedWord {
        syllables: stack[start..end].to_vec(),
    }
}

/// Mirror image: every exponent negated.
pub fn mirror(w: &ReducedWord) -> ReducedWord {
    ReducedWord {
        syllables: w.syllables.iter().map(|&(l, e)| (l, -e)).collect(),
    }
}

pub fn equal(u: &ReducedWord, v: &ReducedWord) -> bool {
    u == v
}

pub fn parse_and_normalize(s: &str) -> Result<ReducedWord, M1Error> {
    Ok(normalize(&s.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(s: &str) -> String {
        parse_and_normalize(s).unwrap().to_string()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(n("c^3"), "TRIVIAL");
        assert_eq!(n("a^2 b a^-1 c"), "b a^-1");
        assert_eq!(n("a b b a a^-1 b^-1"), "TRIVIAL");
        assert_eq!(n("a b^2 a^-1 b^-1"), "b^2 a^-1");
        assert_eq!(n("ab^2a^-1b^-1"), "b^2 a^-1");
        assert_eq!(n(""), "TRIVIAL");
        assert_eq!(n("b a b^-1 a"), "b a b^-1 a");
    }

    #[test]
    fn parse_errors() {
        assert_eq!("a d".parse::<P3Word>(), Err(M1Error::BadLetter("d".into())));
        assert!("a^".parse::<P3Word>().is_err());
        assert!("a^-".parse::<P3Word>().is_err());
    }

    #[test]
    fn mirror_and_equal() {
        let t = ReducedWord::trivial();
        assert_eq!(mirror(&t), t);
        let ba = parse_and_normalize("b a").unwrap();
        assert_eq!(mirror(&ba).to_string(), "b^-1 a^-1");
        let w = parse_and_normalize("b^2 a^-1 b a^3").unwrap();
        assert_eq!(mirror(&w).to_string(), "b^-2 a b^-1 a^-3");
        assert!(equal(&t, &t));
        assert!(!equal(&ba, &mirror(&ba)));
        assert!(equal(&parse_and_normalize("c b a c").unwrap(), &ba));
        assert!(ReducedWord::from_syllables(vec![(Letter::A, 1)]).is_none());
        assert!(ReducedWord::from_syllables(vec![(Letter::B, 1), (Letter::A, 2)]).is_some());
    }

    fn pool(max_len: usize) -> Vec<ReducedWord> {
        let mut out = vec![ReducedWord::trivial()];
        let exps = [-2i64, -1, 1, 2];
        let mut frontier: Vec<Vec<(Letter, i64)>> = exps.iter().map(|&e| vec![(Letter::B, e)]).collect();
        for len in 1..=max_len {
            let mut next = Vec::new();
            for s in &frontier {
                if let Some(w) = ReducedWord::from_syllables(s.clone()) {
                    out.push(w);
                }
                if len < max_len {
                    let l = if s.last().unwrap().0 == Letter::A { Letter::B } else { Letter::A };
                    for &e in &exps {
                        let mut t = s.clone();
                        t.push((l, e));
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn mirror_involution_and_chirality() {
        let words = pool(4);
        // b^e a^f and b^e a^f b^g a^h.
        assert_eq!(words.len(), 1 + 16 + 256);
        for w in &words {
            assert_eq!(mirror(&mirror(w)), *w);
            assert!(ReducedWord::from_syllables(mirror(w).syllables.clone()).is_some());
            assert_eq!(equal(w, &mirror(w)), w.is_trivial());
            assert_eq!(normalize(&w.to_word()), *w);
        }
    }

    fn arb_word() -> impl Strategy<Value = P3Word> {
        let letter = prop_oneof![Just(Letter::A), Just(Letter::B), Just(Letter::C)];
        prop::collection::vec((letter, -3i64..=3), 0..12).prop_map(|syllables| P3Word { syllables })
    }

    proptest! {
        #[test]
        fn normalize_idempotent(w in arb_word()) {
            let r = normalize(&w);
            prop_assert!(ReducedWord::from_syllables(r.syllables().to_vec()).is_some());
            prop_assert_eq!(normalize(&r.to_word()), r.clone());
            let text = r.to_string();
            prop_assert_eq!(parse_and_normalize(&text).unwrap(), r);
        }

        #[test]
        fn coset_invariance(w in arb_word(), left in -3i64..=3, right in -3i64..=3, c in -3i64..=3) {
            // Multiplying by a^i c^j on the left and b^k on the right does not
            // change the class.
            let mut s = vec![(Letter::A, left), (Letter::C, c)];
            s.extend(w.syllables.iter().copied());
            s.push((Letter::B, right));
            prop_assert_eq!(normalize(&P3Word { syllables: s }), normalize(&w));
        }
    }
}
