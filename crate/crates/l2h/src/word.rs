use std::fmt::Write as _;

/// One letter of a word: a generator index together with an exponent of +1 or -1.
///
/// Packed as `gen << 1 | (1 if inverse)`. The packed ordering (generator
/// ascending, positive before negative) is exactly the lexicographic order
/// used for deterministic tie-breaking everywhere in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub u32);

impl Letter {
    pub fn new(gen: usize, inverse: bool) -> Self {
        Letter(((gen as u32) << 1) | (inverse as u32))
    }

    pub fn gen(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

/// A raw, not necessarily reduced, sequence of letters.
pub type LetterSeq = Vec<Letter>;

/// Invert a raw letter sequence (reverse and flip every exponent).
pub fn invert_seq(seq: &[Letter]) -> LetterSeq {
    seq.iter().rev().map(|l| l.inverse()).collect()
}

/// Free reduction: cancel adjacent `x x^-1` pairs until none remain.
pub fn free_reduce(seq: &[Letter]) -> LetterSeq {
    let mut out: LetterSeq = Vec::with_capacity(seq.len());
    for &l in seq {
        if let Some(&last) = out.last() {
            if last == l.inverse() {
                out.pop();
                continue;
            }
        }
        out.push(l);
    }
    out
}

/// A group element in normal form.
///
/// `Letters` is used by free, rewriting-presented and table groups; direct
/// products store one normal-form word per factor. The `Ord` instance is
/// "level then lex": total word length first, then the packed letter order
/// (componentwise for tuples). All deterministic orderings in the crate
/// derive from this.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Word {
    Letters(LetterSeq),
    Tuple(Vec<Word>),
}

impl Word {
    pub fn identity_letters() -> Word {
        Word::Letters(Vec::new())
    }

    pub fn len(&self) -> usize {
        match self {
            Word::Letters(seq) => seq.len(),
            Word::Tuple(parts) => parts.iter().map(Word::len).sum(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.len() == 0
    }

    fn lex_key(&self) -> LexKey<'_> {
        LexKey(self)
    }

    /// Render using generator names; the identity prints as `e`.
    /// Runs of equal letters are compressed to powers, e.g. `a^2 b^-1`.
    pub fn display(&self, names: &[String]) -> String {
        let mut letters: Vec<Letter> = Vec::new();
        self.collect_letters(&mut letters);
        if letters.is_empty() {
            return "e".to_string();
        }
        let mut out = String::new();
        let mut i = 0;
        while i < letters.len() {
            let l = letters[i];
            let mut run = 1;
            while i + run < letters.len() && letters[i + run] == l {
                run += 1;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            let name = &names[l.gen()];
            let exp = if l.is_inverse() { -(run as i64) } else { run as i64 };
            if exp == 1 {
                out.push_str(name);
            } else {
                let _ = write!(out, "{}^{}", name, exp);
            }
            i += run;
        }
        out
    }

    /// Letters of the word with tuple factors concatenated in factor order.
    /// For direct products this relies on the factor-disjoint generator
    /// numbering, so the flattened sequence is unambiguous.
    pub fn collect_letters(&self, out: &mut Vec<Letter>) {
        match self {
            Word::Letters(seq) => out.extend_from_slice(seq),
            Word::Tuple(parts) => {
                for p in parts {
                    p.collect_letters(out);
                }
            }
        }
    }
}

struct LexKey<'a>(&'a Word);

impl PartialEq for LexKey<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl Eq for LexKey<'_> {}
impl PartialOrd for LexKey<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for LexKey<'_> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.0, other.0) {
            (Word::Letters(a), Word::Letters(b)) => a.cmp(b),
            (Word::Tuple(a), Word::Tuple(b)) => {
                for (x, y) in a.iter().zip(b.iter()) {
                    let c = x.cmp(y);
                    if c != std::cmp::Ordering::Equal {
                        return c;
                    }
                }
                a.len().cmp(&b.len())
            }
            (Word::Letters(_), Word::Tuple(_)) => std::cmp::Ordering::Less,
            (Word::Tuple(_), Word::Letters(_)) => std::cmp::Ordering::Greater,
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.lex_key().cmp(&other.lex_key()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[(usize, bool)]) -> Word {
        Word::Letters(letters.iter().map(|&(g, i)| Letter::new(g, i)).collect())
    }

    #[test]
    fn free_reduction_cancels_pairs() {
        let seq = vec![
            Letter::new(0, false),
            Letter::new(1, false),
            Letter::new(1, true),
            Letter::new(0, true),
        ];
        assert!(free_reduce(&seq).is_empty());
    }

    #[test]
    fn shortlex_order() {
        let e = Word::identity_letters();
        let a = w(&[(0, false)]);
        let a_inv = w(&[(0, true)]);
        let b = w(&[(1, false)]);
        let aa = w(&[(0, false), (0, false)]);
        let mut v = vec![aa.clone(), b.clone(), e.clone(), a_inv.clone(), a.clone()];
        v.sort();
        assert_eq!(v, vec![e, a, a_inv, b, aa]);
    }

    #[test]
    fn display_compresses_runs() {
        let names = vec!["a".to_string(), "b".to_string()];
        let word = w(&[(0, false), (0, false), (1, true)]);
        assert_eq!(word.display(&names), "a^2 b^-1");
        assert_eq!(Word::identity_letters().display(&names), "e");
    }
}
