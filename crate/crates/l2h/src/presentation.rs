//! Finite group presentations: the `.grp` file grammar, parsing and
//! canonical printing.
//!
//! Grammar (whitespace-insensitive, `#` starts a line comment):
//!
//! ```text
//! group <string> { generators <id>(, <id>)* ; relators (<wordexpr>(, <wordexpr>)*)? ; }
//! wordexpr := term+
//! term     := <id> | <id>^<int> | [ <wordexpr> , <wordexpr> ] | ( <wordexpr> )
//! ```
//!
//! Commutator brackets expand to `x y x^-1 y^-1` and powers are expanded
//! at parse time; relators are stored as raw (unreduced) letter sequences.

use crate::error::{Error, Result};
use crate::word::{invert_seq, Letter, LetterSeq};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSymbol {
    pub name: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    pub name: String,
    pub generators: Vec<GeneratorSymbol>,
    /// Relators as unreduced letter sequences over the free group on the
    /// generators.
    pub relators: Vec<LetterSeq>,
}

impl Presentation {
    pub fn new(name: &str, generators: &[&str], relators: Vec<LetterSeq>) -> Result<Self> {
        let mut gens = Vec::new();
        for (index, &g) in generators.iter().enumerate() {
            if !is_identifier(g) {
                return Err(Error::Invalid(format!("bad generator name `{g}`")));
            }
            if gens.iter().any(|s: &GeneratorSymbol| s.name == g) {
                return Err(Error::DuplicateGenerator(g.to_string()));
            }
            gens.push(GeneratorSymbol { name: g.to_string(), index });
        }
        let p = Presentation { name: name.to_string(), generators: gens, relators };
        for r in &p.relators {
            for l in r {
                if l.gen() >= p.generators.len() {
                    return Err(Error::UnknownGenerator(format!("#{}", l.gen())));
                }
            }
        }
        Ok(p)
    }

    pub fn generator_names(&self) -> Vec<String> {
        self.generators.iter().map(|g| g.name.clone()).collect()
    }

    pub fn max_relator_len(&self) -> usize {
        self.relators.iter().map(|r| r.len()).max().unwrap_or(0)
    }

    /// Canonical text form. Relators print expanded (no commutator sugar)
    /// with runs of a letter compressed to powers, so parsing the output
    /// reproduces the presentation verbatim.
    pub fn pretty(&self) -> String {
        let names = self.generator_names();
        let mut out = String::new();
        out.push_str(&format!("group \"{}\" {{\n", self.name));
        out.push_str("  generators ");
        out.push_str(&names.join(", "));
        out.push_str(";\n  relators");
        let rendered: Vec<String> = self.relators.iter().map(|r| render_seq(r, &names)).collect();
        if rendered.is_empty() {
            out.push_str(" ;\n");
        } else {
            out.push(' ');
            out.push_str(&rendered.join(", "));
            out.push_str(";\n");
        }
        out.push_str("}\n");
        out
    }
}

fn render_seq(seq: &[Letter], names: &[String]) -> String {
    if seq.is_empty() {
        // An empty relator cannot be written in the grammar; it also never
        // arises from parsing (wordexpr requires at least one term).
        return String::from("()");
    }
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < seq.len() {
        let l = seq[i];
        let mut run = 1;
        while i + run < seq.len() && seq[i + run] == l {
            run += 1;
        }
        let exp = if l.is_inverse() { -(run as i64) } else { run as i64 };
        if exp == 1 {
            parts.push(names[l.gen()].clone());
        } else {
            parts.push(format!("{}^{}", names[l.gen()], exp));
        }
        i += run;
    }
    parts.join(" ")
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Caret,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<Spanned>> {
        let mut out = Vec::new();
        loop {
            while let Some(c) = self.peek() {
                if c == b'#' {
                    while let Some(c) = self.peek() {
                        if c == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                } else if c.is_ascii_whitespace() {
                    self.bump();
                } else {
                    break;
                }
            }
            let (line, col) = (self.line, self.col);
            let Some(c) = self.peek() else { break };
            let tok = match c {
                b'{' => {
                    self.bump();
                    Tok::LBrace
                }
                b'}' => {
                    self.bump();
                    Tok::RBrace
                }
                b'(' => {
                    self.bump();
                    Tok::LParen
                }
                b')' => {
                    self.bump();
                    Tok::RParen
                }
                b'[' => {
                    self.bump();
                    Tok::LBracket
                }
                b']' => {
                    self.bump();
                    Tok::RBracket
                }
                b',' => {
                    self.bump();
                    Tok::Comma
                }
                b';' => {
                    self.bump();
                    Tok::Semi
                }
                b'^' => {
                    self.bump();
                    Tok::Caret
                }
                b'"' => {
                    self.bump();
                    let mut s = String::new();
                    loop {
                        match self.bump() {
                            Some(b'"') => break,
                            Some(c) => s.push(c as char),
                            None => return Err(self.err("unterminated string")),
                        }
                    }
                    Tok::Str(s)
                }
                b'-' | b'0'..=b'9' => {
                    let mut s = String::new();
                    if c == b'-' {
                        s.push('-');
                        self.bump();
                    }
                    while let Some(d) = self.peek() {
                        if d.is_ascii_digit() {
                            s.push(d as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let v: i64 = s
                        .parse()
                        .map_err(|_| self.err(format!("bad integer `{s}`")))?;
                    Tok::Int(v)
                }
                c if c.is_ascii_alphabetic() => {
                    let mut s = String::new();
                    while let Some(d) = self.peek() {
                        if d.is_ascii_alphanumeric() || d == b'_' {
                            s.push(d as char);
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(s)
                }
                other => return Err(self.err(format!("unexpected character `{}`", other as char))),
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn err_at(&self, msg: impl Into<String>) -> Error {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .or_else(|| self.toks.last().map(|s| (s.line, s.col + 1)))
            .unwrap_or((1, 1));
        Error::Syntax { line, col, msg: msg.into() }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<()> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_at(format!("expected {what}"))),
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.err_at(format!("expected keyword `{kw}`"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(self.err_at(format!("expected {what}")))
            }
        }
    }

    fn parse_file(&mut self) -> Result<Presentation> {
        self.expect_keyword("group")?;
        let name = match self.next() {
            Some(Tok::Str(s)) => s,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.err_at("expected group name string"));
            }
        };
        self.expect(&Tok::LBrace, "`{`")?;
        self.expect_keyword("generators")?;
        let mut generators: Vec<GeneratorSymbol> = Vec::new();
        loop {
            let g = self.ident("generator name")?;
            if generators.iter().any(|s| s.name == g) {
                return Err(Error::DuplicateGenerator(g));
            }
            let index = generators.len();
            generators.push(GeneratorSymbol { name: g, index });
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                }
                Some(Tok::Semi) => {
                    self.pos += 1;
                    break;
                }
                _ => return Err(self.err_at("expected `,` or `;` after generator")),
            }
        }
        self.expect_keyword("relators")?;
        let mut relators: Vec<LetterSeq> = Vec::new();
        if matches!(self.peek(), Some(Tok::Semi)) {
            self.pos += 1;
        } else {
            loop {
                let w = self.parse_wordexpr(&generators)?;
                relators.push(w);
                match self.peek() {
                    Some(Tok::Comma) => {
                        self.pos += 1;
                    }
                    Some(Tok::Semi) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err_at("expected `,` or `;` after relator")),
                }
            }
        }
        self.expect(&Tok::RBrace, "`}`")?;
        if self.pos != self.toks.len() {
            return Err(self.err_at("trailing input after presentation"));
        }
        Ok(Presentation { name, generators, relators })
    }

    fn lookup(&self, generators: &[GeneratorSymbol], name: &str) -> Result<usize> {
        generators
            .iter()
            .find(|g| g.name == name)
            .map(|g| g.index)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    fn parse_wordexpr(&mut self, generators: &[GeneratorSymbol]) -> Result<LetterSeq> {
        let mut seq: LetterSeq = Vec::new();
        let mut any = false;
        loop {
            match self.peek() {
                Some(Tok::Ident(_)) => {
                    let name = self.ident("generator")?;
                    let gen = self.lookup(generators, &name)?;
                    let exp = if matches!(self.peek(), Some(Tok::Caret)) {
                        self.pos += 1;
                        match self.next() {
                            Some(Tok::Int(v)) => v,
                            _ => {
                                self.pos = self.pos.saturating_sub(1);
                                return Err(self.err_at("expected integer exponent after `^`"));
                            }
                        }
                    } else {
                        1
                    };
                    let letter = Letter::new(gen, exp < 0);
                    for _ in 0..exp.unsigned_abs() {
                        seq.push(letter);
                    }
                }
                Some(Tok::LBracket) => {
                    self.pos += 1;
                    let u = self.parse_wordexpr(generators)?;
                    self.expect(&Tok::Comma, "`,` in commutator")?;
                    let v = self.parse_wordexpr(generators)?;
                    self.expect(&Tok::RBracket, "`]`")?;
                    seq.extend_from_slice(&u);
                    seq.extend_from_slice(&v);
                    seq.extend(invert_seq(&u));
                    seq.extend(invert_seq(&v));
                }
                Some(Tok::LParen) => {
                    self.pos += 1;
                    let u = self.parse_wordexpr(generators)?;
                    self.expect(&Tok::RParen, "`)`")?;
                    seq.extend_from_slice(&u);
                }
                _ => break,
            }
            any = true;
        }
        if !any {
            return Err(self.err_at("expected a word"));
        }
        Ok(seq)
    }
}

/// Parse a presentation file.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let toks = Lexer::new(text).tokens()?;
    Parser { toks, pos: 0 }.parse_file()
}

/// Parse a single word expression (the `<wordexpr>` production) against a
/// list of generator names. Used for word input on the library surface and
/// when reading serialized elements back.
pub fn parse_word_expr(text: &str, names: &[String]) -> Result<LetterSeq> {
    if text.trim() == "e" {
        return Ok(Vec::new());
    }
    let generators: Vec<GeneratorSymbol> = names
        .iter()
        .enumerate()
        .map(|(index, name)| GeneratorSymbol { name: name.clone(), index })
        .collect();
    let toks = Lexer::new(text).tokens()?;
    let mut p = Parser { toks, pos: 0 };
    let seq = p.parse_wordexpr(&generators)?;
    if p.pos != p.toks.len() {
        return Err(p.err_at("trailing input after word"));
    }
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_free_rank_one() {
        let p = parse_presentation("group \"Z\" { generators t; relators ; }").unwrap();
        assert_eq!(p.name, "Z");
        assert_eq!(p.generators.len(), 1);
        assert!(p.relators.is_empty());
    }

    #[test]
    fn expands_exponents() {
        let p = parse_presentation("group \"Z2\" { generators a; relators a^2; }").unwrap();
        assert_eq!(p.relators, vec![vec![Letter::new(0, false), Letter::new(0, false)]]);
    }

    #[test]
    fn expands_commutators() {
        // Hand expansion: [a1,a2] = a1 a2 a1^-1 a2^-1, four relators of length 4.
        let p = parse_presentation(
            "group \"F2xF2\" { generators a1,b1,a2,b2; relators [a1,a2],[a1,b2],[b1,a2],[b1,b2]; }",
        )
        .unwrap();
        assert_eq!(p.relators.len(), 4);
        for r in &p.relators {
            assert_eq!(r.len(), 4);
        }
        assert_eq!(
            p.relators[0],
            vec![
                Letter::new(0, false),
                Letter::new(2, false),
                Letter::new(0, true),
                Letter::new(2, true)
            ]
        );
    }

    #[test]
    fn reports_position_on_error() {
        let err = parse_presentation("group \"X\" { generators a;\n relators b; }").unwrap_err();
        match err {
            Error::UnknownGenerator(name) => assert_eq!(name, "b"),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_presentation("group \"X\" { generators a relators ; }").unwrap_err();
        assert!(matches!(err, Error::Syntax { .. }));
    }

    #[test]
    fn duplicate_generator_rejected() {
        let err = parse_presentation("group \"X\" { generators a, a; relators ; }").unwrap_err();
        assert!(matches!(err, Error::DuplicateGenerator(_)));
    }

    #[test]
    fn pretty_roundtrip_is_identity_on_canonical_files() {
        let srcs = [
            "group \"Z\" { generators t; relators ; }",
            "group \"RP2\" { generators a; relators a^2; }",
            "group \"T2\" { generators a, b; relators [a, b]; }",
        ];
        for src in srcs {
            let p = parse_presentation(src).unwrap();
            let canonical = p.pretty();
            let reparsed = parse_presentation(&canonical).unwrap();
            assert_eq!(reparsed, p);
            assert_eq!(reparsed.pretty(), canonical);
        }
    }

    #[test]
    fn comments_and_whitespace_ignored() {
        let p = parse_presentation(
            "# a circle\ngroup \"Z\" {\n  generators t; # one generator\n  relators ;\n}",
        )
        .unwrap();
        assert_eq!(p.name, "Z");
    }

    #[test]
    fn parses_nested_word_expr() {
        let p = parse_presentation(
            "group \"X\" { generators a, b; relators (a b) a^2, [a b, b]; }",
        )
        .unwrap();
        assert_eq!(p.relators[0].len(), 4);
        assert_eq!(p.relators[1].len(), 6);
    }
}
