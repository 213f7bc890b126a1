//! Group descriptors with decidable word arithmetic.
//!
//! Supported classes: free groups, direct products, shortlex-reducing
//! confluent rewriting systems, and finite groups given by multiplication
//! table. Everything is immutable after construction; all operations are
//! pure.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::presentation::Presentation;
use crate::word::{free_reduce, invert_seq, Letter, LetterSeq, Word};

pub const DEFAULT_BALL_CAP: usize = 4_000_000;

/// A rewriting rule `lhs -> rhs` over the letter alphabet. Rules must be
/// shortlex-reducing so that rewriting terminates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: LetterSeq,
    pub rhs: LetterSeq,
}

#[derive(Debug)]
pub struct RewritingSystem {
    pub presentation: Presentation,
    /// User rules plus the implicit free-reduction rules.
    rules: Vec<RewriteRule>,
    n_gens: usize,
}

#[derive(Debug)]
pub struct TableGroup {
    pub name: String,
    /// table[i][j] = index of the product (i acting first on the left).
    pub table: Vec<Vec<usize>>,
    pub inverses: Vec<usize>,
    /// Designated generating set: (name, element index).
    pub generators: Vec<(String, usize)>,
    /// Canonical shortest-lex word for each element, found by BFS.
    canonical: Vec<LetterSeq>,
}

/// Rapid-decay certificate attached to a descriptor; see the spectral
/// module for how the weights enter the certified norm bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RdProfile {
    /// Haagerup weights (k+1) over word-length spheres; valid for free groups.
    FreeGroup,
    /// Per-factor weights multiplied; validated empirically against lower
    /// bounds at certification time.
    ProductOfFree,
    None,
}

#[derive(Debug)]
enum Kind {
    Free { rank: usize },
    Product { factors: Vec<Group>, offsets: Vec<usize> },
    Rewriting(RewritingSystem),
    Table(TableGroup),
}

/// A group with decidable normal forms. Cheap to clone (shared internals).
#[derive(Debug, Clone)]
pub struct Group {
    inner: Arc<Inner>,
}

#[derive(Debug)]
struct Inner {
    name: String,
    kind: Kind,
    generator_names: Vec<String>,
}

impl PartialEq for Group {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.structural_key() == other.structural_key()
    }
}
impl Eq for Group {}

impl Group {
    // -- constructors -------------------------------------------------------

    pub fn free(rank: usize, names: Vec<String>) -> Group {
        assert_eq!(names.len(), rank);
        Group {
            inner: Arc::new(Inner {
                name: format!("F{rank}"),
                kind: Kind::Free { rank },
                generator_names: names,
            }),
        }
    }

    pub fn free_default(rank: usize) -> Group {
        let names = (0..rank).map(|i| default_name(i, rank)).collect();
        Group::free(rank, names)
    }

    pub fn direct_product(factors: Vec<Group>) -> Result<Group> {
        if factors.len() < 2 {
            return Err(Error::Invalid("direct product needs at least 2 factors".into()));
        }
        let mut offsets = Vec::with_capacity(factors.len());
        let mut names = Vec::new();
        let mut off = 0;
        for f in &factors {
            offsets.push(off);
            off += f.generator_count();
            names.extend(f.generator_names().iter().cloned());
        }
        let name = factors.iter().map(|f| f.name().to_string()).collect::<Vec<_>>().join(" x ");
        Ok(Group {
            inner: Arc::new(Inner {
                name,
                kind: Kind::Product { factors, offsets },
                generator_names: names,
            }),
        })
    }

    /// Build a rewriting-system group. The rule set (together with the
    /// implicit free reductions) is checked for local confluence by the
    /// critical-pair test; combined with shortlex reduction this gives
    /// confluence, hence unique normal forms.
    pub fn rewriting(presentation: Presentation, user_rules: Vec<RewriteRule>) -> Result<Group> {
        let n_gens = presentation.generators.len();
        let mut rules = Vec::new();
        for g in 0..n_gens {
            for inv in [false, true] {
                rules.push(RewriteRule {
                    lhs: vec![Letter::new(g, inv), Letter::new(g, !inv)],
                    rhs: vec![],
                });
            }
        }
        for r in user_rules {
            if r.lhs.is_empty() {
                return Err(Error::NonReducingRule("(empty)".into()));
            }
            let reducing = match r.rhs.len().cmp(&r.lhs.len()) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => r.rhs < r.lhs,
                std::cmp::Ordering::Greater => false,
            };
            if !reducing {
                let names = presentation.generator_names();
                return Err(Error::NonReducingRule(Word::Letters(r.lhs.clone()).display(&names)));
            }
            rules.push(r);
        }
        let sys = RewritingSystem { presentation, rules, n_gens };
        sys.check_local_confluence()?;
        let generator_names = sys.presentation.generator_names();
        let name = sys.presentation.name.clone();
        Ok(Group { inner: Arc::new(Inner { name, kind: Kind::Rewriting(sys), generator_names }) })
    }

    /// Finite group from a multiplication table. `generators` designates the
    /// generating set used for the word metric. Identity must be element 0.
    pub fn from_table(
        name: &str,
        table: Vec<Vec<usize>>,
        generators: Vec<(String, usize)>,
    ) -> Result<Group> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n) {
            return Err(Error::BadTable("table must be square and nonempty".into()));
        }
        for row in &table {
            for &v in row {
                if v >= n {
                    return Err(Error::BadTable("entry out of range".into()));
                }
            }
        }
        for i in 0..n {
            if table[0][i] != i || table[i][0] != i {
                return Err(Error::BadTable("element 0 is not an identity".into()));
            }
        }
        let mut inverses = vec![usize::MAX; n];
        for i in 0..n {
            let mut found = None;
            for j in 0..n {
                if table[i][j] == 0 && table[j][i] == 0 {
                    found = Some(j);
                    break;
                }
            }
            inverses[i] = found.ok_or_else(|| Error::BadTable(format!("no inverse for {i}")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::BadTable(format!("associativity fails at ({a},{b},{c})")));
                    }
                }
            }
        }
        if generators.is_empty() {
            return Err(Error::BadTable("no generators designated".into()));
        }
        for (gname, idx) in &generators {
            if *idx >= n {
                return Err(Error::BadTable(format!("generator `{gname}` out of range")));
            }
        }
        // BFS from the identity for canonical shortest-lex words and to
        // verify the designated set generates.
        let mut canonical: Vec<Option<LetterSeq>> = vec![None; n];
        canonical[0] = Some(vec![]);
        let mut queue: VecDeque<usize> = VecDeque::new();
        queue.push_back(0);
        // Letters ordered (gen asc, + before -) so that first discovery is
        // the shortlex-minimal word of its length.
        let mut steps: Vec<(Letter, usize)> = Vec::new();
        for (gi, (_, elem)) in generators.iter().enumerate() {
            steps.push((Letter::new(gi, false), *elem));
            steps.push((Letter::new(gi, true), inverses[*elem]));
        }
        while let Some(x) = queue.pop_front() {
            let base = canonical[x].clone().unwrap();
            for &(letter, elem) in &steps {
                let y = table[x][elem];
                if canonical[y].is_none() {
                    let mut w = base.clone();
                    w.push(letter);
                    canonical[y] = Some(w);
                    queue.push_back(y);
                }
            }
        }
        if canonical.iter().any(|c| c.is_none()) {
            return Err(Error::BadTable("designated set does not generate".into()));
        }
        let canonical: Vec<LetterSeq> = canonical.into_iter().map(|c| c.unwrap()).collect();
        let generator_names = generators.iter().map(|(n, _)| n.clone()).collect();
        let tg = TableGroup { name: name.to_string(), table, inverses, generators, canonical };
        Ok(Group {
            inner: Arc::new(Inner { name: name.to_string(), kind: Kind::Table(tg), generator_names }),
        })
    }

    /// Cyclic group of order m with one designated generator.
    pub fn cyclic(m: usize, gen_name: &str) -> Result<Group> {
        if m == 0 {
            return Err(Error::BadTable("cyclic group of order 0".into()));
        }
        let table: Vec<Vec<usize>> = (0..m).map(|i| (0..m).map(|j| (i + j) % m).collect()).collect();
        Group::from_table(&format!("Z/{m}"), table, vec![(gen_name.to_string(), 1 % m)])
    }

    // -- accessors -----------------------------------------------------------

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn generator_names(&self) -> &[String] {
        &self.inner.generator_names
    }

    pub fn generator_count(&self) -> usize {
        self.inner.generator_names.len()
    }

    pub fn factors(&self) -> Option<(&[Group], &[usize])> {
        match &self.inner.kind {
            Kind::Product { factors, offsets } => Some((factors, offsets)),
            _ => None,
        }
    }

    pub fn is_free(&self) -> Option<usize> {
        match &self.inner.kind {
            Kind::Free { rank } => Some(*rank),
            _ => None,
        }
    }

    pub fn table_group(&self) -> Option<&TableGroup> {
        match &self.inner.kind {
            Kind::Table(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.inner.kind {
            Kind::Table(_) => true,
            Kind::Product { factors, .. } => factors.iter().all(|f| f.is_finite()),
            Kind::Free { rank } => *rank == 0,
            Kind::Rewriting(_) => false,
        }
    }

    /// Finite order, when the group is finite.
    pub fn order(&self) -> Option<usize> {
        match &self.inner.kind {
            Kind::Table(t) => Some(t.table.len()),
            Kind::Product { factors, .. } => {
                factors.iter().map(|f| f.order()).product::<Option<usize>>()
            }
            Kind::Free { rank } if *rank == 0 => Some(1),
            _ => None,
        }
    }

    /// Default rapid-decay profile for the descriptor: free groups carry the
    /// Haagerup profile, products of free groups the product profile.
    pub fn rd_profile(&self) -> RdProfile {
        match &self.inner.kind {
            Kind::Free { .. } => RdProfile::FreeGroup,
            Kind::Product { factors, .. } => {
                if factors.iter().all(|f| f.is_free().is_some()) {
                    RdProfile::ProductOfFree
                } else {
                    RdProfile::None
                }
            }
            _ => RdProfile::None,
        }
    }

    fn structural_key(&self) -> String {
        match &self.inner.kind {
            Kind::Free { rank } => format!("free:{rank}:{:?}", self.inner.generator_names),
            Kind::Product { factors, .. } => {
                let ks: Vec<String> = factors.iter().map(|f| f.structural_key()).collect();
                format!("prod:[{}]", ks.join(","))
            }
            Kind::Rewriting(sys) => format!(
                "rw:{:?}:{:?}",
                sys.presentation.generator_names(),
                sys.rules.iter().map(|r| (r.lhs.clone(), r.rhs.clone())).collect::<Vec<_>>()
            ),
            Kind::Table(t) => format!("table:{:?}:{:?}", t.table, t.generators),
        }
    }

    // -- word arithmetic -----------------------------------------------------

    pub fn identity(&self) -> Word {
        match &self.inner.kind {
            Kind::Product { factors, .. } => {
                Word::Tuple(factors.iter().map(|f| f.identity()).collect())
            }
            _ => Word::identity_letters(),
        }
    }

    /// The i-th generator as a normal-form word.
    pub fn generator(&self, i: usize) -> Word {
        self.normalize(&[Letter::new(i, false)])
    }

    /// Normal form of a raw letter sequence. Idempotent; two sequences map
    /// to the same output iff they represent the same group element.
    pub fn normalize(&self, seq: &[Letter]) -> Word {
        for l in seq {
            assert!(l.gen() < self.generator_count(), "letter out of range");
        }
        match &self.inner.kind {
            Kind::Free { .. } => Word::Letters(free_reduce(seq)),
            Kind::Rewriting(sys) => Word::Letters(sys.normalize(seq)),
            Kind::Table(t) => Word::Letters(t.normalize(seq)),
            Kind::Product { factors, offsets } => {
                let mut parts: Vec<LetterSeq> = vec![Vec::new(); factors.len()];
                for &l in seq {
                    let f = factor_of(offsets, l.gen());
                    parts[f].push(Letter::new(l.gen() - offsets[f], l.is_inverse()));
                }
                Word::Tuple(
                    parts
                        .into_iter()
                        .enumerate()
                        .map(|(i, p)| factors[i].normalize(&p))
                        .collect(),
                )
            }
        }
    }

    /// Raw letters of a normal-form word, in the ambient numbering.
    pub fn letters_of(&self, w: &Word) -> LetterSeq {
        match (&self.inner.kind, w) {
            (Kind::Product { factors, offsets }, Word::Tuple(parts)) => {
                let mut out = Vec::new();
                for (i, p) in parts.iter().enumerate() {
                    for l in factors[i].letters_of(p) {
                        out.push(Letter::new(l.gen() + offsets[i], l.is_inverse()));
                    }
                }
                out
            }
            (_, Word::Letters(seq)) => seq.clone(),
            _ => panic!("word shape does not match group"),
        }
    }

    pub fn multiply(&self, u: &Word, v: &Word) -> Word {
        match (&self.inner.kind, u, v) {
            (Kind::Product { factors, .. }, Word::Tuple(a), Word::Tuple(b)) => Word::Tuple(
                factors
                    .iter()
                    .zip(a.iter().zip(b.iter()))
                    .map(|(f, (x, y))| f.multiply(x, y))
                    .collect(),
            ),
            (_, Word::Letters(a), Word::Letters(b)) => {
                let mut seq = a.clone();
                seq.extend_from_slice(b);
                self.normalize(&seq)
            }
            _ => panic!("word shape does not match group"),
        }
    }

    pub fn invert(&self, u: &Word) -> Word {
        match (&self.inner.kind, u) {
            (Kind::Product { factors, .. }, Word::Tuple(a)) => {
                Word::Tuple(factors.iter().zip(a.iter()).map(|(f, x)| f.invert(x)).collect())
            }
            (_, Word::Letters(a)) => self.normalize(&invert_seq(a)),
            _ => panic!("word shape does not match group"),
        }
    }

    /// Word length of a normal form in the descriptor's generating set.
    /// Normal forms are geodesic for every supported class, so this is the
    /// word metric.
    pub fn length(&self, u: &Word) -> usize {
        u.len()
    }

    /// All elements of word length at most `radius`, breadth-first with
    /// shortlex tie-breaking inside each level.
    pub fn enumerate_ball(&self, radius: usize, cap: usize) -> Result<Vec<Word>> {
        match &self.inner.kind {
            Kind::Product { factors, .. } => {
                let factor_balls: Vec<Vec<Word>> = factors
                    .iter()
                    .map(|f| f.enumerate_ball(radius, cap))
                    .collect::<Result<_>>()?;
                let mut out: Vec<Word> = Vec::new();
                let mut partial: Vec<Word> = Vec::new();
                product_ball(&factor_balls, radius, 0, &mut partial, &mut out, cap, radius)?;
                out.sort();
                Ok(out)
            }
            _ => {
                let mut seen: HashSet<Word> = HashSet::new();
                let mut out: Vec<Word> = Vec::new();
                let id = self.identity();
                seen.insert(id.clone());
                out.push(id);
                let mut level_start = 0;
                let letters: Vec<Word> = (0..self.generator_count())
                    .flat_map(|g| {
                        [Word::Letters(vec![Letter::new(g, false)]), Word::Letters(vec![Letter::new(g, true)])]
                    })
                    .collect();
                for r in 1..=radius {
                    let level_end = out.len();
                    let mut next: Vec<Word> = Vec::new();
                    for w in &out[level_start..level_end] {
                        for l in &letters {
                            let v = self.multiply(w, l);
                            if self.length(&v) == r && !seen.contains(&v) {
                                seen.insert(v.clone());
                                next.push(v);
                            }
                        }
                    }
                    next.sort();
                    if out.len() + next.len() > cap {
                        return Err(Error::BallTooLarge { radius, cap });
                    }
                    level_start = level_end;
                    out.extend(next);
                    if level_start == out.len() {
                        break; // exhausted a finite group
                    }
                }
                Ok(out)
            }
        }
    }
}

fn product_ball(
    factor_balls: &[Vec<Word>],
    radius: usize,
    idx: usize,
    partial: &mut Vec<Word>,
    out: &mut Vec<Word>,
    cap: usize,
    budget: usize,
) -> Result<()> {
    if idx == factor_balls.len() {
        if out.len() >= cap {
            return Err(Error::BallTooLarge { radius, cap });
        }
        out.push(Word::Tuple(partial.clone()));
        return Ok(());
    }
    for w in &factor_balls[idx] {
        let l = w.len();
        if l > budget {
            break; // balls are sorted by length
        }
        partial.push(w.clone());
        product_ball(factor_balls, radius, idx + 1, partial, out, cap, budget - l)?;
        partial.pop();
    }
    Ok(())
}

fn factor_of(offsets: &[usize], gen: usize) -> usize {
    match offsets.binary_search(&gen) {
        Ok(i) => i,
        Err(i) => i - 1,
    }
}

fn default_name(i: usize, rank: usize) -> String {
    const NAMES: [&str; 6] = ["a", "b", "c", "d", "f", "g"];
    if rank == 1 {
        "t".to_string()
    } else if i < NAMES.len() {
        NAMES[i].to_string()
    } else {
        format!("x{i}")
    }
}

impl RewritingSystem {
    fn normalize(&self, seq: &[Letter]) -> LetterSeq {
        let mut word: LetterSeq = seq.to_vec();
        let max_lhs = self.rules.iter().map(|r| r.lhs.len()).max().unwrap_or(1);
        'outer: loop {
            let mut i = 0;
            while i < word.len() {
                for rule in &self.rules {
                    let l = rule.lhs.len();
                    if i + l <= word.len() && word[i..i + l] == rule.lhs[..] {
                        let mut next = Vec::with_capacity(word.len() - l + rule.rhs.len());
                        next.extend_from_slice(&word[..i]);
                        next.extend_from_slice(&rule.rhs);
                        next.extend_from_slice(&word[i + l..]);
                        word = next;
                        continue 'outer;
                    }
                }
                i += 1;
            }
            return word;
        }
        // Unreachable: every rewrite strictly decreases the shortlex order
        // and shortlex is well-founded, so the loop terminates.
    }

    /// Critical-pair local confluence check. With shortlex-reducing rules the
    /// system terminates, so local confluence implies confluence.
    fn check_local_confluence(&self) -> Result<()> {
        let names: Vec<String> = self.presentation.generator_names();
        let n = self.rules.len();
        let _ = self.n_gens;
        for i in 0..n {
            for j in 0..n {
                let (r1, r2) = (&self.rules[i], &self.rules[j]);
                // Overlap type 1: lhs of r2 occurs inside lhs of r1.
                if r2.lhs.len() < r1.lhs.len() {
                    for start in 0..=(r1.lhs.len() - r2.lhs.len()) {
                        if r1.lhs[start..start + r2.lhs.len()] == r2.lhs[..] {
                            let a = self.normalize(&r1.rhs);
                            let mut other = Vec::new();
                            other.extend_from_slice(&r1.lhs[..start]);
                            other.extend_from_slice(&r2.rhs);
                            other.extend_from_slice(&r1.lhs[start + r2.lhs.len()..]);
                            let b = self.normalize(&other);
                            if a != b {
                                return Err(Error::NonConfluentRewriting {
                                    left: Word::Letters(a).display(&names),
                                    right: Word::Letters(b).display(&names),
                                });
                            }
                        }
                    }
                }
                // Overlap type 2: a proper suffix of lhs(r1) equals a proper
                // prefix of lhs(r2).
                for k in 1..r1.lhs.len().min(r2.lhs.len()) {
                    if r1.lhs[r1.lhs.len() - k..] == r2.lhs[..k] {
                        // word = lhs1 + lhs2[k..]
                        let mut left = r1.rhs.clone();
                        left.extend_from_slice(&r2.lhs[k..]);
                        let mut right = r1.lhs[..r1.lhs.len() - k].to_vec();
                        right.extend_from_slice(&r2.rhs);
                        let a = self.normalize(&left);
                        let b = self.normalize(&right);
                        if a != b {
                            return Err(Error::NonConfluentRewriting {
                                left: Word::Letters(a).display(&names),
                                right: Word::Letters(b).display(&names),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

impl TableGroup {
    fn element_of(&self, seq: &[Letter]) -> usize {
        let mut x = 0usize;
        for l in seq {
            let g = self.generators[l.gen()].1;
            let g = if l.is_inverse() { self.inverses[g] } else { g };
            x = self.table[x][g];
        }
        x
    }

    fn normalize(&self, seq: &[Letter]) -> LetterSeq {
        self.canonical[self.element_of(seq)].clone()
    }
}

// ---------------------------------------------------------------------------
// Descriptor inference from a presentation
// ---------------------------------------------------------------------------

/// Infer a supported descriptor from the shape of a presentation:
///
/// * no relators -> free group;
/// * one generator with a single relator `a^±m` -> cyclic of order m;
/// * every relator a commutator `[x, y]` of single generators, forming a
///   complete multipartite commutation graph -> direct product of free
///   groups on the blocks;
/// * relators that are single letters -> rewriting system eliminating those
///   generators, provided the remaining relators fit one of the above.
pub fn infer_group(p: &Presentation) -> Result<Group> {
    let n = p.generators.len();
    let names = p.generator_names();
    if p.relators.is_empty() {
        return Ok(Group::free(n, names));
    }
    // Single-letter relators: kill the generator via a rewriting system.
    let killed: HashSet<usize> = p
        .relators
        .iter()
        .filter(|r| r.len() == 1)
        .map(|r| r[0].gen())
        .collect();
    if !killed.is_empty() {
        let rest: Vec<&LetterSeq> = p.relators.iter().filter(|r| r.len() != 1).collect();
        if !rest.is_empty() {
            return Err(Error::UnsupportedPresentation(
                "mixing trivialized generators with other relators is not supported".into(),
            ));
        }
        let mut rules = Vec::new();
        for &g in &killed {
            rules.push(RewriteRule { lhs: vec![Letter::new(g, false)], rhs: vec![] });
            rules.push(RewriteRule { lhs: vec![Letter::new(g, true)], rhs: vec![] });
        }
        return Group::rewriting(p.clone(), rules);
    }
    if n == 1 && p.relators.len() == 1 {
        let r = &p.relators[0];
        if r.iter().all(|l| *l == r[0]) && r.len() >= 2 {
            return Group::cyclic(r.len(), &p.generators[0].name);
        }
    }
    // Complete multipartite commutator presentations -> products of free.
    if let Some(group) = try_product_of_free(p)? {
        return Ok(group);
    }
    Err(Error::UnsupportedPresentation(format!(
        "cannot infer a supported group class for `{}`; supply a rewriting system or table",
        p.name
    )))
}

fn commutator_pair(r: &LetterSeq) -> Option<(usize, usize)> {
    if r.len() != 4 {
        return None;
    }
    let (a, b, c, d) = (r[0], r[1], r[2], r[3]);
    if c == a.inverse() && d == b.inverse() && !a.is_inverse() && !b.is_inverse() && a.gen() != b.gen()
    {
        Some((a.gen(), b.gen()))
    } else {
        None
    }
}

fn try_product_of_free(p: &Presentation) -> Result<Option<Group>> {
    let n = p.generators.len();
    let mut pairs: HashSet<(usize, usize)> = HashSet::new();
    for r in &p.relators {
        match commutator_pair(r) {
            Some((a, b)) => {
                pairs.insert((a.min(b), a.max(b)));
            }
            None => return Ok(None),
        }
    }
    // Blocks = connected components of the complement graph.
    let mut block_of: Vec<Option<usize>> = vec![None; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if block_of[start].is_some() {
            continue;
        }
        let id = blocks.len();
        let mut stack = vec![start];
        let mut members = Vec::new();
        block_of[start] = Some(id);
        while let Some(x) = stack.pop() {
            members.push(x);
            for y in 0..n {
                if block_of[y].is_none() && !pairs.contains(&(x.min(y), x.max(y))) {
                    block_of[y] = Some(id);
                    stack.push(y);
                }
            }
        }
        members.sort_unstable();
        blocks.push(members);
    }
    if blocks.len() < 2 {
        return Ok(None);
    }
    // Generators must be numbered block-contiguously so that the product
    // descriptor's offsets match the presentation's generator order.
    let mut expect = 0usize;
    for b in &blocks {
        for &g in b {
            if g != expect {
                return Ok(None);
            }
            expect += 1;
        }
    }
    // The relator set must be exactly one commutator per cross-block pair.
    let mut required = 0usize;
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            for &x in &blocks[i] {
                for &y in &blocks[j] {
                    if !pairs.contains(&(x.min(y), x.max(y))) {
                        return Ok(None);
                    }
                    required += 1;
                }
            }
        }
    }
    if pairs.len() != required {
        return Ok(None);
    }
    let names = p.generator_names();
    let factors: Vec<Group> = blocks
        .iter()
        .map(|b| Group::free(b.len(), b.iter().map(|&g| names[g].clone()).collect()))
        .collect();
    Ok(Some(Group::direct_product(factors)?))
}

/// Check that every relator of `p` normalizes to the identity in `g`.
pub fn check_relators(p: &Presentation, g: &Group) -> Result<()> {
    let names = p.generator_names();
    for r in &p.relators {
        if !g.normalize(r).is_identity() {
            return Err(Error::RelatorNotTrivialInGroup(Word::Letters(r.clone()).display(&names)));
        }
    }
    Ok(())
}

/// Closed-form ball size for free groups: |B_R| = 1 + 2n((2n-1)^R - 1)/(2n-2)
/// for rank n >= 2; 2R + 1 for rank 1. Used as an independent oracle in tests.
pub fn free_ball_size(rank: usize, radius: usize) -> u128 {
    if rank == 0 {
        return 1;
    }
    if rank == 1 {
        return 2 * radius as u128 + 1;
    }
    let q = (2 * rank - 1) as u128;
    1 + (2 * rank as u128) * (q.pow(radius as u32) - 1) / (q - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::parse_presentation;

    fn letters(pairs: &[(usize, bool)]) -> LetterSeq {
        pairs.iter().map(|&(g, i)| Letter::new(g, i)).collect()
    }

    #[test]
    fn free_normalization() {
        let g = Group::free_default(2);
        assert!(g.normalize(&letters(&[(0, false), (0, true)])).is_identity());
        let w = g.normalize(&letters(&[(0, false), (1, false), (0, true), (1, true)]));
        assert_eq!(g.length(&w), 4);
    }

    #[test]
    fn product_letters_sort_into_factors() {
        let g = Group::direct_product(vec![Group::free_default(1), Group::free_default(1)]).unwrap();
        // a c a^-1 -> c
        let w = g.normalize(&letters(&[(0, false), (1, false), (0, true)]));
        assert_eq!(g.length(&w), 1);
        assert_eq!(w, g.generator(1));
    }

    #[test]
    fn multiply_invert_length() {
        let g = Group::free_default(2);
        let a = g.generator(0);
        let b = g.generator(1);
        let ab = g.multiply(&a, &b);
        assert_eq!(g.length(&ab), 2);
        let inv = g.invert(&ab);
        // (ab)^-1 = b^-1 a^-1
        assert_eq!(inv, g.normalize(&letters(&[(1, true), (0, true)])));
        assert!(g.multiply(&ab, &inv).is_identity());
        let comm = g.normalize(&letters(&[(0, false), (1, false), (0, true), (1, true)]));
        assert_eq!(g.length(&comm), 4);
    }

    #[test]
    fn ball_sizes_match_closed_form() {
        let f2 = Group::free_default(2);
        assert_eq!(f2.enumerate_ball(1, 100).unwrap().len(), 5);
        assert_eq!(f2.enumerate_ball(2, 100).unwrap().len(), 17);
        for r in 0..=5 {
            assert_eq!(
                f2.enumerate_ball(r, 10_000).unwrap().len() as u128,
                free_ball_size(2, r)
            );
        }
        let f1 = Group::free_default(1);
        assert_eq!(f1.enumerate_ball(3, 100).unwrap().len(), 7);
        let f3 = Group::free_default(3);
        for r in 0..=4 {
            assert_eq!(
                f3.enumerate_ball(r, 100_000).unwrap().len() as u128,
                free_ball_size(3, r)
            );
        }
    }

    #[test]
    fn ball_is_sorted_and_deduplicated() {
        let g = Group::direct_product(vec![Group::free_default(2), Group::free_default(1)]).unwrap();
        let ball = g.enumerate_ball(3, 100_000).unwrap();
        for w in ball.windows(2) {
            assert!(w[0] < w[1]);
        }
        // Compare against direct enumeration of factor-ball pairs.
        let mut count = 0u128;
        let f2ball = Group::free_default(2).enumerate_ball(3, 10_000).unwrap();
        let f1ball = Group::free_default(1).enumerate_ball(3, 10_000).unwrap();
        for u in &f2ball {
            for v in &f1ball {
                if u.len() + v.len() <= 3 {
                    count += 1;
                }
            }
        }
        assert_eq!(ball.len() as u128, count);
    }

    #[test]
    fn ball_cap_enforced() {
        let g = Group::free_default(2);
        assert!(matches!(g.enumerate_ball(10, 100), Err(Error::BallTooLarge { .. })));
    }

    #[test]
    fn cyclic_table_group() {
        let g = Group::cyclic(4, "a").unwrap();
        assert_eq!(g.order(), Some(4));
        let a = g.generator(0);
        let a2 = g.multiply(&a, &a);
        let a3 = g.multiply(&a2, &a);
        assert_eq!(g.length(&a2), 2);
        // a^3 = a^-1 has word length 1.
        assert_eq!(g.length(&a3), 1);
        assert!(g.multiply(&a3, &a).is_identity());
        let ball = g.enumerate_ball(5, 100).unwrap();
        assert_eq!(ball.len(), 4);
    }

    #[test]
    fn rewriting_kill_generator() {
        let p = parse_presentation("group \"Zred\" { generators a, b; relators b; }").unwrap();
        let g = infer_group(&p).unwrap();
        let w = g.normalize(&letters(&[(0, false), (1, false), (0, false)]));
        assert_eq!(g.length(&w), 2);
        check_relators(&p, &g).unwrap();
    }

    #[test]
    fn inference_shapes() {
        let free = parse_presentation("group \"F2\" { generators a, b; relators ; }").unwrap();
        assert!(infer_group(&free).unwrap().is_free().is_some());

        let cyc = parse_presentation("group \"RP2\" { generators a; relators a^2; }").unwrap();
        assert_eq!(infer_group(&cyc).unwrap().order(), Some(2));

        let torus = parse_presentation("group \"T2\" { generators a, b; relators [a,b]; }").unwrap();
        let g = infer_group(&torus).unwrap();
        assert!(g.factors().is_some());
        check_relators(&torus, &g).unwrap();

        let f2c = parse_presentation(
            "group \"F2xF2xF2\" { generators a1,b1,a2,b2,a3,b3; relators \
             [a1,a2],[a1,b2],[b1,a2],[b1,b2],[a1,a3],[a1,b3],[b1,a3],[b1,b3],\
             [a2,a3],[a2,b3],[b2,a3],[b2,b3]; }",
        )
        .unwrap();
        let g = infer_group(&f2c).unwrap();
        let (factors, _) = g.factors().unwrap();
        assert_eq!(factors.len(), 3);
        assert!(factors.iter().all(|f| f.is_free() == Some(2)));
        check_relators(&f2c, &g).unwrap();
    }

    #[test]
    fn normalize_is_multiplicative() {
        let g = Group::free_default(2);
        let u = letters(&[(0, false), (1, true), (1, true)]);
        let v = letters(&[(1, false), (0, true), (0, false)]);
        let mut uv = u.clone();
        uv.extend_from_slice(&v);
        let lhs = g.normalize(&uv);
        let rhs = g.multiply(&g.normalize(&u), &g.normalize(&v));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn z2_as_rewriting_system_is_confluent() {
        let p = parse_presentation("group \"Z2rw\" { generators a; relators a^2; }").unwrap();
        let rules = vec![
            RewriteRule { lhs: letters(&[(0, false), (0, false)]), rhs: vec![] },
            RewriteRule { lhs: letters(&[(0, true)]), rhs: letters(&[(0, false)]) },
        ];
        let g = Group::rewriting(p, rules).unwrap();
        let w = g.normalize(&letters(&[(0, true), (0, true), (0, false)]));
        assert_eq!(g.length(&w), 1);
        assert_eq!(g.enumerate_ball(4, 100).unwrap().len(), 2);
    }

    #[test]
    fn nonconfluent_system_is_rejected() {
        // a b -> e and a a -> e: overlap "a a b" reduces to b vs a; not joinable.
        let p = parse_presentation("group \"Bad2\" { generators a, b; relators ; }").unwrap();
        let rules = vec![
            RewriteRule { lhs: letters(&[(0, false), (1, false)]), rhs: vec![] },
            RewriteRule { lhs: letters(&[(0, false), (0, false)]), rhs: vec![] },
        ];
        let err = Group::rewriting(p, rules).unwrap_err();
        assert!(matches!(err, Error::NonConfluentRewriting { .. }));
    }
}
