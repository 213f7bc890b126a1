//! Exact arithmetic in the rational group ring Q[G].
//!
//! Elements are finitely supported maps from normal-form words to nonzero
//! `BigRational` coefficients, kept in shortlex order. The convolution
//! product may fan out over rayon; the reduction is exact addition, so the
//! result is independent of the execution path.

use std::collections::BTreeMap;

use num::{BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::Group;
use crate::par;
use crate::word::Word;

pub const DEFAULT_SUPPORT_CAP: usize = 5_000_000;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// A finitely supported formal rational combination of group elements.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RingElem {
    terms: BTreeMap<Word, BigRational>,
}

impl RingElem {
    pub fn zero() -> RingElem {
        RingElem { terms: BTreeMap::new() }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, BigRational)>) -> RingElem {
        let mut map: BTreeMap<Word, BigRational> = BTreeMap::new();
        for (w, c) in terms {
            if c.is_zero() {
                continue;
            }
            *map.entry(w).or_insert_with(BigRational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        RingElem { terms: map }
    }

    pub fn single(w: Word, c: BigRational) -> RingElem {
        if c.is_zero() {
            RingElem::zero()
        } else {
            RingElem { terms: BTreeMap::from([(w, c)]) }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient_at(&self, w: &Word) -> BigRational {
        self.terms.get(w).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn augmentation(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c)
    }

    pub fn l1_norm(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c.abs())
    }

    /// Sum of squared coefficients; equals the coefficient of e in x* x.
    pub fn l2_norm_sq(&self) -> BigRational {
        self.terms.values().fold(BigRational::zero(), |a, c| a + c * c)
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn display(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (w, c) in &self.terms {
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(&format!("({}) {}", c, w.display(names)));
        }
        out
    }
}

/// Arithmetic context: the group plus the support cap guarding convolution.
#[derive(Debug, Clone)]
pub struct GroupRing {
    pub group: Group,
    pub support_cap: usize,
}

impl GroupRing {
    pub fn new(group: Group) -> GroupRing {
        GroupRing { group, support_cap: DEFAULT_SUPPORT_CAP }
    }

    pub fn with_cap(group: Group, support_cap: usize) -> GroupRing {
        GroupRing { group, support_cap }
    }

    pub fn one(&self) -> RingElem {
        RingElem::single(self.group.identity(), BigRational::one())
    }

    pub fn generator(&self, i: usize) -> RingElem {
        RingElem::single(self.group.generator(i), BigRational::one())
    }

    pub fn scalar(&self, c: BigRational) -> RingElem {
        RingElem::single(self.group.identity(), c)
    }

    pub fn word(&self, w: Word) -> RingElem {
        RingElem::single(w, BigRational::one())
    }

    pub fn add(&self, x: &RingElem, y: &RingElem) -> RingElem {
        let mut terms = x.terms.clone();
        for (w, c) in &y.terms {
            let entry = terms.entry(w.clone()).or_insert_with(BigRational::zero);
            *entry += c;
        }
        terms.retain(|_, c| !c.is_zero());
        RingElem { terms }
    }

    pub fn sub(&self, x: &RingElem, y: &RingElem) -> RingElem {
        self.add(x, &self.scale(&int(-1), y))
    }

    pub fn scale(&self, q: &BigRational, x: &RingElem) -> RingElem {
        if q.is_zero() {
            return RingElem::zero();
        }
        RingElem { terms: x.terms.iter().map(|(w, c)| (w.clone(), c * q)).collect() }
    }

    /// Convolution product. The coefficient of w is the sum of x(u) y(v)
    /// over factorizations normalize(u v) = w.
    pub fn mul(&self, x: &RingElem, y: &RingElem) -> Result<RingElem> {
        if x.is_zero() || y.is_zero() {
            return Ok(RingElem::zero());
        }
        let out = if x.support_size().saturating_mul(y.support_size()) >= 4096 {
            self.mul_dispatch(x, y)
        } else {
            self.mul_sequential(x, y)
        };
        if out.support_size() > self.support_cap {
            return Err(Error::SupportCapExceeded(self.support_cap));
        }
        Ok(out)
    }

    #[cfg(feature = "parallel")]
    fn mul_dispatch(&self, x: &RingElem, y: &RingElem) -> RingElem {
        let xs: Vec<(&Word, &BigRational)> = x.terms.iter().collect();
        let chunk = (xs.len() / rayon::current_num_threads().max(1)).max(16);
        let terms = par::chunk_reduce(
            xs.len(),
            chunk,
            BTreeMap::new,
            |range| {
                let mut acc: BTreeMap<Word, BigRational> = BTreeMap::new();
                for &(u, cu) in &xs[range] {
                    for (v, cv) in &y.terms {
                        let w = self.group.multiply(u, v);
                        let entry = acc.entry(w).or_insert_with(BigRational::zero);
                        *entry += cu * cv;
                    }
                }
                acc
            },
            merge_maps,
        );
        let mut terms = terms;
        terms.retain(|_, c| !c.is_zero());
        RingElem { terms }
    }

    #[cfg(not(feature = "parallel"))]
    fn mul_dispatch(&self, x: &RingElem, y: &RingElem) -> RingElem {
        self.mul_sequential(x, y)
    }

    /// Reference sequential convolution; the parallel path must agree with
    /// this bit for bit. Public so benchmarks and tests can pin it down.
    pub fn mul_sequential(&self, x: &RingElem, y: &RingElem) -> RingElem {
        let mut acc: BTreeMap<Word, BigRational> = BTreeMap::new();
        for (u, cu) in &x.terms {
            for (v, cv) in &y.terms {
                let w = self.group.multiply(u, v);
                let entry = acc.entry(w).or_insert_with(BigRational::zero);
                *entry += cu * cv;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        RingElem { terms: acc }
    }

    /// Involution: coefficient of w in star(x) is the coefficient of w^-1
    /// in x (real coefficients, no conjugation).
    pub fn star(&self, x: &RingElem) -> RingElem {
        RingElem {
            terms: x.terms.iter().map(|(w, c)| (self.group.invert(w), c.clone())).collect(),
        }
    }

    pub fn is_self_adjoint(&self, x: &RingElem) -> bool {
        self.star(x) == *x
    }

    pub fn pow(&self, x: &RingElem, n: usize) -> Result<RingElem> {
        let mut acc = self.one();
        let mut base = x.clone();
        let mut n = n;
        loop {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            n >>= 1;
            if n == 0 {
                return Ok(acc);
            }
            base = self.mul(&base, &base)?;
        }
    }
}

fn merge_maps(
    mut a: BTreeMap<Word, BigRational>,
    b: BTreeMap<Word, BigRational>,
) -> BTreeMap<Word, BigRational> {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (w, c) in b {
        let entry = a.entry(w).or_insert_with(BigRational::zero);
        *entry += c;
    }
    a
}

// ---------------------------------------------------------------------------
// Matrices over the group ring
// ---------------------------------------------------------------------------

/// Dense small matrix of group-ring elements. Rows and columns are module
/// ranks, so these stay tiny even when individual entries are large.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<RingElem>,
}

impl RingMatrix {
    pub fn zero(rows: usize, cols: usize) -> RingMatrix {
        RingMatrix { rows, cols, entries: vec![RingElem::zero(); rows * cols] }
    }

    pub fn identity(ring: &GroupRing, n: usize) -> RingMatrix {
        let mut m = RingMatrix::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = ring.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<RingElem>>) -> RingMatrix {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c));
        RingMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn at(&self, i: usize, j: usize) -> &RingElem {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut RingElem {
        &mut self.entries[i * self.cols + j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RingElem::is_zero)
    }

    pub fn column(&self, j: usize) -> Vec<RingElem> {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    /// Append a column (rank extension).
    pub fn with_column(&self, col: &[RingElem]) -> RingMatrix {
        assert_eq!(col.len(), self.rows);
        let mut out = RingMatrix::zero(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.at_mut(i, j) = self.at(i, j).clone();
            }
            *out.at_mut(i, self.cols) = col[i].clone();
        }
        out
    }

    pub fn max_word_len(&self) -> usize {
        self.entries.iter().map(RingElem::max_word_len).max().unwrap_or(0)
    }

    /// Largest row sum of entrywise l1 norms; a certified upper bound for
    /// the operator norm of a self-adjoint matrix in the regular
    /// representation (Schur test with equal row/column bounds).
    pub fn l1_schur_bound(&self, _ring: &GroupRing) -> BigRational {
        let mut best = BigRational::zero();
        for i in 0..self.rows {
            let mut s = BigRational::zero();
            for j in 0..self.cols {
                s += self.at(i, j).l1_norm();
            }
            if s > best {
                best = s;
            }
        }
        let mut best_col = BigRational::zero();
        for j in 0..self.cols {
            let mut s = BigRational::zero();
            for i in 0..self.rows {
                s += self.at(i, j).l1_norm();
            }
            if s > best_col {
                best_col = s;
            }
        }
        // For non-self-adjoint inputs the geometric mean would be needed;
        // callers only use this on self-adjoint matrices where row and
        // column sums agree, so take the max to stay safe either way.
        if best_col > best {
            best_col
        } else {
            best
        }
    }
}

impl GroupRing {
    pub fn mat_mul(&self, a: &RingMatrix, b: &RingMatrix) -> Result<RingMatrix> {
        if a.cols != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "mat_mul: {}x{} times {}x{}",
                a.rows, a.cols, b.rows, b.cols
            )));
        }
        let cells: Vec<(usize, usize)> =
            (0..a.rows).flat_map(|i| (0..b.cols).map(move |j| (i, j))).collect();
        let computed: Vec<Result<RingElem>> = par::map_collect(cells, |(i, j)| {
            let mut acc = RingElem::zero();
            for k in 0..a.cols {
                let p = self.mul(a.at(i, k), b.at(k, j))?;
                acc = self.add(&acc, &p);
            }
            Ok(acc)
        });
        let mut out = RingMatrix::zero(a.rows, b.cols);
        let mut it = computed.into_iter();
        for i in 0..a.rows {
            for j in 0..b.cols {
                *out.at_mut(i, j) = it.next().unwrap()?;
            }
        }
        Ok(out)
    }

    /// Transpose plus entrywise star; (AB)* = B* A*.
    pub fn mat_star(&self, a: &RingMatrix) -> RingMatrix {
        let mut out = RingMatrix::zero(a.cols, a.rows);
        for i in 0..a.rows {
            for j in 0..a.cols {
                *out.at_mut(j, i) = self.star(a.at(i, j));
            }
        }
        out
    }

    pub fn mat_add(&self, a: &RingMatrix, b: &RingMatrix) -> Result<RingMatrix> {
        if a.rows != b.rows || a.cols != b.cols {
            return Err(Error::DimensionMismatch("mat_add".into()));
        }
        let mut out = RingMatrix::zero(a.rows, a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                *out.at_mut(i, j) = self.add(a.at(i, j), b.at(i, j));
            }
        }
        Ok(out)
    }

    pub fn mat_is_self_adjoint(&self, a: &RingMatrix) -> bool {
        a.rows == a.cols && self.mat_star(a) == *a
    }

    /// Apply a matrix to a column vector of ring elements.
    pub fn mat_apply(&self, a: &RingMatrix, v: &[RingElem]) -> Result<Vec<RingElem>> {
        if a.cols != v.len() {
            return Err(Error::DimensionMismatch(format!(
                "mat_apply: {}x{} to vector of {}",
                a.rows,
                a.cols,
                v.len()
            )));
        }
        Ok((0..a.rows)
            .map(|i| {
                let mut acc = RingElem::zero();
                for (j, x) in v.iter().enumerate() {
                    acc = self.add(&acc, &self.mul(a.at(i, j), x).expect("cap"));
                }
                acc
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    fn z_ring() -> GroupRing {
        GroupRing::new(Group::free_default(1))
    }

    fn laplacian_z(ring: &GroupRing) -> RingElem {
        // 2 - t - t^-1
        let t = ring.generator(0);
        let tinv = ring.star(&t);
        ring.sub(&ring.sub(&ring.scalar(int(2)), &t), &tinv)
    }

    #[test]
    fn add_and_scale() {
        let ring = z_ring();
        let a = ring.generator(0);
        let neg = ring.scale(&int(-1), &a);
        assert!(ring.add(&a, &neg).is_zero());
        let two_a = ring.scale(&int(2), &a);
        assert_eq!(ring.scale(&rat(1, 2), &two_a), a);
        let one = ring.one();
        let s = ring.add(&ring.add(&one, &a), &ring.sub(&one, &a));
        assert_eq!(s, ring.scalar(int(2)));
    }

    #[test]
    fn convolution_examples() {
        let ring = z_ring();
        let t = ring.generator(0);
        let one = ring.one();
        // (1+a)(1-a) = 1 - a^2
        let p = ring.mul(&ring.add(&one, &t), &ring.sub(&one, &t)).unwrap();
        let t2 = ring.mul(&t, &t).unwrap();
        assert_eq!(p, ring.sub(&one, &t2));
        // (a)(a^-1) = 1
        let tinv = ring.star(&t);
        assert_eq!(ring.mul(&t, &tinv).unwrap(), one);
        // (2 - t - t^-1)^2 = 6 - 4t - 4t^-1 + t^2 + t^-2 (hand expansion)
        let d = laplacian_z(&ring);
        let d2 = ring.mul(&d, &d).unwrap();
        assert_eq!(d2.coefficient_at(&ring.group.identity()), int(6));
        assert_eq!(d2.coefficient_at(&ring.group.generator(0)), int(-4));
        assert_eq!(d2.support_size(), 5);
        assert_eq!(d2.l1_norm(), int(16));
        assert_eq!(d2.augmentation(), int(0));
    }

    #[test]
    fn star_examples() {
        let ring = GroupRing::new(Group::free_default(2));
        let a = ring.generator(0);
        let b = ring.generator(1);
        let binv = ring.star(&b);
        // star(2 a b^-1) = 2 b a^-1
        let x = ring.scale(&int(2), &ring.mul(&a, &binv).unwrap());
        let sx = ring.star(&x);
        let expected = ring.scale(&int(2), &ring.mul(&b, &ring.star(&a)).unwrap());
        assert_eq!(sx, expected);
        // Laplacian of Z is self-adjoint
        let zr = z_ring();
        assert!(zr.is_self_adjoint(&laplacian_z(&zr)));
    }

    #[test]
    fn parallel_matches_sequential() {
        let ring = GroupRing::new(Group::free_default(2));
        let a = ring.generator(0);
        let b = ring.generator(1);
        let s = ring.add(
            &ring.add(&a, &ring.star(&a)),
            &ring.add(&b, &ring.star(&b)),
        );
        let mut big = s.clone();
        for _ in 0..5 {
            big = ring.mul(&big, &s).unwrap();
        }
        assert_eq!(big, ring.mul_sequential(&ring.pow(&s, 5).unwrap(), &s));
    }

    #[test]
    fn support_cap_guard() {
        let ring = GroupRing::with_cap(Group::free_default(2), 10);
        let a = ring.generator(0);
        let b = ring.generator(1);
        let s = ring.add(
            &ring.add(&a, &ring.star(&a)),
            &ring.add(&b, &ring.star(&b)),
        );
        let err = ring.pow(&s, 4).unwrap_err();
        assert!(matches!(err, Error::SupportCapExceeded(10)));
    }

    #[test]
    fn trace_vector_faithful() {
        let ring = GroupRing::new(Group::free_default(2));
        let a = ring.generator(0);
        let x = ring.add(&ring.scale(&rat(3, 2), &a), &ring.one());
        let xx = ring.mul(&ring.star(&x), &x).unwrap();
        let e = ring.group.identity();
        // <delta_e, x* x delta_e> = sum of squared coefficients
        assert_eq!(xx.coefficient_at(&e), x.l2_norm_sq());
        assert!(xx.coefficient_at(&e) > int(0));
    }

    #[test]
    fn matrix_semantics() {
        let ring = GroupRing::new(Group::free_default(2));
        let i2 = RingMatrix::identity(&ring, 2);
        let mut a = RingMatrix::zero(2, 2);
        *a.at_mut(0, 0) = ring.generator(0);
        *a.at_mut(0, 1) = ring.one();
        *a.at_mut(1, 1) = ring.star(&ring.generator(1));
        assert_eq!(ring.mat_mul(&i2, &a).unwrap(), a);
        let astst = ring.mat_star(&ring.mat_star(&a));
        assert_eq!(astst, a);
        // (AB)* = B* A*
        let b = ring.mat_star(&a);
        let ab = ring.mat_mul(&a, &b).unwrap();
        let lhs = ring.mat_star(&ab);
        let rhs = ring.mat_mul(&ring.mat_star(&b), &ring.mat_star(&a)).unwrap();
        assert_eq!(lhs, rhs);
        assert!(ring.mat_is_self_adjoint(&ab));
    }

    #[test]
    fn dimension_mismatch_reported() {
        let ring = GroupRing::new(Group::free_default(1));
        let a = RingMatrix::zero(2, 3);
        let b = RingMatrix::zero(2, 3);
        assert!(matches!(ring.mat_mul(&a, &b), Err(Error::DimensionMismatch(_))));
    }
}
