//! Exact linear algebra over the rationals and over prime fields.
//!
//! Dense routines cover the small systems (module ranks, induced complexes
//! of modest quotients); the sparse eliminator handles bounded-support
//! kernel searches where the unknown count runs into the thousands. Prime
//! field ranks certify lower bounds that the complex structure turns into
//! two-sided sandwiches elsewhere.

use std::collections::BTreeMap;

use num::{BigRational, One, Signed, Zero};

/// Dense rational matrix as rows.
pub type QMatrix = Vec<Vec<BigRational>>;

pub fn qmat_zero(rows: usize, cols: usize) -> QMatrix {
    vec![vec![BigRational::zero(); cols]; rows]
}

/// Rank by Gaussian elimination with exact arithmetic.
pub fn rank_dense(m: &QMatrix) -> usize {
    let mut m = m.clone();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    for col in 0..cols {
        // Choose the pivot with the smallest "size" to keep entries tame.
        let mut pivot: Option<usize> = None;
        for (r, row) in m.iter().enumerate().skip(rank) {
            if !row[col].is_zero() {
                let better = match pivot {
                    None => true,
                    Some(p) => entry_size(&row[col]) < entry_size(&m[p][col]),
                };
                if better {
                    pivot = Some(r);
                }
            }
        }
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = &m[r][col] * &inv;
                let pivot_row = m[rank].clone();
                for (c, v) in pivot_row.iter().enumerate().skip(col) {
                    if !v.is_zero() {
                        let delta = v * &factor;
                        m[r][c] -= delta;
                    }
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn entry_size(x: &BigRational) -> usize {
    x.numer().bits() as usize + x.denom().bits() as usize
}

/// Basis of the right kernel {x : M x = 0}.
pub fn kernel_dense(m: &QMatrix) -> Vec<Vec<BigRational>> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    if cols == 0 {
        return Vec::new();
    }
    let mut m = m.clone();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut rank = 0;
    for col in 0..cols {
        let mut pivot: Option<usize> = None;
        for r in rank..rows {
            if !m[r][col].is_zero() {
                pivot = Some(r);
                break;
            }
        }
        let Some(p) = pivot else { continue };
        m.swap(rank, p);
        let inv = m[rank][col].recip();
        for v in m[rank].clone().iter().enumerate() {
            let (c, val) = v;
            if !val.is_zero() {
                m[rank][c] = val * &inv;
            }
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                let pivot_row = m[rank].clone();
                for (c, v) in pivot_row.iter().enumerate() {
                    if !v.is_zero() {
                        let delta = v * &factor;
                        m[r][c] -= delta;
                    }
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut x = vec![BigRational::zero(); cols];
        x[free] = BigRational::one();
        for (col, pr) in pivot_of_col.iter().enumerate() {
            if let Some(r) = pr {
                x[col] = -m[*r][free].clone();
            }
        }
        basis.push(x);
    }
    basis
}

/// Determinant by fraction-clearing Gaussian elimination.
pub fn det_dense(m: &QMatrix) -> BigRational {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n));
    let mut m = m.clone();
    let mut det = BigRational::one();
    for col in 0..n {
        let mut pivot = None;
        for (r, row) in m.iter().enumerate().skip(col) {
            if !row[col].is_zero() {
                pivot = Some(r);
                break;
            }
        }
        let Some(p) = pivot else { return BigRational::zero() };
        if p != col {
            m.swap(col, p);
            det = -det;
        }
        det *= &m[col][col];
        let inv = m[col][col].recip();
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let factor = &m[r][col] * &inv;
                let pivot_row = m[col].clone();
                for (c, v) in pivot_row.iter().enumerate().skip(col) {
                    if !v.is_zero() {
                        let delta = v * &factor;
                        m[r][c] -= delta;
                    }
                }
            }
        }
    }
    det
}

/// Multiply dense matrix by vector.
pub fn matvec(m: &QMatrix, x: &[BigRational]) -> Vec<BigRational> {
    m.iter()
        .map(|row| {
            let mut acc = BigRational::zero();
            for (a, b) in row.iter().zip(x.iter()) {
                if !a.is_zero() && !b.is_zero() {
                    acc += a * b;
                }
            }
            acc
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sparse exact nullspace
// ---------------------------------------------------------------------------

/// Sparse linear system assembled row by row; `nullspace` destroys it.
pub struct SparseSystem {
    pub ncols: usize,
    rows: Vec<BTreeMap<u32, BigRational>>,
}

impl SparseSystem {
    pub fn new(ncols: usize) -> SparseSystem {
        SparseSystem { ncols, rows: Vec::new() }
    }

    pub fn add_row(&mut self, row: BTreeMap<u32, BigRational>) {
        if !row.is_empty() {
            self.rows.push(row);
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    /// Sparse Gauss-Jordan with Markowitz-flavoured pivoting. Returns a
    /// deterministic basis of the solution space as dense vectors.
    pub fn nullspace(mut self) -> Vec<Vec<BigRational>> {
        let ncols = self.ncols;
        self.rows.sort_by_key(|r| r.len());
        self.rows.dedup();
        let nrows = self.rows.len();
        // col -> active row indices
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
        for (ri, row) in self.rows.iter().enumerate() {
            for (&c, _) in row.iter() {
                col_rows[c as usize].push(ri);
            }
        }
        let mut row_active = vec![true; nrows];
        let mut row_pivoted: Vec<Option<u32>> = vec![None; nrows];
        let mut col_pivoted = vec![false; ncols];

        loop {
            // Pick the unpivoted column with fewest active occurrences.
            let mut best: Option<(usize, usize)> = None; // (count, col)
            for c in 0..ncols {
                if col_pivoted[c] {
                    continue;
                }
                col_rows[c].retain(|&ri| row_active[ri] && self.rows[ri].contains_key(&(c as u32)));
                let cnt = col_rows[c]
                    .iter()
                    .filter(|&&ri| row_pivoted[ri].is_none())
                    .count();
                if cnt == 0 {
                    continue;
                }
                if best.map(|(bc, _)| cnt < bc).unwrap_or(true) {
                    best = Some((cnt, c));
                    if cnt == 1 {
                        break;
                    }
                }
            }
            let Some((_, col)) = best else { break };
            // Pivot row: fewest entries; prefer entries of small size.
            let mut pivot_row: Option<usize> = None;
            for &ri in &col_rows[col] {
                if row_pivoted[ri].is_some() {
                    continue;
                }
                let better = match pivot_row {
                    None => true,
                    Some(p) => {
                        let a = (self.rows[ri].len(), entry_size(&self.rows[ri][&(col as u32)]));
                        let b = (self.rows[p].len(), entry_size(&self.rows[p][&(col as u32)]));
                        a < b
                    }
                };
                if better {
                    pivot_row = Some(ri);
                }
            }
            let pr = pivot_row.expect("column with count > 0 has an unpivoted row");
            // Normalize pivot row.
            let pivot_val = self.rows[pr][&(col as u32)].clone();
            if !pivot_val.is_one() {
                let inv = pivot_val.recip();
                let row = std::mem::take(&mut self.rows[pr]);
                self.rows[pr] = row.into_iter().map(|(c, v)| (c, v * &inv)).collect();
            }
            // Eliminate from every other row containing this column.
            let touch: Vec<usize> = col_rows[col]
                .iter()
                .copied()
                .filter(|&ri| ri != pr && row_active[ri])
                .collect();
            let pivot_entries: Vec<(u32, BigRational)> =
                self.rows[pr].iter().map(|(c, v)| (*c, v.clone())).collect();
            for ri in touch {
                let Some(factor) = self.rows[ri].get(&(col as u32)).cloned() else { continue };
                for (c, v) in &pivot_entries {
                    let delta = v * &factor;
                    let slot = self.rows[ri].entry(*c).or_insert_with(BigRational::zero);
                    *slot -= delta;
                    if slot.is_zero() {
                        self.rows[ri].remove(c);
                    } else if *c != col as u32 && !col_rows[*c as usize].contains(&ri) {
                        col_rows[*c as usize].push(ri);
                    }
                }
                self.rows[ri].remove(&(col as u32));
                if self.rows[ri].is_empty() {
                    row_active[ri] = false;
                }
            }
            row_pivoted[pr] = Some(col as u32);
            col_pivoted[col] = true;
        }

        // Free columns generate the solution space; pivot rows now touch
        // only their pivot column and free columns.
        let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; ncols];
        for (ri, p) in row_pivoted.iter().enumerate() {
            if let Some(c) = p {
                pivot_row_of_col[*c as usize] = Some(ri);
            }
        }
        let mut basis = Vec::new();
        for free in 0..ncols {
            if col_pivoted[free] {
                continue;
            }
            let mut x = vec![BigRational::zero(); ncols];
            x[free] = BigRational::one();
            for c in 0..ncols {
                if let Some(ri) = pivot_row_of_col[c] {
                    if let Some(v) = self.rows[ri].get(&(free as u32)) {
                        x[c] = -v.clone();
                    }
                }
            }
            basis.push(x);
        }
        basis
    }
}

// ---------------------------------------------------------------------------
// Prime-field ranks
// ---------------------------------------------------------------------------

pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime p >= lo with p = 1 (mod m).
pub fn prime_one_mod(m: u64, lo: u64) -> u64 {
    let mut k = (lo.saturating_sub(1)) / m + 1;
    loop {
        let cand = k * m + 1;
        if cand > lo && is_prime_u64(cand) {
            return cand;
        }
        k += 1;
    }
}

/// Rank of a dense matrix over F_p. This is a certified lower bound for the
/// rational rank of an integer matrix reduced mod p.
pub fn rank_mod_p(m: &mut Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut rank = 0;
    for col in 0..cols {
        let mut pivot = None;
        for (r, row) in m.iter().enumerate().skip(rank) {
            if row[col] % p != 0 {
                pivot = Some(r);
                break;
            }
        }
        let Some(pvt) = pivot else { continue };
        m.swap(rank, pvt);
        let inv = inv_mod(m[rank][col] % p, p);
        for r in rank + 1..rows {
            let v = m[r][col] % p;
            if v != 0 {
                let factor = mul_mod(v, inv, p);
                let (head, tail) = m.split_at_mut(rank + 1);
                let src = &head[rank];
                let dst = &mut tail[r - rank - 1];
                for c in col..cols {
                    let sub = mul_mod(factor, src[c] % p, p);
                    dst[c] = (dst[c] % p + p - sub) % p;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::int;

    fn q(rows: &[&[i64]]) -> QMatrix {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn dense_rank_and_kernel() {
        let m = q(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank_dense(&m), 2);
        let k = kernel_dense(&m);
        assert_eq!(k.len(), 1);
        for x in &k {
            for v in matvec(&m, x) {
                assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn dense_det() {
        let m = q(&[&[2, 1], &[1, 2]]);
        assert_eq!(det_dense(&m), int(3));
        let s = q(&[&[1, 2], &[2, 4]]);
        assert!(det_dense(&s).is_zero());
    }

    #[test]
    fn sparse_nullspace_matches_dense() {
        let dense = q(&[&[1, 2, 0, 1], &[0, 1, 1, 0], &[1, 3, 1, 1]]);
        let mut sys = SparseSystem::new(4);
        for row in &dense {
            let mut r = BTreeMap::new();
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    r.insert(c as u32, v.clone());
                }
            }
            sys.add_row(r);
        }
        let basis = sys.nullspace();
        let dense_basis = kernel_dense(&dense);
        assert_eq!(basis.len(), dense_basis.len());
        for x in &basis {
            for v in matvec(&dense, x) {
                assert!(v.is_zero());
            }
        }
    }

    #[test]
    fn primes_and_modular_rank() {
        assert!(is_prime_u64(1_000_000_007));
        assert!(!is_prime_u64(1_000_000_006));
        let p = prime_one_mod(72, 1 << 40);
        assert!(is_prime_u64(p) && p % 72 == 1);
        let mut m = vec![vec![1u64, 2, 3], vec![2, 4, 6], vec![1, 0, 1]];
        assert_eq!(rank_mod_p(&mut m, 1_000_003), 2);
    }
}
