//! Smith normal form over the integers and integral homology of small
//! complexes.

use num::{BigInt, Integer, Signed, Zero};

pub type ZMatrix = Vec<Vec<BigInt>>;

fn is_zero_block(m: &ZMatrix, k: usize) -> bool {
    m.iter().skip(k).all(|row| row.iter().skip(k).all(|v| v.is_zero()))
}

fn find_min_entry(m: &ZMatrix, k: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in m.iter().enumerate().skip(k) {
        for (j, v) in row.iter().enumerate().skip(k) {
            if !v.is_zero() {
                let better = match best {
                    None => true,
                    Some((bi, bj)) => v.abs() < m[bi][bj].abs(),
                };
                if better {
                    best = Some((i, j));
                }
            }
        }
    }
    best
}

/// Invariant factors d_1 | d_2 | ... of an integer matrix.
pub fn smith_invariants(m: &ZMatrix) -> Vec<BigInt> {
    let mut m = m.clone();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let n = rows.min(cols);
    let mut inv = Vec::new();
    let mut k = 0;
    while k < n {
        if is_zero_block(&m, k) {
            break;
        }
        'reduce: loop {
            let (pi, pj) = find_min_entry(&m, k).unwrap();
            if pi != k {
                m.swap(k, pi);
            }
            if pj != k {
                for row in m.iter_mut() {
                    row.swap(k, pj);
                }
            }
            // Clear column k below the pivot.
            let mut dirty = false;
            for i in k + 1..rows {
                if !m[i][k].is_zero() {
                    let q = BigInt::from(&m[i][k] / &m[k][k]);
                    if !q.is_zero() {
                        for j in k..cols {
                            let sub = &q * &m[k][j];
                            m[i][j] -= sub;
                        }
                    }
                    if !m[i][k].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'reduce;
            }
            // Clear row k to the right of the pivot.
            for j in k + 1..cols {
                if !m[k][j].is_zero() {
                    let q = BigInt::from(&m[k][j] / &m[k][k]);
                    if !q.is_zero() {
                        for i in k..rows {
                            let sub = &q * &m[i][k];
                            m[i][j] -= sub;
                        }
                    }
                    if !m[k][j].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue 'reduce;
            }
            // Divisibility sweep: pivot must divide the rest of the block.
            let pivot = m[k][k].clone();
            for i in k + 1..rows {
                for j in k + 1..cols {
                    if !(&m[i][j] % &pivot).is_zero() {
                        // Add row i to row k and restart the reduction.
                        for j2 in k..cols {
                            let add = m[i][j2].clone();
                            m[k][j2] += add;
                        }
                        continue 'reduce;
                    }
                }
            }
            break;
        }
        let mut d = m[k][k].clone();
        if d.is_negative() {
            d = -d;
        }
        inv.push(d);
        k += 1;
    }
    inv
}

pub fn rank_integer(m: &ZMatrix) -> usize {
    smith_invariants(m).len()
}

/// One homology group as free rank plus torsion coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Homology of a complex of free abelian groups given by boundary matrices
/// `b[k] : C_k -> C_{k-1}` (so `b.len() == dims.len() - 1`, `b[0]` maps
/// C_1 to C_0). Returns H_0, ..., H_top.
pub fn integer_homology(dims: &[usize], boundaries: &[ZMatrix]) -> Vec<AbelianGroup> {
    assert_eq!(boundaries.len() + 1, dims.len());
    let mut out = Vec::new();
    for k in 0..dims.len() {
        let rank_in = if k < boundaries.len() { smith_invariants(&boundaries[k]) } else { Vec::new() };
        let rank_out = if k == 0 { Vec::new() } else { smith_invariants(&boundaries[k - 1]) };
        let free = dims[k] - rank_out.len() - rank_in.len();
        let torsion: Vec<BigInt> = rank_in
            .iter()
            .filter(|d| **d > BigInt::from(1))
            .cloned()
            .collect();
        out.push(AbelianGroup { rank: free, torsion });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(rows: &[&[i64]]) -> ZMatrix {
        rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
    }

    #[test]
    fn smith_small() {
        let m = z(&[&[2, 4], &[6, 8]]);
        let inv = smith_invariants(&m);
        assert_eq!(inv, vec![BigInt::from(2), BigInt::from(4)]);
        let m = z(&[&[1, 0], &[0, 0]]);
        assert_eq!(smith_invariants(&m), vec![BigInt::from(1)]);
    }

    #[test]
    fn smith_known_matrix() {
        let m = z(&[
            &[-6, 111, -36, 6],
            &[5, -672, 210, 74],
            &[0, -255, 81, 24],
            &[-7, 255, -81, -10],
        ]);
        let inv = smith_invariants(&m);
        assert_eq!(inv, vec![BigInt::from(1), BigInt::from(3), BigInt::from(21)]);
    }

    #[test]
    fn circle_homology() {
        // Circle: C_0 = Z, C_1 = Z, boundary 0.
        let h = integer_homology(&[1, 1], &[z(&[&[0]])]);
        assert_eq!(h[0], AbelianGroup { rank: 1, torsion: vec![] });
        assert_eq!(h[1], AbelianGroup { rank: 1, torsion: vec![] });
    }

    #[test]
    fn projective_plane_homology() {
        // <a | a^2> augmented: b1 = (0), b2 = (2).
        let h = integer_homology(&[1, 1, 1], &[z(&[&[0]]), z(&[&[2]])]);
        assert_eq!(h[0].describe(), "Z");
        assert_eq!(h[1].describe(), "Z/2");
        assert_eq!(h[2].describe(), "0");
    }
}
