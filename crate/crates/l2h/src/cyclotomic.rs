//! Exact arithmetic in cyclotomic fields Q(zeta_n) = Q[x]/Phi_n(x) and
//! Gaussian elimination over them. Used to decompose group-algebra ranks of
//! abelian quotients character by character without materializing the big
//! induced matrices.

use num::{BigInt, BigRational, One, Zero};

/// Dense polynomial with rational coefficients, lowest degree first.
pub type Poly = Vec<BigRational>;

fn poly_trim(p: &mut Poly) {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    poly_trim(&mut out);
    out
}

fn poly_divmod(num: &Poly, den: &Poly) -> (Poly, Poly) {
    assert!(!den.is_empty());
    let mut rem = num.clone();
    poly_trim(&mut rem);
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    let mut quot: Poly = Vec::new();
    while rem.len() > dd {
        let k = rem.len() - 1 - dd;
        let c = &rem[rem.len() - 1] / &lead;
        if quot.len() < k + 1 {
            quot.resize(k + 1, BigRational::zero());
        }
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            let delta = d * &c;
            rem[k + i] -= delta;
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    poly_trim(&mut quot);
    (quot, rem)
}

/// n-th cyclotomic polynomial via (x^n - 1) / prod_{d|n, d<n} Phi_d.
pub fn cyclotomic_poly(n: usize) -> Poly {
    assert!(n >= 1);
    let mut acc = {
        let mut xn1 = vec![BigRational::zero(); n + 1];
        xn1[0] = -BigRational::one();
        xn1[n] = BigRational::one();
        xn1
    };
    for d in 1..n {
        if n % d == 0 {
            let phi_d = cyclotomic_poly(d);
            let (q, r) = poly_divmod(&acc, &phi_d);
            assert!(r.is_empty(), "cyclotomic division must be exact");
            acc = q;
        }
    }
    acc
}

pub fn euler_phi(n: usize) -> usize {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// The field Q(zeta_n). Elements are residues mod Phi_n of degree < phi(n).
#[derive(Debug, Clone)]
pub struct CycField {
    pub n: usize,
    pub phi: usize,
    modulus: Poly,
}

pub type CycElem = Poly;

impl CycField {
    pub fn new(n: usize) -> CycField {
        let modulus = cyclotomic_poly(n);
        CycField { n, phi: modulus.len() - 1, modulus }
    }

    pub fn zero(&self) -> CycElem {
        Vec::new()
    }

    pub fn one(&self) -> CycElem {
        vec![BigRational::one()]
    }

    pub fn from_rational(&self, q: BigRational) -> CycElem {
        if q.is_zero() {
            Vec::new()
        } else {
            vec![q]
        }
    }

    /// zeta_n^k reduced mod Phi_n.
    pub fn zeta_pow(&self, k: usize) -> CycElem {
        let k = k % self.n;
        let mut p = vec![BigRational::zero(); k + 1];
        p[k] = BigRational::one();
        self.reduce(p)
    }

    fn reduce(&self, mut p: Poly) -> CycElem {
        poly_trim(&mut p);
        if p.len() <= self.phi {
            return p;
        }
        let (_, r) = poly_divmod(&p, &self.modulus);
        r
    }

    pub fn add(&self, a: &CycElem, b: &CycElem) -> CycElem {
        let mut out = vec![BigRational::zero(); a.len().max(b.len())];
        for (i, v) in a.iter().enumerate() {
            out[i] += v;
        }
        for (i, v) in b.iter().enumerate() {
            out[i] += v;
        }
        poly_trim(&mut out);
        out
    }

    pub fn sub(&self, a: &CycElem, b: &CycElem) -> CycElem {
        let mut out = vec![BigRational::zero(); a.len().max(b.len())];
        for (i, v) in a.iter().enumerate() {
            out[i] += v;
        }
        for (i, v) in b.iter().enumerate() {
            out[i] -= v;
        }
        poly_trim(&mut out);
        out
    }

    pub fn mul(&self, a: &CycElem, b: &CycElem) -> CycElem {
        self.reduce(poly_mul(a, b))
    }

    pub fn is_zero(&self, a: &CycElem) -> bool {
        a.is_empty()
    }

    /// Inverse by the extended Euclidean algorithm in Q[x] mod Phi_n.
    pub fn inv(&self, a: &CycElem) -> CycElem {
        assert!(!a.is_empty(), "division by zero in cyclotomic field");
        let mut r0 = self.modulus.clone();
        let mut r1 = a.clone();
        let mut t0: Poly = Vec::new();
        let mut t1: Poly = vec![BigRational::one()];
        while !r1.is_empty() {
            let (q, r) = poly_divmod(&r0, &r1);
            let t = {
                let qt1 = poly_mul(&q, &t1);
                let mut out = vec![BigRational::zero(); t0.len().max(qt1.len())];
                for (i, v) in t0.iter().enumerate() {
                    out[i] += v;
                }
                for (i, v) in qt1.iter().enumerate() {
                    out[i] -= v;
                }
                poly_trim(&mut out);
                out
            };
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        assert_eq!(r0.len(), 1, "gcd with irreducible modulus must be constant");
        let inv_gcd = r0[0].recip();
        let mut out: Poly = t0.into_iter().map(|c| c * &inv_gcd).collect();
        poly_trim(&mut out);
        self.reduce(out)
    }

    /// Rank of a matrix over Q(zeta_n) by Gaussian elimination.
    pub fn rank(&self, m: &[Vec<CycElem>]) -> usize {
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut m: Vec<Vec<CycElem>> = m.to_vec();
        let mut rank = 0;
        for col in 0..cols {
            let mut pivot = None;
            for (r, row) in m.iter().enumerate().skip(rank) {
                if !self.is_zero(&row[col]) {
                    pivot = Some(r);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            m.swap(rank, p);
            let inv = self.inv(&m[rank][col]);
            for r in rank + 1..rows {
                if !self.is_zero(&m[r][col]) {
                    let factor = self.mul(&m[r][col], &inv);
                    let pivot_row = m[rank].clone();
                    for c in col..cols {
                        let delta = self.mul(&pivot_row[c], &factor);
                        m[r][c] = self.sub(&m[r][c], &delta);
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

    /// Evaluate an element at an n-th root of unity image in F_p, where
    /// p = 1 (mod n) and `omega` has multiplicative order n.
    pub fn eval_mod_p(&self, a: &CycElem, omega: u64, p: u64) -> Option<u64> {
        use crate::linalg::{inv_mod, mul_mod};
        let mut acc = 0u64;
        let mut zpow = 1u64;
        for c in a {
            let num_mod = bigint_mod_u64(c.numer(), p);
            let den_mod = bigint_mod_u64(c.denom(), p);
            if den_mod == 0 {
                return None;
            }
            let val = mul_mod(num_mod, inv_mod(den_mod, p), p);
            acc = (acc + mul_mod(val, zpow, p)) % p;
            zpow = mul_mod(zpow, omega, p);
        }
        Some(acc)
    }
}

pub fn bigint_mod_u64(x: &BigInt, p: u64) -> u64 {
    use num::bigint::Sign;
    let m = (x % BigInt::from(p)).magnitude().to_u64_digits();
    let v = m.first().copied().unwrap_or(0);
    if x.sign() == Sign::Minus && v != 0 {
        p - v
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::int;

    #[test]
    fn cyclotomic_polys() {
        assert_eq!(cyclotomic_poly(1), vec![int(-1), int(1)]);
        assert_eq!(cyclotomic_poly(2), vec![int(1), int(1)]);
        assert_eq!(cyclotomic_poly(4), vec![int(1), int(0), int(1)]);
        assert_eq!(cyclotomic_poly(6), vec![int(1), int(-1), int(1)]);
        assert_eq!(cyclotomic_poly(12).len() - 1, euler_phi(12));
    }

    #[test]
    fn field_arithmetic() {
        let f = CycField::new(5);
        assert_eq!(f.phi, 4);
        let z = f.zeta_pow(1);
        let mut acc = f.one();
        for _ in 0..5 {
            acc = f.mul(&acc, &z);
        }
        assert_eq!(acc, f.one());
        let mut s = f.one();
        for k in 1..5 {
            s = f.add(&s, &f.zeta_pow(k));
        }
        assert!(f.is_zero(&s));
        let x = f.add(&f.one(), &z);
        let xi = f.inv(&x);
        assert_eq!(f.mul(&x, &xi), f.one());
    }

    #[test]
    fn rank_over_cyclotomic() {
        let f = CycField::new(3);
        let z = f.zeta_pow(1);
        // [[1, z], [z^2, 1]]: determinant 1 - z^3 = 0, so rank 1.
        let m = vec![vec![f.one(), z.clone()], vec![f.zeta_pow(2), f.one()]];
        assert_eq!(f.rank(&m), 1);
        let m2 = vec![vec![f.one(), z.clone()], vec![z, f.one()]];
        assert_eq!(f.rank(&m2), 2);
    }

    #[test]
    fn eval_mod_p_consistent() {
        use crate::linalg::{mul_mod, pow_mod, prime_one_mod};
        let n = 12u64;
        let p = prime_one_mod(n, 1 << 30);
        let mut omega = 0;
        for g in 2..200u64 {
            let w = pow_mod(g, (p - 1) / n, p);
            let mut ord = 1;
            let mut acc = w;
            while acc != 1 {
                acc = mul_mod(acc, w, p);
                ord += 1;
            }
            if ord == n {
                omega = w;
                break;
            }
        }
        assert!(omega != 0);
        let f = CycField::new(12);
        // zeta^6 = -1, so zeta^6 + 1 evaluates to 0 mod p.
        let x = f.add(&f.zeta_pow(6), &f.one());
        assert_eq!(f.eval_mod_p(&x, omega, p), Some(0));
    }
}
