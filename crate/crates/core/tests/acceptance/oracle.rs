//! Residue arithmetic for the acceptance oracles. Coefficients are vectors of
//! residues mod `p^M` indexed by q-degree; a plain ring has bound 0.

use padic_polylog::{RingElement, Series, Var};

#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    pub p: u64,
    pub modulus: u128,
    pub bound: usize,
}

pub type Q = Vec<u128>;

pub fn binomial(n: usize, k: usize) -> i128 {
    if k > n {
        return 0;
    }
    let mut b = 1i128;
    for i in 0..k.min(n - k) {
        b = b * (n - i) as i128 / (i as i128 + 1);
    }
    b
}

/// Extended Euclid; `None` when `a` is not invertible.
pub fn inv_mod(a: u128, m: u128) -> Option<u128> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m as i128) as u128)
}

impl Oracle {
    pub fn new(p: u64, m: u32, bound: usize) -> Self {
        Oracle { p, modulus: (p as u128).pow(m), bound }
    }

    pub fn red(&self, x: i128) -> u128 {
        x.rem_euclid(self.modulus as i128) as u128
    }

    pub fn mulm(&self, a: u128, b: u128) -> u128 {
        a * b % self.modulus
    }

    pub fn powm(&self, a: u128, e: u64) -> u128 {
        let mut acc = 1 % self.modulus;
        for _ in 0..e {
            acc = self.mulm(acc, a % self.modulus);
        }
        acc
    }

    pub fn zero(&self) -> Q {
        vec![0; self.bound + 1]
    }

    pub fn int(&self, n: i128) -> Q {
        let mut z = self.zero();
        z[0] = self.red(n);
        z
    }

    pub fn add(&self, a: &Q, b: &Q) -> Q {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.modulus).collect()
    }

    pub fn scale(&self, a: &Q, s: i128) -> Q {
        let s = self.red(s);
        a.iter().map(|x| self.mulm(*x, s)).collect()
    }

    pub fn mul(&self, a: &Q, b: &Q) -> Q {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j <= self.bound {
                    out[i + j] = (out[i + j] + self.mulm(*x, *y)) % self.modulus;
                }
            }
        }
        out
    }

    /// `q^j -> q^(pj)`, dropped past the bound.
    pub fn sigma(&self, a: &Q) -> Q {
        let mut out = self.zero();
        for (j, x) in a.iter().enumerate() {
            let d = j * self.p as usize;
            if d <= self.bound {
                out[d] = *x;
            }
        }
        out
    }

    pub fn element(&self, e: &RingElement) -> Q {
        let mut out = self.zero();
        for (j, c) in e.coefficients().iter().enumerate() {
            out[j] = c.residue() % self.modulus;
        }
        out
    }

    /// Coefficients of a one-variable series.
    pub fn series(&self, s: &Series) -> Vec<Q> {
        (0..=s.order(Var::S)).map(|i| self.element(s.coeff(i))).collect()
    }

    /// Coefficients `[i][j]` of a two-variable series.
    pub fn series2(&self, s: &Series) -> Vec<Vec<Q>> {
        (0..=s.order(Var::S)).map(|i| (0..=s.order(Var::T)).map(|j| self.element(s.coeff2(i, j))).collect()).collect()
    }

    /// `c_i = sum_m a_m C(m, i)`: masses at `0..=N` to coefficients.
    pub fn from_masses(&self, a: &[Q]) -> Vec<Q> {
        let n = a.len() - 1;
        (0..=n)
            .map(|i| (i..=n).fold(self.zero(), |acc, m| self.add(&acc, &self.scale(&a[m], binomial(m, i)))))
            .collect()
    }

    /// `a_m = sum_(i>=m) (-1)^(i-m) C(i, m) c_i`: the inverse binomial transform.
    pub fn masses(&self, c: &[Q]) -> Vec<Q> {
        let n = c.len() - 1;
        (0..=n)
            .map(|m| {
                (m..=n).fold(self.zero(), |acc, i| {
                    let b = binomial(i, m) * if (i - m) % 2 == 0 { 1 } else { -1 };
                    self.add(&acc, &self.scale(&c[i], b))
                })
            })
            .collect()
    }

    /// `psi` through point masses: the mass at `pm` moves to `m`.
    pub fn psi(&self, c: &[Q]) -> Vec<Q> {
        let a = self.masses(c);
        let mut b = vec![self.zero(); a.len()];
        for (m, x) in a.iter().enumerate() {
            if m % self.p as usize == 0 {
                b[m / self.p as usize] = x.clone();
            }
        }
        self.from_masses(&b)
    }

    /// Drops the masses at multiples of `p`.
    pub fn restrict(&self, c: &[Q]) -> Vec<Q> {
        let mut a = self.masses(c);
        for (m, x) in a.iter_mut().enumerate() {
            if m % self.p as usize == 0 {
                *x = self.zero();
            }
        }
        self.from_masses(&a)
    }

    pub fn poly_mul(&self, a: &[Q], b: &[Q], n: usize) -> Vec<Q> {
        let mut out = vec![self.zero(); n + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j <= n {
                    out[i + j] = self.add(&out[i + j], &self.mul(x, y));
                }
            }
        }
        out
    }

    /// `f(g(S)) mod S^(n+1)` by Horner; `g(0) = 0`.
    pub fn compose(&self, f: &[Q], g: &[Q], n: usize) -> Vec<Q> {
        let mut acc = vec![self.zero(); n + 1];
        for c in f.iter().rev() {
            acc = self.poly_mul(&acc, g, n);
            acc[0] = self.add(&acc[0], c);
        }
        acc
    }

    /// `[p](S) = (1+S)^p - 1` up to degree `n`.
    pub fn p_series(&self, n: usize) -> Vec<Q> {
        (0..=n).map(|i| if i == 0 { self.zero() } else { self.int(binomial(self.p as usize, i)) }).collect()
    }
}
