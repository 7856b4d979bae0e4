//! Dense polynomials over prime fields F_p with p < 2^62.

use crate::arith::{add_mod, inv_mod, mul_mod, pow_mod, sub_mod, MulBy};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seedable deterministic generator; identical seeds give identical outputs.
#[derive(Clone, Debug)]
pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform value in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.0.gen_range(0..n)
    }

    fn reseed(&mut self) {
        let s = self.0.next_u64();
        self.0 = ChaCha8Rng::seed_from_u64(s ^ 0x9e37_79b9_7f4a_7c15);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpPoly {
    p: u64,
    c: Vec<u64>,
}

impl FpPoly {
    /// Builds a polynomial from residues low to high; entries are reduced mod p.
    /// The modulus must be below 2^63.
    pub fn new(p: u64, mut c: Vec<u64>) -> Self {
        assert!((2..1 << 63).contains(&p), "modulus {p} out of range");
        for x in c.iter_mut() {
            *x %= p;
        }
        let mut f = FpPoly { p, c };
        f.trim();
        f
    }

    pub fn from_i64(p: u64, c: &[i64]) -> Self {
        FpPoly::new(p, c.iter().map(|&x| (x as i128).rem_euclid(p as i128) as u64).collect())
    }

    pub fn zero(p: u64) -> Self {
        assert!((2..1 << 63).contains(&p), "modulus {p} out of range");
        FpPoly { p, c: Vec::new() }
    }

    pub fn constant(p: u64, a: u64) -> Self {
        FpPoly::new(p, vec![a])
    }

    pub fn x(p: u64) -> Self {
        FpPoly::new(p, vec![0, 1])
    }

    /// ∏ (x − r).
    pub fn from_roots(p: u64, roots: &[u64]) -> Self {
        let mut f = FpPoly::constant(p, 1);
        for &r in roots {
            f = f.mul(&FpPoly::new(p, vec![(p - r % p) % p, 1]));
        }
        f
    }

    fn trim(&mut self) {
        while self.c.last() == Some(&0) {
            self.c.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.c.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lead(&self) -> u64 {
        self.c.last().copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() || self.lead() == 1 {
            return self.clone();
        }
        let inv = inv_mod(self.lead(), self.p).expect("prime modulus");
        self.scale(inv)
    }

    pub fn scale(&self, a: u64) -> Self {
        FpPoly::new(self.p, self.c.iter().map(|&x| mul_mod(x, a, self.p)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| add_mod(self.coeff(i), o.coeff(i), self.p)).collect();
        FpPoly::new(self.p, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| sub_mod(self.coeff(i), o.coeff(i), self.p)).collect();
        FpPoly::new(self.p, c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FpPoly::zero(self.p);
        }
        let p = self.p as u128;
        let n = self.c.len() + o.c.len() - 1;
        let mut out = vec![0u64; n];
        for (k, slot) in out.iter_mut().enumerate() {
            let lo = k.saturating_sub(o.c.len() - 1);
            let hi = k.min(self.c.len() - 1);
            let mut acc: u128 = 0;
            for i in lo..=hi {
                acc += self.c[i] as u128 * o.c[k - i] as u128;
                if acc >= 1 << 126 {
                    acc %= p;
                }
            }
            *slot = (acc % p) as u64;
        }
        FpPoly::new(self.p, out)
    }

    pub fn sqr(&self) -> Self {
        self.mul(self)
    }

    pub fn derivative(&self) -> Self {
        let c = self
            .c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &x)| mul_mod(x, i as u64 % self.p, self.p))
            .collect();
        FpPoly::new(self.p, c)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0;
        for &a in self.c.iter().rev() {
            acc = add_mod(mul_mod(acc, x, self.p), a, self.p);
        }
        acc
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let p = self.p;
        if self.c.len() < d.c.len() {
            return (FpPoly::zero(p), self.clone());
        }
        let inv = inv_mod(d.lead(), p).expect("prime modulus");
        let dn = d.c.len() - 1;
        let mut r = self.c.clone();
        let mut q = vec![0u64; r.len() - dn];
        for k in (0..q.len()).rev() {
            let t = mul_mod(r[k + dn], inv, p);
            q[k] = t;
            if t == 0 {
                continue;
            }
            for (i, &di) in d.c.iter().enumerate().take(dn) {
                r[k + i] = sub_mod(r[k + i], mul_mod(t, di, p), p);
            }
            r[k + dn] = 0;
        }
        r.truncate(dn);
        (FpPoly::new(p, q), FpPoly::new(p, r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    /// Exact quotient by a divisor known to divide.
    pub fn div_exact(&self, d: &Self) -> Self {
        let (q, r) = self.divrem(d);
        debug_assert!(r.is_zero());
        q
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.p != o.p {
            Err(Error::ModulusMismatch)
        } else {
            Ok(())
        }
    }
}

/// Monic greatest common divisor.
pub fn gcd_monic(f: &FpPoly, g: &FpPoly) -> Result<FpPoly> {
    f.check(g)?;
    if f.is_zero() && g.is_zero() {
        return Err(Error::Precondition("gcd of two zero polynomials".into()));
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    Ok(a.monic())
}

fn gcd(f: &FpPoly, g: &FpPoly) -> FpPoly {
    gcd_monic(f, g).expect("same modulus")
}

/// `base^e mod f` by square-and-multiply.
pub fn powmod_quotient(base: &FpPoly, e: &BigUint, f: &FpPoly) -> Result<FpPoly> {
    base.check(f)?;
    if f.deg() < 1 {
        return Err(Error::Precondition("modulus of degree < 1".into()));
    }
    let base = base.rem(f);
    let mut r = FpPoly::constant(f.p, 1).rem(f);
    for i in (0..e.bits()).rev() {
        r = r.sqr().rem(f);
        if e.bit(i) {
            r = r.mul(&base).rem(f);
        }
    }
    Ok(r)
}

pub(crate) fn powmod_u64(base: &FpPoly, e: u64, f: &FpPoly) -> FpPoly {
    powmod_quotient(base, &BigUint::from(e), f).expect("same modulus")
}

/// gcd(f, x^p − x), the product of the distinct linear factors of f.
pub(crate) fn linear_part(f: &FpPoly) -> FpPoly {
    let p = f.p;
    let f = f.monic();
    if f.deg() < 1 {
        return FpPoly::constant(p, 1);
    }
    let xp = powmod_u64(&FpPoly::x(p), p, &f);
    gcd(&f, &xp.sub(&FpPoly::x(p)))
}

/// Number of distinct roots of f in F_p.
pub fn count_rational_roots(f: &FpPoly) -> usize {
    if f.is_zero() {
        return 0;
    }
    linear_part(f).deg().max(0) as usize
}

pub fn is_squarefree(f: &FpPoly) -> bool {
    if f.deg() < 1 {
        return true;
    }
    gcd(f, &f.derivative()).deg() == 0
}

/// Squarefree part f / gcd(f, f′); valid when every multiplicity is below p.
pub(crate) fn squarefree_part(f: &FpPoly) -> FpPoly {
    let g = gcd(f, &f.derivative());
    f.monic().div_exact(&g)
}

/// All roots of f in F_p, sorted ascending.
pub fn find_roots(f: &FpPoly, rng: &mut Rng) -> Vec<u64> {
    let p = f.p;
    if f.deg() < 1 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    if p == 2 {
        roots.extend((0..2).filter(|&x| f.eval(x) == 0));
        return roots;
    }
    let g = linear_part(f);
    split_linear(&g, rng, &mut roots);
    roots.sort_unstable();
    roots
}

/// Roots of a product of distinct linear factors.
pub(crate) fn split_linear(g: &FpPoly, rng: &mut Rng, out: &mut Vec<u64>) {
    let p = g.p;
    let n = g.deg();
    if n < 1 {
        return;
    }
    if n == 1 {
        let g = g.monic();
        out.push((p - g.coeff(0)) % p);
        return;
    }
    let cap = 8 * (usize::BITS - (n as usize).leading_zeros()).max(1) as usize;
    let mut tries = 0;
    loop {
        let delta = rng.below(p);
        let shifted = FpPoly::new(p, vec![delta, 1]);
        let h = powmod_u64(&shifted, (p - 1) / 2, g).sub(&FpPoly::constant(p, 1));
        let k = gcd(g, &h);
        if k.deg() > 0 && k.deg() < n {
            let rest = g.monic().div_exact(&k);
            split_linear(&k, rng, out);
            split_linear(&rest, rng, out);
            return;
        }
        tries += 1;
        if tries >= cap {
            rng.reseed();
            tries = 0;
        }
    }
}

/// Distinct-degree factorization of a squarefree polynomial: (degree, product) pairs.
pub fn distinct_degree_factors(f: &FpPoly) -> Vec<(usize, FpPoly)> {
    let p = f.p;
    let mut out = Vec::new();
    let mut f = f.monic();
    let x = FpPoly::x(p);
    let mut h = x.clone();
    let mut d = 1;
    while f.deg() >= 2 * d as isize {
        h = powmod_u64(&h, p, &f);
        let g = gcd(&f, &h.sub(&x));
        if g.deg() > 0 {
            f = f.div_exact(&g);
            h = h.rem(&f);
            out.push((d, g));
        }
        d += 1;
    }
    if f.deg() > 0 {
        out.push((f.deg() as usize, f));
    }
    out
}

/// Resultant Res(a, b) over F_p.
pub(crate) fn resultant(a: &FpPoly, b: &FpPoly) -> u64 {
    resultant_slices(&a.c, &b.c, a.p)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Res(f, g) for coefficient slices (constant term first), in place.
pub(crate) fn resultant_slices(f: &[u64], g: &[u64], p: u64) -> u64 {
    let (mut a, mut b) = (f.to_vec(), g.to_vec());
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut r = 1 % p;
    loop {
        let (m, n) = (a.len() - 1, b.len() - 1);
        let lb = b[n];
        if n == 0 {
            return mul_mod(r, pow_mod(lb, m as u64, p), p);
        }
        let inv = inv_mod(lb, p).expect("nonzero leading coefficient");
        for top in (n..=m).rev() {
            let c = mul_mod(inv, a[top], p);
            if c != 0 {
                let mc = MulBy::new(c, p);
                for i in 0..n {
                    a[top - n + i] = sub_mod(a[top - n + i], mc.mul(b[i]), p);
                }
            }
        }
        a.truncate(n);
        trim(&mut a);
        if a.is_empty() {
            return 0;
        }
        let k = a.len() - 1;
        if (m * n) % 2 == 1 && r != 0 {
            r = p - r;
        }
        let e = m - k;
        if e <= 8 {
            for _ in 0..e {
                r = mul_mod(r, lb, p);
            }
        } else {
            r = mul_mod(r, pow_mod(lb, e as u64, p), p);
        }
        std::mem::swap(&mut a, &mut b);
    }
}
