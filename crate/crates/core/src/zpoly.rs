//! Dense univariate and sparse bivariate polynomials over Z.

use crate::arith::{add_mod, inv_mod, mul_mod, pow_mod, prev_prime, sub_mod, MulBy};
use crate::error::{Error, Result};
use crate::ffpoly::{self, FpPoly};
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    c: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut c: Vec<BigInt>) -> Self {
        while c.last().map_or(false, |x| x.is_zero()) {
            c.pop();
        }
        IntPoly { c }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        IntPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { c: Vec::new() }
    }

    pub fn one() -> Self {
        IntPoly::from_i64(&[1])
    }

    pub fn x() -> Self {
        IntPoly::from_i64(&[0, 1])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.c
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.c.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, −1 for the zero polynomial.
    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    pub fn lead(&self) -> BigInt {
        self.c.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.c.last().map_or(false, |x| x.is_one())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.c.len().max(o.c.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        IntPoly::new(self.c.iter().map(|x| -x).collect())
    }

    pub fn scale(&self, a: &BigInt) -> Self {
        IntPoly::new(self.c.iter().map(|x| x * a).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut r = IntPoly::one();
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self) -> Self {
        IntPoly::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, x)| x * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for a in self.c.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for a in &self.c {
            g = g.gcd(a);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Natural log of the largest absolute coefficient.
    pub fn height(&self) -> f64 {
        self.c.iter().map(ln_abs).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Upper bound on log2 of the largest absolute coefficient.
    pub fn max_bits(&self) -> u64 {
        self.c.iter().map(|x| x.bits()).max().unwrap_or(0)
    }

    /// Polynomial with x replaced by −x.
    pub fn reflect(&self) -> Self {
        IntPoly::new(
            self.c
                .iter()
                .enumerate()
                .map(|(i, x)| if i % 2 == 1 { -x } else { x.clone() })
                .collect(),
        )
    }
}

/// ln |x| for a nonzero big integer, accurate to double precision.
pub fn ln_abs(x: &BigInt) -> f64 {
    let b = x.bits();
    if b <= 1000 {
        return x.to_f64().unwrap().abs().ln();
    }
    let shift = b - 64;
    let top = (x.magnitude() >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

fn fmt_term(f: &mut fmt::Formatter<'_>, c: &BigInt, i: usize, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    let mag = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, " {} ", if neg { "-" } else { "+" })?;
    }
    let var = match i {
        0 => String::new(),
        1 => "X".to_string(),
        _ => format!("X^{i}"),
    };
    if i == 0 {
        write!(f, "{mag}")
    } else if mag.is_one() {
        write!(f, "{var}")
    } else {
        write!(f, "{mag}*{var}")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..self.c.len()).rev() {
            if self.c[i].is_zero() {
                continue;
            }
            fmt_term(f, &self.c[i], i, first)?;
            first = false;
        }
        Ok(())
    }
}

/// Q with numerator = Q·divisor over Z.
pub fn exact_divide(num: &IntPoly, div: &IntPoly) -> Result<IntPoly> {
    if div.is_zero() {
        return Err(Error::ZeroDivisor);
    }
    if num.is_zero() {
        return Ok(IntPoly::zero());
    }
    if num.deg() < div.deg() {
        return Err(Error::NotDivisible);
    }
    let dn = div.degree();
    let lc = div.lead();
    let mut r = num.c.clone();
    let mut q = vec![BigInt::zero(); r.len() - dn];
    for k in (0..q.len()).rev() {
        let top = std::mem::take(&mut r[k + dn]);
        if top.is_zero() {
            continue;
        }
        let (t, rem) = top.div_rem(&lc);
        if !rem.is_zero() {
            return Err(Error::NotDivisible);
        }
        for i in 0..dn {
            if !div.c[i].is_zero() {
                r[k + i] -= &t * &div.c[i];
            }
        }
        q[k] = t;
    }
    if r[..dn].iter().any(|x| !x.is_zero()) {
        return Err(Error::NotDivisible);
    }
    Ok(IntPoly::new(q))
}

/// Largest k with H^k | G.
pub fn multiplicity(g: &IntPoly, h: &IntPoly) -> usize {
    assert!(h.deg() >= 1 && !g.is_zero(), "multiplicity precondition");
    let mut k = 0;
    let mut cur = g.clone();
    while let Ok(q) = exact_divide(&cur, h) {
        k += 1;
        cur = q;
    }
    k
}

pub fn big_mod(x: &BigInt, p: u64) -> u64 {
    let r = (x.magnitude() % p).to_u64().unwrap();
    if x.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

pub fn reduce_mod_p(h: &IntPoly, p: u64) -> FpPoly {
    FpPoly::new(p, h.c.iter().map(|x| big_mod(x, p)).collect())
}

/// Sparse map (degX, degY) → coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiIntPoly {
    terms: BTreeMap<(usize, usize), BigInt>,
    deg_x: usize,
    deg_y: usize,
}

impl BiIntPoly {
    pub fn new() -> Self {
        BiIntPoly::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((usize, usize), BigInt)>>(it: I) -> Self {
        let mut b = BiIntPoly::new();
        for ((i, j), c) in it {
            b.add_term(i, j, c);
        }
        b
    }

    pub fn add_term(&mut self, i: usize, j: usize, c: BigInt) {
        let e = self.terms.entry((i, j)).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
            self.recompute_degrees();
        } else {
            self.deg_x = self.deg_x.max(i);
            self.deg_y = self.deg_y.max(j);
        }
    }

    fn recompute_degrees(&mut self) {
        self.deg_x = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        self.deg_y = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
    }

    pub fn terms(&self) -> &BTreeMap<(usize, usize), BigInt> {
        &self.terms
    }

    pub fn coeff(&self, i: usize, j: usize) -> BigInt {
        self.terms.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn deg_x(&self) -> usize {
        self.deg_x
    }

    pub fn deg_y(&self) -> usize {
        self.deg_y
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficients in Y as polynomials in X: result[k] is the X-polynomial of Y^k.
    pub fn y_slices(&self) -> Vec<IntPoly> {
        let mut rows = vec![vec![BigInt::zero(); self.deg_x + 1]; self.deg_y + 1];
        for (&(i, j), c) in &self.terms {
            rows[j][i] = c.clone();
        }
        rows.into_iter().map(IntPoly::new).collect()
    }

    pub fn l1_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }
}

/// Per-prime residues of a bivariate polynomial, grouped by Y-degree.
pub(crate) struct BiResidues {
    p: u64,
    slices: Vec<Vec<u64>>,
}

impl BiResidues {
    pub(crate) fn new(a: &BiIntPoly, p: u64) -> Self {
        let mut slices = vec![vec![0u64; a.deg_x + 1]; a.deg_y + 1];
        for (&(i, j), c) in &a.terms {
            slices[j][i] = big_mod(c, p);
        }
        BiResidues { p, slices }
    }

    /// A(x, Y) mod p.
    pub(crate) fn at_x(&self, x: u64) -> FpPoly {
        let p = self.p;
        let c = self
            .slices
            .iter()
            .map(|row| {
                let mut acc = 0u64;
                for &a in row.iter().rev() {
                    acc = ((acc as u128 * x as u128 + a as u128) % p as u128) as u64;
                }
                acc
            })
            .collect();
        FpPoly::new(p, c)
    }
}

/// Res_Y(A, B) mod p as a polynomial in X, or `None` when p divides lc(B).
pub(crate) fn resultant_bivariate_mod(a: &BiResidues, m: usize, b: &FpPoly, n: usize, dx: usize) -> Option<FpPoly> {
    let p = a.p;
    if b.deg() != n as isize {
        return None;
    }
    let npts = dx * n + 1;
    if npts as u64 >= p {
        return None;
    }
    let sign_flip = (m * n) % 2 == 1;
    let vals = if b.lead() == 1 { monic_values(a, b, npts) } else { generic_values(a, m, b, npts) };
    let vals = vals.into_iter().map(|v| if sign_flip && v != 0 { p - v } else { v }).collect::<Vec<_>>();
    Some(interpolate_consecutive(&vals, p))
}

/// Res(B, A(x, Y)) at x = 0..npts for any B with lc(B) ≠ 0.
fn generic_values(a: &BiResidues, m: usize, b: &FpPoly, npts: usize) -> Vec<u64> {
    let p = a.p;
    (0..npts as u64)
        .map(|x| {
            let ax = a.at_x(x);
            if ax.is_zero() {
                return 0;
            }
            let core = ffpoly::resultant(b, &ax);
            mul_mod(core, pow_mod(b.lead(), m as u64 - ax.deg() as u64, p), p)
        })
        .collect()
}

/// Same for monic B: reduce every X-slice of A modulo B once, so each point
/// only needs deg B coefficients. Res(B, A) = ∏ A(β) = Res(B, A mod B).
fn monic_values(a: &BiResidues, b: &FpPoly, npts: usize) -> Vec<u64> {
    let p = a.p;
    let n = b.deg() as usize;
    let dx = a.slices.first().map_or(0, |r| r.len().saturating_sub(1));
    // red[i] = (Σ_j a_ij Y^j) mod B
    let red: Vec<Vec<u64>> = (0..=dx)
        .map(|i| {
            let col: Vec<u64> = a.slices.iter().map(|row| row[i]).collect();
            let r = FpPoly::new(p, col).rem(b);
            let mut v = r.coeffs().to_vec();
            v.resize(n, 0);
            v
        })
        .collect();
    let mut acc = vec![0u64; n];
    (0..npts as u64)
        .map(|x| {
            let mx = MulBy::new(x % p, p);
            acc.iter_mut().for_each(|c| *c = 0);
            for row in red.iter().rev() {
                for (c, &r) in acc.iter_mut().zip(row) {
                    *c = add_mod(mx.mul(*c), r, p);
                }
            }
            ffpoly::resultant_slices(b.coeffs(), &acc, p)
        })
        .collect()
}

/// Interpolates values at x = 0, 1, …, n−1.
pub(crate) fn interpolate_consecutive(vals: &[u64], p: u64) -> FpPoly {
    let n = vals.len();
    let mut dd = vals.to_vec();
    for k in 1..n {
        let inv = MulBy::new(inv_mod(k as u64, p).expect("small k"), p);
        for i in (k..n).rev() {
            dd[i] = inv.mul(sub_mod(dd[i], dd[i - 1], p));
        }
    }
    // Newton form in the nodes 0..n-1 to monomial basis, in place:
    // poly ← poly·(x − k) + dd[k]
    let mut poly = vec![0u64; n];
    for (len, k) in (0..n).rev().enumerate() {
        let xk = MulBy::new(k as u64 % p, p);
        for i in (0..=len.min(n - 1)).rev() {
            let hi = if i == 0 { 0 } else { poly[i - 1] };
            poly[i] = sub_mod(hi, xk.mul(poly[i]), p);
        }
        poly[0] = add_mod(poly[0], dd[k], p);
    }
    FpPoly::new(p, poly)
}

/// Chinese remaindering of coefficient vectors in mixed radix (Garner), so
/// that adding a prime costs only word operations.
pub(crate) struct Crt {
    primes: Vec<u64>,
    /// digits[i][k]: k-th mixed-radix digit of coefficient i
    digits: Vec<Vec<u64>>,
    bits: f64,
}

impl Crt {
    pub(crate) fn new(len: usize) -> Self {
        Crt { primes: Vec::new(), digits: vec![Vec::new(); len], bits: 0.0 }
    }

    pub(crate) fn add(&mut self, res: &FpPoly) {
        let p = res.modulus();
        // prefix[k] = q_0⋯q_{k−1} mod p
        let mut prefix = Vec::with_capacity(self.primes.len() + 1);
        let mut acc = 1 % p;
        prefix.push(acc);
        for &q in &self.primes {
            acc = mul_mod(acc, q % p, p);
            prefix.push(acc);
        }
        let minv = MulBy::new(inv_mod(acc, p).expect("coprime moduli"), p);
        for (i, d) in self.digits.iter_mut().enumerate() {
            let mut cur = 0u64;
            for (ds, ps) in d.chunks(8).zip(prefix.chunks(8)) {
                let s: u128 = ds.iter().zip(ps).map(|(&x, &y)| x as u128 * y as u128).sum();
                cur = add_mod(cur, (s % p as u128) as u64, p);
            }
            d.push(minv.mul(sub_mod(res.coeff(i), cur, p)));
        }
        self.primes.push(p);
        self.bits += (p as f64).log2();
    }

    /// Lower bound on log2 of the modulus.
    pub(crate) fn modulus_bits(&self) -> u64 {
        (self.bits - 1.0).max(0.0).floor() as u64
    }

    /// Symmetric lift into (−M/2, M/2].
    pub(crate) fn finish(self) -> IntPoly {
        let modulus: BigInt = self.primes.iter().fold(BigInt::one(), |m, &q| m * q);
        let half = &modulus >> 1;
        let lift = |d: &[u64]| {
            let mut v = BigInt::zero();
            for (k, &x) in d.iter().enumerate().rev() {
                v *= self.primes[k];
                v += x;
            }
            if v > half {
                v - &modulus
            } else {
                v
            }
        };
        IntPoly::new(self.digits.iter().map(|d| lift(d)).collect())
    }
}

/// Iterator over primes descending from 2^62.
pub(crate) fn word_primes() -> impl Iterator<Item = u64> {
    let mut cur = 1u64 << 62;
    std::iter::from_fn(move || {
        cur = prev_prime(cur)?;
        Some(cur)
    })
}

fn l2_bits(b: &IntPoly) -> u64 {
    let s: BigInt = b.c.iter().map(|x| x * x).sum();
    (s.bits() + 1) / 2
}

/// Res_Y(A(X,Y), B(Y)) with the rows of A first in the Sylvester matrix.
pub fn resultant_bivariate(a: &BiIntPoly, b: &IntPoly) -> IntPoly {
    assert!(!a.is_zero() && a.deg_y() >= 1, "A needs positive Y-degree");
    assert!(b.deg() >= 1, "B must be nonconstant");
    let m = a.deg_y();
    let n = b.degree();
    let dx = a.deg_x();
    let bound = n as u64 * a.l1_norm().bits() + m as u64 * l2_bits(b) + 2;
    let mut crt = Crt::new(dx * n + 1);
    for q in word_primes() {
        if crt.modulus_bits() > bound {
            break;
        }
        let bq = reduce_mod_p(b, q);
        let aq = BiResidues::new(a, q);
        if let Some(g) = resultant_bivariate_mod(&aq, m, &bq, n, dx) {
            crt.add(&g);
        }
    }
    crt.finish()
}

/// Degrees and leading coefficients of the subresultant PRS of (a, b) over
/// F_q (Brown–Traub normalization). A zero remainder is recorded as degree −1.
fn subresultant_leads(a: &FpPoly, b: &FpPoly) -> Vec<(isize, u64)> {
    let q = a.modulus();
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut out = vec![(a.deg(), a.lead()), (b.deg(), b.lead())];
    let (mut g, mut h) = (1u64, 1u64);
    while b.deg() > 0 {
        let delta = (a.deg() - b.deg()) as u64;
        let r = a.rem(&b).scale(pow_mod(b.lead(), delta + 1, q));
        if r.is_zero() {
            out.push((-1, 0));
            break;
        }
        let beta = mul_mod(g, pow_mod(h, delta, q), q);
        let r = r.scale(inv_mod(beta, q).expect("β is a unit for lucky primes"));
        out.push((r.deg(), r.lead()));
        a = b;
        b = r;
        g = a.lead();
        h = if delta == 0 {
            h
        } else {
            mul_mod(pow_mod(g, delta, q), inv_mod(pow_mod(h, delta - 1, q), q).expect("unit"), q)
        };
    }
    out
}

/// Signs of integers given by residues, value v known to satisfy
/// |x_v| < M_v/2 with M_v the product of the first `need[v]` moduli.
/// All values share one Garner pass; digits are stored per prime so the
/// inner loop runs over contiguous memory.
fn crt_signs(residues: &[Vec<u64>], need: &[usize], primes: &[u64]) -> Vec<i32> {
    let mut order: Vec<usize> = (0..need.len()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(need[v]));
    let kmax = need.iter().copied().max().unwrap_or(0);
    let mut dig: Vec<Vec<u64>> = Vec::with_capacity(kmax);
    for k in 0..kmax {
        let q = primes[k];
        let act = order.iter().take_while(|&&v| need[v] > k).count();
        let mut acc = vec![0u128; act];
        let mut pre = 1 % q;
        for j in 0..k {
            for (a, &d) in acc.iter_mut().zip(&dig[j][..act]) {
                *a += d as u128 * pre as u128;
            }
            if j % 8 == 7 {
                for a in acc.iter_mut() {
                    *a %= q as u128;
                }
            }
            pre = mul_mod(pre, primes[j] % q, q);
        }
        let inv = inv_mod(pre, q).expect("coprime moduli");
        let row = order[..act]
            .iter()
            .zip(&acc)
            .map(|(&v, &a)| mul_mod(sub_mod(residues[v][k], (a % q as u128) as u64, q), inv, q))
            .collect();
        dig.push(row);
    }
    let mut out = vec![0; need.len()];
    for (t, &v) in order.iter().enumerate() {
        // x > (M − 1)/2, whose digits are (q_k − 1)/2, means x is negative
        let mut sign = 0;
        for k in (0..need[v]).rev() {
            let half = (primes[k] - 1) / 2;
            let d = dig[k][t];
            if d != half {
                sign = if d > half { -1 } else { 1 };
                break;
            }
        }
        out[v] = sign;
    }
    out
}

/// Number of distinct real roots by a Sturm sequence.
///
/// The Sturm polynomials are positive multiples of ± the subresultant PRS of
/// (H, H′), so only the signs of its leading coefficients matter. Those are
/// recovered modulo enough word primes to exceed a Hadamard bound.
pub fn sturm_count(h: &IntPoly) -> Result<usize> {
    if h.is_zero() {
        return Err(Error::Precondition("zero polynomial".into()));
    }
    if h.deg() == 0 {
        return Ok(0);
    }
    let p = primitive(h);
    let dp = p.derivative();
    let n = p.degree();
    if n == 1 {
        return Ok(1);
    }
    let bits_p = l2_bits(&p) as f64;
    let bits_dp = l2_bits(&dp) as f64;
    let bound = |d: isize| -> f64 {
        let d = d.max(0) as f64;
        (n as f64 - 1.0 - d).max(0.0) * bits_p + (n as f64 - d) * bits_dp + 2.0
    };
    let need = bound(0);
    // Collect primes agreeing on the lexicographically largest degree
    // sequence; smaller sequences come from primes dividing a leading
    // coefficient.
    let mut degs: Vec<isize> = Vec::new();
    let mut primes: Vec<u64> = Vec::new();
    let mut leads: Vec<Vec<u64>> = Vec::new();
    let mut have = 0.0f64;
    for q in word_primes() {
        if have > need {
            break;
        }
        let pq = reduce_mod_p(&p, q);
        if pq.deg() != n as isize {
            continue;
        }
        let seq = subresultant_leads(&pq, &reduce_mod_p(&dp, q));
        let d: Vec<isize> = seq.iter().map(|x| x.0).collect();
        match d.cmp(&degs) {
            std::cmp::Ordering::Less => continue,
            std::cmp::Ordering::Greater => {
                degs = d;
                primes.clear();
                leads = vec![Vec::new(); degs.len()];
                have = 0.0;
            }
            std::cmp::Ordering::Equal => {}
        }
        for (l, &(_, c)) in leads.iter_mut().zip(&seq) {
            l.push(c);
        }
        primes.push(q);
        have += (q as f64).log2();
    }
    if degs.last() == Some(&-1) {
        return Err(Error::NotSquarefree);
    }
    // signs of the PRS leading coefficients
    let need: Vec<usize> = degs
        .iter()
        .map(|&d| {
            let (mut k, mut acc) = (0, 0.0);
            while k < primes.len() && acc <= bound(d) {
                acc += (primes[k] as f64).log2();
                k += 1;
            }
            k
        })
        .collect();
    let mut lc_sign = crt_signs(&leads, &need, &primes);
    lc_sign[0] = if p.lead().is_positive() { 1 } else { -1 };
    lc_sign[1] = if dp.lead().is_positive() { 1 } else { -1 };
    // σ_i relates R_i to the Sturm polynomial S_i: R_i = σ_i·(positive)·S_i.
    let mut sigma = vec![1i32, 1];
    let (mut g_sign, mut h_sign) = (1i32, 1i32);
    for i in 2..degs.len() {
        let delta = (degs[i - 2] - degs[i - 1]) as u32;
        let lcb = lc_sign[i - 1].pow(delta + 1);
        let beta = g_sign * h_sign.pow(delta);
        sigma.push(-sigma[i - 2] * lcb * beta);
        g_sign = lc_sign[i - 1];
        if delta > 0 {
            h_sign = g_sign.pow(delta) * h_sign.pow(delta - 1);
        }
    }
    let at_pos: Vec<bool> = (0..degs.len()).map(|i| sigma[i] * lc_sign[i] > 0).collect();
    let at_neg: Vec<bool> = (0..degs.len()).map(|i| (sigma[i] * lc_sign[i] > 0) == (degs[i] % 2 == 0)).collect();
    let changes = |v: &[bool]| v.windows(2).filter(|w| w[0] != w[1]).count();
    Ok(changes(&at_neg) - changes(&at_pos))
}

fn primitive(a: &IntPoly) -> IntPoly {
    let g = a.content();
    if g.is_zero() || g.is_one() {
        return a.clone();
    }
    IntPoly::new(a.c.iter().map(|x| x / &g).collect())
}

/// lc(b)^(δ+1)·a mod b.
#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn exact_divide_examples() {
        assert_eq!(exact_divide(&p(&[-1, 0, 1]), &p(&[1, 1])).unwrap(), p(&[-1, 1]));
        assert_eq!(exact_divide(&p(&[2, 0, 2]), &p(&[2])).unwrap(), p(&[1, 0, 1]));
        assert_eq!(exact_divide(&p(&[1, 0, 1]), &p(&[1, 1])), Err(Error::NotDivisible));
        assert_eq!(exact_divide(&p(&[1]), &IntPoly::zero()), Err(Error::ZeroDivisor));
    }

    #[test]
    fn multiplicity_examples() {
        let g = p(&[1, 1]).pow(2).mul(&p(&[2, 1]));
        assert_eq!(multiplicity(&g, &p(&[1, 1])), 2);
        let h = p(&[5, -3, 0, 1]);
        assert_eq!(multiplicity(&h, &h), 1);
        assert_eq!(multiplicity(&p(&[1, 0, 1]), &p(&[-1, 1])), 0);
    }

    #[test]
    fn resultant_examples() {
        // Y − X against Y² − 2
        let a = BiIntPoly::from_terms([((0, 1), BigInt::from(1)), ((1, 0), BigInt::from(-1))]);
        assert_eq!(resultant_bivariate(&a, &p(&[-2, 0, 1])), p(&[-2, 0, 1]));
        // X·Y − 1 against Y − 2
        let a = BiIntPoly::from_terms([((1, 1), BigInt::from(1)), ((0, 0), BigInt::from(-1))]);
        assert_eq!(resultant_bivariate(&a, &p(&[-2, 1])), p(&[1, -2]));
    }

    #[test]
    fn sturm_examples() {
        assert_eq!(sturm_count(&p(&[1, 0, 1])).unwrap(), 0);
        assert_eq!(sturm_count(&p(&[-2, 0, 1])).unwrap(), 2);
        let h23 = IntPoly::new(
            ["12771880859375", "-5151296875", "3491750", "1"]
                .iter()
                .map(|s| s.parse().unwrap())
                .collect(),
        );
        assert_eq!(sturm_count(&h23).unwrap(), 1);
        assert_eq!(sturm_count(&p(&[1, 2, 1])), Err(Error::NotSquarefree));
        assert_eq!(sturm_count(&p(&[0, -3, 0, 1])).unwrap(), 3);
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce_mod_p(&p(&[-7, 0, 1]), 5), FpPoly::new(5, vec![3, 0, 1]));
        assert_eq!(reduce_mod_p(&p(&[3375, 1]), 7), FpPoly::new(7, vec![1, 1]));
        assert_eq!(reduce_mod_p(&p(&[0, 1, 5]), 5), FpPoly::new(5, vec![0, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-1728, 1]).to_string(), "X - 1728");
        assert_eq!(p(&[-121287375, 191025, 1]).to_string(), "X^2 + 191025*X - 121287375");
        assert_eq!(p(&[0, -1]).to_string(), "-X");
    }

    /// Sign changes of h on the grid k/64, |k| ≤ 64·bound; a lower bound on the real-root count.
    fn grid_sign_changes(h: &IntPoly, bound: i64) -> usize {
        let n = h.degree();
        let sign_at = |k: i64| -> i32 {
            let k = BigInt::from(k);
            let mut acc = BigInt::zero();
            let mut sp = BigInt::one();
            for i in (0..=n).rev() {
                acc = acc * &k + h.coeff(i) * &sp;
                sp *= 64;
            }
            if acc.is_zero() { 0 } else if acc.is_positive() { 1 } else { -1 }
        };
        let mut count = 0;
        let mut prev = sign_at(-64 * bound);
        for k in (-64 * bound + 1)..=(64 * bound) {
            let s = sign_at(k);
            if s == 0 {
                count += 1;
            } else if prev != 0 && s != prev {
                count += 1;
            }
            if s != 0 || prev != 0 {
                prev = s;
            }
        }
        count
    }

    /// Squarefree polynomial of degree ≤ 8 with a known number of real roots.
    fn arb_known_roots() -> impl Strategy<Value = (IntPoly, usize)> {
        (
            prop::collection::btree_set(-40i64..40, 0..=5),
            prop::collection::vec((-6i64..6, 1i64..20), 0..=1),
            1i64..4,
        )
            .prop_map(|(roots, quads, den)| {
                let mut f = IntPoly::one();
                for &r in &roots {
                    f = f.mul(&IntPoly::from_i64(&[-r, den]));
                }
                for &(b, c) in &quads {
                    // x² + bx + c with b² < 4c has no real roots
                    let c = c + b * b;
                    f = f.mul(&IntPoly::from_i64(&[c, b, 1]));
                }
                (f, roots.len())
            })
            .prop_filter("nonconstant", |(f, _)| f.deg() >= 1)
    }

    fn arb_poly(max_deg: usize, max_coef: i64) -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-max_coef..=max_coef, 1..=max_deg + 1).prop_map(|v| IntPoly::from_i64(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn sturm_matches_grid((h, expected) in arb_known_roots()) {
            let count = sturm_count(&h).unwrap();
            prop_assert_eq!(count, expected);
            prop_assert_eq!(grid_sign_changes(&h, 41), expected);
        }

        #[test]
        fn divide_roundtrip(a in arb_poly(6, 1000), b in arb_poly(5, 1000)) {
            prop_assume!(!b.is_zero());
            let prod = a.mul(&b);
            prop_assert_eq!(exact_divide(&prod, &b).unwrap(), a);
        }

        #[test]
        fn multiplicity_additive(g in arb_poly(4, 50), h in arb_poly(3, 20), k in 0u32..=3) {
            prop_assume!(!g.is_zero() && h.deg() >= 1);
            let base = multiplicity(&g, &h);
            prop_assert_eq!(multiplicity(&g.mul(&h.pow(k)), &h), base + k as usize);
        }

        #[test]
        fn monic_path_matches_generic(
            terms in prop::collection::vec(((0usize..5, 0usize..6), 0u64..1_000_000), 1..16),
            b in prop::collection::vec(0u64..1_000_000, 1..5),
            q in 1000u64..1_000_000,
        ) {
            let q = crate::arith::next_prime(q);
            let a = BiIntPoly::from_terms(terms.into_iter().map(|(k, c)| (k, BigInt::from(c))));
            prop_assume!(a.deg_y() >= 1);
            let mut b = b;
            b.push(1);
            let bq = FpPoly::new(q, b);
            let ar = BiResidues::new(&a, q);
            let npts = a.deg_x() * bq.deg() as usize + 1;
            prop_assert_eq!(monic_values(&ar, &bq, npts), generic_values(&ar, a.deg_y(), &bq, npts));
        }

        #[test]
        fn resultant_reduces(
            terms in prop::collection::vec(((0usize..4, 0usize..4), -50i64..50), 1..10),
            b in arb_poly(4, 30),
        ) {
            let a = BiIntPoly::from_terms(terms.into_iter().map(|(k, c)| (k, BigInt::from(c))));
            prop_assume!(a.deg_y() >= 1 && b.deg() >= 1);
            let g = resultant_bivariate(&a, &b);
            for &q in &[10_007u64, 65_537, 1_000_003] {
                if big_mod(&b.lead(), q) == 0 { continue; }
                let direct = resultant_bivariate_mod(&BiResidues::new(&a, q), a.deg_y(), &reduce_mod_p(&b, q), b.degree(), a.deg_x()).unwrap();
                prop_assert_eq!(reduce_mod_p(&g, q), direct);
            }
        }
    }
}
