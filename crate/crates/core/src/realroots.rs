//! Real-root isolation by continued fractions (Vincent–Akritas–Strzeboński).
//!
//! Descartes' rule is applied to Möbius-transformed polynomials. A fast pass
//! runs on interval coefficients with 96-bit mantissas; if any sign it needs
//! is undetermined, the whole isolation is redone with exact integers.

use crate::error::{Error, Result};
use crate::ffpoly::is_squarefree;
use crate::zpoly::{big_mod, reduce_mod_p, sturm_count, word_primes, IntPoly};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// A nonnegative rational `num/den` with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: BigInt,
    pub den: BigInt,
}

impl Ratio {
    fn new(num: BigInt, den: BigInt) -> Self {
        let g = num.gcd(&den);
        let (num, den) = if g.is_one() || g.is_zero() { (num, den) } else { (num / &g, den / &g) };
        if den.is_negative() {
            Ratio { num: -num, den: -den }
        } else {
            Ratio { num, den }
        }
    }

    pub fn neg(&self) -> Self {
        Ratio { num: -&self.num, den: self.den.clone() }
    }

    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        let nb = self.num.bits() as i64;
        let db = self.den.bits() as i64;
        let shift_n = (nb - 60).max(0) as u64;
        let shift_d = (db - 60).max(0) as u64;
        let n = (&self.num >> shift_n).to_f64().unwrap();
        let d = (&self.den >> shift_d).to_f64().unwrap();
        n / d * 2f64.powi(shift_n as i32 - shift_d as i32)
    }

    fn cmp(&self, o: &Ratio) -> Ordering {
        (&self.num * &o.den).cmp(&(&o.num * &self.den))
    }
}

/// An isolating interval: an exact rational root, or an open interval
/// (lo, hi) with `None` standing for −∞ resp. +∞.
#[derive(Clone, Debug)]
pub enum RootInterval {
    Point(Ratio),
    Open(Option<Ratio>, Option<Ratio>),
}

impl RootInterval {
    fn between(x: Ratio, y: Option<Ratio>) -> Self {
        match y {
            None => RootInterval::Open(Some(x), None),
            Some(y) => {
                if x.cmp(&y) == Ordering::Less {
                    RootInterval::Open(Some(x), Some(y))
                } else {
                    RootInterval::Open(Some(y), Some(x))
                }
            }
        }
    }

    fn negate(self) -> Self {
        match self {
            RootInterval::Point(x) => RootInterval::Point(x.neg()),
            RootInterval::Open(lo, hi) => RootInterval::Open(hi.map(|x| x.neg()), lo.map(|x| x.neg())),
        }
    }

    /// Orders disjoint isolating intervals by the root they contain.
    fn order(&self, o: &Self) -> Ordering {
        let key = |r: &RootInterval| match r {
            RootInterval::Point(x) => (Some(x.clone()), 0),
            RootInterval::Open(lo, _) => (lo.clone(), 1),
        };
        let (a, ta) = key(self);
        let (b, tb) = key(o);
        let c = match (a, b) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Less,
            (Some(_), None) => Ordering::Greater,
            (Some(x), Some(y)) => x.cmp(&y),
        };
        c.then(ta.cmp(&tb))
    }
}

trait Coef: Clone {
    fn add(&self, o: &Self) -> Self;
    fn shl(&self, s: u64) -> Self;
    /// self += o·2^s
    fn add_shl(&mut self, o: &Self, s: u64) {
        *self = self.add(&o.shl(s));
    }
    /// Sign if certain.
    fn sign(&self) -> Option<i32>;
    /// Bounds on log2 |x|: (lower, upper), `None` if x may vanish.
    fn log2_bounds(&self) -> Option<(i64, i64)>;
    fn from_big(x: &BigInt) -> Self;
}

impl Coef for BigInt {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn add_shl(&mut self, o: &Self, s: u64) {
        if s == 0 {
            *self += o;
        } else {
            *self += o << s;
        }
    }
    fn shl(&self, s: u64) -> Self {
        self << s
    }
    fn sign(&self) -> Option<i32> {
        Some(if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        })
    }
    fn log2_bounds(&self) -> Option<(i64, i64)> {
        if self.is_zero() {
            return None;
        }
        let b = self.bits() as i64;
        Some((b - 1, b))
    }
    fn from_big(x: &BigInt) -> Self {
        x.clone()
    }
}

const W: u32 = 96;

/// Value in [(m − err)·2^e, (m + err)·2^e].
#[derive(Clone, Copy, Debug)]
struct Approx {
    m: i128,
    e: i64,
    err: u128,
}

impl Approx {
    const ZERO: Approx = Approx { m: 0, e: 0, err: 0 };

    fn is_exact_zero(&self) -> bool {
        self.m == 0 && self.err == 0
    }

    fn norm(mut self) -> Approx {
        if self.is_exact_zero() {
            return Approx::ZERO;
        }
        let a = self.m.unsigned_abs() + self.err;
        let len = 128 - a.leading_zeros();
        if len > W {
            let k = len - W;
            self.m >>= k;
            self.err = ((self.err + (1u128 << k) - 1) >> k) + 1;
            self.e += k as i64;
        } else if len < W {
            let k = W - len;
            self.m <<= k;
            self.err <<= k;
            self.e -= k as i64;
        }
        self
    }

    fn align(&self, e: i64) -> (i128, u128) {
        let k = (e - self.e) as u64;
        if k == 0 {
            return (self.m, self.err);
        }
        if k >= W as u64 + 2 {
            return (0, 1);
        }
        let m = self.m >> k;
        let err = ((self.err + (1u128 << k) - 1) >> k) + 1;
        (m, err)
    }
}

impl Coef for Approx {
    fn add(&self, o: &Self) -> Self {
        if self.is_exact_zero() {
            return *o;
        }
        if o.is_exact_zero() {
            return *self;
        }
        let e = self.e.max(o.e);
        let (m1, r1) = self.align(e);
        let (m2, r2) = o.align(e);
        Approx { m: m1 + m2, e, err: r1 + r2 }.norm()
    }
    fn shl(&self, s: u64) -> Self {
        if self.is_exact_zero() {
            return *self;
        }
        Approx { e: self.e + s as i64, ..*self }
    }
    fn sign(&self) -> Option<i32> {
        if self.is_exact_zero() {
            Some(0)
        } else if self.m > 0 && self.m.unsigned_abs() > self.err {
            Some(1)
        } else if self.m < 0 && self.m.unsigned_abs() > self.err {
            Some(-1)
        } else {
            None
        }
    }
    fn log2_bounds(&self) -> Option<(i64, i64)> {
        let a = self.m.unsigned_abs();
        if a <= self.err {
            return None;
        }
        let lo = a - self.err;
        let hi = a + self.err;
        let lo_bits = 128 - lo.leading_zeros() as i64;
        let hi_bits = 128 - hi.leading_zeros() as i64;
        Some((lo_bits - 1 + self.e, hi_bits + self.e))
    }
    fn from_big(x: &BigInt) -> Self {
        if x.is_zero() {
            return Approx::ZERO;
        }
        let b = x.bits();
        if b <= W as u64 {
            let m: i128 = x.try_into().unwrap();
            return Approx { m, e: 0, err: 0 }.norm();
        }
        let k = b - W as u64;
        let m: i128 = (x >> k).try_into().unwrap();
        let exact = (x.magnitude() & ((num_bigint::BigUint::one() << k) - 1u32)).is_zero();
        Approx { m, e: k as i64, err: if exact { 0 } else { 1 } }.norm()
    }
}

#[derive(Debug)]
struct Undetermined;

/// Möbius map x ↦ (a x + b)/(c x + d).
#[derive(Clone, Debug)]
struct Mobius {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Mobius {
    fn identity() -> Self {
        Mobius { a: BigInt::one(), b: BigInt::zero(), c: BigInt::zero(), d: BigInt::one() }
    }
    /// M(x + 2^s)
    fn shift(&self, s: u64) -> Self {
        Mobius {
            a: self.a.clone(),
            b: (&self.a << s) + &self.b,
            c: self.c.clone(),
            d: (&self.c << s) + &self.d,
        }
    }
    /// M(1/(x + 1))
    fn invert(&self) -> Self {
        Mobius {
            a: self.b.clone(),
            b: &self.a + &self.b,
            c: self.d.clone(),
            d: &self.c + &self.d,
        }
    }
    fn at_zero(&self) -> Ratio {
        Ratio::new(self.b.clone(), self.d.clone())
    }
    fn at_inf(&self) -> Option<Ratio> {
        if self.c.is_zero() {
            None
        } else {
            Some(Ratio::new(self.a.clone(), self.c.clone()))
        }
    }
}

fn taylor_shift<C: Coef>(p: &mut [C], s: u64) {
    let n = p.len();
    for i in 0..n.saturating_sub(1) {
        for j in (i..n - 1).rev() {
            let (lo, hi) = p.split_at_mut(j + 1);
            lo[j].add_shl(&hi[0], s);
        }
    }
}

fn variations<C: Coef>(p: &[C]) -> std::result::Result<usize, Undetermined> {
    let mut count = 0;
    let mut prev = 0;
    for c in p {
        let s = c.sign().ok_or(Undetermined)?;
        if s != 0 {
            if prev != 0 && s != prev {
                count += 1;
            }
            prev = s;
        }
    }
    Ok(count)
}

/// log2 of a lower bound on the positive roots of p, if p has a certain sign pattern.
fn positive_lower_bound<C: Coef>(p: &[C]) -> Option<i64> {
    // Roots of x^n p(1/x) are reciprocals; bound them from above (Kioustelidis).
    let rev: Vec<&C> = p.iter().rev().collect();
    let n = rev.len() - 1;
    let lead_sign = rev[n].sign()?;
    let (lead_lo, _) = rev[n].log2_bounds()?;
    let mut best: Option<i64> = None;
    for (k, c) in rev.iter().enumerate().take(n) {
        let s = c.sign()?;
        if s == 0 || s == lead_sign {
            continue;
        }
        let (_, up) = c.log2_bounds()?;
        let num = up - lead_lo;
        let den = (n - k) as i64;
        let t = num.div_euclid(den) + if num.rem_euclid(den) != 0 { 1 } else { 0 };
        best = Some(best.map_or(t, |b: i64| b.max(t)));
    }
    best.map(|t| -(t + 1))
}

fn isolate_positive<C: Coef>(coeffs: Vec<C>, out: &mut Vec<RootInterval>) -> std::result::Result<(), Undetermined> {
    let mut stack = vec![(coeffs, Mobius::identity())];
    while let Some((mut p, mut m)) = stack.pop() {
        while p.len() > 1 && p[0].sign().ok_or(Undetermined)? == 0 {
            out.push(RootInterval::Point(m.at_zero()));
            p.remove(0);
        }
        let mut v = variations(&p)?;
        if v == 0 {
            continue;
        }
        if v == 1 {
            out.push(RootInterval::between(m.at_zero(), m.at_inf()));
            continue;
        }
        if let Some(e) = positive_lower_bound(&p) {
            if e >= 1 {
                taylor_shift(&mut p, e as u64);
                m = m.shift(e as u64);
                while p.len() > 1 && p[0].sign().ok_or(Undetermined)? == 0 {
                    out.push(RootInterval::Point(m.at_zero()));
                    p.remove(0);
                }
                v = variations(&p)?;
                if v == 0 {
                    continue;
                }
                if v == 1 {
                    out.push(RootInterval::between(m.at_zero(), m.at_inf()));
                    continue;
                }
            }
        }
        let mut p1 = p.clone();
        taylor_shift(&mut p1, 0);
        let m1 = m.shift(0);
        let mut at_one = 0;
        if p1[0].sign().ok_or(Undetermined)? == 0 {
            out.push(RootInterval::Point(m1.at_zero()));
            p1.remove(0);
            at_one = 1;
        }
        let v1 = variations(&p1)?;
        if v > v1 + at_one {
            let mut p2: Vec<C> = p.iter().rev().cloned().collect();
            taylor_shift(&mut p2, 0);
            if p2[0].sign().ok_or(Undetermined)? == 0 {
                p2.remove(0);
            }
            stack.push((p2, m.invert()));
        }
        if v1 > 0 {
            stack.push((p1, m1));
        }
    }
    Ok(())
}

fn isolate_with<C: Coef>(h: &IntPoly) -> std::result::Result<Vec<RootInterval>, Undetermined> {
    let mut c = h.coeffs().to_vec();
    let mut out = Vec::new();
    let mut zero_root = false;
    while c.len() > 1 && c[0].is_zero() {
        c.remove(0);
        zero_root = true;
    }
    if zero_root {
        out.push(RootInterval::Point(Ratio::new(BigInt::zero(), BigInt::one())));
    }
    let pos: Vec<C> = c.iter().map(C::from_big).collect();
    isolate_positive(pos, &mut out)?;
    let refl = IntPoly::new(c).reflect();
    let neg: Vec<C> = refl.coeffs().iter().map(C::from_big).collect();
    let mut negs = Vec::new();
    isolate_positive(neg, &mut negs)?;
    out.extend(negs.into_iter().map(RootInterval::negate));
    Ok(out)
}

/// Squarefreeness over Q, decided modulo a few primes and exactly if those are inconclusive.
pub fn is_squarefree_q(h: &IntPoly) -> bool {
    if h.deg() < 1 {
        return true;
    }
    for q in word_primes().take(8) {
        if big_mod(&h.lead(), q) == 0 {
            continue;
        }
        if is_squarefree(&reduce_mod_p(h, q)) {
            return true;
        }
    }
    !matches!(sturm_count(h), Err(Error::NotSquarefree))
}

/// Isolating intervals for all real roots of a squarefree polynomial.
pub fn isolate_real_roots(h: &IntPoly) -> Result<Vec<RootInterval>> {
    if h.is_zero() {
        return Err(Error::Precondition("zero polynomial".into()));
    }
    if !is_squarefree_q(h) {
        return Err(Error::NotSquarefree);
    }
    if h.deg() == 0 {
        return Ok(Vec::new());
    }
    match isolate_with::<Approx>(h) {
        Ok(v) => Ok(v),
        Err(Undetermined) => Ok(isolate_with::<BigInt>(h).expect("exact signs are always determined")),
    }
}

/// Number of distinct real roots.
pub fn count_real_roots(h: &IntPoly) -> Result<usize> {
    Ok(isolate_real_roots(h)?.len())
}

/// Sign of h(u/v)·v^n, v > 0.
fn sign_at(h: &IntPoly, r: &Ratio) -> i32 {
    let mut acc = BigInt::zero();
    let mut vp = BigInt::one();
    for c in h.coeffs().iter().rev() {
        acc = acc * &r.num + c * &vp;
        vp *= &r.den;
    }
    // acc = Σ c_i u^i v^(n−i) after the loop
    match acc.sign() {
        num_bigint::Sign::Plus => 1,
        num_bigint::Sign::Minus => -1,
        num_bigint::Sign::NoSign => 0,
    }
}

fn root_bound(h: &IntPoly) -> Ratio {
    // Fujiwara: 2·max |c_{n−k}/c_n|^{1/k}, rounded up to a power of two
    let n = h.degree();
    let lc_bits = h.lead().bits() as i64 - 1;
    let c = h.coeffs();
    let e = (1..=n)
        .filter(|&k| !c[n - k].is_zero())
        .map(|k| ((c[n - k].bits() as i64 - lc_bits).max(0) + k as i64 - 1) / k as i64)
        .max()
        .unwrap_or(0) as u64
        + 1;
    Ratio::new(BigInt::one() << e, BigInt::one())
}

fn midpoint(a: &Ratio, b: &Ratio) -> Ratio {
    Ratio::new(&a.num * &b.den + &b.num * &a.den, &a.den * &b.den * 2)
}

/// Refines an isolating interval until its width is below |endpoint|·2^−bits.
pub fn refine(h: &IntPoly, iv: &RootInterval, bits: u64) -> Ratio {
    let (lo, hi) = match iv {
        RootInterval::Point(x) => return x.clone(),
        RootInterval::Open(lo, hi) => (lo, hi),
    };
    let bound = root_bound(h);
    let mut lo = lo.clone().unwrap_or_else(|| bound.neg());
    let mut hi = hi.clone().unwrap_or_else(|| bound.clone());
    // sign of h just right of lo
    let mut s_lo = sign_at(h, &lo);
    if s_lo == 0 {
        s_lo = sign_at(&h.derivative(), &lo);
    }
    let steps = 4 * bits + 256 + 2 * bound.num.bits();
    for _ in 0..steps {
        let width = Ratio::new(&hi.num * &lo.den - &lo.num * &hi.den, &hi.den * &lo.den);
        let scale = if lo.num.abs() * &hi.den > hi.num.abs() * &lo.den { &lo } else { &hi };
        if scale.num.is_zero() || (width.num.abs() * &scale.den) << bits < scale.num.abs() * &width.den {
            break;
        }
        let mid = midpoint(&lo, &hi);
        let s = sign_at(h, &mid);
        if s == 0 {
            return mid;
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    midpoint(&lo, &hi)
}

/// Largest and smallest real roots, refined to relative precision 2^−bits.
pub fn extreme_real_roots(h: &IntPoly, bits: u64) -> Result<Option<(Ratio, Ratio)>> {
    Ok(extremes_of(h, &isolate_real_roots(h)?, bits))
}

/// As `extreme_real_roots`, from intervals already isolated.
pub fn extremes_of(h: &IntPoly, roots: &[RootInterval], bits: u64) -> Option<(Ratio, Ratio)> {
    let lo = roots.iter().min_by(|a, b| a.order(b))?;
    let hi = roots.iter().max_by(|a, b| a.order(b))?;
    Some((refine(h, hi, bits), refine(h, lo, bits)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> IntPoly {
        IntPoly::from_i64(c)
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_real_roots(&p(&[1, 0, 1])).unwrap(), 0);
        assert_eq!(count_real_roots(&p(&[-2, 0, 1])).unwrap(), 2);
        assert_eq!(count_real_roots(&p(&[0, -3, 0, 1])).unwrap(), 3);
        assert_eq!(count_real_roots(&p(&[-6, 11, -6, 1])).unwrap(), 3);
        assert_eq!(count_real_roots(&p(&[1, 2, 1])).unwrap_err(), Error::NotSquarefree);
    }

    #[test]
    fn close_roots() {
        // (1000x − 1)(1001x − 1)(x² + 1)
        let f = p(&[-1, 1000]).mul(&p(&[-1, 1001])).mul(&p(&[1, 0, 1]));
        assert_eq!(count_real_roots(&f).unwrap(), 2);
        assert_eq!(sturm_count(&f).unwrap(), 2);
    }

    #[test]
    fn approx_roundtrip() {
        let x: BigInt = "-123456789012345678901234567890123456789".parse().unwrap();
        let a = Approx::from_big(&x);
        assert_eq!(a.sign(), Some(-1));
        let (lo, hi) = a.log2_bounds().unwrap();
        assert!(lo < x.bits() as i64 && hi >= x.bits() as i64);
    }

    #[test]
    fn extreme_values() {
        let f = p(&[-2, 0, 1]);
        let (max, min) = extreme_real_roots(&f, 60).unwrap().unwrap();
        assert!((max.to_f64() - 2f64.sqrt()).abs() < 1e-12);
        assert!((min.to_f64() + 2f64.sqrt()).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn agrees_with_sturm(c in prop::collection::vec(-10_000i64..10_000, 2..=9)) {
            let f = p(&c);
            prop_assume!(f.deg() >= 1 && is_squarefree_q(&f));
            prop_assert_eq!(count_real_roots(&f).unwrap(), sturm_count(&f).unwrap());
        }

        #[test]
        fn products_of_linears(roots in prop::collection::btree_set(-10_000i64..10_000, 1..12), den in 1i64..50) {
            let mut f = IntPoly::one();
            for &r in &roots {
                f = f.mul(&p(&[-r, den]));
            }
            f = f.mul(&p(&[5, 1, 1]));
            let iv = isolate_real_roots(&f).unwrap();
            prop_assert_eq!(iv.len(), roots.len());
            let exact = isolate_with::<BigInt>(&f).unwrap();
            prop_assert_eq!(exact.len(), roots.len());
        }
    }
}
