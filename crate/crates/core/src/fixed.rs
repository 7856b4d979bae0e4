//! Fixed-point real and complex numbers: a BigInt scaled by 2^wp.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Constants at a given working precision.
#[derive(Debug)]
pub(crate) struct Ctx {
    pub wp: u64,
    pub pi: BigInt,
    pub ln2: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: BigInt,
    pub im: BigInt,
}

fn round_shift(x: BigInt, s: u64) -> BigInt {
    if s == 0 {
        return x;
    }
    (x + (BigInt::one() << (s - 1))) >> s
}

/// atan(1/n) · 2^wp by the Gregory series.
fn atan_inv(n: u64, wp: u64) -> BigInt {
    let n2 = BigInt::from(n * n);
    let mut term = (BigInt::one() << wp) / n;
    let mut sum = term.clone();
    let mut k = 1u64;
    while !term.is_zero() {
        term /= &n2;
        let t = &term / (2 * k + 1);
        if k % 2 == 1 {
            sum -= t;
        } else {
            sum += t;
        }
        k += 1;
    }
    sum
}

/// ln 2 = 2 atanh(1/3).
fn ln2(wp: u64) -> BigInt {
    let mut term = (BigInt::one() << wp) / 3u32;
    let mut sum = term.clone();
    let mut k = 1u64;
    while !term.is_zero() {
        term /= 9u32;
        sum += &term / (2 * k + 1);
        k += 1;
    }
    sum * 2
}

impl Ctx {
    fn build(wp: u64) -> Ctx {
        let g = 32;
        let w = wp + g;
        let pi = (atan_inv(5, w) * 16 - atan_inv(239, w) * 4) >> g;
        let l = ln2(w) >> g;
        Ctx { wp, pi, ln2: l }
    }

    /// Shared context, rounded up to a multiple of 256 bits.
    pub fn get(wp: u64) -> Arc<Ctx> {
        static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Ctx>>>> = OnceLock::new();
        let wp = wp.div_ceil(256) * 256;
        let cache = CACHE.get_or_init(Mutex::default);
        if let Some(c) = cache.lock().unwrap().get(&wp) {
            return c.clone();
        }
        let c = Arc::new(Ctx::build(wp));
        let mut m = cache.lock().unwrap();
        if m.len() > 64 {
            m.clear();
        }
        m.insert(wp, c.clone());
        c
    }

    pub fn one(&self) -> BigInt {
        BigInt::one() << self.wp
    }

    #[cfg(test)]
    pub fn from_int(&self, n: i64) -> BigInt {
        BigInt::from(n) << self.wp
    }

    pub fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        round_shift(a * b, self.wp)
    }

    pub fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.wp).div_floor(b)
    }

    /// √n for a nonnegative integer n.
    pub fn sqrt_int(&self, n: u64) -> BigInt {
        (BigInt::from(n) << (2 * self.wp)).sqrt()
    }

    /// e^x for real x.
    pub fn exp(&self, x: &BigInt) -> BigInt {
        let wp = self.wp;
        // x = k·ln2 + r with |r| ≤ ln2/2
        let k: BigInt = (x + (&self.ln2 >> 1u32)).div_floor(&self.ln2);
        let r = x - &k * &self.ln2;
        let s = ((wp as f64).sqrt() / 2.0) as u64 + 1;
        let g = s + 16;
        let w = wp + g;
        let one = BigInt::one() << w;
        let r = (r << g) >> s;
        let mut term = one.clone();
        let mut sum = one.clone();
        let mut n = 1u64;
        loop {
            term = round_shift(&term * &r, w) / n;
            if term.is_zero() {
                break;
            }
            sum += &term;
            n += 1;
        }
        for _ in 0..s {
            sum = round_shift(&sum * &sum, w);
        }
        let k: i64 = (&k).try_into().expect("exponent fits in i64");
        let shift = k - g as i64;
        if shift >= 0 {
            sum << shift as u64
        } else {
            round_shift(sum, (-shift) as u64)
        }
    }

    /// e^{iθ} for real θ.
    pub fn expi(&self, theta: &BigInt) -> Complex {
        let wp = self.wp;
        let s = ((wp as f64).sqrt() / 2.0) as u64 + 4;
        let g = s + 16;
        let w = wp + g;
        let t = (theta << g) >> s;
        let mut re = BigInt::one() << w;
        let mut im = BigInt::zero();
        let mut term_re = re.clone();
        let mut term_im = BigInt::zero();
        let mut n = 1u64;
        loop {
            // term ·= iθ/n
            let nr = -round_shift(&term_im * &t, w) / n;
            let ni = round_shift(&term_re * &t, w) / n;
            term_re = nr;
            term_im = ni;
            if term_re.is_zero() && term_im.is_zero() {
                break;
            }
            re += &term_re;
            im += &term_im;
            n += 1;
        }
        let mut z = Complex { re, im };
        for _ in 0..s {
            z = cmul(&z, &z, w);
        }
        Complex { re: round_shift(z.re, g), im: round_shift(z.im, g) }
    }

    pub fn cmul(&self, a: &Complex, b: &Complex) -> Complex {
        cmul(a, b, self.wp)
    }

    pub fn cdiv(&self, a: &Complex, b: &Complex) -> Complex {
        let n = &b.re * &b.re + &b.im * &b.im;
        let re = &a.re * &b.re + &a.im * &b.im;
        let im = &a.im * &b.re - &a.re * &b.im;
        Complex { re: (re << self.wp).div_floor(&n), im: (im << self.wp).div_floor(&n) }
    }

    #[cfg(test)]
    pub fn to_f64(&self, x: &BigInt) -> f64 {
        let b = x.bits();
        if b <= 1000 {
            let v: f64 = num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN);
            v * 2f64.powi(-(self.wp as i32))
        } else {
            let sh = b - 60;
            let v: f64 = num_traits::ToPrimitive::to_f64(&(x >> sh)).unwrap();
            v * 2f64.powi(sh as i32 - self.wp as i32)
        }
    }
}

fn cmul(a: &Complex, b: &Complex, w: u64) -> Complex {
    // Gauss: three multiplications
    let k1 = &b.re * (&a.re + &a.im);
    let k2 = &a.re * (&b.im - &b.re);
    let k3 = &a.im * (&b.re + &b.im);
    Complex { re: round_shift(&k1 - &k3, w), im: round_shift(k1 + k2, w) }
}

impl Complex {
    pub fn zero() -> Self {
        Complex { re: BigInt::zero(), im: BigInt::zero() }
    }

    pub fn real(re: BigInt) -> Self {
        Complex { re, im: BigInt::zero() }
    }

    pub fn add(&self, o: &Complex) -> Complex {
        Complex { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Complex) -> Complex {
        Complex { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, k: i64) -> Complex {
        Complex { re: &self.re * k, im: &self.im * k }
    }

    /// max(|re|, |im|) has fewer than `bits` bits.
    pub fn below_bits(&self, bits: u64) -> bool {
        self.re.abs().bits() < bits && self.im.abs().bits() < bits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(c: &Ctx, x: &BigInt, v: f64, tol: f64) -> bool {
        (c.to_f64(x) - v).abs() <= tol * v.abs().max(1.0)
    }

    #[test]
    fn constants() {
        let c = Ctx::get(200);
        assert!(close(&c, &c.pi, std::f64::consts::PI, 1e-15));
        assert!(close(&c, &c.ln2, std::f64::consts::LN_2, 1e-15));
        // π to 60 decimals
        let digits: BigInt = "3141592653589793238462643383279502884197169399375105820974944".parse().unwrap();
        let scaled = (&c.pi * BigInt::from(10u32).pow(60)) >> c.wp;
        assert!((scaled - digits).abs() <= BigInt::from(1));
    }

    #[test]
    fn exponentials() {
        let c = Ctx::get(256);
        for &x in &[-30.0f64, -1.0, 0.0, 0.5, 1.0, 7.25, 100.0] {
            let xf = BigInt::from((x * 4.0) as i64) << (c.wp - 2);
            assert!(close(&c, &c.exp(&xf), x.exp(), 1e-14), "{x}");
        }
        let e = c.exp(&c.from_int(1000));
        assert_eq!(e.bits(), 1443 + c.wp);
        let p = c.mul(&c.exp(&c.from_int(100)), &c.exp(&c.from_int(-100)));
        assert!(close(&c, &p, 1.0, 1e-15));
        let third = c.div(&c.pi, &c.from_int(3));
        let z = c.expi(&third);
        assert!(close(&c, &z.re, 0.5, 1e-15));
        assert!(close(&c, &z.im, 3f64.sqrt() / 2.0, 1e-15));
        let z = c.expi(&c.pi);
        assert!(close(&c, &z.re, -1.0, 1e-15));
    }

    #[test]
    fn exp_high_precision() {
        // e^1 to 50 decimals
        let c = Ctx::get(512);
        let e = c.exp(&c.one());
        let digits: BigInt = "271828182845904523536028747135266249775724709369995".parse().unwrap();
        let scaled = (e * BigInt::from(10u32).pow(50)) >> c.wp;
        assert!((scaled - digits).abs() <= BigInt::from(1));
    }
}
