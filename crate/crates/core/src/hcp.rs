//! Hilbert class polynomials by evaluating j at CM points.
//!
//! j(τ) = (1 + 256·t)³ / t with t = Δ(2τ)/Δ(τ) = q·(P(q²)/P(q))²⁴, where
//! P(q) = ∏(1 − qⁿ) is summed by the pentagonal number theorem.

use crate::error::{Error, Result};
use crate::fixed::{Complex, Ctx};
use crate::quadforms::{reduced_forms, QuadForm};
use crate::zpoly::IntPoly;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::VecDeque;
use std::sync::{Arc, Mutex, OnceLock};

const MAX_RETRIES: u32 = 10;
const CACHE_SIZE: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionBudget {
    pub bits: u64,
    pub retries: u32,
}

impl PrecisionBudget {
    pub fn new(bits: u64) -> Self {
        PrecisionBudget { bits: bits.max(64), retries: 0 }
    }

    fn doubled(self) -> Result<Self> {
        if self.retries >= MAX_RETRIES {
            return Err(Error::PrecisionExhausted(self.retries));
        }
        Ok(PrecisionBudget { bits: self.bits * 2, retries: self.retries + 1 })
    }
}

/// j(τ) as a fixed-point complex number with `scale` fractional bits.
#[derive(Clone, Debug)]
pub struct JValue {
    pub value: Complex,
    pub scale: u64,
}

impl JValue {
    pub fn re_f64(&self) -> f64 {
        to_f64(&self.value.re, self.scale)
    }

    pub fn im_f64(&self) -> f64 {
        to_f64(&self.value.im, self.scale)
    }
}

fn to_f64(x: &BigInt, scale: u64) -> f64 {
    let b = x.bits();
    let sh = b.saturating_sub(60);
    let v: f64 = num_traits::ToPrimitive::to_f64(&(x >> sh)).unwrap_or(0.0);
    v * 2f64.powi(sh as i32 - scale as i32)
}

/// ∏(1 − qⁿ) = Σ (−1)^k q^{k(3k∓1)/2}.
fn pentagonal(c: &Ctx, q: &Complex) -> Complex {
    let one = Complex::real(c.one());
    let mut sum = one.clone();
    let q3 = c.cmul(&c.cmul(q, q), q);
    // a = q^{k(3k−1)/2}, b = q^k, step = q^{3k+1}
    let mut a = q.clone();
    let mut b = q.clone();
    let mut step = c.cmul(q, &q3);
    let mut k = 1u64;
    loop {
        let t1 = a.clone();
        let t2 = c.cmul(&a, &b);
        if k % 2 == 1 {
            sum = sum.sub(&t1).sub(&t2);
        } else {
            sum = sum.add(&t1).add(&t2);
        }
        a = c.cmul(&a, &step);
        if a.below_bits(2) {
            break;
        }
        b = c.cmul(&b, q);
        step = c.cmul(&step, &q3);
        k += 1;
    }
    sum
}

fn pow24(c: &Ctx, z: &Complex) -> Complex {
    let z2 = c.cmul(z, z);
    let z3 = c.cmul(&z2, z);
    let z6 = c.cmul(&z3, &z3);
    let z12 = c.cmul(&z6, &z6);
    c.cmul(&z12, &z12)
}

fn j_at(c: &Ctx, f: &QuadForm, d: i64) -> Complex {
    // τ = (−b + i√|D|)/(2a): |q| = e^{−π√|D|/a}, arg q = −πb/a
    let a = BigInt::from(f.a);
    let y = (&c.pi * c.sqrt_int(d.unsigned_abs())) >> c.wp;
    let y = y / &a;
    let theta = (&c.pi * BigInt::from(f.b)) / &a;
    let mag_inv = c.exp(&y);
    let rot = c.expi(&theta);
    let q_inv = Complex { re: c.mul(&mag_inv, &rot.re), im: c.mul(&mag_inv, &rot.im) };
    let mag = c.div(&c.one(), &mag_inv);
    let q = Complex { re: c.mul(&mag, &rot.re), im: -c.mul(&mag, &rot.im) };
    let q2 = c.cmul(&q, &q);
    let p1 = pentagonal(c, &q);
    let p2 = pentagonal(c, &q2);
    let r24 = pow24(c, &c.cdiv(&p2, &p1));
    let t = c.cmul(&q, &r24);
    let u = Complex::real(c.one()).add(&t.scale(256));
    let u3 = c.cmul(&c.cmul(&u, &u), &u);
    c.cmul(&q_inv, &c.cdiv(&u3, &r24))
}

/// j at the CM point of a reduced form of discriminant b² − 4ac.
pub fn j_eval(form: &QuadForm, prec: &PrecisionBudget) -> Result<JValue> {
    let d = form.disc();
    if d >= 0 || form.a <= 0 {
        return Err(Error::InvalidDiscriminant(d));
    }
    let c = Ctx::get(prec.bits + 32);
    Ok(JValue { value: j_at(&c, form, d), scale: c.wp })
}

fn initial_bits(d: i64, forms: &[QuadForm]) -> u64 {
    let s: f64 = forms.iter().map(|f| 1.0 / f.a as f64).sum();
    let est = std::f64::consts::PI * (d.unsigned_abs() as f64).sqrt() * s / std::f64::consts::LN_2;
    est.ceil() as u64 + 16 * (forms.len() as u64 + 8)
}

fn mul_real(c: &Ctx, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out.into_iter().map(|v| (v + (BigInt::one() << (c.wp - 1))) >> c.wp).collect()
}

/// Some(H) if every coefficient rounds cleanly at this precision.
fn attempt(d: i64, forms: &[QuadForm], bits: u64) -> Option<IntPoly> {
    let c = Ctx::get(bits);
    let quarter = BigInt::one() << (c.wp - 2);
    let im_slack = c.wp / 4;
    let mut poly = vec![c.one()];
    for f in forms.iter().filter(|f| f.b >= 0) {
        let j = j_at(&c, f, d);
        let factor = if f.is_ambiguous() {
            let bound = j.re.abs().max(c.one());
            if (j.im.abs() << im_slack) > bound {
                return None;
            }
            vec![-j.re, c.one()]
        } else {
            // (X − j)(X − j̄) = X² − 2Re(j)X + |j|²
            let norm = c.mul(&j.re, &j.re) + c.mul(&j.im, &j.im);
            vec![norm, -(&j.re * BigInt::from(2)), c.one()]
        };
        poly = mul_real(&c, &poly, &factor);
    }
    let mut out = Vec::with_capacity(poly.len());
    for v in poly {
        let (n, r) = (&v + (BigInt::one() << (c.wp - 1))).div_mod_floor(&c.one());
        let dist = r - (BigInt::one() << (c.wp - 1));
        if dist.abs() >= quarter {
            return None;
        }
        out.push(n);
    }
    Some(IntPoly::new(out))
}

fn compute(d: i64) -> Result<IntPoly> {
    let forms = reduced_forms(d)?;
    let mut budget = PrecisionBudget::new(initial_bits(d, &forms));
    loop {
        if let Some(h) = attempt(d, &forms, budget.bits) {
            return Ok(h);
        }
        budget = budget.doubled()?;
    }
}

fn cache() -> &'static Mutex<VecDeque<(i64, Arc<IntPoly>)>> {
    static CACHE: OnceLock<Mutex<VecDeque<(i64, Arc<IntPoly>)>>> = OnceLock::new();
    CACHE.get_or_init(Mutex::default)
}

/// H_D, the monic polynomial whose roots are the j-invariants of the classes of discriminant D.
pub fn hilbert_class_poly(d: i64) -> Result<IntPoly> {
    {
        let mut c = cache().lock().unwrap();
        if let Some(i) = c.iter().position(|e| e.0 == d) {
            let e = c.remove(i).unwrap();
            let h = (*e.1).clone();
            c.push_front(e);
            return Ok(h);
        }
    }
    let h = compute(d)?;
    let mut c = cache().lock().unwrap();
    c.push_front((d, Arc::new(h.clone())));
    c.truncate(CACHE_SIZE);
    Ok(h)
}
