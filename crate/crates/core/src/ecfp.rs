//! Elliptic curves y² = x³ + a4·x + a6 over prime fields.

use crate::arith::{add_mod, factor_u64, inv_mod, isqrt, jacobi, mul_mod, sqrt_mod, sub_mod};
use crate::error::{Error, Result};
use crate::ffpoly::{resultant, squarefree_part, FpPoly, Rng};
use crate::zpoly::interpolate_consecutive;
use serde::Serialize;
use std::collections::HashMap;

const EXHAUSTIVE_BELOW: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CurveFp {
    pub p: u64,
    pub a4: u64,
    pub a6: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusData {
    pub p: u64,
    pub a_p: i64,
    /// a_p² − 4p
    pub delta: i128,
}

impl FrobeniusData {
    fn new(p: u64, a_p: i64) -> Self {
        FrobeniusData { p, a_p, delta: (a_p as i128).pow(2) - 4 * p as i128 }
    }
}

impl CurveFp {
    pub fn new(p: u64, a4: u64, a6: u64) -> Result<Self> {
        if p < 5 {
            return Err(Error::BadCharacteristic(p));
        }
        let e = CurveFp { p, a4: a4 % p, a6: a6 % p };
        if e.disc_part() == 0 {
            return Err(Error::Precondition(format!("singular curve over F_{p}")));
        }
        Ok(e)
    }

    /// 4a4³ + 27a6²
    fn disc_part(&self) -> u64 {
        let p = self.p;
        let a3 = mul_mod(mul_mod(self.a4, self.a4, p), self.a4, p);
        add_mod(mul_mod(4, a3, p), mul_mod(27, mul_mod(self.a6, self.a6, p), p), p)
    }

    pub fn j_invariant(&self) -> u64 {
        let p = self.p;
        let a3 = mul_mod(mul_mod(self.a4, self.a4, p), self.a4, p);
        let num = mul_mod(1728 % p, mul_mod(4, a3, p), p);
        mul_mod(num, inv_mod(self.disc_part(), p).expect("nonsingular"), p)
    }

    fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        let x2 = mul_mod(x, x, p);
        add_mod(mul_mod(add_mod(x2, self.a4, p), x, p), self.a6, p)
    }

    /// Quadratic twist by a non-residue.
    pub fn twist(&self) -> CurveFp {
        let p = self.p;
        let d = (2..p).find(|&d| jacobi(d as i128, p) == -1).expect("odd prime");
        let d2 = mul_mod(d, d, p);
        CurveFp { p, a4: mul_mod(self.a4, d2, p), a6: mul_mod(self.a6, mul_mod(d2, d, p), p) }
    }
}

/// A curve with the given j-invariant.
pub fn curve_from_j(p: u64, j: u64) -> Result<CurveFp> {
    if p < 5 {
        return Err(Error::BadCharacteristic(p));
    }
    let j = j % p;
    let k = 1728 % p;
    if j == 0 {
        return CurveFp::new(p, 0, p - 1);
    }
    if j == k {
        return CurveFp::new(p, p - 1, 0);
    }
    let jm = sub_mod(j, k, p);
    let t = mul_mod(j, jm, p);
    let a4 = mul_mod(p - 3, t, p);
    let a6 = mul_mod(p - 2, mul_mod(t, jm, p), p);
    CurveFp::new(p, a4, a6)
}

type Pt = Option<(u64, u64)>;

fn add(e: &CurveFp, a: Pt, b: Pt) -> Pt {
    let p = e.p;
    let (Some((x1, y1)), Some((x2, y2))) = (a, b) else {
        return a.or(b);
    };
    let lam = if x1 == x2 {
        if add_mod(y1, y2, p) == 0 {
            return None;
        }
        let num = add_mod(mul_mod(3, mul_mod(x1, x1, p), p), e.a4, p);
        mul_mod(num, inv_mod(mul_mod(2, y1, p), p)?, p)
    } else {
        mul_mod(sub_mod(y2, y1, p), inv_mod(sub_mod(x2, x1, p), p)?, p)
    };
    let x3 = sub_mod(sub_mod(mul_mod(lam, lam, p), x1, p), x2, p);
    let y3 = sub_mod(mul_mod(lam, sub_mod(x1, x3, p), p), y1, p);
    Some((x3, y3))
}

fn neg(e: &CurveFp, a: Pt) -> Pt {
    a.map(|(x, y)| (x, (e.p - y) % e.p))
}

fn mul(e: &CurveFp, mut k: u64, a: Pt) -> Pt {
    let mut r = None;
    let mut b = a;
    while k > 0 {
        if k & 1 == 1 {
            r = add(e, r, b);
        }
        b = add(e, b, b);
        k >>= 1;
    }
    r
}

fn random_point(e: &CurveFp, rng: &mut Rng) -> Option<Pt> {
    for _ in 0..4 * e.p + 64 {
        let x = rng.below(e.p);
        if let Some(y) = sqrt_mod(e.rhs(x), e.p) {
            return Some(Some((x, y)));
        }
    }
    None
}

/// Some N in [lo, lo + w] with N·P = O.
fn bsgs_multiple(e: &CurveFp, pt: Pt, lo: u64, w: u64) -> Option<u64> {
    let m = isqrt(w) + 1;
    let mut baby: HashMap<Pt, u64> = HashMap::with_capacity(m as usize);
    let mut q = None;
    for j in 0..m {
        baby.entry(q).or_insert(j);
        q = add(e, q, pt);
    }
    // q = m·P; want k = i·m + j with (lo + k)·P = O, i.e. j·P = −lo·P − i·m·P
    let step = neg(e, q);
    let mut r = neg(e, mul(e, lo, pt));
    for i in 0..=(w / m + 1) {
        if let Some(&j) = baby.get(&r) {
            let k = i * m + j;
            if k <= w {
                return Some(lo + k);
            }
        }
        r = add(e, r, step);
    }
    None
}

fn point_order(e: &CurveFp, pt: Pt, mut n: u64) -> u64 {
    for (q, k) in factor_u64(n, u64::MAX).expect("unbounded budget") {
        for _ in 0..k {
            if mul(e, n / q, pt).is_none() {
                n /= q;
            } else {
                break;
            }
        }
    }
    n
}

fn lcm(a: u64, b: u64) -> u64 {
    a / crate::arith::gcd_u64(a, b) * b
}

fn exhaustive_trace(e: &CurveFp) -> i64 {
    let p = e.p;
    let s: i64 = (0..p).map(|x| jacobi(e.rhs(x) as i128, p) as i64).sum();
    -s
}

/// Trace via baby-step giant-step on E and its twist.
fn bsgs_trace(e: &CurveFp, rng: &mut Rng) -> Result<i64> {
    let p = e.p;
    let t = e.twist();
    let r = 2 * isqrt(p) + 2;
    let lo = (p + 1).saturating_sub(r).max(1);
    let hi = p + 1 + r;
    let (mut l1, mut l2) = (1u64, 1u64);
    for round in 0..64 {
        let (curve, acc) = if round % 2 == 0 { (e, &mut l1) } else { (&t, &mut l2) };
        let pt = random_point(curve, rng).ok_or(Error::AmbiguousOrder)?;
        let n = bsgs_multiple(curve, pt, lo, hi - lo).ok_or(Error::AmbiguousOrder)?;
        *acc = lcm(*acc, point_order(curve, pt, n));
        // #E = N, #E' = 2p + 2 − N
        let mut found = None;
        let mut count = 0;
        let mut n = lo.div_ceil(l1) * l1;
        while n <= hi {
            let tw = 2 * p + 2 - n;
            if tw % l2 == 0 {
                count += 1;
                found = Some(n);
                if count > 1 {
                    break;
                }
            }
            n += l1;
        }
        if count == 1 {
            return Ok(p as i64 + 1 - found.unwrap() as i64);
        }
    }
    Err(Error::AmbiguousOrder)
}

fn curve_seed(e: &CurveFp) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for v in [e.p, e.a4, e.a6] {
        h = (h ^ v).wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Exact trace of Frobenius.
pub fn trace_of_frobenius(e: &CurveFp) -> FrobeniusData {
    let a = if e.p < EXHAUSTIVE_BELOW {
        exhaustive_trace(e)
    } else {
        bsgs_trace(e, &mut Rng::new(curve_seed(e))).unwrap_or_else(|_| exhaustive_trace(e))
    };
    FrobeniusData::new(e.p, a)
}

pub fn is_supersingular(e: &CurveFp) -> bool {
    trace_of_frobenius(e).a_p == 0
}

/// ss_ℓ for any odd prime ℓ (ss_3 = X).
pub(crate) fn ss_poly(l: u64) -> FpPoly {
    if l <= 3 {
        return FpPoly::x(l);
    }
    let m = (l - 1) / 2;
    // Hasse invariant of the Legendre family: Σ binom(m,k)² λ^k
    let mut binom = vec![1u64; m as usize + 1];
    for k in 1..=m as usize {
        binom[k] = mul_mod(mul_mod(binom[k - 1], m - k as u64 + 1, l), inv_mod(k as u64, l).unwrap(), l);
    }
    let hasse = FpPoly::new(l, binom.iter().map(|&b| mul_mod(b, b, l)).collect());
    // 256(λ² − λ + 1)³ − x·λ²(λ − 1)²
    let q = FpPoly::from_i64(l, &[1, -1, 1]);
    let num = q.mul(&q).mul(&q).scale(256 % l);
    let den = FpPoly::from_i64(l, &[0, 0, 1, -2, 1]);
    let vals: Vec<u64> = (0..=m).map(|x| resultant(&hasse, &num.sub(&den.scale(x)))).collect();
    squarefree_part(&interpolate_consecutive(&vals, l))
}

/// The monic polynomial whose roots are the supersingular j-invariants in characteristic ℓ.
pub fn supersingular_polynomial(l: u64) -> Result<FpPoly> {
    if l < 5 || !crate::arith::is_prime(l) {
        return Err(Error::BadCharacteristic(l));
    }
    Ok(ss_poly(l))
}

/// ⌊ℓ/12⌋ + c(ℓ mod 12).
pub fn supersingular_count(l: u64) -> u64 {
    l / 12
        + match l % 12 {
            5 | 7 => 1,
            11 => 2,
            _ => 0,
        }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::primes_up_to;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, prop_assume, proptest, ProptestConfig};

    fn count_points(e: &CurveFp) -> u64 {
        let p = e.p;
        1 + (0..p)
            .map(|x| {
                let r = e.rhs(x);
                (0..p).filter(|&y| mul_mod(y, y, p) == r).count() as u64
            })
            .sum::<u64>()
    }

    #[test]
    fn curves_from_j() {
        assert_eq!(curve_from_j(7, 6).unwrap(), CurveFp { p: 7, a4: 6, a6: 0 });
        let e = curve_from_j(5, 2).unwrap();
        assert_eq!((e.a4, e.a6), (1, 1));
        assert_eq!(e.j_invariant(), 2);
        assert_eq!(curve_from_j(11, 0).unwrap(), CurveFp { p: 11, a4: 0, a6: 10 });
        assert_eq!(curve_from_j(3, 1), Err(Error::BadCharacteristic(3)));
        for p in [5u64, 7, 11, 13, 101] {
            for j in 0..p {
                assert_eq!(curve_from_j(p, j).unwrap().j_invariant(), j);
            }
        }
    }

    #[test]
    fn traces() {
        let e = CurveFp::new(5, 1, 0).unwrap();
        assert_eq!(trace_of_frobenius(&e).a_p, 2);
        assert_eq!(count_points(&e), 4);
        let e = CurveFp::new(5, 0, 1).unwrap();
        assert_eq!(trace_of_frobenius(&e).a_p, 0);
        assert!(is_supersingular(&e));
        let e = CurveFp::new(7, 0, 1).unwrap();
        assert_eq!(trace_of_frobenius(&e).a_p, -4);
        assert!(!is_supersingular(&e));
        assert!(!is_supersingular(&CurveFp::new(5, 1, 0).unwrap()));
        let e = CurveFp::new(1_000_003, 17, 42).unwrap();
        assert_eq!(trace_of_frobenius(&e.twist()).a_p, -trace_of_frobenius(&e).a_p);
    }

    #[test]
    fn exhaustive_matches_naive() {
        for p in [5u64, 7, 11, 13, 17, 19, 23] {
            for a4 in 0..p {
                for a6 in 0..p {
                    if let Ok(e) = CurveFp::new(p, a4, a6) {
                        assert_eq!(p as i64 + 1 - count_points(&e) as i64, exhaustive_trace(&e));
                    }
                }
            }
        }
    }

    #[test]
    fn bsgs_sweep() {
        // every curve up to isomorphism and twist, over every p ≤ 1000
        for p in primes_up_to(1000).into_iter().filter(|&p| p >= 5) {
            let mut rng = Rng::new(p);
            for j in 0..p {
                let e = curve_from_j(p, j).unwrap();
                for c in [e, e.twist()] {
                    match bsgs_trace(&c, &mut rng) {
                        Ok(a) => assert_eq!(a, exhaustive_trace(&c), "p={p} j={j}"),
                        Err(Error::AmbiguousOrder) => assert!(p <= 229, "p={p} j={j}"),
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn bsgs_all_coefficients_small() {
        for p in primes_up_to(100).into_iter().filter(|&p| p >= 5) {
            let mut rng = Rng::new(p);
            for a4 in 0..p {
                for a6 in 0..p {
                    if let Ok(e) = CurveFp::new(p, a4, a6) {
                        if let Ok(a) = bsgs_trace(&e, &mut rng) {
                            assert_eq!(a, exhaustive_trace(&e));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ss_examples() {
        assert_eq!(supersingular_polynomial(5).unwrap(), FpPoly::x(5));
        assert_eq!(supersingular_polynomial(7).unwrap(), FpPoly::from_i64(7, &[-6, 1]));
        assert_eq!(supersingular_polynomial(11).unwrap(), FpPoly::from_i64(11, &[0, -1, 1]));
        assert_eq!(supersingular_polynomial(3), Err(Error::BadCharacteristic(3)));
        assert_eq!(ss_poly(3), FpPoly::x(3));
    }

    #[test]
    fn ss_degrees() {
        for l in primes_up_to(200).into_iter().filter(|&l| l >= 5) {
            let s = supersingular_polynomial(l).unwrap();
            assert_eq!(s.deg() as u64, supersingular_count(l), "{l}");
            assert!(crate::ffpoly::is_squarefree(&s) || s.deg() == 1);
        }
    }

    #[test]
    fn ss_roots_are_supersingular() {
        for l in primes_up_to(100).into_iter().filter(|&l| l >= 5) {
            let s = supersingular_polynomial(l).unwrap();
            let roots = crate::ffpoly::find_roots(&s, &mut Rng::new(1));
            for j in roots {
                assert!(is_supersingular(&curve_from_j(l, j).unwrap()), "ℓ={l} j={j}");
            }
            for j in 0..l {
                let ss = is_supersingular(&curve_from_j(l, j).unwrap());
                assert_eq!(ss, s.eval(j) == 0, "ℓ={l} j={j}");
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn hasse_bound(i in 1300usize..5000, a4 in any::<u64>(), a6 in any::<u64>()) {
            let p = primes_up_to(50_000)[i];
            prop_assume!(CurveFp::new(p, a4, a6).is_ok());
            let e = CurveFp::new(p, a4, a6).unwrap();
            let f = trace_of_frobenius(&e);
            prop_assert!(f.a_p.unsigned_abs().pow(2) <= 4 * p);
            prop_assert!(f.delta <= 0);
            prop_assert!(matches!(f.delta.rem_euclid(4), 0 | 1));
            if p < 30_000 {
                prop_assert_eq!(f.a_p, exhaustive_trace(&e));
            }
        }
    }
}
