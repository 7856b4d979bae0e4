//! Imaginary quadratic discriminants and reduced binary quadratic forms.

use crate::arith::{factor_u64, gcd_u64, jacobi};
use crate::error::{Error, Result};
use serde::Serialize;

const MAX_ABS_DISC: i64 = 1_000_000_000;

/// D = f²·D0 with D0 fundamental.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant {
    pub d: i64,
    pub d0: i64,
    pub f: u64,
}

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        let (d0, f) = fundamental_decomposition(d)?;
        Ok(Discriminant { d, d0, f })
    }
}

/// The form a x² + b xy + c y².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QuadForm {
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c && (self.b >= 0 || (self.b.abs() != self.a && self.a != self.c))
    }

    /// Represents an element of order at most 2 in the class group.
    pub fn is_ambiguous(&self) -> bool {
        self.b == 0 || self.a == self.b || self.a == self.c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiscInvariants {
    pub h: u64,
    pub h2: u64,
    pub w: u64,
}

fn check_disc(d: i64) -> Result<()> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    if d < -MAX_ABS_DISC {
        return Err(Error::OutOfRange(d));
    }
    Ok(())
}

/// Reduced primitive forms of discriminant D, ordered by a, then |b| with b > 0 first.
pub fn reduced_forms(d: i64) -> Result<Vec<QuadForm>> {
    check_disc(d)?;
    let n = -d;
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= n {
        let mut b = d.rem_euclid(2);
        while b <= a {
            let num = b * b - d;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                if c >= a {
                    let g = gcd_u64(gcd_u64(a as u64, b as u64), c as u64);
                    if g == 1 {
                        out.push(QuadForm { a, b, c });
                        if b != 0 && b != a && a != c {
                            out.push(QuadForm { a, b: -b, c });
                        }
                    }
                }
            }
            b += 2;
        }
        a += 1;
    }
    Ok(out)
}

pub fn class_number(d: i64) -> Result<u64> {
    Ok(reduced_forms(d)?.len() as u64)
}

pub fn disc_invariants(d: i64) -> Result<DiscInvariants> {
    let forms = reduced_forms(d)?;
    let h2 = forms.iter().filter(|f| f.is_ambiguous()).count() as u64;
    let w = match d {
        -3 => 3,
        -4 => 2,
        _ => 1,
    };
    Ok(DiscInvariants { h: forms.len() as u64, h2, w })
}

/// Kronecker symbol (D/n).
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return if d.abs() == 1 { 1 } else { 0 };
    }
    let mut t = 1;
    let mut m = n.unsigned_abs();
    if n < 0 && d < 0 {
        t = -t;
    }
    let v = m.trailing_zeros();
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(d.rem_euclid(8), 3 | 5) {
            t = -t;
        }
        m >>= v;
    }
    t * jacobi(d as i128, m)
}

fn is_fundamental(d: i64) -> bool {
    match fundamental_decomposition(d) {
        Ok((_, f)) => f == 1,
        Err(_) => false,
    }
}

/// Writes D = f²·D0 with D0 fundamental.
pub fn fundamental_decomposition(d: i64) -> Result<(i64, u64)> {
    if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
        return Err(Error::InvalidDiscriminant(d));
    }
    let fac = factor_u64(d.unsigned_abs(), 1_000_000)
        .ok_or_else(|| Error::FactorizationTimeout(d.to_string()))?;
    let (mut s, mut k) = (1u64, 1u64);
    for (p, e) in fac {
        s *= p.pow(e % 2);
        k *= p.pow(e / 2);
    }
    let neg_s = -(s as i64);
    if neg_s.rem_euclid(4) == 1 {
        Ok((neg_s, k))
    } else {
        Ok((4 * neg_s, k / 2))
    }
}

/// h(f²·D0) from h(D0) and the Euler-product correction.
pub fn class_number_formula(d0: i64, f: u64) -> Result<u64> {
    if f == 0 || !is_fundamental(d0) {
        return Err(Error::InvalidDiscriminant(d0));
    }
    let h0 = class_number(d0)?;
    if f == 1 {
        return Ok(h0);
    }
    let fac = factor_u64(f, 1_000_000).ok_or_else(|| Error::FactorizationTimeout(f.to_string()))?;
    let mut num: u128 = h0 as u128;
    for (p, e) in fac {
        let chi = kronecker(d0, p as i64);
        num *= (p as u128).pow(e - 1) * (p as i128 - chi as i128) as u128;
    }
    let units = match d0 {
        -3 => 3,
        -4 => 2,
        _ => 1,
    };
    Ok((num / units) as u64)
}

/// Class numbers h(D) for all discriminants −n ≤ D < 0, indexed by |D|
/// (zero where −|D| is not a discriminant).
pub fn class_numbers_up_to(n: u64) -> Vec<u32> {
    let n = n as i64;
    let mut h = vec![0u32; n as usize + 1];
    let mut a = 1i64;
    while 3 * a * a <= n {
        for b in (1 - a)..=a {
            // 4ac − b² ≤ n
            let c_max = (n + b * b) / (4 * a);
            let c_min = if b < 0 { a + 1 } else { a };
            let gab = gcd_u64(a as u64, b.unsigned_abs());
            for c in c_min..=c_max {
                if gab == 1 || gcd_u64(gab, c as u64) == 1 {
                    h[(4 * a * c - b * b) as usize] += 1;
                }
            }
        }
        a += 1;
    }
    h
}

/// Every D with |D| ≤ bound and h(D) = h, in order of decreasing D.
pub fn discriminants_with_class_number(h: u64, bound: u64) -> Vec<i64> {
    class_numbers_up_to(bound)
        .iter()
        .enumerate()
        .filter(|(_, &c)| c as u64 == h)
        .map(|(n, _)| -(n as i64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qf(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm { a, b, c }
    }

    #[test]
    fn form_lists() {
        assert_eq!(reduced_forms(-23).unwrap(), vec![qf(1, 1, 6), qf(2, 1, 3), qf(2, -1, 3)]);
        assert_eq!(reduced_forms(-4).unwrap(), vec![qf(1, 0, 1)]);
        assert_eq!(reduced_forms(-15).unwrap(), vec![qf(1, 1, 4), qf(2, 1, 2)]);
        assert!(matches!(reduced_forms(-5), Err(Error::InvalidDiscriminant(-5))));
        assert!(matches!(reduced_forms(8), Err(Error::InvalidDiscriminant(8))));
        for f in reduced_forms(-2299).unwrap() {
            assert!(f.is_reduced());
            assert_eq!(f.disc(), -2299);
        }
    }

    #[test]
    fn class_numbers() {
        assert_eq!(class_number(-571).unwrap(), 5);
        assert_eq!(class_number(-2299).unwrap(), 10);
        assert_eq!(class_number(-23).unwrap(), 3);
        assert_eq!(class_number(-249451).unwrap(), 100);
        // imprimitive forms are excluded
        assert_eq!(class_number(-12).unwrap(), 1);
        assert_eq!(class_number(-108).unwrap(), 3);
    }

    #[test]
    fn formula_examples() {
        assert_eq!(class_number_formula(-3, 2).unwrap(), 1);
        assert_eq!(class_number_formula(-3, 6).unwrap(), 3);
        assert_eq!(class_number_formula(-19, 1).unwrap(), 1);
        assert_eq!(class_number_formula(-4, 5).unwrap(), 2);
        assert!(class_number_formula(-12, 1).is_err());
    }

    #[test]
    fn decompositions() {
        assert_eq!(fundamental_decomposition(-108).unwrap(), (-3, 6));
        assert_eq!(fundamental_decomposition(-4).unwrap(), (-4, 1));
        assert_eq!(fundamental_decomposition(-48).unwrap(), (-3, 4));
        assert_eq!(fundamental_decomposition(-16).unwrap(), (-4, 2));
        assert_eq!(fundamental_decomposition(-32).unwrap(), (-8, 2));
        assert_eq!(fundamental_decomposition(-2299).unwrap(), (-19, 11));
        assert_eq!(fundamental_decomposition(-571).unwrap(), (-571, 1));
        assert!(fundamental_decomposition(-6).is_err());
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 3), 0);
        assert_eq!(kronecker(-4, 7), -1);
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(-15, 2), 1);
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-7, -1), -1);
        assert_eq!(kronecker(5, -1), 1);
    }

    #[test]
    fn invariants_examples() {
        assert_eq!(disc_invariants(-15).unwrap(), DiscInvariants { h: 2, h2: 2, w: 1 });
        assert_eq!(disc_invariants(-23).unwrap(), DiscInvariants { h: 3, h2: 1, w: 1 });
        assert_eq!(disc_invariants(-3).unwrap(), DiscInvariants { h: 1, h2: 1, w: 3 });
        assert_eq!(disc_invariants(-4).unwrap().w, 2);
    }

    #[test]
    fn class_number_one() {
        assert_eq!(
            discriminants_with_class_number(1, 25594),
            vec![-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163]
        );
    }

    #[test]
    fn sieve_matches_enumeration() {
        let h = class_numbers_up_to(3000);
        for n in 3..=3000i64 {
            let d = -n;
            let expect = if matches!(d.rem_euclid(4), 0 | 1) { class_number(d).unwrap() } else { 0 };
            assert_eq!(h[n as usize] as u64, expect, "{d}");
        }
    }

    #[test]
    fn criterion_one_family_size() {
        // PARI: #{D : |D| ≤ 20011, h(D) ≤ 12} = 1130
        let h = class_numbers_up_to(20011);
        assert_eq!(h.iter().filter(|&&c| (1..=12).contains(&c)).count(), 1130);
    }

    fn order() -> impl Strategy<Value = (i64, u64)> {
        (1u64..200).prop_flat_map(|f| {
            let top = (1_000_000 / (f * f) as i64).max(4);
            (3i64..=top).prop_filter_map("fundamental", move |n| is_fundamental(-n).then_some((-n, f)))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn formula_matches_enumeration((d0, f) in order()) {
            let d = d0 * (f * f) as i64;
            prop_assume!(d >= -1_000_000);
            let h = class_number(d).unwrap();
            prop_assert_eq!(class_number_formula(d0, f).unwrap(), h);
            prop_assert_eq!(h % class_number(d0).unwrap(), 0);
        }

        #[test]
        fn two_torsion_shape(n in 3i64..100_000) {
            let d = -n;
            prop_assume!(matches!(d.rem_euclid(4), 0 | 1));
            let inv = disc_invariants(d).unwrap();
            prop_assert!(inv.h2.is_power_of_two());
            prop_assert_eq!(inv.h % inv.h2, 0);
            prop_assert_eq!(inv.h % 2, inv.h2 % 2);
        }

        #[test]
        fn kronecker_multiplicative(d in -100_000i64..-2, m in 1i64..5000, n in 1i64..5000) {
            prop_assume!(matches!(d.rem_euclid(4), 0 | 1));
            prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
        }

        #[test]
        fn kronecker_is_euler(d in -100_000i64..-2, i in 1usize..1228) {
            prop_assume!(matches!(d.rem_euclid(4), 0 | 1));
            let p = crate::arith::primes_up_to(10_000)[i] as i64;
            prop_assume!(d % p != 0);
            let e = crate::arith::pow_mod(d.rem_euclid(p) as u64, (p as u64 - 1) / 2, p as u64);
            let legendre = if e == 1 { 1 } else { -1 };
            prop_assert_eq!(kronecker(d, p), legendre);
        }
    }
}
