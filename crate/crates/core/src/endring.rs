//! Discriminant of the endomorphism ring of an ordinary curve over F_p.
//!
//! a_p² − 4p = v²·D0; End has discriminant f²·D0 for some f | v. Candidates are
//! filtered by class number and the rest is settled by walking ℓ-volcanoes.

use crate::arith::{factor_u64, is_prime};
use crate::ecfp::{trace_of_frobenius, CurveFp};
use crate::error::{Error, Result};
use crate::ffpoly::{find_roots, Rng};
use crate::modpoly::ModPolyDb;
use crate::quadforms::{class_number_formula, Discriminant};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

const RHO_BUDGET: u64 = 1_000_000;
const TRIAL_LIMIT: u32 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VolcanoWalk {
    pub ell: u64,
    pub start_j: u64,
    pub path: Vec<u64>,
    pub floor_distance: u32,
}

/// Prime factorization, ascending. Cofactors above 64 bits left after trial
/// division are only accepted when prime.
pub fn factor_integer(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    if n.is_zero() {
        return Err(Error::Precondition("factor_integer(0)".into()));
    }
    let timeout = || Error::FactorizationTimeout(n.to_string());
    if let Some(m) = n.to_u64() {
        let f = factor_u64(m, RHO_BUDGET).ok_or_else(timeout)?;
        return Ok(f.into_iter().map(|(p, e)| (BigUint::from(p), e)).collect());
    }
    let mut out = Vec::new();
    let mut m = n.clone();
    let mut d = 2u32;
    while d <= TRIAL_LIMIT {
        let mut e = 0;
        while (&m % d).is_zero() {
            m /= d;
            e += 1;
        }
        if e > 0 {
            out.push((BigUint::from(d), e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if let Some(r) = m.to_u64() {
        for (p, e) in factor_u64(r, RHO_BUDGET).ok_or_else(timeout)? {
            out.push((BigUint::from(p), e));
        }
    } else if probable_prime(&m) {
        out.push((m, 1));
    } else {
        return Err(timeout());
    }
    Ok(out)
}

fn probable_prime(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'outer: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// (D0, v) with a_p² − 4p = v²·D0 and D0 fundamental.
pub fn frobenius_decomposition(p: u64, a_p: i64) -> Result<(i64, u64)> {
    let delta = (a_p as i128).pow(2) - 4 * p as i128;
    if a_p == 0 || delta >= 0 {
        return Err(Error::Precondition(format!("need 0 < a_p² < 4p, got p = {p}, a_p = {a_p}")));
    }
    let n = BigUint::from(delta.unsigned_abs());
    let (mut s, mut k) = (BigUint::one(), BigUint::one());
    for (q, e) in factor_integer(&n)? {
        s *= q.pow(e % 2);
        k *= q.pow(e / 2);
    }
    let s: i64 = s.to_i64().ok_or_else(|| Error::OutOfRange(i64::MIN))?;
    let k = k.to_u64().expect("v² ≤ 4p");
    if (-s).rem_euclid(4) == 1 {
        Ok((-s, k))
    } else {
        Ok((-4 * s, k / 2))
    }
}

fn divisors(v: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (q, e) in factor_u64(v, RHO_BUDGET).expect("v is small") {
        let n = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= q;
            for i in 0..n {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Divisors f of v with h(f²·D0) = h_target, ascending.
pub fn conductor_candidates(v: u64, d0: i64, h_target: u64) -> Vec<u64> {
    divisors(v.max(1))
        .into_iter()
        .filter(|&f| class_number_formula(d0, f).is_ok_and(|h| h == h_target))
        .collect()
}

fn valuation(mut n: u64, l: u64) -> u32 {
    let mut e = 0;
    while n % l == 0 {
        n /= l;
        e += 1;
    }
    e
}

struct Neighbours<'a> {
    db: &'a ModPolyDb,
    ell: u64,
    p: u64,
    rng: Rng,
}

impl Neighbours<'_> {
    fn of(&mut self, j: u64) -> Result<Vec<u64>> {
        let phi = self.db.mod_p(self.ell, self.p)?;
        Ok(find_roots(&phi.at(j), &mut self.rng))
    }
}

fn is_special(j: u64, p: u64) -> bool {
    j == 0 || j == 1728 % p
}

/// Non-backtracking walk from `start` through `first`, stopping at a floor
/// vertex or after `cap` steps. `None` if it meets j = 0 or 1728.
fn walk(nb: &mut Neighbours, start: u64, first: u64, cap: u32) -> Result<Option<VolcanoWalk>> {
    let mut path = vec![start, first];
    loop {
        let cur = *path.last().unwrap();
        if is_special(cur, nb.p) {
            return Ok(None);
        }
        let steps = path.len() as u32 - 1;
        let roots = nb.of(cur)?;
        if roots.len() <= 1 || steps >= cap {
            return Ok(Some(VolcanoWalk { ell: nb.ell, start_j: start, path, floor_distance: steps }));
        }
        let prev = path[path.len() - 2];
        let next = roots.iter().copied().find(|&r| r != prev).unwrap_or(prev);
        path.push(next);
    }
}

/// v_ℓ of the conductor of End(E_j), given the volcano depth d = v_ℓ(v) ≥ 1.
pub fn volcano_level(j: u64, ell: u64, p: u64, d: u32, db: &ModPolyDb) -> Result<u32> {
    let j = j % p;
    if is_special(j, p) {
        return Err(Error::SpecialVertex);
    }
    if d == 0 {
        return Ok(0);
    }
    let mut nb = Neighbours { db, ell, p, rng: Rng::new(p ^ (j << 8) ^ ell) };
    let roots = nb.of(j)?;
    if roots.len() <= 1 {
        return Ok(d);
    }
    let mut best: Option<u32> = None;
    for r in roots {
        if let Some(w) = walk(&mut nb, j, r, d)? {
            best = Some(best.map_or(w.floor_distance, |b| b.min(w.floor_distance)));
        }
    }
    let s = best.ok_or(Error::SpecialVertex)?;
    Ok(d.saturating_sub(s))
}

fn resolve(e: &CurveFp, d0: i64, v: u64, mut cands: Vec<u64>, db: &ModPolyDb) -> Result<Discriminant> {
    let j = e.j_invariant();
    let fac = factor_u64(v.max(1), RHO_BUDGET).expect("v is small");
    for (l, depth) in fac {
        if cands.len() <= 1 {
            break;
        }
        let first = valuation(cands[0], l);
        if cands.iter().all(|&f| valuation(f, l) == first) {
            continue;
        }
        let level = volcano_level(j, l, e.p, depth, db)?;
        cands.retain(|&f| valuation(f, l) == level);
    }
    match cands.as_slice() {
        [f] => Discriminant::new(d0 * (*f as i64).pow(2)),
        [] => Err(Error::NoCandidate),
        _ => Err(Error::InvariantViolation("conductor left ambiguous".into())),
    }
}

fn frobenius_data(e: &CurveFp) -> Result<(i64, u64)> {
    let fr = trace_of_frobenius(e);
    if fr.a_p == 0 {
        return Err(Error::Precondition(format!("supersingular curve over F_{}", e.p)));
    }
    frobenius_decomposition(e.p, fr.a_p)
}

/// disc(End(E)) for an ordinary curve, among the orders of class number `h_target`.
pub fn endo_discriminant(e: &CurveFp, h_target: u64, db: &ModPolyDb) -> Result<Discriminant> {
    let (d0, v) = frobenius_data(e)?;
    let cands = conductor_candidates(v, d0, h_target);
    if cands.is_empty() {
        return Err(Error::NoCandidate);
    }
    resolve(e, d0, v, cands, db)
}

/// disc(End(E)) with no class number hint: every ℓ | v is settled on its volcano.
pub fn endomorphism_discriminant(e: &CurveFp, db: &ModPolyDb) -> Result<Discriminant> {
    let (d0, v) = frobenius_data(e)?;
    let j = e.j_invariant();
    let mut f = 1u64;
    for (l, depth) in factor_u64(v.max(1), RHO_BUDGET).expect("v is small") {
        debug_assert!(is_prime(l));
        f *= l.pow(volcano_level(j, l, e.p, depth, db)?);
    }
    Discriminant::new(d0 * (f as i64).pow(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecfp::curve_from_j;
    use crate::hcp::hilbert_class_poly;
    use crate::quadforms::class_number;
    use crate::zpoly::reduce_mod_p;
    use proptest::prelude::{prop_assert_eq, proptest};
    use std::collections::HashMap;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn factoring() {
        let f = |n: u64| factor_integer(&big(n)).unwrap();
        assert_eq!(f(108), vec![(big(2), 2), (big(3), 3)]);
        assert_eq!(f(1), vec![]);
        assert_eq!(f(16), vec![(big(2), 4)]);
        let p: BigUint = "170141183460469231731687303715884105727".parse().unwrap();
        assert_eq!(factor_integer(&(&p * 12u32)).unwrap(), vec![(big(2), 2), (big(3), 1), (p.clone(), 1)]);
        assert!(matches!(factor_integer(&(&p * &p)), Err(Error::FactorizationTimeout(_))));
    }

    #[test]
    fn decompositions() {
        assert_eq!(frobenius_decomposition(31, 4).unwrap(), (-3, 6));
        assert_eq!(frobenius_decomposition(5, 2).unwrap(), (-4, 2));
        assert_eq!(frobenius_decomposition(7, 3).unwrap(), (-19, 1));
        assert!(frobenius_decomposition(7, 0).is_err());
        assert!(frobenius_decomposition(7, 6).is_err());
    }

    #[test]
    fn candidates() {
        assert_eq!(conductor_candidates(6, -3, 1), vec![1, 2, 3]);
        assert_eq!(conductor_candidates(6, -3, 3), vec![6]);
        assert_eq!(conductor_candidates(1, -19, 1), vec![1]);
        assert_eq!(conductor_candidates(6, -3, 5), Vec::<u64>::new());
    }

    #[test]
    fn volcano_levels() {
        let db = ModPolyDb::default();
        assert_eq!(volcano_level(28, 3, 31, 1, &db).unwrap(), 1);
        assert_eq!(volcano_level(29, 3, 31, 1, &db).unwrap(), 0);
        assert_eq!(volcano_level(29, 2, 31, 1, &db).unwrap(), 1);
        assert_eq!(volcano_level(0, 2, 31, 1, &db), Err(Error::SpecialVertex));
        assert_eq!(volcano_level(29, 9973, 31, 1, &db), Err(Error::LevelUnavailable(9973)));
    }

    #[test]
    fn endomorphism_rings() {
        let db = ModPolyDb::default();
        let e = CurveFp::new(5, 1, 1).unwrap();
        assert_eq!(endo_discriminant(&e, 1, &db).unwrap().d, -11);
        let e = curve_from_j(31, 28).unwrap();
        assert_eq!(endo_discriminant(&e, 1, &db).unwrap().d, -27);
        assert_eq!(endomorphism_discriminant(&e, &db).unwrap().d, -27);
        let e = curve_from_j(31, 29).unwrap();
        assert_eq!(endo_discriminant(&e, 1, &db).unwrap().d, -12);
        assert_eq!(endo_discriminant(&e, 7, &db), Err(Error::NoCandidate));
        // j = 1728 is supersingular mod 31
        let e = curve_from_j(31, 1728).unwrap();
        assert!(matches!(endo_discriminant(&e, 1, &db), Err(Error::Precondition(_))));
    }

    /// The D with f | v whose H_D vanishes at j mod p.
    fn oracle(p: u64, j: u64, d0: i64, v: u64, polys: &mut HashMap<i64, crate::zpoly::IntPoly>) -> Vec<i64> {
        divisors(v)
            .into_iter()
            .map(|f| d0 * (f as i64).pow(2))
            .filter(|&d| {
                let h = polys.entry(d).or_insert_with(|| hilbert_class_poly(d).unwrap());
                reduce_mod_p(h, p).eval(j) == 0
            })
            .collect()
    }

    #[test]
    fn agrees_with_root_matching() {
        let db = ModPolyDb::default();
        let mut polys = HashMap::new();
        for p in crate::arith::primes_up_to(80).into_iter().filter(|&p| p >= 5) {
            for j in 1..p {
                if j == 1728 % p {
                    continue;
                }
                let e = curve_from_j(p, j).unwrap();
                let a = trace_of_frobenius(&e).a_p;
                if a == 0 {
                    continue;
                }
                let (d0, v) = frobenius_decomposition(p, a).unwrap();
                let want = oracle(p, j, d0, v, &mut polys);
                assert_eq!(want.len(), 1, "p = {p}, j = {j}");
                let h = class_number(want[0]).unwrap();
                assert_eq!(endo_discriminant(&e, h, &db).unwrap().d, want[0], "p = {p}, j = {j}");
                assert_eq!(endomorphism_discriminant(&e, &db).unwrap().d, want[0], "p = {p}, j = {j}");
            }
        }
    }

    proptest! {
        #[test]
        fn decomposition_identity(p in 5u64..100_000, t in 1u64..1000) {
            let p = crate::arith::next_prime(p);
            let bound = 2 * crate::arith::isqrt(p);
            let a = (t % bound.max(1)).max(1) as i64;
            prop_assume_ordinary(p, a)?;
            let (d0, v) = frobenius_decomposition(p, a).unwrap();
            prop_assert_eq!((v as i128).pow(2) * d0 as i128, (a as i128).pow(2) - 4 * p as i128);
            prop_assert_eq!(Discriminant::new(d0).unwrap().f, 1);
        }
    }

    fn prop_assume_ordinary(p: u64, a: i64) -> std::result::Result<(), proptest::test_runner::TestCaseError> {
        if (a as i128).pow(2) >= 4 * p as i128 {
            return Err(proptest::test_runner::TestCaseError::reject("not ordinary"));
        }
        Ok(())
    }
}
