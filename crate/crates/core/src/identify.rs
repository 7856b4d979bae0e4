//! Deciding whether a monic integer polynomial is a Hilbert class polynomial.

use crate::arith::{is_prime, next_prime};
use crate::ecfp::{curve_from_j, ss_poly, trace_of_frobenius};
use crate::endring::endo_discriminant;
use crate::error::{Error, Result};
use crate::ffpoly::{distinct_degree_factors, is_squarefree, linear_part, split_linear, FpPoly, Rng};
use crate::hcp::hilbert_class_poly;
use crate::modpoly::ModPolyDb;
use crate::quadforms::{class_number, class_number_formula, fundamental_decomposition};
use crate::realroots::{count_real_roots, extremes_of, isolate_real_roots, Ratio};
use crate::zpoly::{
    exact_divide, ln_abs, multiplicity, reduce_mod_p, resultant_bivariate, resultant_bivariate_mod, BiResidues,
    IntPoly,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;
use std::sync::atomic::{AtomicU64, Ordering};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const PRIME_CAP: u64 = 1_000_000;
const AUX_PRIME_FLOOR: u64 = 1 << 20;

/// Rational CM j-invariants and their discriminants.
pub const CLASS_NUMBER_ONE: [(i64, i64); 13] = [
    (-3, 0),
    (-4, 1728),
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-12, 54000),
    (-16, 287496),
    (-19, -884736),
    (-27, -12288000),
    (-28, 16581375),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Alg1,
    Alg2,
    Screen,
    RealRootBaseline,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentifyOutcome {
    pub is_hcp: bool,
    pub discriminant: Option<i64>,
    pub witness_prime: Option<u64>,
    pub method: Method,
    pub primes_tried: u64,
    pub grh_conditional: bool,
    /// false only when the final comparison with H_D was skipped.
    pub verified: bool,
}

impl IdentifyOutcome {
    fn no(method: Method, witness: Option<u64>, tried: u64) -> Self {
        IdentifyOutcome {
            is_hcp: false,
            discriminant: None,
            witness_prime: witness,
            method,
            primes_tried: tried,
            grh_conditional: method == Method::Alg1,
            verified: true,
        }
    }

    fn yes(method: Method, d: Option<i64>, witness: Option<u64>, tried: u64) -> Self {
        IdentifyOutcome { is_hcp: true, discriminant: d, ..IdentifyOutcome::no(method, witness, tried) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundSet {
    pub ell_bound: u64,
    pub p_min: u64,
    pub disc_search_bound: u64,
    pub gamma: f64,
}

fn llog(x: f64) -> f64 {
    x.ln().ln()
}

pub fn bounds(h: u64) -> BoundSet {
    assert!(h >= 1, "class number is positive");
    let hf = h as f64;
    let t = llog(hf + 1.0) + 4.0;
    let ell = (2.15 * hf.ln() + 4.0 * t.ln() + 24.0).powi(2);
    let p_min = 37.0 * hf * hf * t.powi(4);
    let c = 12.0 * (2.0 * EULER_GAMMA).exp() / std::f64::consts::PI;
    let disc = c * c * hf * hf * t.powi(4);
    BoundSet { ell_bound: ell.ceil() as u64, p_min: p_min.ceil() as u64, disc_search_bound: disc.ceil() as u64, gamma: EULER_GAMMA }
}

/// log of the largest coefficient of H_D is at most this (natural log).
pub fn height_bound(h: u64) -> f64 {
    let hf = h as f64;
    let t = llog(hf + 1.0) + 4.0;
    235.0 * hf * (hf + 1.0).ln().powi(2) * t * t
}

fn check_input(h: &IntPoly) -> Result<usize> {
    if h.deg() < 1 || !h.is_monic() {
        return Err(Error::Precondition("input must be monic of positive degree".into()));
    }
    Ok(h.degree())
}

fn degree_one_lookup(h: &IntPoly) -> Option<i64> {
    if h.degree() != 1 {
        return None;
    }
    let j = -h.coeff(0);
    CLASS_NUMBER_ONE.iter().find(|&&(_, r)| j == BigInt::from(r)).map(|&(d, _)| d)
}

fn is_power_of_two(n: u64) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// h⁺ | h, h⁺ a power of two, h⁺ ≡ h (mod 2).
fn admissible_real_count(n: u64, h: u64) -> bool {
    is_power_of_two(n) && h % n == 0 && n % 2 == h % 2
}

static STEP7_ARRIVALS: AtomicU64 = AtomicU64::new(0);

/// Inputs to Algorithm 1 with H | G but H ∤ G/H at the final division test.
pub fn step7_count() -> u64 {
    STEP7_ARRIVALS.load(Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Alg1Verdict {
    pub is_hcp: bool,
    /// The ℓ at which the verdict was reached; `None` if the ℓ(h) bound ran out.
    pub ell: Option<u64>,
}

fn aux_prime() -> u64 {
    next_prime(AUX_PRIME_FLOOR)
}

/// Algorithm 1 (false verdicts assume GRH).
pub fn algorithm1(h: &IntPoly, db: &ModPolyDb) -> Result<Alg1Verdict> {
    let deg = check_input(h)?;
    let limit = bounds(deg as u64).ell_bound;
    let q = aux_prime();
    let mut ell = 3;
    loop {
        if ell > limit {
            return Ok(Alg1Verdict { is_hcp: false, ell: None });
        }
        let hb = reduce_mod_p(h, ell);
        if !is_squarefree(&hb) || ss_poly(ell).rem(&hb).is_zero() {
            ell = next_prime(ell);
            continue;
        }
        let phi = db.table(ell)?;
        let verdict = |is_hcp| Ok(Alg1Verdict { is_hcp, ell: Some(ell) });
        let hq = reduce_mod_p(h, q);
        let gq = resultant_bivariate_mod(&BiResidues::new(&phi.poly, q), phi.poly.deg_y(), &hq, deg, phi.poly.deg_x())
            .expect("H is monic and the auxiliary prime is large");
        if !gq.rem(&hq).is_zero() {
            return verdict(false);
        }
        let g = resultant_bivariate(&phi.poly, h);
        let Ok(g1) = exact_divide(&g, h) else {
            return verdict(false);
        };
        if exact_divide(&g1, h).is_err() {
            STEP7_ARRIVALS.fetch_add(1, Ordering::Relaxed);
            return verdict(false);
        }
        return verdict(true);
    }
}

/// ord_H Res_Y(H(Y), Φ_ℓ(X, Y)).
pub fn m_ell(h: &IntPoly, ell: u64, db: &ModPolyDb) -> Result<usize> {
    check_input(h)?;
    let phi = db.table(ell)?;
    Ok(multiplicity(&resultant_bivariate(&phi.poly, h), h))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Alg2Options {
    /// Return D once it is determined, without comparing H with H_D.
    pub skip_final_hcp: bool,
}

/// Admissible numbers of rational roots: powers of two dividing h with h's parity.
fn two_power_set(h: u64) -> Vec<u64> {
    (0..64).map(|k| 1u64 << k).take_while(|&t| t <= h).filter(|&t| admissible_real_count(t, h)).collect()
}

enum Trial {
    Next,
    Done(bool, Option<i64>),
}

fn alg2_at_prime(h: &IntPoly, deg: u64, allowed: &[u64], p: u64, db: &ModPolyDb, rng: &mut Rng) -> Result<Trial> {
    let hb = reduce_mod_p(h, p);
    let lin = linear_part(&hb);
    let d = lin.deg().max(0) as u64;
    if d == 0 || !is_squarefree(&hb) {
        return Ok(Trial::Next);
    }
    if d < deg && !allowed.contains(&d) {
        return Ok(Trial::Done(false, None));
    }
    let mut roots = Vec::new();
    split_linear(&lin, rng, &mut roots);
    roots.sort_unstable();
    for j in roots {
        if j == 0 || j == 1728 % p {
            continue;
        }
        let e = curve_from_j(p, j)?;
        if trace_of_frobenius(&e).a_p == 0 {
            return Ok(Trial::Next);
        }
        match endo_discriminant(&e, deg, db) {
            Ok(disc) => return Ok(Trial::Done(true, Some(disc.d))),
            Err(Error::NoCandidate) => return Ok(Trial::Done(false, None)),
            Err(Error::SpecialVertex) => continue,
            Err(Error::LevelUnavailable(_) | Error::FactorizationTimeout(_)) => return Ok(Trial::Next),
            Err(e) => return Err(e),
        }
    }
    Ok(Trial::Next)
}

/// Algorithm 2: unconditional verdict, with D when H = H_D.
pub fn algorithm2(h: &IntPoly, db: &ModPolyDb, rng: &mut Rng, opts: Alg2Options) -> Result<IdentifyOutcome> {
    let deg = check_input(h)? as u64;
    if deg == 1 {
        let j = -h.coeff(0);
        if j.is_zero() {
            return Ok(IdentifyOutcome::yes(Method::Alg2, Some(-3), None, 0));
        }
        if j == BigInt::from(1728) {
            return Ok(IdentifyOutcome::yes(Method::Alg2, Some(-4), None, 0));
        }
    }
    let allowed = two_power_set(deg);
    let mut p = bounds(deg).p_min;
    if !is_prime(p) {
        p = next_prime(p);
    }
    for tried in 1..=PRIME_CAP {
        match alg2_at_prime(h, deg, &allowed, p, db, rng)? {
            Trial::Next => {}
            Trial::Done(false, _) => return Ok(IdentifyOutcome::no(Method::Alg2, Some(p), tried)),
            Trial::Done(true, d) => {
                let d = d.expect("discriminant found");
                if opts.skip_final_hcp {
                    let mut out = IdentifyOutcome::yes(Method::Alg2, Some(d), Some(p), tried);
                    out.verified = false;
                    return Ok(out);
                }
                let hd = hilbert_class_poly(d)?;
                return Ok(if &hd == h {
                    IdentifyOutcome::yes(Method::Alg2, Some(d), Some(p), tried)
                } else {
                    IdentifyOutcome::no(Method::Alg2, Some(p), tried)
                });
            }
        }
        p = next_prime(p);
    }
    Err(Error::ResourceExhausted(format!("{PRIME_CAP} primes tried")))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ScreenVerdict {
    Pass,
    /// `prime` is the witness for the modular screens.
    Reject { prime: Option<u64> },
}

/// Real-root count conditions.
pub fn screen_real_roots(h: &IntPoly) -> Result<ScreenVerdict> {
    let deg = check_input(h)? as u64;
    let n = count_real_roots(h)? as u64;
    Ok(if admissible_real_count(n, deg) { ScreenVerdict::Pass } else { ScreenVerdict::Reject { prime: None } })
}

/// Degree patterns of squarefree reductions at the first `prime_budget` usable odd primes.
pub fn screen_factor_patterns(h: &IntPoly, prime_budget: usize) -> ScreenVerdict {
    let deg = h.degree() as u64;
    let mut used = 0;
    let mut p = 3;
    while used < prime_budget {
        let hb = reduce_mod_p(h, p);
        if hb.deg() == deg as isize && is_squarefree(&hb) {
            used += 1;
            if !admissible_pattern(&hb, deg) {
                return ScreenVerdict::Reject { prime: Some(p) };
            }
        }
        p = next_prime(p);
    }
    ScreenVerdict::Pass
}

fn admissible_pattern(hb: &FpPoly, deg: u64) -> bool {
    let parts = distinct_degree_factors(hb);
    if parts.len() <= 1 {
        return true;
    }
    if parts.iter().any(|(d, _)| *d > 2) {
        return false;
    }
    let linear = parts.iter().find(|(d, _)| *d == 1).map_or(0, |(_, g)| g.deg() as u64);
    admissible_real_count(linear, deg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FrobeniusScreen {
    Reject { prime: u64 },
    /// The running gcd of the δ_p, written as f1²·D0.
    Pass { d0: i64, f1: u64 },
    /// No usable prime was found.
    Inconclusive,
}

fn is_square_i128(n: i128) -> bool {
    if n < 0 {
        return false;
    }
    let r = crate::arith::isqrt_u128(n as u128);
    r * r == n as u128
}

/// Frobenius-discriminant screen over degree-one primes of Q[X]/(H).
pub fn screen_frobenius(h: &IntPoly, prime_budget: usize) -> Result<FrobeniusScreen> {
    let deg = check_input(h)? as u64;
    let mut rng = Rng::new(0x5eed);
    let mut d: i128 = 0;
    let mut used = 0;
    let mut p = 5;
    let mut scanned = 0;
    while used < prime_budget && scanned < 1000 * prime_budget.max(1) {
        scanned += 1;
        let hb = reduce_mod_p(h, p);
        if is_squarefree(&hb) {
            let mut roots = Vec::new();
            split_linear(&linear_part(&hb), &mut rng, &mut roots);
            roots.sort_unstable();
            if let Some(&j) = roots.iter().find(|&&j| j != 0 && j != 1728 % p) {
                let fr = trace_of_frobenius(&curve_from_j(p, j)?);
                if fr.a_p != 0 && fr.delta != 0 {
                    used += 1;
                    if d == 0 {
                        d = fr.delta;
                    } else if !is_square_i128(d * fr.delta) {
                        return Ok(FrobeniusScreen::Reject { prime: p });
                    } else {
                        d = -(d.abs().gcd(&fr.delta.abs()));
                    }
                }
            }
        }
        p = next_prime(p);
    }
    if d == 0 {
        return Ok(FrobeniusScreen::Inconclusive);
    }
    let (d0, f1) = fundamental_decomposition(d as i64)?;
    // the order of discriminant f1²·D0 sits inside End, so h(D) | h(f1²·D0)
    if class_number_formula(d0, f1)? % deg != 0 {
        return Ok(FrobeniusScreen::Reject { prime: p });
    }
    Ok(FrobeniusScreen::Pass { d0, f1 })
}

/// The three screens, then Algorithm 2 for a verdict.
pub fn identify_screened(h: &IntPoly, db: &ModPolyDb, rng: &mut Rng) -> Result<IdentifyOutcome> {
    check_input(h)?;
    if let ScreenVerdict::Reject { prime } = screen_real_roots(h)? {
        return Ok(IdentifyOutcome::no(Method::Screen, prime, 0));
    }
    if let ScreenVerdict::Reject { prime } = screen_factor_patterns(h, 20) {
        return Ok(IdentifyOutcome::no(Method::Screen, prime, 0));
    }
    if degree_one_lookup(h).is_none() {
        if let FrobeniusScreen::Reject { prime } = screen_frobenius(h, 20)? {
            return Ok(IdentifyOutcome::no(Method::Screen, Some(prime), 0));
        }
    }
    let out = algorithm2(h, db, rng, Alg2Options::default())?;
    Ok(IdentifyOutcome { method: Method::Screen, discriminant: None, ..out })
}

fn ratio_gt(r: &Ratio, n: i64) -> bool {
    r.num > &r.den * n
}

fn ln_ratio(r: &Ratio) -> f64 {
    ln_abs(&r.num) - ln_abs(&r.den)
}

/// The real-root method: recover |D| from the extreme real root.
pub fn identify_via_real_roots(h: &IntPoly) -> Result<IdentifyOutcome> {
    let deg = check_input(h)? as u64;
    let method = Method::RealRootBaseline;
    if deg == 1 {
        return Ok(match degree_one_lookup(h) {
            Some(d) => IdentifyOutcome::yes(method, Some(d), None, 0),
            None => IdentifyOutcome::no(method, None, 0),
        });
    }
    let roots = isolate_real_roots(h)?;
    if !is_power_of_two(roots.len() as u64) {
        return Ok(IdentifyOutcome::no(method, None, 0));
    }
    let (max, min) = extremes_of(h, &roots, 64).expect("at least one real root");
    let (s, r) = if ratio_gt(&max, 1728) { (0, max) } else { (1, min.neg()) };
    let threshold = if s == 0 { 1_264_538 } else { 191_657 };
    if !ratio_gt(&r, threshold) {
        return Ok(IdentifyOutcome::no(method, None, 0));
    }
    // ln(r ∓ 744) = ln r + ln(1 ∓ 744/r)
    let shift = if s == 0 { -744.0 } else { 744.0 };
    let lr = ln_ratio(&r);
    let l = lr + (shift * (-lr).exp()).ln_1p();
    let abs_d = (l / std::f64::consts::PI).powi(2).round();
    if !abs_d.is_finite() || abs_d > 1e15 {
        return Ok(IdentifyOutcome::no(method, None, 0));
    }
    let d = -(abs_d as i64);
    if d.rem_euclid(4) != s {
        return Ok(IdentifyOutcome::no(method, None, 0));
    }
    if class_number(d).ok() != Some(deg) {
        return Ok(IdentifyOutcome::no(method, None, 0));
    }
    Ok(if &hilbert_class_poly(d)? == h {
        IdentifyOutcome::yes(method, Some(d), None, 0)
    } else {
        IdentifyOutcome::no(method, None, 0)
    })
}

/// Dispatches on the method; `Alg1` reports no discriminant.
pub fn identify(h: &IntPoly, method: Method, db: &ModPolyDb, rng: &mut Rng) -> Result<IdentifyOutcome> {
    match method {
        Method::Alg1 => {
            let v = algorithm1(h, db)?;
            let mut out = IdentifyOutcome::no(Method::Alg1, v.ell, 0);
            out.is_hcp = v.is_hcp;
            Ok(out)
        }
        Method::Alg2 => algorithm2(h, db, rng, Alg2Options::default()),
        Method::Screen => identify_screened(h, db, rng),
        Method::RealRootBaseline => identify_via_real_roots(h),
    }
}
