//! Word-size modular arithmetic and primality.

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Multiplication by a fixed factor modulo p < 2^63 using a precomputed
/// quotient (Shoup), avoiding 128-bit division in hot loops.
#[derive(Clone, Copy, Debug)]
pub struct MulBy {
    w: u64,
    wq: u64,
    p: u64,
}

impl MulBy {
    pub fn new(w: u64, p: u64) -> Self {
        debug_assert!(w < p && p < 1 << 63);
        MulBy { w, wq: (((w as u128) << 64) / p as u128) as u64, p }
    }

    #[inline]
    pub fn mul(&self, a: u64) -> u64 {
        let q = ((a as u128 * self.wq as u128) >> 64) as u64;
        let r = a.wrapping_mul(self.w).wrapping_sub(q.wrapping_mul(self.p));
        fold(r, self.p)
    }
}

/// r mod p for r < 2p < 2^64, without a data-dependent branch.
#[inline]
fn fold(r: u64, p: u64) -> u64 {
    let t = r.wrapping_sub(p);
    if p < 1 << 63 {
        t.wrapping_add(p & ((t as i64 >> 63) as u64))
    } else if r >= p {
        t
    } else {
        r
    }
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    if m < 1 << 63 {
        fold(a + b, m)
    } else {
        let s = a as u128 + b as u128;
        if s >= m as u128 {
            (s - m as u128) as u64
        } else {
            s as u64
        }
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    let (r, borrow) = a.overflowing_sub(b);
    r.wrapping_add(m & (borrow as u64).wrapping_neg())
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m < 1 << 63 {
        let (mut r0, mut r1) = (m as i64, (a % m) as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        return (r0 == 1).then(|| t0.rem_euclid(m as i64) as u64);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Reduce a signed integer into `[0, m)`.
#[inline]
pub fn reduce_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    if c <= 2 {
        return 2;
    }
    if c % 2 == 0 {
        c += 1;
    }
    while !is_prime(c) {
        c += 2;
    }
    c
}

/// Largest prime strictly below `n`.
pub fn prev_prime(n: u64) -> Option<u64> {
    let mut c = n.checked_sub(1)?;
    while c >= 2 {
        if is_prime(c) {
            return Some(c);
        }
        c -= 1;
    }
    None
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut k = i * i;
            while k <= n {
                sieve[k] = false;
                k += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).map_or(true, |v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |v| v <= n) {
        x += 1;
    }
    x
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).map_or(true, |v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).map_or(false, |v| v <= n) {
        x += 1;
    }
    x
}

/// Jacobi symbol (a/n) for odd positive n.
pub fn jacobi(a: i128, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i128) as u64;
    let mut n = n;
    let mut t = 1i32;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Square root of a quadratic residue modulo an odd prime (Tonelli-Shanks).
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Brent's variant of Pollard rho; `None` when the iteration budget runs out.
fn rho(n: u64, budget: u64) -> Option<u64> {
    if n % 2 == 0 {
        return Some(2);
    }
    let mut spent = 0u64;
    for c in 1..n {
        let f = |x: u64| add_mod(mul_mod(x, x, n), c, n);
        let (mut y, mut r, mut q, m) = (2u64, 1u64, 1u64, 128u64);
        let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
            spent += r;
            if spent > budget {
                return None;
            }
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
    }
    None
}

/// Prime factorization by trial division to 10^6, then Brent rho.
/// `None` if rho exceeds `budget` iterations on some cofactor.
pub fn factor_u64(mut n: u64, budget: u64) -> Option<Vec<(u64, u32)>> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, e: u32, out: &mut Vec<(u64, u32)>| {
        if let Some(x) = out.iter_mut().find(|x| x.0 == p) {
            x.1 += e;
        } else {
            out.push((p, e));
        }
    };
    let mut d = 2u64;
    while d <= 1_000_000 && d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            push(d, e, &mut out);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, 1, &mut out);
            continue;
        }
        let r = isqrt(m);
        if r * r == m {
            stack.push(r);
            stack.push(r);
            continue;
        }
        let g = rho(m, budget)?;
        stack.push(g);
        stack.push(m / g);
    }
    out.sort_unstable();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let sieve = primes_up_to(10_000);
        for n in 0..10_000u64 {
            assert_eq!(is_prime(n), sieve.binary_search(&n).is_ok(), "{n}");
        }
    }

    #[test]
    fn primality_large() {
        assert!(is_prime((1 << 61) - 1));
        assert!(!is_prime(3_215_031_751));
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert_eq!(next_prime(1 << 20), 1_048_583);
        assert_eq!(prev_prime(1 << 62), Some((1 << 62) - 57));
    }

    #[test]
    fn tonelli() {
        for &p in &[13u64, 17, 41, 97, 1_000_000_007, 998_244_353] {
            for a in 1..200u64 {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(mul_mod(r, r, p), a % p);
                } else {
                    assert_eq!(jacobi(a as i128, p), -1);
                }
            }
        }
    }

    #[test]
    fn factoring() {
        assert_eq!(factor_u64(108, 1_000_000), Some(vec![(2, 2), (3, 3)]));
        assert_eq!(factor_u64(1, 1_000_000), Some(vec![]));
        let p = 1_000_000_007u64;
        let q = 998_244_353u64;
        assert_eq!(factor_u64(p * q, 1_000_000), Some(vec![(q, 1), (p, 1)]));
        assert_eq!(factor_u64(p * p, 1_000_000), Some(vec![(p, 2)]));
        let n = 4_611_686_014_132_420_609u64; // (2^31 − 1)^2
        assert_eq!(factor_u64(n, 1_000_000), Some(vec![(2_147_483_647, 2)]));
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(4, 8), None);
        assert_eq!(isqrt(99), 9);
        assert_eq!(isqrt(u64::MAX), 4_294_967_295);
    }
}
