//! Classical modular polynomials Φ_ℓ(X, Y) loaded from text files.
//!
//! File layout: a header line `ell <ℓ>`, then one `<degX> <degY> <coefficient>`
//! line per stored term with degX ≥ degY, in descending (degX, degY) order.
//! The remaining terms follow by symmetry.

use crate::arith::{add_mod, is_prime, mul_mod};
use crate::error::{Error, Result};
use crate::ffpoly::FpPoly;
use crate::zpoly::{big_mod, BiIntPoly};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

pub const DEFAULT_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/modpoly");
pub const DIR_ENV: &str = "CMHCP_MODPOLY_DIR";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPolyTable {
    pub level: u64,
    /// All terms, symmetric completion included.
    pub poly: BiIntPoly,
    stored: usize,
}

impl ModPolyTable {
    /// Number of terms in the file (degX ≥ degY only).
    pub fn stored_terms(&self) -> usize {
        self.stored
    }

    /// Reduces all coefficients modulo p, for repeated instantiation.
    pub fn reduce(&self, p: u64) -> PhiModP {
        let n = self.level as usize + 1;
        let mut rows = vec![vec![0u64; n + 1]; n + 1];
        for (&(i, j), c) in self.poly.terms() {
            rows[i][j] = big_mod(c, p);
        }
        PhiModP { level: self.level, p, rows }
    }
}

/// Φ_ℓ mod p; `rows[i][k]` is the coefficient of X^i Y^k.
#[derive(Clone, Debug)]
pub struct PhiModP {
    pub level: u64,
    pub p: u64,
    rows: Vec<Vec<u64>>,
}

impl PhiModP {
    /// Φ_ℓ(X, j) ∈ F_p[X].
    pub fn at(&self, j: u64) -> FpPoly {
        let p = self.p;
        let j = j % p;
        let c = self
            .rows
            .iter()
            .map(|row| row.iter().rev().fold(0u64, |acc, &a| add_mod(mul_mod(acc, j, p), a, p)))
            .collect();
        FpPoly::new(p, c)
    }
}

pub fn parse_table(text: &str) -> Result<ModPolyTable> {
    let bad = |m: String| Error::FormatError(m);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| bad("empty file".into()))?;
    let mut hw = header.split_whitespace();
    if hw.next() != Some("ell") {
        return Err(bad(format!("bad header {header:?}")));
    }
    let level: u64 = hw
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| bad(format!("bad header {header:?}")))?;
    if hw.next().is_some() || !is_prime(level) {
        return Err(bad(format!("bad header {header:?}")));
    }
    let mut poly = BiIntPoly::new();
    let mut stored = 0;
    let mut prev: Option<(usize, usize)> = None;
    for (n, line) in lines.enumerate() {
        let w: Vec<&str> = line.split_whitespace().collect();
        if w.len() != 3 {
            return Err(bad(format!("line {}: expected three fields", n + 2)));
        }
        let i: usize = w[0].parse().map_err(|_| bad(format!("line {}: bad degree", n + 2)))?;
        let j: usize = w[1].parse().map_err(|_| bad(format!("line {}: bad degree", n + 2)))?;
        let c: BigInt = w[2].parse().map_err(|_| bad(format!("line {}: bad coefficient", n + 2)))?;
        if i < j {
            return Err(bad(format!("line {}: degX < degY", n + 2)));
        }
        if prev.is_some_and(|q| q <= (i, j)) {
            return Err(bad(format!("line {}: terms out of order", n + 2)));
        }
        if c.is_zero() {
            return Err(bad(format!("line {}: zero coefficient", n + 2)));
        }
        prev = Some((i, j));
        stored += 1;
        if i != j {
            poly.add_term(j, i, c.clone());
        }
        poly.add_term(i, j, c);
    }
    let t = ModPolyTable { level, poly, stored };
    validate(&t)?;
    Ok(t)
}

fn validate(t: &ModPolyTable) -> Result<()> {
    let n = t.level as usize + 1;
    let bad = |m: &str| Error::InvariantViolation(format!("Φ_{}: {m}", t.level));
    if t.poly.deg_x() != n || t.poly.deg_y() != n {
        return Err(bad("degree is not ℓ+1"));
    }
    if !t.poly.coeff(n, 0).is_one() {
        return Err(bad("X^(ℓ+1) coefficient is not 1"));
    }
    if !t.poly.coeff(n, n).is_zero() {
        return Err(bad("X^(ℓ+1) Y^(ℓ+1) term present"));
    }
    for (&(i, j), c) in t.poly.terms() {
        if &t.poly.coeff(j, i) != c {
            return Err(bad("not symmetric"));
        }
    }
    Ok(())
}

/// Φ_ℓ ≡ (X^ℓ − Y)(X − Y^ℓ) mod ℓ.
pub fn kronecker_congruence_holds(t: &ModPolyTable) -> bool {
    let l = t.level as usize;
    let mut expect: HashMap<(usize, usize), u64> = HashMap::new();
    let m = t.level;
    expect.insert((l + 1, 0), 1);
    expect.insert((0, l + 1), 1);
    expect.insert((l, l), m - 1);
    *expect.entry((1, 1)).or_insert(0) += m - 1;
    expect.retain(|_, v| {
        *v %= m;
        *v != 0
    });
    let mut seen = 0;
    for (&(i, j), c) in t.poly.terms() {
        let r = big_mod(c, m);
        if r == 0 {
            continue;
        }
        if expect.get(&(i, j)) != Some(&r) {
            return false;
        }
        seen += 1;
    }
    seen == expect.len()
}

pub fn table_path(level: u64, dir: &Path) -> PathBuf {
    dir.join(format!("phi_{level}.txt"))
}

pub fn load_table(level: u64, dir: &Path) -> Result<ModPolyTable> {
    let path = table_path(level, dir);
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::LevelUnavailable(level)),
        Err(e) => return Err(Error::FormatError(format!("{}: {e}", path.display()))),
    };
    let t = parse_table(&text)?;
    if t.level != level {
        return Err(Error::FormatError(format!("{} holds level {}", path.display(), t.level)));
    }
    Ok(t)
}

/// Levels present in a data directory, ascending.
pub fn shipped_levels(dir: &Path) -> Vec<u64> {
    let mut v: Vec<u64> = std::fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| {
                let name = e.ok()?.file_name().into_string().ok()?;
                name.strip_prefix("phi_")?.strip_suffix(".txt")?.parse().ok()
            })
            .collect()
        })
        .unwrap_or_default();
    v.sort_unstable();
    v
}

pub fn default_dir() -> PathBuf {
    std::env::var_os(DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_DIR))
}

const REDUCED_CACHE: usize = 256;

/// Lazily loaded tables with a small cache of reductions mod p.
#[derive(Debug)]
pub struct ModPolyDb {
    dir: PathBuf,
    tables: Mutex<HashMap<u64, Arc<ModPolyTable>>>,
    reduced: Mutex<HashMap<(u64, u64), Arc<PhiModP>>>,
}

impl ModPolyDb {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ModPolyDb { dir: dir.into(), tables: Mutex::default(), reduced: Mutex::default() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn table(&self, level: u64) -> Result<Arc<ModPolyTable>> {
        if let Some(t) = self.tables.lock().unwrap().get(&level) {
            return Ok(t.clone());
        }
        let t = Arc::new(load_table(level, &self.dir)?);
        self.tables.lock().unwrap().insert(level, t.clone());
        Ok(t)
    }

    pub fn mod_p(&self, level: u64, p: u64) -> Result<Arc<PhiModP>> {
        if let Some(r) = self.reduced.lock().unwrap().get(&(level, p)) {
            return Ok(r.clone());
        }
        let r = Arc::new(self.table(level)?.reduce(p));
        let mut cache = self.reduced.lock().unwrap();
        if cache.len() >= REDUCED_CACHE {
            cache.clear();
        }
        cache.insert((level, p), r.clone());
        Ok(r)
    }
}

impl Default for ModPolyDb {
    fn default() -> Self {
        ModPolyDb::new(default_dir())
    }
}

/// Φ_ℓ(X, j) mod p.
pub fn instantiate(table: &ModPolyTable, j: u64, p: u64) -> FpPoly {
    table.reduce(p).at(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn dir() -> PathBuf {
        PathBuf::from(DEFAULT_DIR)
    }

    #[test]
    fn phi2() {
        let t = load_table(2, &dir()).unwrap();
        assert_eq!(t.stored_terms(), 7);
        assert_eq!(t.poly.len(), 11);
        assert_eq!(t.poly.coeff(3, 0), BigInt::one());
        assert_eq!(t.poly.coeff(0, 0), BigInt::from(-157_464_000_000_000i64));
        assert_eq!(t.poly.coeff(1, 2), BigInt::from(1488));
    }

    #[test]
    fn phi3_degrees() {
        let t = load_table(3, &dir()).unwrap();
        assert_eq!((t.poly.deg_x(), t.poly.deg_y()), (4, 4));
    }

    #[test]
    fn missing_level() {
        assert_eq!(load_table(9973, &dir()), Err(Error::LevelUnavailable(9973)));
    }

    #[test]
    fn instantiation() {
        let t2 = load_table(2, &dir()).unwrap();
        assert_eq!(instantiate(&t2, 0, 5), FpPoly::new(5, vec![0, 0, 0, 1]));
        assert_eq!(instantiate(&t2, 123_456, 1_000_003).deg(), 3);
        let t3 = load_table(3, &dir()).unwrap();
        for j in 0..3u64 {
            // (X^3 − j)(X − j^3)
            let k = FpPoly::new(3, vec![3 - j % 3, 1]).mul(&FpPoly::new(3, vec![(3 - j) % 3, 0, 0, 1]));
            assert_eq!(instantiate(&t3, j, 3), k);
        }
    }

    #[test]
    fn malformed() {
        assert!(matches!(parse_table("ell 2\n3 3 1\n3 0 1\n"), Err(Error::InvariantViolation(_))));
        assert!(matches!(parse_table("ell 4\n"), Err(Error::FormatError(_))));
        assert!(matches!(parse_table("ell 2\n0 1 5\n"), Err(Error::FormatError(_))));
        assert!(matches!(parse_table("ell 2\n2 0 x\n"), Err(Error::FormatError(_))));
        assert!(matches!(parse_table("ell 2\n1 0 1\n2 0 1\n"), Err(Error::FormatError(_))));
    }

    #[test]
    fn small_levels_consistent() {
        for l in [2u64, 3, 5, 7, 11, 13] {
            let t = load_table(l, &dir()).unwrap();
            assert!(kronecker_congruence_holds(&t), "{l}");
        }
    }

    #[test]
    fn db_caches() {
        let db = ModPolyDb::new(dir());
        let a = db.mod_p(3, 101).unwrap();
        let b = db.mod_p(3, 101).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.at(5), instantiate(&db.table(3).unwrap(), 5, 101));
        assert_eq!(db.table(9973).unwrap_err(), Error::LevelUnavailable(9973));
    }
}
