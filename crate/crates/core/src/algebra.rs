//! Finite Abelian groups and Galois fields.
//!
//! Field elements are encoded as integers `0..q` whose base-`p` digits are the
//! polynomial coefficients, least significant digit first.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest field order accepted by [`GaloisField::new`].
pub const MAX_FIELD_ORDER: u32 = 1 << 16;

/// Orders up to this size get full Cayley tables; larger ones use log tables.
const FULL_TABLE_LIMIT: u32 = 256;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, u)` with `q = p^u` when `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let (mut rest, mut u) = (q, 0);
    while rest % p == 0 {
        rest /= p;
        u += 1;
    }
    (rest == 1).then_some((p, u))
}

/// The cyclic group `Z_q` under addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicGroup {
    order: u32,
}

impl CyclicGroup {
    pub fn new(order: u32) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("group order must be positive"));
        }
        Ok(Self { order })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.order as u64) as u32
    }

    pub fn neg(&self, a: u32) -> u32 {
        (self.order - a % self.order) % self.order
    }
}

/// Polynomial over GF(p) as a coefficient vector, lowest degree first.
type Poly = Vec<u32>;

fn poly_trim(mut a: Poly) -> Poly {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
    a
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Poly {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    poly_trim(out)
}

/// Remainder of `a` modulo the monic polynomial `g`.
fn poly_rem(a: &[u32], g: &[u32], p: u32) -> Poly {
    let mut r = a.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        if lead != 0 {
            for (k, &gk) in g.iter().enumerate() {
                r[shift + k] = (r[shift + k] + p - (lead * gk) % p) % p;
            }
        }
        r.pop();
    }
    if r.is_empty() {
        r.push(0);
    }
    r
}

fn digits(mut x: u32, p: u32, len: usize) -> Poly {
    let mut v = vec![0u32; len];
    for d in v.iter_mut() {
        *d = x % p;
        x /= p;
    }
    v
}

fn undigits(v: &[u32], p: u32) -> u32 {
    v.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Monic polynomial of degree `deg` whose lower coefficients are the digits of `code`.
fn monic(code: u32, p: u32, deg: usize) -> Poly {
    let mut g = digits(code, p, deg);
    g.push(1);
    g
}

fn is_irreducible(g: &[u32], p: u32) -> bool {
    let u = g.len() - 1;
    for d in 1..=u / 2 {
        for code in 0..p.pow(d as u32) {
            let f = monic(code, p, d);
            if poly_rem(g, &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Smallest monic irreducible polynomial of degree `u` over GF(p).
///
/// Candidates are ordered by the integer whose base-`p` digits are
/// `(b_0, ..., b_{u-1})`, the same encoding used for field elements.
pub fn find_irreducible(p: u32, u: u32) -> Result<Vec<u32>> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("{p} is not prime")));
    }
    if u == 0 {
        return Err(Error::invalid("degree must be at least 1"));
    }
    let span = (p as u64).checked_pow(u).filter(|&s| s <= MAX_FIELD_ORDER as u64);
    let span = span.ok_or_else(|| Error::invalid(format!("field order {p}^{u} is too large")))?;
    (0..span as u32)
        .map(|code| monic(code, p, u as usize))
        .find(|g| is_irreducible(g, p))
        .ok_or_else(|| Error::internal(format!("no irreducible polynomial of degree {u} over GF({p})")))
}

#[derive(Debug, Clone)]
enum MulTables {
    Full(Vec<u32>),
    Log { log: Vec<u32>, exp: Vec<u32> },
}

/// GF(p^u) with precomputed arithmetic.
#[derive(Debug, Clone)]
pub struct GaloisField {
    p: u32,
    u: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Option<Vec<u32>>,
    mul: MulTables,
    inv: Vec<u32>,
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.u == other.u && self.modulus == other.modulus
    }
}

impl Eq for GaloisField {}

impl GaloisField {
    pub fn new(p: u32, u: u32) -> Result<Self> {
        let modulus = find_irreducible(p, u)?;
        let q = p.pow(u);
        let n = u as usize;
        let slow_mul = |a: u32, b: u32| -> u32 {
            let prod = poly_mul(&digits(a, p, n), &digits(b, p, n), p);
            undigits(&poly_rem(&prod, &modulus, p), p)
        };
        let slow_add = |a: u32, b: u32| -> u32 {
            let (x, y) = (digits(a, p, n), digits(b, p, n));
            let s: Poly = x.iter().zip(&y).map(|(a, b)| (a + b) % p).collect();
            undigits(&s, p)
        };

        let (add, mul) = if q <= FULL_TABLE_LIMIT {
            let mut add = vec![0u32; (q * q) as usize];
            let mut mul = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = slow_add(a, b);
                    mul[(a * q + b) as usize] = slow_mul(a, b);
                }
            }
            (Some(add), MulTables::Full(mul))
        } else {
            let gen = (2..q)
                .find(|&g| {
                    let mut x = 1;
                    for k in 1..q - 1 {
                        x = slow_mul(x, g);
                        if x == 1 {
                            return k == q - 1;
                        }
                    }
                    true
                })
                .unwrap_or(1);
            let mut exp = vec![0u32; (q - 1) as usize];
            let mut log = vec![0u32; q as usize];
            let mut x = 1;
            for (k, e) in exp.iter_mut().enumerate() {
                *e = x;
                log[x as usize] = k as u32;
                x = slow_mul(x, gen);
            }
            (None, MulTables::Log { log, exp })
        };

        let mut field = Self { p, u, q, modulus, add, mul, inv: vec![0; q as usize] };
        for a in 1..q {
            let b = (1..q).find(|&b| field.mul(a, b) == 1).expect("nonzero elements are invertible");
            field.inv[a as usize] = b;
        }
        Ok(field)
    }

    /// GF(q) for a prime power `q`.
    pub fn of_order(q: u32) -> Result<Self> {
        let (p, u) = prime_power(q).ok_or_else(|| Error::invalid(format!("{q} is not a prime power")))?;
        Self::new(p, u)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.u
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    /// Coefficients `(b_0, ..., b_u)` of the defining polynomial.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.add {
            Some(t) => t[(a * self.q + b) as usize],
            None if self.p == 2 => a ^ b,
            None => {
                let (mut a, mut b, mut out, mut scale) = (a, b, 0, 1);
                while a > 0 || b > 0 {
                    out += ((a % self.p + b % self.p) % self.p) * scale;
                    a /= self.p;
                    b /= self.p;
                    scale *= self.p;
                }
                out
            }
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        let (mut a, mut out, mut scale) = (a, 0, 1);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * scale;
            a /= self.p;
            scale *= self.p;
        }
        out
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.mul {
            MulTables::Full(t) => t[(a * self.q + b) as usize],
            MulTables::Log { log, exp } => {
                if a == 0 || b == 0 {
                    return 0;
                }
                let k = (log[a as usize] + log[b as usize]) % (self.q - 1);
                exp[k as usize]
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.inv[a as usize])
    }
}

/// An additive group used for `+` in Kronecker sums and difference matrices.
///
/// Prime-power orders default to the additive group of GF(q), other orders to `Z_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Group {
    Cyclic(CyclicGroup),
    Field(Arc<GaloisField>),
}

impl Group {
    pub fn for_order(q: u32) -> Result<Self> {
        if prime_power(q).is_some() {
            Ok(Group::Field(Arc::new(GaloisField::of_order(q)?)))
        } else {
            Ok(Group::Cyclic(CyclicGroup::new(q)?))
        }
    }

    pub fn cyclic(q: u32) -> Result<Self> {
        Ok(Group::Cyclic(CyclicGroup::new(q)?))
    }

    pub fn order(&self) -> u32 {
        match self {
            Group::Cyclic(g) => g.order(),
            Group::Field(f) => f.order(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Group::Cyclic(g) => format!("Z{}", g.order()),
            Group::Field(f) => format!("GF({})", f.order()),
        }
    }

    /// Parses names like `GF(4)`, `Z6`, or a bare order.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("unrecognised group `{s}`"));
        if let Some(rest) = s.strip_prefix("GF(").and_then(|r| r.strip_suffix(')')) {
            let q: u32 = rest.parse().map_err(|_| bad())?;
            return Ok(Group::Field(Arc::new(GaloisField::of_order(q)?)));
        }
        if let Some(rest) = s.strip_prefix('Z') {
            return Group::cyclic(rest.parse().map_err(|_| bad())?);
        }
        Group::for_order(s.parse().map_err(|_| bad())?)
    }

    fn check(&self, a: u32) -> Result<()> {
        if a >= self.order() {
            return Err(Error::invalid(format!("element {a} outside {}", self.name())));
        }
        Ok(())
    }

    /// Checked addition.
    pub fn try_add(&self, a: u32, b: u32) -> Result<u32> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    /// Unchecked addition; callers guarantee range.
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match self {
            Group::Cyclic(g) => g.add(a, b),
            Group::Field(f) => f.add(a, b),
        }
    }

    pub fn neg(&self, a: u32) -> u32 {
        match self {
            Group::Cyclic(g) => g.neg(a),
            Group::Field(f) => f.neg(a),
        }
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn latin(q: u32, op: impl Fn(u32, u32) -> u32, from: u32) -> bool {
        let size = (q - from) as usize;
        (from..q).all(|a| {
            let mut row: Vec<u32> = (from..q).map(|b| op(a, b)).collect();
            let mut col: Vec<u32> = (from..q).map(|b| op(b, a)).collect();
            row.sort();
            col.sort();
            row.dedup();
            col.dedup();
            row.len() == size && col.len() == size && row.iter().all(|&x| x >= from && x < q)
        })
    }

    #[test]
    fn irreducible_examples() {
        assert_eq!(find_irreducible(2, 1).unwrap(), vec![0, 1]);
        assert_eq!(find_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(find_irreducible(2, 3).unwrap(), vec![1, 1, 0, 1]);
        assert!(find_irreducible(4, 2).is_err());
    }

    #[test]
    fn irreducible_has_no_factorisation() {
        for q in 2..=64u32 {
            let Some((p, u)) = prime_power(q) else { continue };
            let g = find_irreducible(p, u).unwrap();
            for d in 1..u as usize {
                for a in 0..p.pow(d as u32) {
                    for b in 0..p.pow(u - d as u32) {
                        let f = monic(a, p, d);
                        let h = monic(b, p, u as usize - d);
                        assert_ne!(poly_mul(&f, &h, p), g, "GF({q})");
                    }
                }
            }
        }
    }

    #[test]
    fn field_examples() {
        let f3 = GaloisField::new(3, 1).unwrap();
        assert_eq!(f3.add(2, 2), 1);
        assert_eq!(f3.mul(2, 2), 1);
        let f4 = GaloisField::new(2, 2).unwrap();
        assert_eq!(f4.mul(2, 2), 3);
        assert_eq!(f4.add(2, 3), 1);
        let f2 = GaloisField::new(2, 1).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(f2.add(a, b), a ^ b);
            }
        }
    }

    #[test]
    fn field_axioms_up_to_64() {
        for q in 2..=64u32 {
            let Some(_) = prime_power(q) else { continue };
            let f = GaloisField::of_order(q).unwrap();
            assert!(latin(q, |a, b| f.add(a, b), 0), "add GF({q})");
            assert!(latin(q, |a, b| f.mul(a, b), 1), "mul GF({q})");
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a > 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    for c in 0..q {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    }
                }
            }
            // the multiplicative group is cyclic
            let cyclic = (1..q).any(|g| {
                let mut x = 1;
                (1..q).all(|k| {
                    x = f.mul(x, g);
                    (x == 1) == (k == q - 1)
                })
            });
            assert!(cyclic, "GF({q}) has no generator");
            if f.degree() >= 2 {
                let g = f.modulus();
                for x in 0..q.min(f.characteristic()) {
                    let v = g.iter().rev().fold(0, |acc, &c| (acc * x + c) % f.characteristic());
                    assert_ne!(v, 0);
                }
            }
        }
    }

    #[test]
    fn large_field_uses_log_tables() {
        let f = GaloisField::of_order(512).unwrap();
        for a in [1u32, 2, 3, 100, 511] {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            assert_eq!(f.add(a, a), 0);
        }
        let f = GaloisField::of_order(729).unwrap();
        assert_eq!(f.add(f.neg(400), 400), 0);
        assert_eq!(f.mul(f.inv(77).unwrap(), 77), 1);
    }

    #[test]
    fn cyclic_group() {
        let z3 = CyclicGroup::new(3).unwrap();
        assert_eq!(z3.add(2, 2), 1);
        for q in 1..=64u32 {
            let g = CyclicGroup::new(q).unwrap();
            assert!(latin(q, |a, b| g.add(a, b), 0));
            for a in 0..q {
                assert_eq!(g.add(a, 0), a);
                assert_eq!(g.add(a, g.neg(a)), 0);
            }
        }
    }

    #[test]
    fn group_range_and_parse() {
        let g = Group::for_order(4).unwrap();
        assert_eq!(g.try_add(2, 3).unwrap(), 1);
        assert!(g.try_add(4, 0).is_err());
        assert_eq!(Group::for_order(6).unwrap().name(), "Z6");
        assert_eq!(Group::parse("GF(9)").unwrap().order(), 9);
        assert_eq!(Group::parse("Z4").unwrap().add(2, 3), 1);
        assert!(Group::parse("GF(6)").is_err());
    }
}
