//! The field tower `F_p ⊂ F_q ⊂ F_{q²}`.
//!
//! Everything downstream works over a quadratic extension: the plane
//! `PG(2,q²)` lives over `F_{q²}` while its Bruck-Bose model `PG(4,q)` lives
//! over the subfield `F_q`. A [`FieldCtx`] builds both layers explicitly:
//!
//! * `F_q = F_p[α]/(f)` for a monic irreducible `f` of degree `h`
//!   (`defining_poly_q`), and
//! * `F_{q²} = F_q[ω]/(g)` for a monic irreducible quadratic `g`
//!   (`defining_poly_q2`).
//!
//! An element `x = x₀ + x₁ω` with `x₀,x₁ ∈ F_q` is encoded as the integer
//! `x₀ + x₁·q`, where an `F_q` element `Σ aⱼαʲ` is itself encoded as
//! `Σ aⱼpʲ`. Under this encoding the canonical copy of `F_q` inside `F_{q²}`
//! is exactly the integers `0..q`, and the textual form of an element is its
//! base-`p` digit string, most significant digit first (`"12"` is `1·ω + 2`
//! when `q = 3`).
//!
//! ## Defaults
//!
//! `f` defaults to the Conway polynomial `C_{p,h}` where tabulated, otherwise
//! to the least monic irreducible of degree `h` (coefficients compared from
//! the highest degree downwards). `g` defaults to the least monic irreducible
//! quadratic `ω² + c₁ω + c₀` over `F_q`, ordered by `(c₁, c₀)`. Both choices
//! are deterministic, and both polynomials are re-verified irreducible at
//! construction time no matter where they came from.
//!
//! ## Arithmetic
//!
//! Construction materializes dense tables: addition and negation
//! coefficient-wise, multiplication and inversion through log/antilog tables
//! over a verified generator of the cyclic group `F_{q²}^*`, and the
//! Frobenius `x ↦ x^q`. Every public operation is O(1) after the build. The
//! build also proves, exhaustively, that `{x : x^q = x}` is precisely the
//! encoded copy `0..q` of the subfield.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum supported subfield order. Desk scale is `q ≤ 8`; the cap leaves
/// headroom for labelled-set experiments over `AG(2,q)` with `q` up to 32
/// while keeping every table comfortably in cache.
pub const MAX_Q: u32 = 32;

/// An element of `F_{q²}` (or of a subfield, which is encoding-closed) in the
/// canonical integer encoding of its context.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Fel(pub u16);

impl Fel {
    pub const ZERO: Fel = Fel(0);
    pub const ONE: Fel = Fel(1);
}

/// Errors from field construction and element parsing.
#[derive(Debug, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("order {0} exceeds the supported maximum {MAX_Q}")]
    UnsupportedSize(u32),
    #[error("defining polynomial must be monic of degree {expected}, got degree {got}")]
    BadPolyShape { expected: usize, got: usize },
    #[error("polynomial coefficient {0} is out of range")]
    CoefficientRange(u32),
    #[error("defining polynomial is reducible")]
    Reducible,
    #[error("no generator of the multiplicative group was found (internal)")]
    NoGenerator,
    #[error("cannot parse {0:?} as a field element: {1}")]
    Parse(String, String),
}

/// The fully built tower with table-driven arithmetic.
#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    h: u32,
    q: u32,
    q2: u32,
    /// Monic irreducible over `F_p` defining `F_q`; coefficients by degree.
    poly_q: Vec<u16>,
    /// `ω² + c₁ω + c₀`: the pair `(c₀, c₁)` of `F_q` elements.
    poly_q2: (Fel, Fel),
    generator: Fel,
    add: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    frob: Vec<u16>,
    log: Vec<u32>,
    exp: Vec<u16>,
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("h", &self.h)
            .field("q", &self.q)
            .field("q2", &self.q2)
            .field("poly_q", &self.poly_q)
            .field("poly_q2", &self.poly_q2)
            .field("generator", &self.generator)
            .finish_non_exhaustive()
    }
}

/// Conway polynomials `C_{p,h}` for the small cases this crate targets,
/// coefficients by increasing degree. Anything missing falls back to the
/// least-lexicographic irreducible search; irreducibility of every entry is
/// re-verified at build time.
const CONWAY: &[(u32, u32, &[u16])] = &[
    (2, 1, &[1, 1]),
    (2, 2, &[1, 1, 1]),
    (2, 3, &[1, 1, 0, 1]),
    (2, 4, &[1, 1, 0, 0, 1]),
    (2, 5, &[1, 0, 1, 0, 0, 1]),
    (3, 1, &[1, 1]),
    (3, 2, &[2, 2, 1]),
    (3, 3, &[1, 2, 0, 1]),
    (5, 1, &[3, 1]),
    (5, 2, &[2, 4, 1]),
    (7, 1, &[4, 1]),
    (7, 2, &[3, 6, 1]),
    (11, 1, &[9, 1]),
    (13, 1, &[11, 1]),
];

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors of `n` by trial division.
fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Split a prime power `q = p^h`; error for 0, 1, and mixed factorizations.
pub fn split_prime_power(q: u32) -> Result<(u32, u32), FieldError> {
    if q < 2 {
        return Err(FieldError::NotPrimePower(q));
    }
    let p = (2..=q).find(|d| q % d == 0).expect("q >= 2 has a divisor");
    if !is_prime(p) {
        // unreachable: smallest divisor > 1 is prime
        return Err(FieldError::NotPrimePower(q));
    }
    let mut rest = q;
    let mut h = 0u32;
    while rest % p == 0 {
        rest /= p;
        h += 1;
    }
    if rest != 1 {
        return Err(FieldError::NotPrimePower(q));
    }
    Ok((p, h))
}

// ---- dense polynomial helpers over F_p (construction-time only) ----

fn poly_trim(v: &mut Vec<u16>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

fn poly_mul(a: &[u16], b: &[u16], p: u32) -> Vec<u16> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai as u32 * bj as u32) % p;
        }
    }
    out.into_iter().map(|c| c as u16).collect()
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn poly_rem(a: &[u16], m: &[u16], p: u32) -> Vec<u16> {
    let mut r: Vec<u16> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap() as u32;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &mc) in m.iter().enumerate() {
                let idx = shift + k;
                let val = (r[idx] as u32 + p * p - (lead * mc as u32) % p) % p;
                r[idx] = val as u16;
            }
        }
        r.pop();
    }
    poly_trim(&mut r);
    r
}

fn poly_is_zero(a: &[u16]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Exhaustive divisor check; fine for the tiny degrees used here.
fn poly_irreducible(f: &[u16], p: u32) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    // try all monic divisors of degree 1..=d/2
    for dd in 1..=d / 2 {
        let count = (p as u64).pow(dd as u32);
        for idx in 0..count {
            let mut g = vec![0u16; dd + 1];
            let mut rest = idx;
            for c in g.iter_mut().take(dd) {
                *c = (rest % p as u64) as u16;
                rest /= p as u64;
            }
            g[dd] = 1;
            if poly_is_zero(&poly_rem(f, &g, p)) {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible of degree `h` over `F_p`, coefficients compared
/// from the highest degree downwards.
fn least_irreducible(p: u32, h: u32) -> Vec<u16> {
    let d = h as usize;
    let count = (p as u64).pow(h);
    // index digits are read so that higher-degree coefficients vary slower
    for idx in 0..count {
        let mut f = vec![0u16; d + 1];
        f[d] = 1;
        let mut rest = idx;
        for pos in (0..d).rev() {
            // pos = degree; most significant index digit = highest degree
            let digit = rest / (p as u64).pow(pos as u32);
            rest %= (p as u64).pow(pos as u32);
            f[pos] = digit as u16;
        }
        if poly_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

impl FieldCtx {
    /// Build the tower for `q = p^h` with default polynomials.
    pub fn build_q(q: u32) -> Result<FieldCtx, FieldError> {
        let (p, h) = split_prime_power(q)?;
        FieldCtx::build(p, h, None, None)
    }

    /// Build the tower, optionally overriding either defining polynomial.
    ///
    /// `poly_q` is the monic degree-`h` polynomial over `F_p` by increasing
    /// degree; `poly_q2` is the pair `(c₀, c₁)` of `F_q` encodings giving
    /// `ω² + c₁ω + c₀`.
    pub fn build(
        p: u32,
        h: u32,
        poly_q: Option<&[u16]>,
        poly_q2: Option<(u16, u16)>,
    ) -> Result<FieldCtx, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if h == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).pow(h);
        if q > MAX_Q as u64 {
            return Err(FieldError::UnsupportedSize(q.min(u32::MAX as u64) as u32));
        }
        let q = q as u32;
        let q2 = q * q;

        // --- layer 1: F_q = F_p[α]/(f) ---
        let poly_q: Vec<u16> = match poly_q {
            Some(f) => {
                if f.len() != h as usize + 1 || *f.last().unwrap() != 1 {
                    return Err(FieldError::BadPolyShape {
                        expected: h as usize,
                        got: f.len().saturating_sub(1),
                    });
                }
                if let Some(&c) = f.iter().find(|&&c| c as u32 >= p) {
                    return Err(FieldError::CoefficientRange(c as u32));
                }
                f.to_vec()
            }
            None => CONWAY
                .iter()
                .find(|&&(cp, ch, _)| cp == p && ch == h)
                .map(|&(_, _, f)| f.to_vec())
                .unwrap_or_else(|| least_irreducible(p, h)),
        };
        if !poly_irreducible(&poly_q, p) {
            return Err(FieldError::Reducible);
        }

        // F_q scalar ops on integer encodings (Σ aⱼ pʲ), via coefficient vectors
        let hh = h as usize;
        let decomp = |mut x: u32| -> Vec<u16> {
            let mut v = vec![0u16; hh];
            for c in v.iter_mut() {
                *c = (x % p) as u16;
                x /= p;
            }
            v
        };
        let recomp = |v: &[u16]| -> u32 { v.iter().rev().fold(0u32, |acc, &c| acc * p + c as u32) };
        let fq_add = |a: u32, b: u32| -> u32 {
            let (va, vb) = (decomp(a), decomp(b));
            let sum: Vec<u16> = va
                .iter()
                .zip(&vb)
                .map(|(&x, &y)| ((x as u32 + y as u32) % p) as u16)
                .collect();
            recomp(&sum)
        };
        let fq_neg = |a: u32| -> u32 {
            let v: Vec<u16> = decomp(a)
                .iter()
                .map(|&c| ((p - c as u32) % p) as u16)
                .collect();
            recomp(&v)
        };
        let fq_mul_slow = |a: u32, b: u32| -> u32 {
            let prod = poly_mul(&decomp(a), &decomp(b), p);
            let mut red = poly_rem(&prod, &poly_q, p);
            red.resize(hh, 0);
            recomp(&red)
        };
        // dense F_q multiplication table for the q² layer build
        let mut fq_mul_tab = vec![0u32; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                fq_mul_tab[(a * q + b) as usize] = fq_mul_slow(a, b);
            }
        }
        let fq_mul = |a: u32, b: u32| -> u32 { fq_mul_tab[(a * q + b) as usize] };

        // --- layer 2: F_{q²} = F_q[ω]/(ω² + c₁ω + c₀) ---
        let (c0, c1): (u32, u32) = match poly_q2 {
            Some((c0, c1)) => {
                if c0 as u32 >= q || c1 as u32 >= q {
                    return Err(FieldError::CoefficientRange(c0.max(c1) as u32));
                }
                (c0 as u32, c1 as u32)
            }
            None => {
                // least (c₁, c₀) with ω² + c₁ω + c₀ irreducible over F_q
                let mut found = None;
                'scan: for cc1 in 0..q {
                    for cc0 in 0..q {
                        let has_root = (0..q)
                            .any(|t| fq_add(fq_add(fq_mul(t, t), fq_mul(cc1, t)), cc0) == 0);
                        if !has_root {
                            found = Some((cc0, cc1));
                            break 'scan;
                        }
                    }
                }
                found.expect("irreducible quadratics exist over every finite field")
            }
        };
        // a monic quadratic over a field is irreducible iff it has no root
        if (0..q).any(|t| fq_add(fq_add(fq_mul(t, t), fq_mul(c1, t)), c0) == 0) {
            return Err(FieldError::Reducible);
        }

        let lo = |x: u32| x % q;
        let hi = |x: u32| x / q;
        let q2_add = |a: u32, b: u32| fq_add(lo(a), lo(b)) + q * fq_add(hi(a), hi(b));
        // (x₀ + x₁ω)(y₀ + y₁ω) with ω² = -c₁ω - c₀
        let q2_mul = |a: u32, b: u32| -> u32 {
            let (x0, x1, y0, y1) = (lo(a), hi(a), lo(b), hi(b));
            let x1y1 = fq_mul(x1, y1);
            let z0 = fq_add(fq_mul(x0, y0), fq_neg(fq_mul(c0, x1y1)));
            let z1 = fq_add(
                fq_add(fq_mul(x0, y1), fq_mul(x1, y0)),
                fq_neg(fq_mul(c1, x1y1)),
            );
            z0 + q * z1
        };

        // addition and negation tables
        let mut add = vec![0u16; (q2 * q2) as usize];
        for a in 0..q2 {
            for b in 0..q2 {
                add[(a * q2 + b) as usize] = q2_add(a, b) as u16;
            }
        }
        let mut neg = vec![0u16; q2 as usize];
        for a in 0..q2 {
            neg[a as usize] = (fq_neg(lo(a)) + q * fq_neg(hi(a))) as u16;
        }

        // generator of F_{q²}^*: smallest encoding whose order is q²-1
        let group = q2 - 1;
        let factors = prime_factors(group);
        let pow_slow = |base: u32, mut e: u32| -> u32 {
            let mut acc = 1u32;
            let mut b = base;
            while e > 0 {
                if e & 1 == 1 {
                    acc = q2_mul(acc, b);
                }
                b = q2_mul(b, b);
                e >>= 1;
            }
            acc
        };
        let generator = (2..q2)
            .find(|&g| factors.iter().all(|&r| pow_slow(g, group / r) != 1))
            .ok_or(FieldError::NoGenerator)?;

        // log/antilog tables
        let mut exp = vec![0u16; 2 * group as usize];
        let mut log = vec![u32::MAX; q2 as usize];
        let mut acc = 1u32;
        for (i, slot) in exp.iter_mut().take(group as usize).enumerate() {
            *slot = acc as u16;
            if log[acc as usize] != u32::MAX {
                return Err(FieldError::NoGenerator); // generator order too small
            }
            log[acc as usize] = i as u32;
            acc = q2_mul(acc, generator);
        }
        for i in 0..group as usize {
            exp[group as usize + i] = exp[i];
        }

        let mut inv = vec![0u16; q2 as usize];
        for a in 1..q2 {
            inv[a as usize] = exp[(group - log[a as usize] % group) as usize % group as usize];
        }
        let mut frob = vec![0u16; q2 as usize];
        for a in 1..q2 {
            frob[a as usize] = exp[((log[a as usize] as u64 * q as u64) % group as u64) as usize];
        }

        let ctx = FieldCtx {
            p,
            h,
            q,
            q2,
            poly_q,
            poly_q2: (Fel(c0 as u16), Fel(c1 as u16)),
            generator: Fel(generator as u16),
            add,
            neg,
            inv,
            frob,
            log,
            exp,
        };
        ctx.self_check()?;
        Ok(ctx)
    }

    /// Construction-time proofs: ω satisfies its defining quadratic, the
    /// Frobenius has order 2, and its fixed field is exactly the encoded copy
    /// `0..q` of `F_q`.
    fn self_check(&self) -> Result<(), FieldError> {
        let omega = Fel(self.q as u16);
        let val = self.add(
            self.add(self.mul(omega, omega), self.mul(self.poly_q2.1, omega)),
            self.poly_q2.0,
        );
        assert_eq!(val, Fel::ZERO, "ω must satisfy its defining quadratic");
        for x in self.elements() {
            assert_eq!(self.frob(self.frob(x)), x, "x^(q²) = x must hold");
            let fixed = self.frob(x) == x;
            assert_eq!(fixed, self.in_base(x), "F_q must be the Frobenius-fixed set");
        }
        Ok(())
    }

    // ---- parameters ----

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn h(&self) -> u32 {
        self.h
    }
    /// Subfield order `q = p^h`.
    pub fn q(&self) -> u32 {
        self.q
    }
    /// Extension order `q²`.
    pub fn q2(&self) -> u32 {
        self.q2
    }
    /// A verified generator of `F_{q²}^*`.
    pub fn generator(&self) -> Fel {
        self.generator
    }
    /// `ω`, the adjoined root of the defining quadratic.
    pub fn omega(&self) -> Fel {
        Fel(self.q as u16)
    }
    /// Coefficients of the degree-`h` polynomial over `F_p`, by degree.
    pub fn poly_q(&self) -> &[u16] {
        &self.poly_q
    }
    /// `(c₀, c₁)` of `ω² + c₁ω + c₀`.
    pub fn poly_q2(&self) -> (Fel, Fel) {
        self.poly_q2
    }

    // ---- arithmetic ----

    #[inline]
    pub fn add(&self, a: Fel, b: Fel) -> Fel {
        Fel(self.add[a.0 as usize * self.q2 as usize + b.0 as usize])
    }

    #[inline]
    pub fn neg(&self, a: Fel) -> Fel {
        Fel(self.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fel, b: Fel) -> Fel {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fel, b: Fel) -> Fel {
        if a.0 == 0 || b.0 == 0 {
            return Fel::ZERO;
        }
        Fel(self.exp[(self.log[a.0 as usize] + self.log[b.0 as usize]) as usize])
    }

    /// Multiplicative inverse; panics on zero (callers guard).
    #[inline]
    pub fn inv(&self, a: Fel) -> Fel {
        assert!(a.0 != 0, "inverse of zero");
        Fel(self.inv[a.0 as usize])
    }

    pub fn checked_inv(&self, a: Fel) -> Option<Fel> {
        (a.0 != 0).then(|| Fel(self.inv[a.0 as usize]))
    }

    #[inline]
    pub fn div(&self, a: Fel, b: Fel) -> Fel {
        self.mul(a, self.inv(b))
    }

    pub fn pow(&self, a: Fel, e: u64) -> Fel {
        if a.0 == 0 {
            return if e == 0 { Fel::ONE } else { Fel::ZERO };
        }
        let group = (self.q2 - 1) as u64;
        let idx = (self.log[a.0 as usize] as u64 * (e % group)) % group;
        Fel(self.exp[idx as usize])
    }

    /// Frobenius `x ↦ x^q` of the quadratic extension.
    #[inline]
    pub fn frob(&self, a: Fel) -> Fel {
        if a.0 == 0 {
            return Fel::ZERO;
        }
        Fel(self.frob[a.0 as usize])
    }

    /// Norm `N(x) = x·x^q ∈ F_q`.
    pub fn norm(&self, a: Fel) -> Fel {
        let n = self.mul(a, self.frob(a));
        debug_assert!(self.in_base(n));
        n
    }

    /// Trace `Tr(x) = x + x^q ∈ F_q`.
    pub fn trace(&self, a: Fel) -> Fel {
        let t = self.add(a, self.frob(a));
        debug_assert!(self.in_base(t));
        t
    }

    /// Membership in the canonical copy of `F_q` (equivalently `x^q = x`).
    #[inline]
    pub fn in_base(&self, a: Fel) -> bool {
        (a.0 as u32) < self.q
    }

    /// Split `x = x₀ + x₁ω` into its `F_q` components.
    #[inline]
    pub fn split(&self, a: Fel) -> (Fel, Fel) {
        (Fel(a.0 % self.q as u16), Fel(a.0 / self.q as u16))
    }

    /// Rebuild `x₀ + x₁ω` from `F_q` components.
    #[inline]
    pub fn join(&self, x0: Fel, x1: Fel) -> Fel {
        debug_assert!(self.in_base(x0) && self.in_base(x1));
        Fel(x0.0 + x1.0 * self.q as u16)
    }

    /// All of `F_{q²}` in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fel> {
        (0..self.q2 as u16).map(Fel)
    }

    /// The canonical copy of `F_q` in encoding order.
    pub fn base_elements(&self) -> impl Iterator<Item = Fel> {
        (0..self.q as u16).map(Fel)
    }

    // ---- text form ----

    /// Digit width of an element of the field of the given order.
    pub fn digits_for(&self, order: u32) -> usize {
        if order == self.q {
            self.h as usize
        } else {
            2 * self.h as usize
        }
    }

    /// Base-`p` digit string, most significant first, fixed width for the
    /// given field order (`q` or `q²`). Digits use `0-9a-z`.
    pub fn format_el(&self, a: Fel, order: u32) -> String {
        let width = self.digits_for(order);
        let mut digits = vec![0u32; width];
        let mut x = a.0 as u32;
        for d in digits.iter_mut() {
            *d = x % self.p;
            x /= self.p;
        }
        digits
            .iter()
            .rev()
            .map(|&d| std::char::from_digit(d, 36).expect("p <= 32"))
            .collect()
    }

    /// Parse a base-`p` digit string (any width, most significant first) as
    /// an element of the field of the given order.
    pub fn parse_el(&self, s: &str, order: u32) -> Result<Fel, FieldError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(FieldError::Parse(s.into(), "empty".into()));
        }
        let mut val: u32 = 0;
        for ch in s.chars() {
            let d = ch
                .to_digit(36)
                .filter(|&d| d < self.p)
                .ok_or_else(|| FieldError::Parse(s.into(), format!("bad base-{} digit", self.p)))?;
            val = val * self.p + d;
            if val >= self.q2 {
                return Err(FieldError::Parse(s.into(), "value out of range".into()));
            }
        }
        if val >= order {
            return Err(FieldError::Parse(s.into(), "value out of range".into()));
        }
        Ok(Fel(val as u16))
    }

    /// Canonical description of the tower for cache keys and certificates:
    /// `p`, `h`, and both defining polynomials by decreasing degree.
    pub fn describe(&self) -> String {
        let fq: String = self.poly_q.iter().rev().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        let (c0, c1) = self.poly_q2;
        format!("p={} h={} fq=[{}] fq2=[1,{},{}]", self.p, self.h, fq, c1.0, c0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const DESK: [u32; 6] = [2, 3, 4, 5, 8, 9];

    #[test]
    fn split_prime_power_accepts_and_rejects() {
        assert_eq!(split_prime_power(8).unwrap(), (2, 3));
        assert_eq!(split_prime_power(9).unwrap(), (3, 2));
        assert_eq!(split_prime_power(5).unwrap(), (5, 1));
        assert!(split_prime_power(6).is_err());
        assert!(split_prime_power(12).is_err());
        assert!(split_prime_power(1).is_err());
        assert!(split_prime_power(0).is_err());
    }

    #[test]
    fn default_polynomials_are_the_tabulated_ones() {
        let f4 = FieldCtx::build_q(4).unwrap();
        assert_eq!(f4.poly_q(), &[1, 1, 1]); // x² + x + 1
        let f8 = FieldCtx::build_q(8).unwrap();
        assert_eq!(f8.poly_q(), &[1, 1, 0, 1]); // x³ + x + 1
        // least quadratic over F_3 is ω² + 1, i.e. F_9 = F_3[i]
        let f3 = FieldCtx::build_q(3).unwrap();
        assert_eq!(f3.poly_q2(), (Fel(1), Fel(0)));
    }

    #[test]
    fn f9_gaussian_integer_product() {
        // (1+i)(1−i) = 2 in F_9 = F_3[i]: encodings 1+i ↦ 4, 1−i = 1+2i ↦ 7
        let ctx = FieldCtx::build_q(3).unwrap();
        assert_eq!(ctx.mul(Fel(4), Fel(7)), Fel(2));
    }

    #[test]
    fn extension_size_and_subfield_census() {
        for q in DESK {
            let ctx = FieldCtx::build_q(q).unwrap();
            assert_eq!(ctx.elements().count() as u32, q * q);
            let fixed: Vec<Fel> = ctx.elements().filter(|&x| ctx.frob(x) == x).collect();
            assert_eq!(fixed.len() as u32, q);
            assert!(fixed.iter().all(|&x| (x.0 as u32) < q));
        }
    }

    #[test]
    fn inverses_and_generator_order() {
        for q in DESK {
            let ctx = FieldCtx::build_q(q).unwrap();
            for x in ctx.elements().skip(1) {
                assert_eq!(ctx.mul(x, ctx.inv(x)), Fel::ONE);
            }
            let g = ctx.generator();
            let group = (q * q - 1) as u64;
            assert_eq!(ctx.pow(g, group), Fel::ONE);
            for r in prime_factors(q * q - 1) {
                assert_ne!(ctx.pow(g, group / r as u64), Fel::ONE);
            }
        }
    }

    #[test]
    fn norm_and_trace_land_in_subfield() {
        for q in DESK {
            let ctx = FieldCtx::build_q(q).unwrap();
            for x in ctx.elements() {
                assert!(ctx.in_base(ctx.norm(x)));
                assert!(ctx.in_base(ctx.trace(x)));
                // norm is x^{q+1}
                assert_eq!(ctx.norm(x), ctx.pow(x, (q + 1) as u64));
            }
        }
    }

    #[test]
    fn subfield_is_arithmetically_closed() {
        for q in DESK {
            let ctx = FieldCtx::build_q(q).unwrap();
            for a in ctx.base_elements() {
                for b in ctx.base_elements() {
                    assert!(ctx.in_base(ctx.add(a, b)));
                    assert!(ctx.in_base(ctx.mul(a, b)));
                }
            }
        }
    }

    #[test]
    fn explicit_quadratic_override() {
        // ω² + ω + 2 has no root in F_3, so the build succeeds
        let ctx = FieldCtx::build(3, 1, None, Some((2, 1))).unwrap();
        let w = ctx.omega();
        let val = ctx.add(ctx.add(ctx.mul(w, w), w), Fel(2));
        assert_eq!(val, Fel::ZERO);
        // x² + 1 over F_2 is (x+1)², so the build must fail
        assert!(matches!(
            FieldCtx::build(2, 1, None, Some((1, 0))),
            Err(FieldError::Reducible)
        ));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(FieldCtx::build(6, 1, None, None), Err(FieldError::NotPrime(6))));
        assert!(matches!(FieldCtx::build(3, 0, None, None), Err(FieldError::ZeroDegree)));
        assert!(matches!(FieldCtx::build(2, 9, None, None), Err(FieldError::UnsupportedSize(_))));
        // x² + x over F_2 is monic but reducible
        assert!(matches!(
            FieldCtx::build(2, 2, Some(&[0, 1, 1]), None),
            Err(FieldError::Reducible)
        ));
    }

    #[test]
    fn element_text_roundtrip() {
        let ctx = FieldCtx::build_q(3).unwrap();
        // 1·ω + 2 encodes as 5 and prints as "12"
        assert_eq!(ctx.format_el(Fel(5), 9), "12");
        assert_eq!(ctx.parse_el("12", 9).unwrap(), Fel(5));
        assert_eq!(ctx.parse_el("012", 9).unwrap(), Fel(5));
        assert!(ctx.parse_el("3", 9).is_err()); // bad digit for p = 3
        let ctx8 = FieldCtx::build_q(8).unwrap();
        for x in ctx8.elements() {
            let s = ctx8.format_el(x, 64);
            assert_eq!(s.len(), 6);
            assert_eq!(ctx8.parse_el(&s, 64).unwrap(), x);
        }
        // subfield width differs
        assert_eq!(ctx8.format_el(Fel(5), 8), "101");
    }

    proptest! {
        #[test]
        fn field_axioms_sampled(q_idx in 0usize..DESK.len(), a in 0u16..64, b in 0u16..64, c in 0u16..64) {
            let q = DESK[q_idx];
            let ctx = FieldCtx::build_q(q).unwrap();
            let m = (q * q) as u16;
            let (a, b, c) = (Fel(a % m), Fel(b % m), Fel(c % m));
            prop_assert_eq!(ctx.add(a, b), ctx.add(b, a));
            prop_assert_eq!(ctx.mul(a, b), ctx.mul(b, a));
            prop_assert_eq!(ctx.add(ctx.add(a, b), c), ctx.add(a, ctx.add(b, c)));
            prop_assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
            prop_assert_eq!(ctx.mul(a, ctx.add(b, c)), ctx.add(ctx.mul(a, b), ctx.mul(a, c)));
            prop_assert_eq!(ctx.add(a, ctx.neg(a)), Fel::ZERO);
            // Frobenius is a field automorphism
            prop_assert_eq!(ctx.frob(ctx.add(a, b)), ctx.add(ctx.frob(a), ctx.frob(b)));
            prop_assert_eq!(ctx.frob(ctx.mul(a, b)), ctx.mul(ctx.frob(a), ctx.frob(b)));
            // norm is multiplicative, trace is additive
            prop_assert_eq!(ctx.norm(ctx.mul(a, b)), ctx.mul(ctx.norm(a), ctx.norm(b)));
            prop_assert_eq!(ctx.trace(ctx.add(a, b)), ctx.add(ctx.trace(a), ctx.trace(b)));
        }
    }
}
