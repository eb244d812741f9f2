//! Arithmetic in F_p, F_q = F_p[u]/(c(u)) and the residue fields F_q[T]/(P).
//!
//! Elements of F_q are stored as their canonical index `sum coords[i] * p^i`,
//! where `coords` are the coefficients of 1, u, ..., u^(e-1). Prime fields use
//! plain modular arithmetic; proper extensions use addition and log/exp tables
//! built once at construction.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::poly::{Poly, PolyRing};

/// Largest characteristic accepted for prime fields (e = 1).
pub const MAX_PRIME: u64 = (1 << 31) - 1;
/// Largest order accepted for proper extensions (e >= 2); the addition table is q^2 entries.
pub const MAX_EXT_ORDER: u64 = 1024;

/// An element of F_q, identified by its canonical index in `[0, q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq(u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    /// Wraps an index without range checking; see [`FieldSpec::elem`].
    #[inline]
    pub const fn from_index(index: u32) -> Fq {
        Fq(index)
    }

    #[inline]
    pub const fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug)]
struct ExtTables {
    add: Vec<u16>,
    neg: Vec<u16>,
    exp: Vec<u16>,
    log: Vec<u16>,
    abs_trace: Vec<u16>,
}

/// The base field F_q with q = p^e.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus over F_p, constant term first; empty for prime fields.
    modulus: Vec<u32>,
    tables: Option<ExtTables>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors of `n`, ascending, by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl FieldSpec {
    /// Builds F_{p^e}. Without an explicit modulus the lexicographically smallest
    /// monic irreducible of degree e is used, comparing coefficients from the
    /// constant term upward.
    pub fn new(p: u64, e: u32, modulus: Option<&[u32]>) -> Result<FieldSpec> {
        if !is_prime(p) {
            return Err(Error::NonPrimeP(p));
        }
        if e == 0 {
            return Err(Error::InvalidDegree(0));
        }
        if e == 1 {
            if p > MAX_PRIME {
                return Err(Error::FieldTooLarge { p, e });
            }
            if let Some(m) = modulus {
                // a degree-1 modulus carries no information, but must still be well formed
                if m.len() != 2 || m[1] != 1 || u64::from(m[0]) >= p {
                    return Err(Error::DegreeMismatch { expected: 1, got: m.len().saturating_sub(1) });
                }
            }
            return Ok(FieldSpec { p: p as u32, e: 1, q: p as u32, modulus: Vec::new(), tables: None });
        }
        let q = p.checked_pow(e).filter(|&q| q <= MAX_EXT_ORDER).ok_or(Error::FieldTooLarge { p, e })?;
        let prime = FieldSpec::prime(p as u32);
        let ring = PolyRing::new(&prime);
        let modulus = match modulus {
            Some(m) => {
                if m.len() != e as usize + 1 || m[e as usize] != 1 {
                    return Err(Error::DegreeMismatch { expected: e as usize, got: m.len().saturating_sub(1) });
                }
                if m.iter().any(|&c| u64::from(c) >= p) {
                    return Err(Error::InvalidElement(p));
                }
                let poly = Poly::new(m.iter().map(|&c| Fq(c)).collect());
                if !ring.is_irreducible(&poly)? {
                    return Err(Error::ReducibleModulus);
                }
                m.to_vec()
            }
            None => default_modulus(&ring, p as u32, e),
        };
        let mut spec = FieldSpec { p: p as u32, e, q: q as u32, modulus, tables: None };
        spec.tables = Some(spec.build_tables());
        Ok(spec)
    }

    /// The prime field F_p. Panics if `p` is not prime.
    pub fn prime(p: u32) -> FieldSpec {
        assert!(is_prime(u64::from(p)), "{p} is not prime");
        FieldSpec { p, e: 1, q: p, modulus: Vec::new(), tables: None }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients over F_p from the constant term up (empty when e = 1).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Checked conversion from an index.
    pub fn elem(&self, index: u64) -> Result<Fq> {
        if index < u64::from(self.q) {
            Ok(Fq(index as u32))
        } else {
            Err(Error::InvalidElement(index))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q).map(Fq)
    }

    pub fn coords(&self, x: Fq) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut v = x.0;
        for _ in 0..self.e {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    pub fn from_coords(&self, coords: &[u32]) -> Fq {
        debug_assert_eq!(coords.len(), self.e as usize);
        Fq(coords.iter().rev().fold(0u32, |acc, &c| acc * self.p + c % self.p))
    }

    #[inline]
    pub fn add(&self, x: Fq, y: Fq) -> Fq {
        match &self.tables {
            None => {
                let s = x.0 + y.0;
                Fq(if s >= self.p { s - self.p } else { s })
            }
            Some(t) => Fq(u32::from(t.add[(x.0 * self.q + y.0) as usize])),
        }
    }

    #[inline]
    pub fn neg(&self, x: Fq) -> Fq {
        match &self.tables {
            None => Fq(if x.0 == 0 { 0 } else { self.p - x.0 }),
            Some(t) => Fq(u32::from(t.neg[x.0 as usize])),
        }
    }

    #[inline]
    pub fn sub(&self, x: Fq, y: Fq) -> Fq {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: Fq, y: Fq) -> Fq {
        match &self.tables {
            None => Fq(((u64::from(x.0) * u64::from(y.0)) % u64::from(self.p)) as u32),
            Some(t) => {
                if x.0 == 0 || y.0 == 0 {
                    return Fq::ZERO;
                }
                let order = self.q as usize - 1;
                let s = t.log[x.0 as usize] as usize + t.log[y.0 as usize] as usize;
                Fq(u32::from(t.exp[if s >= order { s - order } else { s }]))
            }
        }
    }

    pub fn inv(&self, x: Fq) -> Result<Fq> {
        if x.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.tables {
            None => Fq(mod_inverse(x.0, self.p)),
            Some(t) => {
                let order = self.q as usize - 1;
                let l = t.log[x.0 as usize] as usize;
                Fq(u32::from(t.exp[(order - l) % order]))
            }
        })
    }

    pub fn pow(&self, x: Fq, mut exp: u64) -> Fq {
        let mut base = x;
        let mut acc = Fq::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// The integer t with psi(y) = exp(2 pi i t / p), where psi(y) = exp(2 pi i Tr_{F_q/F_p}(y) / p).
    #[inline]
    pub fn abs_trace_index(&self, y: Fq) -> u32 {
        match &self.tables {
            None => y.0,
            Some(t) => u32::from(t.abs_trace[y.0 as usize]),
        }
    }

    /// Embeds an integer residue as the element n mod p of the prime subfield.
    pub fn from_int(&self, n: u64) -> Fq {
        Fq((n % u64::from(self.p)) as u32)
    }

    /// Coordinate-level multiplication, used to build the tables and as a test reference.
    pub fn mul_by_coords(&self, x: Fq, y: Fq) -> Fq {
        if self.e == 1 {
            return self.mul(x, y);
        }
        let p = u64::from(self.p);
        let e = self.e as usize;
        let a = self.coords(x);
        let b = self.coords(y);
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(ai) * u64::from(bj)) % p;
            }
        }
        for k in (e..2 * e - 1).rev() {
            let top = prod[k];
            if top == 0 {
                continue;
            }
            prod[k] = 0;
            for i in 0..e {
                let m = u64::from(self.modulus[i]);
                prod[k - e + i] = (prod[k - e + i] + (p - top) * m) % p;
            }
        }
        let coords: Vec<u32> = prod[..e].iter().map(|&c| c as u32).collect();
        self.from_coords(&coords)
    }

    fn add_by_coords(&self, x: Fq, y: Fq) -> Fq {
        let a = self.coords(x);
        let b = self.coords(y);
        let c: Vec<u32> = a.iter().zip(&b).map(|(&s, &t)| (s + t) % self.p).collect();
        self.from_coords(&c)
    }

    fn build_tables(&self) -> ExtTables {
        let q = self.q as usize;
        let mut add = vec![0u16; q * q];
        let mut neg = vec![0u16; q];
        for x in 0..q {
            for y in 0..q {
                let s = self.add_by_coords(Fq(x as u32), Fq(y as u32)).0 as u16;
                add[x * q + y] = s;
                if s == 0 {
                    neg[x] = y as u16;
                }
            }
        }
        // smallest-index generator of F_q^x
        let order = q - 1;
        let mut exp = vec![0u16; order];
        let mut log = vec![0u16; q];
        'search: for g in 2..q as u32 {
            let mut x = Fq::ONE;
            for i in 0..order {
                if i > 0 && x == Fq::ONE {
                    continue 'search;
                }
                exp[i] = x.0 as u16;
                x = self.mul_by_coords(x, Fq(g));
            }
            break;
        }
        for (i, &v) in exp.iter().enumerate() {
            log[v as usize] = i as u16;
        }
        let mut abs_trace = vec![0u16; q];
        for (y, slot) in abs_trace.iter_mut().enumerate() {
            // Tr(y) = y + y^p + ... + y^(p^(e-1))
            let mut acc = Fq::ZERO;
            let mut term = Fq(y as u32);
            for _ in 0..self.e {
                acc = self.add_by_coords(acc, term);
                let mut next = Fq::ONE;
                for _ in 0..self.p {
                    next = self.mul_by_coords(next, term);
                }
                term = next;
            }
            debug_assert!(acc.0 < self.p);
            *slot = acc.0 as u16;
        }
        ExtTables { add, neg, exp, log, abs_trace }
    }
}

fn mod_inverse(x: u32, p: u32) -> u32 {
    let (mut r0, mut r1) = (i64::from(p), i64::from(x));
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let qt = r0 / r1;
        (r0, r1) = (r1, r0 - qt * r1);
        (s0, s1) = (s1, s0 - qt * s1);
    }
    s0.rem_euclid(i64::from(p)) as u32
}

fn default_modulus(ring: &PolyRing<'_>, p: u32, e: u32) -> Vec<u32> {
    // c_0 is the most significant position in this ordering
    let total = u64::from(p).pow(e);
    for k in 0..total {
        let mut coeffs = vec![0u32; e as usize + 1];
        let mut v = k;
        for i in (0..e as usize).rev() {
            coeffs[i] = (v % u64::from(p)) as u32;
            v /= u64::from(p);
        }
        coeffs[e as usize] = 1;
        if coeffs[0] == 0 {
            continue;
        }
        let poly = Poly::new(coeffs.iter().map(|&c| Fq(c)).collect());
        if ring.is_irreducible(&poly).unwrap_or(false) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} e={} mod=", self.p, self.e)?;
        if self.modulus.is_empty() {
            write!(f, "-")
        } else {
            let parts: Vec<String> = self.modulus.iter().map(u32::to_string).collect();
            write!(f, "{}", parts.join("-"))
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<FieldSpec> {
        let mut p = None;
        let mut e = None;
        let mut modulus: Option<Vec<u32>> = None;
        for tok in s.split_whitespace() {
            let (key, val) = tok.split_once('=').ok_or_else(|| Error::Parse(format!("bad field token {tok:?}")))?;
            let bad = || Error::Parse(format!("bad field value {tok:?}"));
            match key {
                "p" => p = Some(val.parse::<u64>().map_err(|_| bad())?),
                "e" => e = Some(val.parse::<u32>().map_err(|_| bad())?),
                "mod" if val == "-" => {}
                "mod" => {
                    modulus =
                        Some(val.split('-').map(|c| c.parse::<u32>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?)
                }
                _ => return Err(Error::Parse(format!("unknown field key {key:?}"))),
            }
        }
        let p = p.ok_or_else(|| Error::Parse("missing p".into()))?;
        let e = e.ok_or_else(|| Error::Parse("missing e".into()))?;
        FieldSpec::new(p, e, modulus.as_deref())
    }
}

/// The residue field F_P = F_q[T]/(P) of a finite place P of degree d.
#[derive(Clone, Debug)]
pub struct ExtFieldCtx {
    base: FieldSpec,
    place: Poly,
    degree: usize,
    basis_traces: Vec<Fq>,
}

impl ExtFieldCtx {
    /// `place` must be monic irreducible; this is checked.
    pub fn new(base: &FieldSpec, place: &Poly) -> Result<ExtFieldCtx> {
        let ring = PolyRing::new(base);
        if place.leading() != Some(Fq::ONE) || !ring.is_irreducible(place)? {
            return Err(Error::NotAPlace);
        }
        Ok(Self::new_unchecked(base, place))
    }

    /// Skips the irreducibility test for places that come out of the enumerator.
    pub fn new_unchecked(base: &FieldSpec, place: &Poly) -> ExtFieldCtx {
        let ring = PolyRing::new(base);
        let d = place.degree().expect("place is nonzero");
        // frob[j] = T^(q^j) mod P; Tr(T^i) = sum_j frob[j]^i
        let t = ring.rem(&Poly::x(), place).expect("nonzero modulus");
        let mut frob = Vec::with_capacity(d);
        let mut cur = t;
        for _ in 0..d {
            frob.push(cur.clone());
            cur = ring.powmod(&cur, u128::from(base.q()), place).expect("nonzero modulus");
        }
        let mut powers: Vec<Poly> = vec![Poly::one(); d];
        let mut basis_traces = Vec::with_capacity(d);
        for i in 0..d {
            let mut sum = Poly::zero();
            for (j, pw) in powers.iter_mut().enumerate() {
                if i > 0 {
                    *pw = ring.mulmod(pw, &frob[j], place);
                }
                sum = ring.add(&sum, pw);
            }
            debug_assert!(sum.degree().unwrap_or(0) == 0, "trace must land in F_q");
            basis_traces.push(sum.coeff(0));
        }
        ExtFieldCtx { base: base.clone(), place: place.clone(), degree: d, basis_traces }
    }

    pub fn base(&self) -> &FieldSpec {
        &self.base
    }

    pub fn place(&self) -> &Poly {
        &self.place
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Entry i is Tr_{F_P/F_q}(T^i mod P).
    pub fn basis_traces(&self) -> &[Fq] {
        &self.basis_traces
    }

    /// Tr_{F_P/F_q}(x) as the power sum x + x^q + ... + x^(q^(d-1)).
    pub fn trace_to_base(&self, x: &Poly) -> Result<Fq> {
        self.check_reduced(x)?;
        let ring = PolyRing::new(&self.base);
        let mut sum = Poly::zero();
        let mut term = x.clone();
        for _ in 0..self.degree {
            sum = ring.add(&sum, &term);
            term = ring.powmod(&term, u128::from(self.base.q()), &self.place)?;
        }
        Ok(sum.coeff(0))
    }

    /// Tr_{F_P/F_q}(x) through the precomputed traces of the power basis.
    pub fn trace_linear(&self, x: &Poly) -> Result<Fq> {
        self.check_reduced(x)?;
        let f = &self.base;
        Ok(x.coeffs().iter().zip(&self.basis_traces).fold(Fq::ZERO, |acc, (&c, &t)| f.add(acc, f.mul(c, t))))
    }

    fn check_reduced(&self, x: &Poly) -> Result<()> {
        match x.degree() {
            Some(k) if k >= self.degree => Err(Error::DegreeTooLarge { got: k, degree: self.degree }),
            _ => Ok(()),
        }
    }
}
