//! The polynomial ring F_q[T]: Euclidean arithmetic, irreducibility,
//! factorization, the reversal involution and its text form.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::galois::{prime_factors, FieldSpec, Fq};

/// A polynomial over F_q, coefficients from the constant term upward.
///
/// The representation is normalized: no trailing zero coefficients, so the zero
/// polynomial has no coefficients and no degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Fq>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Fq>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Poly {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { coeffs: vec![Fq::ONE] }
    }

    /// The indeterminate T.
    pub fn x() -> Poly {
        Poly { coeffs: vec![Fq::ZERO, Fq::ONE] }
    }

    pub fn constant(c: Fq) -> Poly {
        Poly::new(vec![c])
    }

    /// T^k.
    pub fn monomial(k: usize) -> Poly {
        let mut coeffs = vec![Fq::ZERO; k + 1];
        coeffs[k] = Fq::ONE;
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [Fq::ONE]
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(Fq::ONE)
    }

    pub fn leading(&self) -> Option<Fq> {
        self.coeffs.last().copied()
    }

    /// Coefficient of T^i (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    pub fn constant_term(&self) -> Fq {
        self.coeff(0)
    }

    /// The canonical code `sum index(c_i) q^i`; a total order within each degree.
    pub fn code(&self, q: u32) -> u128 {
        self.coeffs.iter().rev().fold(0u128, |acc, c| acc * u128::from(q) + u128::from(c.index()))
    }

    /// Degree-major canonical order, then by code.
    pub fn canonical_cmp(&self, other: &Poly, q: u32) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.code(q).cmp(&other.code(q)))
    }

    /// Rebuilds a polynomial of exactly `len` coefficients (before normalization) from its code.
    pub fn from_code(mut code: u128, len: usize, q: u32) -> Poly {
        let mut coeffs = Vec::with_capacity(len);
        for _ in 0..len {
            coeffs.push(Fq::from_index((code % u128::from(q)) as u32));
            code /= u128::from(q);
        }
        Poly::new(coeffs)
    }

    /// f*(T) = T^deg(f) f(1/T). Rejects the zero polynomial.
    pub fn reverse(&self) -> Result<Poly> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Poly::new(self.coeffs.iter().rev().copied().collect()))
    }

    /// Reduction modulo T^k, i.e. truncation.
    pub fn truncate(&self, k: usize) -> Poly {
        Poly::new(self.coeffs.iter().take(k).copied().collect())
    }

    /// T^k * self.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![Fq::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Largest k with T^k dividing self (0 for the zero polynomial).
    pub fn valuation_at_zero(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, "-")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Arithmetic in F_q[T] for a fixed base field.
#[derive(Clone, Copy, Debug)]
pub struct PolyRing<'a> {
    field: &'a FieldSpec,
}

impl<'a> PolyRing<'a> {
    pub fn new(field: &'a FieldSpec) -> PolyRing<'a> {
        PolyRing { field }
    }

    pub fn field(&self) -> &'a FieldSpec {
        self.field
    }

    /// Parses the dash-separated index form, e.g. "1-0-0-1" for T^3 + 1.
    pub fn parse(&self, s: &str) -> Result<Poly> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let coeffs = s
            .split('-')
            .map(|tok| {
                let v: u64 = tok.trim().parse().map_err(|_| Error::Parse(format!("bad coefficient {tok:?}")))?;
                self.field.elem(v)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(coeffs))
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let f = self.field;
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::new((0..n).map(|i| f.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let f = self.field;
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::new((0..n).map(|i| f.sub(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly::new(a.coeffs.iter().map(|&c| self.field.neg(c)).collect())
    }

    pub fn scale(&self, a: &Poly, c: Fq) -> Poly {
        Poly::new(a.coeffs.iter().map(|&x| self.field.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let f = self.field;
        let mut out = vec![Fq::ZERO; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(x, y));
            }
        }
        Poly::new(out)
    }

    /// Euclidean division, returning (quotient, remainder).
    pub fn divrem(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::ZeroModulus)?;
        let f = self.field;
        let lead_inv = f.inv(b.coeffs[db])?;
        let mut rem = a.coeffs.clone();
        if rem.len() <= db {
            return Ok((Poly::zero(), a.clone()));
        }
        let mut quot = vec![Fq::ZERO; rem.len() - db];
        for k in (db..rem.len()).rev() {
            let top = rem[k];
            if top.is_zero() {
                continue;
            }
            let c = f.mul(top, lead_inv);
            quot[k - db] = c;
            for (i, &bc) in b.coeffs.iter().enumerate() {
                rem[k - db + i] = f.sub(rem[k - db + i], f.mul(c, bc));
            }
        }
        rem.truncate(db);
        Ok((Poly::new(quot), Poly::new(rem)))
    }

    pub fn rem(&self, a: &Poly, m: &Poly) -> Result<Poly> {
        Ok(self.divrem(a, m)?.1)
    }

    /// Exact quotient; debug-asserts a zero remainder.
    pub fn div_exact(&self, a: &Poly, b: &Poly) -> Poly {
        let (q, r) = self.divrem(a, b).expect("nonzero divisor");
        debug_assert!(r.is_zero(), "inexact division");
        q
    }

    /// a * b mod m for a nonzero m.
    pub fn mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.rem(&self.mul(a, b), m).expect("nonzero modulus")
    }

    /// Scales to a monic polynomial; the zero polynomial is returned unchanged.
    pub fn monic(&self, a: &Poly) -> Poly {
        match a.leading() {
            Some(lc) if lc != Fq::ONE => self.scale(a, self.field.inv(lc).expect("nonzero")),
            _ => a.clone(),
        }
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y).expect("nonzero");
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// Inverse of `a` modulo `m` when gcd(a, m) = 1.
    pub fn inv_mod(&self, a: &Poly, m: &Poly) -> Result<Poly> {
        if m.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let (mut r0, mut r1) = (m.clone(), self.rem(a, m)?);
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qt, r) = self.divrem(&r0, &r1)?;
            let s = self.sub(&s0, &self.mul(&qt, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != Some(0) {
            return Err(Error::ZeroInverse);
        }
        let c = self.field.inv(r0.coeffs[0])?;
        self.rem(&self.scale(&s0, c), m)
    }

    /// base^exponent mod modulus by square-and-multiply.
    pub fn powmod(&self, base: &Poly, mut exponent: u128, modulus: &Poly) -> Result<Poly> {
        if modulus.is_zero() {
            return Err(Error::ZeroModulus);
        }
        let mut acc = self.rem(&Poly::one(), modulus)?;
        let mut b = self.rem(base, modulus)?;
        while exponent > 0 {
            if exponent & 1 == 1 {
                acc = self.mulmod(&acc, &b, modulus);
            }
            exponent >>= 1;
            if exponent > 0 {
                b = self.mulmod(&b, &b, modulus);
            }
        }
        Ok(acc)
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        let f = self.field;
        Poly::new(a.coeffs.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, f.from_int(i as u64))).collect())
    }

    pub fn eval(&self, a: &Poly, x: Fq) -> Fq {
        let f = self.field;
        a.coeffs.iter().rev().fold(Fq::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Rabin's test: P of degree n is irreducible iff T^(q^n) = T mod P and
    /// gcd(T^(q^(n/l)) - T, P) = 1 for every prime l dividing n.
    pub fn is_irreducible(&self, f: &Poly) -> Result<bool> {
        let n = match f.degree() {
            None => return Err(Error::ZeroPolynomial),
            Some(0) => return Err(Error::ConstantPolynomial),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let f = self.monic(f);
        if f.constant_term().is_zero() {
            return Ok(false);
        }
        let q = u128::from(self.field.q());
        let x = Poly::x();
        let frob = self.frobenius_powers(&f, n);
        for l in prime_factors(n as u64) {
            let h = self.sub(&frob[n / l as usize], &x);
            if !self.gcd(&h, &f).is_one() {
                return Ok(false);
            }
        }
        let top = self.powmod(&frob[n - 1], q, &f)?;
        Ok(top == self.rem(&x, &f)?)
    }

    /// [T^(q^0), T^(q^1), ..., T^(q^(count-1))] mod f.
    fn frobenius_powers(&self, f: &Poly, count: usize) -> Vec<Poly> {
        let q = u128::from(self.field.q());
        let mut out = Vec::with_capacity(count);
        let mut cur = self.rem(&Poly::x(), f).expect("nonzero");
        for _ in 0..count {
            out.push(cur.clone());
            cur = self.powmod(&cur, q, f).expect("nonzero");
        }
        out
    }

    /// Complete factorization into monic irreducibles with multiplicities,
    /// sorted by degree then code. The seed drives equal-degree splitting only.
    pub fn factor(&self, f: &Poly, seed: u64) -> Result<Vec<(Poly, u32)>> {
        match f.degree() {
            None => return Err(Error::ZeroPolynomial),
            Some(0) => return Err(Error::ConstantPolynomial),
            _ => {}
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for (sqf, mult) in self.squarefree(&self.monic(f)) {
            for (part, k) in self.distinct_degree(&sqf) {
                let mut pieces = Vec::new();
                self.equal_degree(&part, k, &mut rng, &mut pieces);
                out.extend(pieces.into_iter().map(|p| (p, mult)));
            }
        }
        let q = self.field.q();
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0, q));
        // a factor may surface both in the main loop and in the p-th root recursion
        let mut merged: Vec<(Poly, u32)> = Vec::with_capacity(out.len());
        for (p, m) in out {
            match merged.last_mut() {
                Some((last, lm)) if *last == p => *lm += m,
                _ => merged.push((p, m)),
            }
        }
        Ok(merged)
    }

    /// Squarefree decomposition of a monic polynomial: pairs (g_i, i) with f = prod g_i^i.
    pub fn squarefree(&self, f: &Poly) -> Vec<(Poly, u32)> {
        let mut out = Vec::new();
        if f.degree().unwrap_or(0) == 0 {
            return out;
        }
        let d = self.derivative(f);
        let mut c = self.gcd(f, &d);
        let mut w = self.div_exact(f, &c);
        let mut i = 1u32;
        while !w.is_one() {
            let y = self.gcd(&w, &c);
            let fac = self.div_exact(&w, &y);
            if !fac.is_one() {
                out.push((fac, i));
            }
            w = y;
            c = self.div_exact(&c, &w);
            i += 1;
        }
        if !c.is_one() {
            let root = self.pth_root(&c);
            let p = self.field.p();
            for (g, m) in self.squarefree(&root) {
                out.push((g, m * p));
            }
        }
        out
    }

    /// For c = h(T^p) with coefficients in F_q, returns the h' with h'^p = c.
    fn pth_root(&self, c: &Poly) -> Poly {
        let f = self.field;
        let p = f.p() as usize;
        // c^(1/p) = c^(q/p) on F_q
        let root_exp = u64::from(f.q() / f.p());
        Poly::new(c.coeffs.iter().step_by(p).map(|&x| f.pow(x, root_exp)).collect())
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    pub fn distinct_degree(&self, f: &Poly) -> Vec<(Poly, usize)> {
        let mut out = Vec::new();
        let mut rest = f.clone();
        let q = u128::from(self.field.q());
        let x = Poly::x();
        let mut h = self.rem(&x, &rest).expect("nonzero");
        let mut i = 1usize;
        while rest.degree().unwrap_or(0) >= 2 * i {
            h = self.powmod(&h, q, &rest).expect("nonzero");
            let g = self.gcd(&self.sub(&h, &x), &rest);
            if !g.is_one() {
                rest = self.div_exact(&rest, &g);
                h = self.rem(&h, &rest).expect("nonzero");
                out.push((g, i));
            }
            i += 1;
        }
        if let Some(d) = rest.degree().filter(|&d| d > 0) {
            out.push((rest, d));
        }
        out
    }

    /// Cantor-Zassenhaus splitting of a monic squarefree product of degree-k irreducibles.
    fn equal_degree(&self, f: &Poly, k: usize, rng: &mut ChaCha8Rng, out: &mut Vec<Poly>) {
        let n = f.degree().expect("nonzero");
        if n == k {
            out.push(f.clone());
            return;
        }
        let field = self.field;
        let q = u128::from(field.q());
        loop {
            let a = Poly::new((0..n).map(|_| Fq::from_index(rng.gen_range(0..field.q()))).collect());
            if a.degree().unwrap_or(0) == 0 {
                continue;
            }
            let b = if field.p() == 2 {
                // absolute trace map onto F_2: a + a^2 + ... + a^(2^(e k - 1))
                let steps = field.e() as usize * k;
                let mut acc = Poly::zero();
                let mut term = self.rem(&a, f).expect("nonzero");
                for _ in 0..steps {
                    acc = self.add(&acc, &term);
                    term = self.mulmod(&term, &term, f);
                }
                acc
            } else {
                let e = (q.pow(k as u32) - 1) / 2;
                let r = self.powmod(&a, e, f).expect("nonzero");
                self.sub(&r, &Poly::one())
            };
            let g = self.gcd(&b, f);
            if g.degree().is_some_and(|d| d > 0 && d < n) {
                let h = self.div_exact(f, &g);
                self.equal_degree(&g, k, rng, out);
                self.equal_degree(&h, k, rng, out);
                return;
            }
        }
    }

    /// Monic polynomials of degree d ordered by code.
    pub fn monic_of_degree(&self, d: usize) -> impl Iterator<Item = Poly> + '_ {
        let q = self.field.q();
        let count = u128::from(q).pow(d as u32);
        (0..count).map(move |c| Poly::from_code(c + count, d + 1, q))
    }
}
