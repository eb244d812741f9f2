//! Enumeration of finite places (monic irreducibles) of a given degree, with the
//! short-interval and residue-class restrictions used by the experiments.
//!
//! Candidates are walked in canonical code order. A short interval fixes the
//! high coefficients and a progression modulo T^r fixes the low ones, so both
//! shrink the candidate set to a digit pattern instead of filtering the whole
//! degree. Sharded enumeration splits the pattern into contiguous code ranges
//! and concatenates the shards in order, so the output never depends on the
//! worker count.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::galois::{FieldSpec, Fq};
use crate::poly::{Poly, PolyRing};
use crate::rational::Support;

/// I(A, h) = { f : deg(f - A) <= h } for monic A of degree d > h.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortInterval {
    center: Poly,
    h: usize,
}

impl ShortInterval {
    pub fn new(center: Poly, h: usize) -> Result<ShortInterval> {
        let d = center.degree().ok_or(Error::ZeroPolynomial)?;
        if !center.is_monic() {
            return Err(Error::InvalidParams("short interval center must be monic".into()));
        }
        if h >= d {
            return Err(Error::InvalidParams(format!("need h < d, got h = {h}, d = {d}")));
        }
        Ok(ShortInterval { center, h })
    }

    /// Parses "A=<poly>;h=<int>".
    pub fn parse(ring: &PolyRing<'_>, s: &str) -> Result<ShortInterval> {
        let bad = || Error::Parse(format!("bad short interval {s:?}"));
        let (a, h) = s.split_once(';').ok_or_else(bad)?;
        let a = a.trim().strip_prefix("A=").ok_or_else(bad)?;
        let h = h.trim().strip_prefix("h=").ok_or_else(bad)?;
        ShortInterval::new(ring.parse(a)?, h.parse().map_err(|_| bad())?)
    }

    pub fn center(&self) -> &Poly {
        &self.center
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn degree(&self) -> usize {
        self.center.degree().expect("nonzero")
    }

    pub fn contains(&self, ring: &PolyRing<'_>, f: &Poly) -> bool {
        ring.sub(f, &self.center).degree().map_or(true, |k| k <= self.h)
    }
}

impl fmt::Display for ShortInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A={};h={}", self.center, self.h)
    }
}

/// A residue class rep mod g with rep reduced.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    modulus: Poly,
    rep: Poly,
}

impl ResidueClass {
    pub fn new(ring: &PolyRing<'_>, rep: &Poly, modulus: &Poly) -> Result<ResidueClass> {
        let rep = ring.rem(rep, modulus)?;
        Ok(ResidueClass { modulus: modulus.clone(), rep })
    }

    /// Parses "<rep> mod <modulus>".
    pub fn parse(ring: &PolyRing<'_>, s: &str) -> Result<ResidueClass> {
        let (rep, m) = s.split_once(" mod ").ok_or_else(|| Error::Parse(format!("bad residue class {s:?}")))?;
        ResidueClass::new(ring, &ring.parse(rep)?, &ring.parse(m)?)
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn rep(&self) -> &Poly {
        &self.rep
    }

    pub fn contains(&self, ring: &PolyRing<'_>, f: &Poly) -> bool {
        ring.rem(f, &self.modulus).map(|r| r == self.rep).unwrap_or(false)
    }

    /// Some(r) when the modulus is T^r.
    fn power_of_t(&self) -> Option<usize> {
        let d = self.modulus.degree()?;
        (self.modulus == Poly::monomial(d)).then_some(d)
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}", self.rep, self.modulus)
    }
}

/// Restrictions applied while enumerating places.
#[derive(Clone, Debug)]
pub enum PlaceFilter {
    /// Drops T (the place 0), as in the sets of prime polynomials with nonzero constant term.
    NonzeroConstant,
    Interval(ShortInterval),
    Class(ResidueClass),
    /// Drops the finite places in supp(a).
    AvoidSupport(Vec<Poly>),
}

impl PlaceFilter {
    pub fn avoid(support: &Support) -> PlaceFilter {
        PlaceFilter::AvoidSupport(support.finite_places().cloned().collect())
    }

    fn accepts(&self, ring: &PolyRing<'_>, f: &Poly) -> bool {
        match self {
            PlaceFilter::NonzeroConstant => !f.constant_term().is_zero(),
            PlaceFilter::Interval(iv) => iv.contains(ring, f),
            PlaceFilter::Class(c) => c.contains(ring, f),
            PlaceFilter::AvoidSupport(ps) => !ps.contains(f),
        }
    }
}

/// Monic polynomials of degree d whose coefficients are pinned at some positions.
/// Free positions are counted with the lowest one fastest, which walks codes upward.
#[derive(Clone, Debug)]
struct DigitPattern {
    q: u32,
    d: usize,
    fixed: Vec<Option<Fq>>,
    free: Vec<usize>,
}

impl DigitPattern {
    fn new(q: u32, d: usize, filters: &[PlaceFilter]) -> Option<DigitPattern> {
        let mut fixed = vec![None; d];
        let pin = |i: usize, c: Fq, fixed: &mut Vec<Option<Fq>>| -> bool {
            match fixed[i] {
                Some(old) => old == c,
                None => {
                    fixed[i] = Some(c);
                    true
                }
            }
        };
        for flt in filters {
            match flt {
                PlaceFilter::Interval(iv) if iv.degree() == d => {
                    for i in iv.h() + 1..d {
                        if !pin(i, iv.center().coeff(i), &mut fixed) {
                            return None;
                        }
                    }
                }
                PlaceFilter::Interval(_) => return None,
                PlaceFilter::Class(c) => {
                    if let Some(r) = c.power_of_t() {
                        for i in 0..r.min(d) {
                            if !pin(i, c.rep().coeff(i), &mut fixed) {
                                return None;
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        let free = (0..d).filter(|&i| fixed[i].is_none()).collect();
        Some(DigitPattern { q, d, fixed, free })
    }

    fn len(&self) -> u128 {
        u128::from(self.q).pow(self.free.len() as u32)
    }

    fn nth(&self, mut k: u128) -> Poly {
        let mut coeffs: Vec<Fq> = self.fixed.iter().map(|c| c.unwrap_or(Fq::ZERO)).collect();
        for &pos in &self.free {
            coeffs[pos] = Fq::from_index((k % u128::from(self.q)) as u32);
            k /= u128::from(self.q);
        }
        coeffs.push(Fq::ONE);
        debug_assert_eq!(coeffs.len(), self.d + 1);
        Poly::new(coeffs)
    }
}

fn keep(ring: &PolyRing<'_>, filters: &[PlaceFilter], f: &Poly) -> bool {
    filters.iter().all(|flt| flt.accepts(ring, f)) && ring.is_irreducible(f).expect("degree >= 1")
}

/// Every monic irreducible of degree d passing all filters, in canonical code order.
pub fn monic_irreducibles<'a>(
    field: &'a FieldSpec,
    d: usize,
    filters: &'a [PlaceFilter],
) -> Result<impl Iterator<Item = Poly> + 'a> {
    if d == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let pattern = DigitPattern::new(field.q(), d, filters);
    let len = pattern.as_ref().map_or(0, DigitPattern::len);
    let ring = PolyRing::new(field);
    Ok((0..len).filter_map(move |k| {
        let f = pattern.as_ref().expect("nonempty").nth(k);
        keep(&ring, filters, &f).then_some(f)
    }))
}

/// Sharded version of [`monic_irreducibles`] running on the current rayon pool.
/// Output is identical to the sequential stream.
pub fn monic_irreducibles_par(field: &FieldSpec, d: usize, filters: &[PlaceFilter]) -> Result<Vec<Poly>> {
    if d == 0 {
        return Err(Error::InvalidDegree(0));
    }
    let Some(pattern) = DigitPattern::new(field.q(), d, filters) else {
        return Ok(Vec::new());
    };
    let len = pattern.len();
    const SHARD: u128 = 4096;
    let shards = len.div_ceil(SHARD);
    let ring = PolyRing::new(field);
    let parts: Vec<Vec<Poly>> = (0..shards as u64)
        .into_par_iter()
        .map(|s| {
            let lo = u128::from(s) * SHARD;
            let hi = (lo + SHARD).min(len);
            (lo..hi).map(|k| pattern.nth(k)).filter(|f| keep(&ring, filters, f)).collect()
        })
        .collect();
    Ok(parts.into_iter().flatten().collect())
}

/// The progression attached to a short interval through the reversal involution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Progression {
    /// T^(d-h).
    pub modulus: Poly,
    /// B*, the reduction of A* modulo T^(d-h); its constant term is 1.
    pub target: Poly,
    /// The monic B of degree d-h-1 with A* = B* mod T^(d-h).
    pub b: Poly,
}

/// For f of degree d with f(0) != 0: f in I(A, h) iff f* = B* mod T^(d-h).
pub fn interval_to_progression(iv: &ShortInterval) -> Progression {
    let d = iv.degree();
    let k = d - iv.h();
    let target = iv.center().reverse().expect("nonzero").truncate(k);
    // B = T^(k-1) B*(1/T), read off coefficient-wise at fixed length k
    let b = Poly::new((0..k).map(|i| target.coeff(k - 1 - i)).collect());
    Progression { modulus: Poly::monomial(k), target, b }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::new(p, 1, None).unwrap()
    }

    #[test]
    fn enumeration_examples() {
        let f3 = f(3);
        let r = PolyRing::new(&f3);
        let quad: Vec<String> = monic_irreducibles(&f3, 2, &[]).unwrap().map(|p| p.to_string()).collect();
        assert_eq!(quad, ["1-0-1", "2-1-1", "2-2-1"]);
        let lin: Vec<Poly> = monic_irreducibles(&f3, 1, &[PlaceFilter::NonzeroConstant]).unwrap().collect();
        assert_eq!(lin, vec![r.parse("1-1").unwrap(), r.parse("2-1").unwrap()]);
        let f2 = f(2);
        assert_eq!(monic_irreducibles(&f2, 4, &[]).unwrap().count(), 3);
        assert!(monic_irreducibles(&f2, 0, &[]).is_err());
    }

    #[test]
    fn parallel_matches_sequential() {
        let f5 = f(5);
        let r = PolyRing::new(&f5);
        let cls = ResidueClass::parse(&r, "2-1 mod 0-0-1").unwrap();
        let iv = ShortInterval::parse(&r, "A=1-2-3-0-0-1;h=3").unwrap();
        for filters in [
            vec![],
            vec![PlaceFilter::NonzeroConstant],
            vec![PlaceFilter::Class(cls.clone())],
            vec![PlaceFilter::Interval(iv.clone())],
            vec![PlaceFilter::Interval(iv), PlaceFilter::Class(cls)],
        ] {
            let seq: Vec<Poly> = monic_irreducibles(&f5, 5, &filters).unwrap().collect();
            for threads in [1, 3, 8] {
                let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
                let par = pool.install(|| monic_irreducibles_par(&f5, 5, &filters).unwrap());
                assert_eq!(par, seq);
            }
        }
    }

    #[test]
    fn patterns_agree_with_plain_filtering() {
        let f3 = f(3);
        let r = PolyRing::new(&f3);
        let all: Vec<Poly> = monic_irreducibles(&f3, 6, &[]).unwrap().collect();
        for c in ["1 mod 0-0-1", "2-1 mod 0-0-1", "1-2-1 mod 0-0-0-1", "1 mod 1-0-1"] {
            let cls = ResidueClass::parse(&r, c).unwrap();
            let want: Vec<Poly> = all.iter().filter(|p| cls.contains(&r, p)).cloned().collect();
            let got: Vec<Poly> = monic_irreducibles(&f3, 6, &[PlaceFilter::Class(cls)]).unwrap().collect();
            assert_eq!(got, want, "{c}");
        }
        for iv in ["A=0-0-0-0-0-0-1;h=2", "A=1-1-0-0-0-2-1;h=4", "A=2-2-2-2-2-2-1;h=0"] {
            let iv = ShortInterval::parse(&r, iv).unwrap();
            let want: Vec<Poly> = all.iter().filter(|p| iv.contains(&r, p)).cloned().collect();
            let got: Vec<Poly> = monic_irreducibles(&f3, 6, &[PlaceFilter::Interval(iv)]).unwrap().collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn interval_to_progression_examples() {
        let f3 = f(3);
        let r = PolyRing::new(&f3);
        let iv = ShortInterval::new(Poly::monomial(3), 1).unwrap();
        let prog = interval_to_progression(&iv);
        assert_eq!(prog.modulus, Poly::monomial(2));
        assert_eq!(prog.target, Poly::one());
        assert_eq!(prog.b, Poly::x());
        let iv = ShortInterval::parse(&r, "A=2-0-1-1;h=2").unwrap();
        let prog = interval_to_progression(&iv);
        assert_eq!((prog.modulus, prog.target), (Poly::x(), Poly::one()));
    }

    #[test]
    fn interval_congruence_exhaustive_q3() {
        let f3 = f(3);
        let r = PolyRing::new(&f3);
        for d in 1..=5usize {
            for a in r.monic_of_degree(d) {
                for h in 0..d {
                    let iv = ShortInterval::new(a.clone(), h).unwrap();
                    let prog = interval_to_progression(&iv);
                    let k = d - h;
                    for g in r.monic_of_degree(d).filter(|g| !g.constant_term().is_zero()) {
                        let in_iv = iv.contains(&r, &g);
                        let congruent = g.reverse().unwrap().truncate(k) == prog.target;
                        assert_eq!(in_iv, congruent, "A={a} h={h} f={g}");
                    }
                }
            }
        }
    }

    #[test]
    fn short_interval_validation() {
        let f3 = f(3);
        let r = PolyRing::new(&f3);
        assert!(ShortInterval::new(Poly::monomial(2), 2).is_err());
        assert!(ShortInterval::new(r.parse("0-0-2").unwrap(), 0).is_err());
        let iv = ShortInterval::parse(&r, "A=0-0-1;h=1").unwrap();
        assert_eq!(iv.to_string(), "A=0-0-1;h=1");
        let rc = ResidueClass::parse(&r, "4 mod 0-1");
        assert!(rc.is_err());
        let rc = ResidueClass::parse(&r, "2-1 mod 0-1").unwrap();
        assert_eq!(rc.to_string(), "2 mod 0-1");
    }
}
