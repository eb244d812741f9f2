//! Rational functions a = u/v in F_q(T), the places of F_q(T) and divisors.

use std::fmt;

use crate::error::{Error, Result};
use crate::galois::FieldSpec;
use crate::poly::{Poly, PolyRing};

/// A reduced fraction u/v with gcd(u, v) = 1 and v monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(ring: &PolyRing<'_>, num: Poly, den: Poly) -> Result<RationalFn> {
        if den.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = ring.gcd(&num, &den);
        let (num, den) = (ring.div_exact(&num, &g), ring.div_exact(&den, &g));
        let scale = ring.field().inv(den.leading().expect("nonzero"))?;
        Ok(RationalFn { num: ring.scale(&num, scale), den: ring.scale(&den, scale) })
    }

    pub fn from_poly(p: Poly) -> RationalFn {
        RationalFn { num: p, den: Poly::one() }
    }

    /// Parses "<num>/<den>"; a bare polynomial means denominator 1.
    pub fn parse(ring: &PolyRing<'_>, s: &str) -> Result<RationalFn> {
        match s.split_once('/') {
            Some((n, d)) => RationalFn::new(ring, ring.parse(n)?, ring.parse(d)?),
            None => RationalFn::new(ring, ring.parse(s)?, Poly::one()),
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// True for elements of F_q (including zero).
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    /// Order at infinity: deg(den) - deg(num) (positive means a zero at infinity).
    pub fn order_at_infinity(&self) -> i64 {
        self.den.degree().unwrap_or(0) as i64 - self.num.degree().unwrap_or(0) as i64
    }

    /// The reduced fraction for a(1/T).
    pub fn reverse(&self, ring: &PolyRing<'_>) -> Result<RationalFn> {
        if self.num.is_zero() {
            return Ok(self.clone());
        }
        let nr = self.num.reverse()?;
        let dr = self.den.reverse()?;
        let shift = self.order_at_infinity();
        if shift >= 0 {
            RationalFn::new(ring, nr.shift(shift as usize), dr)
        } else {
            RationalFn::new(ring, nr, dr.shift((-shift) as usize))
        }
    }

    /// The image of a in F_P = F_q[T]/(P).
    pub fn residue(&self, ring: &PolyRing<'_>, place: &Poly) -> Result<Poly> {
        let v = ring.rem(&self.den, place)?;
        if v.is_zero() {
            return Err(Error::PoleAtPlace);
        }
        let inv = ring.inv_mod(&v, place)?;
        Ok(ring.mulmod(&ring.rem(&self.num, place)?, &inv, place))
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// A place of F_q(T): a monic irreducible polynomial or the point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PlaceRef {
    Finite(Poly),
    Infinity,
}

impl PlaceRef {
    pub fn degree(&self) -> usize {
        match self {
            PlaceRef::Finite(p) => p.degree().unwrap_or(0),
            PlaceRef::Infinity => 1,
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match self {
            PlaceRef::Finite(p) => Some(p),
            PlaceRef::Infinity => None,
        }
    }
}

impl fmt::Display for PlaceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceRef::Finite(p) => write!(f, "{p}"),
            PlaceRef::Infinity => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportEntry {
    pub place: PlaceRef,
    /// Positive for zeros, negative for poles.
    pub order: i64,
}

/// The divisor of a together with the counts that feed the explicit bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    /// Finite places in canonical order, then infinity.
    pub entries: Vec<SupportEntry>,
    /// Sum of the degrees of the places in supp(a).
    pub n_a: u64,
    /// Default largest break: half the largest pole order, 0 without poles.
    pub b_default: f64,
}

impl Support {
    pub fn contains(&self, place: &PlaceRef) -> bool {
        self.entries.iter().any(|e| &e.place == place)
    }

    pub fn contains_poly(&self, p: &Poly) -> bool {
        self.entries.iter().any(|e| e.place.as_poly() == Some(p))
    }

    pub fn finite_places(&self) -> impl Iterator<Item = &Poly> {
        self.entries.iter().filter_map(|e| e.place.as_poly())
    }

    /// Places that are zeros of a.
    pub fn zeros(&self) -> impl Iterator<Item = &PlaceRef> {
        self.entries.iter().filter(|e| e.order > 0).map(|e| &e.place)
    }
}

/// Computes the principal divisor of a non-constant a.
pub fn support(field: &FieldSpec, a: &RationalFn) -> Result<Support> {
    if a.is_constant() {
        return Err(Error::ConstantFunction);
    }
    let ring = PolyRing::new(field);
    let mut entries = Vec::new();
    if !a.num.is_constant() {
        for (p, m) in ring.factor(&a.num, 0)? {
            entries.push(SupportEntry { place: PlaceRef::Finite(p), order: i64::from(m) });
        }
    }
    if !a.den.is_constant() {
        for (p, m) in ring.factor(&a.den, 0)? {
            entries.push(SupportEntry { place: PlaceRef::Finite(p), order: -i64::from(m) });
        }
    }
    let q = field.q();
    entries.sort_by(|x, y| match (&x.place, &y.place) {
        (PlaceRef::Finite(s), PlaceRef::Finite(t)) => s.canonical_cmp(t, q),
        _ => unreachable!(),
    });
    let inf = a.order_at_infinity();
    if inf != 0 {
        entries.push(SupportEntry { place: PlaceRef::Infinity, order: inf });
    }
    debug_assert_eq!(entries.iter().map(|e| e.order * e.place.degree() as i64).sum::<i64>(), 0);
    let n_a = entries.iter().map(|e| e.place.degree() as u64).sum();
    let max_pole = entries.iter().filter(|e| e.order < 0).map(|e| -e.order).max().unwrap_or(0);
    Ok(Support { entries, n_a, b_default: max_pole as f64 / 2.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::galois::Fq;

    fn setup(p: u64) -> FieldSpec {
        FieldSpec::new(p, 1, None).unwrap()
    }

    #[test]
    fn construction_reduces_and_normalizes() {
        let f = setup(5);
        let r = PolyRing::new(&f);
        // (2T^2 + 2T) / (2T) = T + 1
        let a = RationalFn::new(&r, r.parse("0-2-2").unwrap(), r.parse("0-2").unwrap()).unwrap();
        assert_eq!(a.to_string(), "1-1/1");
        // T / (3T + 1) -> 2T / (T + 2)
        let b = RationalFn::new(&r, Poly::x(), r.parse("1-3").unwrap()).unwrap();
        assert_eq!(b.to_string(), "0-2/2-1");
        assert!(RationalFn::new(&r, Poly::x(), Poly::zero()).is_err());
    }

    #[test]
    fn reverse_examples() {
        let f = setup(3);
        let r = PolyRing::new(&f);
        let t = RationalFn::parse(&r, "0-1/1").unwrap();
        assert_eq!(t.reverse(&r).unwrap().to_string(), "1/0-1");
        let a = RationalFn::parse(&r, "1-0-1/0-1").unwrap();
        assert_eq!(a.reverse(&r).unwrap(), a);
        let b = RationalFn::parse(&r, "1-1/1").unwrap();
        assert_eq!(b.reverse(&r).unwrap().to_string(), "1-1/0-1");
    }

    #[test]
    fn reverse_is_pointwise_inversion() {
        let f = setup(7);
        let r = PolyRing::new(&f);
        for s in ["1-0-1/0-1", "3-1/2-0-1", "0-0-1/1-1", "5-4-0-1/1"] {
            let a = RationalFn::parse(&r, s).unwrap();
            let at = a.reverse(&r).unwrap();
            for c in 1..7u32 {
                let c = Fq::from_index(c);
                let ci = f.inv(c).unwrap();
                let (u, v) = (r.eval(a.num(), ci), r.eval(a.den(), ci));
                let (ut, vt) = (r.eval(at.num(), c), r.eval(at.den(), c));
                if u.is_zero() || v.is_zero() || ut.is_zero() || vt.is_zero() {
                    continue;
                }
                assert_eq!(f.mul(u, f.inv(v).unwrap()), f.mul(ut, f.inv(vt).unwrap()), "{s} at {c}");
            }
        }
    }

    #[test]
    fn support_examples() {
        let f = setup(3);
        let r = PolyRing::new(&f);
        let t = RationalFn::parse(&r, "0-1").unwrap();
        let s = support(&f, &t).unwrap();
        assert_eq!(
            s.entries,
            vec![
                SupportEntry { place: PlaceRef::Finite(Poly::x()), order: 1 },
                SupportEntry { place: PlaceRef::Infinity, order: -1 },
            ]
        );
        assert_eq!(s.n_a, 2);
        assert_eq!(s.b_default, 0.5);

        let a = RationalFn::parse(&r, "1-0-1/0-1").unwrap();
        let s = support(&f, &a).unwrap();
        assert_eq!(s.n_a, 4);
        assert_eq!(s.entries.len(), 3);
        assert!(s.entries.contains(&SupportEntry { place: PlaceRef::Finite(r.parse("1-0-1").unwrap()), order: 1 }));
        assert!(s.entries.contains(&SupportEntry { place: PlaceRef::Finite(Poly::x()), order: -1 }));
        assert!(s.entries.contains(&SupportEntry { place: PlaceRef::Infinity, order: -1 }));

        let t2 = RationalFn::parse(&r, "0-0-1").unwrap();
        let s = support(&f, &t2).unwrap();
        assert_eq!(s.entries[0].order, 2);
        assert_eq!(s.entries[1], SupportEntry { place: PlaceRef::Infinity, order: -2 });
        assert_eq!((s.n_a, s.b_default), (2, 1.0));

        assert_eq!(support(&f, &RationalFn::parse(&r, "2").unwrap()), Err(Error::ConstantFunction));
    }

    #[test]
    fn residue_examples() {
        let f = setup(3);
        let r = PolyRing::new(&f);
        let a = RationalFn::parse(&r, "1-0-1/0-1").unwrap();
        assert_eq!(a.residue(&r, &r.parse("2-1").unwrap()).unwrap(), r.parse("2").unwrap());
        let t = RationalFn::parse(&r, "0-1").unwrap();
        for c in 0..3u32 {
            let place = r.parse(&format!("{}-1", (3 - c) % 3)).unwrap();
            assert_eq!(t.residue(&r, &place).unwrap(), Poly::constant(Fq::from_index(c)));
        }
        let inv_t = RationalFn::parse(&r, "1/0-1").unwrap();
        assert_eq!(inv_t.residue(&r, &Poly::x()), Err(Error::PoleAtPlace));
    }
}
