//! Exact prime-polynomial counts with their main terms: the prime number
//! theorem for F_q(T), residue classes, short intervals and Chebotarev-style
//! class reports for the Carlitz fields of T^r.

use std::collections::BTreeMap;

use crate::equidist::is_excluded_short;
use crate::error::{Error, Result};
use crate::galois::FieldSpec;
use crate::places::{interval_to_progression, monic_irreducibles_par, PlaceFilter, ResidueClass, ShortInterval};
use crate::poly::{Poly, PolyRing};

/// Largest degree accepted by the closed-form counts.
pub const MAX_COUNT_DEGREE: usize = 64;

pub fn mobius(n: u64) -> i64 {
    let mut n = n;
    let mut sign = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// (1/d) sum_{e | d} mu(e) q^(d/e).
pub fn count_monic_irreducibles(q: u64, d: usize) -> Result<u128> {
    if d == 0 || d > MAX_COUNT_DEGREE {
        return Err(Error::InvalidDegree(d));
    }
    let overflow = || Error::InvalidParams(format!("{q}^{d} overflows the exact counter"));
    let mut total: i128 = 0;
    for e in (1..=d).filter(|e| d % e == 0) {
        let mu = mobius(e as u64);
        if mu == 0 {
            continue;
        }
        let pw = u128::from(q).checked_pow((d / e) as u32).ok_or_else(overflow)?;
        let pw = i128::try_from(pw).map_err(|_| overflow())?;
        total += i128::from(mu) * pw;
    }
    Ok((total / d as i128) as u128)
}

/// Places of degree m of F_q(T): monic irreducibles, plus infinity when m = 1.
pub fn count_places(q: u64, m: usize) -> Result<u128> {
    Ok(count_monic_irreducibles(q, m)? + u128::from(m == 1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountReport {
    pub label: String,
    pub exact: u128,
    pub main: f64,
    pub deviation: f64,
    pub bound: Option<f64>,
    /// m * deviation / q^(m/2), for trend comparisons across degrees.
    pub normalized: f64,
    /// Some(deviation <= bound) when a bound is attached.
    pub pass: Option<bool>,
}

impl CountReport {
    pub fn new(label: String, exact: u128, main: f64, q: u32, m: usize, bound: Option<f64>) -> CountReport {
        let deviation = (exact as f64 - main).abs();
        let normalized = m as f64 * deviation / f64::from(q).powf(m as f64 / 2.0);
        CountReport { label, exact, main, deviation, bound, normalized, pass: bound.map(|b| deviation <= b) }
    }
}

/// |count_places - q^m/m| against (6g + 4) q^(m/2) / m with g = 0.
pub fn pnt_report(q: u32, m: usize) -> Result<CountReport> {
    let exact = count_places(u64::from(q), m)?;
    let qf = f64::from(q);
    let mf = m as f64;
    let bound = 4.0 * qf.powf(mf / 2.0) / mf;
    Ok(CountReport::new(format!("places q={q} m={m}"), exact, qf.powf(mf) / mf, q, m, Some(bound)))
}

/// #(F_q[T]/(g))^x from the factorization of g.
pub fn unit_group_order(field: &FieldSpec, g: &Poly) -> Result<u128> {
    let ring = PolyRing::new(field);
    match g.degree() {
        None => Err(Error::ZeroModulus),
        Some(0) => Ok(1),
        Some(_) => {
            let q = u128::from(field.q());
            let mut phi = 1u128;
            for (pl, e) in ring.factor(g, 0)? {
                let nq = q.pow(pl.degree().expect("nonconstant") as u32);
                phi *= nq.pow(e - 1) * (nq - 1);
            }
            Ok(phi)
        }
    }
}

/// Reduced residues coprime to g, in canonical order.
pub fn units_mod(field: &FieldSpec, g: &Poly) -> Result<Vec<Poly>> {
    let ring = PolyRing::new(field);
    let k = g.degree().ok_or(Error::ZeroModulus)?;
    let q = field.q();
    let total = u128::from(q)
        .checked_pow(k as u32)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::InvalidParams("modulus too large to list its units".into()))?;
    if k == 0 {
        return Ok(vec![Poly::zero()]);
    }
    Ok((0..total).map(|c| Poly::from_code(c, k, q)).filter(|r| !r.is_zero() && ring.gcd(r, g).is_one()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassCountTable {
    pub modulus: Poly,
    pub d: usize,
    /// Every unit class mod g with its count, in canonical order of the residue.
    pub entries: Vec<(Poly, u64)>,
    pub total: u64,
    pub phi: u128,
    /// q^d / (d Phi(g)).
    pub main: f64,
}

/// Counts monic irreducibles of degree d coprime to g, per residue class mod g.
pub fn class_counts(field: &FieldSpec, d: usize, g: &Poly) -> Result<ClassCountTable> {
    if g.is_zero() {
        return Err(Error::ZeroModulus);
    }
    let ring = PolyRing::new(field);
    let g = ring.monic(g);
    let q = field.q();
    let mut counts: BTreeMap<u128, u64> = units_mod(field, &g)?.iter().map(|u| (u.code(q), 0)).collect();
    let k = g.degree().expect("nonzero");
    for pl in monic_irreducibles_par(field, d, &[])? {
        let r = ring.rem(&pl, &g)?;
        if let Some(c) = counts.get_mut(&r.code(q)) {
            *c += 1;
        }
    }
    let entries: Vec<(Poly, u64)> = counts.into_iter().map(|(code, n)| (Poly::from_code(code, k, q), n)).collect();
    let total = entries.iter().map(|e| e.1).sum();
    let phi = unit_group_order(field, &g)?;
    let main = f64::from(q).powi(d as i32) / (d as f64 * phi as f64);
    Ok(ClassCountTable { modulus: g, d, entries, total, phi, main })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ShortIntervalCensus {
    pub report: CountReport,
    /// Same count through the progressions mod T^(d-h).
    pub via_progressions: u128,
    pub bijection_holds: bool,
    /// (d, h) is one of the pairs without the lower bound.
    pub excluded: bool,
}

/// |Pi_d(A, h)|: irreducibles in I(A, h) with nonzero constant term, main term
/// q^(h+1)/d, and the count rebuilt from the progressions that the reversal
/// involution maps the interval onto. The attached bound q^(d/2+1) is a
/// calibrated reference scale.
pub fn short_interval_census(field: &FieldSpec, iv: &ShortInterval) -> Result<ShortIntervalCensus> {
    let d = iv.degree();
    let h = iv.h();
    let q = field.q();
    let ring = PolyRing::new(field);
    let direct = monic_irreducibles_par(field, d, &[PlaceFilter::Interval(iv.clone()), PlaceFilter::NonzeroConstant])?;
    let prog = interval_to_progression(iv);
    let mut via = 0u128;
    for mu in field.elements().filter(|c| !c.is_zero()) {
        let target = ring.scale(&prog.target, field.inv(mu)?);
        let cls = ResidueClass::new(&ring, &target, &prog.modulus)?;
        via += monic_irreducibles_par(field, d, &[PlaceFilter::Class(cls)])?.len() as u128;
    }
    let qf = f64::from(q);
    let main = qf.powi(h as i32 + 1) / d as f64;
    let bound = qf.powf(d as f64 / 2.0 + 1.0);
    let exact = direct.len() as u128;
    let report = CountReport::new(format!("short {iv}"), exact, main, q, d, Some(bound));
    Ok(ShortIntervalCensus {
        report,
        via_progressions: via,
        bijection_holds: via == exact,
        excluded: is_excluded_short(d, h),
    })
}

/// One report per unit class c mod T^r: exact count of degree-d monic
/// irreducibles congruent to c against q^d / (d q^(r-1) (q-1)). The bound
/// (12g + 5 + 4 deg D) q^(d/2) / d is attached only when deg D is supplied.
pub fn chebotarev_report(field: &FieldSpec, d: usize, r: usize, disc_degree: Option<f64>) -> Result<Vec<CountReport>> {
    if r == 0 || d == 0 {
        return Err(Error::InvalidParams("need r >= 1 and d >= 1".into()));
    }
    let table = class_counts(field, d, &Poly::monomial(r))?;
    let q = field.q();
    let qf = f64::from(q);
    let main = qf.powi(d as i32) / (d as f64 * qf.powi(r as i32 - 1) * (qf - 1.0));
    let bound = disc_degree.map(|dd| (5.0 + 4.0 * dd) * qf.powf(d as f64 / 2.0) / d as f64);
    Ok(table
        .entries
        .iter()
        .map(|(c, n)| {
            CountReport::new(format!("class {c} mod {} d={d}", table.modulus), u128::from(*n), main, q, d, bound)
        })
        .collect())
}
