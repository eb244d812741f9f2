//! Kloosterman sums Kl(P, a) = sum over x in F_P^x of psi(Tr(x + a/x)) and their angles.
//!
//! The sum is evaluated from an integer histogram of absolute trace values, so
//! the only floating-point work is one cosine per residue t mod p. The histogram
//! itself comes from a walk over powers of a generator g of F_P^x: with x = g^i
//! and a = g^j the pair (x, a/x) is (g^i, g^(j-i)), so one pass records every
//! trace and a second pass pairs them up. Each step of the walk multiplies by g,
//! which is usually T + c and then costs O(d) base-field operations.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::galois::{prime_factors, ExtFieldCtx, FieldSpec, Fq};
use crate::places::{monic_irreducibles_par, PlaceFilter, ResidueClass};
use crate::poly::{Poly, PolyRing};
use crate::rational::{support, RationalFn};

/// Largest residue field handled by the histogram walk (one u32 per element).
pub const MAX_RESIDUE_FIELD: u64 = 1 << 26;

/// Slack allowed on top of the Weil bound before an angle is rejected.
pub const WEIL_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceHistogram {
    /// counts[t] = #{x : psi-index of Tr(x + a/x) is t}, for t in 0..p.
    pub counts: Vec<u64>,
    pub degree: usize,
    pub q: u32,
}

impl TraceHistogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// sum_t counts[t] e(t/p) split into (real, imaginary).
    fn exponential_sum(&self) -> (f64, f64) {
        let p = self.counts.len() as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (t, &c) in self.counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (s, co) = (2.0 * PI * t as f64 / p).sin_cos();
            re += c as f64 * co;
            im += c as f64 * s;
        }
        (re, im)
    }

    /// Imaginary part of the sum; zero up to rounding.
    pub fn sine_part(&self) -> f64 {
        self.exponential_sum().1
    }
}

/// Kl as the real part of the histogram's exponential sum.
pub fn kloosterman_sum(hist: &TraceHistogram) -> f64 {
    hist.exponential_sum().0
}

/// theta in [0, pi] with kl = 2 q^(d/2) cos(theta).
pub fn angle(kl: f64, q: u32, d: usize) -> Result<f64> {
    let bound = 2.0 * f64::from(q).powf(d as f64 / 2.0);
    if kl.abs() > bound + WEIL_TOLERANCE {
        return Err(Error::WeilViolation { kl, bound });
    }
    Ok((kl / bound).clamp(-1.0, 1.0).acos())
}

/// Data shared by all places of one degree over one base field.
#[derive(Clone, Debug)]
pub struct DegreeContext {
    d: usize,
    order: u64,
    order_factors: Vec<u64>,
}

impl DegreeContext {
    pub fn new(field: &FieldSpec, d: usize) -> Result<DegreeContext> {
        if d == 0 {
            return Err(Error::InvalidDegree(0));
        }
        let size = u64::from(field.q())
            .checked_pow(d as u32)
            .filter(|&s| s <= MAX_RESIDUE_FIELD)
            .ok_or_else(|| Error::InvalidParams(format!("residue field q^{d} exceeds {MAX_RESIDUE_FIELD}")))?;
        let order = size - 1;
        Ok(DegreeContext { d, order, order_factors: prime_factors(order) })
    }

    /// |F_P^x| = q^d - 1.
    pub fn order(&self) -> u64 {
        self.order
    }
}

/// A generator of F_P^x: the first primitive element among the reductions of
/// the monic polynomials of degree 1, 2, ... in canonical order.
pub fn find_generator(ctx: &ExtFieldCtx, dc: &DegreeContext) -> Poly {
    let field = ctx.base();
    let ring = PolyRing::new(field);
    let place = ctx.place();
    let q = field.q();
    let prime = (field.e() == 1).then(|| PrimeResidue::new(field.p(), place));
    let one = Poly::one();
    for deg in 1.. {
        for code in 0..u128::from(q).pow(deg as u32) {
            let g = ring.add(&Poly::from_code(code, deg, q), &Poly::monomial(deg));
            let g = ring.rem(&g, place).expect("nonzero place");
            if g.is_zero() {
                continue;
            }
            let primitive = match &prime {
                Some(pr) => {
                    let gi = pr.coords(&g);
                    dc.order_factors.iter().all(|&l| !pr.is_one(&pr.pow(&gi, dc.order / l)))
                }
                None => dc
                    .order_factors
                    .iter()
                    .all(|&l| ring.powmod(&g, u128::from(dc.order / l), place).expect("nonzero place") != one),
            };
            if primitive {
                return g;
            }
        }
    }
    unreachable!("F_P^x is cyclic")
}

/// F_p[T]/(P) on plain integer coordinates, for the generator search.
struct PrimeResidue {
    p: u64,
    neg_low: Vec<u64>,
}

impl PrimeResidue {
    fn new(p: u32, place: &Poly) -> PrimeResidue {
        let p = u64::from(p);
        let d = place.degree().expect("nonzero");
        let neg_low = place.coeffs()[..d].iter().map(|c| (p - u64::from(c.index())) % p).collect();
        PrimeResidue { p, neg_low }
    }

    fn coords(&self, x: &Poly) -> Vec<u64> {
        (0..self.neg_low.len()).map(|i| u64::from(x.coeff(i).index())).collect()
    }

    fn is_one(&self, x: &[u64]) -> bool {
        x[0] == 1 && x[1..].iter().all(|&v| v == 0)
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (p, d) = (self.p, a.len());
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + ai * bj % p) % p;
            }
        }
        for k in (d..2 * d - 1).rev() {
            let t = prod[k];
            for (i, &nl) in self.neg_low.iter().enumerate() {
                prod[k - d + i] = (prod[k - d + i] + t * nl % p) % p;
            }
        }
        prod.truncate(d);
        prod
    }

    fn pow(&self, x: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = vec![0u64; x.len()];
        acc[0] = 1;
        let mut b = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        acc
    }
}

/// Walks x = g^i in coordinates with scratch buffers reused across steps.
struct Walker<'a> {
    field: &'a FieldSpec,
    /// Lower coefficients of the monic place.
    low: Vec<Fq>,
    /// Coefficients of the generator, reduced mod P.
    gen: Vec<Fq>,
    acc: Vec<Fq>,
}

impl<'a> Walker<'a> {
    fn new(field: &'a FieldSpec, place: &Poly, gen: &Poly) -> Walker<'a> {
        let d = place.degree().expect("nonzero");
        let low = place.coeffs()[..d].to_vec();
        let gen = (0..d).map(|i| gen.coeff(i)).collect();
        Walker { field, low, gen, acc: vec![Fq::ZERO; d] }
    }

    /// y <- T*y mod P.
    #[inline]
    fn times_t(field: &FieldSpec, low: &[Fq], y: &mut [Fq]) {
        let d = y.len();
        let top = y[d - 1];
        for i in (1..d).rev() {
            y[i] = y[i - 1];
        }
        y[0] = Fq::ZERO;
        if !top.is_zero() {
            for i in 0..d {
                y[i] = field.sub(y[i], field.mul(top, low[i]));
            }
        }
    }

    /// x <- g*x mod P by Horner in T over the coefficients of g.
    fn step(&mut self, x: &mut [Fq]) {
        let f = self.field;
        let top = self.gen.iter().rposition(|c| !c.is_zero()).expect("generator is nonzero");
        self.acc.fill(Fq::ZERO);
        for k in (0..=top).rev() {
            Self::times_t(f, &self.low, &mut self.acc);
            let c = self.gen[k];
            if !c.is_zero() {
                for (a, &xi) in self.acc.iter_mut().zip(x.iter()) {
                    *a = f.add(*a, f.mul(c, xi));
                }
            }
        }
        x.copy_from_slice(&self.acc);
    }
}

trait Reduce {
    fn reduce(&self, v: u64) -> u32;
}

struct ModReduce(u64);

impl Reduce for ModReduce {
    #[inline(always)]
    fn reduce(&self, v: u64) -> u32 {
        (v % self.0) as u32
    }
}

/// Lookup table for v mod p over the small range the walk produces.
struct TableReduce(Vec<u32>);

impl TableReduce {
    fn new(p: u32, len: usize) -> TableReduce {
        TableReduce((0..len as u64).map(|v| (v % u64::from(p)) as u32).collect())
    }
}

impl Reduce for TableReduce {
    #[inline(always)]
    fn reduce(&self, v: u64) -> u32 {
        self.0[v as usize]
    }
}

/// Walk over F_p[T]/(P) by a generator g, with integer coordinates.
struct PrimeWalk<'a> {
    p: u32,
    low: &'a [u32],
    /// Coefficients of g up to its degree.
    gen: &'a [u32],
    bt: &'a [u32],
    target: &'a [u32],
}

impl PrimeWalk<'_> {
    /// Pushes the trace of every g^i and returns the exponent of the target.
    fn run<R: Reduce>(&self, red: &R, n: usize, tr: &mut Vec<u32>) -> Option<usize> {
        let d = self.low.len();
        let p = u64::from(self.p);
        let neg_low: Vec<u64> = self.low.iter().map(|&l| (p - u64::from(l)) % p).collect();
        let bt: Vec<u64> = self.bt.iter().map(|&b| u64::from(b)).collect();
        let gen: Vec<u64> = self.gen.iter().map(|&c| u64::from(c)).collect();
        let linear = gen.len() == 2 && gen[1] == 1;
        let mut x = vec![0u32; d];
        let mut acc = vec![0u32; d];
        x[0] = 1;
        let mut j = None;
        for i in 0..n {
            if j.is_none() && x == self.target {
                j = Some(i);
            }
            let t: u64 = x.iter().zip(&bt).map(|(&xi, &b)| u64::from(xi) * b).sum();
            tr.push(red.reduce(t));
            if linear {
                // x <- (T + c) x, reducing T^d by -low
                let c = gen[0];
                let top = u64::from(x[d - 1]);
                for k in (1..d).rev() {
                    x[k] = red.reduce(u64::from(x[k - 1]) + top * neg_low[k] + c * u64::from(x[k]));
                }
                x[0] = red.reduce(top * neg_low[0] + c * u64::from(x[0]));
            } else {
                // Horner: acc <- T acc + g_k x, from the top coefficient down
                acc.fill(0);
                for &g in gen.iter().rev() {
                    let top = u64::from(acc[d - 1]);
                    for k in (1..d).rev() {
                        acc[k] = red.reduce(u64::from(acc[k - 1]) + top * neg_low[k] + g * u64::from(x[k]));
                    }
                    acc[0] = red.reduce(top * neg_low[0] + g * u64::from(x[0]));
                }
                x.copy_from_slice(&acc);
            }
        }
        debug_assert!(x[0] == 1 && x[1..].iter().all(|&v| v == 0), "walk must close up");
        j
    }
}

/// Histogram of psi-indices of Tr(x + abar/x) for a nonzero abar in F_P.
pub fn trace_histogram_at(ctx: &ExtFieldCtx, dc: &DegreeContext, abar: &Poly) -> Result<TraceHistogram> {
    let field = ctx.base();
    let d = ctx.degree();
    if dc.d != d {
        return Err(Error::DegreeMismatch { expected: dc.d, got: d });
    }
    if abar.is_zero() {
        return Err(Error::PlaceInSupport);
    }
    if abar.degree().is_some_and(|k| k >= d) {
        return Err(Error::DegreeTooLarge { got: abar.degree().unwrap_or(0), degree: d });
    }
    let p = field.p();
    let n = dc.order as usize;
    let bt = ctx.basis_traces();
    let target: Vec<Fq> = (0..d).map(|i| abar.coeff(i)).collect();

    let gen = find_generator(ctx, dc);
    let mut tr = Vec::with_capacity(n);
    let j = if field.e() == 1 {
        let low: Vec<u32> = ctx.place().coeffs()[..d].iter().map(|c| c.index()).collect();
        let bt: Vec<u32> = bt.iter().map(|c| c.index()).collect();
        let target: Vec<u32> = target.iter().map(|c| c.index()).collect();
        let g: Vec<u32> = gen.coeffs().iter().map(|c| c.index()).collect();
        let walk = PrimeWalk { p, low: &low, gen: &g, bt: &bt, target: &target };
        let table_len = (d as u64 + 3) * u64::from(p) * u64::from(p);
        if table_len <= 1 << 16 {
            walk.run(&TableReduce::new(p, table_len as usize), n, &mut tr)
        } else {
            walk.run(&ModReduce(u64::from(p)), n, &mut tr)
        }
    } else {
        let mut walker = Walker::new(field, ctx.place(), &gen);
        let mut x = vec![Fq::ZERO; d];
        x[0] = Fq::ONE;
        let mut j = None;
        for i in 0..n {
            if j.is_none() && x == target {
                j = Some(i);
            }
            let t = x.iter().zip(bt).fold(Fq::ZERO, |s, (&c, &b)| field.add(s, field.mul(c, b)));
            tr.push(field.abs_trace_index(t));
            walker.step(&mut x);
        }
        debug_assert!(x[0] == Fq::ONE && x[1..].iter().all(|c| c.is_zero()), "walk must close up");
        j
    };
    let j = j.expect("abar is a power of the generator");

    let mut counts = vec![0u64; p as usize];
    for i in 0..n {
        let inv = if i <= j { j - i } else { j + n - i };
        let t = (tr[i] + tr[inv]) % p;
        counts[t as usize] += 1;
    }
    Ok(TraceHistogram { counts, degree: d, q: field.q() })
}

/// Histogram for a rational function at a finite place outside its support.
pub fn trace_histogram(ctx: &ExtFieldCtx, a: &RationalFn) -> Result<TraceHistogram> {
    let dc = DegreeContext::new(ctx.base(), ctx.degree())?;
    let abar = reduce_at(ctx, a)?;
    trace_histogram_at(ctx, &dc, &abar)
}

fn reduce_at(ctx: &ExtFieldCtx, a: &RationalFn) -> Result<Poly> {
    let ring = PolyRing::new(ctx.base());
    let abar = a.residue(&ring, ctx.place()).map_err(|e| match e {
        Error::PoleAtPlace => Error::PlaceInSupport,
        other => other,
    })?;
    if abar.is_zero() {
        return Err(Error::PlaceInSupport);
    }
    Ok(abar)
}

/// Reference evaluation straight from the definition: field inverses by the
/// extended Euclidean algorithm, traces as power sums, complex accumulation.
pub fn kloosterman_direct(ctx: &ExtFieldCtx, a: &RationalFn) -> Result<(f64, f64)> {
    let abar = reduce_at(ctx, a)?;
    let field = ctx.base();
    let ring = PolyRing::new(field);
    let place = ctx.place();
    let d = ctx.degree();
    let q = field.q();
    let p = f64::from(field.p());
    let (mut re, mut im) = (0.0, 0.0);
    for code in 1..u128::from(q).pow(d as u32) {
        let x = Poly::from_code(code, d, q);
        let y = ring.add(&x, &ring.mulmod(&abar, &ring.inv_mod(&x, place)?, place));
        let t = field.abs_trace_index(ctx.trace_to_base(&y)?);
        let (s, c) = (2.0 * PI * f64::from(t) / p).sin_cos();
        re += c;
        im += s;
    }
    Ok((re, im))
}

/// |Kl(P, a) - Kl(P*, a~)| where P* is made monic and a~(T) = a(1/T).
pub fn reversal_residual(field: &FieldSpec, place: &Poly, a: &RationalFn) -> Result<f64> {
    if place.constant_term().is_zero() {
        return Err(Error::InvalidParams("place must have nonzero constant term".into()));
    }
    let ring = PolyRing::new(field);
    let ctx = ExtFieldCtx::new(field, place)?;
    let rev = ring.monic(&place.reverse()?);
    let rctx = ExtFieldCtx::new(field, &rev)?;
    let at = a.reverse(&ring)?;
    let lhs = kloosterman_sum(&trace_histogram(&ctx, a)?);
    let rhs = kloosterman_sum(&trace_histogram(&rctx, &at)?);
    Ok((lhs - rhs).abs())
}

/// (kl, theta) at the degree-1 place infinity, or None when it is in supp(a).
/// There a takes the value lc(num)/lc(den), and F_inf = F_q.
pub fn infinity_angle(field: &FieldSpec, a: &RationalFn) -> Result<Option<(f64, f64)>> {
    if a.order_at_infinity() != 0 || a.num().is_zero() {
        return Ok(None);
    }
    let value = a.num().leading().expect("nonzero");
    let ctx = ExtFieldCtx::new_unchecked(field, &Poly::x());
    let hist = trace_histogram_at(&ctx, &DegreeContext::new(field, 1)?, &Poly::constant(value))?;
    let kl = kloosterman_sum(&hist);
    Ok(Some((kl, angle(kl, field.q(), 1)?)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleSample {
    pub place: Poly,
    pub degree: usize,
    pub kl: f64,
    pub theta: f64,
}

/// Kl and theta at one place, with every histogram invariant checked.
pub fn angle_sample(ctx: &ExtFieldCtx, dc: &DegreeContext, a: &RationalFn) -> Result<AngleSample> {
    let hist = trace_histogram_at(ctx, dc, &reduce_at(ctx, a)?)?;
    debug_assert_eq!(hist.total(), dc.order);
    let kl = kloosterman_sum(&hist);
    let q = ctx.base().q();
    let theta = angle(kl, q, ctx.degree())?;
    Ok(AngleSample { place: ctx.place().clone(), degree: ctx.degree(), kl, theta })
}

/// One row per place of degree d outside supp(a) that passes the filters, in
/// canonical order. Runs on the current rayon pool; output is independent of it.
#[derive(Clone, Debug, PartialEq)]
pub struct AngleTable {
    pub field: FieldSpec,
    pub a: RationalFn,
    pub d: usize,
    pub rows: Vec<AngleSample>,
    /// Moduli g whose residue classes tag each row.
    pub tag_moduli: Vec<Poly>,
    /// tags[i][k] = rows[i].place mod tag_moduli[k].
    pub tags: Vec<Vec<Poly>>,
}

impl AngleTable {
    pub fn thetas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.theta).collect()
    }

    /// Attaches residue-class tags for the given moduli.
    pub fn with_tags(mut self, moduli: &[Poly]) -> Result<AngleTable> {
        let ring = PolyRing::new(&self.field);
        for g in moduli {
            if g.is_zero() {
                return Err(Error::ZeroModulus);
            }
        }
        self.tags = self
            .rows
            .iter()
            .map(|r| moduli.iter().map(|g| ring.rem(&r.place, g)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        self.tag_moduli = moduli.to_vec();
        Ok(self)
    }

    /// Rows whose place lies in the class.
    pub fn restrict(&self, class: &ResidueClass) -> Vec<&AngleSample> {
        let ring = PolyRing::new(&self.field);
        self.rows.iter().filter(|r| class.contains(&ring, &r.place)).collect()
    }
}

pub fn angle_table(field: &FieldSpec, a: &RationalFn, d: usize, filters: &[PlaceFilter]) -> Result<AngleTable> {
    let supp = support(field, a)?;
    let dc = DegreeContext::new(field, d)?;
    let mut all = filters.to_vec();
    all.push(PlaceFilter::avoid(&supp));
    let places = monic_irreducibles_par(field, d, &all)?;
    let rows = places
        .par_iter()
        .map(|pl| angle_sample(&ExtFieldCtx::new_unchecked(field, pl), &dc, a))
        .collect::<Result<Vec<_>>>()?;
    Ok(AngleTable { field: field.clone(), a: a.clone(), d, rows, tag_moduli: Vec::new(), tags: Vec::new() })
}

/// Angles of several parameters at the common places of degree d outside every
/// support: row i holds (place, [theta_1, ..., theta_n]).
pub fn joint_angles(
    field: &FieldSpec,
    params: &[RationalFn],
    d: usize,
    filters: &[PlaceFilter],
) -> Result<Vec<(Poly, Vec<f64>)>> {
    let mut all = filters.to_vec();
    for a in params {
        all.push(PlaceFilter::avoid(&support(field, a)?));
    }
    let tables = params.iter().map(|a| angle_table(field, a, d, &all)).collect::<Result<Vec<_>>>()?;
    let n = tables.first().map_or(0, |t| t.rows.len());
    Ok((0..n).map(|i| (tables[0].rows[i].place.clone(), tables.iter().map(|t| t.rows[i].theta).collect())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(p: u64) -> FieldSpec {
        FieldSpec::new(p, 1, None).unwrap()
    }

    fn hist(field: &FieldSpec, place: &str, a: &str) -> Result<TraceHistogram> {
        let r = PolyRing::new(field);
        let ctx = ExtFieldCtx::new(field, &r.parse(place).unwrap()).unwrap();
        trace_histogram(&ctx, &RationalFn::parse(&r, a).unwrap())
    }

    #[test]
    fn histogram_examples() {
        let f3 = setup(3);
        assert_eq!(hist(&f3, "2-1", "0-1").unwrap().counts, [0, 1, 1]);
        assert_eq!(hist(&f3, "1-1", "0-1").unwrap().counts, [2, 0, 0]);
        assert_eq!(hist(&f3, "0-1", "0-1"), Err(Error::PlaceInSupport));
        assert_eq!(hist(&f3, "0-1", "1/0-1"), Err(Error::PlaceInSupport));
        assert!((kloosterman_sum(&hist(&f3, "2-1", "0-1").unwrap()) + 1.0).abs() < 1e-12);
        let f5 = setup(5);
        let h = hist(&f5, "4-1", "0-1").unwrap();
        assert_eq!(h.counts, [2, 0, 1, 1, 0]);
        assert!((kloosterman_sum(&h) - 0.381_966_011_250_105_1).abs() < 1e-12);
    }

    #[test]
    fn angle_examples() {
        assert!((angle(0.0, 5, 3).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((angle(-1.0, 3, 1).unwrap() - 1.863_639_098_523_472).abs() < 1e-12);
        assert_eq!(angle(2.0 * 5f64.powf(1.5), 5, 3).unwrap(), 0.0);
        assert!(matches!(angle(2.0 * 3f64.sqrt() + 1e-3, 3, 1), Err(Error::WeilViolation { .. })));
    }

    /// Walk-based histograms against direct complex summation for q^d <= 3^5.
    #[test]
    fn walk_matches_direct_summation() {
        let cases: [(u64, u32, usize); 6] = [(2, 1, 5), (3, 1, 5), (5, 1, 3), (7, 1, 2), (2, 2, 2), (3, 2, 2)];
        for (p, e, max_d) in cases {
            let f = FieldSpec::new(p, e, None).unwrap();
            let r = PolyRing::new(&f);
            let params = ["0-1", "1-0-1/0-1", "1/1-1"];
            for d in 1..=max_d {
                let dc = DegreeContext::new(&f, d).unwrap();
                for pl in crate::places::monic_irreducibles(&f, d, &[]).unwrap() {
                    let ctx = ExtFieldCtx::new_unchecked(&f, &pl);
                    for s in params {
                        let a = RationalFn::parse(&r, s).unwrap();
                        let Ok(abar) = reduce_at(&ctx, &a) else { continue };
                        let h = trace_histogram_at(&ctx, &dc, &abar).unwrap();
                        assert_eq!(h.total(), dc.order());
                        let (re, im) = kloosterman_direct(&ctx, &a).unwrap();
                        assert!((kloosterman_sum(&h) - re).abs() < 1e-9, "q={} P={pl} a={s}", f.q());
                        assert!(im.abs() < 1e-9 && h.sine_part().abs() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn generator_is_primitive() {
        let f = setup(3);
        let r = PolyRing::new(&f);
        for pl in crate::places::monic_irreducibles(&f, 4, &[]).unwrap() {
            let ctx = ExtFieldCtx::new_unchecked(&f, &pl);
            let dc = DegreeContext::new(&f, 4).unwrap();
            let g = find_generator(&ctx, &dc);
            let mut seen = std::collections::HashSet::new();
            let mut x = Poly::one();
            for _ in 0..dc.order() {
                assert!(seen.insert(x.clone()));
                x = r.mulmod(&x, &g, &pl);
            }
            assert!(x.is_one());
        }
    }

    #[test]
    fn reversal_examples() {
        let f5 = setup(5);
        let r5 = PolyRing::new(&f5);
        let a = RationalFn::parse(&r5, "1-0-1/0-1").unwrap();
        // T - 2 divides T^2 + 1 over F_5, so it is in the support
        assert_eq!(reversal_residual(&f5, &r5.parse("3-1").unwrap(), &a), Err(Error::PlaceInSupport));
        assert!(reversal_residual(&f5, &r5.parse("4-1").unwrap(), &a).unwrap() <= 1e-9);
        let f3 = setup(3);
        let r3 = PolyRing::new(&f3);
        let t = RationalFn::parse(&r3, "0-1").unwrap();
        assert!(reversal_residual(&f3, &r3.parse("1-1").unwrap(), &t).unwrap() <= 1e-9);
        assert!(reversal_residual(&f3, &Poly::x(), &t).is_err());
    }

    #[test]
    fn table_examples() {
        let f3 = setup(3);
        let r = PolyRing::new(&f3);
        let t = RationalFn::parse(&r, "0-1").unwrap();
        assert_eq!(angle_table(&f3, &t, 2, &[]).unwrap().rows.len(), 3);
        let lin = angle_table(&f3, &t, 1, &[]).unwrap();
        assert_eq!(lin.rows.len(), 2);
        assert!((lin.rows[0].kl - 2.0).abs() < 1e-12 && (lin.rows[1].kl + 1.0).abs() < 1e-12);
        let f5 = setup(5);
        let r5 = PolyRing::new(&f5);
        let t5 = RationalFn::parse(&r5, "0-1").unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let eight = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
        let a = one.install(|| angle_table(&f5, &t5, 4, &[]).unwrap());
        let b = eight.install(|| angle_table(&f5, &t5, 4, &[]).unwrap());
        assert_eq!(a.rows.len(), 150);
        assert_eq!(a, b);
        let tagged = a.with_tags(&[Poly::monomial(2)]).unwrap();
        assert!(tagged.tags.iter().all(|t| !t[0].constant_term().is_zero()));
    }

    /// Degree-2 Weyl sum for q = 5, a = T from the direct definition.
    #[test]
    fn weyl_degree_two_oracle() {
        let f5 = setup(5);
        let r = PolyRing::new(&f5);
        let t = RationalFn::parse(&r, "0-1").unwrap();
        let table = angle_table(&f5, &t, 2, &[]).unwrap();
        assert_eq!(table.rows.len(), 10);
        let direct: f64 = table
            .rows
            .iter()
            .map(|row| kloosterman_direct(&ExtFieldCtx::new(&f5, &row.place).unwrap(), &t).unwrap().0 / 5.0)
            .sum();
        let walk: f64 = table.rows.iter().map(|row| 2.0 * row.theta.cos()).sum();
        assert!((direct - walk).abs() < 1e-9);
    }

    #[test]
    fn infinity_examples() {
        let f3 = setup(3);
        let r = PolyRing::new(&f3);
        assert_eq!(infinity_angle(&f3, &RationalFn::parse(&r, "0-1").unwrap()).unwrap(), None);
        // (T + 1)/T is 1 at infinity: Kl(1) over F_3 is -1, as at the finite place T - 1 for a = T
        let (kl, _) = infinity_angle(&f3, &RationalFn::parse(&r, "1-1/0-1").unwrap()).unwrap().unwrap();
        assert!((kl + 1.0).abs() < 1e-12);
        assert_eq!(infinity_angle(&f3, &RationalFn::parse(&r, "2-2/1-0-1").unwrap()).unwrap(), None);
    }

    #[test]
    fn joint_rows_align() {
        let f5 = setup(5);
        let r = PolyRing::new(&f5);
        let ps = [RationalFn::parse(&r, "0-1").unwrap(), RationalFn::parse(&r, "1-1").unwrap()];
        let rows = joint_angles(&f5, &ps, 1, &[]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|(p, th)| p.constant_term().index() >= 2 && th.len() == 2));
    }
}
