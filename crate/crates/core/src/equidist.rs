//! Sato-Tate measure, symmetric-power characters, Weyl sums, discrepancies and
//! the explicit bound formulas the experiments compare against.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::galois::FieldSpec;
use crate::rational::{support, PlaceRef, RationalFn};

const DOMAIN_SLACK: f64 = 1e-12;

fn check_angle(x: f64) -> Result<f64> {
    if !(-DOMAIN_SLACK..=PI + DOMAIN_SLACK).contains(&x) {
        return Err(Error::OutOfDomain(x));
    }
    Ok(x.clamp(0.0, PI))
}

/// mu_ST([0, x]) = x/pi - sin(2x)/(2 pi).
pub fn st_cdf(x: f64) -> Result<f64> {
    let x = check_angle(x)?;
    Ok(x / PI - (2.0 * x).sin() / (2.0 * PI))
}

/// Inverse of [`st_cdf`] by bisection, accurate to a few ulps.
pub fn st_quantile(u: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParams(format!("quantile level {u} outside [0, 1]")));
    }
    let (mut lo, mut hi) = (0.0f64, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if st_cdf(mid)? < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntervalST {
    pub lo: f64,
    pub hi: f64,
}

impl IntervalST {
    pub fn new(lo: f64, hi: f64) -> Result<IntervalST> {
        let (lo, hi) = (check_angle(lo)?, check_angle(hi)?);
        if lo > hi {
            return Err(Error::InvalidParams(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(IntervalST { lo, hi })
    }

    pub fn full() -> IntervalST {
        IntervalST { lo: 0.0, hi: PI }
    }

    pub fn measure(&self) -> f64 {
        st_cdf(self.hi).expect("validated") - st_cdf(self.lo).expect("validated")
    }

    pub fn contains(&self, theta: f64) -> bool {
        (self.lo..=self.hi).contains(&theta)
    }

    /// Fraction of the sample inside the closed interval.
    pub fn frequency(&self, thetas: &[f64]) -> Result<f64> {
        if thetas.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(thetas.iter().filter(|&&t| self.contains(t)).count() as f64 / thetas.len() as f64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxST {
    pub sides: Vec<IntervalST>,
}

impl BoxST {
    pub fn measure(&self) -> f64 {
        self.sides.iter().map(IntervalST::measure).product()
    }

    pub fn contains(&self, point: &[f64]) -> bool {
        self.sides.len() == point.len() && self.sides.iter().zip(point).all(|(s, &t)| s.contains(t))
    }
}

/// Sym^k(theta) = sin((k+1) theta) / sin(theta), with the recurrence
/// S_{j+1} = 2 cos(theta) S_j - S_{j-1} near the endpoints.
pub fn sym_k(theta: f64, k: u32) -> Result<f64> {
    let theta = check_angle(theta)?;
    if theta > PI / 2.0 {
        // Sym^k(pi - t) = (-1)^k Sym^k(t); pi - theta is exact here and keeps (k+1) theta small
        let v = sym_small(PI - theta, k);
        return Ok(if k % 2 == 0 { v } else { -v });
    }
    Ok(sym_small(theta, k))
}

fn sym_small(theta: f64, k: u32) -> f64 {
    let s = theta.sin();
    if s.abs() >= 1e-4 {
        return ((f64::from(k) + 1.0) * theta).sin() / s;
    }
    let c2 = 2.0 * theta.cos();
    let (mut prev, mut cur) = (0.0, 1.0);
    for _ in 0..k {
        let next = c2 * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Compensated running sum; the order of `add` calls fixes the result.
#[derive(Clone, Copy, Debug, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// sum_i Sym^k(theta_i), in sample order.
pub fn weyl_sum(thetas: &[f64], k: u32) -> Result<f64> {
    if thetas.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut acc = NeumaierSum::default();
    for &t in thetas {
        acc.add(sym_k(t, k)?);
    }
    Ok(acc.value())
}

/// sum_i prod_j Sym^{k_j}(theta_{i,j}).
pub fn joint_weyl_sum(points: &[Vec<f64>], ks: &[u32]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut acc = NeumaierSum::default();
    for pt in points {
        if pt.len() != ks.len() {
            return Err(Error::InvalidParams(format!("point of dimension {} for {} exponents", pt.len(), ks.len())));
        }
        let mut prod = 1.0;
        for (&t, &k) in pt.iter().zip(ks) {
            prod *= sym_k(t, k)?;
        }
        acc.add(prod);
    }
    Ok(acc.value())
}

fn sorted_cdf(thetas: &[f64]) -> Result<Vec<f64>> {
    if thetas.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut u = thetas.iter().map(|&t| st_cdf(t)).collect::<Result<Vec<_>>>()?;
    u.sort_by(f64::total_cmp);
    Ok(u)
}

/// D* = sup over anchored intervals [0, x] of |empirical - mu_ST|.
pub fn star_discrepancy(thetas: &[f64]) -> Result<f64> {
    let u = sorted_cdf(thetas)?;
    let n = u.len() as f64;
    Ok(u.iter()
        .enumerate()
        .map(|(i, &ui)| {
            let i = i as f64;
            ((i + 1.0) / n - ui).abs().max((ui - i / n).abs())
        })
        .fold(0.0, f64::max))
}

/// D = sup over all subintervals of |empirical - mu_ST|, as D+ + D-.
pub fn interval_discrepancy(thetas: &[f64]) -> Result<f64> {
    let u = sorted_cdf(thetas)?;
    let n = u.len() as f64;
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for (i, &ui) in u.iter().enumerate() {
        let c = (i as f64 + 1.0) / n - ui;
        hi = hi.max(c);
        lo = lo.min(c);
    }
    Ok(hi.max(0.0) + (1.0 / n - lo).max(0.0))
}

/// O(n^2) reference for [`interval_discrepancy`]: every open and closed interval
/// whose endpoints are sample points, 0 or 1, evaluated in CDF space.
pub fn interval_discrepancy_brute(thetas: &[f64]) -> Result<f64> {
    let u = sorted_cdf(thetas)?;
    let n = u.len() as f64;
    let mut ends = vec![0.0];
    ends.extend_from_slice(&u);
    ends.push(1.0);
    let mut best = 0.0f64;
    for (i, &x) in ends.iter().enumerate() {
        for &y in &ends[i..] {
            let closed = u.iter().filter(|&&v| x <= v && v <= y).count() as f64;
            let open = u.iter().filter(|&&v| x < v && v < y).count() as f64;
            best = best.max((closed / n - (y - x)).abs()).max((open / n - (y - x)).abs());
        }
    }
    Ok(best)
}

/// Largest |empirical - product measure| over boxes with corners on the grid
/// j / resolution in CDF coordinates. Boxes are half-open, the last cell closed.
/// This is a lower bound for the sup over all boxes.
pub fn box_discrepancy_grid(points: &[Vec<f64>], resolution: usize) -> Result<f64> {
    if resolution < 2 {
        return Err(Error::InvalidParams("grid resolution must be at least 2".into()));
    }
    let first = points.first().ok_or(Error::EmptySample)?;
    let dim = first.len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::InvalidParams("points must share a positive dimension".into()));
    }
    let r = resolution;
    let side = r + 1;
    let size = side.pow(dim as u32);
    // prefix[idx] counts points in cells strictly below the corner idx, per axis
    let mut prefix = vec![0u64; size];
    for pt in points {
        let mut idx = 0;
        for &t in pt.iter().rev() {
            let cell = ((st_cdf(t)? * r as f64).floor() as usize).min(r - 1);
            idx = idx * side + cell + 1;
        }
        prefix[idx] += 1;
    }
    let mut stride = 1;
    for _ in 0..dim {
        for idx in 0..size {
            if (idx / stride) % side != 0 {
                prefix[idx] += prefix[idx - stride];
            }
        }
        stride *= side;
    }
    let n = points.len() as f64;
    let pairs: Vec<(usize, usize)> = (0..=r).flat_map(|lo| (lo + 1..=r).map(move |hi| (lo, hi))).collect();
    let mut choice = vec![0usize; dim];
    let mut best = 0.0f64;
    loop {
        let mut count: i64 = 0;
        for corner in 0..(1usize << dim) {
            let mut idx = 0;
            let mut sign = 1;
            for axis in (0..dim).rev() {
                let (lo, hi) = pairs[choice[axis]];
                let take_lo = corner >> axis & 1 == 1;
                if take_lo {
                    sign = -sign;
                }
                idx = idx * side + if take_lo { lo } else { hi };
            }
            count += sign * prefix[idx] as i64;
        }
        let vol: f64 = choice.iter().map(|&c| (pairs[c].1 - pairs[c].0) as f64 / r as f64).product();
        best = best.max((count as f64 / n - vol).abs());
        let mut axis = 0;
        while axis < dim {
            choice[axis] += 1;
            if choice[axis] < pairs.len() {
                break;
            }
            choice[axis] = 0;
            axis += 1;
        }
        if axis == dim {
            return Ok(best);
        }
    }
}

/// C [ (1/n) sum_{k=1}^{L} |W_k| / k + 1/L ] with weyl[k-1] = W_k.
pub fn niederreiter_rhs(weyl: &[f64], n: usize, c: f64) -> Result<f64> {
    if weyl.is_empty() || n == 0 || c <= 0.0 {
        return Err(Error::InvalidParams("need L >= 1, n >= 1 and C > 0".into()));
    }
    let l = weyl.len() as f64;
    let s: f64 = weyl.iter().enumerate().map(|(i, w)| w.abs() / (i as f64 + 1.0)).sum();
    Ok(c * (s / n as f64 + 1.0 / l))
}

/// Lattice form: C [ (1/n) sum_{0 != k in [0,L]^dim} |W_k| / prod(k_i + 1) + 1/L ].
pub fn niederreiter_rhs_joint(weyl: &[(Vec<u32>, f64)], n: usize, l: u32, c: f64) -> Result<f64> {
    if l == 0 || n == 0 || c <= 0.0 {
        return Err(Error::InvalidParams("need L >= 1, n >= 1 and C > 0".into()));
    }
    let s: f64 = weyl
        .iter()
        .filter(|(k, _)| k.iter().any(|&x| x > 0) && k.iter().all(|&x| x <= l))
        .map(|(k, w)| w.abs() / k.iter().map(|&x| f64::from(x) + 1.0).product::<f64>())
        .sum();
    Ok(c * (s / n as f64 + 1.0 / f64::from(l)))
}

/// Inputs to the explicit trace-sum bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundParams {
    pub genus: u32,
    /// Degree-weighted count of bad places.
    pub n: u64,
    /// Largest break.
    pub b: f64,
    pub q: u32,
    pub m: usize,
    /// Artin conductor total; replaces the N(B+1) dim surrogate when set.
    pub conductor: Option<f64>,
}

impl BoundParams {
    pub fn for_param(field: &FieldSpec, a: &RationalFn, m: usize) -> Result<BoundParams> {
        let s = support(field, a)?;
        Ok(BoundParams { genus: 0, n: s.n_a, b: s.b_default, q: field.q(), m, conductor: None })
    }

    /// N over the union of supports, B the largest default break.
    pub fn for_params(field: &FieldSpec, params: &[RationalFn], m: usize) -> Result<BoundParams> {
        let mut places: Vec<PlaceRef> = Vec::new();
        let mut b = 0.0f64;
        for a in params {
            let s = support(field, a)?;
            b = b.max(s.b_default);
            for e in s.entries {
                if !places.contains(&e.place) {
                    places.push(e.place);
                }
            }
        }
        let n = places.iter().map(|p| p.degree() as u64).sum();
        Ok(BoundParams { genus: 0, n, b, q: field.q(), m, conductor: None })
    }
}

/// (6g + 1 + N(B + 3)) prod(k_i + 1) q^(m/2) / m.
pub fn bound_sym_sum(params: &BoundParams, ks: &[u32]) -> Result<f64> {
    if params.m == 0 || params.b < 0.0 || params.q < 2 {
        return Err(Error::InvalidParams("need m >= 1, B >= 0, q >= 2".into()));
    }
    let dim: f64 = ks.iter().map(|&k| f64::from(k) + 1.0).product();
    let n = params.n as f64;
    let lead = match params.conductor {
        None => (6.0 * f64::from(params.genus) + 1.0 + n * (params.b + 3.0)) * dim,
        Some(a) => (6.0 * f64::from(params.genus) + 1.0 + 2.0 * n) * dim + a,
    };
    let m = params.m as f64;
    Ok(lead * f64::from(params.q).powf(m / 2.0) / m)
}

/// Conductor-type quantity for the Carlitz field of T^r: (N_a + 2)(max(B_a, r) + 1).
pub fn conductor_ap(n_a: u64, b_a: f64, r: usize) -> f64 {
    (n_a as f64 + 2.0) * (b_a.max(r as f64) + 1.0)
}

/// 6(k+1)|C| N q^(d/2) / d: bound on a Weyl sum restricted to |C| classes.
pub fn bound_class_weyl(q: u32, d: usize, k: u32, classes: usize, conductor: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidDegree(0));
    }
    Ok(6.0 * (f64::from(k) + 1.0) * classes as f64 * conductor * f64::from(q).powf(d as f64 / 2.0) / d as f64)
}

/// Error scale q^(r/2 - d/4) sqrt(N_a (B_a + r)) for progressions mod T^r.
pub fn bound_ap_error(q: u32, d: usize, r: usize, n_a: u64, b_a: f64) -> Result<f64> {
    if d == 0 || r == 0 {
        return Err(Error::InvalidParams("need d >= 1 and r >= 1".into()));
    }
    let expo = r as f64 / 2.0 - d as f64 / 4.0;
    Ok(f64::from(q).powf(expo) * (n_a as f64 * (b_a + r as f64)).sqrt())
}

/// The (d, h) pairs where the short-interval lower bound is unavailable.
pub const EXCLUDED_SHORT: [(usize, usize); 4] = [(2, 1), (3, 1), (4, 2), (5, 2)];

pub fn is_excluded_short(d: usize, h: usize) -> bool {
    EXCLUDED_SHORT.contains(&(d, h))
}

/// Error scale q^((d - 2h - 2)/4) sqrt(N_a (B_a + d - h)) for short intervals.
pub fn bound_short_error(q: u32, d: usize, h: usize, n_a: u64, b_a: f64) -> Result<f64> {
    if h >= d {
        return Err(Error::InvalidParams(format!("need h < d, got h = {h}, d = {d}")));
    }
    if is_excluded_short(d, h) {
        return Err(Error::ExcludedCase { d, h });
    }
    let expo = (d as f64 - 2.0 * h as f64 - 2.0) / 4.0;
    Ok(f64::from(q).powf(expo) * (n_a as f64 * (b_a + (d - h) as f64)).sqrt())
}

/// Error scale q^(-d/(2(n+1))) N^(1/(n+1)) for n-dimensional boxes.
pub fn bound_joint_error(q: u32, d: usize, n: usize, conductor: f64) -> Result<f64> {
    if d == 0 || n == 0 || conductor <= 0.0 {
        return Err(Error::InvalidParams("need d >= 1, n >= 1, conductor > 0".into()));
    }
    let e = 1.0 / (n as f64 + 1.0);
    Ok(f64::from(q).powf(-(d as f64) * e / 2.0) * conductor.powf(e))
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeylReport {
    pub k: Vec<u32>,
    pub m: usize,
    pub count: usize,
    pub value: f64,
    pub bound: f64,
    pub ratio: f64,
}

impl WeylReport {
    pub fn new(k: Vec<u32>, m: usize, count: usize, value: f64, bound: f64) -> WeylReport {
        WeylReport { k, m, count, value, bound, ratio: value.abs() / bound }
    }

    pub fn within_bound(&self) -> bool {
        self.value.abs() <= self.bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn st_cdf_examples() {
        assert_eq!(st_cdf(0.0).unwrap(), 0.0);
        assert!((st_cdf(PI / 2.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((st_cdf(PI / 4.0).unwrap() - (0.25 - 1.0 / (2.0 * PI))).abs() < 1e-15);
        assert!((st_cdf(PI).unwrap() - 1.0).abs() < 1e-15);
        assert!(st_cdf(-0.1).is_err() && st_cdf(4.0).is_err());
    }

    #[test]
    fn sym_examples() {
        assert_eq!(sym_k(1.3, 0).unwrap(), 1.0);
        assert!((sym_k(0.7, 1).unwrap() - 2.0 * 0.7f64.cos()).abs() < 1e-14);
        assert!(sym_k(PI / 2.0, 1).unwrap().abs() < 1e-15);
        assert!((sym_k(PI / 2.0, 2).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(sym_k(0.0, 7).unwrap(), 8.0);
        assert!((sym_k(PI, 7).unwrap() + 8.0).abs() < 1e-9);
        assert!((sym_k(PI, 6).unwrap() - 7.0).abs() < 1e-9);
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_sum(&[0.1, 0.2, 3.0], 0).unwrap(), 3.0);
        assert!(weyl_sum(&[PI / 2.0], 1).unwrap().abs() < 1e-15);
        assert_eq!(weyl_sum(&[], 1), Err(Error::EmptySample));
        let pts = vec![vec![0.0, PI / 2.0], vec![0.0, 0.0]];
        assert!((joint_weyl_sum(&pts, &[1, 2]).unwrap() - (2.0 * -1.0 + 2.0 * 3.0)).abs() < 1e-12);
    }

    #[test]
    fn discrepancy_examples() {
        let half = st_quantile(0.5).unwrap();
        assert!((star_discrepancy(&[half]).unwrap() - 0.5).abs() < 1e-12);
        let n = 40;
        let qs: Vec<f64> = (1..=n).map(|i| st_quantile((i as f64 - 0.5) / n as f64).unwrap()).collect();
        assert!((star_discrepancy(&qs).unwrap() - 0.5 / n as f64).abs() < 1e-12);
        assert!((interval_discrepancy(&qs).unwrap() - 1.0 / n as f64).abs() < 1e-12);
        assert_eq!(star_discrepancy(&[]), Err(Error::EmptySample));
    }

    #[test]
    fn interval_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.gen_range(1..=60);
            let mut th: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=PI)).collect();
            // ties and endpoints
            if n > 3 {
                th[1] = th[0];
                th[2] = 0.0;
                th[3] = PI;
            }
            let fast = interval_discrepancy(&th).unwrap();
            let slow = interval_discrepancy_brute(&th).unwrap();
            assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
        }
    }

    #[test]
    fn box_grid_examples() {
        let r = 8;
        let pts: Vec<Vec<f64>> = (0..r)
            .flat_map(|i| (0..r).map(move |j| (i, j)))
            .map(|(i, j)| {
                let u = |k: usize| st_quantile((k as f64 + 0.5) / r as f64).unwrap();
                vec![u(i), u(j)]
            })
            .collect();
        assert!(box_discrepancy_grid(&pts, r).unwrap() < 1e-12);
        let line: Vec<Vec<f64>> = [0.3, 1.1, 2.0, 2.9].iter().map(|&t| vec![t]).collect();
        let flat: Vec<f64> = line.iter().map(|p| p[0]).collect();
        assert!(box_discrepancy_grid(&line, 10).unwrap() <= interval_discrepancy(&flat).unwrap() + 1e-12);
        // one point at the origin corner, resolution 2: the box [0,1/2)^2 has excess 3/4
        assert!((box_discrepancy_grid(&[vec![0.0, 0.0]], 2).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn bound_examples() {
        let p = BoundParams { genus: 0, n: 2, b: 0.5, q: 5, m: 6, conductor: None };
        assert!((bound_sym_sum(&p, &[1]).unwrap() - 8.0 * 2.0 * 125.0 / 6.0).abs() < 1e-9);
        let p = BoundParams { genus: 0, n: 1, b: 0.0, q: 3, m: 4, conductor: None };
        assert!((bound_sym_sum(&p, &[0]).unwrap() - 4.0 * 9.0 / 4.0).abs() < 1e-12);
        let p = BoundParams { genus: 0, n: 3, b: 0.5, q: 5, m: 2, conductor: None };
        assert!((bound_sym_sum(&p, &[1, 1]).unwrap() - 11.5 * 4.0 * 5.0 / 2.0).abs() < 1e-9);
        for d in (2..9).filter(|&d| !is_excluded_short(d, d - 1)) {
            let a = bound_short_error(3, d, d - 1, 1, 0.0).unwrap();
            assert!((a - 3f64.powf(-(d as f64) / 4.0)).abs() < 1e-15);
            let j = bound_joint_error(3, d, 1, 1.0).unwrap();
            assert!((j - 3f64.powf(-(d as f64) / 4.0)).abs() < 1e-15);
        }
        assert_eq!(bound_short_error(3, 4, 2, 2, 0.5), Err(Error::ExcludedCase { d: 4, h: 2 }));
        assert_eq!(conductor_ap(2, 0.5, 2), 12.0);
        assert!(niederreiter_rhs(&[0.0; 4], 10, 1.5).unwrap() == 1.5 / 4.0);
        assert_eq!(niederreiter_rhs(&[7.0], 7, 1.0).unwrap(), 2.0);
    }

    #[test]
    fn joint_params_for_t_and_t_plus_one() {
        let f = FieldSpec::new(5, 1, None).unwrap();
        let r = crate::poly::PolyRing::new(&f);
        let ps = [RationalFn::parse(&r, "0-1").unwrap(), RationalFn::parse(&r, "1-1").unwrap()];
        let bp = BoundParams::for_params(&f, &ps, 3).unwrap();
        assert_eq!((bp.n, bp.b), (3, 0.5));
        let single = BoundParams::for_param(&f, &ps[0], 3).unwrap();
        assert_eq!((single.n, single.b), (2, 0.5));
    }

    proptest! {
        #[test]
        fn sym_bounded(theta in 0.0..=PI, k in 0u32..60) {
            let v = sym_k(theta, k).unwrap();
            prop_assert!(v.abs() <= f64::from(k) + 1.0 + 1e-9);
        }

        #[test]
        fn cdf_symmetric_and_monotone(x in 0.0..=PI, y in 0.0..=PI) {
            prop_assert!((st_cdf(PI - x).unwrap() - (1.0 - st_cdf(x).unwrap())).abs() <= 1e-12);
            if x < y {
                prop_assert!(st_cdf(x).unwrap() <= st_cdf(y).unwrap());
            }
        }

        #[test]
        fn discrepancy_ordering(th in proptest::collection::vec(0.0..=PI, 1..80)) {
            let s = star_discrepancy(&th).unwrap();
            let i = interval_discrepancy(&th).unwrap();
            prop_assert!(0.0 <= s && s <= i + 1e-15);
        }

        #[test]
        fn quantile_inverts_cdf(u in 0.0..=1.0f64) {
            prop_assert!((st_cdf(st_quantile(u).unwrap()).unwrap() - u).abs() < 1e-12);
        }
    }
}
