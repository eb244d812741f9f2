//! The experiment subcommands. Each one reads angle tables through the cache,
//! builds a [`Report`] and writes it under the output directory.

use std::f64::consts::PI;
use std::path::PathBuf;

use kloodist_core::census::{chebotarev_report, class_counts, pnt_report, short_interval_census, units_mod};
use kloodist_core::equidist::{
    bound_ap_error, bound_class_weyl, bound_joint_error, bound_short_error, bound_sym_sum, box_discrepancy_grid,
    conductor_ap, interval_discrepancy, is_excluded_short, joint_weyl_sum, niederreiter_rhs, niederreiter_rhs_joint,
    star_discrepancy, weyl_sum, BoundParams, IntervalST, WeylReport,
};
use kloodist_core::kloosterman::{infinity_angle, joint_angles};
use kloodist_core::{support, AngleTable, PlaceFilter, PlaceRef, Poly, PolyRing, RationalFn, ResidueClass};

use crate::cache::{AngleCache, CacheStatus};
use crate::config::{Experiment, Format};
use crate::error::CliError;
use crate::format::angle_table_csv;
use crate::report::{count_row, weyl_cells, write_atomic, Cell, Report, Table, COUNT_COLUMNS, VERSION, WEYL_COLUMNS};

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub workers: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub out: PathBuf,
    pub format: Option<Format>,
}

/// What a command produced.
#[derive(Clone, Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
    pub cache: Vec<CacheStatus>,
}

pub struct Runner {
    exp: Experiment,
    pool: rayon::ThreadPool,
    cache: AngleCache,
    out: PathBuf,
    format: Format,
    config_json: String,
}

fn default_intervals() -> Vec<IntervalST> {
    let third = PI / 3.0;
    [(0.0, third), (third, 2.0 * third), (2.0 * third, PI)]
        .into_iter()
        .map(|(lo, hi)| IntervalST::new(lo, hi).expect("inside [0, pi]"))
        .collect()
}

fn b_of(exp: &Experiment, default: f64) -> f64 {
    exp.config.b_override.unwrap_or(default)
}

impl Runner {
    pub fn new(exp: Experiment, opts: RunOptions) -> Result<Runner, CliError> {
        let workers = opts
            .workers
            .or(exp.config.workers)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
        if workers == 0 {
            return Err(CliError::Config("workers must be >= 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        let format = opts.format.or(exp.config.format).unwrap_or_default();
        let config_json = exp.config.canonical_json();
        Ok(Runner { exp, pool, cache: AngleCache::new(opts.cache_dir), out: opts.out, format, config_json })
    }

    pub fn experiment(&self) -> &Experiment {
        &self.exp
    }

    fn intervals(&self) -> Vec<IntervalST> {
        if self.exp.intervals.is_empty() {
            default_intervals()
        } else {
            self.exp.intervals.clone()
        }
    }

    fn table(&self, a: &RationalFn, d: usize, out: &mut Outcome) -> Result<AngleTable, CliError> {
        let nz = self.exp.config.nonzero_constant;
        let (t, status) = self.pool.install(|| self.cache.angles(&self.exp.field, a, d, nz))?;
        out.cache.push(status);
        Ok(t)
    }

    fn finish(&self, report: Report, mut out: Outcome) -> Result<Outcome, CliError> {
        out.files.extend(report.write(&self.out, self.format, &self.config_json)?);
        out.failures.extend(report.failures());
        out.warnings.extend(report.warnings.iter().cloned());
        Ok(out)
    }

    /// One angle-table CSV per (a, d).
    pub fn angles(&self) -> Result<Outcome, CliError> {
        let mut out = Outcome::default();
        std::fs::create_dir_all(&self.out)?;
        let extra = [format!("version={VERSION}"), format!("config={}", self.config_json)];
        for (i, a) in self.exp.params.iter().enumerate() {
            for &d in &self.exp.config.degrees {
                let table = self.table(a, d, &mut out)?;
                let path = self.out.join(format!("angles_a{i}_d{d}.csv"));
                write_atomic(&path, angle_table_csv(&table, &extra).as_bytes())?;
                out.files.push(path);
            }
        }
        Ok(out)
    }

    /// Empirical distribution against Sato-Tate: discrepancies, interval
    /// frequencies and Weyl sums with their explicit bounds.
    pub fn dist(&self) -> Result<Outcome, CliError> {
        let mut out = Outcome::default();
        let mut report = Report::new("dist");
        let cfg = &self.exp.config;
        let field = &self.exp.field;
        let q = field.q();
        let mut summary =
            Table::new("summary", &["a", "d", "n", "star", "interval", "niederreiter", "error_scale", "ratio"]);
        let mut freq = Table::new("intervals", &["a", "d", "lo", "hi", "empirical", "measure", "deviation"]);
        let mut cols = vec!["a", "d"];
        cols.extend(WEYL_COLUMNS);
        let mut weyl = Table::new("weyl", &cols);
        for a in &self.exp.params {
            let supp = support(field, a)?;
            let mut bp = BoundParams::for_param(field, a, 1)?;
            bp.b = b_of(&self.exp, bp.b);
            for &d in &cfg.degrees {
                let mut thetas = self.table(a, d, &mut out)?.thetas();
                // infinity is a degree-1 place too
                if d == 1 && !supp.contains(&PlaceRef::Infinity) {
                    if let Some((_, th)) = infinity_angle(field, a)? {
                        thetas.push(th);
                    }
                }
                let label = a.to_string();
                if thetas.is_empty() {
                    report.warn(format!("a={label} d={d}: no places"));
                    continue;
                }
                let n = thetas.len();
                let mut sums = Vec::new();
                bp.m = d;
                for k in 1..=cfg.sym_max {
                    let s = weyl_sum(&thetas, k)?;
                    sums.push(s);
                    let r = WeylReport::new(vec![k], d, n, s, bound_sym_sum(&bp, &[k])?);
                    if !cfg.nonzero_constant {
                        report.check(
                            format!("weyl a={label} d={d} k={k}"),
                            r.within_bound(),
                            format!("ratio {}", r.ratio),
                        );
                    }
                    let mut row = vec![label.clone().into(), d.into()];
                    row.extend(weyl_cells(&r));
                    weyl.push(row);
                }
                let star = star_discrepancy(&thetas)?;
                let scale = cfg.error_scale_c * f64::from(q).powf(-(d as f64) / 4.0);
                summary.push(vec![
                    label.clone().into(),
                    d.into(),
                    n.into(),
                    star.into(),
                    interval_discrepancy(&thetas)?.into(),
                    niederreiter_rhs(&sums, n, cfg.niederreiter_c)?.into(),
                    scale.into(),
                    (star / scale).into(),
                ]);
                for iv in self.intervals() {
                    let e = iv.frequency(&thetas)?;
                    let m = iv.measure();
                    freq.push(vec![
                        label.clone().into(),
                        d.into(),
                        iv.lo.into(),
                        iv.hi.into(),
                        e.into(),
                        m.into(),
                        (e - m).abs().into(),
                    ]);
                }
            }
        }
        report.tables.extend([summary, freq, weyl]);
        self.finish(report, out)
    }

    /// Angles split by residue class mod each configured modulus.
    pub fn ap(&self) -> Result<Outcome, CliError> {
        if self.exp.moduli.is_empty() {
            return Err(CliError::Config("ap needs at least one modulus".into()));
        }
        let mut out = Outcome::default();
        let mut report = Report::new("ap");
        let cfg = &self.exp.config;
        let field = &self.exp.field;
        let ring = PolyRing::new(field);
        let q = field.q();
        let mut classes = Table::new(
            "classes",
            &["a", "modulus", "d", "class", "lo", "hi", "count", "empirical", "measure", "deviation"],
        );
        let mut scales = Table::new("scales", &["a", "modulus", "d", "max_deviation", "error_scale", "ratio"]);
        let mut cols = vec!["a", "modulus", "d", "class"];
        cols.extend(WEYL_COLUMNS);
        let mut weyl = Table::new("weyl", &cols);
        for a in &self.exp.params {
            let supp = support(field, a)?;
            let b_a = b_of(&self.exp, supp.b_default);
            for g in &self.exp.moduli {
                let units = units_mod(field, g)?;
                // T^r moduli carry the explicit error scales
                let r = g.degree().filter(|&k| *g == Poly::monomial(k));
                for &d in &cfg.degrees {
                    let table = self.table(a, d, &mut out)?;
                    let label = a.to_string();
                    let mut worst = 0.0f64;
                    for u in &units {
                        let cls = ResidueClass::new(&ring, u, g)?;
                        let thetas: Vec<f64> = table.restrict(&cls).iter().map(|s| s.theta).collect();
                        for iv in self.intervals() {
                            let m = iv.measure();
                            let (e, dev) = if thetas.is_empty() {
                                (Cell::Na, Cell::Na)
                            } else {
                                let e = iv.frequency(&thetas)?;
                                worst = worst.max((e - m).abs());
                                (e.into(), (e - m).abs().into())
                            };
                            classes.push(vec![
                                label.clone().into(),
                                g.to_string().into(),
                                d.into(),
                                u.to_string().into(),
                                iv.lo.into(),
                                iv.hi.into(),
                                thetas.len().into(),
                                e,
                                m.into(),
                                dev,
                            ]);
                        }
                        if let Some(r) = r {
                            let cond = conductor_ap(supp.n_a, b_a, r);
                            for k in 1..=cfg.sym_max {
                                let s = weyl_sum(&thetas, k).unwrap_or(0.0);
                                let rep =
                                    WeylReport::new(vec![k], d, thetas.len(), s, bound_class_weyl(q, d, k, 1, cond)?);
                                if !cfg.nonzero_constant {
                                    report.check(
                                        format!("class weyl a={label} g={g} c={u} d={d} k={k}"),
                                        rep.within_bound(),
                                        format!("ratio {}", rep.ratio),
                                    );
                                }
                                let mut row =
                                    vec![label.clone().into(), g.to_string().into(), d.into(), u.to_string().into()];
                                row.extend(weyl_cells(&rep));
                                weyl.push(row);
                            }
                        }
                    }
                    let scale = match r {
                        Some(r) => Some(cfg.error_scale_c * bound_ap_error(q, d, r, supp.n_a, b_a)?),
                        None => None,
                    };
                    scales.push(vec![
                        label.into(),
                        g.to_string().into(),
                        d.into(),
                        worst.into(),
                        scale.into(),
                        scale.map(|s| worst / s).into(),
                    ]);
                }
            }
        }
        report.tables.extend([classes, scales, weyl]);
        self.finish(report, out)
    }

    /// Angles of the places with nonzero constant term in each short interval.
    pub fn short(&self) -> Result<Outcome, CliError> {
        if self.exp.short_intervals.is_empty() {
            return Err(CliError::Config("short needs at least one short interval".into()));
        }
        for iv in &self.exp.short_intervals {
            if is_excluded_short(iv.degree(), iv.h()) {
                return Err(CliError::Config(format!(
                    "short interval {iv}: (d, h) = ({}, {}) is an excluded case",
                    iv.degree(),
                    iv.h()
                )));
            }
        }
        let mut out = Outcome::default();
        let mut report = Report::new("short");
        let cfg = &self.exp.config;
        let field = &self.exp.field;
        let ring = PolyRing::new(field);
        let q = field.q();
        let mut freq =
            Table::new("intervals", &["a", "interval", "lo", "hi", "count", "empirical", "measure", "deviation"]);
        let mut scales = Table::new("scales", &["a", "interval", "count", "max_deviation", "error_scale", "ratio"]);
        let mut census = Table::new("census", &["interval", "exact", "via_progressions", "main"]);
        for iv in &self.exp.short_intervals {
            let c = self.pool.install(|| short_interval_census(field, iv))?;
            report.check(
                format!("bijection {iv}"),
                c.bijection_holds,
                format!("{} direct, {} via progressions", c.report.exact, c.via_progressions),
            );
            census.push(vec![
                iv.to_string().into(),
                c.report.exact.into(),
                c.via_progressions.into(),
                c.report.main.into(),
            ]);
        }
        for a in &self.exp.params {
            let supp = support(field, a)?;
            let b_a = b_of(&self.exp, supp.b_default);
            let label = a.to_string();
            for iv in &self.exp.short_intervals {
                let (d, h) = (iv.degree(), iv.h());
                let (table, status) = self.pool.install(|| self.cache.angles(field, a, d, true))?;
                out.cache.push(status);
                let thetas: Vec<f64> =
                    table.rows.iter().filter(|s| iv.contains(&ring, &s.place)).map(|s| s.theta).collect();
                let mut worst = 0.0f64;
                for band in self.intervals() {
                    let m = band.measure();
                    let (e, dev) = if thetas.is_empty() {
                        (Cell::Na, Cell::Na)
                    } else {
                        let e = band.frequency(&thetas)?;
                        worst = worst.max((e - m).abs());
                        (e.into(), (e - m).abs().into())
                    };
                    freq.push(vec![
                        label.clone().into(),
                        iv.to_string().into(),
                        band.lo.into(),
                        band.hi.into(),
                        thetas.len().into(),
                        e,
                        m.into(),
                        dev,
                    ]);
                }
                let scale = cfg.error_scale_c * bound_short_error(q, d, h, supp.n_a, b_a)?;
                scales.push(vec![
                    label.clone().into(),
                    iv.to_string().into(),
                    thetas.len().into(),
                    worst.into(),
                    scale.into(),
                    (worst / scale).into(),
                ]);
            }
        }
        report.tables.extend([freq, scales, census]);
        self.finish(report, out)
    }

    /// Joint angles of several parameters at their common places.
    pub fn joint(&self) -> Result<Outcome, CliError> {
        let params = &self.exp.params;
        if params.len() < 2 {
            return Err(CliError::Config("joint needs at least two parameters".into()));
        }
        let out = Outcome::default();
        let mut report = Report::new("joint");
        let cfg = &self.exp.config;
        let field = &self.exp.field;
        let q = field.q();
        let n = params.len();

        let supports = params.iter().map(|a| support(field, a)).collect::<Result<Vec<_>, _>>()?;
        let mut hyp = Table::new("hypothesis", &["i", "j", "satisfied"]);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let ok = supports[i].zeros().any(|z| !supports[j].zeros().any(|w| w == z));
                if !ok {
                    report.warn(format!(
                        "hypothesis unmet: a_{i} = {} has no zero that is not a zero of a_{j} = {}",
                        params[i], params[j]
                    ));
                }
                hyp.push(vec![i.into(), j.into(), ok.into()]);
            }
        }

        let mut bp = BoundParams::for_params(field, params, 1)?;
        bp.b = b_of(&self.exp, bp.b);
        let conductor = bp.n as f64 * (bp.b + 1.0);
        let filters = if cfg.nonzero_constant { vec![PlaceFilter::NonzeroConstant] } else { Vec::new() };
        let mut summary = Table::new("summary", &["d", "n", "box_discrepancy", "niederreiter", "error_scale", "ratio"]);
        let mut boxes = Table::new("boxes", &["d", "box", "empirical", "measure", "deviation"]);
        let mut cols = vec!["d"];
        cols.extend(WEYL_COLUMNS);
        let mut weyl = Table::new("weyl", &cols);
        let jmax = cfg.joint_sym_max;
        for &d in &cfg.degrees {
            let rows = self.pool.install(|| joint_angles(field, params, d, &filters))?;
            let points: Vec<Vec<f64>> = rows.into_iter().map(|r| r.1).collect();
            if points.is_empty() {
                report.warn(format!("d={d}: no common places"));
                continue;
            }
            bp.m = d;
            let mut sums = Vec::new();
            for code in 1..(jmax as usize + 1).pow(n as u32) {
                let ks: Vec<u32> =
                    (0..n).map(|i| ((code / (jmax as usize + 1).pow(i as u32)) % (jmax as usize + 1)) as u32).collect();
                let s = joint_weyl_sum(&points, &ks)?;
                let r = WeylReport::new(ks.clone(), d, points.len(), s, bound_sym_sum(&bp, &ks)?);
                if !cfg.nonzero_constant {
                    report.check(
                        format!("joint weyl d={d} k={}", crate::report::fmt_k(&ks)),
                        r.within_bound(),
                        format!("ratio {}", r.ratio),
                    );
                }
                let mut row = vec![d.into()];
                row.extend(weyl_cells(&r));
                weyl.push(row);
                sums.push((ks, s));
            }
            let disc = box_discrepancy_grid(&points, cfg.grid_resolution)?;
            let scale = cfg.error_scale_c * bound_joint_error(q, d, n, conductor)?;
            summary.push(vec![
                d.into(),
                points.len().into(),
                disc.into(),
                niederreiter_rhs_joint(&sums, points.len(), jmax, cfg.niederreiter_c)?.into(),
                scale.into(),
                (disc / scale).into(),
            ]);
            for (bi, b) in self.exp.boxes.iter().enumerate() {
                let e = points.iter().filter(|p| b.contains(p)).count() as f64 / points.len() as f64;
                let m = b.measure();
                boxes.push(vec![d.into(), bi.into(), e.into(), m.into(), (e - m).abs().into()]);
            }
        }
        report.tables.extend([hyp, summary, boxes, weyl]);
        self.finish(report, out)
    }

    /// Exact place counts: prime polynomial theorem, progressions and short intervals.
    pub fn census(&self) -> Result<Outcome, CliError> {
        let mut report = Report::new("census");
        let cfg = &self.exp.config;
        let field = &self.exp.field;
        let mut counts = Table::new("counts", &COUNT_COLUMNS);
        for &m in &cfg.degrees {
            let r = pnt_report(field.q(), m)?;
            report.check(
                r.label.clone(),
                r.pass == Some(true),
                format!("deviation {} bound {:?}", r.deviation, r.bound),
            );
            counts.push(count_row(&r));
        }
        let mut classes = Table::new("classes", &COUNT_COLUMNS);
        for g in &self.exp.moduli {
            let r = g.degree().filter(|&k| *g == Poly::monomial(k));
            for &d in &cfg.degrees {
                match r {
                    Some(r) => {
                        for rep in self.pool.install(|| chebotarev_report(field, d, r, cfg.disc_degree))? {
                            if let Some(p) = rep.pass {
                                report.check(rep.label.clone(), p, format!("deviation {}", rep.deviation));
                            }
                            classes.push(count_row(&rep));
                        }
                    }
                    None => {
                        let t = self.pool.install(|| class_counts(field, d, g))?;
                        for (c, k) in &t.entries {
                            let rep = kloodist_core::census::CountReport::new(
                                format!("class {c} mod {g} d={d}"),
                                u128::from(*k),
                                t.main,
                                field.q(),
                                d,
                                None,
                            );
                            classes.push(count_row(&rep));
                        }
                    }
                }
            }
        }
        let mut shorts = Table::new(
            "short",
            &["interval", "exact", "main", "deviation", "bound", "via_progressions", "bijection", "excluded"],
        );
        for iv in &self.exp.short_intervals {
            let c = self.pool.install(|| short_interval_census(field, iv))?;
            report.check(
                format!("bijection {iv}"),
                c.bijection_holds,
                format!("{} vs {}", c.report.exact, c.via_progressions),
            );
            if c.excluded {
                report.warn(format!("{iv}: excluded (d, h) pair, no lower bound available"));
            }
            shorts.push(vec![
                iv.to_string().into(),
                c.report.exact.into(),
                c.report.main.into(),
                c.report.deviation.into(),
                c.report.bound.into(),
                c.via_progressions.into(),
                c.bijection_holds.into(),
                c.excluded.into(),
            ]);
        }
        report.tables.extend([counts, classes, shorts]);
        self.finish(report, Outcome::default())
    }
}
