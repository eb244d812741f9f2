//! Text formats: 17-significant-digit floats and the angle-table CSV.

use std::fmt::Write as _;

use kloodist_core::{AngleSample, AngleTable, FieldSpec, Poly, PolyRing, RationalFn};

use crate::error::CliError;

pub const ANGLE_MAGIC: &str = "# kloodist angle-table v1";

/// Same output as C's `%.17g`: enough digits to round-trip any double.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mant = strip_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{x:.*}", (16 - exp) as usize)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header and rows of an angle table. `extra` lines go after the identity line.
pub fn angle_table_csv(table: &AngleTable, extra: &[String]) -> String {
    let mut out = String::new();
    writeln!(out, "{ANGLE_MAGIC}").unwrap();
    writeln!(out, "# {} a={} d={}", table.field, table.a, table.d).unwrap();
    for line in extra {
        writeln!(out, "# {line}").unwrap();
    }
    out.push_str("place,deg,kl,theta");
    for g in &table.tag_moduli {
        write!(out, ",class@{g}").unwrap();
    }
    out.push('\n');
    for (i, row) in table.rows.iter().enumerate() {
        write!(out, "{},{},{},{}", row.place, row.degree, fmt_g17(row.kl), fmt_g17(row.theta)).unwrap();
        if let Some(tags) = table.tags.get(i) {
            for t in tags {
                write!(out, ",{t}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}

/// Parses an untagged table written by [`angle_table_csv`]; comment lines
/// after the identity line are ignored.
pub fn parse_angle_table(text: &str) -> Result<AngleTable, CliError> {
    let bad = |why: &str| CliError::CacheCorrupt(format!("angle table: {why}"));
    let mut lines = text.lines();
    if lines.next() != Some(ANGLE_MAGIC) {
        return Err(bad("missing magic line"));
    }
    let ident = lines.next().and_then(|l| l.strip_prefix("# ")).ok_or_else(|| bad("missing identity line"))?;
    let (field_part, rest) = ident.split_once(" a=").ok_or_else(|| bad("identity line"))?;
    let (a_part, d_part) = rest.rsplit_once(" d=").ok_or_else(|| bad("identity line"))?;
    let field: FieldSpec = field_part.parse().map_err(|_| bad("field"))?;
    let ring = PolyRing::new(&field);
    let a = RationalFn::parse(&ring, a_part).map_err(|_| bad("parameter"))?;
    let d: usize = d_part.parse().map_err(|_| bad("degree"))?;
    let mut lines = lines.skip_while(|l| l.starts_with('#'));
    if lines.next() != Some("place,deg,kl,theta") {
        return Err(bad("column line"));
    }
    let mut rows = Vec::new();
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(bad("row width"));
        }
        let place: Poly = ring.parse(cols[0]).map_err(|_| bad("place"))?;
        rows.push(AngleSample {
            place,
            degree: cols[1].parse().map_err(|_| bad("row degree"))?,
            kl: cols[2].parse().map_err(|_| bad("kl"))?,
            theta: cols[3].parse().map_err(|_| bad("theta"))?,
        });
    }
    Ok(AngleTable { field, a, d, rows, tag_moduli: Vec::new(), tags: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_printf() {
        let cases: [(f64, &str); 10] = [
            (0.0, "0"),
            (1.0, "1"),
            (-1.0000000000000002, "-1.0000000000000002"),
            (0.1, "0.10000000000000001"),
            (std::f64::consts::PI, "3.1415926535897931"),
            (1e-5, "1.0000000000000001e-05"),
            (123456789.0, "123456789"),
            (1e17, "1e+17"),
            (0.381966011250105, "0.38196601125010499"),
            (2.5e-300, "2.5e-300"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g17(x), want, "{x:e}");
        }
    }

    #[test]
    fn g17_round_trips() {
        let mut x = 1.234_567_890_123_456_7e-9;
        for _ in 0..200 {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
            x *= -3.7;
        }
    }
}
