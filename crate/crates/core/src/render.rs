//! Rational rendering of numerical results.

use num_traits::ToPrimitive;

use crate::error::{QglError, Result};
use crate::{CMat, Q64, C64};

/// Largest denominator tried when snapping to a fraction.
pub const MAX_DENOMINATOR: i64 = 16;

/// The fraction with denominator at most `max_den` nearest to `x`, if it lies
/// within `within`.
pub fn snap_rational(x: f64, max_den: i64, within: f64) -> Option<Q64> {
    if !x.is_finite() {
        return None;
    }
    let mut best: Option<(f64, Q64)> = None;
    for den in 1..=max_den {
        let num = (x * den as f64).round();
        if num.abs() > i64::MAX as f64 / 2.0 {
            return None;
        }
        let q = Q64::new(num as i64, den);
        let err = (q.to_f64().unwrap_or(f64::NAN) - x).abs();
        if err <= within && best.is_none_or(|(e, _)| err < e - 1e-15) {
            best = Some((err, q));
        }
    }
    best.map(|(_, q)| q)
}

pub fn format_rational(q: Q64) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `x` as a fraction when it is one to within `tol`, else as a decimal.
pub fn format_real(x: f64, tol: f64) -> String {
    match snap_rational(x, MAX_DENOMINATOR, tol) {
        Some(q) => format_rational(q),
        None => format!("{x:.10}"),
    }
}

pub fn format_complex(z: C64, tol: f64) -> String {
    if z.im.abs() <= tol {
        return format_real(z.re, tol);
    }
    let im = format_real(z.im.abs(), tol);
    let sign = if z.im < 0.0 { "-" } else { "+" };
    if z.re.abs() <= tol {
        format!("{}{}i", if z.im < 0.0 { "-" } else { "" }, im)
    } else {
        format!("{}{}{}i", format_real(z.re, tol), sign, im)
    }
}

/// A table row over one common denominator, as the regularity tables
/// print it (`6/8` next to `3/8` rather than `3/4`). Falls back to
/// [`format_real`] entrywise when some value is not a small fraction.
pub fn format_row(values: &[f64], tol: f64) -> Vec<String> {
    let snapped: Option<Vec<Q64>> = values.iter().map(|&x| snap_rational(x, MAX_DENOMINATOR, tol)).collect();
    let Some(qs) = snapped else {
        return values.iter().map(|&x| format_real(x, tol)).collect();
    };
    let lcm = qs.iter().fold(1i64, |acc, q| num_integer_lcm(acc, *q.denom()));
    if lcm > MAX_DENOMINATOR {
        return qs.into_iter().map(format_rational).collect();
    }
    qs.into_iter()
        .map(|q| {
            if *q.denom() == 1 {
                q.numer().to_string()
            } else {
                format!("{}/{lcm}", q.numer() * (lcm / q.denom()))
            }
        })
        .collect()
}

fn num_integer_lcm(a: i64, b: i64) -> i64 {
    let (mut x, mut y) = (a, b);
    while y != 0 {
        (x, y) = (y, x % y);
    }
    a / x * b
}

/// Matrix as rows of `[re, im]` pairs.
pub fn matrix_to_json(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Inverse of [`matrix_to_json`]; plain numbers are accepted as real entries.
pub fn matrix_from_json(v: &serde_json::Value) -> Result<CMat> {
    let bad = || QglError::Validation("matrix must be a list of rows of numbers or [re, im] pairs".into());
    let rows = v.as_array().ok_or_else(bad)?;
    let parsed = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|x| match (x.as_f64(), x.as_array()) {
                    (Some(re), _) => Ok(C64::new(re, 0.0)),
                    (None, Some(p)) if p.len() == 2 => Ok(C64::new(
                        p[0].as_f64().ok_or_else(bad)?,
                        p[1].as_f64().ok_or_else(bad)?,
                    )),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    CMat::from_rows(&parsed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping() {
        assert_eq!(snap_rational(0.75, 16, 1e-9), Some(Q64::new(3, 4)));
        assert_eq!(snap_rational(-14.0 / 8.0, 16, 1e-9), Some(Q64::new(-7, 4)));
        assert_eq!(snap_rational(std::f64::consts::PI, 16, 1e-6), None);
        assert_eq!(format_real(3.75, 1e-9), "15/4");
        assert_eq!(format_real(-3.0, 1e-9), "-3");
        assert_eq!(format_complex(C64::new(1.0, -0.5), 1e-9), "1-1/2i");
    }

    #[test]
    fn rows_share_a_denominator() {
        let g4 = [3.0, 0.75, 0.75, 0.375, -0.375, 0.375, -0.375];
        assert_eq!(format_row(&g4, 1e-9).join(" "), "3 6/8 6/8 3/8 -3/8 3/8 -3/8");
        assert_eq!(format_row(&[5.0, 1.75, 3.75, -0.375], 1e-9).join(" "), "5 14/8 30/8 -3/8");
        assert_eq!(format_row(&[4.0, 1.0, 2.0], 1e-9).join(" "), "4 1 2");
        assert_eq!(format_row(&[1.0 / 3.0, 0.25, 0.2], 1e-9), ["1/3", "1/4", "1/5"]);
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = CMat::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64 - 0.5));
        let v = serde_json::to_value(matrix_to_json(&m)).unwrap();
        assert_eq!(matrix_from_json(&v).unwrap(), m);
        let real = serde_json::json!([[1, 0], [0, 2.5]]);
        assert_eq!(matrix_from_json(&real).unwrap()[(1, 1)], C64::new(2.5, 0.0));
        assert!(matrix_from_json(&serde_json::json!([[1], [1, 2]])).is_err());
    }
}
