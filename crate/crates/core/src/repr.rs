//! JSON-compatible representation of complex matrices and vectors.
//!
//! A complex matrix is stored as two nested real arrays of identical shape,
//! `{"re": [[..], ..], "im": [[..], ..]}`, row-major. Vectors use the same
//! layout with flat arrays.

use serde::{Deserialize, Serialize};

use crate::qmat::{CMat, CVec, C64};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRepr {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorRepr {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMat> for MatrixRepr {
    fn from(m: &CMat) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        MatrixRepr {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl TryFrom<&MatrixRepr> for CMat {
    type Error = Error;

    fn try_from(r: &MatrixRepr) -> Result<CMat> {
        let nrows = r.re.len();
        let ncols = r.re.first().map_or(0, Vec::len);
        let shape_ok = r.im.len() == nrows
            && r.re.iter().all(|row| row.len() == ncols)
            && r.im.iter().all(|row| row.len() == ncols);
        if !shape_ok {
            return Err(Error::DimensionMismatch(
                "ragged or mismatched re/im arrays".into(),
            ));
        }
        Ok(CMat::from_fn(nrows, ncols, |i, j| {
            C64::new(r.re[i][j], r.im[i][j])
        }))
    }
}

impl From<&CVec> for VectorRepr {
    fn from(v: &CVec) -> Self {
        VectorRepr {
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<&VectorRepr> for CVec {
    type Error = Error;

    fn try_from(r: &VectorRepr) -> Result<CVec> {
        if r.re.len() != r.im.len() {
            return Err(Error::DimensionMismatch("re/im length differ".into()));
        }
        Ok(CVec::from_iterator(
            r.re.len(),
            r.re.iter().zip(&r.im).map(|(&a, &b)| C64::new(a, b)),
        ))
    }
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros dropped,
/// scientific notation outside `[1e-4, 1e12)`.
pub fn format_real(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_real_matches_printf_g() {
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(1.0), "1");
        assert_eq!(format_real(-2.5), "-2.5");
        assert_eq!(format_real(24f64.log2()), "4.58496250072");
        assert_eq!(format_real(0.8535533905932738), "0.853553390593");
        assert_eq!(format_real(1e-9), "1e-09");
        assert_eq!(format_real(1.5e-5), "1.5e-05");
        assert_eq!(format_real(123456789012.0), "123456789012");
        assert_eq!(format_real(1234567890123.0), "1.23456789012e+12");
        assert_eq!(format_real(9.9999999999999e-1), "1");
    }

    #[test]
    fn matrix_round_trip() {
        let m = CMat::from_fn(2, 3, |i, j| C64::new(i as f64, j as f64));
        assert_eq!(CMat::try_from(&MatrixRepr::from(&m)).unwrap(), m);
        let bad = MatrixRepr { re: vec![vec![1.0]], im: vec![] };
        assert!(CMat::try_from(&bad).is_err());
    }
}
