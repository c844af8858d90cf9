//! Exact rationals for ratios and thresholds.

use num_rational::Ratio;

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Parses `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidParameter(format!("not a rational: {s:?}"));
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().map_err(|_| bad())?;
            let q: i128 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn ratio(num: usize, den: usize) -> Rational {
    if den == 0 {
        Rational::from_integer(0)
    } else {
        Rational::new(num as i128, den as i128)
    }
}
