//! Parsing of swept values: `start:stop:step`, comma lists and scalars.

use crate::{Error, Result};

/// Values of one parameter, in sweep order.
#[derive(Debug, Clone, PartialEq)]
pub struct Values(pub Vec<f64>);

impl Values {
    pub fn single(v: f64) -> Self {
        Values(vec![v])
    }

    pub fn is_sweep(&self) -> bool {
        self.0.len() > 1
    }

    /// First value; a scalar parameter's value.
    pub fn first(&self) -> f64 {
        self.0[0]
    }
}

fn number(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Config(format!("{what}: `{s}` is not a finite number")))
}

/// `start:stop:step` expands to `start + i*step` for every `i` with
/// `start + i*step <= stop` (up to a 1e-9 step fraction).
pub fn parse_values(s: &str, what: &str) -> Result<Values> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            return Err(Error::Config(format!(
                "{what}: range `{s}` must be start:stop:step"
            )));
        };
        let (start, stop, step) = (
            number(start, what)?,
            number(stop, what)?,
            number(step, what)?,
        );
        if step.is_nan() || step <= 0.0 {
            return Err(Error::Config(format!(
                "{what}: step must be positive, got {step}"
            )));
        }
        if stop < start {
            return Err(Error::Config(format!(
                "{what}: empty range {start}:{stop}:{step}"
            )));
        }
        let n = ((stop - start) / step + 1e-9).floor() as u64;
        if n > 1_000_000 {
            return Err(Error::Config(format!(
                "{what}: range has more than 10^6 points"
            )));
        }
        return Ok(Values((0..=n).map(|i| start + i as f64 * step).collect()));
    }
    let vals = s
        .split(',')
        .map(|p| number(p, what))
        .collect::<Result<Vec<_>>>()?;
    Ok(Values(vals))
}

/// Trial counts accept integer or float notation (`1e7`).
pub fn parse_count(s: &str, what: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let v = number(s, what)?;
    if v < 0.0 || v.fract() != 0.0 || v > u64::MAX as f64 {
        return Err(Error::Config(format!(
            "{what}: `{s}` is not a non-negative integer"
        )));
    }
    Ok(v as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(
            parse_values("2:5:1", "a").unwrap().0,
            vec![2.0, 3.0, 4.0, 5.0]
        );
        let v = parse_values("2:5:0.1", "a").unwrap().0;
        assert_eq!(v.len(), 31);
        assert_eq!(v[0], 2.0);
        assert!((v[30] - 5.0).abs() < 1e-12);
        let v = parse_values("-30:-10:2", "snr").unwrap().0;
        assert_eq!(v.len(), 11);
        assert_eq!(v[10], -10.0);
        assert_eq!(parse_values("0.3:0.3:0.1", "d").unwrap().0, vec![0.3]);
    }

    #[test]
    fn lists_and_scalars() {
        assert_eq!(parse_values("3", "a").unwrap(), Values::single(3.0));
        assert_eq!(parse_values("1e-3, 1e-4", "e").unwrap().0, vec![1e-3, 1e-4]);
        assert!(!parse_values("3", "a").unwrap().is_sweep());
    }

    #[test]
    fn bad_ranges() {
        for s in [
            "1:2", "1:2:0", "1:2:-1", "5:1:1", "a:b:c", "", "1,,2", "nan", "1:2:3:4",
        ] {
            assert!(parse_values(s, "x").is_err(), "{s}");
        }
    }

    #[test]
    fn counts() {
        assert_eq!(parse_count("1000", "t").unwrap(), 1000);
        assert_eq!(parse_count("1e7", "t").unwrap(), 10_000_000);
        assert!(parse_count("1.5", "t").is_err());
        assert!(parse_count("-3", "t").is_err());
    }
}
