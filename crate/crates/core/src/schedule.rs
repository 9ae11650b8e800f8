//! Angle assignments as affine functions of a sweep parameter.
//!
//! Syntax: comma-separated `event=expr` items. Events are numbers (`1`, `2`,
//! ...) or letters (`a` = 1, `b` = 2, ...). An expression is a sum of terms
//! such as `0`, `2t`, `-t`, `pi/4`, `3pi/4`, `0.5*t + pi`; each term may
//! contain at most one `t`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qops::{Angle, AngleMap};

/// `slope * t + offset`, radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Affine {
    pub slope: f64,
    pub offset: f64,
}

impl Affine {
    pub fn at(&self, t: f64) -> f64 {
        self.slope * t + self.offset
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleSchedule {
    entries: BTreeMap<usize, Affine>,
}

impl AngleSchedule {
    pub fn new(entries: BTreeMap<usize, Affine>) -> Self {
        AngleSchedule { entries }
    }

    pub fn entries(&self) -> &BTreeMap<usize, Affine> {
        &self.entries
    }

    pub fn angles_at(&self, t: f64) -> AngleMap {
        self.entries.iter().map(|(&k, a)| (k, Angle(a.at(t)))).collect()
    }

    /// True if no entry depends on the sweep parameter.
    pub fn is_constant(&self) -> bool {
        self.entries.values().all(|a| a.slope == 0.0)
    }
}

impl FromStr for AngleSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            let (name, expr) = item
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("schedule item {item:?} lacks '='")))?;
            let event = parse_event(name.trim())?;
            let value = parse_expr(expr)?;
            if entries.insert(event, value).is_some() {
                return Err(Error::invalid(format!("event {event} assigned twice")));
            }
        }
        if entries.is_empty() {
            return Err(Error::invalid("empty angle schedule"));
        }
        Ok(AngleSchedule { entries })
    }
}

/// Parses a constant assignment such as `a=0,b=pi/2,c=pi/4,d=3pi/4`.
pub fn parse_angles(s: &str) -> Result<AngleMap> {
    let sched: AngleSchedule = s.parse()?;
    if !sched.is_constant() {
        return Err(Error::invalid("fixed angles may not depend on t"));
    }
    Ok(sched.angles_at(0.0))
}

/// Parses a constant expression such as `pi/3` or `0.25`.
pub fn parse_scalar(s: &str) -> Result<f64> {
    let a = parse_expr(s)?;
    if a.slope != 0.0 {
        return Err(Error::invalid(format!("{s:?} must not depend on t")));
    }
    Ok(a.offset)
}

fn parse_event(name: &str) -> Result<usize> {
    if let Ok(n) = name.parse::<usize>() {
        if n > 0 {
            return Ok(n);
        }
    }
    let mut chars = name.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Ok((c as u8 - b'a') as usize + 1),
        _ => Err(Error::invalid(format!("bad event name {name:?}"))),
    }
}

fn parse_expr(expr: &str) -> Result<Affine> {
    let expr: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if expr.is_empty() {
        return Err(Error::invalid("empty angle expression"));
    }
    let mut out = Affine {
        slope: 0.0,
        offset: 0.0,
    };
    let mut start = 0;
    let bytes = expr.as_bytes();
    for i in 1..=bytes.len() {
        let boundary = i == bytes.len()
            || ((bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E' | b'*' | b'/'));
        if boundary {
            let (v, has_t) = parse_term(&expr[start..i])?;
            if has_t {
                out.slope += v;
            } else {
                out.offset += v;
            }
            start = i;
        }
    }
    Ok(out)
}

/// Returns the term's numeric value and whether it multiplies `t`.
fn parse_term(term: &str) -> Result<(f64, bool)> {
    let bad = || Error::invalid(format!("cannot parse angle term {term:?}"));
    let (sign, body) = match term.as_bytes().first() {
        Some(b'-') => (-1.0, &term[1..]),
        Some(b'+') => (1.0, &term[1..]),
        _ => (1.0, term),
    };
    let mut parts = body.split('/');
    let (num, has_t) = parse_product(parts.next().ok_or_else(bad)?, true).ok_or_else(bad)?;
    let mut value = sign * num;
    for d in parts {
        let (den, t_in_den) = parse_product(d, false).ok_or_else(bad)?;
        if t_in_den || den == 0.0 {
            return Err(bad());
        }
        value /= den;
    }
    Ok((value, has_t))
}

fn parse_product(s: &str, allow_t: bool) -> Option<(f64, bool)> {
    if s.is_empty() {
        return None;
    }
    let mut value = 1.0;
    let mut has_t = false;
    let mut rest = s;
    while !rest.is_empty() {
        if let Some(r) = rest.strip_prefix('*') {
            rest = r;
        } else if let Some(r) = rest.strip_prefix("pi") {
            value *= PI;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('t') {
            if has_t || !allow_t {
                return None;
            }
            has_t = true;
            rest = r;
        } else {
            let end = rest
                .char_indices()
                .find(|&(i, c)| {
                    !(c.is_ascii_digit() || c == '.' || ((c == 'e' || c == 'E') && i > 0))
                        && !((c == '-' || c == '+') && i > 0 && matches!(rest.as_bytes()[i - 1], b'e' | b'E'))
                })
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            if end == 0 {
                return None;
            }
            value *= rest[..end].parse::<f64>().ok()?;
            rest = &rest[end..];
        }
    }
    Some((value, has_t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ch_sweep_schedule() {
        let s: AngleSchedule = "a=0,b=2t,c=t,d=3t".parse().unwrap();
        let at = s.angles_at(0.5);
        assert_eq!(at[&1].0, 0.0);
        assert_eq!(at[&2].0, 1.0);
        assert_eq!(at[&3].0, 0.5);
        assert_eq!(at[&4].0, 1.5);
    }

    #[test]
    fn expressions() {
        let cases = [
            ("pi/4", 0.0, PI / 4.0),
            ("3pi/4", 0.0, 3.0 * PI / 4.0),
            ("-t+pi", -1.0, PI),
            ("0.5*t - pi/2", 0.5, -PI / 2.0),
            ("t/2", 0.5, 0.0),
            ("1e-1t", 0.1, 0.0),
            ("2*pi*t", 2.0 * PI, 0.0),
        ];
        for (text, slope, offset) in cases {
            let a = parse_expr(text).unwrap();
            assert!(
                (a.slope - slope).abs() < 1e-15 && (a.offset - offset).abs() < 1e-15,
                "{text}: {a:?}"
            );
        }
    }

    #[test]
    fn rejects_garbage() {
        for text in ["", "x", "tt", "pi/t", "1/0", "2/"] {
            assert!(parse_expr(text).is_err(), "{text}");
        }
        assert!("a=1,a=2".parse::<AngleSchedule>().is_err());
        assert!("0=1".parse::<AngleSchedule>().is_err());
        assert!(parse_angles("a=t").is_err());
        assert_eq!(parse_angles("3=pi").unwrap()[&3].0, PI);
        assert_eq!(parse_scalar("pi/2").unwrap(), PI / 2.0);
        assert!(parse_scalar("2t").is_err());
    }
}
