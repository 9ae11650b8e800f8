use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use super::structure::{EventStructure, TermKey, Vertex};
use crate::error::{Error, Result};

/// Linear form over probability terms with optional classical bounds
/// `lower <= Σ c_k p_k <= upper`. A missing bound stands for ±∞.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    coeffs: BTreeMap<TermKey, Rational64>,
    lower: Option<Rational64>,
    upper: Option<Rational64>,
}

impl Inequality {
    pub fn new(
        coeffs: impl IntoIterator<Item = (TermKey, Rational64)>,
        lower: Option<Rational64>,
        upper: Option<Rational64>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (k, c) in coeffs {
            let entry = map.entry(k).or_insert_with(Rational64::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(Error::invalid("inequality has no nonzero coefficient"));
        }
        if let (Some(l), Some(u)) = (lower, upper) {
            if l > u {
                return Err(Error::invalid(format!("lower bound {l} exceeds upper bound {u}")));
            }
        }
        if lower.is_none() && upper.is_none() {
            return Err(Error::invalid("inequality needs at least one bound"));
        }
        Ok(Inequality {
            coeffs: map,
            lower,
            upper,
        })
    }

    /// Integer-coefficient convenience constructor.
    pub fn from_ints(coeffs: &[(TermKey, i64)], lower: Option<i64>, upper: Option<i64>) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&(k, c)| (k, Rational64::from_integer(c))),
            lower.map(Rational64::from_integer),
            upper.map(Rational64::from_integer),
        )
    }

    pub fn coeffs(&self) -> &BTreeMap<TermKey, Rational64> {
        &self.coeffs
    }

    pub fn coeff(&self, key: TermKey) -> Rational64 {
        self.coeffs.get(&key).copied().unwrap_or_else(Rational64::zero)
    }

    pub fn lower(&self) -> Option<Rational64> {
        self.lower
    }

    pub fn upper(&self) -> Option<Rational64> {
        self.upper
    }

    /// Events referenced by a nonzero coefficient.
    pub fn events(&self) -> Vec<usize> {
        let mut ev: Vec<usize> = self
            .coeffs
            .keys()
            .flat_map(|k| match *k {
                TermKey::Single(i) => vec![i],
                TermKey::Joint(i, j) => vec![i, j],
            })
            .collect();
        ev.sort_unstable();
        ev.dedup();
        ev
    }

    /// Checks every key against the structure.
    pub fn validate_for(&self, structure: &EventStructure) -> Result<()> {
        for &k in self.coeffs.keys() {
            if structure.coordinate_of(k).is_none() {
                return Err(Error::invalid(format!("term {k} is not part of the event structure")));
            }
        }
        Ok(())
    }

    /// Coefficients laid out in the structure's vertex coordinates.
    pub fn coefficient_vector(&self, structure: &EventStructure) -> Result<Vec<Rational64>> {
        self.validate_for(structure)?;
        let mut out = vec![Rational64::zero(); structure.dim()];
        for (&k, &c) in &self.coeffs {
            out[structure.coordinate_of(k).unwrap()] = c;
        }
        Ok(out)
    }

    pub fn evaluate(&self, coefficients: &[Rational64], vertex: &Vertex) -> Rational64 {
        coefficients
            .iter()
            .zip(&vertex.coords)
            .filter(|(_, &x)| x == 1)
            .map(|(c, _)| *c)
            .sum()
    }

    /// Same inequality scaled to coprime integer coefficients whose first
    /// nonzero entry (in [`TermKey`] order) is positive.
    pub fn canonical(&self) -> Inequality {
        let lcm = self
            .coeffs
            .values()
            .chain(self.lower.iter())
            .chain(self.upper.iter())
            .fold(1i64, |acc, c| acc.lcm(c.denom()));
        let ints: Vec<i64> = self.coeffs.values().map(|c| (c * lcm).to_integer()).collect();
        let g = ints.iter().fold(0i64, |acc, &c| acc.gcd(&c));
        let first_negative = ints[0] < 0;
        let sign = if first_negative { -1 } else { 1 };
        let factor = Rational64::new(lcm * sign, g);
        let scale = |b: Rational64| b * factor;
        let (lower, upper) = if first_negative {
            (self.upper.map(scale), self.lower.map(scale))
        } else {
            (self.lower.map(scale), self.upper.map(scale))
        };
        Inequality {
            coeffs: self.coeffs.iter().map(|(&k, &c)| (k, c * factor)).collect(),
            lower,
            upper,
        }
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs
            .values()
            .chain(self.lower.iter())
            .chain(self.upper.iter())
            .all(|c| c.is_integer())
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.lower {
            write!(f, "{l} <= ")?;
        }
        for (n, (k, c)) in self.coeffs.iter().enumerate() {
            let term = match k {
                TermKey::Single(i) => format!("p{i}"),
                TermKey::Joint(i, j) => format!("p{i}{j}"),
            };
            let mag = c.abs();
            let coef = if mag == Rational64::from_integer(1) {
                String::new()
            } else {
                mag.to_string()
            };
            let sign = match (n, c.is_negative()) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            write!(f, "{sign}{coef}{term}")?;
        }
        if let Some(u) = self.upper {
            write!(f, " <= {u}")?;
        }
        Ok(())
    }
}

fn rational_to_json(r: Rational64) -> Value {
    if r.is_integer() {
        Value::from(r.to_integer())
    } else {
        Value::from(r.to_string())
    }
}

fn rational_from_json(v: &Value) -> std::result::Result<Rational64, String> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational64::from_integer(i))
            } else {
                let x = n.as_f64().unwrap_or(f64::NAN);
                if x.fract() == 0.0 && x.abs() < 1e15 {
                    Ok(Rational64::from_integer(x as i64))
                } else {
                    Err(format!("coefficient {n} is not an integer; write it as \"p/q\""))
                }
            }
        }
        Value::String(s) => s
            .trim()
            .parse::<Rational64>()
            .map_err(|e| format!("bad rational {s:?}: {e}")),
        other => Err(format!("expected a number or \"p/q\" string, got {other}")),
    }
}

impl Serialize for Inequality {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Coeffs<'a>(&'a BTreeMap<TermKey, Rational64>);
        impl Serialize for Coeffs<'_> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut m = s.serialize_map(Some(self.0.len()))?;
                for (k, c) in self.0 {
                    m.serialize_entry(&k.to_string(), &rational_to_json(*c))?;
                }
                m.end()
            }
        }
        let mut m = serializer.serialize_map(Some(3))?;
        m.serialize_entry("coeffs", &Coeffs(&self.coeffs))?;
        m.serialize_entry("lower", &self.lower.map(rational_to_json))?;
        m.serialize_entry("upper", &self.upper.map(rational_to_json))?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for Inequality {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            coeffs: serde_json::Map<String, Value>,
            #[serde(default)]
            lower: Option<Value>,
            #[serde(default)]
            upper: Option<Value>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut coeffs = Vec::new();
        for (k, v) in &raw.coeffs {
            let key: TermKey = k.parse().map_err(D::Error::custom)?;
            coeffs.push((key, rational_from_json(v).map_err(D::Error::custom)?));
        }
        let bound = |b: &Option<Value>| -> std::result::Result<Option<Rational64>, D::Error> {
            match b {
                None | Some(Value::Null) => Ok(None),
                Some(v) => rational_from_json(v).map(Some).map_err(D::Error::custom),
            }
        };
        Inequality::new(coeffs, bound(&raw.lower)?, bound(&raw.upper)?).map_err(D::Error::custom)
    }
}

/// Convenience for display and CSV output.
pub fn rational_to_f64(r: Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
