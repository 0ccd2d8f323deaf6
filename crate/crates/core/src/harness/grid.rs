use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A one-dimensional parameter grid: `log:lo:hi:n`, `lin:lo:hi:n` or
/// `list:v1,v2,...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GridSpec {
    Log { lo: f64, hi: f64, n: usize },
    Lin { lo: f64, hi: f64, n: usize },
    List(Vec<f64>),
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            GridSpec::Log { lo, hi, n } => {
                let mut v: Vec<f64> = spaced(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect();
                // exp(ln x) can be off by an ulp; keep the endpoints as written.
                if let Some(first) = v.first_mut() {
                    *first = lo;
                }
                if n > 1 {
                    v[n - 1] = hi;
                }
                v
            }
            GridSpec::Lin { lo, hi, n } => spaced(lo, hi, n),
            GridSpec::List(ref v) => v.clone(),
        }
    }

    fn validate(self) -> Result<Self> {
        let ok = match &self {
            GridSpec::Log { lo, hi, n } => *lo > 0.0 && lo < hi && hi.is_finite() && *n >= 1,
            GridSpec::Lin { lo, hi, n } => lo.is_finite() && hi.is_finite() && lo <= hi && *n >= 1,
            GridSpec::List(v) => !v.is_empty() && v.iter().all(|x| x.is_finite()),
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::InvalidInput(format!("invalid grid {self}")))
        }
    }
}

// Endpoints are hit exactly.
fn spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect()
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Log { lo, hi, n } => write!(f, "log:{lo:e}:{hi:e}:{n}"),
            GridSpec::Lin { lo, hi, n } => write!(f, "lin:{lo}:{hi}:{n}"),
            GridSpec::List(v) => {
                let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "list:{}", items.join(","))
            }
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse grid {s:?}"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind {
            "log" | "lin" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [lo, hi, n] = parts[..] else { return Err(bad()) };
                let lo: f64 = lo.parse().map_err(|_| bad())?;
                let hi: f64 = hi.parse().map_err(|_| bad())?;
                let n: usize = n.parse().map_err(|_| bad())?;
                if kind == "log" {
                    GridSpec::Log { lo, hi, n }.validate()
                } else {
                    GridSpec::Lin { lo, hi, n }.validate()
                }
            }
            "list" => {
                let v =
                    rest.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
                GridSpec::List(v).validate()
            }
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for GridSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GridSpec> for String {
    fn from(g: GridSpec) -> String {
        g.to_string()
    }
}
