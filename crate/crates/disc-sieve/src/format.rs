//! Text and JSON forms of polynomials, matrices and exact numbers.
//!
//! Exact rationals are written as strings (`"22/27"`, or `"5"` for integers).
//! Matrix entries are JSON integers when they fit in 64 bits and decimal
//! strings otherwise; both are accepted on input, as are `"p/q"` strings where
//! rationals make sense.

use std::collections::BTreeMap;
use std::str::FromStr;

use disc_sieve_core::linalg::Mat;
use disc_sieve_core::{BigInt, BigRational, MonicPoly, SymMatrixRep};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{RunError, RunResult};

/// Parses a monic polynomial in `x`, e.g. `x^3+x^2+5x+25` or
/// `x^3 - 1*x^2 + 3*x + 9`.
pub fn parse_poly(text: &str) -> RunResult<MonicPoly> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |why: &str| RunError::invalid(format!("cannot parse polynomial {text:?}: {why}"));
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let mut terms: BTreeMap<usize, BigInt> = BTreeMap::new();
    let bytes = s.as_bytes();
    let mut start = 0;
    while start < bytes.len() {
        let mut end = start + 1;
        while end < bytes.len() && !(matches!(bytes[end], b'+' | b'-') && bytes[end - 1] != b'^') {
            end += 1;
        }
        let (k, c) = parse_term(&s[start..end]).ok_or_else(|| bad(&format!("bad term {:?}", &s[start..end])))?;
        *terms.entry(k).or_insert_with(BigInt::zero) += c;
        start = end;
    }
    terms.retain(|_, c| !c.is_zero());
    let (&n, lead) = terms.iter().next_back().ok_or_else(|| bad("zero polynomial"))?;
    if n == 0 {
        return Err(bad("degree must be at least 1"));
    }
    if !lead.is_one() {
        return Err(bad("leading coefficient must be 1"));
    }
    let coeffs = (0..n).rev().map(|k| terms.get(&k).cloned().unwrap_or_default()).collect();
    Ok(MonicPoly::new(coeffs)?)
}

/// One signed term `[±][c][*]x[^k]` or `[±]c`.
fn parse_term(t: &str) -> Option<(usize, BigInt)> {
    let (neg, body) = match t.as_bytes().first()? {
        b'+' => (false, &t[1..]),
        b'-' => (true, &t[1..]),
        _ => (false, t),
    };
    let (coef, power) = match body.find('x') {
        None => (body, None),
        Some(i) => (body[..i].strip_suffix('*').unwrap_or(&body[..i]), Some(&body[i + 1..])),
    };
    let k = match power {
        None => 0,
        Some("") => 1,
        Some(p) => p.strip_prefix('^')?.parse().ok()?,
    };
    let c = match coef {
        "" if power.is_some() => BigInt::one(),
        "" => return None,
        _ if coef.bytes().all(|b| b.is_ascii_digit()) => BigInt::from_str(coef).ok()?,
        _ => return None,
    };
    Some((k, if neg { -c } else { c }))
}

/// A JSON number or a decimal string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    pub fn from_bigint(x: &BigInt) -> Self {
        x.to_i64().map_or_else(|| Num::Text(x.to_string()), Num::Int)
    }

    pub fn to_bigint(&self) -> RunResult<BigInt> {
        match self {
            Num::Int(v) => Ok(BigInt::from(*v)),
            Num::Text(s) => BigInt::from_str(s.trim()).map_err(|_| RunError::invalid(format!("{s:?} is not an integer"))),
        }
    }

    pub fn to_rational(&self) -> RunResult<BigRational> {
        match self {
            Num::Int(v) => Ok(BigRational::from_integer(BigInt::from(*v))),
            Num::Text(s) => parse_rational(s),
        }
    }
}

pub fn parse_rational(s: &str) -> RunResult<BigRational> {
    let bad = || RunError::invalid(format!("{s:?} is not a rational number"));
    let r = BigRational::from_str(s.trim()).map_err(|_| bad())?;
    Ok(r)
}

/// `"p/q"`, or `"p"` when the denominator is 1.
pub fn rational_string(x: &BigRational) -> String {
    x.to_string()
}

/// `num/den` in lowest terms as a rational string.
pub fn ratio_string(num: u64, den: u64) -> String {
    if den == 0 {
        return "0/0".into();
    }
    rational_string(&BigRational::new(num.into(), den.into()))
}

/// `B = S/d` as `{"n", "d", "S"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymMatrixJson {
    pub n: usize,
    pub d: u32,
    #[serde(rename = "S")]
    pub s: Vec<Vec<Num>>,
}

impl SymMatrixJson {
    pub fn from_rep(b: &SymMatrixRep) -> Self {
        let n = b.n();
        let s = (0..n).map(|i| (0..n).map(|j| Num::from_bigint(b.s().get(i, j))).collect()).collect();
        SymMatrixJson { n, d: b.d(), s }
    }

    pub fn to_rep(&self) -> RunResult<SymMatrixRep> {
        let rows = integer_rows(&self.s)?;
        if rows.len() != self.n {
            return Err(RunError::invalid(format!("\"n\" is {} but S has {} rows", self.n, rows.len())));
        }
        Ok(SymMatrixRep::new(self.d, Mat::from_rows(rows))?)
    }
}

/// Input accepted by `qinv`: a symmetric matrix in `W₀`, or a pencil of two
/// `g×(g+1)` matrices.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum QinvInput {
    Pencil {
        #[serde(rename = "A")]
        a: Vec<Vec<Num>>,
        #[serde(rename = "B")]
        b: Vec<Vec<Num>>,
    },
    Symmetric {
        #[serde(default)]
        n: Option<usize>,
        #[serde(default = "one")]
        d: u32,
        #[serde(rename = "S")]
        s: Vec<Vec<Num>>,
    },
}

fn one() -> u32 {
    1
}

impl QinvInput {
    pub fn parse(text: &str) -> RunResult<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn integer_rows(rows: &[Vec<Num>]) -> RunResult<Vec<Vec<BigInt>>> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != width) {
        return Err(RunError::invalid("matrix rows have different lengths"));
    }
    rows.iter().map(|r| r.iter().map(Num::to_bigint).collect()).collect()
}

pub fn rational_rows(rows: &[Vec<Num>]) -> RunResult<Mat<BigRational>> {
    let width = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || rows.iter().any(|r| r.len() != width) {
        return Err(RunError::invalid("matrix must be nonempty with rows of equal length"));
    }
    let parsed: RunResult<Vec<Vec<BigRational>>> = rows.iter().map(|r| r.iter().map(Num::to_rational).collect()).collect();
    Ok(Mat::from_rows(parsed?))
}
