//! Plain-text matrix and vector format.
//!
//! A matrix is a line holding `N` followed by `N` lines of `N` space-separated
//! integers. A vector is one line of space-separated rationals (`p/q` or `p`).

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use super::{CycleVector, IntMatrix, Rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TextError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("invalid rational {0:?}")]
    BadRational(String),
}

fn malformed(line: usize, message: impl Into<String>) -> TextError {
    TextError::Malformed {
        line,
        message: message.into(),
    }
}

pub fn parse_matrix(text: &str) -> Result<IntMatrix, TextError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or_else(|| malformed(1, "empty input"))?;
    let n: usize = header
        .parse()
        .map_err(|_| malformed(first, format!("expected dimension, found {header:?}")))?;
    let mut m = IntMatrix::zeros(n);
    for i in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| malformed(first + i + 1, format!("expected {n} rows")))?;
        let row: Vec<i64> = line
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|e| malformed(ln, e.to_string()))?;
        if row.len() != n {
            return Err(malformed(ln, format!("expected {n} entries, found {}", row.len())));
        }
        for (j, x) in row.into_iter().enumerate() {
            m.set(i, j, x);
        }
    }
    if let Some((ln, _)) = lines.next() {
        return Err(malformed(ln, "trailing data after matrix"));
    }
    Ok(m)
}

pub fn format_matrix(m: &IntMatrix) -> String {
    m.to_string()
}

pub fn parse_rat(token: &str) -> Result<Rat, TextError> {
    let bad = || TextError::BadRational(token.to_string());
    let t = token.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => t.parse::<BigInt>().map(Rat::from_integer).map_err(|_| bad()),
    }
}

pub fn parse_vector(text: &str) -> Result<CycleVector, TextError> {
    let entries = text
        .split_whitespace()
        .map(parse_rat)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CycleVector::from_rats(entries))
}

pub fn format_vector(v: &CycleVector) -> String {
    v.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
        let text = format_matrix(&m);
        assert_eq!(text, "2\n0 -1\n1 0\n");
        assert_eq!(parse_matrix(&text).unwrap(), m);
    }

    #[test]
    fn matrix_errors() {
        assert!(parse_matrix("").is_err());
        assert!(parse_matrix("2\n0 1\n").is_err());
        assert!(parse_matrix("2\n0 1 2\n1 0\n").is_err());
        assert!(parse_matrix("1\n0\n5\n").is_err());
    }

    #[test]
    fn vector_parsing() {
        let v = parse_vector("1 -3/6 0").unwrap();
        assert_eq!(v.entries()[1], Rat::new((-1).into(), 2.into()));
        assert_eq!(format_vector(&v), "1 -1/2 0");
        assert!(parse_vector("1/0").is_err());
        assert!(parse_vector("x").is_err());
    }
}
