//! Reference Meijer G values computed ahead of time at high precision.
//!
//! Format, one case per line: `m n p q | a... | b... | z | expected | rel_tol`.
//! Blank lines and lines starting with `#` are skipped.

use crate::meijer::MeijerGSpec;

/// The committed reference set.
pub const REFERENCE: &str = include_str!("../data/meijer_fixtures.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct MeijerFixture {
    /// 1-based line in the source text.
    pub line: usize,
    pub spec: MeijerGSpec,
    pub z: f64,
    pub expected: f64,
    pub rel_tol: f64,
}

fn numbers(field: &str, line: usize) -> Result<Vec<f64>, String> {
    field.split_whitespace().map(|t| t.parse().map_err(|_| format!("line {line}: bad number '{t}'"))).collect()
}

pub fn parse(text: &str) -> Result<Vec<MeijerFixture>, String> {
    let mut cases = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = body.split('|').collect();
        if fields.len() != 6 {
            return Err(format!("line {line}: expected 6 '|'-separated fields, found {}", fields.len()));
        }
        let orders = numbers(fields[0], line)?;
        if orders.len() != 4 || orders.iter().any(|o| o.fract() != 0.0 || *o < 0.0) {
            return Err(format!("line {line}: orders must be four non-negative integers"));
        }
        let (a, b) = (numbers(fields[1], line)?, numbers(fields[2], line)?);
        if a.len() != orders[2] as usize || b.len() != orders[3] as usize {
            return Err(format!("line {line}: parameter counts do not match p and q"));
        }
        let spec = MeijerGSpec::new(orders[0] as usize, orders[1] as usize, &a, &b)
            .map_err(|e| format!("line {line}: {e}"))?;
        let scalar = |f: &str| f.trim().parse::<f64>().map_err(|_| format!("line {line}: bad number '{}'", f.trim()));
        cases.push(MeijerFixture {
            line,
            spec,
            z: scalar(fields[3])?,
            expected: scalar(fields[4])?,
            rel_tol: scalar(fields[5])?,
        });
    }
    Ok(cases)
}
