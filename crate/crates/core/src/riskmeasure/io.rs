//! Plain-text scenario and partition files.
//!
//! Scenario file: one outcome per line, `probability [label]`. Partition file:
//! one atom per line, 1-based outcome numbers separated by spaces or commas;
//! `a-b` denotes a range. `#` starts a comment in both.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::space::{FiniteProbSpace, PartitionSigma};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub space: FiniteProbSpace<T>,
    pub labels: Vec<Option<String>>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse_scenario<T: Scalar>(text: &str) -> Result<Scenario<T>> {
    let mut probs = Vec::new();
    let mut labels = Vec::new();
    for (line, l) in content_lines(text) {
        let mut parts = l.splitn(2, char::is_whitespace);
        let p = parts.next().unwrap_or("");
        let p: f64 = p.parse().map_err(|_| Error::Parse {
            line,
            message: format!("expected a probability, found '{p}'"),
        })?;
        probs.push(T::lit(p));
        labels.push(parts.next().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()));
    }
    Ok(Scenario {
        space: FiniteProbSpace::new(probs)?,
        labels,
    })
}

/// Parses a list of 1-based outcome numbers and ranges into 0-based indices.
pub fn parse_index_list(text: &str, line: usize) -> Result<Vec<usize>> {
    let bad = |tok: &str| Error::Parse {
        line,
        message: format!("bad outcome number '{tok}' (outcomes are numbered from 1)"),
    };
    let mut out = Vec::new();
    for tok in text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let (a, b) = match tok.split_once('-') {
            Some((a, b)) => (a, b),
            None => (tok, tok),
        };
        let a: usize = a.parse().map_err(|_| bad(tok))?;
        let b: usize = b.parse().map_err(|_| bad(tok))?;
        if a == 0 || b < a {
            return Err(bad(tok));
        }
        out.extend(a - 1..b);
    }
    Ok(out)
}

pub fn parse_partition(text: &str, n: usize) -> Result<PartitionSigma> {
    let atoms = content_lines(text)
        .map(|(line, l)| parse_index_list(l, line))
        .collect::<Result<Vec<_>>>()?;
    PartitionSigma::new(n, atoms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_roundtrip() {
        let s: Scenario<f64> = parse_scenario("# probs\n0.25 up\n0.25\n0.5 down hard\n").unwrap();
        assert_eq!(s.space.n(), 3);
        assert_eq!(s.labels, vec![Some("up".into()), None, Some("down hard".into())]);
        assert!(matches!(
            parse_scenario::<f64>("0.5\nx\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_scenario::<f64>("0.5\n0.4\n"),
            Err(Error::InvalidSpace(_))
        ));
    }

    #[test]
    fn partition_parsing() {
        let g = parse_partition("1-4\n5, 6 7\n8-10 # tail\n", 10).unwrap();
        assert_eq!(g.atoms(), &[vec![0, 1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        assert!(matches!(parse_partition("0 1\n", 2), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_partition("1\n", 2), Err(Error::InvalidPartition(_))));
    }
}
