//! Line-oriented schedule files.
//!
//! ```text
//! # middle-thirds Cantor set
//! dim 1
//! step m=3
//! keep 0 2
//! periodic 1
//! ```
//!
//! A file ends its step list with either `periodic <length>` or
//! `generator <name>`.

use super::{Cell, GridStep, Schedule};
use crate::error::{Error, Result};

struct PendingStep {
    line: usize,
    m: u32,
    kept: Vec<Cell>,
}

enum Tail {
    Periodic(usize),
    Generator(String),
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut dim: Option<usize> = None;
    let mut steps: Vec<GridStep> = Vec::new();
    let mut pending: Option<PendingStep> = None;
    let mut tail: Option<(usize, Tail)> = None;

    let finish = |pending: &mut Option<PendingStep>, steps: &mut Vec<GridStep>, dim: usize| {
        if let Some(p) = pending.take() {
            let step =
                GridStep::new(dim, p.m, p.kept).map_err(|e| Error::parse(p.line, e.to_string()))?;
            steps.push(step);
        }
        Ok::<_, Error>(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let directive = words.next().unwrap();
        if let Some((tail_line, _)) = &tail {
            return Err(Error::parse(
                line_no,
                format!("content after tail directive on line {tail_line}"),
            ));
        }
        match directive {
            "dim" => {
                if dim.is_some() {
                    return Err(Error::parse(line_no, "duplicate `dim`"));
                }
                let value = single_arg(&mut words, line_no, "dim")?;
                let n: usize = value
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad dimension `{value}`")))?;
                if n == 0 {
                    return Err(Error::parse(line_no, "dimension must be at least 1"));
                }
                dim = Some(n);
            }
            "step" => {
                let n = dim.ok_or_else(|| Error::parse(line_no, "`step` before `dim`"))?;
                finish(&mut pending, &mut steps, n)?;
                let arg = single_arg(&mut words, line_no, "step")?;
                let m = arg
                    .strip_prefix("m=")
                    .and_then(|v| v.parse::<u32>().ok())
                    .ok_or_else(|| {
                        Error::parse(line_no, format!("expected `m=<int>`, got `{arg}`"))
                    })?;
                pending = Some(PendingStep {
                    line: line_no,
                    m,
                    kept: Vec::new(),
                });
            }
            "keep" => {
                let n = dim.ok_or_else(|| Error::parse(line_no, "`keep` before `dim`"))?;
                let step = pending
                    .as_mut()
                    .ok_or_else(|| Error::parse(line_no, "`keep` outside a step block"))?;
                let mut any = false;
                for token in words {
                    any = true;
                    let cell = parse_cell(token)
                        .ok_or_else(|| Error::parse(line_no, format!("bad cell `{token}`")))?;
                    if cell.len() != n {
                        return Err(Error::parse(
                            line_no,
                            format!(
                                "cell `{token}` has {} coordinates, expected {n}",
                                cell.len()
                            ),
                        ));
                    }
                    step.kept.push(cell);
                }
                if !any {
                    return Err(Error::parse(line_no, "`keep` without cells"));
                }
            }
            "periodic" => {
                let arg = single_arg(&mut words, line_no, "periodic")?;
                let len: usize = arg
                    .parse()
                    .map_err(|_| Error::parse(line_no, format!("bad period `{arg}`")))?;
                tail = Some((line_no, Tail::Periodic(len)));
            }
            "generator" => {
                let arg = single_arg(&mut words, line_no, "generator")?;
                tail = Some((line_no, Tail::Generator(arg.to_string())));
            }
            other => {
                return Err(Error::parse(
                    line_no,
                    format!("unknown directive `{other}`"),
                ));
            }
        }
    }

    let n = dim.ok_or_else(|| Error::parse(1, "missing `dim`"))?;
    finish(&mut pending, &mut steps, n)?;
    let (tail_line, tail) = tail.ok_or_else(|| {
        Error::parse(
            text.lines().count().max(1),
            "missing tail directive (`periodic <length>` or `generator <name>`)",
        )
    })?;
    match tail {
        Tail::Periodic(len) => {
            if steps.is_empty() {
                return Err(Error::parse(tail_line, "periodic tail without steps"));
            }
            Schedule::periodic(steps, len).map_err(|e| Error::parse(tail_line, e.to_string()))
        }
        Tail::Generator(name) => {
            if !steps.is_empty() {
                return Err(Error::parse(
                    tail_line,
                    "generator cannot follow explicit steps",
                ));
            }
            let s = match name.as_str() {
                "carpet-vicsek" => Schedule::carpet_vicsek(),
                other => {
                    return Err(Error::parse(
                        tail_line,
                        format!("unknown generator `{other}`"),
                    ));
                }
            };
            if s.dim() != n {
                return Err(Error::parse(
                    tail_line,
                    format!(
                        "generator `{name}` has dimension {}, file declares {n}",
                        s.dim()
                    ),
                ));
            }
            Ok(s)
        }
    }
}

fn single_arg<'a>(
    words: &mut impl Iterator<Item = &'a str>,
    line: usize,
    directive: &str,
) -> Result<&'a str> {
    let arg = words
        .next()
        .ok_or_else(|| Error::parse(line, format!("`{directive}` needs an argument")))?;
    if words.next().is_some() {
        return Err(Error::parse(
            line,
            format!("`{directive}` takes one argument"),
        ));
    }
    Ok(arg)
}

/// `v1,...,vN` with non-negative integer coordinates.
pub(crate) fn parse_cell(token: &str) -> Option<Cell> {
    token
        .split(',')
        .map(|v| v.trim().parse::<u32>().ok())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CANTOR: &str = "# cantor\ndim 1\nstep m=3\nkeep 0 2\nperiodic 1\n";

    #[test]
    fn parses_cantor() {
        let s = parse_schedule(CANTOR).unwrap();
        assert_eq!(s, Schedule::cantor());
    }

    #[test]
    fn parses_carpet_with_multiple_keep_lines() {
        let text = "dim 2\nstep m=3\nkeep 0,0 0,1 0,2\nkeep 1,0 1,2   # no centre\nkeep 2,0 2,1 2,2\nperiodic 1\n";
        let s = parse_schedule(text).unwrap();
        assert_eq!(s.step(5).p(), 8);
        assert_eq!(s, Schedule::constant(GridStep::carpet()));
    }

    #[test]
    fn parses_generator() {
        let s = parse_schedule("dim 2\ngenerator carpet-vicsek\n").unwrap();
        assert_eq!(s, Schedule::carpet_vicsek());
        assert!(parse_schedule("dim 1\ngenerator carpet-vicsek\n").is_err());
        assert!(parse_schedule("dim 2\ngenerator sponge\n").is_err());
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            ("dim 1\nstep m=3\nkeep 0\nperiodic 1\n", 2),
            ("dim 1\nstep m=3\nkeep 0 3\nperiodic 1\n", 2),
            ("dim 1\nstep m=3\nkeep 0 2\nfrobnicate\nperiodic 1\n", 4),
            ("dim 1\nstep m=3\nkeep 0 2\n", 3),
            ("step m=3\n", 1),
            ("dim 1\nkeep 0 2\nperiodic 1\n", 2),
            ("dim 2\nstep m=3\nkeep 0,0 1\nperiodic 1\n", 3),
            ("dim 1\nstep m=3\nkeep 0 2\nperiodic 2\n", 4),
            ("dim 1\nstep m=3\nkeep 0 2\nperiodic 1\nstep m=3\n", 5),
        ];
        for (text, line) in cases {
            match parse_schedule(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }
}
