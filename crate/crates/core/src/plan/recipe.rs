//! Problem-independent plan structure and its s-expression syntax.

use std::fmt;
use std::sync::Arc;

use crate::Error;

/// The shape of a plan: which step solves the problem and how the
/// subproblems are solved in turn. A recipe only becomes executable once
/// instantiated for a concrete problem, which also checks that each step
/// applies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Recipe {
    Copy,
    Transpose(usize),
    Direct(usize),
    DirectTw(usize),
    Dit { r: usize, c1: Arc<Recipe>, c2: Arc<Recipe> },
    Dif { r: usize, c1: Arc<Recipe>, c2: Arc<Recipe> },
    Loop { dim: usize, child: Arc<Recipe> },
    Indirect { c1: Arc<Recipe>, c2: Arc<Recipe> },
    Buffer { b: usize, child: Arc<Recipe> },
    Rader { p: usize, child: Arc<Recipe> },
    Bluestein { n: usize, m: usize, child: Arc<Recipe> },
    Generic(usize),
    RankReduce(Vec<Arc<Recipe>>),
    Inplace { p: usize, q: usize, m: usize, child: Arc<Recipe> },
}

impl Recipe {
    pub fn children(&self) -> Vec<&Arc<Recipe>> {
        match self {
            Recipe::Copy | Recipe::Transpose(_) | Recipe::Direct(_) | Recipe::DirectTw(_) | Recipe::Generic(_) => vec![],
            Recipe::Dit { c1, c2, .. } | Recipe::Dif { c1, c2, .. } | Recipe::Indirect { c1, c2 } => vec![c1, c2],
            Recipe::Loop { child, .. }
            | Recipe::Buffer { child, .. }
            | Recipe::Rader { child, .. }
            | Recipe::Bluestein { child, .. }
            | Recipe::Inplace { child, .. } => vec![child],
            Recipe::RankReduce(cs) => cs.iter().collect(),
        }
    }

    pub fn parse(s: &str) -> Result<Recipe, Error> {
        let tokens = tokenize(s);
        let mut pos = 0;
        let r = parse_at(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse(format!("trailing input after plan in `{s}`")));
        }
        Ok(r)
    }
}

fn tokenize(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(st) = start.take() {
                out.push(&s[st..i]);
            }
            if !c.is_whitespace() {
                out.push(&s[i..i + 1]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    out
}

fn parse_at(t: &[&str], pos: &mut usize) -> Result<Recipe, Error> {
    let eof = || Error::Parse("unexpected end of plan".into());
    let next = |pos: &mut usize| -> Result<&str, Error> {
        let tok = t.get(*pos).ok_or_else(eof)?;
        *pos += 1;
        Ok(tok)
    };
    let num = |pos: &mut usize| -> Result<usize, Error> {
        let tok = next(pos)?;
        tok.parse().map_err(|_| Error::Parse(format!("expected a number, got `{tok}`")))
    };
    let child = |pos: &mut usize| parse_at(t, pos).map(Arc::new);
    let open = next(pos)?;
    if open != "(" {
        return Err(Error::Parse(format!("expected `(`, got `{open}`")));
    }
    let head = next(pos)?;
    let r = match head {
        "copy" => Recipe::Copy,
        "transposq" => Recipe::Transpose(num(pos)?),
        "direct" => Recipe::Direct(num(pos)?),
        "directtw" => Recipe::DirectTw(num(pos)?),
        "dit" => Recipe::Dit {
            r: num(pos)?,
            c1: child(pos)?,
            c2: child(pos)?,
        },
        "dif" => Recipe::Dif {
            r: num(pos)?,
            c1: child(pos)?,
            c2: child(pos)?,
        },
        "loop" => Recipe::Loop {
            dim: num(pos)?,
            child: child(pos)?,
        },
        "indirect" => Recipe::Indirect {
            c1: child(pos)?,
            c2: child(pos)?,
        },
        "buffer" => Recipe::Buffer {
            b: num(pos)?,
            child: child(pos)?,
        },
        "rader" => Recipe::Rader {
            p: num(pos)?,
            child: child(pos)?,
        },
        "bluestein" => Recipe::Bluestein {
            n: num(pos)?,
            m: num(pos)?,
            child: child(pos)?,
        },
        "generic" => Recipe::Generic(num(pos)?),
        "rankreduce" => {
            let mut cs = Vec::new();
            while t.get(*pos) == Some(&"(") {
                cs.push(child(pos)?);
            }
            Recipe::RankReduce(cs)
        }
        "inplace" => Recipe::Inplace {
            p: num(pos)?,
            q: num(pos)?,
            m: num(pos)?,
            child: child(pos)?,
        },
        other => return Err(Error::Parse(format!("unknown plan kind `{other}`"))),
    };
    let close = next(pos)?;
    if close != ")" {
        return Err(Error::Parse(format!("expected `)` after {head}, got `{close}`")));
    }
    Ok(r)
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Recipe::Copy => write!(f, "(copy)"),
            Recipe::Transpose(n) => write!(f, "(transposq {n})"),
            Recipe::Direct(n) => write!(f, "(direct {n})"),
            Recipe::DirectTw(n) => write!(f, "(directtw {n})"),
            Recipe::Dit { r, c1, c2 } => write!(f, "(dit {r} {c1} {c2})"),
            Recipe::Dif { r, c1, c2 } => write!(f, "(dif {r} {c1} {c2})"),
            Recipe::Loop { dim, child } => write!(f, "(loop {dim} {child})"),
            Recipe::Indirect { c1, c2 } => write!(f, "(indirect {c1} {c2})"),
            Recipe::Buffer { b, child } => write!(f, "(buffer {b} {child})"),
            Recipe::Rader { p, child } => write!(f, "(rader {p} {child})"),
            Recipe::Bluestein { n, m, child } => write!(f, "(bluestein {n} {m} {child})"),
            Recipe::Generic(n) => write!(f, "(generic {n})"),
            Recipe::RankReduce(cs) => {
                write!(f, "(rankreduce")?;
                for c in cs {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
            Recipe::Inplace { p, q, m, child } => write!(f, "(inplace {p} {q} {m} {child})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        for s in [
            "(copy)",
            "(dit 2 (direct 4) (directtw 2))",
            "(rankreduce (direct 4) (loop 0 (direct 4)))",
            "(inplace 4 4 4 (loop 1 (direct 4)))",
            "(bluestein 101 256 (dit 16 (direct 16) (directtw 16)))",
        ] {
            assert_eq!(Recipe::parse(s).unwrap().to_string(), s);
        }
    }

    #[test]
    fn rejects_garbage() {
        assert!(Recipe::parse("(dit").is_err());
        assert!(Recipe::parse("(direct 4) x").is_err());
        assert!(Recipe::parse("(frob 3)").is_err());
        assert!(Recipe::parse("(direct -1)").is_err());
    }
}
