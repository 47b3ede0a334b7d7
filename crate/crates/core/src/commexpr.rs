//! Commutator expressions such as `[[x1, x2], [x1, x2 x3]]`.
//!
//! Grammar (whitespace is insignificant):
//!
//! ```text
//! expr    := factor*                       juxtaposition is the product
//! factor  := atom ( "^" atom | "^-1" )*    "^" atom is conjugation
//! atom    := "[" expr "," expr "]" | "(" expr ")" | literal
//! literal := name ( "^" integer )?         x1..xn, or x y z p for x1..x4
//! ```
//!
//! Adjacent literals are merged into a single [`CommutatorExpr::Leaf`]. A
//! leaf consisting of one inverse letter is represented as `Inv(Leaf[g])`,
//! so `x1^-1` parses to `Inv(Leaf[1])`.

use std::fmt;

use crate::{Error, Rank, Result, Word};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum CommutatorExpr {
    Leaf(Word),
    Comm(Box<CommutatorExpr>, Box<CommutatorExpr>),
    /// `base^by = by⁻¹ base by`
    Conj(Box<CommutatorExpr>, Box<CommutatorExpr>),
    Inv(Box<CommutatorExpr>),
    /// At least two factors.
    Prod(Vec<CommutatorExpr>),
}

use CommutatorExpr::*;

impl CommutatorExpr {
    pub fn leaf(letters: &[i32]) -> Self {
        Leaf(Word::from_raw(letters.iter().copied()))
    }

    pub fn comm(a: CommutatorExpr, b: CommutatorExpr) -> Self {
        Comm(Box::new(a), Box::new(b))
    }

    pub fn conj(base: CommutatorExpr, by: CommutatorExpr) -> Self {
        Conj(Box::new(base), Box::new(by))
    }

    pub fn inv(e: CommutatorExpr) -> Self {
        Inv(Box::new(e))
    }

    /// Product of `factors`, collapsing the zero- and one-factor cases.
    pub fn product(mut factors: Vec<CommutatorExpr>) -> Self {
        match factors.len() {
            0 => Leaf(Word::identity()),
            1 => factors.pop().unwrap(),
            _ => Prod(factors),
        }
    }

    /// Opens every bracket and returns the freely reduced word.
    pub fn expand(&self, rank: Rank) -> Result<Word> {
        Ok(match self {
            Leaf(w) => {
                w.check_rank(rank)?;
                w.clone()
            }
            Comm(a, b) => a.expand(rank)?.commutator(&b.expand(rank)?),
            Conj(a, by) => a.expand(rank)?.conjugate(&by.expand(rank)?),
            Inv(a) => a.expand(rank)?.inverse(),
            Prod(fs) => {
                let mut out = Word::identity();
                for f in fs {
                    out = out.multiply(&f.expand(rank)?);
                }
                out
            }
        })
    }

    /// Largest generator index mentioned anywhere in the tree.
    pub fn max_generator(&self) -> u32 {
        match self {
            Leaf(w) => w.max_generator(),
            Comm(a, b) | Conj(a, b) => a.max_generator().max(b.max_generator()),
            Inv(a) => a.max_generator(),
            Prod(fs) => fs.iter().map(|f| f.max_generator()).max().unwrap_or(0),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Leaf(_) => 0,
            Comm(a, b) | Conj(a, b) => 1 + a.depth().max(b.depth()),
            Inv(a) => a.depth(),
            Prod(fs) => fs.iter().map(|f| f.depth()).max().unwrap_or(0),
        }
    }

    /// The form [`parse`] produces for this expression's printed text:
    /// runs of literal factors inside products are merged and single
    /// inverse letters become `Inv(Leaf[g])`.
    pub fn normalize(&self) -> CommutatorExpr {
        match self {
            Leaf(w) => leaf_node(w.clone()),
            Comm(a, b) => CommutatorExpr::comm(a.normalize(), b.normalize()),
            Conj(a, b) => CommutatorExpr::conj(a.normalize(), b.normalize()),
            Inv(a) => CommutatorExpr::inv(a.normalize()),
            Prod(fs) => {
                let mut out = Vec::new();
                let mut run: Option<Word> = None;
                for f in fs {
                    let f = f.normalize();
                    match literal_word(&f) {
                        Some(w) => {
                            run = Some(run.take().unwrap_or_default().multiply(&w));
                        }
                        None => {
                            flush_run(&mut run, &mut out);
                            out.push(f);
                        }
                    }
                }
                flush_run(&mut run, &mut out);
                CommutatorExpr::product(out)
            }
        }
    }
}

fn flush_run(run: &mut Option<Word>, out: &mut Vec<CommutatorExpr>) {
    if let Some(w) = run.take() {
        // empty runs print as nothing and vanish from the product
        if !w.is_empty() {
            out.push(leaf_node(w));
        }
    }
}

fn leaf_node(w: Word) -> CommutatorExpr {
    match w.letters() {
        [g] if *g < 0 => CommutatorExpr::inv(CommutatorExpr::leaf(&[-g])),
        _ => Leaf(w),
    }
}

/// The word of a factor that prints as a run of literals.
fn literal_word(e: &CommutatorExpr) -> Option<Word> {
    match e {
        Leaf(w) => Some(w.clone()),
        Inv(inner) => match inner.as_ref() {
            Leaf(w) if w.len() == 1 && w.letters()[0] > 0 => Some(w.inverse()),
            _ => None,
        },
        _ => None,
    }
}

/// Left-nested commutator `[[[u_1, u_2], u_3], …, u_k]`.
pub fn iterated(leaves: &[Word]) -> Result<CommutatorExpr> {
    if leaves.len() < 2 {
        return Err(Error::InvalidArgument(
            "an iterated commutator needs at least two entries".into(),
        ));
    }
    let mut it = leaves.iter().cloned().map(Leaf);
    let first = it.next().unwrap();
    Ok(it.fold(first, CommutatorExpr::comm))
}

/// Iterated commutator of already-built expressions.
pub fn iterated_exprs(entries: Vec<CommutatorExpr>) -> Result<CommutatorExpr> {
    if entries.len() < 2 {
        return Err(Error::InvalidArgument(
            "an iterated commutator needs at least two entries".into(),
        ));
    }
    let mut it = entries.into_iter();
    let first = it.next().unwrap();
    Ok(it.fold(first, CommutatorExpr::comm))
}

// ---------------------------------------------------------------------------
// printing

impl fmt::Display for CommutatorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

pub fn print(e: &CommutatorExpr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn write_expr(e: &CommutatorExpr, out: &mut String) {
    match e {
        Leaf(w) => write_literals(w, out),
        Prod(fs) => {
            let mut first = true;
            for f in fs {
                let start = out.len();
                if !first {
                    out.push(' ');
                }
                let body = out.len();
                write_factor(f, out);
                if out.len() == body {
                    // nothing printed (identity leaf); drop the separator
                    out.truncate(start);
                } else {
                    first = false;
                }
            }
        }
        _ => write_factor(e, out),
    }
}

fn write_factor(e: &CommutatorExpr, out: &mut String) {
    match e {
        Leaf(w) => write_literals(w, out),
        Comm(a, b) => {
            out.push('[');
            write_expr(a, out);
            out.push_str(", ");
            write_expr(b, out);
            out.push(']');
        }
        Conj(base, by) => {
            write_atom(base, out);
            out.push_str("^(");
            write_expr(by, out);
            out.push(')');
        }
        Inv(a) => {
            write_atom(a, out);
            out.push_str("^-1");
        }
        Prod(_) => {
            out.push('(');
            write_expr(e, out);
            out.push(')');
        }
    }
}

fn write_atom(e: &CommutatorExpr, out: &mut String) {
    match e {
        Leaf(w) if runs(w).len() == 1 => write_literals(w, out),
        Comm(..) => write_factor(e, out),
        _ => {
            out.push('(');
            write_expr(e, out);
            out.push(')');
        }
    }
}

fn runs(w: &Word) -> Vec<(i32, usize)> {
    let mut runs: Vec<(i32, usize)> = Vec::new();
    for &l in w.letters() {
        match runs.last_mut() {
            Some((g, k)) if *g == l => *k += 1,
            _ => runs.push((l, 1)),
        }
    }
    runs
}

fn write_literals(w: &Word, out: &mut String) {
    for (i, (g, k)) in runs(w).into_iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push('x');
        out.push_str(&g.unsigned_abs().to_string());
        let exp = if g < 0 { -(k as i64) } else { k as i64 };
        if exp != 1 {
            out.push('^');
            out.push_str(&exp.to_string());
        }
    }
}

// ---------------------------------------------------------------------------
// parsing

pub fn parse(text: &str) -> Result<CommutatorExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(match p.src[p.pos] {
            b']' | b')' => Error::Unbalanced { pos: p.pos },
            c => Error::Syntax {
                pos: p.pos,
                msg: format!("unexpected `{}`", c as char),
            },
        });
    }
    Ok(e)
}

/// Parses `text` and expands it in the free group of the given rank.
pub fn expand_text(text: &str, rank: Rank) -> Result<Word> {
    parse(text)?.expand(rank)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

const MAX_NESTING: usize = 256;

enum Factor {
    Literal(Word),
    Other(CommutatorExpr),
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8, open: usize) -> Result<()> {
        match self.peek() {
            Some(got) if got == c => {
                self.pos += 1;
                Ok(())
            }
            Some(b']' | b')') | None => Err(Error::Unbalanced { pos: open }),
            Some(got) => Err(Error::Syntax {
                pos: self.pos,
                msg: format!("expected `{}`, found `{}`", c as char, got as char),
            }),
        }
    }

    fn expr(&mut self) -> Result<CommutatorExpr> {
        let mut out = Vec::new();
        let mut run: Option<Word> = None;
        while let Some(c) = self.peek() {
            if matches!(c, b',' | b']' | b')') {
                break;
            }
            // parenthesized literals such as `(x1 x2)` join the surrounding run
            let literal = match self.factor()? {
                Factor::Literal(w) => Ok(w),
                Factor::Other(e) => literal_word(&e).ok_or(e),
            };
            match literal {
                Ok(w) => run = Some(run.take().unwrap_or_default().multiply(&w)),
                Err(e) => {
                    flush_run(&mut run, &mut out);
                    out.push(e);
                }
            }
        }
        flush_run(&mut run, &mut out);
        Ok(CommutatorExpr::product(out))
    }

    fn factor(&mut self) -> Result<Factor> {
        let start = self.pos;
        let mut node = match self.peek() {
            Some(b'x' | b'y' | b'z' | b'p') => {
                let w = self.literal()?;
                if self.peek() != Some(b'^') {
                    return Ok(Factor::Literal(w));
                }
                leaf_node(w)
            }
            Some(b'a'..=b'z' | b'A'..=b'Z') => return Err(self.unknown_name()),
            _ => self.atom()?,
        };
        while self.peek() == Some(b'^') {
            self.pos += 1;
            if self.peek() == Some(b'-') {
                self.pos += 1;
                let at = self.pos;
                match self.integer()? {
                    1 => node = CommutatorExpr::inv(node),
                    _ => {
                        return Err(Error::Syntax {
                            pos: at,
                            msg: "only ^-1 may follow a non-literal factor".into(),
                        })
                    }
                }
            } else {
                let by = self.atom()?;
                node = CommutatorExpr::conj(node, by);
            }
        }
        debug_assert!(self.pos > start);
        Ok(Factor::Other(node))
    }

    fn atom(&mut self) -> Result<CommutatorExpr> {
        let open = self.pos;
        match self.peek() {
            Some(b'[') => {
                self.pos += 1;
                self.enter(open)?;
                let a = self.expr()?;
                self.expect(b',', open)?;
                let b = self.expr()?;
                self.expect(b']', open)?;
                self.depth -= 1;
                Ok(CommutatorExpr::comm(a, b))
            }
            Some(b'(') => {
                self.pos += 1;
                self.enter(open)?;
                let e = self.expr()?;
                self.expect(b')', open)?;
                self.depth -= 1;
                Ok(e)
            }
            Some(b'x' | b'y' | b'z' | b'p') => Ok(leaf_node(self.literal()?)),
            Some(b'a'..=b'z' | b'A'..=b'Z') => Err(self.unknown_name()),
            Some(b']' | b')') => Err(Error::Unbalanced { pos: self.pos }),
            Some(c) => Err(Error::Syntax {
                pos: self.pos,
                msg: format!("unexpected `{}`", c as char),
            }),
            None => Err(Error::Syntax {
                pos: self.pos,
                msg: "unexpected end of input".into(),
            }),
        }
    }

    fn enter(&mut self, pos: usize) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(Error::Syntax {
                pos,
                msg: "nesting too deep".into(),
            });
        }
        Ok(())
    }

    fn name(&mut self) -> (usize, String) {
        self.skip_ws();
        let start = self.pos;
        let at = |i: usize| self.src.get(i).copied();
        let end = match (at(start), at(start + 1)) {
            // `x` plus digits, or a lone alias letter so that `xyz` reads as three names
            (Some(b'x'), Some(d)) if d.is_ascii_digit() => {
                let mut end = start + 1;
                while at(end).is_some_and(|c| c.is_ascii_digit()) {
                    end += 1;
                }
                end
            }
            (Some(b'x' | b'y' | b'z' | b'p'), _) => start + 1,
            _ => {
                let mut end = start;
                while at(end).is_some_and(|c| c.is_ascii_alphanumeric()) {
                    end += 1;
                }
                end
            }
        };
        self.pos = end;
        (start, String::from_utf8_lossy(&self.src[start..end]).into_owned())
    }

    fn unknown_name(&mut self) -> Error {
        let (pos, name) = self.name();
        Error::UnknownGenerator { name, pos }
    }

    /// A generator name with an optional integer exponent.
    fn literal(&mut self) -> Result<Word> {
        let (pos, name) = self.name();
        let gen: i32 = match name.as_str() {
            "x" => 1,
            "y" => 2,
            "z" => 3,
            "p" => 4,
            _ => match name.strip_prefix('x').map(str::parse::<i32>) {
                Some(Ok(k)) if k >= 1 && name[1..].bytes().all(|b| b.is_ascii_digit()) => k,
                _ => return Err(Error::UnknownGenerator { name, pos }),
            },
        };
        let save = self.pos;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let negative = self.peek() == Some(b'-');
            if negative {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let k = self.integer()? as i64;
                return Ok(Word::generator(gen).pow(if negative { -k } else { k }));
            }
            if negative {
                return Err(Error::Syntax {
                    pos: self.pos,
                    msg: "expected an exponent".into(),
                });
            }
            // `^` introduces a conjugator; leave it to the caller
            self.pos = save;
        }
        Ok(Word::generator(gen))
    }

    fn integer(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Syntax {
                pos: start,
                msg: "expected an integer".into(),
            })
    }
}
