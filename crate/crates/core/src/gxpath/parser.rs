//! Recursive-descent parser for the textual query syntax.
//!
//! Path level, loosest first: `+` union, `&` intersection, `/` concatenation,
//! prefix `!` complement, postfix `*` and `{n,m}`. Atoms: `eps`, `_`, a label,
//! `label^-`, `[node]`, `(path)`.
//!
//! Node level, loosest first: `|` or, `&` and, prefix `not` (or `!`). Atoms:
//! `=c`, `!=c`, `<path>`, `<path = path>`, `<path != path>`, `(node)`.
//!
//! Labels and constants are bare identifiers or double-quoted strings.

use super::ast::{is_ident_char, is_ident_start, Expr, NodeExpr, PathExpr};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Quoted(String),
    Eps,
    NotKw,
    Wild,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    LBrace,
    RBrace,
    Comma,
    Slash,
    Plus,
    Amp,
    Bar,
    Bang,
    BangEq,
    Eq,
    Star,
    Inverse,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(s) => format!("`{s}`"),
        Tok::Quoted(s) => format!("\"{s}\""),
        other => format!("{other:?}"),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, message: String| Error::Syntax { pos, message };
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '<' => Some(Tok::LAngle),
            '>' => Some(Tok::RAngle),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '/' => Some(Tok::Slash),
            '+' => Some(Tok::Plus),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            '=' => Some(Tok::Eq),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, pos));
            i += 1;
            continue;
        }
        match c {
            '!' => {
                if chars.get(i + 1).is_some_and(|&(_, d)| d == '=') {
                    out.push((Tok::BangEq, pos));
                    i += 2;
                } else {
                    out.push((Tok::Bang, pos));
                    i += 1;
                }
            }
            '^' => {
                let mut j = i + 1;
                while chars.get(j).is_some_and(|&(_, d)| d.is_whitespace()) {
                    j += 1;
                }
                if chars.get(j).is_some_and(|&(_, d)| d == '-') {
                    out.push((Tok::Inverse, pos));
                    i = j + 1;
                } else {
                    return Err(err(pos, "expected `-` after `^`".into()));
                }
            }
            '"' => {
                let mut s = String::new();
                let mut j = i + 1;
                loop {
                    match chars.get(j) {
                        None => return Err(err(pos, "unterminated string".into())),
                        Some(&(_, '"')) => break,
                        Some(&(_, '\\')) => match chars.get(j + 1) {
                            Some(&(_, e)) => {
                                s.push(e);
                                j += 2;
                            }
                            None => return Err(err(pos, "unterminated string".into())),
                        },
                        Some(&(_, d)) => {
                            s.push(d);
                            j += 1;
                        }
                    }
                }
                out.push((Tok::Quoted(s), pos));
                i = j + 1;
            }
            '_' if !chars.get(i + 1).is_some_and(|&(_, d)| is_ident_char(d)) => {
                out.push((Tok::Wild, pos));
                i += 1;
            }
            c if is_ident_start(c) => {
                let mut s = String::new();
                let mut prev = ' ';
                let mut j = i;
                while let Some(&(_, d)) = chars.get(j) {
                    let ok = is_ident_char(d) || ((d == '+' || d == '-') && prev == '_');
                    if !ok {
                        break;
                    }
                    s.push(d);
                    prev = d;
                    j += 1;
                }
                let tok = match s.as_str() {
                    "eps" => Tok::Eps,
                    "not" => Tok::NotKw,
                    _ => Tok::Name(s),
                };
                out.push((tok, pos));
                i = j;
            }
            other => return Err(err(pos, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |&(_, p)| p)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            pos: self.pos(),
            message: message.into(),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<()> {
        if self.eat(t) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => {
                    let found = describe(found);
                    self.fail(format!("expected {what}, found {found}"))
                }
                None => self.fail(format!("expected {what}, found end of input")),
            }
        }
    }

    fn name(&mut self) -> Option<String> {
        match self.peek() {
            Some(Tok::Name(s)) | Some(Tok::Quoted(s)) => {
                let s = s.clone();
                self.at += 1;
                Some(s)
            }
            _ => None,
        }
    }

    fn number(&mut self) -> Result<u32> {
        match self.peek() {
            Some(Tok::Name(s)) if s.chars().all(|c| c.is_ascii_digit()) => {
                let v = s.parse::<u32>();
                match v {
                    Ok(v) => {
                        self.at += 1;
                        Ok(v)
                    }
                    Err(_) => self.fail("repetition bound too large"),
                }
            }
            _ => self.fail("expected a repetition bound"),
        }
    }

    fn path(&mut self) -> Result<PathExpr> {
        let mut left = self.path_inter()?;
        while self.eat(&Tok::Plus) {
            let right = self.path_inter()?;
            left = PathExpr::Union(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn path_inter(&mut self) -> Result<PathExpr> {
        let mut left = self.path_concat()?;
        while self.eat(&Tok::Amp) {
            let right = self.path_concat()?;
            left = PathExpr::Intersect(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn path_concat(&mut self) -> Result<PathExpr> {
        let mut left = self.path_complement()?;
        while self.eat(&Tok::Slash) {
            let right = self.path_complement()?;
            left = PathExpr::Concat(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn path_complement(&mut self) -> Result<PathExpr> {
        if self.eat(&Tok::Bang) {
            return Ok(PathExpr::Complement(Box::new(self.path_complement()?)));
        }
        self.path_postfix()
    }

    fn path_postfix(&mut self) -> Result<PathExpr> {
        let mut e = self.path_atom()?;
        loop {
            if self.eat(&Tok::Star) {
                e = PathExpr::Star(Box::new(e));
            } else if self.peek() == Some(&Tok::LBrace) {
                self.at += 1;
                let n = self.number()?;
                self.expect(&Tok::Comma, "`,`")?;
                let m = self.number()?;
                self.expect(&Tok::RBrace, "`}`")?;
                if n > m {
                    return Err(Error::InvalidRepeat { n, m });
                }
                e = PathExpr::Repeat(Box::new(e), n, m);
            } else {
                return Ok(e);
            }
        }
    }

    fn path_atom(&mut self) -> Result<PathExpr> {
        if self.eat(&Tok::Eps) {
            return Ok(PathExpr::Epsilon);
        }
        if self.eat(&Tok::Wild) {
            return Ok(PathExpr::Wildcard);
        }
        if let Some(l) = self.name() {
            if self.eat(&Tok::Inverse) {
                return Ok(PathExpr::InverseLabel(l));
            }
            return Ok(PathExpr::Label(l));
        }
        if self.eat(&Tok::LBrack) {
            let n = self.node()?;
            self.expect(&Tok::RBrack, "`]`")?;
            return Ok(PathExpr::Test(Box::new(n)));
        }
        if self.eat(&Tok::LParen) {
            let p = self.path()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(p);
        }
        self.fail("expected a path expression")
    }

    fn node(&mut self) -> Result<NodeExpr> {
        let mut left = self.node_and()?;
        while self.eat(&Tok::Bar) {
            let right = self.node_and()?;
            left = NodeExpr::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn node_and(&mut self) -> Result<NodeExpr> {
        let mut left = self.node_not()?;
        while self.eat(&Tok::Amp) {
            let right = self.node_not()?;
            left = NodeExpr::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn node_not(&mut self) -> Result<NodeExpr> {
        if self.eat(&Tok::NotKw) || self.eat(&Tok::Bang) {
            return Ok(NodeExpr::Not(Box::new(self.node_not()?)));
        }
        self.node_atom()
    }

    fn node_atom(&mut self) -> Result<NodeExpr> {
        if self.eat(&Tok::Eq) {
            return match self.name() {
                Some(c) => Ok(NodeExpr::DataEq(c)),
                None => self.fail("expected a data constant after `=`"),
            };
        }
        if self.eat(&Tok::BangEq) {
            return match self.name() {
                Some(c) => Ok(NodeExpr::DataNeq(c)),
                None => self.fail("expected a data constant after `!=`"),
            };
        }
        if self.eat(&Tok::LAngle) {
            let p = self.path()?;
            let out = if self.eat(&Tok::Eq) {
                NodeExpr::PathEq(Box::new(p), Box::new(self.path()?))
            } else if self.eat(&Tok::BangEq) {
                NodeExpr::PathNeq(Box::new(p), Box::new(self.path()?))
            } else {
                NodeExpr::Exists(Box::new(p))
            };
            self.expect(&Tok::RAngle, "`>`")?;
            return Ok(out);
        }
        if self.eat(&Tok::LParen) {
            let n = self.node()?;
            self.expect(&Tok::RParen, "`)`")?;
            return Ok(n);
        }
        self.fail("expected a node expression")
    }

    fn finish(&self) -> Result<()> {
        if self.at < self.toks.len() {
            let found = describe(&self.toks[self.at].0);
            self.fail(format!("unexpected trailing {found}"))
        } else {
            Ok(())
        }
    }
}

fn parser(text: &str) -> Result<Parser> {
    Ok(Parser {
        toks: lex(text)?,
        at: 0,
        end: text.len(),
    })
}

pub fn parse_path(text: &str) -> Result<PathExpr> {
    let mut p = parser(text)?;
    let e = p.path()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_node(text: &str) -> Result<NodeExpr> {
    let mut p = parser(text)?;
    let e = p.node()?;
    p.finish()?;
    Ok(e)
}

/// Parses either a node or a path expression. The two atom sets are
/// disjoint, so at most one reading succeeds; on failure the error that got
/// further into the input is reported.
pub fn parse_query(text: &str) -> Result<Expr> {
    let as_node = parse_node(text);
    if let Ok(n) = as_node {
        return Ok(Expr::Node(n));
    }
    let as_path = parse_path(text);
    match (as_node, as_path) {
        (_, Ok(p)) => Ok(Expr::Path(p)),
        (Err(a), Err(b)) => {
            let pos = |e: &Error| match e {
                Error::Syntax { pos, .. } => *pos,
                _ => usize::MAX,
            };
            Err(if pos(&a) > pos(&b) { a } else { b })
        }
        (Ok(_), _) => unreachable!(),
    }
}
