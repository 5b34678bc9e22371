//! Text and JSON forms of group-ring elements.
//!
//! Text grammar: terms such as `-3/2 * x1^(1/2) * x3^2` joined by `+` or `-`.
//! Variables are `x1, x2, …`; an exponent is an integer or a parenthesised
//! rational. Lines starting with `#` are comments. The ambient dimension is
//! the largest variable index unless a larger one is requested.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::element::GroupRingElement;
use super::exponent::Exponent;
use super::GroupRingError;
use crate::exact::rat::{fmt_rat, parse_rat, Rat};

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tok {
    Num,
    Var,
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    LParen,
    RParen,
}

#[derive(Clone, Debug)]
struct Token {
    kind: Tok,
    text: String,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, GroupRingError> {
    let mut out = Vec::new();
    for (li, raw) in src.lines().enumerate() {
        let line = li + 1;
        let chars: Vec<char> = raw.chars().collect();
        if raw.trim_start().starts_with('#') {
            continue;
        }
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let single = |kind| Token { kind, text: c.to_string(), line, col };
            match c {
                ' ' | '\t' | '\r' => {}
                '+' => out.push(single(Tok::Plus)),
                '-' | '\u{2212}' => out.push(single(Tok::Minus)),
                '*' => out.push(single(Tok::Star)),
                '^' => out.push(single(Tok::Caret)),
                '/' => out.push(single(Tok::Slash)),
                '(' => out.push(single(Tok::LParen)),
                ')' => out.push(single(Tok::RParen)),
                '0'..='9' | '.' => {
                    let start = i;
                    while i + 1 < chars.len() && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '.') {
                        i += 1;
                    }
                    let text: String = chars[start..=i].iter().collect();
                    out.push(Token { kind: Tok::Num, text, line, col });
                }
                'x' => {
                    let start = i;
                    while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                        i += 1;
                    }
                    if i == start {
                        return Err(GroupRingError::parse(line, col, "expected variable index after `x`"));
                    }
                    let text: String = chars[start + 1..=i].iter().collect();
                    out.push(Token { kind: Tok::Var, text, line, col });
                }
                _ => return Err(GroupRingError::parse(line, col, format!("unexpected character `{c}`"))),
            }
            i += 1;
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.kind)
    }

    fn err_here(&self, msg: impl Into<String>) -> GroupRingError {
        let (line, col) = self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col));
        GroupRingError::parse(line, col, msg)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, kind: Tok, what: &str) -> Result<Token, GroupRingError> {
        if self.peek() == Some(kind) {
            Ok(self.next().unwrap())
        } else {
            Err(self.err_here(format!("expected {what}")))
        }
    }

    fn number(&mut self) -> Result<Rat, GroupRingError> {
        let t = self.expect(Tok::Num, "a number")?;
        parse_rat(&t.text).map_err(|_| GroupRingError::parse(t.line, t.col, format!("bad number `{}`", t.text)))
    }

    /// `p`, `p/q`, `(p/q)` or a parenthesised signed variant.
    fn coefficient(&mut self) -> Result<Rat, GroupRingError> {
        if self.peek() == Some(Tok::LParen) {
            self.next();
            let neg = self.eat_sign();
            let mut v = self.number()?;
            if self.peek() == Some(Tok::Slash) {
                self.next();
                v = self.divide(v)?;
            }
            self.expect(Tok::RParen, "`)`")?;
            return Ok(if neg { -v } else { v });
        }
        let v = self.number()?;
        if self.peek() == Some(Tok::Slash) {
            self.next();
            return self.divide(v);
        }
        Ok(v)
    }

    fn divide(&mut self, v: Rat) -> Result<Rat, GroupRingError> {
        let here = self.err_here("division by zero");
        let d = self.number()?;
        if d.is_zero() {
            return Err(here);
        }
        Ok(v / d)
    }

    fn eat_sign(&mut self) -> bool {
        match self.peek() {
            Some(Tok::Minus) => {
                self.next();
                true
            }
            Some(Tok::Plus) => {
                self.next();
                false
            }
            _ => false,
        }
    }

    fn exponent(&mut self) -> Result<Rat, GroupRingError> {
        if self.peek() == Some(Tok::LParen) {
            return self.coefficient();
        }
        let neg = self.eat_sign();
        let t = self.expect(Tok::Num, "an exponent")?;
        let v: BigInt = t
            .text
            .parse()
            .map_err(|_| GroupRingError::parse(t.line, t.col, "bare exponents must be integers; use ^(p/q)"))?;
        let v = Rat::from_integer(v);
        Ok(if neg { -v } else { v })
    }

    /// One product of factors; returns the coefficient and variable powers.
    fn term(&mut self) -> Result<(Rat, Vec<(usize, Rat)>), GroupRingError> {
        let mut coeff = Rat::one();
        let mut vars = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Num) | Some(Tok::LParen) => coeff *= self.coefficient()?,
                Some(Tok::Var) => {
                    let t = self.next().unwrap();
                    let idx: usize = t.text.parse().unwrap_or(0);
                    if idx == 0 {
                        return Err(GroupRingError::parse(t.line, t.col, "variables are numbered from x1"));
                    }
                    let mut e = Rat::one();
                    if self.peek() == Some(Tok::Caret) {
                        self.next();
                        e = self.exponent()?;
                    }
                    vars.push((idx - 1, e));
                }
                _ => return Err(self.err_here("expected a coefficient or variable")),
            }
            if self.peek() == Some(Tok::Star) {
                self.next();
            } else {
                break;
            }
        }
        Ok((coeff, vars))
    }
}

/// Parses the text form. `min_dim` raises the ambient dimension above the
/// largest variable index used.
pub fn parse_element(src: &str, min_dim: Option<usize>) -> Result<GroupRingElement, GroupRingError> {
    let toks = lex(src)?;
    let last_line = src.lines().count().max(1);
    let last_col = src.lines().last().map_or(1, |l| l.chars().count() + 1);
    let mut p = Parser { toks, pos: 0, end: (last_line, last_col) };
    if p.toks.is_empty() {
        return Err(GroupRingError::parse(1, 1, "empty polynomial"));
    }
    let mut raw = Vec::new();
    let mut first = true;
    while p.peek().is_some() {
        let neg = match p.peek() {
            Some(Tok::Plus) => {
                p.next();
                false
            }
            Some(Tok::Minus) => {
                p.next();
                true
            }
            _ if first => false,
            _ => return Err(p.err_here("expected `+` or `-` between terms")),
        };
        first = false;
        let (c, vars) = p.term()?;
        raw.push((if neg { -c } else { c }, vars));
    }
    let n = raw
        .iter()
        .flat_map(|(_, v)| v.iter().map(|(i, _)| i + 1))
        .max()
        .unwrap_or(0)
        .max(min_dim.unwrap_or(0));
    let mut out = GroupRingElement::zero(n);
    for (c, vars) in raw {
        let mut e = Exponent::zero(n);
        for (i, a) in vars {
            e.0[i] += a;
        }
        out.add_term(e, c);
    }
    Ok(out)
}

fn fmt_exponent(a: &Rat) -> String {
    if a.is_integer() && !a.is_negative() {
        a.numer().to_string()
    } else {
        format!("({})", fmt_rat(a))
    }
}

impl fmt::Display for GroupRingElement {
    /// Terms in decreasing lex order of exponents.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms().collect::<Vec<_>>().into_iter().rev().enumerate() {
            let mag = c.abs();
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut factors = Vec::new();
            if !mag.is_one() || e.is_zero() {
                factors.push(fmt_rat(&mag));
            }
            for (i, a) in e.coords().iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                if a.is_one() {
                    factors.push(format!("x{}", i + 1));
                } else {
                    factors.push(format!("x{}^{}", i + 1, fmt_exponent(a)));
                }
            }
            write!(f, "{}", factors.join(" * "))?;
        }
        Ok(())
    }
}

/// JSON term-list form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: String,
    pub exp: Vec<ExpEntry>,
}

/// An exponent coordinate: `["p","q"]`, `"p/q"` or a bare integer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExpEntry {
    Pair([String; 2]),
    Text(String),
    Int(i64),
}

impl ExpEntry {
    fn value(&self) -> Option<Rat> {
        match self {
            ExpEntry::Pair([p, q]) => parse_rat(&format!("{p}/{q}")).ok(),
            ExpEntry::Text(s) => parse_rat(s).ok(),
            ExpEntry::Int(v) => Some(Rat::from_integer(BigInt::from(*v))),
        }
    }
}

impl GroupRingElement {
    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            n: self.dim(),
            terms: self
                .terms()
                .map(|(e, c)| TermJson {
                    coeff: fmt_rat(c),
                    exp: e.coords().iter().map(|a| ExpEntry::Pair([a.numer().to_string(), a.denom().to_string()])).collect(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &ElementJson) -> Result<Self, GroupRingError> {
        let mut out = GroupRingElement::zero(j.n);
        for (k, t) in j.terms.iter().enumerate() {
            let bad = |msg: String| GroupRingError::Json(format!("term {k}: {msg}"));
            let c = parse_rat(&t.coeff).map_err(|e| bad(e.to_string()))?;
            if t.exp.len() != j.n {
                return Err(bad(format!("exponent has {} coordinates, expected {}", t.exp.len(), j.n)));
            }
            let coords = t
                .exp
                .iter()
                .map(|x| x.value().ok_or_else(|| bad(format!("bad exponent entry {x:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            out.add_term(Exponent(coords), c);
        }
        Ok(out)
    }
}

/// Accepts either the JSON term list or the text grammar, chosen by the first
/// non-blank character.
pub fn parse_any(src: &str) -> Result<GroupRingElement, GroupRingError> {
    if src.trim_start().starts_with('{') {
        let j: ElementJson = serde_json::from_str(src).map_err(|e| GroupRingError::Json(e.to_string()))?;
        GroupRingElement::from_json(&j)
    } else {
        parse_element(src, None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::{int, rat};

    #[test]
    fn parses_motzkin() {
        let m = parse_element("x3^6 - 3*x1^2*x2^2*x3^2 + x1^2*x2^4 + x1^4*x2^2", None).unwrap();
        assert_eq!(m.dim(), 3);
        assert_eq!(m.len(), 4);
        assert_eq!(m.coeff(&Exponent::from_ints(&[2, 2, 2])), int(-3));
    }

    #[test]
    fn fractional_exponents_and_coefficients() {
        let p = parse_element("-3/2 * x1^(1/2) * x2^2 + (1/3) + 0.5*x2^(-1)", None).unwrap();
        assert_eq!(p.coeff(&Exponent(vec![rat(1, 2), int(2)])), rat(-3, 2));
        assert_eq!(p.coeff(&Exponent::zero(2)), rat(1, 3));
        assert_eq!(p.coeff(&Exponent(vec![int(0), int(-1)])), rat(1, 2));
    }

    #[test]
    fn display_roundtrip() {
        let src = "2*x1^(1/3)*x2 - x2^(-2) + 5 - 7/4*x1^3";
        let p = parse_element(src, None).unwrap();
        let shown = p.to_string();
        assert_eq!(parse_element(&shown, Some(2)).unwrap(), p);
        assert_eq!(shown, "-7/4 * x1^3 + 2 * x1^(1/3) * x2 + 5 - x2^(-2)");
    }

    #[test]
    fn error_positions() {
        let e = parse_element("x1 +\n  3 * * x2", None).unwrap_err();
        assert_eq!(e, GroupRingError::parse(2, 7, "expected a coefficient or variable"));
        let e = parse_element("x1 $ x2", None).unwrap_err();
        assert!(matches!(e, GroupRingError::Parse { line: 1, col: 4, .. }));
        assert!(parse_element("x1^1.5", None).is_err());
        assert!(parse_element("x1 x2", None).is_err());
        assert!(parse_element("", None).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let p = parse_element("x1^(1/2) - 4*x2", None).unwrap();
        let j = serde_json::to_string(&p.to_json()).unwrap();
        assert_eq!(j, r#"{"n":2,"terms":[{"coeff":"-4","exp":[["0","1"],["1","1"]]},{"coeff":"1","exp":[["1","2"],["0","1"]]}]}"#);
        assert_eq!(parse_any(&j).unwrap(), p);
        let alt = r#"{"n":2,"terms":[{"coeff":"1","exp":["1/2",0]},{"coeff":"-4","exp":[0,1]}]}"#;
        assert_eq!(parse_any(alt).unwrap(), p);
    }
}
