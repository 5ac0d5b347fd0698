//! Text syntax for polynomials, maps and words.
//!
//! ```text
//! poly   := ('+'|'-')? term (('+'|'-') term)*
//! term   := item ('*'? item)*
//! item   := nat ('/' nat)? | factor
//! factor := ('x'|'y'|'z') ('^' nat)? | '(' poly ')' ('^' nat)?
//! map    := '(' poly ',' poly ',' poly ')'
//! word   := atom (';' atom)*
//! atom   := 'pi' | 'beta' | 'beta_inv' | 'theta' '(' nat ')' | map
//! ```
//!
//! Literals are mapped into the active field; a denominator that vanishes
//! there is an error. Errors carry 1-based line and column.

use std::fmt;

use num_bigint::BigInt;

use crate::affine::AffineMap;
use crate::certify::AlternatingWord;
use crate::endomorphism::Endomorphism;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::poly::Polynomial;
use crate::word::{Atom, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn position(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |p| before[p + 1..].chars().count()) + 1;
    (line, column)
}

fn error_at(text: &str, offset: usize, message: impl Into<String>) -> Error {
    let (line, column) = position(text, offset);
    Error::Parse { line, column, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_ascii_digit() {
            let mut end = offset;
            while let Some(&(i, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            let n = text[offset..end].parse().expect("ascii digits");
            out.push(Token { tok: Tok::Num(n), offset });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut end = offset;
            while let Some(&(i, d)) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                end = i + d.len_utf8();
                chars.next();
            }
            out.push(Token { tok: Tok::Ident(text[offset..end].to_string()), offset });
        } else if "+-*/^(),;".contains(c) {
            out.push(Token { tok: Tok::Sym(c), offset });
            chars.next();
        } else {
            return Err(error_at(text, offset, format!("unexpected character `{c}`")));
        }
    }
    out.push(Token { tok: Tok::End, offset: text.len() });
    Ok(out)
}

/// A parsed input: the shape is decided by the text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SourceExpression<K: Field> {
    Polynomial(Polynomial<K>),
    Map(Endomorphism<K>),
    Word(Word<K>),
}

impl<K: Field> SourceExpression<K> {
    pub fn kind(&self) -> &'static str {
        match self {
            SourceExpression::Polynomial(_) => "polynomial",
            SourceExpression::Map(_) => "map",
            SourceExpression::Word(_) => "word",
        }
    }

    /// The expression as a word; a polynomial is rejected.
    pub fn into_word(self) -> Result<Word<K>> {
        match self {
            SourceExpression::Word(w) => Ok(w),
            SourceExpression::Map(m) => {
                let f = m.field().clone();
                Ok(Word::atom(&f, map_atom(m)))
            }
            SourceExpression::Polynomial(p) => Err(Error::InvalidParameter(format!("expected a map or word, got {p}"))),
        }
    }

    pub fn into_map(self) -> Result<Endomorphism<K>> {
        match self {
            SourceExpression::Map(m) => Ok(m),
            SourceExpression::Word(w) => w.to_endomorphism(crate::poly::Budget::UNLIMITED),
            SourceExpression::Polynomial(p) => Err(Error::InvalidParameter(format!("expected a map, got {p}"))),
        }
    }

    pub fn into_polynomial(self) -> Result<Polynomial<K>> {
        match self {
            SourceExpression::Polynomial(p) => Ok(p),
            other => Err(Error::InvalidParameter(format!("expected a polynomial, got a {}", other.kind()))),
        }
    }
}

impl<K: Field> fmt::Display for SourceExpression<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceExpression::Polynomial(p) => write!(f, "{p}"),
            SourceExpression::Map(m) => write!(f, "{m}"),
            SourceExpression::Word(w) => write!(f, "{w}"),
        }
    }
}

/// Affine maps become [`Atom::Affine`]; anything else stays explicit.
fn map_atom<K: Field>(m: Endomorphism<K>) -> Atom<K> {
    match AffineMap::from_endomorphism(&m) {
        Ok(a) => Atom::Affine(a),
        Err(_) => Atom::Raw(m),
    }
}

struct Parser<'a, K: Field> {
    field: &'a K,
    text: &'a str,
    tokens: Vec<Token>,
    pos: usize,
}

impl<'a, K: Field> Parser<'a, K> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].offset
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> Error {
        error_at(self.text, self.offset(), message)
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Num(n) => format!("`{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::End => "end of input".into(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`, found {}", self.describe())))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u32> {
        let offset = self.offset();
        match self.bump() {
            Tok::Num(n) => u32::try_from(n).map_err(|_| error_at(self.text, offset, "exponent too large")),
            _ => Err(error_at(self.text, offset, "expected a natural number")),
        }
    }

    fn exponent(&mut self, base: Polynomial<K>) -> Result<Polynomial<K>> {
        if self.eat('^') {
            let offset = self.offset();
            let e = self.nat()?;
            base.pow(e).map_err(|e| error_at(self.text, offset, e.to_string()))
        } else {
            Ok(base)
        }
    }

    fn poly(&mut self) -> Result<Polynomial<K>> {
        let mut negate = false;
        if self.eat('-') {
            negate = true;
        } else {
            self.eat('+');
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn starts_item(&self) -> bool {
        match self.peek() {
            Tok::Num(_) | Tok::Ident(_) => true,
            Tok::Sym(c) => *c == '(',
            Tok::End => false,
        }
    }

    fn term(&mut self) -> Result<Polynomial<K>> {
        let mut acc = self.item()?;
        loop {
            if self.eat('*') || self.starts_item() {
                acc = &acc * &self.item()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn item(&mut self) -> Result<Polynomial<K>> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                let value = if self.eat('/') {
                    let den_offset = self.offset();
                    let Tok::Num(d) = self.bump() else {
                        return Err(error_at(self.text, den_offset, "expected a denominator"));
                    };
                    self.field.from_ratio(&n, &d).ok_or_else(|| {
                        error_at(self.text, den_offset, format!("{d} is not invertible in {}", self.field.spec()))
                    })?
                } else {
                    self.field.from_bigint(&n)
                };
                self.exponent(Polynomial::constant(self.field, value))
            }
            Tok::Ident(name) => {
                self.bump();
                let v = match name.as_str() {
                    "x" => Polynomial::x(self.field),
                    "y" => Polynomial::y(self.field),
                    "z" => Polynomial::z(self.field),
                    _ => return Err(error_at(self.text, offset, format!("unknown identifier `{name}`"))),
                };
                self.exponent(v)
            }
            Tok::Sym('(') => {
                self.bump();
                let inner = self.poly()?;
                self.expect(')')?;
                self.exponent(inner)
            }
            _ => Err(self.err(format!("expected a term, found {}", self.describe()))),
        }
    }

    /// After an opening parenthesis has been consumed.
    fn map_rest(&mut self, first: Polynomial<K>) -> Result<Endomorphism<K>> {
        self.expect(',')?;
        let second = self.poly()?;
        self.expect(',')?;
        let third = self.poly()?;
        self.expect(')')?;
        Ok(Endomorphism::new([first, second, third]))
    }

    fn atom(&mut self) -> Result<Vec<Atom<K>>> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "pi" => Ok(vec![Atom::Pi]),
                    "beta" => Ok(vec![Atom::Beta]),
                    "beta_inv" => Ok(vec![Atom::BetaInv]),
                    "theta" => {
                        self.expect('(')?;
                        let n = self.nat()?;
                        self.expect(')')?;
                        Ok(Word::theta(self.field, n as usize).atoms().to_vec())
                    }
                    _ => Err(error_at(self.text, offset, format!("unknown atom `{name}`"))),
                }
            }
            Tok::Sym('(') => {
                self.bump();
                let first = self.poly()?;
                Ok(vec![map_atom(self.map_rest(first)?)])
            }
            _ => Err(self.err(format!("expected an atom, found {}", self.describe()))),
        }
    }

    fn word_rest(&mut self, mut atoms: Vec<Atom<K>>) -> Result<Word<K>> {
        while self.eat(';') {
            atoms.extend(self.atom()?);
        }
        Ok(Word::new(self.field, atoms))
    }

    fn expression(&mut self) -> Result<SourceExpression<K>> {
        let is_word_ident =
            matches!(self.peek(), Tok::Ident(s) if matches!(s.as_str(), "pi" | "beta" | "beta_inv" | "theta"));
        let expr = if is_word_ident {
            let first = self.atom()?;
            SourceExpression::Word(self.word_rest(first)?)
        } else if *self.peek() == Tok::Sym('(') {
            let save = self.pos;
            self.bump();
            let first = self.poly()?;
            if *self.peek() == Tok::Sym(',') {
                let m = self.map_rest(first)?;
                if *self.peek() == Tok::Sym(';') {
                    SourceExpression::Word(self.word_rest(vec![map_atom(m)])?)
                } else {
                    SourceExpression::Map(m)
                }
            } else {
                self.pos = save;
                SourceExpression::Polynomial(self.poly()?)
            }
        } else {
            SourceExpression::Polynomial(self.poly()?)
        };
        if *self.peek() != Tok::End {
            return Err(self.err(format!("unexpected {}", self.describe())));
        }
        Ok(expr)
    }
}

/// Parses `a0 ; theta ; a1 ; ... ; theta ; ar` where each `ai` is a `;`-separated
/// run of affine maps (composed in order, empty meaning the identity) and
/// `theta` may be written `theta(N)` with `N` equal to `n`.
pub fn parse_alternating<K: Field>(field: &K, text: &str, n: usize) -> Result<AlternatingWord<K>> {
    let tokens = lex(text)?;
    let mut p = Parser { field, text, tokens, pos: 0 };
    let mut affines = Vec::new();
    let mut acc = AffineMap::identity(field);
    loop {
        let offset = p.offset();
        match p.peek().clone() {
            Tok::Ident(name) if name == "theta" => {
                p.bump();
                if p.eat('(') {
                    let k_offset = p.offset();
                    let k = p.nat()?;
                    p.expect(')')?;
                    if k as usize != n {
                        return Err(error_at(text, k_offset, format!("theta({k}) in a word with N = {n}")));
                    }
                }
                affines.push(std::mem::replace(&mut acc, AffineMap::identity(field)));
            }
            Tok::Sym('(') => {
                p.bump();
                let first = p.poly()?;
                let m = p.map_rest(first)?;
                let a = AffineMap::from_endomorphism(&m)
                    .map_err(|_| error_at(text, offset, format!("{m} is not an invertible affine map")))?;
                acc = acc.compose(&a);
            }
            Tok::Ident(name) if name == "pi" => {
                p.bump();
                acc = acc.compose(&AffineMap::pi(field));
            }
            _ => return Err(p.err(format!("expected an affine map or theta, found {}", p.describe()))),
        }
        if !p.eat(';') {
            break;
        }
    }
    if *p.peek() != Tok::End {
        return Err(p.err(format!("unexpected {}", p.describe())));
    }
    affines.push(acc);
    AlternatingWord::new(n, affines)
}

/// Parses a polynomial, a map `(P, Q, R)` or a `;`-separated word.
pub fn parse<K: Field>(field: &K, text: &str) -> Result<SourceExpression<K>> {
    let tokens = lex(text)?;
    Parser { field, text, tokens, pos: 0 }.expression()
}

pub fn parse_polynomial<K: Field>(field: &K, text: &str) -> Result<Polynomial<K>> {
    parse(field, text)?.into_polynomial()
}

pub fn parse_map<K: Field>(field: &K, text: &str) -> Result<Endomorphism<K>> {
    parse(field, text)?.into_map()
}

pub fn parse_word<K: Field>(field: &K, text: &str) -> Result<Word<K>> {
    parse(field, text)?.into_word()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{PrimeField, Rationals};
    use crate::word::{beta, beta_inv};

    #[test]
    fn generators() {
        let q = Rationals;
        assert_eq!(parse_map(&q, "(x+y^2*(y+z^2)^2, y+z^2, z)").unwrap(), beta(&q));
        assert_eq!(parse_map(&q, "(x - y^2 (y - z^2)^2, y - z^2, z)").unwrap(), beta_inv(&q));
        let w = parse_word(&q, "pi ; beta").unwrap();
        assert_eq!(w.atoms(), &[Atom::Pi, Atom::Beta]);
        assert_eq!(parse_word(&q, "theta(3)").unwrap(), Word::theta(&q, 3));
    }

    #[test]
    fn alternating_words() {
        let q = Rationals;
        let w = parse_alternating(&q, "(x + 1, y, z) ; theta ; (y, x, z) ; theta(3) ; (x, y, 2*z)", 3).unwrap();
        assert_eq!(w.r(), 2);
        assert_eq!(w.affines[1], AffineMap::pi(&q));
        let w = parse_alternating(&q, "theta", 3).unwrap();
        assert_eq!(w.affines, vec![AffineMap::identity(&q); 2]);
        assert!(matches!(parse_alternating(&q, "theta(2)", 3), Err(Error::Parse { column: 7, .. })));
        assert!(matches!(parse_alternating(&q, "(x + y^2, y, z) ; theta", 3), Err(Error::Parse { column: 1, .. })));
    }

    #[test]
    fn polynomial_shapes() {
        let q = Rationals;
        let p = parse_polynomial(&q, "-3*y^2*z + 1/2 - x").unwrap();
        assert_eq!(p.to_string(), "-x - 3*y^2*z + 1/2");
        assert_eq!(parse_polynomial(&q, "(x+1)^2").unwrap().to_string(), "x^2 + 2*x + 1");
        assert_eq!(parse(&q, "(x + y)").unwrap().kind(), "polynomial");
        assert_eq!(parse(&q, "(x, y, z) ; pi").unwrap().kind(), "word");
    }

    #[test]
    fn errors_carry_positions() {
        let q = Rationals;
        assert_eq!(
            parse(&q, "x +\n  w").unwrap_err(),
            Error::Parse { line: 2, column: 3, message: "unknown identifier `w`".into() }
        );
        let f2 = PrimeField::new(2).unwrap();
        assert!(matches!(parse(&f2, "1/2*x"), Err(Error::Parse { line: 1, column: 3, .. })));
        assert!(matches!(parse(&q, "(x, y)"), Err(Error::Parse { .. })));
        assert!(matches!(parse(&q, "x $ y"), Err(Error::Parse { line: 1, column: 3, .. })));
    }

    #[test]
    fn round_trip() {
        let q = Rationals;
        for text in [
            "(x+y^2*(y+z^2)^2, y+z^2, z)",
            "pi ; beta ; (2*x + 1/3*y, y - z, 5*z + 1)",
            "theta(2) ; (x + y^2, y, z)",
            "x^3 - 7/5*x*y*z + 2",
        ] {
            let once = parse(&q, text).unwrap();
            let again = parse(&q, &once.to_string()).unwrap();
            assert_eq!(once, again, "{text}");
        }
    }
}
