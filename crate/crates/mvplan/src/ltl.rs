//! LTL formulas: abstract syntax, parsing, and negation normal form.
//!
//! The core grammar has six constructors (`true`, atoms, negation,
//! conjunction, next, until). Everything else (`false`, `|`, `->`, `F`, `G`)
//! is sugar that desugars at parse time.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::ParseError;

/// A desugared LTL formula over named atomic propositions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(name.to_string())
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    /// `false` desugars to `!true`.
    pub fn falsum() -> Formula {
        Formula::not(Formula::True)
    }

    /// `a | b` desugars to `!(!a & !b)`.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a -> b` desugars to `!a | b`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::or(Formula::not(a), b)
    }

    /// `F a` desugars to `true U a`.
    pub fn eventually(f: Formula) -> Formula {
        Formula::until(Formula::True, f)
    }

    /// `G a` desugars to `!F !a`.
    pub fn always(f: Formula) -> Formula {
        Formula::not(Formula::eventually(Formula::not(f)))
    }

    /// Number of operators in the formula (atoms and `true` count zero).
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::Atom(_) => 0,
            Formula::Not(a) | Formula::Next(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Until(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Names of all atomic propositions occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::True => {}
            Formula::Atom(name) => {
                out.insert(name.clone());
            }
            Formula::Not(a) | Formula::Next(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::Atom(name) => write!(f, "{name}"),
            Formula::Not(a) => write!(f, "!{}", Paren(a)),
            Formula::And(a, b) => write!(f, "{} & {}", Paren(a), Paren(b)),
            Formula::Next(a) => write!(f, "X {}", Paren(a)),
            Formula::Until(a, b) => write!(f, "{} U {}", Paren(a), Paren(b)),
        }
    }
}

/// Wraps compound subformulas in parentheses when printing.
struct Paren<'a>(&'a Formula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Formula::True | Formula::Atom(_) => write!(f, "{}", self.0),
            _ => write!(f, "({})", self.0),
        }
    }
}

/// Negation normal form used by the tableau translation.
///
/// Negation is pushed down to literals; `Release` is the dual of `Until`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Nnf {
    True,
    False,
    Lit(String, bool),
    And(Box<Nnf>, Box<Nnf>),
    Or(Box<Nnf>, Box<Nnf>),
    Next(Box<Nnf>),
    Until(Box<Nnf>, Box<Nnf>),
    Release(Box<Nnf>, Box<Nnf>),
}

impl Nnf {
    pub fn from_formula(f: &Formula) -> Nnf {
        Nnf::positive(f)
    }

    fn positive(f: &Formula) -> Nnf {
        match f {
            Formula::True => Nnf::True,
            Formula::Atom(p) => Nnf::Lit(p.clone(), true),
            Formula::Not(a) => Nnf::negative(a),
            Formula::And(a, b) => {
                Nnf::And(Box::new(Nnf::positive(a)), Box::new(Nnf::positive(b)))
            }
            Formula::Next(a) => Nnf::Next(Box::new(Nnf::positive(a))),
            Formula::Until(a, b) => {
                Nnf::Until(Box::new(Nnf::positive(a)), Box::new(Nnf::positive(b)))
            }
        }
    }

    fn negative(f: &Formula) -> Nnf {
        match f {
            Formula::True => Nnf::False,
            Formula::Atom(p) => Nnf::Lit(p.clone(), false),
            Formula::Not(a) => Nnf::positive(a),
            Formula::And(a, b) => {
                Nnf::Or(Box::new(Nnf::negative(a)), Box::new(Nnf::negative(b)))
            }
            Formula::Next(a) => Nnf::Next(Box::new(Nnf::negative(a))),
            Formula::Until(a, b) => {
                Nnf::Release(Box::new(Nnf::negative(a)), Box::new(Nnf::negative(b)))
            }
        }
    }
}

/// Parse an LTL formula from its ASCII syntax.
///
/// Operators: `! & | -> X U F G`, constants `true`/`false`, atoms
/// `[a-zA-Z_][a-zA-Z0-9_]*`. Precedence, highest to lowest: unary
/// (`!`, `X`, `F`, `G`), `U` (right-associative), `&`, `|`, `->`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let f = parser.formula()?;
    match parser.peek() {
        Some(tok) => Err(ParseError::at(
            tok.line,
            tok.col,
            format!("unexpected '{}'", tok.kind),
        )),
        None => Ok(f),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Atom(String),
    True,
    False,
    Not,
    AndOp,
    OrOp,
    Implies,
    Next,
    UntilOp,
    Finally,
    Globally,
    LParen,
    RParen,
}

impl fmt::Display for TokKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TokKind::Atom(s) => write!(f, "{s}"),
            TokKind::True => write!(f, "true"),
            TokKind::False => write!(f, "false"),
            TokKind::Not => write!(f, "!"),
            TokKind::AndOp => write!(f, "&"),
            TokKind::OrOp => write!(f, "|"),
            TokKind::Implies => write!(f, "->"),
            TokKind::Next => write!(f, "X"),
            TokKind::UntilOp => write!(f, "U"),
            TokKind::Finally => write!(f, "F"),
            TokKind::Globally => write!(f, "G"),
            TokKind::LParen => write!(f, "("),
            TokKind::RParen => write!(f, ")"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        let kind = match c {
            '!' => {
                bump(&mut chars);
                TokKind::Not
            }
            '&' => {
                bump(&mut chars);
                TokKind::AndOp
            }
            '|' => {
                bump(&mut chars);
                TokKind::OrOp
            }
            '(' => {
                bump(&mut chars);
                TokKind::LParen
            }
            ')' => {
                bump(&mut chars);
                TokKind::RParen
            }
            '-' => {
                bump(&mut chars);
                match chars.peek() {
                    Some('>') => {
                        bump(&mut chars);
                        TokKind::Implies
                    }
                    _ => {
                        return Err(ParseError::at(tline, tcol, "expected '->'".to_string()));
                    }
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(bump(&mut chars));
                    } else {
                        break;
                    }
                }
                match word.as_str() {
                    "true" => TokKind::True,
                    "false" => TokKind::False,
                    "X" => TokKind::Next,
                    "U" => TokKind::UntilOp,
                    "F" => TokKind::Finally,
                    "G" => TokKind::Globally,
                    _ => TokKind::Atom(word),
                }
            }
            other => {
                return Err(ParseError::at(
                    tline,
                    tcol,
                    format!("unexpected character '{other}'"),
                ));
            }
        };
        tokens.push(Token {
            kind,
            line: tline,
            col: tcol,
        });
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eof_err(&self) -> ParseError {
        let (line, col) = self
            .tokens
            .last()
            .map(|t| (t.line, t.col + 1))
            .unwrap_or((1, 1));
        ParseError::at(line, col, "unexpected end of formula".to_string())
    }

    // formula := or_term ( "->" formula )?
    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or_term()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokKind::Implies)) {
            self.next();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    // or_term := and_term ( "|" and_term )*
    fn or_term(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and_term()?;
        while matches!(self.peek().map(|t| &t.kind), Some(TokKind::OrOp)) {
            self.next();
            let rhs = self.and_term()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    // and_term := until_term ( "&" until_term )*
    fn and_term(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.until_term()?;
        while matches!(self.peek().map(|t| &t.kind), Some(TokKind::AndOp)) {
            self.next();
            let rhs = self.until_term()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    // until_term := factor ( "U" until_term )?   (right-associative)
    fn until_term(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.factor()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokKind::UntilOp)) {
            self.next();
            let rhs = self.until_term()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Formula, ParseError> {
        let tok = self.next().ok_or_else(|| self.eof_err())?;
        match tok.kind {
            TokKind::Not => Ok(Formula::not(self.factor()?)),
            TokKind::Next => Ok(Formula::next(self.factor()?)),
            TokKind::Finally => Ok(Formula::eventually(self.factor()?)),
            TokKind::Globally => Ok(Formula::always(self.factor()?)),
            TokKind::True => Ok(Formula::True),
            TokKind::False => Ok(Formula::falsum()),
            TokKind::Atom(name) => Ok(Formula::Atom(name)),
            TokKind::LParen => {
                let f = self.formula()?;
                match self.next() {
                    Some(Token {
                        kind: TokKind::RParen,
                        ..
                    }) => Ok(f),
                    Some(t) => Err(ParseError::at(
                        t.line,
                        t.col,
                        format!("expected ')', found '{}'", t.kind),
                    )),
                    None => Err(self.eof_err()),
                }
            }
            other => Err(ParseError::at(
                tok.line,
                tok.col,
                format!("unexpected '{other}'"),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_true() {
        assert_eq!(parse_formula("true").unwrap(), Formula::True);
    }

    #[test]
    fn desugars_always_implies_eventually() {
        let parsed = parse_formula("G (p -> F q)").unwrap();
        let expected = Formula::always(Formula::implies(
            Formula::atom("p"),
            Formula::eventually(Formula::atom("q")),
        ));
        assert_eq!(parsed, expected);
    }

    #[test]
    fn parses_sequencing_formula() {
        // "pickup F1, then bring it to base"
        let parsed = parse_formula("F ( pF1 & F pBase )").unwrap();
        let expected = Formula::eventually(Formula::and(
            Formula::atom("pF1"),
            Formula::eventually(Formula::atom("pBase")),
        ));
        assert_eq!(parsed, expected);
    }

    #[test]
    fn until_is_right_associative() {
        let parsed = parse_formula("a U b U c").unwrap();
        let expected = Formula::until(
            Formula::atom("a"),
            Formula::until(Formula::atom("b"), Formula::atom("c")),
        );
        assert_eq!(parsed, expected);
    }

    #[test]
    fn precedence_and_binds_tighter_than_or() {
        let parsed = parse_formula("a & b | c").unwrap();
        let expected = Formula::or(Formula::and(Formula::atom("a"), Formula::atom("b")), Formula::atom("c"));
        assert_eq!(parsed, expected);
    }

    #[test]
    fn size_counts_operators() {
        // G (p -> F q) == !(true U !(!(p) | (true U q))) in core form
        let f = parse_formula("X p & q U r").unwrap();
        assert_eq!(f.size(), 3);
        assert_eq!(parse_formula("p").unwrap().size(), 0);
    }

    #[test]
    fn rejects_garbage() {
        let err = parse_formula("p @ q").unwrap_err();
        assert!(err.to_string().contains("unexpected character"));
        assert!(parse_formula("p &").is_err());
        assert!(parse_formula("(p").is_err());
        assert!(parse_formula("p q").is_err());
    }

    #[test]
    fn error_carries_position() {
        let err = parse_formula("p &\n& q").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2:1"), "got: {msg}");
    }

    #[test]
    fn nnf_pushes_negations_to_literals() {
        let f = parse_formula("!(p U X q)").unwrap();
        let nnf = Nnf::from_formula(&f);
        assert_eq!(
            nnf,
            Nnf::Release(
                Box::new(Nnf::Lit("p".into(), false)),
                Box::new(Nnf::Next(Box::new(Nnf::Lit("q".into(), false))))
            )
        );
    }
}
