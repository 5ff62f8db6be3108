//! Recursive-descent parser for the ASCII surface syntax.
//!
//! ```text
//! formula := iff ; iff := imp ("<->" imp)* ; imp := or ("->" imp)? ;
//! or := and ("|" and)* ; and := unary ("&" unary)* ;
//! unary := "~" unary | "E" ident "." formula | "A" ident "." formula | atom ;
//! atom := term "<=" term | term "=" term | "|" term "|" "=" nat | "(" formula ")" ;
//! term := tfactor (("\/" | "-") tfactor)* ; tfactor := tatom ("/\" tatom)* ;
//! tatom := ident | "0" | "1" | "(" term ")" .
//! ```
//!
//! Quantifier bodies extend as far to the right as possible.

use super::{Formula, Term, TheoryMode};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(u32),
    Join,
    Meet,
    Minus,
    Leq,
    Eq,
    Bar,
    LParen,
    RParen,
    Tilde,
    Amp,
    Arrow,
    DoubleArrow,
    Dot,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Join => "`\\/`".into(),
            Tok::Meet => "`/\\`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Leq => "`<=`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Bar => "`|`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DoubleArrow => "`<->`".into(),
            Tok::Dot => "`.`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = (line, col);
        let rest = &chars[i..];
        let starts = |s: &str| {
            let s: Vec<char> = s.chars().collect();
            rest.len() >= s.len() && rest[..s.len()] == s[..]
        };
        let (tok, len) = if starts("<->") {
            (Tok::DoubleArrow, 3)
        } else if starts("<=") {
            (Tok::Leq, 2)
        } else if starts("->") {
            (Tok::Arrow, 2)
        } else if starts("\\/") {
            (Tok::Join, 2)
        } else if starts("/\\") {
            (Tok::Meet, 2)
        } else {
            match c {
                '-' => (Tok::Minus, 1),
                '=' => (Tok::Eq, 1),
                '|' => (Tok::Bar, 1),
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '~' => (Tok::Tilde, 1),
                '&' => (Tok::Amp, 1),
                '.' => (Tok::Dot, 1),
                c if c.is_ascii_digit() => {
                    let len = rest.iter().take_while(|c| c.is_ascii_digit()).count();
                    let digits: String = rest[..len].iter().collect();
                    let n = digits
                        .parse::<u32>()
                        .map_err(|_| syntax(start.0, start.1, format!("number `{digits}` too large")))?;
                    (Tok::Nat(n), len)
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let len = rest
                        .iter()
                        .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                        .count();
                    (Tok::Ident(rest[..len].iter().collect()), len)
                }
                other => return Err(syntax(start.0, start.1, format!("unexpected character `{other}`"))),
            }
        };
        out.push(Spanned {
            tok,
            line: start.0,
            column: start.1,
        });
        i += len;
        col += len;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    mode: TheoryMode,
}

fn is_keyword(s: &str) -> bool {
    s == "E" || s == "A"
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, wanted: &str) -> Error {
        let (l, c) = self.here();
        syntax(l, c, format!("expected {wanted}, found {}", self.peek().describe()))
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(wanted))
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        let mut left = self.implication()?;
        while *self.peek() == Tok::DoubleArrow {
            self.bump();
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut left = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let right = self.unary()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(q) if is_keyword(&q) => {
                self.bump();
                let var = match self.bump() {
                    Tok::Ident(v) if !is_keyword(&v) => v,
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected("a variable after the quantifier"));
                    }
                };
                self.expect(Tok::Dot, "`.` after the quantified variable")?;
                let body = self.formula()?;
                Ok(if q == "E" {
                    Formula::Exists(var, Box::new(body))
                } else {
                    Formula::Forall(var, Box::new(body))
                })
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek() {
            Tok::Bar => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::Bar, "closing `|`")?;
                self.expect(Tok::Eq, "`=` after `|term|`")?;
                match self.bump() {
                    Tok::Nat(n) => Ok(Formula::CardEq(t, n)),
                    _ => {
                        self.pos -= 1;
                        Err(self.unexpected("a natural number"))
                    }
                }
            }
            Tok::LParen => {
                let save = self.pos;
                let as_relation = self.relation();
                match as_relation {
                    Ok(f) => Ok(f),
                    Err(Error::UniverseInSetMode { line, column }) => {
                        Err(Error::UniverseInSetMode { line, column })
                    }
                    Err(e1) => {
                        let far1 = self.pos;
                        self.pos = save;
                        self.bump();
                        let inner = self.formula().and_then(|f| {
                            self.expect(Tok::RParen, "`)`")?;
                            Ok(f)
                        });
                        match inner {
                            Ok(f) => Ok(f),
                            Err(e2) => Err(if far1 > self.pos { e1 } else { e2 }),
                        }
                    }
                }
            }
            _ => self.relation(),
        }
    }

    fn relation(&mut self) -> Result<Formula> {
        let left = self.term()?;
        match self.peek() {
            Tok::Leq => {
                self.bump();
                Ok(Formula::Subseteq(left, self.term()?))
            }
            Tok::Eq => {
                self.bump();
                Ok(Formula::Equal(left, self.term()?))
            }
            _ => Err(self.unexpected("`<=` or `=`")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut left = self.tfactor()?;
        loop {
            match self.peek() {
                Tok::Join => {
                    self.bump();
                    left = Term::union(left, self.tfactor()?);
                }
                Tok::Minus => {
                    self.bump();
                    left = Term::diff(left, self.tfactor()?);
                }
                _ => return Ok(left),
            }
        }
    }

    fn tfactor(&mut self) -> Result<Term> {
        let mut left = self.tatom()?;
        while *self.peek() == Tok::Meet {
            self.bump();
            left = Term::inter(left, self.tatom()?);
        }
        Ok(left)
    }

    fn tatom(&mut self) -> Result<Term> {
        let (line, column) = self.here();
        match self.peek().clone() {
            Tok::Ident(v) if !is_keyword(&v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::Nat(0) => {
                self.bump();
                Ok(Term::Empty)
            }
            Tok::Nat(1) => {
                if !self.mode.has_top() {
                    return Err(Error::UniverseInSetMode { line, column });
                }
                self.bump();
                Ok(Term::Universe)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => Err(self.unexpected("a term")),
        }
    }
}

/// Parses a formula; free variables are allowed.
pub fn parse(text: &str, mode: TheoryMode) -> Result<Formula> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, mode };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

/// Parses a formula that must be a sentence (no free variables).
pub fn parse_sentence(text: &str, mode: TheoryMode) -> Result<Formula> {
    let f = parse(text, mode)?;
    if let Some(v) = f.free_variables().into_iter().next() {
        return Err(Error::UnboundVariable(v));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SET: TheoryMode = TheoryMode::SetMereology;
    const CLASS: TheoryMode = TheoryMode::ClassMereology;

    #[test]
    fn parses_inclusion() {
        assert_eq!(
            parse("a <= b", SET).unwrap(),
            Formula::Subseteq(Term::var("a"), Term::var("b"))
        );
    }

    #[test]
    fn parses_counting_under_quantifier() {
        let f = parse("E x. (|x /\\ a| = 2 & |a - x| = 3)", SET).unwrap();
        let expected = Formula::exists(
            "x",
            Formula::and(
                Formula::CardEq(Term::inter(Term::var("x"), Term::var("a")), 2),
                Formula::CardEq(Term::diff(Term::var("a"), Term::var("x")), 3),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn universe_rejected_in_set_mode() {
        let err = parse("1 - a <= b", SET).unwrap_err();
        assert_eq!(err, Error::UniverseInSetMode { line: 1, column: 1 });
        assert!(parse("1 - a <= b", CLASS).is_ok());
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse("a <= b &\n  & c <= d", SET).unwrap_err() {
            Error::Syntax { line, column, .. } => assert_eq!((line, column), (2, 3)),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(parse("a <= ", SET), Err(Error::Syntax { .. })));
        assert!(matches!(parse("a $ b", SET), Err(Error::Syntax { .. })));
        assert!(matches!(parse("|a| = 99999999999", SET), Err(Error::Syntax { .. })));
    }

    #[test]
    fn sentence_parse_rejects_free_variables() {
        assert_eq!(
            parse_sentence("E x. x <= a", SET).unwrap_err(),
            Error::UnboundVariable("a".into())
        );
        assert!(parse_sentence("E x. x <= x", SET).is_ok());
    }

    #[test]
    fn parenthesized_terms_and_formulas_disambiguate() {
        let f = parse("(a \\/ b) <= c", SET).unwrap();
        assert_eq!(
            f,
            Formula::Subseteq(Term::union(Term::var("a"), Term::var("b")), Term::var("c"))
        );
        let g = parse("((a <= b))", SET).unwrap();
        assert_eq!(g, Formula::Subseteq(Term::var("a"), Term::var("b")));
        let h = parse("((a \\/ b) <= c & c = 0)", SET).unwrap();
        assert!(matches!(h, Formula::And(..)));
    }

    #[test]
    fn quantifiers_bind_weakly() {
        let f = parse("E x. x <= a & a <= x", SET).unwrap();
        assert!(matches!(f, Formula::Exists(_, ref b) if matches!(**b, Formula::And(..))));
        let g = parse("a <= a & E x. x <= a | a = x", SET).unwrap();
        match g {
            Formula::And(_, r) => assert!(matches!(*r, Formula::Exists(..))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn keywords_are_not_variables() {
        assert!(parse("E <= a", SET).is_err());
        assert!(parse("E E. a <= a", SET).is_err());
    }
}
