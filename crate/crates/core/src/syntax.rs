//! Formula AST, concrete grammar, parser and printer.
//!
//! The AST carries only the primitive connectives. The derived forms
//! (`<>`, `|`, `->`, `true`) are expanded by the parser and by the helper
//! constructors on [`Formula`], so every semantic evaluator matches on the
//! same closed set of cases.
//!
//! ```text
//! form  := imp ("=>" form)?
//! imp   := or ("->" imp)?
//! or    := and ("|" and)*
//! and   := seq ("&" seq)*
//! seq   := unary (";" unary)*
//! unary := "~" unary | "[]" unary | "<>" unary | "[*]" unary
//!        | "A" unary | "E" unary | "O" unary | "<" form ">" unary | atom
//! atom  := ident | "false" | "true" | "(" form ")"
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A formula over the full operator set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(String),
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    /// `[]f`: truth at every successor.
    Box(Box<Formula>),
    /// `[*]f`: truth at every world reachable in zero or more steps.
    BoxPlus(Box<Formula>),
    /// `A f`: truth at every world of the model.
    Univ(Box<Formula>),
    /// `E f`: truth at some world of the model.
    Exist(Box<Formula>),
    /// `O f`: truth here and nowhere else.
    Only(Box<Formula>),
    /// `f;g`: dynamic conjunction.
    Seq(Box<Formula>, Box<Formula>),
    /// `f => g`: indicative conditional of update semantics.
    Arrow(Box<Formula>, Box<Formula>),
    /// `<f>g`: public announcement.
    Announce(Box<Formula>, Box<Formula>),
}

/// Language fragments, ordered by inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fragment {
    /// Atoms, `false`, `~`, `&`.
    ModalFree,
    /// Adds `[]`.
    Basic,
    /// Adds `;` and `=>`.
    Dynamic,
    /// Adds `[*]`, `A`, `E`, `O` and announcements.
    Extended,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Fragment::ModalFree => "modal-free",
            Fragment::Basic => "basic",
            Fragment::Dynamic => "dynamic",
            Fragment::Extended => "extended",
        };
        f.write_str(name)
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    pub fn bottom() -> Formula {
        Formula::Bottom
    }

    /// `true`, stored as `~false`.
    pub fn top() -> Formula {
        Formula::not(Formula::Bottom)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// `a | b`, stored as `~(~a & ~b)`.
    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    /// `a -> b`, stored as `~(a & ~b)`.
    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn nec(f: Formula) -> Formula {
        Formula::Box(Box::new(f))
    }

    /// `<>f`, stored as `~[]~f`.
    pub fn poss(f: Formula) -> Formula {
        Formula::not(Formula::nec(Formula::not(f)))
    }

    pub fn box_plus(f: Formula) -> Formula {
        Formula::BoxPlus(Box::new(f))
    }

    pub fn univ(f: Formula) -> Formula {
        Formula::Univ(Box::new(f))
    }

    pub fn exist(f: Formula) -> Formula {
        Formula::Exist(Box::new(f))
    }

    pub fn only(f: Formula) -> Formula {
        Formula::Only(Box::new(f))
    }

    pub fn seq(a: Formula, b: Formula) -> Formula {
        Formula::Seq(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Formula, b: Formula) -> Formula {
        Formula::Arrow(Box::new(a), Box::new(b))
    }

    pub fn announce(a: Formula, b: Formula) -> Formula {
        Formula::Announce(Box::new(a), Box::new(b))
    }

    /// `[]` applied `n` times.
    pub fn nec_n(n: usize, f: Formula) -> Formula {
        (0..n).fold(f, |acc, _| Formula::nec(acc))
    }

    /// `<>` applied `n` times.
    pub fn poss_n(n: usize, f: Formula) -> Formula {
        (0..n).fold(f, |acc, _| Formula::poss(acc))
    }

    /// Left-nested dynamic conjunction of a nonempty sequence.
    pub fn seq_all(parts: &[Formula]) -> Option<Formula> {
        let (first, rest) = parts.split_first()?;
        Some(
            rest.iter()
                .cloned()
                .fold(first.clone(), Formula::seq),
        )
    }

    /// Names of the atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(p) => {
                out.insert(p.clone());
            }
            Formula::Bottom => {}
            Formula::Not(a)
            | Formula::Box(a)
            | Formula::BoxPlus(a)
            | Formula::Univ(a)
            | Formula::Exist(a)
            | Formula::Only(a) => a.collect_atoms(out),
            Formula::And(a, b)
            | Formula::Seq(a, b)
            | Formula::Arrow(a, b)
            | Formula::Announce(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// The least fragment containing the formula.
    pub fn fragment(&self) -> Fragment {
        match self {
            Formula::Atom(_) | Formula::Bottom => Fragment::ModalFree,
            Formula::Not(a) => a.fragment(),
            Formula::And(a, b) => a.fragment().max(b.fragment()),
            Formula::Box(a) => a.fragment().max(Fragment::Basic),
            Formula::Seq(a, b) | Formula::Arrow(a, b) => {
                a.fragment().max(b.fragment()).max(Fragment::Dynamic)
            }
            Formula::BoxPlus(_)
            | Formula::Univ(_)
            | Formula::Exist(_)
            | Formula::Only(_)
            | Formula::Announce(_, _) => Fragment::Extended,
        }
    }

    /// Nesting depth of the modal operators `[]`, `[*]`, `A`, `E`, `O`.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Not(a) => a.modal_depth(),
            Formula::Box(a)
            | Formula::BoxPlus(a)
            | Formula::Univ(a)
            | Formula::Exist(a)
            | Formula::Only(a) => 1 + a.modal_depth(),
            Formula::And(a, b)
            | Formula::Seq(a, b)
            | Formula::Arrow(a, b)
            | Formula::Announce(a, b) => a.modal_depth().max(b.modal_depth()),
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 1,
            Formula::Not(a)
            | Formula::Box(a)
            | Formula::BoxPlus(a)
            | Formula::Univ(a)
            | Formula::Exist(a)
            | Formula::Only(a) => 1 + a.size(),
            Formula::And(a, b)
            | Formula::Seq(a, b)
            | Formula::Arrow(a, b)
            | Formula::Announce(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Maximum nesting of announcements.
    pub fn announcement_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Not(a)
            | Formula::Box(a)
            | Formula::BoxPlus(a)
            | Formula::Univ(a)
            | Formula::Exist(a)
            | Formula::Only(a) => a.announcement_depth(),
            Formula::And(a, b) | Formula::Seq(a, b) | Formula::Arrow(a, b) => {
                a.announcement_depth().max(b.announcement_depth())
            }
            Formula::Announce(a, b) => 1 + a.announcement_depth().max(b.announcement_depth()),
        }
    }

    pub fn contains_announcement(&self) -> bool {
        self.announcement_depth() > 0
    }

    /// Name of the main operator.
    pub fn operator_name(&self) -> &'static str {
        match self {
            Formula::Atom(_) => "atoms",
            Formula::Bottom => "false",
            Formula::Not(_) => "negation",
            Formula::And(_, _) => "conjunction",
            Formula::Box(_) => "[]",
            Formula::BoxPlus(_) => "[*]",
            Formula::Univ(_) => "the universal modality A",
            Formula::Exist(_) => "the existential modality E",
            Formula::Only(_) => "the only operator O",
            Formula::Seq(_, _) => "dynamic conjunction ;",
            Formula::Arrow(_, _) => "the conditional =>",
            Formula::Announce(_, _) => "announcements",
        }
    }

    /// Operator name of the first subformula (preorder) rejected by `allowed`.
    pub fn first_unsupported(&self, allowed: &dyn Fn(&Formula) -> bool) -> Option<&'static str> {
        if !allowed(self) {
            return Some(self.operator_name());
        }
        match self {
            Formula::Atom(_) | Formula::Bottom => None,
            Formula::Not(a)
            | Formula::Box(a)
            | Formula::BoxPlus(a)
            | Formula::Univ(a)
            | Formula::Exist(a)
            | Formula::Only(a) => a.first_unsupported(allowed),
            Formula::And(a, b)
            | Formula::Seq(a, b)
            | Formula::Arrow(a, b)
            | Formula::Announce(a, b) => a
                .first_unsupported(allowed)
                .or_else(|| b.first_unsupported(allowed)),
        }
    }

    /// Renders with every binary connective parenthesized.
    pub fn render_full(&self) -> String {
        let mut out = String::new();
        write_full(self, &mut out);
        out
    }
}

/// Parses a formula; derived connectives are expanded.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let f = parser.form()?;
    match parser.peek() {
        (Token::End, _) => Ok(f),
        (tok, offset) => Err(ParseError {
            offset,
            kind: ParseErrorKind::Unexpected {
                found: tok.describe(),
                expected: "end of input",
            },
        }),
    }
}

/// Renders a formula in the concrete syntax accepted by [`parse`].
pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_prec(f, 0, &mut out);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {kind}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unknown operator token `{0}`")]
    UnknownToken(String),
    #[error("found {found}, expected {expected}")]
    Unexpected {
        found: String,
        expected: &'static str,
    },
}

impl ParseError {
    /// Two-line rendering of the input with a caret under the offending offset.
    pub fn caret(&self, input: &str) -> String {
        let col = input[..self.offset.min(input.len())].chars().count();
        format!("{input}\n{}^", " ".repeat(col))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    False,
    True,
    Tilde,
    Amp,
    Bar,
    Implies,
    FatArrow,
    Nec,
    NecPlus,
    Poss,
    Lt,
    Gt,
    Semi,
    LParen,
    RParen,
    Univ,
    Exist,
    Only,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Ident(name) => format!("identifier `{name}`"),
            Token::End => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Token::Ident(_) => "identifier",
            Token::False => "false",
            Token::True => "true",
            Token::Tilde => "~",
            Token::Amp => "&",
            Token::Bar => "|",
            Token::Implies => "->",
            Token::FatArrow => "=>",
            Token::Nec => "[]",
            Token::NecPlus => "[*]",
            Token::Poss => "<>",
            Token::Lt => "<",
            Token::Gt => ">",
            Token::Semi => ";",
            Token::LParen => "(",
            Token::RParen => ")",
            Token::Univ => "A",
            Token::Exist => "E",
            Token::Only => "O",
            Token::End => "",
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let unknown = |offset: usize, len: usize| ParseError {
        offset,
        kind: ParseErrorKind::UnknownToken(
            text[offset..(offset + len).min(text.len())].to_string(),
        ),
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let next = bytes.get(i + 1).copied();
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Token::Tilde,
            b'&' => Token::Amp,
            b'|' => Token::Bar,
            b';' => Token::Semi,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'>' => Token::Gt,
            b'A' => Token::Univ,
            b'E' => Token::Exist,
            b'O' => Token::Only,
            b'-' if next == Some(b'>') => {
                i += 1;
                Token::Implies
            }
            b'=' if next == Some(b'>') => {
                i += 1;
                Token::FatArrow
            }
            b'<' if next == Some(b'>') => {
                i += 1;
                Token::Poss
            }
            b'<' => Token::Lt,
            b'[' if next == Some(b']') => {
                i += 1;
                Token::Nec
            }
            b'[' if next == Some(b'*') && bytes.get(i + 2) == Some(&b']') => {
                i += 2;
                Token::NecPlus
            }
            b'a'..=b'z' => {
                let mut end = i + 1;
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                let word = &text[i..end];
                i = end;
                let tok = match word {
                    "false" => Token::False,
                    "true" => Token::True,
                    _ => Token::Ident(word.to_string()),
                };
                out.push((tok, start));
                continue;
            }
            _ => {
                let len = text[i..].chars().next().map_or(1, char::len_utf8);
                let len = if matches!(c, b'-' | b'=' | b'[') { 1 } else { len };
                return Err(unknown(start, len));
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Token::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> (Token, usize) {
        self.tokens[self.pos].clone()
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if &self.tokens[self.pos].0 == tok {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Token, expected: &'static str) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            let (found, offset) = self.peek();
            Err(ParseError {
                offset,
                kind: ParseErrorKind::Unexpected {
                    found: found.describe(),
                    expected,
                },
            })
        }
    }

    fn form(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.imp()?;
        if self.eat(&Token::FatArrow) {
            let rhs = self.form()?;
            Ok(Formula::arrow(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Token::Implies) {
            let rhs = self.imp()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while self.eat(&Token::Bar) {
            let rhs = self.and()?;
            acc = Formula::or(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.seq()?;
        while self.eat(&Token::Amp) {
            let rhs = self.seq()?;
            acc = Formula::and(acc, rhs);
        }
        Ok(acc)
    }

    fn seq(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Token::Semi) {
            let rhs = self.unary()?;
            acc = Formula::seq(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let (tok, offset) = self.peek();
        let wrap: Option<fn(Formula) -> Formula> = match tok {
            Token::Tilde => Some(Formula::not),
            Token::Nec => Some(Formula::nec),
            Token::Poss => Some(Formula::poss),
            Token::NecPlus => Some(Formula::box_plus),
            Token::Univ => Some(Formula::univ),
            Token::Exist => Some(Formula::exist),
            Token::Only => Some(Formula::only),
            _ => None,
        };
        if let Some(wrap) = wrap {
            self.pos += 1;
            return Ok(wrap(self.unary()?));
        }
        match tok {
            Token::Lt => {
                self.pos += 1;
                let announced = self.form()?;
                self.expect(Token::Gt, "`>` closing the announcement")?;
                let body = self.unary()?;
                Ok(Formula::announce(announced, body))
            }
            Token::Ident(name) => {
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Token::False => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Token::True => {
                self.pos += 1;
                Ok(Formula::top())
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.form()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            other => Err(ParseError {
                offset,
                kind: ParseErrorKind::Unexpected {
                    found: other.describe(),
                    expected: "a formula",
                },
            }),
        }
    }
}

// Binding strength used by the printer; larger binds tighter.
const PREC_ARROW: u8 = 0;
const PREC_IMP: u8 = 1;
const PREC_OR: u8 = 2;
const PREC_AND: u8 = 3;
const PREC_SEQ: u8 = 4;
const PREC_UNARY: u8 = 5;

/// The derived form a primitive node is printed as.
enum Sugar<'a> {
    Top,
    Poss(&'a Formula),
    Or(&'a Formula, &'a Formula),
    Implies(&'a Formula, &'a Formula),
    Plain,
}

fn sugar(f: &Formula) -> Sugar<'_> {
    let Formula::Not(inner) = f else {
        return Sugar::Plain;
    };
    match &**inner {
        Formula::Bottom => Sugar::Top,
        Formula::Box(b) => match &**b {
            Formula::Not(a) => Sugar::Poss(a),
            _ => Sugar::Plain,
        },
        Formula::And(a, b) => match (&**a, &**b) {
            (Formula::Not(x), Formula::Not(y)) => Sugar::Or(x, y),
            (x, Formula::Not(y)) => Sugar::Implies(x, y),
            _ => Sugar::Plain,
        },
        _ => Sugar::Plain,
    }
}

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Arrow(..) => PREC_ARROW,
        Formula::And(..) => PREC_AND,
        Formula::Seq(..) => PREC_SEQ,
        Formula::Not(_) => match sugar(f) {
            Sugar::Or(..) => PREC_OR,
            Sugar::Implies(..) => PREC_IMP,
            _ => PREC_UNARY,
        },
        _ => PREC_UNARY,
    }
}

fn write_prec(f: &Formula, min: u8, out: &mut String) {
    let paren = prec(f) < min;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Bottom => out.push_str("false"),
        Formula::Not(a) => match sugar(f) {
            Sugar::Top => out.push_str("true"),
            Sugar::Poss(x) => {
                out.push_str("<>");
                write_prec(x, PREC_UNARY, out);
            }
            Sugar::Or(x, y) => {
                write_prec(x, PREC_OR, out);
                out.push_str(" | ");
                write_prec(y, PREC_AND, out);
            }
            Sugar::Implies(x, y) => {
                write_prec(x, PREC_OR, out);
                out.push_str(" -> ");
                write_prec(y, PREC_IMP, out);
            }
            Sugar::Plain => {
                out.push('~');
                write_prec(a, PREC_UNARY, out);
            }
        },
        Formula::Box(a) => {
            out.push_str("[]");
            write_prec(a, PREC_UNARY, out);
        }
        Formula::BoxPlus(a) => {
            out.push_str("[*]");
            write_prec(a, PREC_UNARY, out);
        }
        Formula::Univ(a) => {
            out.push_str("A ");
            write_prec(a, PREC_UNARY, out);
        }
        Formula::Exist(a) => {
            out.push_str("E ");
            write_prec(a, PREC_UNARY, out);
        }
        Formula::Only(a) => {
            out.push_str("O ");
            write_prec(a, PREC_UNARY, out);
        }
        Formula::Announce(a, b) => {
            out.push('<');
            write_prec(a, PREC_ARROW, out);
            out.push('>');
            write_prec(b, PREC_UNARY, out);
        }
        Formula::And(a, b) => {
            write_prec(a, PREC_AND, out);
            out.push_str(" & ");
            write_prec(b, PREC_SEQ, out);
        }
        Formula::Seq(a, b) => {
            write_prec(a, PREC_SEQ, out);
            out.push(';');
            write_prec(b, PREC_UNARY, out);
        }
        Formula::Arrow(a, b) => {
            write_prec(a, PREC_IMP, out);
            out.push_str(" => ");
            write_prec(b, PREC_ARROW, out);
        }
    }
    if paren {
        out.push(')');
    }
}

fn write_full(f: &Formula, out: &mut String) {
    let binary = |a: &Formula, op: &str, b: &Formula, out: &mut String| {
        out.push('(');
        write_full(a, out);
        out.push_str(op);
        write_full(b, out);
        out.push(')');
    };
    match f {
        Formula::Atom(p) => out.push_str(p),
        Formula::Bottom => out.push_str("false"),
        Formula::Not(a) => {
            out.push('~');
            write_full(a, out);
        }
        Formula::Box(a) => {
            out.push_str("[]");
            write_full(a, out);
        }
        Formula::BoxPlus(a) => {
            out.push_str("[*]");
            write_full(a, out);
        }
        Formula::Univ(a) => {
            out.push_str("A ");
            write_full(a, out);
        }
        Formula::Exist(a) => {
            out.push_str("E ");
            write_full(a, out);
        }
        Formula::Only(a) => {
            out.push_str("O ");
            write_full(a, out);
        }
        Formula::Announce(a, b) => {
            out.push('<');
            write_full(a, out);
            out.push('>');
            write_full(b, out);
        }
        Formula::And(a, b) => binary(a, " & ", b, out),
        Formula::Seq(a, b) => binary(a, ";", b, out),
        Formula::Arrow(a, b) => binary(a, " => ", b, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }
    fn q() -> Formula {
        Formula::atom("q")
    }
    fn r() -> Formula {
        Formula::atom("r")
    }

    #[test]
    fn diamond_desugars_to_negated_box() {
        let f = parse("p & <>~p").unwrap();
        let expected = Formula::and(
            p(),
            Formula::not(Formula::nec(Formula::not(Formula::not(p())))),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn seq_is_left_associative() {
        let f = parse("p;q;r").unwrap();
        assert_eq!(f, Formula::seq(Formula::seq(p(), q()), r()));
        assert_eq!(parse("(p;q);r").unwrap(), f);
        assert_eq!(
            parse("p&q&r").unwrap(),
            parse("(p&q)&r").unwrap()
        );
    }

    #[test]
    fn unclosed_group_reports_end_offset() {
        let err = parse("[](").unwrap_err();
        assert_eq!(err.offset, 3);
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { .. }));
        assert_eq!(err.caret("[]("), "[](\n   ^");
    }

    #[test]
    fn unknown_tokens() {
        let err = parse("p # q").unwrap_err();
        assert_eq!(err.offset, 2);
        assert_eq!(err.kind, ParseErrorKind::UnknownToken("#".into()));
        assert!(matches!(
            parse("p - q").unwrap_err().kind,
            ParseErrorKind::UnknownToken(_)
        ));
        assert!(matches!(
            parse("P").unwrap_err().kind,
            ParseErrorKind::UnknownToken(_)
        ));
        assert!(parse("[x]p").is_err());
    }

    #[test]
    fn trailing_garbage_is_rejected() {
        let err = parse("p q").unwrap_err();
        assert_eq!(err.offset, 2);
    }

    #[test]
    fn derived_connectives() {
        assert_eq!(parse("true").unwrap(), Formula::not(Formula::Bottom));
        assert_eq!(
            parse("p | q").unwrap(),
            Formula::not(Formula::and(Formula::not(p()), Formula::not(q())))
        );
        assert_eq!(
            parse("p -> q").unwrap(),
            Formula::not(Formula::and(p(), Formula::not(q())))
        );
    }

    #[test]
    fn implication_and_arrow_are_right_associative() {
        assert_eq!(
            parse("p -> q -> r").unwrap(),
            Formula::implies(p(), Formula::implies(q(), r()))
        );
        assert_eq!(
            parse("p => q => r").unwrap(),
            Formula::arrow(p(), Formula::arrow(q(), r()))
        );
    }

    #[test]
    fn precedence_levels() {
        // `;` binds tighter than `&`, which binds tighter than `|`.
        assert_eq!(
            parse("p & q;r").unwrap(),
            Formula::and(p(), Formula::seq(q(), r()))
        );
        assert_eq!(
            parse("p | q & r").unwrap(),
            Formula::or(p(), Formula::and(q(), r()))
        );
        assert_eq!(
            parse("p -> q => r").unwrap(),
            Formula::arrow(Formula::implies(p(), q()), r())
        );
        assert_eq!(
            parse("[]p;q").unwrap(),
            Formula::seq(Formula::nec(p()), q())
        );
    }

    #[test]
    fn announcements_and_prefix_operators() {
        assert_eq!(parse("<p>q").unwrap(), Formula::announce(p(), q()));
        assert_eq!(
            parse("<p -> q>[]r").unwrap(),
            Formula::announce(Formula::implies(p(), q()), Formula::nec(r()))
        );
        assert_eq!(
            parse("<<>p>q").unwrap(),
            Formula::announce(Formula::poss(p()), q())
        );
        assert_eq!(parse("E O p").unwrap(), Formula::exist(Formula::only(p())));
        assert_eq!(parse("[*][]false").unwrap(), Formula::box_plus(Formula::nec(Formula::Bottom)));
        assert_eq!(parse("A~p").unwrap(), Formula::univ(Formula::not(p())));
    }

    #[test]
    fn identifiers() {
        assert_eq!(parse("p_1x").unwrap(), Formula::atom("p_1x"));
        assert_eq!(parse("falsey").unwrap(), Formula::atom("falsey"));
    }

    #[test]
    fn render_examples() {
        assert_eq!(render(&Formula::and(p(), q())), "p & q");
        assert_eq!(render(&Formula::nec(Formula::seq(p(), q()))), "[](p;q)");
        assert_eq!(render(&Formula::only(p())), "O p");
        assert_eq!(render(&Formula::announce(p(), q())), "<p>q");
        assert_eq!(render(&Formula::or(p(), Formula::not(p()))), "p | ~p");
        assert_eq!(render(&Formula::implies(Formula::and(p(), q()), Formula::poss(p()))), "p & q -> <>p");
        assert_eq!(render(&Formula::top()), "true");
        assert_eq!(render(&Formula::implies(Formula::implies(p(), q()), p())), "p & ~q | p");
        assert_eq!(render(&Formula::or(p(), Formula::or(q(), p()))), "p | (q | p)");
        assert_eq!(render(&Formula::arrow(Formula::implies(p(), q()), p())), "p -> q => p");
        assert_eq!(
            render(&Formula::and(p(), Formula::and(q(), r()))),
            "p & (q & r)"
        );
        assert_eq!(
            Formula::and(p(), Formula::seq(q(), r())).render_full(),
            "(p & (q;r))"
        );
    }

    #[test]
    fn render_reparses() {
        let cases = [
            "p & <>~p",
            "p;q;r",
            "p;(q;r)",
            "(p => q) => r",
            "<p;q>(r & p)",
            "[*](p & q) => A E O p",
            "~(p & q);[]false",
        ];
        for text in cases {
            let f = parse(text).unwrap();
            assert_eq!(parse(&render(&f)).unwrap(), f, "{text}");
            assert_eq!(parse(&f.render_full()).unwrap(), f, "{text}");
        }
    }

    #[test]
    fn atoms_collects_names() {
        assert_eq!(
            Formula::and(p(), Formula::nec(q())).atoms(),
            ["p", "q"].into_iter().map(String::from).collect()
        );
        assert!(Formula::Bottom.atoms().is_empty());
        assert_eq!(Formula::seq(p(), p()).atoms().len(), 1);
    }

    #[test]
    fn fragments() {
        assert_eq!(
            Formula::not(Formula::and(p(), q())).fragment(),
            Fragment::ModalFree
        );
        assert_eq!(Formula::nec(p()).fragment(), Fragment::Basic);
        assert_eq!(Formula::box_plus(p()).fragment(), Fragment::Extended);
        assert_eq!(Formula::seq(p(), Formula::nec(q())).fragment(), Fragment::Dynamic);
        assert_eq!(Formula::arrow(p(), q()).fragment(), Fragment::Dynamic);
        assert_eq!(Formula::announce(p(), q()).fragment(), Fragment::Extended);
        assert!(Fragment::ModalFree < Fragment::Basic);
        assert!(Fragment::Dynamic < Fragment::Extended);
    }

    #[test]
    fn measures() {
        let f = parse("<p><q>[]r").unwrap();
        assert_eq!(f.announcement_depth(), 2);
        assert_eq!(f.modal_depth(), 1);
        assert_eq!(Formula::nec_n(3, p()).modal_depth(), 3);
        assert_eq!(
            Formula::seq_all(&[p(), q(), r()]).unwrap(),
            parse("p;q;r").unwrap()
        );
        assert!(Formula::seq_all(&[]).is_none());
    }
}
