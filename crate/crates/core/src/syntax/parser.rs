use thiserror::Error;

use super::{Formula, Quantifier, Sort, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("sort error at {line}:{column}: {message} (found `{token}`)")]
    Sort { line: usize, column: usize, token: String, message: String },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Sort { line, .. } => *line,
        }
    }

    fn shift_line(self, by: usize) -> Self {
        match self {
            ParseError::Syntax { line, column, message } => ParseError::Syntax { line: line + by, column, message },
            ParseError::Sort { line, column, token, message } => {
                ParseError::Sort { line: line + by, column, token, message }
            }
        }
    }
}

const KEYWORDS: &[&str] = &["forall", "exists", "not", "and", "or", "in", "sub", "eq"];
const RESERVED: &[&str] = &["F", "P", "PP", "O", "I", "U"];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Equals,
    Plus,
    Amp,
    Arrow,
    DoubleArrow,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::LParen => "(".into(),
            Tok::RParen => ")".into(),
            Tok::Comma => ",".into(),
            Tok::Dot => ".".into(),
            Tok::Equals => "=".into(),
            Tok::Plus => "+".into(),
            Tok::Amp => "&".into(),
            Tok::Arrow => "->".into(),
            Tok::DoubleArrow => "<->".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: start.0, column: start.1 });
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let begin = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - begin;
            push(&mut out, Tok::Ident(chars[begin..i].iter().collect()));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, width) = if rest.starts_with("<->") {
            (Tok::DoubleArrow, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                '=' => Tok::Equals,
                '+' => Tok::Plus,
                '&' => Tok::Amp,
                _ => {
                    return Err(ParseError::Syntax {
                        line,
                        column: col,
                        message: format!("unexpected character `{c}`"),
                    })
                }
            };
            (tok, 1)
        };
        push(&mut out, tok);
        i += width;
        col += width;
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, (usize, ParseError)>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn syntax<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = &self.tokens[self.pos];
        Err((self.pos, ParseError::Syntax { line: t.line, column: t.column, message: message.into() }))
    }

    fn sort_error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = &self.tokens[self.pos];
        Err((
            self.pos,
            ParseError::Sort { line: t.line, column: t.column, token: t.tok.describe(), message: message.into() },
        ))
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            self.syntax(format!("expected `{}`, found `{}`", want.describe(), self.peek().describe()))
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        if self.is_keyword("forall") || self.is_keyword("exists") {
            self.quantified()
        } else {
            self.iff()
        }
    }

    fn quantified(&mut self) -> PResult<Formula> {
        let quantifier = match self.advance().tok {
            Tok::Ident(s) if s == "forall" => Quantifier::Forall,
            _ => Quantifier::Exists,
        };
        let (var, sort) = self.variable()?;
        let within = if self.is_keyword("in") || self.is_keyword("sub") {
            let restriction_is_in = self.is_keyword("in");
            match (sort, restriction_is_in) {
                (Sort::Individual, false) => return self.sort_error("individual quantifiers are restricted with `in`"),
                (Sort::Plural, true) => return self.sort_error("plural quantifiers are restricted with `sub`"),
                _ => {}
            }
            self.advance();
            Some(self.term()?)
        } else {
            None
        };
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(Formula::quantified(quantifier, var, within, body))
    }

    fn variable(&mut self) -> PResult<(String, Sort)> {
        match self.peek().clone() {
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => {
                self.syntax(format!("expected a variable, found keyword `{name}`"))
            }
            Tok::Ident(name) if RESERVED.contains(&name.as_str()) => {
                self.syntax(format!("`{name}` is reserved and cannot name a variable"))
            }
            Tok::Ident(name) => match Sort::of_name(&name) {
                Some(sort) => {
                    self.advance();
                    Ok((name, sort))
                }
                None => self.syntax(format!("variable `{name}` must start with a letter")),
            },
            other => self.syntax(format!("expected a variable, found `{}`", other.describe())),
        }
    }

    fn individual(&mut self) -> PResult<String> {
        let save = self.pos;
        match self.variable()? {
            (name, Sort::Individual) => Ok(name),
            (_, Sort::Plural) => {
                self.pos = save;
                self.sort_error("expected an individual variable")
            }
        }
    }

    fn iff(&mut self) -> PResult<Formula> {
        let mut left = self.implication()?;
        while *self.peek() == Tok::DoubleArrow {
            self.advance();
            let right = self.implication()?;
            left = Formula::iff(left, right);
        }
        Ok(left)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let left = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut left = self.conjunction()?;
        while self.is_keyword("or") {
            self.advance();
            let right = self.conjunction()?;
            left = Formula::or(left, right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut left = self.negation()?;
        while self.is_keyword("and") {
            self.advance();
            let right = self.negation()?;
            left = Formula::and(left, right);
        }
        Ok(left)
    }

    fn negation(&mut self) -> PResult<Formula> {
        if self.is_keyword("not") {
            self.advance();
            return Ok(Formula::not(self.negation()?));
        }
        if self.is_keyword("forall") || self.is_keyword("exists") {
            return self.quantified();
        }
        if *self.peek() == Tok::LParen {
            // Either a parenthesized formula or an atom whose first plural
            // term is parenthesized; keep whichever attempt got further.
            let start = self.pos;
            let as_atom = self.plural_atom();
            let atom_end = self.pos;
            if let Ok(f) = as_atom {
                return Ok(f);
            }
            self.pos = start;
            self.advance();
            let as_group = self.formula().and_then(|f| {
                self.expect(Tok::RParen)?;
                Ok(f)
            });
            return match (as_group, as_atom) {
                (Ok(f), _) => Ok(f),
                (Err(g), Err(a)) => {
                    if a.0 > g.0 {
                        self.pos = atom_end;
                        Err(a)
                    } else {
                        Err(g)
                    }
                }
                (Err(g), Ok(_)) => Err(g),
            };
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Formula> {
        let name = match self.peek().clone() {
            Tok::Ident(name) => name,
            other => return self.syntax(format!("expected a formula, found `{}`", other.describe())),
        };
        let followed_by_paren = *self.peek_at(1) == Tok::LParen;
        match name.as_str() {
            "F" if followed_by_paren => {
                self.advance();
                self.advance();
                let t = self.term()?;
                self.expect(Tok::Comma)?;
                let x = self.individual()?;
                self.expect(Tok::RParen)?;
                Ok(Formula::Fuses(t, x))
            }
            "P" | "PP" | "O" if followed_by_paren => {
                self.advance();
                self.advance();
                let x = self.individual()?;
                self.expect(Tok::Comma)?;
                let y = self.individual()?;
                self.expect(Tok::RParen)?;
                Ok(match name.as_str() {
                    "P" => Formula::Part(x, y),
                    "PP" => Formula::ProperPart(x, y),
                    _ => Formula::Overlap(x, y),
                })
            }
            _ if KEYWORDS.contains(&name.as_str()) => {
                self.syntax(format!("expected a formula, found keyword `{name}`"))
            }
            _ if Sort::of_name(&name) == Some(Sort::Individual) => {
                let x = self.individual()?;
                if *self.peek() == Tok::Equals {
                    self.advance();
                    let y = self.individual()?;
                    Ok(Formula::Equal(x, y))
                } else if self.is_keyword("in") {
                    self.advance();
                    let t = self.term()?;
                    Ok(Formula::Member(x, t))
                } else {
                    self.syntax(format!("expected `=` or `in` after `{x}`, found `{}`", self.peek().describe()))
                }
            }
            _ => self.plural_atom(),
        }
    }

    /// `T sub S` or `T eq S`.
    fn plural_atom(&mut self) -> PResult<Formula> {
        let left = self.term()?;
        if self.is_keyword("sub") {
            self.advance();
            Ok(Formula::Included(left, self.term()?))
        } else if self.is_keyword("eq") {
            self.advance();
            Ok(Formula::Coextensive(left, self.term()?))
        } else {
            self.syntax(format!("expected `sub` or `eq`, found `{}`", self.peek().describe()))
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let mut left = self.term_intersection()?;
        while *self.peek() == Tok::Plus {
            self.advance();
            let right = self.term_intersection()?;
            left = Term::union(left, right);
        }
        Ok(left)
    }

    fn term_intersection(&mut self) -> PResult<Term> {
        let mut left = self.term_primary()?;
        while *self.peek() == Tok::Amp {
            self.advance();
            let right = self.term_primary()?;
            left = Term::intersection(left, right);
        }
        Ok(left)
    }

    fn term_primary(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) if name == "I" && *self.peek_at(1) == Tok::LParen => {
                self.advance();
                self.advance();
                let x = self.individual()?;
                self.expect(Tok::RParen)?;
                Ok(Term::Singleton(x))
            }
            Tok::Ident(name) if name == "U" && *self.peek_at(1) == Tok::LParen => {
                self.advance();
                self.advance();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Term::components(t))
            }
            Tok::Ident(name)
                if !KEYWORDS.contains(&name.as_str()) && Sort::of_name(&name) == Some(Sort::Individual) =>
            {
                self.sort_error("expected a plural term")
            }
            Tok::Ident(_) => match self.variable()? {
                (name, Sort::Plural) => Ok(Term::Var(name)),
                (_, Sort::Individual) => unreachable!("individual names are rejected above"),
            },
            other => self.syntax(format!("expected a plural term, found `{}`", other.describe())),
        }
    }

    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            self.syntax(format!("unexpected `{}` after formula", self.peek().describe()))
        }
    }
}

/// Parses a formula.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { tokens: lex(text)?, pos: 0 };
    let f = p.formula().map_err(|e| e.1)?;
    p.finish().map_err(|e| e.1)?;
    Ok(f)
}

/// Parses a plural term on its own.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { tokens: lex(text)?, pos: 0 };
    let t = p.term().map_err(|e| e.1)?;
    p.finish().map_err(|e| e.1)?;
    Ok(t)
}

/// One `name : formula` entry of a theory file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryLine {
    pub line: usize,
    pub name: String,
    pub formula: Formula,
}

/// Parses a `.thy` file: one `name : formula` per line, `#` comments.
pub fn parse_theory_file(text: &str) -> Result<Vec<TheoryLine>, ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some((name, body)) = content.split_once(':') else {
            return Err(ParseError::Syntax { line: line_no, column: 1, message: "expected `name : formula`".into() });
        };
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(ParseError::Syntax {
                line: line_no,
                column: 1,
                message: format!("invalid obligation name `{name}`"),
            });
        }
        let offset = name.len() + 1;
        let formula = parse(body).map_err(|e| match e {
            ParseError::Syntax { line, column, message } => {
                ParseError::Syntax { line, column: column + offset, message }
            }
            ParseError::Sort { line, column, token, message } => {
                ParseError::Sort { line, column: column + offset, token, message }
            }
        });
        let formula = formula.map_err(|e| e.shift_line(line_no - 1))?;
        out.push(TheoryLine { line: line_no, name: name.to_string(), formula });
    }
    Ok(out)
}
