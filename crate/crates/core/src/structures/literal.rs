//! Text literal format for structures.
//!
//! ```text
//! n=3
//! part: (0,0) (1,1) (2,2) (0,2) (1,2)
//! ```
//!
//! or, for a fusion structure, `fusion: ({0,1},2) ({},0) ...`. Pairs are
//! whitespace separated and may continue over several lines; `#` starts a
//! comment.

use super::{FusionStructure, PartStructure, Plurality, Structure, StructureError};

pub fn format(s: &Structure) -> String {
    match s {
        Structure::Part(p) => format_part(p),
        Structure::Fusion(f) => format_fusion(f),
    }
}

pub fn format_part(p: &PartStructure) -> String {
    let mut out = format!("n={}\npart:", p.n());
    for (x, y) in p.pairs() {
        out.push_str(&format!(" ({x},{y})"));
    }
    out.push('\n');
    out
}

pub fn format_fusion(f: &FusionStructure) -> String {
    let mut out = format!("n={}\nfusion:", f.n());
    for (zz, x) in f.pairs() {
        out.push_str(&format!(" ({zz},{x})"));
    }
    out.push('\n');
    out
}

struct Cursor {
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        let mut chars = Vec::new();
        for (i, line) in src.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            chars.extend(line.chars().map(|c| (i + 1, c)));
            chars.push((i + 1, '\n'));
        }
        Cursor { chars, pos: 0 }
    }

    fn line(&self) -> usize {
        self.chars.get(self.pos).or_else(|| self.chars.last()).map_or(1, |(l, _)| *l)
    }

    fn error(&self, message: impl Into<String>) -> StructureError {
        StructureError::Literal { line: self.line(), message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|(_, c)| *c)
    }

    fn expect(&mut self, want: char) -> Result<(), StructureError> {
        match self.peek() {
            Some(c) if c == want => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => Err(self.error(format!("expected `{want}`, found `{c}`"))),
            None => Err(self.error(format!("expected `{want}`, found end of input"))),
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().map(|(_, c)| c).collect()
    }

    fn number(&mut self) -> Result<usize, StructureError> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let digits: String = self.chars[start..self.pos].iter().map(|(_, c)| c).collect();
        digits.parse().map_err(|_| self.error(format!("number `{digits}` is too large")))
    }

    fn plurality(&mut self, n: usize) -> Result<Plurality, StructureError> {
        self.expect('{')?;
        let mut zz = Plurality::EMPTY;
        if self.peek() == Some('}') {
            self.pos += 1;
            return Ok(zz);
        }
        loop {
            let x = self.number()?;
            if x >= n {
                return Err(self.error(format!("member {x} out of range for n={n}")));
            }
            zz = zz.with(x);
            match self.peek() {
                Some(',') => self.pos += 1,
                Some('}') => {
                    self.pos += 1;
                    return Ok(zz);
                }
                _ => return Err(self.error("expected `,` or `}` in plurality")),
            }
        }
    }

    fn index(&mut self, n: usize) -> Result<usize, StructureError> {
        let x = self.number()?;
        if x >= n {
            return Err(self.error(format!("index {x} out of range for n={n}")));
        }
        Ok(x)
    }
}

/// Parses a structure literal.
pub fn parse(src: &str) -> Result<Structure, StructureError> {
    let mut cur = Cursor::new(src);
    if cur.word() != "n" {
        return Err(cur.error("expected header `n=<int>`"));
    }
    cur.expect('=')?;
    let n = cur.number()?;
    if n > super::DOMAIN_LIMIT {
        return Err(StructureError::Capacity { n, limit: super::DOMAIN_LIMIT });
    }
    let section = cur.word();
    cur.expect(':')?;
    let structure = match section.as_str() {
        "part" => {
            let mut pairs = Vec::new();
            while cur.peek().is_some() {
                cur.expect('(')?;
                let x = cur.index(n)?;
                cur.expect(',')?;
                let y = cur.index(n)?;
                cur.expect(')')?;
                pairs.push((x, y));
            }
            Structure::Part(PartStructure::new(n, pairs)?)
        }
        "fusion" => {
            let mut pairs = Vec::new();
            while cur.peek().is_some() {
                cur.expect('(')?;
                let zz = cur.plurality(n)?;
                cur.expect(',')?;
                let x = cur.index(n)?;
                cur.expect(')')?;
                pairs.push((zz, x));
            }
            Structure::Fusion(FusionStructure::new(n, pairs)?)
        }
        "" => return Err(cur.error("expected `part:` or `fusion:`")),
        other => return Err(cur.error(format!("unknown section `{other}`"))),
    };
    Ok(structure)
}
