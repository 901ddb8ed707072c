use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Quoted(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Pipe,
    Slash,
    If,
    Eq,
    Neq,
    Le,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Quoted(s) => format!("\"{s}\""),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Slash => "`/`".into(),
            Tok::If => "`:-`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let bump = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => bump(1, &mut i, &mut col),
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '"' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && chars[j] != '"' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '"' {
                    return Err(ParseError::new(tl, tc, "unterminated quoted name", vec![]));
                }
                let s: String = chars[start..j].iter().collect();
                if s.is_empty() {
                    return Err(ParseError::new(tl, tc, "empty quoted name", vec![]));
                }
                out.push(Token {
                    tok: Tok::Quoted(s),
                    line: tl,
                    col: tc,
                });
                col += j + 1 - i;
                i = j + 1;
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: tl,
                    col: tc,
                });
            }
            _ => {
                let next = chars.get(i + 1).copied();
                let (tok, n) = match (c, next) {
                    (':', Some('-')) => (Tok::If, 2),
                    ('!', Some('=')) => (Tok::Neq, 2),
                    ('<', Some('=')) => (Tok::Le, 2),
                    ('(', _) => (Tok::LParen, 1),
                    (')', _) => (Tok::RParen, 1),
                    ('{', _) => (Tok::LBrace, 1),
                    ('}', _) => (Tok::RBrace, 1),
                    (',', _) => (Tok::Comma, 1),
                    ('.', _) => (Tok::Dot, 1),
                    ('|', _) => (Tok::Pipe, 1),
                    ('/', _) => (Tok::Slash, 1),
                    ('=', _) => (Tok::Eq, 1),
                    _ => {
                        return Err(ParseError::new(tl, tc, format!("unexpected character `{c}`"), vec![]));
                    }
                };
                out.push(Token { tok, line: tl, col: tc });
                bump(n, &mut i, &mut col);
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Cursor over a token stream with expected-token bookkeeping for errors.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: tokenize(src)?,
            pos: 0,
        })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek2(&self) -> &Tok {
        &self.toks[(self.pos + 1).min(self.toks.len() - 1)].tok
    }

    pub(crate) fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    pub(crate) fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub(crate) fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.next();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, t: Tok) -> Result<(), ParseError> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&[&t.describe()]))
        }
    }

    pub(crate) fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok(s)
            }
            _ => Err(self.unexpected(&[what])),
        }
    }

    pub(crate) fn number(&mut self) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if s.chars().all(|c| c.is_ascii_digit()) => {
                let (l, c) = self.here();
                self.next();
                s.parse()
                    .map_err(|_| ParseError::new(l, c, format!("number `{s}` out of range"), vec![]))
            }
            _ => Err(self.unexpected(&["number"])),
        }
    }

    pub(crate) fn unexpected(&self, expected: &[&str]) -> ParseError {
        let (l, c) = self.here();
        ParseError::new(
            l,
            c,
            format!("unexpected {}", self.peek().describe()),
            expected.iter().map(|s| s.to_string()).collect(),
        )
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> ParseError {
        let (l, c) = self.here();
        ParseError::new(l, c, msg, vec![])
    }
}
