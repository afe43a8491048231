//! Tokenizer shared by the Turtle, N-Triples, rule and query parsers.

use super::RdfError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// `<...>`, without the brackets.
    Iri(String),
    /// `prefix:local`; either side may be empty.
    PName(String, String),
    /// `_:label`
    Blank(String),
    /// Quoted string with escapes resolved.
    Str(String),
    /// `@word`: language tag or `@prefix`/`@base`.
    At(String),
    Caret2,
    Number(String),
    /// `?name` or `$name`
    Var(String),
    /// Bare identifier or keyword.
    Word(String),
    Punct(&'static str),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub column: usize,
}

const PUNCT: &[&str] = &[
    "->", "&&", "||", "<=", ">=", "!=", "^", ".", ";", ",", "[", "]", "(", ")", "{", "}", "=", "<",
    ">", "!", "*", "/", "|", "+", "-",
];

pub(crate) struct Lexer<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    _src: &'a str,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            _src: src,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.chars.get(self.pos + n).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn err(&self, line: usize, column: usize, message: impl Into<String>) -> RdfError {
        RdfError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' {
                        break;
                    }
                    self.bump();
                }
            } else {
                break;
            }
        }
    }

    pub fn tokenize(mut self) -> Result<Vec<Token>, RdfError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let (line, column) = (self.line, self.column);
            let Some(c) = self.peek() else {
                break;
            };
            let tok = self.next_tok(c, line, column)?;
            out.push(Token { tok, line, column });
        }
        Ok(out)
    }

    fn next_tok(&mut self, c: char, line: usize, column: usize) -> Result<Tok, RdfError> {
        if c == '<' {
            if let Some(iri) = self.try_iri() {
                return Ok(Tok::Iri(iri));
            }
        }
        if c == '"' || c == '\'' {
            return self.string(c, line, column).map(Tok::Str);
        }
        if c == '_' && self.peek_at(1) == Some(':') {
            self.bump();
            self.bump();
            let label = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
            if label.is_empty() {
                return Err(self.err(line, column, "empty blank node label"));
            }
            return Ok(Tok::Blank(label));
        }
        if c == '?' || c == '$' {
            self.bump();
            let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
            if name.is_empty() {
                return Err(self.err(line, column, "empty variable name"));
            }
            return Ok(Tok::Var(name));
        }
        if c == '@' {
            self.bump();
            let word = self.take_while(|c| c.is_ascii_alphanumeric() || c == '-');
            if word.is_empty() {
                return Err(self.err(line, column, "expected language tag or directive after '@'"));
            }
            return Ok(Tok::At(word));
        }
        if c == '^' && self.peek_at(1) == Some('^') {
            self.bump();
            self.bump();
            return Ok(Tok::Caret2);
        }
        if self.starts_number() {
            return Ok(Tok::Number(self.number()));
        }
        if is_name_start(c) || c == ':' {
            let word = if c == ':' {
                String::new()
            } else {
                self.take_while(is_name_char)
            };
            if self.peek() == Some(':') {
                self.bump();
                let local = self.local_name();
                return Ok(Tok::PName(word, local));
            }
            return Ok(Tok::Word(word));
        }
        for p in PUNCT {
            if self.lookahead_is(p) {
                for _ in 0..p.chars().count() {
                    self.bump();
                }
                return Ok(Tok::Punct(p));
            }
        }
        Err(self.err(line, column, format!("unexpected character '{c}'")))
    }

    fn lookahead_is(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn local_name(&mut self) -> String {
        // Dots are allowed inside a local name but never at its end.
        let mut end = self.pos;
        while let Some(&c) = self.chars.get(end) {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                end += 1;
            } else {
                break;
            }
        }
        while end > self.pos && self.chars[end - 1] == '.' {
            end -= 1;
        }
        let mut s = String::new();
        while self.pos < end {
            s.push(self.bump().unwrap());
        }
        s
    }

    fn try_iri(&mut self) -> Option<String> {
        let mut i = self.pos + 1;
        let mut s = String::new();
        loop {
            let c = *self.chars.get(i)?;
            if c == '>' {
                break;
            }
            if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') {
                return None;
            }
            s.push(c);
            i += 1;
        }
        if s.is_empty() || !s.contains(':') {
            return None;
        }
        while self.pos <= i {
            self.bump();
        }
        Some(s)
    }

    fn starts_number(&self) -> bool {
        let digit = |c: Option<char>| c.is_some_and(|c| c.is_ascii_digit());
        match self.peek() {
            Some(c) if c.is_ascii_digit() => true,
            Some('+') | Some('-') => {
                digit(self.peek_at(1)) || (self.peek_at(1) == Some('.') && digit(self.peek_at(2)))
            }
            Some('.') => digit(self.peek_at(1)),
            _ => false,
        }
    }

    fn number(&mut self) -> String {
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.bump();
        }
        s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            s.push('.');
            s.push_str(&self.take_while(|c| c.is_ascii_digit()));
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                s.push(self.bump().unwrap());
                if sign {
                    s.push(self.bump().unwrap());
                }
                s.push_str(&self.take_while(|c| c.is_ascii_digit()));
            }
        }
        s
    }

    fn string(&mut self, quote: char, line: usize, column: usize) -> Result<String, RdfError> {
        let long = self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        let n = if long { 3 } else { 1 };
        for _ in 0..n {
            self.bump();
        }
        let mut s = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(self.err(line, column, "unterminated string"));
            };
            if c == quote {
                if !long {
                    self.bump();
                    return Ok(s);
                }
                if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                    self.bump();
                    self.bump();
                    self.bump();
                    return Ok(s);
                }
            }
            if (c == '\n' || c == '\r') && !long {
                return Err(self.err(line, column, "newline in string"));
            }
            self.bump();
            if c == '\\' {
                let (el, ec) = (self.line, self.column);
                let e = self
                    .bump()
                    .ok_or_else(|| self.err(el, ec, "unterminated escape"))?;
                match e {
                    't' => s.push('\t'),
                    'n' => s.push('\n'),
                    'r' => s.push('\r'),
                    'b' => s.push('\u{8}'),
                    'f' => s.push('\u{c}'),
                    '"' => s.push('"'),
                    '\'' => s.push('\''),
                    '\\' => s.push('\\'),
                    'u' | 'U' => {
                        let len = if e == 'u' { 4 } else { 8 };
                        let hex: String = (0..len).filter_map(|_| self.bump()).collect();
                        let ch = u32::from_str_radix(&hex, 16)
                            .ok()
                            .filter(|_| hex.len() == len)
                            .and_then(char::from_u32)
                            .ok_or_else(|| self.err(el, ec, format!("bad unicode escape \\{e}{hex}")))?;
                        s.push(ch);
                    }
                    other => return Err(self.err(el, ec, format!("unknown escape \\{other}"))),
                }
            } else {
                s.push(c);
            }
        }
    }
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, RdfError> {
    Lexer::new(src).tokenize()
}
