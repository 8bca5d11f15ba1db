//! Tokens with 1-based source positions.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use super::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(BigInt),
    /// Source text (with `~` for minus) and value.
    Real(String, f64),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Lt,
    Gt,
    Comma,
    MergeOp,
    Colon,
    Eq,
    FatArrow,
    Arrow,
    Amp,
    Or,
    Bar,
    Dot,
    At,
    Plus,
    Star,
    AnnoOpen,
    AnnoClose,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "`{}`", x),
            Tok::Int(n) => return write!(f, "`{}`", n),
            Tok::Real(t, _) => return write!(f, "`{}`", t),
            Tok::Str(_) => "a string literal",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Comma => "`,`",
            Tok::MergeOp => "`,,`",
            Tok::Colon => "`:`",
            Tok::Eq => "`=`",
            Tok::FatArrow => "`=>`",
            Tok::Arrow => "`->`",
            Tok::Amp => "`&`",
            Tok::Or => "`\\/`",
            Tok::Bar => "`|`",
            Tok::Dot => "`.`",
            Tok::At => "`@`",
            Tok::Plus => "`+`",
            Tok::Star => "`*`",
            Tok::AnnoOpen => "`(*[`",
            Tok::AnnoClose => "`]*)`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

struct Lexer {
    chars: Vec<char>,
    i: usize,
    line: usize,
    col: usize,
}

impl Lexer {
    fn peek(&self, k: usize) -> Option<char> {
        self.chars.get(self.i + k).copied()
    }

    fn pos(&self) -> Pos {
        Pos { line: self.line, col: self.col }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek(0)?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(k, c)| self.peek(k) == Some(c))
    }

    fn skip_comment(&mut self, start: Pos) -> Result<(), ParseError> {
        // positioned just after `(*`
        let mut depth = 1;
        while depth > 0 {
            if self.starts_with("(*") {
                self.bump();
                self.bump();
                depth += 1;
            } else if self.starts_with("*)") {
                self.bump();
                self.bump();
                depth -= 1;
            } else if self.bump().is_none() {
                return Err(ParseError::new(start, "unterminated comment"));
            }
        }
        Ok(())
    }

    fn number(&mut self, start: Pos) -> Result<Tok, ParseError> {
        let mut text = String::new();
        if self.peek(0) == Some('~') {
            self.bump();
            text.push('-');
        }
        while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
            self.bump();
            text.push(c);
        }
        let mut is_real = false;
        if self.peek(0) == Some('.') && self.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            is_real = true;
            self.bump();
            text.push('.');
            while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
                self.bump();
                text.push(c);
            }
        }
        if matches!(self.peek(0), Some('e' | 'E')) {
            let (sign, digit_at) = match self.peek(1) {
                Some('~' | '-') => (true, 2),
                _ => (false, 1),
            };
            if self.peek(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                is_real = true;
                self.bump();
                text.push('e');
                if sign {
                    self.bump();
                    text.push('-');
                }
                while let Some(c) = self.peek(0).filter(char::is_ascii_digit) {
                    self.bump();
                    text.push(c);
                }
            }
        }
        let shown = text.replace('-', "~");
        if is_real {
            let value: f64 = text
                .parse()
                .map_err(|_| ParseError::new(start, alloc::format!("malformed real literal {}", shown)))?;
            Ok(Tok::Real(shown, value))
        } else {
            let value: BigInt = text
                .parse()
                .map_err(|_| ParseError::new(start, alloc::format!("malformed integer literal {}", shown)))?;
            Ok(Tok::Int(value))
        }
    }

    fn string(&mut self, start: Pos) -> Result<Tok, ParseError> {
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(ParseError::new(start, "unterminated string literal")),
                Some('"') => return Ok(Tok::Str(out)),
                Some('\\') => {
                    let at = self.pos();
                    match self.bump() {
                        Some('n') => out.push('\n'),
                        Some('t') => out.push('\t'),
                        Some('"') => out.push('"'),
                        Some('\\') => out.push('\\'),
                        _ => return Err(ParseError::new(at, "unknown escape sequence")),
                    }
                }
                Some(c) => out.push(c),
            }
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut lx = Lexer { chars: src.chars().collect(), i: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        while lx.peek(0).is_some_and(char::is_whitespace) {
            lx.bump();
        }
        let pos = lx.pos();
        let Some(c) = lx.peek(0) else {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok(out);
        };
        if lx.starts_with("(*[") {
            for _ in 0..3 {
                lx.bump();
            }
            out.push(Token { tok: Tok::AnnoOpen, pos });
            continue;
        }
        if lx.starts_with("]*)") {
            for _ in 0..3 {
                lx.bump();
            }
            out.push(Token { tok: Tok::AnnoClose, pos });
            continue;
        }
        if lx.starts_with("(*") {
            lx.bump();
            lx.bump();
            lx.skip_comment(pos)?;
            continue;
        }
        if c.is_ascii_digit() || (c == '~' && lx.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            let tok = lx.number(pos)?;
            out.push(Token { tok, pos });
            continue;
        }
        if c == '"' {
            let tok = lx.string(pos)?;
            out.push(Token { tok, pos });
            continue;
        }
        if is_ident_start(c) {
            let mut name = String::new();
            while let Some(c) = lx.peek(0).filter(|&c| is_ident_char(c)) {
                lx.bump();
                name.push(c);
            }
            out.push(Token { tok: Tok::Ident(name), pos });
            continue;
        }
        let two = [("=>", Tok::FatArrow), ("->", Tok::Arrow), (",,", Tok::MergeOp), ("\\/", Tok::Or)];
        if let Some((s, tok)) = two.iter().find(|(s, _)| lx.starts_with(s)) {
            for _ in 0..s.len() {
                lx.bump();
            }
            out.push(Token { tok: tok.clone(), pos });
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '=' => Tok::Eq,
            '&' => Tok::Amp,
            '|' => Tok::Bar,
            '.' => Tok::Dot,
            '@' => Tok::At,
            '+' => Tok::Plus,
            '*' => Tok::Star,
            _ => return Err(ParseError::new(pos, alloc::format!("unexpected character {:?}", c))),
        };
        lx.bump();
        out.push(Token { tok, pos });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers_and_negatives() {
        assert_eq!(toks("~5"), [Tok::Int(BigInt::from(-5)), Tok::Eof]);
        assert_eq!(toks("1.25"), [Tok::Real("1.25".into(), 1.25), Tok::Eof]);
        assert_eq!(toks("x.l"), [Tok::Ident("x".into()), Tok::Dot, Tok::Ident("l".into()), Tok::Eof]);
        assert_eq!(toks("1e3"), [Tok::Real("1e3".into(), 1000.0), Tok::Eof]);
    }

    #[test]
    fn comments_nest_and_annotations_survive() {
        assert_eq!(toks("(* a (* b *) c *) x"), [Tok::Ident("x".into()), Tok::Eof]);
        assert_eq!(toks("(*[ val ]*)"), [Tok::AnnoOpen, Tok::Ident("val".into()), Tok::AnnoClose, Tok::Eof]);
        assert!(tokenize("(* open").is_err());
    }

    #[test]
    fn positions_are_one_based() {
        let t = tokenize("a\n  ,, b'1").unwrap();
        assert_eq!(t[1].pos, Pos { line: 2, col: 3 });
        assert_eq!(t[2].tok, Tok::Ident("b'1".into()));
    }

    #[test]
    fn string_escapes() {
        assert_eq!(toks(r#""a\n\"b""#), [Tok::Str("a\n\"b".into()), Tok::Eof]);
    }
}
