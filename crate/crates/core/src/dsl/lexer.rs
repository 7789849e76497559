//! Tokenizer for the `.pspec` surface syntax.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    // Keywords.
    Process,
    Compose,
    Env,
    Type,
    In,
    Out,
    Buf,
    Init,
    InitProcess,
    Asm,
    Ending,
    Calc,
    CalcF,
    Wcet,
    Loop,
    Auto,
    Manual,
    Restart,
    Gap,
    If,
    Then,
    Else,
    And,
    Or,
    Not,
    True,
    False,
    Ev,
    Msg,
    Ft,
    NonEmpty,
    // Punctuation.
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Semi,
    Colon,
    Dot,
    Assign,
    Prime,
    AtSign,
    Pipe,
    Pipe2,
    AltOp,
    // Operators.
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    // Unicode interval brackets; `<`/`>` double as ASCII spellings.
    IntervalOpen,
    IntervalClose,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.lexeme()),
        }
    }

    fn lexeme(&self) -> &'static str {
        match self {
            Tok::Process => "process",
            Tok::Compose => "compose",
            Tok::Env => "env",
            Tok::Type => "type",
            Tok::In => "in",
            Tok::Out => "out",
            Tok::Buf => "buf",
            Tok::Init => "init",
            Tok::InitProcess => "initProcess",
            Tok::Asm => "asm",
            Tok::Ending => "ending",
            Tok::Calc => "calc",
            Tok::CalcF => "calcF",
            Tok::Wcet => "wcet",
            Tok::Loop => "loop",
            Tok::Auto => "auto",
            Tok::Manual => "manual",
            Tok::Restart => "restart",
            Tok::Gap => "gap",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::And => "and",
            Tok::Or => "or",
            Tok::Not => "not",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Ev => "ev",
            Tok::Msg => "msg",
            Tok::Ft => "ft",
            Tok::NonEmpty => "nonempty",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::Assign => "=",
            Tok::Prime => "'",
            Tok::AtSign => "@",
            Tok::Pipe => "|",
            Tok::Pipe2 => "||",
            Tok::AltOp => "(+)",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::IntervalOpen => "\u{27e8}",
            Tok::IntervalClose => "\u{27e9}",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "process" => Tok::Process,
        "compose" => Tok::Compose,
        "env" => Tok::Env,
        "type" => Tok::Type,
        "in" => Tok::In,
        "out" => Tok::Out,
        "buf" => Tok::Buf,
        "init" => Tok::Init,
        "initProcess" => Tok::InitProcess,
        "asm" => Tok::Asm,
        "ending" => Tok::Ending,
        "calc" => Tok::Calc,
        "calcF" => Tok::CalcF,
        "wcet" => Tok::Wcet,
        "loop" => Tok::Loop,
        "auto" => Tok::Auto,
        "manual" => Tok::Manual,
        "restart" => Tok::Restart,
        "gap" => Tok::Gap,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "and" => Tok::And,
        "or" => Tok::Or,
        "not" => Tok::Not,
        "true" => Tok::True,
        "false" => Tok::False,
        "ev" => Tok::Ev,
        "msg" => Tok::Msg,
        "ft" => Tok::Ft,
        "nonempty" => Tok::NonEmpty,
        _ => return None,
    })
}

pub fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, LexError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    macro_rules! advance {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        match c {
            ' ' | '\t' | '\r' | '\n' => advance!(),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance!();
                }
            }
            '{' => {
                toks.push((Tok::LBrace, pos));
                advance!();
            }
            '}' => {
                toks.push((Tok::RBrace, pos));
                advance!();
            }
            '(' => {
                // `(+)` is the alternate-composition operator.
                if i + 2 < chars.len() && chars[i + 1] == '+' && chars[i + 2] == ')' {
                    toks.push((Tok::AltOp, pos));
                    advance!();
                    advance!();
                    advance!();
                } else {
                    toks.push((Tok::LParen, pos));
                    advance!();
                }
            }
            ')' => {
                toks.push((Tok::RParen, pos));
                advance!();
            }
            ',' => {
                toks.push((Tok::Comma, pos));
                advance!();
            }
            ';' => {
                toks.push((Tok::Semi, pos));
                advance!();
            }
            ':' => {
                toks.push((Tok::Colon, pos));
                advance!();
            }
            '.' => {
                toks.push((Tok::Dot, pos));
                advance!();
            }
            '\'' => {
                toks.push((Tok::Prime, pos));
                advance!();
            }
            '@' => {
                toks.push((Tok::AtSign, pos));
                advance!();
            }
            '+' => {
                toks.push((Tok::Plus, pos));
                advance!();
            }
            '-' => {
                toks.push((Tok::Minus, pos));
                advance!();
            }
            '*' => {
                toks.push((Tok::Star, pos));
                advance!();
            }
            '/' => {
                toks.push((Tok::Slash, pos));
                advance!();
            }
            '%' => {
                toks.push((Tok::Percent, pos));
                advance!();
            }
            '|' => {
                if i + 1 < chars.len() && chars[i + 1] == '|' {
                    toks.push((Tok::Pipe2, pos));
                    advance!();
                    advance!();
                } else {
                    toks.push((Tok::Pipe, pos));
                    advance!();
                }
            }
            '=' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    toks.push((Tok::EqEq, pos));
                    advance!();
                    advance!();
                } else {
                    toks.push((Tok::Assign, pos));
                    advance!();
                }
            }
            '!' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    toks.push((Tok::NotEq, pos));
                    advance!();
                    advance!();
                } else {
                    return Err(LexError { pos, message: "expected `!=`".to_string() });
                }
            }
            '<' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    toks.push((Tok::Le, pos));
                    advance!();
                    advance!();
                } else {
                    toks.push((Tok::Lt, pos));
                    advance!();
                }
            }
            '>' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    toks.push((Tok::Ge, pos));
                    advance!();
                    advance!();
                } else {
                    toks.push((Tok::Gt, pos));
                    advance!();
                }
            }
            '\u{27e8}' => {
                toks.push((Tok::IntervalOpen, pos));
                advance!();
            }
            '\u{27e9}' => {
                toks.push((Tok::IntervalClose, pos));
                advance!();
            }
            '0'..='9' => {
                let mut value: i64 = 0;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    value = value
                        .wrapping_mul(10)
                        .wrapping_add((chars[i] as u8 - b'0') as i64);
                    advance!();
                }
                toks.push((Tok::Int(value), pos));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut word = String::new();
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    word.push(chars[i]);
                    advance!();
                }
                toks.push((keyword(&word).unwrap_or(Tok::Ident(word)), pos));
            }
            other => {
                return Err(LexError {
                    pos,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    toks.push((Tok::Eof, Pos { line, col }));
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_operators_and_keywords() {
        let toks: Vec<Tok> = lex("compose M = (P ; Q) || R (+) S")
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        assert_eq!(
            toks,
            vec![
                Tok::Compose,
                Tok::Ident("M".into()),
                Tok::Assign,
                Tok::LParen,
                Tok::Ident("P".into()),
                Tok::Semi,
                Tok::Ident("Q".into()),
                Tok::RParen,
                Tok::Pipe2,
                Tok::Ident("R".into()),
                Tok::AltOp,
                Tok::Ident("S".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn alt_op_requires_adjacency() {
        let toks: Vec<Tok> = lex("( + )").unwrap().into_iter().map(|(t, _)| t).collect();
        assert_eq!(toks, vec![Tok::LParen, Tok::Plus, Tok::RParen, Tok::Eof]);
    }

    #[test]
    fn comments_and_positions() {
        let toks = lex("# comment\nenv E {}").unwrap();
        assert_eq!(toks[0], (Tok::Env, Pos { line: 2, col: 1 }));
    }

    #[test]
    fn unicode_interval_brackets() {
        let toks: Vec<Tok> = lex("\u{27e8}ev\u{27e9}")
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect();
        assert_eq!(toks, vec![Tok::IntervalOpen, Tok::Ev, Tok::IntervalClose, Tok::Eof]);
    }
}
