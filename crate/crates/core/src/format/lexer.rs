//! Tokenizer for `.pkb` documents.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    Number(f64),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Str(_) => "string".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

/// Lexical error: message and byte range.
pub(crate) type LexError = (String, usize, usize);

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

pub(crate) fn lex(text: &str) -> (Vec<Token>, Vec<LexError>) {
    let mut tokens = Vec::new();
    let mut errors = Vec::new();
    let bytes = text.as_bytes();
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        let single = |tok| Token { tok, start, end: start + 1 };
        match c {
            c if c.is_whitespace() => {}
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '{' => tokens.push(single(Tok::LBrace)),
            '}' => tokens.push(single(Tok::RBrace)),
            '(' => tokens.push(single(Tok::LParen)),
            ')' => tokens.push(single(Tok::RParen)),
            ',' => tokens.push(single(Tok::Comma)),
            '"' => {
                let mut s = String::new();
                let mut end = None;
                while let Some((i, c)) = chars.next() {
                    match c {
                        '"' => {
                            end = Some(i + 1);
                            break;
                        }
                        '\\' => match chars.next() {
                            Some((_, '"')) => s.push('"'),
                            Some((_, '\\')) => s.push('\\'),
                            Some((_, 'n')) => s.push('\n'),
                            Some((_, 't')) => s.push('\t'),
                            Some((j, other)) => {
                                errors.push((format!("unknown escape `\\{other}`"), i, j + other.len_utf8()));
                            }
                            None => break,
                        },
                        c => s.push(c),
                    }
                }
                match end {
                    Some(end) => tokens.push(Token { tok: Tok::Str(s), start, end }),
                    None => errors.push(("unterminated string".into(), start, text.len())),
                }
            }
            c if c == '-' || c.is_ascii_digit() => {
                let mut end = start + 1;
                while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                    end += 1;
                }
                // consume any trailing identifier characters so `12abc` is one bad token
                while end < bytes.len() && (bytes[end] as char).is_ascii_alphanumeric() {
                    end += 1;
                }
                while chars.peek().is_some_and(|&(i, _)| i < end) {
                    chars.next();
                }
                let lexeme = &text[start..end];
                match parse_number(lexeme) {
                    Some(v) => tokens.push(Token { tok: Tok::Number(v), start, end }),
                    None => errors.push((format!("malformed number `{lexeme}`"), start, end)),
                }
            }
            c if is_ident_start(c) => {
                let mut end = start + c.len_utf8();
                while let Some(&(i, c)) = chars.peek() {
                    if !is_ident_continue(c) {
                        break;
                    }
                    chars.next();
                    end = i + c.len_utf8();
                }
                tokens.push(Token { tok: Tok::Ident(text[start..end].to_string()), start, end });
            }
            other => errors.push((
                format!("unexpected character `{}`", other.escape_debug()),
                start,
                start + other.len_utf8(),
            )),
        }
    }
    tokens.push(Token { tok: Tok::Eof, start: text.len(), end: text.len() });
    (tokens, errors)
}

/// Decimal literal: optional `-`, digits, optional `.digits`.
fn parse_number(s: &str) -> Option<f64> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let (int, frac) = match digits.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (digits, None),
    };
    let all_digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int) || frac.is_some_and(|f| !all_digits(f)) {
        return None;
    }
    s.parse().ok()
}
