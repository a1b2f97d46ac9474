use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Int(i64),
    /// `'name`: a symbol value that is never read as a variable.
    Quoted(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Eq,
    Arrow,
    LArrow,
    Bang,
    Amp,
    Pipe,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(i) => format!("`{i}`"),
            Tok::Quoted(s) => format!("`'{s}`"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    pub(crate) fn text(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Eq => "=",
            Tok::Arrow => "->",
            Tok::LArrow => "<-",
            Tok::Bang => "!",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            _ => "",
        }
    }
}

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Whether `s` lexes as a single identifier.
pub(crate) fn is_identifier(s: &str) -> bool {
    let chars: Vec<char> = s.chars().collect();
    match chars.first() {
        Some(&c) if is_ident_start(c) => {}
        _ => return false,
    }
    chars.iter().enumerate().all(|(i, &c)| {
        is_ident_char(c) || (c == '-' && chars.get(i + 1).is_some_and(|&n| is_ident_char(n)))
    })
}

/// Tokenizes `src`. Unknown characters are reported and skipped, so the
/// token stream is always usable.
pub(crate) fn lex(src: &str) -> (Vec<(Tok, Pos)>, Vec<ParseError>) {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut errors = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let mut last = Pos { line: 1, column: 1 };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let start = i;
        let single = |t: Tok| Some((t, 1));
        let tok: Option<(Tok, usize)> = match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                    col += 1;
                }
                continue;
            }
            '{' => single(Tok::LBrace),
            '}' => single(Tok::RBrace),
            '(' => single(Tok::LParen),
            ')' => single(Tok::RParen),
            '[' => single(Tok::LBracket),
            ']' => single(Tok::RBracket),
            ',' => single(Tok::Comma),
            ':' => single(Tok::Colon),
            ';' => single(Tok::Semi),
            '=' => single(Tok::Eq),
            '!' => single(Tok::Bang),
            '&' => single(Tok::Amp),
            '|' => single(Tok::Pipe),
            '<' if chars.get(i + 1) == Some(&'-') => Some((Tok::LArrow, 2)),
            '-' if chars.get(i + 1) == Some(&'>') => Some((Tok::Arrow, 2)),
            '-' | '0'..='9' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let text: String = chars[i..j].iter().collect();
                match text.parse::<i64>() {
                    Ok(v) => Some((Tok::Int(v), j - i)),
                    Err(_) => {
                        errors.push(ParseError::new(pos, format!("invalid integer `{text}`")));
                        i = j;
                        col += j - start;
                        continue;
                    }
                }
            }
            '\'' => {
                let mut j = i + 1;
                let ok = chars.get(j).is_some_and(|&c| is_ident_start(c));
                if ok {
                    j = ident_end(&chars, j);
                    Some((Tok::Quoted(chars[i + 1..j].iter().collect()), j - i))
                } else {
                    errors.push(ParseError::new(pos, "`'` must be followed by a name".into()));
                    None
                }
            }
            c if is_ident_start(c) => {
                let j = ident_end(&chars, i);
                Some((Tok::Ident(chars[i..j].iter().collect()), j - i))
            }
            other => {
                errors.push(ParseError::new(pos, format!("unexpected character `{other}`")));
                None
            }
        };
        let width = tok.as_ref().map_or(1, |t| t.1);
        if let Some((t, _)) = tok {
            toks.push((t, pos));
            last = pos;
        }
        i += width;
        col += width;
    }
    // End of input sits on the last token so it always names a real position.
    toks.push((Tok::Eof, last));
    (toks, errors)
}

fn ident_end(chars: &[char], mut j: usize) -> usize {
    while j < chars.len() {
        let c = chars[j];
        let dash = c == '-' && chars.get(j + 1).is_some_and(|&n| is_ident_char(n));
        if is_ident_char(c) || dash {
            j += 1;
        } else {
            break;
        }
    }
    j
}
