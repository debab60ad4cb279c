use super::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    /// Numeric literal kept verbatim; the parser decides integer vs real.
    Number(String),
    Semi,
    Comma,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Eq,
    Assign,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DoubleArrow,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Number(s) => format!("number `{s}`"),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Eq => "`=`".into(),
            TokenKind::Assign => "`:=`".into(),
            TokenKind::Bang => "`!`".into(),
            TokenKind::Amp => "`&`".into(),
            TokenKind::Pipe => "`|`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::DoubleArrow => "`<->`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let push = |tokens: &mut Vec<Token>, kind| {
            tokens.push(Token {
                kind,
                line: tl,
                column: tc,
            })
        };
        match c {
            _ if c.is_whitespace() => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                push(&mut tokens, TokenKind::Ident(ident));
            }
            _ if c.is_ascii_digit() || c == '-' || c == '.' => {
                bump!();
                if c == '-' && chars.peek() == Some(&'>') {
                    bump!();
                    push(&mut tokens, TokenKind::Arrow);
                    continue;
                }
                let mut number = String::from(c);
                while let Some(&c) = chars.peek() {
                    let exponent_sign =
                        (c == '-' || c == '+') && matches!(number.chars().last(), Some('e' | 'E'));
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exponent_sign {
                        number.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                if number == "-" || number == "." {
                    return Err(ParseError::new(tl, tc, ParseErrorKind::UnexpectedChar(c)));
                }
                push(&mut tokens, TokenKind::Number(number));
            }
            ':' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    push(&mut tokens, TokenKind::Assign);
                } else {
                    return Err(ParseError::new(tl, tc, ParseErrorKind::UnexpectedChar(':')));
                }
            }
            '<' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    bump!();
                    if chars.peek() == Some(&'>') {
                        bump!();
                        push(&mut tokens, TokenKind::DoubleArrow);
                        continue;
                    }
                }
                return Err(ParseError::new(tl, tc, ParseErrorKind::UnexpectedChar('<')));
            }
            _ => {
                let kind = match c {
                    ';' => TokenKind::Semi,
                    ',' => TokenKind::Comma,
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    '=' => TokenKind::Eq,
                    '!' => TokenKind::Bang,
                    '&' => TokenKind::Amp,
                    '|' => TokenKind::Pipe,
                    other => {
                        return Err(ParseError::new(
                            tl,
                            tc,
                            ParseErrorKind::UnexpectedChar(other),
                        ))
                    }
                };
                bump!();
                push(&mut tokens, kind);
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        line,
        column,
    });
    Ok(tokens)
}
