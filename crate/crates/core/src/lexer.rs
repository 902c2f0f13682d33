//! Tokenizer for Java / Processing sketches and the symbol normalization
//! applied before vectorization and tiling.
//!
//! The tokenizer is total: any UTF-8 text yields a token cover of all
//! non-whitespace bytes. Unrecognized characters become [`TokenKind::Other`]
//! tokens and unterminated strings or block comments run to end of file.

use serde::{Deserialize, Serialize};

/// One submission (or the instructor template).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    pub id: String,
    pub path: String,
    pub content: String,
}

impl SourceFile {
    pub fn new(id: impl Into<String>, path: impl Into<String>, content: impl Into<String>) -> Self {
        SourceFile {
            id: id.into(),
            path: path.into(),
            content: content.into(),
        }
    }

    /// In-memory file whose path is its id.
    pub fn inline(id: impl Into<String>, content: impl Into<String>) -> Self {
        let id = id.into();
        SourceFile {
            path: id.clone(),
            id,
            content: content.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Keyword,
    Ident,
    Number,
    String,
    Char,
    Operator,
    Punct,
    Comment,
    Other,
}

/// Half-open byte range into a file's content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ByteSpan {
    pub start: usize,
    pub end: usize,
}

impl ByteSpan {
    pub fn new(start: usize, end: usize) -> Self {
        ByteSpan { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub span: ByteSpan,
    /// 1-based line.
    pub line: usize,
    /// 1-based column, counted in characters.
    pub col: usize,
}

/// Java keywords, reserved literals, and Processing's `color` primitive.
/// Processing API names (`setup`, `draw`, `ellipse`, ...) are identifiers.
const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "color",
    "const", "continue", "default", "do", "double", "else", "enum", "extends", "false", "final",
    "finally", "float", "for", "goto", "if", "implements", "import", "instanceof", "int",
    "interface", "long", "native", "new", "null", "package", "private", "protected", "public",
    "return", "short", "static", "strictfp", "super", "switch", "synchronized", "this", "throw",
    "throws", "transient", "true", "try", "var", "void", "volatile", "while",
];

/// Longest first, so the scanner can take the first prefix match.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=",
    "/=", "%=", "&=", "|=", "^=", "->", "::", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">",
    "!", "~", "?", ":", "&", "|", "^",
];

const PUNCT: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', '@'];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

fn is_ident_start(c: char) -> bool {
    c == '_' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c.is_alphanumeric()
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, skip: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(skip)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn bump_while(&mut self, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            self.bump();
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    /// Quoted literal body after the opening quote; stops after the matching
    /// close quote or at end of input.
    fn quoted(&mut self, quote: char) {
        while let Some(c) = self.bump() {
            match c {
                '\\' => {
                    self.bump();
                }
                c if c == quote => return,
                _ => {}
            }
        }
    }

    fn number(&mut self) {
        let rest = self.rest();
        let hex = rest.starts_with("0x") || rest.starts_with("0X");
        let mut seen_dot = false;
        let mut prev = '\0';
        while let Some(c) = self.peek() {
            let take = match c {
                '0'..='9' | 'a'..='z' | 'A'..='Z' | '_' => true,
                '.' => !hex && !seen_dot && !matches!(prev, 'e' | 'E'),
                '+' | '-' => !hex && matches!(prev, 'e' | 'E'),
                _ => false,
            };
            if !take {
                break;
            }
            seen_dot |= c == '.';
            prev = c;
            self.bump();
        }
    }
}

/// Split `source` into tokens. Never fails.
pub fn tokenize(source: &SourceFile) -> Vec<Token> {
    tokenize_str(&source.content)
}

pub fn tokenize_str(src: &str) -> Vec<Token> {
    let mut sc = Scanner {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();

    while let Some(c) = sc.peek() {
        if c.is_whitespace() {
            sc.bump();
            continue;
        }
        let (start, line, col) = (sc.pos, sc.line, sc.col);
        let rest = sc.rest();

        let kind = if rest.starts_with("//") {
            sc.bump_while(|c| c != '\n');
            TokenKind::Comment
        } else if rest.starts_with("/*") {
            sc.bump();
            sc.bump();
            match sc.rest().find("*/") {
                Some(off) => {
                    let target = sc.pos + off + 2;
                    while sc.pos < target {
                        sc.bump();
                    }
                }
                None => sc.bump_while(|_| true),
            }
            TokenKind::Comment
        } else if c == '"' {
            sc.bump();
            sc.quoted('"');
            TokenKind::String
        } else if c == '\'' {
            sc.bump();
            sc.quoted('\'');
            TokenKind::Char
        } else if c.is_ascii_digit()
            || (c == '.' && sc.peek_at(1).is_some_and(|n| n.is_ascii_digit()))
        {
            sc.number();
            TokenKind::Number
        } else if is_ident_start(c) {
            sc.bump_while(is_ident_continue);
            if is_keyword(&src[start..sc.pos]) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            }
        } else if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) {
            for _ in 0..op.len() {
                sc.bump();
            }
            TokenKind::Operator
        } else if PUNCT.contains(&c) {
            sc.bump();
            TokenKind::Punct
        } else {
            sc.bump();
            TokenKind::Other
        };

        tokens.push(Token {
            kind,
            text: src[start..sc.pos].to_string(),
            span: ByteSpan::new(start, sc.pos),
            line,
            col,
        });
    }
    tokens
}

/// How tokens are mapped to symbols.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormalizationProfile {
    /// Comments dropped; identifiers and literals abstracted to placeholders.
    #[default]
    Normalized,
    /// Raw token text, comments included.
    Text,
}

impl NormalizationProfile {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormalizationProfile::Normalized => "normalized",
            NormalizationProfile::Text => "text",
        }
    }
}

impl std::fmt::Display for NormalizationProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for NormalizationProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "normalized" => Ok(NormalizationProfile::Normalized),
            "text" => Ok(NormalizationProfile::Text),
            other => Err(format!("unknown profile `{other}` (expected normalized|text)")),
        }
    }
}

/// Symbol sequence for one file, each symbol tagged with the byte span of
/// the token it came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NormalizedStream {
    pub source_id: String,
    pub symbols: Vec<String>,
    pub origins: Vec<ByteSpan>,
}

impl NormalizedStream {
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

pub fn normalize(
    source_id: &str,
    tokens: &[Token],
    profile: NormalizationProfile,
) -> NormalizedStream {
    let mut out = NormalizedStream {
        source_id: source_id.to_string(),
        symbols: Vec::with_capacity(tokens.len()),
        origins: Vec::with_capacity(tokens.len()),
    };
    for tok in tokens {
        let symbol = match profile {
            NormalizationProfile::Text => tok.text.clone(),
            NormalizationProfile::Normalized => match tok.kind {
                TokenKind::Comment => continue,
                TokenKind::Ident => "ID".to_string(),
                TokenKind::Number => "NUM".to_string(),
                TokenKind::String => "STR".to_string(),
                TokenKind::Char => "CHR".to_string(),
                TokenKind::Other => "?".to_string(),
                TokenKind::Keyword | TokenKind::Operator | TokenKind::Punct => tok.text.clone(),
            },
        };
        out.symbols.push(symbol);
        out.origins.push(tok.span);
    }
    out
}

/// Tokenize and normalize in one step.
pub fn stream_of(source: &SourceFile, profile: NormalizationProfile) -> NormalizedStream {
    normalize(&source.id, &tokenize(source), profile)
}
