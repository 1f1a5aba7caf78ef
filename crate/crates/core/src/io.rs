//! Fan and endomorphism documents (JSON), divisor/class argument parsing.
//!
//! Fan files look like
//! `{"dim":2,"rays":[[1,0],[0,1],[-1,-1]],"cones":[[0,1],[1,2],[2,0]]}`
//! with an optional `"name"`; endomorphism files like
//! `{"matrix":[[2,0],[0,2]]}`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::divisor::{DivisorClass, TorusDivisor};
use crate::error::Error;
use crate::fan::Fan;
use crate::lattice::{int_vector, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DocumentErrorKind {
    Syntax,
    Schema,
    DimensionMismatch,
    DuplicateRay,
    IndexOutOfRange,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocumentError {
    pub kind: DocumentErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DocumentErrorKind::Syntax => "syntax error",
            DocumentErrorKind::Schema => "schema error",
            DocumentErrorKind::DimensionMismatch => "dimension mismatch",
            DocumentErrorKind::DuplicateRay => "duplicate ray",
            DocumentErrorKind::IndexOutOfRange => "index out of range",
        };
        write!(f, "{kind} at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for DocumentError {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanDocument {
    pub dim: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EndoDocument {
    pub matrix: Vec<Vec<i64>>,
}

impl FanDocument {
    pub fn from_fan(fan: &Fan) -> Option<Self> {
        use num_traits::ToPrimitive;
        let rays = fan
            .rays()
            .iter()
            .map(|r| r.iter().map(ToPrimitive::to_i64).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(FanDocument {
            dim: fan.dim(),
            rays,
            cones: fan.cones().to_vec(),
            name: fan.name().map(str::to_string),
        })
    }

    pub fn to_fan(&self) -> Result<Fan, Error> {
        let fan = Fan::new(
            self.dim,
            self.rays.iter().map(|r| int_vector(r)).collect(),
            self.cones.clone(),
        )?;
        Ok(match &self.name {
            Some(n) => fan.with_name(n.clone()),
            None => fan,
        })
    }

    /// Compact single-line JSON with keys in the order dim, rays, cones, name.
    pub fn emit(&self) -> String {
        serde_json::to_string(self).expect("document serialises")
    }
}

impl EndoDocument {
    pub fn to_matrix(&self) -> Result<IntMatrix, Error> {
        IntMatrix::from_rows(&self.matrix)
    }

    pub fn emit(&self) -> String {
        serde_json::to_string(self).expect("document serialises")
    }
}

fn syntax(e: serde_json::Error) -> DocumentError {
    let kind = if e.is_data() {
        DocumentErrorKind::Schema
    } else {
        DocumentErrorKind::Syntax
    };
    let message = e.to_string();
    // serde_json appends " at line L column C"; keep just the description
    let message = match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message,
    };
    DocumentError {
        kind,
        line: e.line(),
        column: e.column(),
        message,
    }
}

/// Parses and structurally validates a fan document.
pub fn parse_fan(text: &str) -> Result<FanDocument, DocumentError> {
    let doc: FanDocument = serde_json::from_str(text).map_err(syntax)?;
    let spans = Spans::scan(text);
    let err = |kind, path: &[Seg], message: String| {
        let (line, column) = spans.position(text, path);
        DocumentError {
            kind,
            line,
            column,
            message,
        }
    };
    if doc.dim == 0 {
        return Err(err(
            DocumentErrorKind::DimensionMismatch,
            &[Seg::Key("dim")],
            "dim must be positive".into(),
        ));
    }
    let mut seen: HashMap<&[i64], usize> = HashMap::new();
    for (i, r) in doc.rays.iter().enumerate() {
        if r.len() != doc.dim {
            return Err(err(
                DocumentErrorKind::DimensionMismatch,
                &[Seg::Key("rays"), Seg::Index(i)],
                format!("ray {i} has {} entries, dim is {}", r.len(), doc.dim),
            ));
        }
        if let Some(j) = seen.insert(r, i) {
            return Err(err(
                DocumentErrorKind::DuplicateRay,
                &[Seg::Key("rays"), Seg::Index(i)],
                format!("ray {i} repeats ray {j}"),
            ));
        }
    }
    for (c, cone) in doc.cones.iter().enumerate() {
        for (k, &idx) in cone.iter().enumerate() {
            if idx >= doc.rays.len() {
                return Err(err(
                    DocumentErrorKind::IndexOutOfRange,
                    &[Seg::Key("cones"), Seg::Index(c), Seg::Index(k)],
                    format!("cone {c} refers to ray {idx}, but there are {} rays", doc.rays.len()),
                ));
            }
        }
    }
    Ok(doc)
}

/// Parses an endomorphism document; `dim`, when given, must match.
pub fn parse_endo(text: &str, dim: Option<usize>) -> Result<EndoDocument, DocumentError> {
    let doc: EndoDocument = serde_json::from_str(text).map_err(syntax)?;
    let spans = Spans::scan(text);
    let n = doc.matrix.len();
    let expected = dim.unwrap_or(n);
    let bad = if n != expected || n == 0 {
        Some((vec![Seg::Key("matrix")], format!("matrix has {n} rows, expected {expected}")))
    } else {
        doc.matrix.iter().enumerate().find(|(_, r)| r.len() != n).map(|(i, r)| {
            (
                vec![Seg::Key("matrix"), Seg::Index(i)],
                format!("row {i} has {} entries, matrix must be {n}x{n}", r.len()),
            )
        })
    };
    if let Some((path, message)) = bad {
        let (line, column) = spans.position(text, &path);
        return Err(DocumentError {
            kind: DocumentErrorKind::DimensionMismatch,
            line,
            column,
            message,
        });
    }
    Ok(doc)
}

fn parse_ints(s: &str) -> Result<Vec<BigInt>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<BigInt>().map_err(|_| format!("not an integer: {p:?}")))
        .collect()
}

/// `"1,0,-2"` as ray coefficients.
pub fn parse_divisor(s: &str) -> Result<TorusDivisor, String> {
    parse_ints(s).map(TorusDivisor)
}

/// `"3,2"` as Pic coordinates.
pub fn parse_class(s: &str) -> Result<DivisorClass, String> {
    parse_ints(s).map(DivisorClass)
}

/// Bundled fixtures, keyed by file name.
pub const BUNDLED: &[(&str, &str)] = &[
    ("p1.fan.json", include_str!("../data/p1.fan.json")),
    ("p2.fan.json", include_str!("../data/p2.fan.json")),
    ("p3.fan.json", include_str!("../data/p3.fan.json")),
    ("p1xp1.fan.json", include_str!("../data/p1xp1.fan.json")),
    ("f1.fan.json", include_str!("../data/f1.fan.json")),
    ("f2.fan.json", include_str!("../data/f2.fan.json")),
    ("f3.fan.json", include_str!("../data/f3.fan.json")),
    ("swap2.endo.json", include_str!("../data/swap2.endo.json")),
];

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Clone, Copy, Debug)]
enum Seg<'a> {
    Key(&'a str),
    Index(usize),
}

/// Byte offsets of every value in an already-valid JSON text.
enum Node {
    Object(usize, Vec<(String, Node)>),
    Array(usize, Vec<Node>),
    Scalar(usize),
}

impl Node {
    fn start(&self) -> usize {
        match self {
            Node::Object(s, _) | Node::Array(s, _) | Node::Scalar(s) => *s,
        }
    }
}

struct Spans {
    root: Option<Node>,
}

impl Spans {
    fn scan(text: &str) -> Spans {
        let mut p = Scanner { bytes: text.as_bytes(), pos: 0 };
        Spans { root: p.value() }
    }

    /// 1-based line and column of the deepest node along `path`.
    fn position(&self, text: &str, path: &[Seg]) -> (usize, usize) {
        let mut offset = 0;
        let mut node = self.root.as_ref();
        for seg in path {
            let Some(n) = node else { break };
            offset = n.start();
            node = match (n, seg) {
                (Node::Object(_, fields), Seg::Key(k)) => {
                    fields.iter().find(|(name, _)| name == k).map(|(_, v)| v)
                }
                (Node::Array(_, items), Seg::Index(i)) => items.get(*i),
                _ => None,
            };
        }
        if let Some(n) = node {
            offset = n.start();
        }
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.len(), |i| before.len() - i - 1) + 1;
        (line, column)
    }
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Scanner<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn string(&mut self) -> String {
        self.pos += 1;
        let start = self.pos;
        while let Some(b) = self.peek() {
            match b {
                b'\\' => self.pos += 2,
                b'"' => break,
                _ => self.pos += 1,
            }
        }
        let s = String::from_utf8_lossy(&self.bytes[start..self.pos.min(self.bytes.len())]).into_owned();
        self.pos += 1;
        s
    }

    fn value(&mut self) -> Option<Node> {
        self.skip_ws();
        let start = self.pos;
        match self.peek()? {
            b'{' => {
                self.pos += 1;
                let mut fields = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek()? {
                        b'}' => {
                            self.pos += 1;
                            break;
                        }
                        b',' => self.pos += 1,
                        b'"' => {
                            let key = self.string();
                            self.skip_ws();
                            if self.peek() == Some(b':') {
                                self.pos += 1;
                            }
                            let v = self.value()?;
                            fields.push((key, v));
                        }
                        _ => return None,
                    }
                }
                Some(Node::Object(start, fields))
            }
            b'[' => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.peek()? {
                        b']' => {
                            self.pos += 1;
                            break;
                        }
                        b',' => self.pos += 1,
                        _ => items.push(self.value()?),
                    }
                }
                Some(Node::Array(start, items))
            }
            b'"' => {
                self.string();
                Some(Node::Scalar(start))
            }
            _ => {
                while let Some(b) = self.peek() {
                    if matches!(b, b',' | b']' | b'}') || b.is_ascii_whitespace() {
                        break;
                    }
                    self.pos += 1;
                }
                Some(Node::Scalar(start))
            }
        }
    }
}
