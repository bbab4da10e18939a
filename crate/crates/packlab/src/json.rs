//! Packing documents and the shared JSON writer.
//!
//! Floats are written with 17 significant digits in scientific form
//! (`5.0000000000000000e-1`), which round-trips every `f64` bit for bit.

use std::io;
use std::path::{Path, PathBuf};

use packlab_core::geometry::{Packing, PackingMeta, Rect, Region};
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const FORMAT_VERSION: u64 = 1;

const TOP_LEVEL_KEYS: [&str; 5] = ["version", "domain", "outer", "regions", "meta"];

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("line {line}: non-finite number for field `{field}`")]
    NonFinite { field: String, line: usize, column: usize },
    #[error("line {line}: unknown region kind `{kind}`")]
    UnknownKind { kind: String, line: usize, column: usize },
    #[error("line {line}: format version {found} is not supported (expected {FORMAT_VERSION})")]
    Version { found: String, line: usize },
    #[error("cannot write non-finite number")]
    NonFiniteOutput,
    #[error("{0}")]
    Invalid(String),
}

/// Pretty printer that writes floats with 17 significant digits.
///
/// In strict mode non-finite values are an error; otherwise they become `null`.
struct Sig17<'a> {
    inner: PrettyFormatter<'a>,
    strict: bool,
}

impl Formatter for Sig17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else if self.strict {
            Err(io::Error::new(io::ErrorKind::InvalidData, "non-finite"))
        } else {
            w.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

fn write_with<T: Serialize>(value: &T, strict: bool) -> Result<Vec<u8>, FormatError> {
    let mut out = Vec::new();
    let fmt = Sig17 { inner: PrettyFormatter::with_indent(b"  "), strict };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value.serialize(&mut ser).map_err(|e| {
        if e.is_io() {
            FormatError::NonFiniteOutput
        } else {
            FormatError::Invalid(e.to_string())
        }
    })?;
    out.push(b'\n');
    Ok(out)
}

/// Any serialisable document; non-finite floats are written as `null`.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, FormatError> {
    write_with(value, false)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<String, FormatError> {
    std::fs::write(path, bytes).map_err(|source| FormatError::Io { path: path.into(), source })?;
    Ok(sha256_hex(bytes))
}

pub fn read_file(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|source| FormatError::Io { path: path.into(), source })
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    version: u64,
    domain: &'a Rect,
    #[serde(skip_serializing_if = "Option::is_none")]
    outer: Option<&'a Region>,
    regions: &'a [Region],
    meta: &'a PackingMeta,
}

#[derive(Deserialize)]
struct DocumentIn {
    domain: Rect,
    #[serde(default)]
    outer: Option<Region>,
    regions: Vec<Region>,
    #[serde(default)]
    meta: PackingMeta,
}

/// Packing document bytes. Non-finite numbers are refused.
pub fn packing_to_bytes(packing: &Packing) -> Result<Vec<u8>, FormatError> {
    let doc = DocumentOut {
        version: FORMAT_VERSION,
        domain: &packing.domain,
        outer: packing.outer.as_ref(),
        regions: &packing.regions,
        meta: &packing.meta,
    };
    write_with(&doc, true)
}

/// Writes the packing and returns the SHA-256 of the written bytes.
pub fn save_packing(packing: &Packing, path: &Path) -> Result<String, FormatError> {
    write_file(path, &packing_to_bytes(packing)?)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Sort regions by decreasing diameter instead of only reporting the order.
    pub resort: bool,
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub packing: Packing,
    pub warnings: Vec<String>,
}

pub fn load_packing(path: &Path, opts: LoadOptions) -> Result<Loaded, FormatError> {
    parse_packing(&read_file(path)?, opts)
}

pub fn parse_packing(text: &str, opts: LoadOptions) -> Result<Loaded, FormatError> {
    let value: Value = serde_json::from_str(text).map_err(|e| classify(text, &e))?;
    let Value::Object(top) = &value else {
        return Err(FormatError::Parse { line: 1, column: 1, message: "expected a JSON object".into() });
    };
    let version_line = key_line(text, "version");
    match top.get("version") {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION) => {}
        Some(v) => return Err(FormatError::Version { found: v.to_string(), line: version_line }),
        None => return Err(FormatError::Parse { line: 1, column: 1, message: "missing field `version`".into() }),
    }
    let mut warnings = Vec::new();
    for key in top.keys().filter(|k| !TOP_LEVEL_KEYS.contains(&k.as_str())) {
        let msg = format!("line {}: unknown top-level key `{key}` ignored", key_line(text, key));
        log::warn!("{msg}");
        warnings.push(msg);
    }
    let doc: DocumentIn = serde_json::from_str(text).map_err(|e| classify(text, &e))?;
    let mut packing = Packing::new(doc.domain, doc.regions, doc.meta);
    packing.outer = doc.outer;
    if let Some(i) = packing.first_unsorted() {
        if opts.resort {
            packing.sort_by_diameter();
        } else {
            let msg = format!("regions are not sorted by decreasing diameter (first violation at index {i})");
            log::warn!("{msg}");
            warnings.push(msg);
        }
    }
    Ok(Loaded { packing, warnings })
}

fn classify(text: &str, e: &serde_json::Error) -> FormatError {
    let (line, column) = (e.line(), e.column());
    let msg = e.to_string();
    let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m).to_string();
    if let Some(rest) = msg.strip_prefix("unknown variant `") {
        let kind = rest.split('`').next().unwrap_or_default().to_string();
        return FormatError::UnknownKind { kind, line, column };
    }
    let non_finite_token = token_at(text, line, column)
        .is_some_and(|t| ["NaN", "Infinity", "-Infinity", "inf", "-inf", "nan"].contains(&t.as_str()));
    if non_finite_token || msg.contains("invalid type: null, expected f64") || msg.contains("number out of range") {
        let field = field_before(text, line, column).unwrap_or_else(|| "?".into());
        return FormatError::NonFinite { field, line, column };
    }
    FormatError::Parse { line, column, message: msg }
}

fn offset_of(text: &str, line: usize, column: usize) -> usize {
    let start: usize = text.split_inclusive('\n').take(line.saturating_sub(1)).map(str::len).sum();
    (start + column.saturating_sub(1)).min(text.len())
}

/// The bare token starting at (or just before) the error position.
fn token_at(text: &str, line: usize, column: usize) -> Option<String> {
    let at = offset_of(text, line, column);
    let bytes = text.as_bytes();
    let is_tok = |b: u8| b.is_ascii_alphanumeric() || b == b'-' || b == b'.' || b == b'+';
    let mut a = at.min(bytes.len());
    while a > 0 && is_tok(bytes[a - 1]) {
        a -= 1;
    }
    let mut b = a;
    while b < bytes.len() && is_tok(bytes[b]) {
        b += 1;
    }
    (b > a).then(|| text[a..b].to_string())
}

/// The last object key that precedes the error position.
fn field_before(text: &str, line: usize, column: usize) -> Option<String> {
    let head = &text[..offset_of(text, line, column)];
    let colon = head.rfind(':')?;
    let key = head[..colon].trim_end().strip_suffix('"')?;
    let open = key.rfind('"')?;
    Some(key[open + 1..].to_string())
}

/// 1-based line of the first occurrence of `"key"`, or 1.
fn key_line(text: &str, key: &str) -> usize {
    let needle = format!("\"{key}\"");
    text.find(&needle).map_or(1, |at| text[..at].matches('\n').count() + 1)
}

/// Loads a square cover document (`{"squares": [{"x", "y", "side"}, …]}`).
pub fn load_cover(path: &Path) -> Result<packlab_core::sweep::SquareCover, FormatError> {
    let text = read_file(path)?;
    let raw: packlab_core::sweep::SquareCover = serde_json::from_str(&text).map_err(|e| classify(&text, &e))?;
    packlab_core::sweep::SquareCover::new(raw.squares).map_err(|e| FormatError::Invalid(e.to_string()))
}

/// Writes `value` with the shared float format; returns the digest.
pub fn save_json<T: Serialize>(value: &T, path: &Path) -> Result<String, FormatError> {
    write_file(path, &to_json_bytes(value)?)
}
