//! Loading and saving embedding sets, word-set configuration files, and
//! token resolution.
//!
//! Two plain-text formats are supported:
//!
//! * `word2vec_text`: a `<count> <dim>` header followed by one
//!   `token c_1 ... c_dim` line per entry.
//! * `glove_text`: the same rows without a header; the dimension is inferred
//!   from the first row.
//!
//! Floats are written with 17 significant digits so a save/load cycle
//! reproduces every `f64` bit for bit.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vector::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Word2vecText,
    GloveText,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "word2vec_text" | "word2vec" => Ok(Format::Word2vecText),
            "glove_text" | "glove" => Ok(Format::GloveText),
            other => Err(Error::InvalidParameters(format!(
                "unknown embedding format {other:?} (expected word2vec_text or glove_text)"
            ))),
        }
    }
}

/// A named, immutable token -> vector map. Entries keep file order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    name: String,
    dim: usize,
    entries: IndexMap<String, Vector>,
}

impl EmbeddingSet {
    /// Builds a set, checking dimensions and token uniqueness.
    pub fn from_entries(
        name: impl Into<String>,
        entries: impl IntoIterator<Item = (String, Vector)>,
    ) -> Result<Self> {
        let mut map = IndexMap::new();
        let mut dim = None;
        for (token, vector) in entries {
            if token.is_empty() || token.chars().any(char::is_whitespace) {
                return Err(Error::InvalidParameters(format!(
                    "invalid token {token:?}: tokens must be non-empty without whitespace"
                )));
            }
            match dim {
                None => dim = Some(vector.dim()),
                Some(d) => vector.check_dim(d)?,
            }
            if map.contains_key(&token) {
                return Err(Error::InvalidParameters(format!("duplicate token {token:?}")));
            }
            map.insert(token, vector);
        }
        Ok(EmbeddingSet {
            name: name.into(),
            dim: dim.unwrap_or(0),
            entries: map,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Vector dimension; 0 only for an empty set.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, token: &str) -> Option<&Vector> {
        self.entries.get(token)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Vector)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Applies `f` to every vector, keeping tokens and order.
    pub fn map_vectors(&self, mut f: impl FnMut(&Vector) -> Vector) -> Result<Self> {
        Self::from_entries(
            self.name.clone(),
            self.entries.iter().map(|(k, v)| (k.clone(), f(v))),
        )
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Lowercase every token while loading.
    pub lowercase: bool,
}

pub fn load_embeddings(path: &Path, format: Format) -> Result<EmbeddingSet> {
    load_embeddings_with(path, format, LoadOptions::default())
}

pub fn load_embeddings_with(
    path: &Path,
    format: Format,
    options: LoadOptions,
) -> Result<EmbeddingSet> {
    let file = File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_embeddings(BufReader::new(file), path, &name, format, options)
}

/// Parses embeddings from any reader. `path` is used for error messages only.
pub fn read_embeddings<R: BufRead>(
    reader: R,
    path: &Path,
    name: &str,
    format: Format,
    options: LoadOptions,
) -> Result<EmbeddingSet> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut lines = reader.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        other => Some((i + 1, other)),
    });

    let mut header: Option<(usize, usize)> = None;
    if format == Format::Word2vecText {
        let Some((line_no, line)) = lines.next() else {
            return Err(Error::EmptyFile(path.to_path_buf()));
        };
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            [count, dim] => count.parse::<usize>().ok().zip(dim.parse::<usize>().ok()),
            _ => None,
        };
        match parsed {
            Some((count, dim)) if dim > 0 => header = Some((count, dim)),
            _ => {
                return Err(parse_err(
                    line_no,
                    format!("expected header \"<count> <dim>\", found {line:?}"),
                ))
            }
        }
    }

    let mut dim = header.map(|(_, d)| d);
    let mut entries: IndexMap<String, Vector> = IndexMap::new();
    for (line_no, line) in lines {
        let line = line.map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let mut fields = line.split_whitespace();
        let token = fields.next().expect("non-blank line has a field");
        let token = if options.lowercase {
            token.to_lowercase()
        } else {
            token.to_owned()
        };
        let components = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("non-numeric component {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        match dim {
            None => dim = Some(components.len()),
            Some(d) if d != components.len() => {
                return Err(parse_err(
                    line_no,
                    format!(
                        "dimension mismatch: expected {d} components, found {}",
                        components.len()
                    ),
                ))
            }
            Some(_) => {}
        }
        let vector = Vector::new(components).map_err(|e| parse_err(line_no, e.to_string()))?;
        if entries.contains_key(&token) {
            return Err(Error::DuplicateToken {
                path: path.to_path_buf(),
                line: line_no,
                token,
            });
        }
        entries.insert(token, vector);
    }

    if entries.is_empty() {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    if let Some((count, _)) = header {
        if count != entries.len() {
            return Err(parse_err(
                1,
                format!("header declares {count} entries, file has {}", entries.len()),
            ));
        }
    }
    EmbeddingSet::from_entries(name, entries)
}

/// Writes `set` in `format`. The file is written to a temporary sibling and
/// renamed into place.
pub fn save_embeddings(set: &EmbeddingSet, path: &Path, format: Format) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptyEmbeddingSet);
    }
    write_atomically(path, |w| write_embeddings(set, w, format))
}

pub fn write_embeddings<W: Write>(set: &EmbeddingSet, mut w: W, format: Format) -> std::io::Result<()> {
    if format == Format::Word2vecText {
        writeln!(w, "{} {}", set.len(), set.dim())?;
    }
    for (token, vector) in set.iter() {
        write!(w, "{token}")?;
        for c in vector.as_slice() {
            write!(w, " {c:.16e}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Writes through a temp file in the destination directory, then renames.
pub fn write_atomically(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<&mut File>) -> std::io::Result<()>,
) -> Result<()> {
    let ctx = || format!("writing {}", path.display());
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(ctx(), e))?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        body(&mut w).map_err(|e| Error::io(ctx(), e))?;
        w.flush().map_err(|e| Error::io(ctx(), e))?;
    }
    tmp.persist(path).map_err(|e| Error::io(ctx(), e.error))?;
    Ok(())
}

/// Named token lists: attribute sets, target sets and defining sets.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WordSetConfig {
    #[serde(default)]
    pub attribute_sets: IndexMap<String, Vec<String>>,
    #[serde(default)]
    pub target_sets: IndexMap<String, Vec<String>>,
    #[serde(default)]
    pub defining_sets: IndexMap<String, Vec<String>>,
}

impl WordSetConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let config: WordSetConfig = serde_json::from_str(&text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        write_atomically(path, |w| writeln!(w, "{json}"))
    }

    /// Structural checks that do not need an embedding set.
    pub fn validate(&self) -> Result<()> {
        if let Some((name, _)) = self.attribute_sets.iter().find(|(_, v)| v.is_empty()) {
            return Err(Error::InvalidConfig(format!("attribute set {name:?} is empty")));
        }
        if let Some((name, _)) = self.defining_sets.iter().find(|(_, v)| v.len() < 2) {
            return Err(Error::InvalidConfig(format!(
                "defining set {name:?} needs at least 2 members"
            )));
        }
        Ok(())
    }

    pub fn lowercased(&self) -> Self {
        let fold = |m: &IndexMap<String, Vec<String>>| {
            m.iter()
                .map(|(k, v)| (k.clone(), v.iter().map(|t| t.to_lowercase()).collect()))
                .collect()
        };
        WordSetConfig {
            attribute_sets: fold(&self.attribute_sets),
            target_sets: fold(&self.target_sets),
            defining_sets: fold(&self.defining_sets),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResolveMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MissingToken {
    pub set: String,
    pub token: String,
}

/// A word set whose tokens have been looked up; `tokens[i]` maps to `vectors[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSet {
    pub tokens: Vec<String>,
    pub vectors: Vec<Vector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedSets {
    pub attribute_sets: IndexMap<String, ResolvedSet>,
    pub target_sets: IndexMap<String, ResolvedSet>,
    pub defining_sets: IndexMap<String, ResolvedSet>,
    pub missing: Vec<MissingToken>,
}

impl ResolvedSets {
    pub fn attribute(&self, name: &str) -> Result<&ResolvedSet> {
        self.attribute_sets
            .get(name)
            .ok_or_else(|| Error::UnknownSet(name.to_owned()))
    }

    pub fn target(&self, name: &str) -> Result<&ResolvedSet> {
        self.target_sets
            .get(name)
            .ok_or_else(|| Error::UnknownSet(name.to_owned()))
    }

    /// Defining sets in configuration order.
    pub fn defining_vectors(&self) -> Vec<Vec<Vector>> {
        self.defining_sets.values().map(|s| s.vectors.clone()).collect()
    }
}

/// Maps every configured token to its vector, preserving list order.
pub fn resolve(config: &WordSetConfig, set: &EmbeddingSet, mode: ResolveMode) -> Result<ResolvedSets> {
    config.validate()?;
    let mut missing = Vec::new();
    let mut lookup = |group: &IndexMap<String, Vec<String>>| {
        group
            .iter()
            .map(|(name, tokens)| {
                let mut resolved = ResolvedSet {
                    tokens: Vec::with_capacity(tokens.len()),
                    vectors: Vec::with_capacity(tokens.len()),
                };
                for token in tokens {
                    match set.get(token) {
                        Some(v) => {
                            resolved.tokens.push(token.clone());
                            resolved.vectors.push(v.clone());
                        }
                        None => missing.push(MissingToken {
                            set: name.clone(),
                            token: token.clone(),
                        }),
                    }
                }
                (name.clone(), resolved)
            })
            .collect::<IndexMap<_, _>>()
    };
    let attribute_sets = lookup(&config.attribute_sets);
    let target_sets = lookup(&config.target_sets);
    let defining_sets = lookup(&config.defining_sets);

    if !missing.is_empty() {
        if mode == ResolveMode::Strict {
            return Err(Error::MissingTokens(missing));
        }
        for m in &missing {
            log::warn!("dropping missing token {:?} from set {:?}", m.token, m.set);
        }
    }
    if let Some((name, _)) = attribute_sets.iter().find(|(_, s)| s.vectors.is_empty()) {
        return Err(Error::AttributeSetEmptied(name.clone()));
    }
    if let Some((name, _)) = defining_sets.iter().find(|(_, s)| s.vectors.len() < 2) {
        return Err(Error::DefiningSetTooSmall(name.clone()));
    }
    Ok(ResolvedSets {
        attribute_sets,
        target_sets,
        defining_sets,
        missing,
    })
}

/// Reads a token-list file: one token per line, `#` starts a comment.
pub fn load_token_list(path: &Path, lowercase: bool) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    Ok(parse_token_list(&text, lowercase))
}

pub fn parse_token_list(text: &str, lowercase: bool) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| if lowercase { l.to_lowercase() } else { l.to_owned() })
        .collect()
}
