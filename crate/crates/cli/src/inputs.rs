//! Embedding and word-list loading shared by the metric commands.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use indexmap::IndexMap;
use serde::Deserialize;

use cosbias_core::embedding_io::{load_embeddings_with, load_token_list, LoadOptions};
use cosbias_core::{resolve, EmbeddingSet, Format, ResolveMode, ResolvedSets, WordSetConfig};

use crate::manifest::RunManifest;

#[derive(Debug, Clone, Args)]
pub struct EmbeddingArgs {
    /// Embedding file.
    #[arg(long)]
    pub embeddings: PathBuf,
    /// word2vec_text (with header) or glove_text.
    #[arg(long, default_value = "word2vec_text")]
    pub format: Format,
    /// Drop tokens missing from the vocabulary instead of failing.
    #[arg(long)]
    pub lenient: bool,
    /// Lowercase embedding tokens and word lists.
    #[arg(long)]
    pub lowercase: bool,
}

/// Loaded embeddings plus the word sets requested by a command.
pub struct Workspace {
    pub args: EmbeddingArgs,
    pub embeddings: EmbeddingSet,
    pub config: WordSetConfig,
}

impl Workspace {
    pub fn load(args: &EmbeddingArgs, manifest: &mut RunManifest) -> Result<Self> {
        manifest.input(&args.embeddings)?;
        manifest.param("format", args.format);
        manifest.param("lenient", args.lenient);
        manifest.param("lowercase", args.lowercase);
        let embeddings = load_embeddings_with(&args.embeddings, args.format, LoadOptions { lowercase: args.lowercase })
            .with_context(|| format!("loading {}", args.embeddings.display()))?;
        log::info!("loaded {} vectors of dimension {}", embeddings.len(), embeddings.dim());
        Ok(Workspace {
            args: args.clone(),
            embeddings,
            config: WordSetConfig::default(),
        })
    }

    fn tokens(&self, path: &Path, manifest: &mut RunManifest) -> Result<Vec<String>> {
        manifest.input(path)?;
        load_token_list(path, self.args.lowercase).with_context(|| format!("reading word list {}", path.display()))
    }

    pub fn target(&mut self, name: &str, path: &Path, manifest: &mut RunManifest) -> Result<()> {
        let tokens = self.tokens(path, manifest)?;
        self.config.target_sets.insert(name.to_owned(), tokens);
        Ok(())
    }

    pub fn attribute(&mut self, name: &str, path: &Path, manifest: &mut RunManifest) -> Result<()> {
        let tokens = self.tokens(path, manifest)?;
        self.config.attribute_sets.insert(name.to_owned(), tokens);
        Ok(())
    }

    /// Registers attribute files under their file stems and returns the names
    /// in argument order.
    pub fn attributes(&mut self, paths: &[PathBuf], manifest: &mut RunManifest) -> Result<Vec<String>> {
        let names = set_names(paths);
        for (name, path) in names.iter().zip(paths) {
            self.attribute(name, path, manifest)?;
        }
        Ok(names)
    }

    /// Concatenates every target file into one set named `targets`.
    pub fn targets(&mut self, paths: &[PathBuf], manifest: &mut RunManifest) -> Result<()> {
        let mut all = Vec::new();
        for p in paths {
            all.extend(self.tokens(p, manifest)?);
        }
        self.config.target_sets.insert("targets".into(), all);
        Ok(())
    }

    pub fn defining(&mut self, path: &Path, manifest: &mut RunManifest) -> Result<()> {
        manifest.input(path)?;
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let parsed: DefiningFile =
            serde_json::from_str(&text).with_context(|| format!("parsing defining sets in {}", path.display()))?;
        let sets: IndexMap<String, Vec<String>> = match parsed {
            DefiningFile::Named(m) => m,
            DefiningFile::List(l) => l.into_iter().enumerate().map(|(i, s)| (format!("d{i}"), s)).collect(),
        };
        self.config.defining_sets = sets;
        Ok(())
    }

    pub fn resolve(&self) -> Result<ResolvedSets> {
        let config = if self.args.lowercase { self.config.lowercased() } else { self.config.clone() };
        config.validate()?;
        let mode = if self.args.lenient { ResolveMode::Lenient } else { ResolveMode::Strict };
        let sets = resolve(&config, &self.embeddings, mode)?;
        for m in &sets.missing {
            log::warn!("dropping {:?} from set {:?}: not in vocabulary", m.token, m.set);
        }
        Ok(sets)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum DefiningFile {
    Named(IndexMap<String, Vec<String>>),
    List(Vec<Vec<String>>),
}

/// File stems, made unique by suffixing the argument position on collision.
pub fn set_names(paths: &[PathBuf]) -> Vec<String> {
    let stems: Vec<String> = paths
        .iter()
        .map(|p| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default())
        .collect();
    stems
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if s.is_empty() || stems.iter().filter(|t| *t == s).count() > 1 {
                format!("{s}#{i}")
            } else {
                s.clone()
            }
        })
        .collect()
}
