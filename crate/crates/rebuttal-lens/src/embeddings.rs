//! Word-embedding table and review–response semantic similarity.
//!
//! The on-disk format is a text file whose first line is
//! `<vocab_size> <dim>`, followed by one line per token: the token and
//! `dim` whitespace-separated floats.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{AuthorResponse, Review, SectionMask};
use crate::error::{Error, Result};
use crate::text;

#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    pub dim: usize,
    table: HashMap<String, Vec<f64>>,
    /// Lowercase tokens before lookup (the training pipeline lowercases).
    pub lowercase: bool,
    /// Tokens that appeared more than once in the source file (last wins).
    pub duplicates: Vec<String>,
}

impl EmbeddingStore {
    pub fn new(dim: usize) -> Self {
        EmbeddingStore {
            dim,
            table: HashMap::new(),
            lowercase: true,
            duplicates: Vec::new(),
        }
    }

    pub fn with_lowercase(mut self, lowercase: bool) -> Self {
        self.lowercase = lowercase;
        self
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn insert(&mut self, token: &str, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::InvalidInput(format!(
                "vector for `{token}` has length {}, expected {}",
                vector.len(),
                self.dim
            )));
        }
        if self.table.insert(token.to_string(), vector).is_some() {
            self.duplicates.push(token.to_string());
        }
        Ok(())
    }

    pub fn lookup(&self, token: &str) -> Option<&[f64]> {
        if self.lowercase {
            self.table.get(&token.to_lowercase()).map(Vec::as_slice)
        } else {
            self.table.get(token).map(Vec::as_slice)
        }
    }

    /// Load from the text format. Inconsistent vector lengths are an error
    /// naming the line; duplicate tokens keep the last entry.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let contents = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = contents.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| Error::EmbeddingParse {
            line: 1,
            message: "missing `<vocab_size> <dim>` header".to_string(),
        })?;
        let mut parts = header.split_whitespace();
        let _vocab: usize =
            parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::EmbeddingParse {
                    line: 1,
                    message: "bad vocab size".to_string(),
                })?;
        let dim: usize =
            parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::EmbeddingParse {
                    line: 1,
                    message: "bad dimension".to_string(),
                })?;
        let mut store = EmbeddingStore::new(dim);
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().expect("non-empty line");
            let vector: std::result::Result<Vec<f64>, _> =
                fields.map(|f| f.parse::<f64>()).collect();
            let vector = vector.map_err(|e| Error::EmbeddingParse {
                line: lineno,
                message: format!("bad float: {e}"),
            })?;
            if vector.len() != dim {
                return Err(Error::EmbeddingParse {
                    line: lineno,
                    message: format!("expected {dim} floats, found {}", vector.len()),
                });
            }
            if store.table.insert(token.to_string(), vector).is_some() {
                eprintln!(
                    "warning: duplicate embedding token `{token}` (line {lineno}), last wins"
                );
                store.duplicates.push(token.to_string());
            }
        }
        Ok(store)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{} {}", self.table.len(), self.dim).map_err(|e| Error::io(path, e))?;
        let mut tokens: Vec<&String> = self.table.keys().collect();
        tokens.sort();
        for token in tokens {
            let vector = &self.table[token];
            let floats: Vec<String> = vector.iter().map(|v| format!("{v}")).collect();
            writeln!(w, "{token} {}", floats.join(" ")).map_err(|e| Error::io(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }

    /// Deterministic pseudo-random unit-scale vectors for a vocabulary,
    /// for experiments without a trained embedding file.
    pub fn synthetic<I, S>(vocab: I, dim: usize, seed: u64) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut store = EmbeddingStore::new(dim);
        let mut tokens: Vec<String> = vocab.into_iter().map(|s| s.as_ref().to_string()).collect();
        tokens.sort();
        tokens.dedup();
        for token in tokens {
            // per-token stream keyed by a hash of the token
            let mut h = 1469598103934665603u64;
            for b in token.as_bytes() {
                h ^= *b as u64;
                h = h.wrapping_mul(1099511628211);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ h);
            let vector: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            store.table.insert(token, vector);
        }
        store
    }
}

/// Arithmetic mean of the vectors of in-vocabulary tokens; `None` when no
/// token is in vocabulary. Out-of-vocabulary tokens are skipped.
pub fn doc_vector(tokens: &[String], store: &EmbeddingStore) -> Option<Vec<f64>> {
    let mut acc = vec![0.0; store.dim];
    let mut hits = 0usize;
    for token in tokens {
        if let Some(v) = store.lookup(token) {
            for (a, b) in acc.iter_mut().zip(v) {
                *a += b;
            }
            hits += 1;
        }
    }
    if hits == 0 {
        return None;
    }
    for a in &mut acc {
        *a /= hits as f64;
    }
    Some(acc)
}

/// Cosine similarity, in [-1, 1]. Zero vectors are an error.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (na * nb)).clamp(-1.0, 1.0))
}

/// Cosine similarity between the averaged embeddings of the review text and
/// the response text; `None` when either document has no in-vocabulary
/// token or a zero-norm document vector.
pub fn review_response_similarity(
    review: &Review,
    response: &AuthorResponse,
    store: &EmbeddingStore,
    mask: SectionMask,
) -> Option<f64> {
    let review_tokens = text::tokenize_words(&review.section_text(mask));
    let response_tokens = text::tokenize_words(&response.text);
    let a = doc_vector(&review_tokens, store)?;
    let b = doc_vector(&response_tokens, store)?;
    cosine(&a, &b).ok()
}
