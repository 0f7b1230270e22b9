//! Word vectors for object classes and goal tokens.
//!
//! Three providers share one interface:
//!
//! - `hash`: deterministic pseudo-random unit vectors derived from the token
//!   bytes and a seed. No semantics, but stable across runs and processes.
//! - `file`: a whitespace-separated text table, one token per line followed
//!   by its vector.
//! - `kb`: a small bundled knowledge table whose tokens are grouped into
//!   functional clusters (carriers, climbers, cleaners, adhesives,
//!   fasteners). Tokens in a cluster sit close in cosine distance, so a
//!   model trained on one carrier generalizes to an unseen one.
//!
//! Unknown tokens always fall back to the hash vector for the provider's
//! seed, so switching providers only changes tokens the table knows about.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::EmbeddingError;

/// Default embedding width used across the pipeline.
pub const DEFAULT_DIM: usize = 32;
/// Default seed for hash-derived vectors.
pub const DEFAULT_SEED: u64 = 0x746f6f6c;

/// Functional clusters of the bundled knowledge table. Cluster and member
/// lists are sorted; generators that walk them inherit the order.
pub const KB_CLUSTERS: &[(&str, &[&str])] = &[
    (
        "adhesives",
        &["glue", "paste", "tape"],
    ),
    (
        "carriers",
        &[
            "basket", "big-tray", "box", "bucket", "container", "crate", "toolbox", "tray",
            "trolley",
        ],
    ),
    (
        "cleaners",
        &["blow-dryer", "brush", "mop", "sponge", "vacuum"],
    ),
    (
        "climbers",
        &["chair", "ladder", "seat", "step-ladder", "stool"],
    ),
    (
        "fasteners",
        &["drill", "hammer", "mallet", "nail", "screw", "screwdriver", "wrench"],
    ),
];

/// How far a knowledge-table member may drift from its cluster center.
/// Small enough that within-cluster cosine stays near one while distinct
/// clusters remain pseudo-orthogonal.
const KB_JITTER: f64 = 0.15;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Source {
    Hash,
    File(String),
    ToyKb,
}

/// Token-to-vector lookup with a deterministic fallback for unknown tokens.
#[derive(Clone, Debug)]
pub struct EmbeddingProvider {
    dim: usize,
    seed: u64,
    source: Source,
    table: BTreeMap<String, Vec<f64>>,
}

impl EmbeddingProvider {
    /// Pure hash provider: every token maps to a seeded unit vector.
    pub fn hash(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        EmbeddingProvider { dim, seed, source: Source::Hash, table: BTreeMap::new() }
    }

    /// Bundled knowledge table with cluster structure, hash fallback for
    /// everything else.
    pub fn toy_kb(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        let table = build_kb_table(dim, seed);
        EmbeddingProvider { dim, seed, source: Source::ToyKb, table }
    }

    /// Loads a text table (`token v1 v2 ... vd` per line). The first line
    /// fixes the dimension. Blank lines are skipped.
    pub fn from_file(path: &Path, seed: u64) -> Result<Self, EmbeddingError> {
        let display = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| EmbeddingError::Io {
            path: display.clone(),
            source,
        })?;
        let mut table = BTreeMap::new();
        let mut dim = 0usize;
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let token = fields.next().unwrap().to_string();
            let values: Result<Vec<f64>, _> = fields
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| EmbeddingError::Parse {
                        path: display.clone(),
                        line: lineno,
                        reason: format!("bad float {tok:?}"),
                    })
                })
                .collect();
            let values = values?;
            if values.is_empty() {
                return Err(EmbeddingError::Parse {
                    path: display,
                    line: lineno,
                    reason: "token without vector".into(),
                });
            }
            if dim == 0 {
                dim = values.len();
            } else if values.len() != dim {
                return Err(EmbeddingError::Arity {
                    path: display,
                    line: lineno,
                    expected: dim,
                    found: values.len(),
                });
            }
            table.insert(token, values);
        }
        if dim == 0 {
            return Err(EmbeddingError::Parse {
                path: display,
                line: 1,
                reason: "empty embedding file".into(),
            });
        }
        Ok(EmbeddingProvider { dim, seed, source: Source::File(display), table })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Whether the token is in the table (as opposed to hash fallback).
    pub fn knows(&self, token: &str) -> bool {
        self.table.contains_key(token)
    }

    /// The vector for one token. Table hit first, hash fallback otherwise.
    pub fn embed(&self, token: &str) -> Vec<f64> {
        if let Some(v) = self.table.get(token) {
            return v.clone();
        }
        hash_unit_vector(token, self.seed, self.dim)
    }

    /// Bag-of-words pooling: the arithmetic mean of the token vectors. An
    /// empty token list gives the zero vector.
    pub fn bow<'a>(&self, tokens: impl IntoIterator<Item = &'a str>) -> Vec<f64> {
        let mut sum = vec![0.0; self.dim];
        let mut count = 0usize;
        for token in tokens {
            for (s, v) in sum.iter_mut().zip(self.embed(token)) {
                *s += v;
            }
            count += 1;
        }
        if count > 0 {
            let inv = 1.0 / count as f64;
            for s in &mut sum {
                *s *= inv;
            }
        }
        sum
    }

    /// Candidates from `pool` ranked by cosine similarity to `token`,
    /// descending, ties broken lexicographically.
    pub fn rank_by_similarity<'a>(
        &self,
        token: &str,
        pool: impl IntoIterator<Item = &'a str>,
    ) -> Vec<(String, f64)> {
        let anchor = self.embed(token);
        let mut ranked: Vec<(String, f64)> = pool
            .into_iter()
            .map(|c| (c.to_string(), cosine(&anchor, &self.embed(c))))
            .collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| a.0.cmp(&b.0))
        });
        ranked
    }

    /// Short stable description of the provider, stored in checkpoints so a
    /// model is always evaluated with the embeddings it was trained on.
    pub fn fingerprint(&self) -> String {
        let mut hash = FNV_OFFSET;
        for (token, values) in &self.table {
            hash = fnv_extend(hash, token.as_bytes());
            for v in values {
                hash = fnv_extend(hash, &v.to_bits().to_le_bytes());
            }
        }
        let kind = match &self.source {
            Source::Hash => "hash",
            Source::File(_) => "file",
            Source::ToyKb => "kb",
        };
        format!("{kind}:d{}:s{}:t{:016x}", self.dim, self.seed, hash)
    }

    /// Renders the table in the text format `from_file` reads. Values use
    /// shortest round-trip formatting, so a render/parse cycle is exact.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for (token, values) in &self.table {
            out.push_str(token);
            for v in values {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Deterministic unit vector for a token: an FNV hash of the token bytes is
/// mixed with the seed and drives a counter-based RNG.
pub fn hash_unit_vector(token: &str, seed: u64, dim: usize) -> Vec<f64> {
    let token_hash = fnv_extend(FNV_OFFSET, token.as_bytes());
    let mut rng = ChaCha8Rng::seed_from_u64(token_hash ^ seed.rotate_left(17));
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(&mut v);
    v
}

/// Cosine similarity; zero if either vector has zero norm.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "cosine on mismatched dimensions");
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// The cluster a knowledge-table token belongs to, if any.
pub fn kb_cluster_of(token: &str) -> Option<&'static str> {
    KB_CLUSTERS
        .iter()
        .find(|(_, members)| members.contains(&token))
        .map(|(name, _)| *name)
}

fn build_kb_table(dim: usize, seed: u64) -> BTreeMap<String, Vec<f64>> {
    let mut table = BTreeMap::new();
    for (cluster, members) in KB_CLUSTERS {
        // Center seeds are namespaced away from token seeds so a cluster
        // named like a token would still get an independent direction.
        let center = hash_unit_vector(&format!("cluster/{cluster}"), seed, dim);
        for member in *members {
            let offset = hash_unit_vector(&format!("member/{member}"), seed, dim);
            let mut v: Vec<f64> = center
                .iter()
                .zip(&offset)
                .map(|(c, o)| c + KB_JITTER * o)
                .collect();
            normalize(&mut v);
            table.insert(member.to_string(), v);
        }
    }
    table
}

fn normalize(v: &mut [f64]) {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        // Degenerate draw; fall back to a basis vector.
        v.iter_mut().for_each(|x| *x = 0.0);
        v[0] = 1.0;
        return;
    }
    v.iter_mut().for_each(|x| *x /= norm);
}

const FNV_OFFSET: u64 = 0xcbf29ce484222325;

fn fnv_extend(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(v: &[f64]) -> f64 {
        v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    #[test]
    fn hash_vectors_are_unit_and_reproducible() {
        let p = EmbeddingProvider::hash(32, 7);
        let a = p.embed("hammer");
        let b = p.embed("hammer");
        assert_eq!(a, b);
        assert!((norm(&a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn different_tokens_and_seeds_give_different_vectors() {
        let p7 = EmbeddingProvider::hash(32, 7);
        let p8 = EmbeddingProvider::hash(32, 8);
        assert_ne!(p7.embed("hammer"), p7.embed("mop"));
        assert_ne!(p7.embed("hammer"), p8.embed("hammer"));
    }

    #[test]
    fn bow_of_one_token_is_that_vector_and_empty_is_zero() {
        let p = EmbeddingProvider::hash(16, 7);
        assert_eq!(p.bow(["stool"]), p.embed("stool"));
        assert_eq!(p.bow([]), vec![0.0; 16]);
    }

    #[test]
    fn bow_is_the_arithmetic_mean() {
        let p = EmbeddingProvider::hash(8, 7);
        let a = p.embed("a");
        let b = p.embed("b");
        let mean = p.bow(["a", "b"]);
        for i in 0..8 {
            assert!((mean[i] - 0.5 * (a[i] + b[i])).abs() < 1e-15);
        }
    }

    #[test]
    fn kb_clusters_are_tight_and_separated() {
        let p = EmbeddingProvider::toy_kb(32, DEFAULT_SEED);
        // Within-cluster similarity stays high.
        assert!(cosine(&p.embed("box"), &p.embed("crate")) > 0.9);
        assert!(cosine(&p.embed("stool"), &p.embed("step-ladder")) > 0.9);
        assert!(cosine(&p.embed("mop"), &p.embed("blow-dryer")) > 0.9);
        // Across clusters it drops to near-orthogonal.
        assert!(cosine(&p.embed("box"), &p.embed("stool")).abs() < 0.5);
        assert!(cosine(&p.embed("glue"), &p.embed("hammer")).abs() < 0.5);
    }

    #[test]
    fn kb_falls_back_to_the_hash_vector_for_unknown_tokens() {
        let kb = EmbeddingProvider::toy_kb(32, DEFAULT_SEED);
        let hash = EmbeddingProvider::hash(32, DEFAULT_SEED);
        assert!(!kb.knows("headphone"));
        assert_eq!(kb.embed("headphone"), hash.embed("headphone"));
        assert!(kb.knows("bucket"));
        assert_ne!(kb.embed("bucket"), hash.embed("bucket"));
    }

    #[test]
    fn ranking_prefers_the_same_cluster() {
        let p = EmbeddingProvider::toy_kb(32, DEFAULT_SEED);
        let ranked = p.rank_by_similarity("box", ["crate", "seat", "paste", "mallet"]);
        assert_eq!(ranked[0].0, "crate");
        let ranked = p.rank_by_similarity("stool", ["basket", "seat", "brush"]);
        assert_eq!(ranked[0].0, "seat");
    }

    #[test]
    fn bundled_table_file_matches_the_generated_table() {
        let p = EmbeddingProvider::toy_kb(DEFAULT_DIM, DEFAULT_SEED);
        let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/toy_kb_32d.txt");
        let on_disk = std::fs::read_to_string(fixture).expect("bundled table missing");
        assert_eq!(on_disk, p.render_table(), "regenerate fixtures/toy_kb_32d.txt");
    }

    #[test]
    fn file_provider_round_trips_the_kb_table_exactly() {
        let p = EmbeddingProvider::toy_kb(DEFAULT_DIM, DEFAULT_SEED);
        let dir = std::env::temp_dir().join("toolnet-emb-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("kb.txt");
        std::fs::write(&path, p.render_table()).unwrap();
        let loaded = EmbeddingProvider::from_file(&path, DEFAULT_SEED).unwrap();
        assert_eq!(loaded.dim(), DEFAULT_DIM);
        for (cluster, members) in KB_CLUSTERS {
            for member in *members {
                assert_eq!(loaded.embed(member), p.embed(member), "{cluster}/{member}");
            }
        }
    }

    #[test]
    fn file_provider_rejects_ragged_rows() {
        let dir = std::env::temp_dir().join("toolnet-emb-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ragged.txt");
        std::fs::write(&path, "a 1.0 2.0\nb 1.0\n").unwrap();
        assert!(matches!(
            EmbeddingProvider::from_file(&path, 0),
            Err(EmbeddingError::Arity { line: 2, expected: 2, found: 1, .. })
        ));
    }

    #[test]
    fn fingerprints_distinguish_providers() {
        let hash = EmbeddingProvider::hash(32, DEFAULT_SEED);
        let kb = EmbeddingProvider::toy_kb(32, DEFAULT_SEED);
        let kb2 = EmbeddingProvider::toy_kb(32, DEFAULT_SEED);
        assert_ne!(hash.fingerprint(), kb.fingerprint());
        assert_eq!(kb.fingerprint(), kb2.fingerprint());
    }

    #[test]
    fn every_kb_member_is_listed_once_and_sorted() {
        let mut seen = std::collections::BTreeSet::new();
        for (_, members) in KB_CLUSTERS {
            let mut sorted = members.to_vec();
            sorted.sort_unstable();
            assert_eq!(&sorted, members, "cluster members must stay sorted");
            for member in *members {
                assert!(seen.insert(*member), "{member} appears in two clusters");
            }
        }
    }
}
