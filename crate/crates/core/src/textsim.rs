//! Tokenization and pairwise comment distances.
//!
//! Two complementary distances are combined: the Jaccard distance over the
//! distinct tokens of two comments (shared vocabulary) and the Levenshtein
//! edit distance over characters normalized by the longer comment (shared
//! structure). The combined distance is their arithmetic mean.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TextSimError {
    #[error("need at least {needed} comments, got {got}")]
    TooFewComments { needed: usize, got: usize },
    #[error("invalid distance matrix: {0}")]
    InvalidMatrix(String),
}

/// Characters peeled off word boundaries as standalone tokens.
fn is_punctuation(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenSequence {
    tokens: Vec<String>,
}

impl TokenSequence {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn distinct(&self) -> HashSet<&str> {
        self.tokens.iter().map(String::as_str).collect()
    }
}

/// Splits on whitespace, then peels leading and trailing punctuation into
/// single-character tokens. Case is preserved.
pub fn tokenize(body: &str) -> TokenSequence {
    let mut tokens = Vec::new();
    for chunk in body.split_whitespace() {
        let first = chunk.char_indices().find(|&(_, c)| !is_punctuation(c));
        let last = chunk.char_indices().rev().find(|&(_, c)| !is_punctuation(c));
        match (first, last) {
            (Some((start, _)), Some((end, end_char))) => {
                let end = end + end_char.len_utf8();
                tokens.extend(chunk[..start].chars().map(String::from));
                tokens.push(chunk[start..end].to_string());
                tokens.extend(chunk[end..].chars().map(String::from));
            }
            _ => tokens.extend(chunk.chars().map(String::from)),
        }
    }
    TokenSequence { tokens }
}

fn jaccard_of_sets<T: Scalar>(a: &HashSet<&str>, b: &HashSet<&str>) -> T {
    if a.is_empty() && b.is_empty() {
        return T::zero();
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let common = small.iter().filter(|t| large.contains(*t)).count();
    let union = a.len() + b.len() - common;
    T::one() - T::from_count(common) / T::from_count(union)
}

/// `1 - |A ∩ B| / |A ∪ B|` over distinct tokens; 0 when both are empty.
pub fn jaccard_distance<T: Scalar>(a: &str, b: &str) -> T {
    let ta = tokenize(a);
    let tb = tokenize(b);
    jaccard_of_sets(&ta.distinct(), &tb.distinct())
}

/// Unit-cost edit distance over Unicode scalar values.
pub fn edit_distance(a: &[char], b: &[char]) -> usize {
    let prefix = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    let (a, b) = (&a[prefix..], &b[prefix..]);
    let suffix = a
        .iter()
        .rev()
        .zip(b.iter().rev())
        .take_while(|(x, y)| x == y)
        .count();
    let (a, b) = (&a[..a.len() - suffix], &b[..b.len() - suffix]);
    let (outer, inner) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    if inner.is_empty() {
        return outer.len();
    }

    let mut row: Vec<usize> = (0..=inner.len()).collect();
    for (i, oc) in outer.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, ic) in inner.iter().enumerate() {
            let above = row[j + 1];
            let cost = usize::from(oc != ic);
            row[j + 1] = (diag + cost).min(above + 1).min(row[j] + 1);
            diag = above;
        }
    }
    row[inner.len()]
}

fn levenshtein_of_chars<T: Scalar>(a: &[char], b: &[char]) -> T {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return T::zero();
    }
    T::from_count(edit_distance(a, b)) / T::from_count(longest)
}

/// Edit distance divided by the length of the longer text; 0 when both are empty.
pub fn levenshtein_distance_norm<T: Scalar>(a: &str, b: &str) -> T {
    let ca: Vec<char> = a.chars().collect();
    let cb: Vec<char> = b.chars().collect();
    levenshtein_of_chars(&ca, &cb)
}

/// Options for the combined distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceOptions {
    /// Comments are cut to this many characters before the edit distance is
    /// computed. `None` disables the cut.
    pub max_levenshtein_chars: Option<usize>,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        Self {
            max_levenshtein_chars: Some(2000),
        }
    }
}

/// Per-comment data reused across all pairs.
struct Prepared<'a> {
    words: HashSet<&'a str>,
    chars: Vec<char>,
}

impl<'a> Prepared<'a> {
    fn new(body: &'a str, tokens: &'a TokenSequence, opts: &DistanceOptions) -> Self {
        let chars = match opts.max_levenshtein_chars {
            Some(cap) => body.chars().take(cap).collect(),
            None => body.chars().collect(),
        };
        Self {
            words: tokens.distinct(),
            chars,
        }
    }

    fn distance<T: Scalar>(&self, other: &Prepared<'_>) -> T {
        let lev: T = levenshtein_of_chars(&self.chars, &other.chars);
        let jac: T = jaccard_of_sets(&self.words, &other.words);
        (lev + jac).half()
    }
}

/// `(L + J) / 2` with the default options.
pub fn combined_distance<T: Scalar>(a: &str, b: &str) -> T {
    combined_distance_with(a, b, &DistanceOptions::default())
}

pub fn combined_distance_with<T: Scalar>(a: &str, b: &str, opts: &DistanceOptions) -> T {
    let (ta, tb) = (tokenize(a), tokenize(b));
    Prepared::new(a, &ta, opts).distance(&Prepared::new(b, &tb, opts))
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    /// Builds a matrix from `f(i, j)` evaluated for `i < j`.
    pub fn from_upper(n: usize, f: impl Fn(usize, usize) -> T) -> Result<Self, TextSimError> {
        if n == 0 {
            return Err(TextSimError::TooFewComments { needed: 1, got: 0 });
        }
        let mut values = vec![T::zero(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j);
                values[i * n + j] = d;
                values[j * n + i] = d;
            }
        }
        Self::validated(n, values)
    }

    /// Validates a full row-major matrix.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self, TextSimError> {
        let n = rows.len();
        if n == 0 {
            return Err(TextSimError::TooFewComments { needed: 1, got: 0 });
        }
        if let Some(i) = rows.iter().position(|r| r.len() != n) {
            return Err(TextSimError::InvalidMatrix(format!("row {i} is not of length {n}")));
        }
        Self::validated(n, rows.into_iter().flatten().collect())
    }

    fn validated(n: usize, values: Vec<T>) -> Result<Self, TextSimError> {
        for i in 0..n {
            if values[i * n + i] != T::zero() {
                return Err(TextSimError::InvalidMatrix(format!("non-zero diagonal at {i}")));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(v >= T::zero() && v <= T::one()) {
                    return Err(TextSimError::InvalidMatrix(format!(
                        "entry ({i},{j}) = {v:?} outside [0,1]"
                    )));
                }
                if v != values[j * n + i] {
                    return Err(TextSimError::InvalidMatrix(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        Ok(Self { n, values })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.n..(i + 1) * self.n]
    }
}

pub fn pairwise_distances<T: Scalar, S: AsRef<str> + Sync>(
    comments: &[S],
) -> Result<DistanceMatrix<T>, TextSimError> {
    pairwise_distances_with(comments, &DistanceOptions::default())
}

/// Combined distance for every pair. Rows are computed in parallel; the
/// result does not depend on scheduling.
pub fn pairwise_distances_with<T: Scalar, S: AsRef<str> + Sync>(
    comments: &[S],
    opts: &DistanceOptions,
) -> Result<DistanceMatrix<T>, TextSimError> {
    let n = comments.len();
    if n == 0 {
        return Err(TextSimError::TooFewComments { needed: 1, got: 0 });
    }
    let tokens: Vec<TokenSequence> = comments.iter().map(|c| tokenize(c.as_ref())).collect();
    let prepared: Vec<Prepared<'_>> = comments
        .iter()
        .zip(&tokens)
        .map(|(c, t)| Prepared::new(c.as_ref(), t, opts))
        .collect();

    let upper: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i + 1..n)
                .map(|j| prepared[i].distance(&prepared[j]))
                .collect()
        })
        .collect();
    DistanceMatrix::from_upper(n, |i, j| upper[i][j - i - 1])
}

/// Mean of each raw distance over all unordered pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanDistances<T> {
    pub mean_levenshtein: T,
    pub mean_jaccard: T,
}

pub fn mean_distances<T: Scalar, S: AsRef<str>>(
    comments: &[S],
) -> Result<MeanDistances<T>, TextSimError> {
    mean_distances_with(comments, &DistanceOptions::default())
}

pub fn mean_distances_with<T: Scalar, S: AsRef<str>>(
    comments: &[S],
    opts: &DistanceOptions,
) -> Result<MeanDistances<T>, TextSimError> {
    let n = comments.len();
    if n < 2 {
        return Err(TextSimError::TooFewComments { needed: 2, got: n });
    }
    let tokens: Vec<TokenSequence> = comments.iter().map(|c| tokenize(c.as_ref())).collect();
    let prepared: Vec<Prepared<'_>> = comments
        .iter()
        .zip(&tokens)
        .map(|(c, t)| Prepared::new(c.as_ref(), t, opts))
        .collect();
    let mut lev = T::zero();
    let mut jac = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            lev = lev + levenshtein_of_chars::<T>(&prepared[i].chars, &prepared[j].chars);
            jac = jac + jaccard_of_sets::<T>(&prepared[i].words, &prepared[j].words);
        }
    }
    let pairs = T::from_count(n * (n - 1) / 2);
    Ok(MeanDistances {
        mean_levenshtein: lev / pairs,
        mean_jaccard: jac / pairs,
    })
}
