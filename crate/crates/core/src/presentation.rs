//! Random presentations in the k-gonal model.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use thiserror::Error;

/// Signed generator index: `i` is `a_i`, `-i` is its inverse.
pub type Letter = i32;
pub type Word = Vec<Letter>;

/// Above this many cyclically reduced words the sampler switches from
/// rank-based selection to rejection sampling.
pub const EXACT_SAMPLING_LIMIT: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresentationError {
    #[error("empty word")]
    EmptyWord,
    #[error("word count overflows for n={n}, k={k}")]
    CountOverflow { n: usize, k: usize },
    #[error("density overflow at this scale: {requested} relators requested but only {available} words exist")]
    DensityOverflow { requested: u128, available: u128 },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("relator {relator:?} cannot be encoded: {reason}")]
    NotEncodable { relator: Word, reason: String },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

type Result<T> = std::result::Result<T, PresentationError>;

pub fn inverse_word(w: &[Letter]) -> Word {
    w.iter().rev().map(|&l| -l).collect()
}

pub fn rotate(w: &[Letter], r: usize) -> Word {
    if w.is_empty() {
        return Vec::new();
    }
    let r = r % w.len();
    w[r..].iter().chain(&w[..r]).copied().collect()
}

pub fn is_reduced(w: &[Letter]) -> bool {
    w.windows(2).all(|p| p[0] != -p[1])
}

pub fn is_cyclically_reduced(w: &[Letter]) -> Result<bool> {
    if w.is_empty() {
        return Err(PresentationError::EmptyWord);
    }
    Ok(is_reduced(w) && (w.len() == 1 || w[0] != -w[w.len() - 1]))
}

/// Free reduction with a stack.
pub fn free_reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// True when `a` is a cyclic rotation of `b`.
pub fn is_rotation_of(a: &[Letter], b: &[Letter]) -> bool {
    a.len() == b.len() && (a.is_empty() || (0..b.len()).any(|r| b[r..].iter().chain(&b[..r]).eq(a)))
}

/// |W_n| = (2n-1)^k + n + (n-1)(-1)^k, with overflow detection.
pub fn count_cyclically_reduced(n: usize, k: usize) -> Result<u128> {
    if n == 0 || k == 0 {
        return Err(PresentationError::InvalidParameters(format!("need n >= 1 and k >= 1, got n={n}, k={k}")));
    }
    let overflow = PresentationError::CountOverflow { n, k };
    let base = u128::try_from(2 * n - 1).map_err(|_| overflow.clone())?;
    let exp = u32::try_from(k).map_err(|_| overflow.clone())?;
    let power = base.checked_pow(exp).ok_or_else(|| overflow.clone())?;
    let n = n as u128;
    let total = if k % 2 == 0 {
        power.checked_add(n).and_then(|v| v.checked_add(n - 1))
    } else {
        power.checked_add(n).map(|v| v - (n - 1))
    };
    total.ok_or(overflow)
}

/// round((2n-1)^{kd}) with a floor of 1.
pub fn relator_count(n: usize, k: usize, d: f64) -> Result<u128> {
    if !(d > 0.0 && d < 1.0) {
        return Err(PresentationError::InvalidParameters(format!("density {d} outside (0, 1)")));
    }
    let available = count_cyclically_reduced(n, k)?;
    let raw = ((2 * n - 1) as f64).powf(k as f64 * d).round();
    if !raw.is_finite() || raw > available as f64 {
        return Err(PresentationError::DensityOverflow { requested: raw as u128, available });
    }
    let requested = (raw as u128).max(1);
    if requested > available {
        return Err(PresentationError::DensityOverflow { requested, available });
    }
    Ok(requested)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    n: usize,
    k: usize,
    density: Option<f64>,
    relators: Vec<Word>,
}

impl Presentation {
    /// Validates letters, lengths, cyclic reduction and distinctness; relators are stored sorted.
    pub fn new(n: usize, k: usize, density: Option<f64>, mut relators: Vec<Word>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(PresentationError::InvalidParameters(format!("need n >= 1 and k >= 1, got n={n}, k={k}")));
        }
        for r in &relators {
            if r.len() != k {
                return Err(PresentationError::InvalidParameters(format!("relator {r:?} has length {} not {k}", r.len())));
            }
            if r.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > n) {
                return Err(PresentationError::InvalidParameters(format!("relator {r:?} uses a letter outside 1..={n}")));
            }
            if !is_cyclically_reduced(r)? {
                return Err(PresentationError::InvalidParameters(format!("relator {r:?} is not cyclically reduced")));
            }
        }
        relators.sort();
        if relators.windows(2).any(|p| p[0] == p[1]) {
            return Err(PresentationError::InvalidParameters("duplicate relator".into()));
        }
        Ok(Presentation { n, k, density, relators })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `None` when the density is undefined (e.g. an empty positive subset).
    pub fn density(&self) -> Option<f64> {
        self.density
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match self.density {
            Some(d) => writeln!(s, "kgonal n={} k={} d={}", self.n, self.k, d).unwrap(),
            None => writeln!(s, "kgonal n={} k={} d=none", self.n, self.k).unwrap(),
        }
        for r in &self.relators {
            let line: Vec<String> = r.iter().map(|l| l.to_string()).collect();
            writeln!(s, "{}", line.join(" ")).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(PresentationError::Parse { line: 1, msg: "missing header".into() })?;
        let mut tokens = header.split_whitespace();
        if tokens.next() != Some("kgonal") {
            return Err(PresentationError::Parse { line: 1, msg: "header must start with `kgonal`".into() });
        }
        let (mut n, mut k, mut d) = (None, None, None);
        for tok in tokens {
            let bad = || PresentationError::Parse { line: 1, msg: format!("bad header field `{tok}`") };
            let (key, value) = tok.split_once('=').ok_or_else(bad)?;
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
                "k" => k = Some(value.parse::<usize>().map_err(|_| bad())?),
                "d" => d = Some(if value == "none" { None } else { Some(value.parse::<f64>().map_err(|_| bad())?) }),
                _ => return Err(bad()),
            }
        }
        let missing = |f: &str| PresentationError::Parse { line: 1, msg: format!("header lacks `{f}`") };
        let (n, k, d) = (n.ok_or_else(|| missing("n"))?, k.ok_or_else(|| missing("k"))?, d.ok_or_else(|| missing("d"))?);
        let mut relators = Vec::new();
        for (i, line) in lines {
            let word = line
                .split_whitespace()
                .map(|t| t.parse::<Letter>())
                .collect::<std::result::Result<Word, _>>()
                .map_err(|e| PresentationError::Parse { line: i + 1, msg: e.to_string() })?;
            relators.push(word);
        }
        Presentation::new(n, k, d, relators)
    }
}

fn letter_of(idx: usize, n: usize) -> Letter {
    if idx < n {
        idx as Letter + 1
    } else {
        -((idx - n) as Letter + 1)
    }
}

#[cfg(test)]
fn index_of(l: Letter, n: usize) -> usize {
    if l > 0 {
        l as usize - 1
    } else {
        n + (-l) as usize - 1
    }
}

#[derive(Clone, Copy)]
enum Rel {
    Same = 0,
    Inverse = 1,
    Other = 2,
}

/// Ranks cyclically reduced words of length k in lexicographic order of letter indices.
struct Unranker {
    n: usize,
    k: usize,
    // completions[m][s]: ways to append m letters after a letter in relation s to the first.
    completions: Vec<[u128; 3]>,
}

impl Unranker {
    fn new(n: usize, k: usize) -> Self {
        let other = 2 * n as u128 - 2;
        let other_after_other = (2 * n as u128).saturating_sub(3);
        let mut completions = vec![[1u128, 0, 1]];
        for m in 1..k {
            let p = completions[m - 1];
            completions.push([
                p[0] + other * p[2],
                p[1] + other * p[2],
                p[0] + p[1] + other_after_other * p[2],
            ]);
        }
        Unranker { n, k, completions }
    }

    fn per_first_letter(&self) -> u128 {
        self.completions[self.k - 1][Rel::Same as usize]
    }

    fn unrank(&self, rank: u128) -> Word {
        let n = self.n;
        let per_first = self.per_first_letter();
        let first = (rank / per_first) as usize;
        let mut r = rank % per_first;
        let mut word = vec![letter_of(first, n)];
        let inv_first = (first + n) % (2 * n);
        let mut prev = first;
        for pos in 1..self.k {
            let remaining = self.k - 1 - pos;
            let banned = (prev + n) % (2 * n);
            let mut chosen = None;
            for x in 0..2 * n {
                if x == banned {
                    continue;
                }
                let rel = if x == first {
                    Rel::Same
                } else if x == inv_first {
                    Rel::Inverse
                } else {
                    Rel::Other
                };
                let cnt = self.completions[remaining][rel as usize];
                if r < cnt {
                    chosen = Some(x);
                    break;
                }
                r -= cnt;
            }
            let x = chosen.expect("rank within range");
            word.push(letter_of(x, n));
            prev = x;
        }
        word
    }
}

/// One uniform cyclically reduced word by letter-by-letter sampling with rejection.
pub fn random_cyclically_reduced<R: Rng>(n: usize, k: usize, rng: &mut R) -> Word {
    loop {
        let mut word = Vec::with_capacity(k);
        let mut prev = rng.gen_range(0..2 * n);
        word.push(letter_of(prev, n));
        for _ in 1..k {
            let mut x = rng.gen_range(0..2 * n - 1);
            if x >= (prev + n) % (2 * n) {
                x += 1;
            }
            word.push(letter_of(x, n));
            prev = x;
        }
        if k == 1 || word[0] != -word[k - 1] {
            return word;
        }
    }
}

pub fn sample_presentation(n: usize, k: usize, d: f64, seed: u64) -> Result<Presentation> {
    let count = relator_count(n, k, d)?;
    let total = count_cyclically_reduced(n, k)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let relators: Vec<Word> = if total <= EXACT_SAMPLING_LIMIT {
        let unranker = Unranker::new(n, k);
        index::sample(&mut rng, total as usize, count as usize)
            .into_iter()
            .map(|r| unranker.unrank(r as u128))
            .collect()
    } else {
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(count as usize);
        while (out.len() as u128) < count {
            let w = random_cyclically_reduced(n, k, &mut rng);
            if seen.insert(w.clone()) {
                out.push(w);
            }
        }
        out
    };
    Presentation::new(n, k, Some(d), relators)
}

/// Enumerates W_n in rank order; intended for small n and k.
pub fn enumerate_cyclically_reduced(n: usize, k: usize) -> Result<Vec<Word>> {
    let total = count_cyclically_reduced(n, k)?;
    let unranker = Unranker::new(n, k);
    Ok((0..total).map(|r| unranker.unrank(r)).collect())
}

pub fn positive_subset(p: &Presentation) -> Presentation {
    let relators: Vec<Word> = p.relators.iter().filter(|r| r.iter().all(|&l| l > 0)).cloned().collect();
    let base = ((2 * p.n - 1) as f64).powi(p.k as i32);
    let density = if relators.is_empty() || base <= 1.0 {
        None
    } else {
        Some((relators.len() as f64).ln() / base.ln())
    };
    Presentation { n: p.n, k: p.k, density, relators }
}

/// Positive hexagonal relators regrouped as words of length 3 over ordered pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct TriEncoding {
    pub n: usize,
    pub density: Option<f64>,
    /// Pair letters are numbered `(a-1)*n + b` for the pair `(a_a, a_b)`.
    pub words: Vec<[usize; 3]>,
}

impl TriEncoding {
    pub fn alphabet_size(&self) -> usize {
        self.n * self.n
    }

    pub fn pair_of(&self, letter: usize) -> (Letter, Letter) {
        let i = letter - 1;
        ((i / self.n) as Letter + 1, (i % self.n) as Letter + 1)
    }

    pub fn decode(&self) -> Presentation {
        let relators = self
            .words
            .iter()
            .map(|w| w.iter().flat_map(|&pl| { let (a, b) = self.pair_of(pl); [a, b] }).collect())
            .collect();
        Presentation::new(self.n, 6, self.density, relators).expect("decoded words are positive and distinct")
    }
}

pub fn hex_to_tri_encode(p: &Presentation) -> Result<TriEncoding> {
    if p.k != 6 {
        return Err(PresentationError::InvalidParameters(format!("expected k = 6, got k = {}", p.k)));
    }
    let n = p.n;
    let words = p
        .relators
        .iter()
        .map(|r| {
            if r.iter().any(|&l| l < 0) {
                return Err(PresentationError::NotEncodable { relator: r.clone(), reason: "contains an inverse letter".into() });
            }
            let pair = |a: Letter, b: Letter| (a as usize - 1) * n + b as usize;
            Ok([pair(r[0], r[1]), pair(r[2], r[3]), pair(r[4], r[5])])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TriEncoding { n, density: p.density, words })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_reduction_examples() {
        assert!(is_cyclically_reduced(&[1, 1]).unwrap());
        assert!(!is_cyclically_reduced(&[1, -1]).unwrap());
        assert!(!is_cyclically_reduced(&[1, 2, -1]).unwrap());
        assert_eq!(is_cyclically_reduced(&[]), Err(PresentationError::EmptyWord));
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_cyclically_reduced(2, 1).unwrap(), 4);
        assert_eq!(count_cyclically_reduced(1, 2).unwrap(), 2);
        assert_eq!(count_cyclically_reduced(2, 3).unwrap(), 28);
        assert!(matches!(count_cyclically_reduced(usize::MAX / 4, 64), Err(PresentationError::CountOverflow { .. })));
    }

    #[test]
    fn relator_count_examples() {
        assert_eq!(relator_count(4, 4, 0.25).unwrap(), 7);
        assert_eq!(relator_count(1, 6, 0.5).unwrap(), 1);
        assert_eq!(relator_count(3, 6, 1.0 / 3.0).unwrap(), 25);
        assert_eq!(relator_count(1, 2, 0.999).unwrap(), 1);
        assert!(matches!(relator_count(2, 1, 0.99), Ok(3)));
        assert!(relator_count(2, 4, 0.0).is_err());
    }

    #[test]
    fn unranker_covers_all_words_once() {
        for n in 1..=3 {
            for k in 1..=5 {
                let words = enumerate_cyclically_reduced(n, k).unwrap();
                let set: HashSet<_> = words.iter().cloned().collect();
                assert_eq!(set.len(), words.len());
                assert!(words.iter().all(|w| w.len() == k && is_cyclically_reduced(w).unwrap()));
                let mut sorted = words.clone();
                sorted.sort_by_key(|w| w.iter().map(|&l| index_of(l, n)).collect::<Vec<_>>());
                assert_eq!(sorted, words);
            }
        }
    }

    #[test]
    fn sampler_examples() {
        let p = sample_presentation(1, 2, 0.5, 3).unwrap();
        assert_eq!(p.relators().len(), 1);
        assert!(p.relators()[0] == vec![1, 1] || p.relators()[0] == vec![-1, -1]);
        assert_eq!(sample_presentation(5, 6, 0.3, 11).unwrap(), sample_presentation(5, 6, 0.3, 11).unwrap());
    }

    #[test]
    fn rejection_path_matches_contract() {
        let p = sample_presentation(40, 6, 0.1, 5).unwrap();
        assert!(count_cyclically_reduced(40, 6).unwrap() > EXACT_SAMPLING_LIMIT);
        assert_eq!(p.relators().len() as u128, relator_count(40, 6, 0.1).unwrap());
        assert!(p.relators().iter().all(|r| is_cyclically_reduced(r).unwrap()));
    }

    #[test]
    fn text_round_trip() {
        let p = sample_presentation(3, 6, 0.3, 1).unwrap();
        let text = p.to_text();
        assert_eq!(Presentation::from_text(&text).unwrap(), p);
        assert_eq!(Presentation::from_text(&text).unwrap().to_text(), text);
    }

    #[test]
    fn positive_subset_examples() {
        let p = Presentation::new(2, 6, Some(0.2), vec![vec![1, 2, 1, 2, 1, 2], vec![1, -2, 1, 2, 1, 2]]).unwrap();
        assert_eq!(positive_subset(&p).relators(), &[vec![1, 2, 1, 2, 1, 2]]);
        let q = Presentation::new(2, 6, Some(0.2), vec![vec![1, 2, 1, 2, 1, 2]]).unwrap();
        assert_eq!(positive_subset(&q).relators(), q.relators());
        let none = Presentation::new(2, 6, Some(0.2), vec![vec![-1, -2, -1, -2, -1, -2]]).unwrap();
        let empty = positive_subset(&none);
        assert!(empty.relators().is_empty());
        assert_eq!(empty.density(), None);
    }

    #[test]
    fn tri_encoding_examples() {
        let p = Presentation::new(3, 6, None, vec![vec![1, 1, 1, 1, 1, 1], vec![1, 2, 3, 1, 2, 3]]).unwrap();
        let t = hex_to_tri_encode(&p).unwrap();
        assert_eq!(t.alphabet_size(), 9);
        assert_eq!(t.words[0], [1, 1, 1]);
        assert_eq!(t.words[1].map(|l| t.pair_of(l)), [(1, 2), (3, 1), (2, 3)]);
        assert_eq!(t.decode(), p);
        let bad = Presentation::new(2, 6, None, vec![vec![1, -2, 1, 2, 1, 2]]).unwrap();
        assert!(matches!(hex_to_tri_encode(&bad), Err(PresentationError::NotEncodable { relator, .. }) if relator == vec![1, -2, 1, 2, 1, 2]));
    }
}
