//! The ternary substitution `a ↦ b ↦ c ↦ ab`, its Perron–Frobenius data,
//! and exact control-point sets of inflation patches.
//!
//! Patches grow rightward from a seed tile whose control point sits at 0.
//! One inflation step maps a control point `x` of type a to `βx` of type b,
//! type b to `βx` of type c, and type c to the pair `βx` (a), `βx + 1` (b).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::{embeddings, point_density, real_embed, BetaInt};
use crate::error::{AlgebraError, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
    C,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::A, Letter::B, Letter::C];

    pub const fn index(self) -> usize {
        match self {
            Letter::A => 0,
            Letter::B => 1,
            Letter::C => 2,
        }
    }

    pub const fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
            Letter::C => 'c',
        }
    }

    pub fn from_char(c: char) -> Option<Letter> {
        match c.to_ascii_lowercase() {
            'a' => Some(Letter::A),
            'b' => Some(Letter::B),
            'c' => Some(Letter::C),
            _ => None,
        }
    }

    /// Natural tile length 1, β or β².
    pub const fn tile_length(self) -> BetaInt {
        match self {
            Letter::A => BetaInt::ONE,
            Letter::B => BetaInt::BETA,
            Letter::C => BetaInt::BETA_SQ,
        }
    }

    pub const fn image(self) -> &'static [Letter] {
        match self {
            Letter::A => &[Letter::B],
            Letter::B => &[Letter::C],
            Letter::C => &[Letter::A, Letter::B],
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Letter {
    type Err = AlgebraError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut chars = s.trim().chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Letter::from_char(c).ok_or_else(|| AlgebraError::Parse(s.to_string())),
            _ => Err(AlgebraError::Parse(s.to_string())),
        }
    }
}

pub fn parse_word(s: &str) -> std::result::Result<Vec<Letter>, AlgebraError> {
    s.chars()
        .map(|c| Letter::from_char(c).ok_or_else(|| AlgebraError::Parse(s.to_string())))
        .collect()
}

pub fn word_to_string(word: &[Letter]) -> String {
    word.iter().map(|l| l.as_char()).collect()
}

/// Applies the substitution letterwise.
pub fn substitute(word: &[Letter]) -> Vec<Letter> {
    let mut out = Vec::with_capacity(word.len() * 2);
    for l in word {
        out.extend_from_slice(l.image());
    }
    out
}

/// Substitution matrix: entry (i, j) counts letter i in the image of letter j.
pub const SUBSTITUTION_MATRIX: [[i64; 3]; 3] = [[0, 0, 1], [1, 0, 1], [0, 1, 0]];

/// Letter counts `(#a, #b, #c)` of ρᵐ(seed).
pub fn letter_counts(m: u32, seed: Letter) -> std::result::Result<[u64; 3], AlgebraError> {
    let mut counts = [0u64; 3];
    counts[seed.index()] = 1;
    for _ in 0..m {
        let [a, b, c] = counts;
        counts = [c, a.checked_add(c).ok_or(AlgebraError::Overflow)?, b];
    }
    Ok(counts)
}

/// Length of the word ρᵐ(seed).
pub fn word_length(m: u32, seed: Letter) -> std::result::Result<u64, AlgebraError> {
    let counts = letter_counts(m, seed)?;
    counts
        .iter()
        .try_fold(0u64, |acc, &c| acc.checked_add(c))
        .ok_or(AlgebraError::Overflow)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ControlPoint {
    pub position: BetaInt,
    pub letter: Letter,
}

/// Streams the control points of ρᵐ(seed) in patch order.
///
/// The traversal is depth-first over the substitution tree, so memory use is
/// O(m) regardless of the patch size.
pub fn for_each_control_point<F>(m: u32, seed: Letter, mut visit: F) -> std::result::Result<(), AlgebraError>
where
    F: FnMut(ControlPoint),
{
    fn descend<F: FnMut(ControlPoint)>(
        position: BetaInt,
        letter: Letter,
        remaining: u32,
        visit: &mut F,
    ) -> std::result::Result<(), AlgebraError> {
        if remaining == 0 {
            visit(ControlPoint { position, letter });
            return Ok(());
        }
        let scaled = position.checked_mul_beta()?;
        match letter {
            Letter::A => descend(scaled, Letter::B, remaining - 1, visit),
            Letter::B => descend(scaled, Letter::C, remaining - 1, visit),
            Letter::C => {
                descend(scaled, Letter::A, remaining - 1, visit)?;
                descend(scaled.checked_add(BetaInt::ONE)?, Letter::B, remaining - 1, visit)
            }
        }
    }
    descend(BetaInt::ZERO, seed, m, &mut visit)
}

/// Exact control points of ρᵐ(seed), seed tile at 0.
pub fn inflate_points(m: u32, seed: Letter) -> Result<Vec<ControlPoint>> {
    let n = word_length(m, seed)?;
    let mut points = Vec::new();
    points
        .try_reserve_exact(n as usize)
        .map_err(|_| Error::ResourceExhausted(format!("{n} control points at depth {m}")))?;
    for_each_control_point(m, seed, |p| points.push(p))?;
    Ok(points)
}

/// Exact length of the patch ρᵐ(seed): `βᵐ · |seed|`.
pub fn patch_length(m: u32, seed: Letter) -> std::result::Result<BetaInt, AlgebraError> {
    BetaInt::beta_pow(m)?.checked_mul(seed.tile_length())
}

/// A patch flattened to real positions, for large exponential sums.
#[derive(Clone, Debug)]
pub struct Patch {
    pub depth: u32,
    pub seed: Letter,
    pub positions: Vec<f64>,
    pub letters: Vec<Letter>,
    /// Physical length of the patch.
    pub length: f64,
}

impl Patch {
    pub fn generate(m: u32, seed: Letter) -> Result<Patch> {
        let n = word_length(m, seed)? as usize;
        let mut positions = Vec::new();
        let mut letters = Vec::new();
        positions
            .try_reserve_exact(n)
            .and_then(|_| letters.try_reserve_exact(n))
            .map_err(|_| Error::ResourceExhausted(format!("{n} control points at depth {m}")))?;
        for_each_control_point(m, seed, |p| {
            positions.push(real_embed(p.position));
            letters.push(p.letter);
        })?;
        let length = real_embed(patch_length(m, seed)?);
        Ok(Patch { depth: m, seed, positions, letters, length })
    }

    pub fn from_points(depth: u32, seed: Letter, points: &[ControlPoint]) -> Result<Patch> {
        Ok(Patch {
            depth,
            seed,
            positions: points.iter().map(|p| real_embed(p.position)).collect(),
            letters: points.iter().map(|p| p.letter).collect(),
            length: real_embed(patch_length(depth, seed)?),
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Perron–Frobenius data of the substitution matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PfData {
    pub matrix: [[i64; 3]; 3],
    /// Left eigenvector, normalized by ⟨u|v⟩ = 1.
    pub u: [f64; 3],
    /// Right eigenvector (letter frequencies), normalized by ⟨1|v⟩ = 1.
    pub v: [f64; 3],
    pub beta: f64,
}

pub fn pf_data() -> PfData {
    let e = embeddings();
    let (b, b2) = (e.beta, e.beta_sq());
    let scale = point_density();
    PfData {
        matrix: SUBSTITUTION_MATRIX,
        u: [scale, scale * b, scale * b2],
        v: [2.0 - b2, b2 - b, b - 1.0],
        beta: b,
    }
}

/// Letter frequencies `v = (2 − β², β² − β, β − 1)`.
pub fn frequencies() -> [f64; 3] {
    pf_data().v
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Densities {
    pub total: f64,
    pub per_letter: [f64; 3],
}

pub fn densities() -> Densities {
    let total = point_density();
    Densities { total, per_letter: frequencies().map(|v| v * total) }
}

/// Writes a patch as CSV with columns `n0,n1,n2,letter,position_real`.
pub fn write_patch_csv<W: std::io::Write>(points: &[ControlPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n0", "n1", "n2", "letter", "position_real"])?;
    for p in points {
        w.write_record([
            p.position.n0.to_string(),
            p.position.n1.to_string(),
            p.position.n2.to_string(),
            p.letter.to_string(),
            format!("{:.17e}", real_embed(p.position)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iterate(word: &str, times: usize) -> String {
        let mut w = parse_word(word).unwrap();
        for _ in 0..times {
            w = substitute(&w);
        }
        word_to_string(&w)
    }

    #[test]
    fn substitution_examples() {
        assert_eq!(iterate("a", 1), "b");
        assert_eq!(iterate("c", 1), "ab");
        assert_eq!(iterate("ab", 1), "bc");
        assert_eq!(iterate("a", 3), "ab");
        assert_eq!(iterate("a", 4), "bc");
        assert_eq!(iterate("a", 5), "cab");
    }

    #[test]
    fn word_lengths() {
        assert_eq!(word_length(0, Letter::A).unwrap(), 1);
        assert_eq!(word_length(18, Letter::A).unwrap(), 114);
        let explicit = iterate("a", 19).len() as u64;
        assert_eq!(word_length(19, Letter::A).unwrap(), explicit);
        assert_eq!(
            word_length(19, Letter::A).unwrap(),
            word_length(17, Letter::A).unwrap() + word_length(16, Letter::A).unwrap()
        );
        for seed in Letter::ALL {
            for m in 3..40 {
                assert_eq!(
                    word_length(m, seed).unwrap(),
                    word_length(m - 2, seed).unwrap() + word_length(m - 3, seed).unwrap()
                );
            }
        }
    }

    #[test]
    fn inflate_small_patches() {
        let p0 = inflate_points(0, Letter::A).unwrap();
        assert_eq!(p0, vec![ControlPoint { position: BetaInt::ZERO, letter: Letter::A }]);
        let p3 = inflate_points(3, Letter::A).unwrap();
        assert_eq!(
            p3,
            vec![
                ControlPoint { position: BetaInt::ZERO, letter: Letter::A },
                ControlPoint { position: BetaInt::ONE, letter: Letter::B },
            ]
        );
    }

    #[test]
    fn patch_matches_cumulative_word_lengths() {
        for seed in Letter::ALL {
            let m = 14;
            let mut word = vec![seed];
            for _ in 0..m {
                word = substitute(&word);
            }
            let points = inflate_points(m, seed).unwrap();
            assert_eq!(points.len(), word.len());
            let mut pos = BetaInt::ZERO;
            for (p, l) in points.iter().zip(&word) {
                assert_eq!(p.letter, *l);
                assert_eq!(p.position, pos);
                pos = pos + l.tile_length();
            }
            assert_eq!(pos, patch_length(m, seed).unwrap());
        }
    }

    #[test]
    fn depth_18_patch_length() {
        let points = inflate_points(18, Letter::A).unwrap();
        assert_eq!(points.len(), 114);
        let last = points.last().unwrap();
        let end = real_embed(last.position + last.letter.tile_length());
        assert!((end - embeddings().beta.powi(18)).abs() < 1e-9);
        for pair in points.windows(2) {
            assert!(real_embed(pair[0].position) < real_embed(pair[1].position));
        }
    }

    #[test]
    fn pf_eigenvectors() {
        let pf = pf_data();
        let b = pf.beta;
        assert_eq!(pf.matrix, [[0, 0, 1], [1, 0, 1], [0, 1, 0]]);
        for i in 0..3 {
            let mv: f64 = (0..3).map(|j| pf.matrix[i][j] as f64 * pf.v[j]).sum();
            assert!((mv - b * pf.v[i]).abs() < 1e-12);
            let um: f64 = (0..3).map(|j| pf.u[j] * pf.matrix[j][i] as f64).sum();
            assert!((um - b * pf.u[i]).abs() < 1e-12);
        }
        assert!((pf.v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let uv: f64 = (0..3).map(|i| pf.u[i] * pf.v[i]).sum();
        assert!((uv - 1.0).abs() < 1e-12);
        let want = [0.245_122_333_753_307, 0.430_159_709_001_947, 0.324_717_957_244_746];
        for i in 0..3 {
            assert!((pf.v[i] - want[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn densities_examples() {
        let d = densities();
        assert!((d.total - 0.722_124_4).abs() < 1e-7);
        assert!((d.per_letter.iter().sum::<f64>() - d.total).abs() < 1e-12);
        let patch = Patch::generate(30, Letter::A).unwrap();
        let empirical = patch.len() as f64 / patch.length;
        assert!((empirical - d.total).abs() < 1e-3);
        assert!((patch.length - embeddings().beta.powi(30)).abs() / patch.length < 1e-10);
    }

    #[test]
    fn letter_frequencies_converge() {
        let counts = letter_counts(25, Letter::A).unwrap();
        let n: u64 = counts.iter().sum();
        let v = frequencies();
        for i in 0..3 {
            assert!((counts[i] as f64 / n as f64 - v[i]).abs() < 5e-4);
        }
    }

    #[test]
    fn streaming_matches_materialized() {
        let pts = inflate_points(20, Letter::C).unwrap();
        let patch = Patch::generate(20, Letter::C).unwrap();
        assert_eq!(patch.len(), pts.len());
        for (p, (x, l)) in pts.iter().zip(patch.positions.iter().zip(&patch.letters)) {
            assert_eq!(real_embed(p.position), *x);
            assert_eq!(p.letter, *l);
        }
    }

    #[test]
    fn patch_csv_has_header_and_rows() {
        let mut buf = Vec::new();
        write_patch_csv(&inflate_points(3, Letter::A).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n0,n1,n2,letter,position_real");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1,0,0,b,"));
    }

    #[test]
    fn letter_parsing() {
        assert_eq!("b".parse::<Letter>().unwrap(), Letter::B);
        assert!("d".parse::<Letter>().is_err());
        assert!("ab".parse::<Letter>().is_err());
    }
}
