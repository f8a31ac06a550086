//! Exact arithmetic in the ring ℤ[β] for the plastic number β (the real root
//! of x³ − x − 1), together with its real and complex embeddings, the
//! ⋆-map into internal space ℝ², and the parameterization of the Fourier
//! module by integer Miller triples.
//!
//! Elements are stored exactly as integer coordinates with respect to the
//! basis (1, β, β²). Products are reduced with β³ = β + 1 and β⁴ = β + β².
//! All irrational scalars are read from a single shared [`Embeddings`]
//! record.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::AlgebraError;

/// A point in the two-dimensional internal space.
pub type Point = [f64; 2];

/// Exact element `n0 + n1·β + n2·β²` of ℤ[β].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BetaInt {
    pub n0: i64,
    pub n1: i64,
    pub n2: i64,
}

impl BetaInt {
    pub const ZERO: BetaInt = BetaInt::new(0, 0, 0);
    pub const ONE: BetaInt = BetaInt::new(1, 0, 0);
    pub const BETA: BetaInt = BetaInt::new(0, 1, 0);
    pub const BETA_SQ: BetaInt = BetaInt::new(0, 0, 1);

    pub const fn new(n0: i64, n1: i64, n2: i64) -> Self {
        BetaInt { n0, n1, n2 }
    }

    pub const fn coords(self) -> [i64; 3] {
        [self.n0, self.n1, self.n2]
    }

    pub fn checked_add(self, rhs: BetaInt) -> Result<BetaInt, AlgebraError> {
        Ok(BetaInt::new(
            self.n0.checked_add(rhs.n0).ok_or(AlgebraError::Overflow)?,
            self.n1.checked_add(rhs.n1).ok_or(AlgebraError::Overflow)?,
            self.n2.checked_add(rhs.n2).ok_or(AlgebraError::Overflow)?,
        ))
    }

    pub fn checked_neg(self) -> Result<BetaInt, AlgebraError> {
        Ok(BetaInt::new(
            self.n0.checked_neg().ok_or(AlgebraError::Overflow)?,
            self.n1.checked_neg().ok_or(AlgebraError::Overflow)?,
            self.n2.checked_neg().ok_or(AlgebraError::Overflow)?,
        ))
    }

    pub fn checked_sub(self, rhs: BetaInt) -> Result<BetaInt, AlgebraError> {
        self.checked_add(rhs.checked_neg()?)
    }

    /// Product in ℤ[β], reduced via β³ = 1 + β and β⁴ = β + β².
    pub fn checked_mul(self, rhs: BetaInt) -> Result<BetaInt, AlgebraError> {
        let a = self.coords();
        let b = rhs.coords();
        // raw coefficients of β^0..β^4 before reduction
        let mut raw = [0i64; 5];
        for (i, &ai) in a.iter().enumerate() {
            for (j, &bj) in b.iter().enumerate() {
                let term = ai.checked_mul(bj).ok_or(AlgebraError::Overflow)?;
                raw[i + j] = raw[i + j].checked_add(term).ok_or(AlgebraError::Overflow)?;
            }
        }
        let add = |x: i64, y: i64| x.checked_add(y).ok_or(AlgebraError::Overflow);
        Ok(BetaInt::new(
            add(raw[0], raw[3])?,
            add(add(raw[1], raw[3])?, raw[4])?,
            add(raw[2], raw[4])?,
        ))
    }

    /// Multiplication by β: `(n0, n1, n2) ↦ (n2, n0 + n2, n1)`.
    pub fn checked_mul_beta(self) -> Result<BetaInt, AlgebraError> {
        Ok(BetaInt::new(
            self.n2,
            self.n0.checked_add(self.n2).ok_or(AlgebraError::Overflow)?,
            self.n1,
        ))
    }

    pub fn checked_scale(self, factor: i64) -> Result<BetaInt, AlgebraError> {
        Ok(BetaInt::new(
            self.n0.checked_mul(factor).ok_or(AlgebraError::Overflow)?,
            self.n1.checked_mul(factor).ok_or(AlgebraError::Overflow)?,
            self.n2.checked_mul(factor).ok_or(AlgebraError::Overflow)?,
        ))
    }

    /// β raised to a nonnegative power, exactly.
    pub fn beta_pow(exp: u32) -> Result<BetaInt, AlgebraError> {
        let mut acc = BetaInt::ONE;
        for _ in 0..exp {
            acc = acc.checked_mul_beta()?;
        }
        Ok(acc)
    }

    pub fn real_embed(self) -> f64 {
        real_embed(self)
    }

    pub fn star(self) -> Point {
        star_map(self)
    }
}

impl Add for BetaInt {
    type Output = BetaInt;
    fn add(self, rhs: BetaInt) -> BetaInt {
        self.checked_add(rhs).expect("BetaInt addition overflowed")
    }
}

impl Sub for BetaInt {
    type Output = BetaInt;
    fn sub(self, rhs: BetaInt) -> BetaInt {
        self.checked_sub(rhs).expect("BetaInt subtraction overflowed")
    }
}

impl Neg for BetaInt {
    type Output = BetaInt;
    fn neg(self) -> BetaInt {
        self.checked_neg().expect("BetaInt negation overflowed")
    }
}

impl Mul for BetaInt {
    type Output = BetaInt;
    fn mul(self, rhs: BetaInt) -> BetaInt {
        self.checked_mul(rhs).expect("BetaInt multiplication overflowed")
    }
}

impl fmt::Display for BetaInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}β + {}β²", self.n0, self.n1, self.n2)
    }
}

/// Checked product in ℤ[β]; overflow of any coordinate is reported.
pub fn beta_mul(x: BetaInt, y: BetaInt) -> Result<BetaInt, AlgebraError> {
    x.checked_mul(y)
}

/// The plastic number and the conjugate data every other module reads.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Embeddings {
    pub beta: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub alpha2_re: f64,
    pub alpha2_im: f64,
    pub sqrt23: f64,
}

impl Embeddings {
    fn compute() -> Self {
        let beta = refine_root(radical_root());
        let b2 = beta * beta;
        let sqrt23 = 23f64.sqrt();
        Embeddings {
            beta,
            alpha_re: -beta / 2.0,
            alpha_im: (4.0 + 9.0 * beta - 6.0 * b2) / (2.0 * sqrt23),
            alpha2_re: 1.0 - b2 / 2.0,
            alpha2_im: (6.0 + 2.0 * beta - 9.0 * b2) / (2.0 * sqrt23),
            sqrt23,
        }
    }

    pub fn beta_sq(&self) -> f64 {
        self.beta * self.beta
    }

    /// |α|, which equals β^(−1/2).
    pub fn alpha_abs(&self) -> f64 {
        self.alpha_re.hypot(self.alpha_im)
    }

    /// Evaluates `c0 + c1·β + c2·β²` for real coefficients.
    pub fn eval(&self, c0: f64, c1: f64, c2: f64) -> f64 {
        c0 + c1 * self.beta + c2 * self.beta_sq()
    }
}

/// The shared embedding record.
pub fn embeddings() -> &'static Embeddings {
    static EMB: OnceLock<Embeddings> = OnceLock::new();
    EMB.get_or_init(Embeddings::compute)
}

/// Cardano's closed form for the real root; accurate to a few ulps only.
fn radical_root() -> f64 {
    let s69 = 69f64.sqrt();
    ((9.0 + s69).cbrt() + (9.0 - s69).cbrt()) / 18f64.cbrt()
}

fn refine_root(mut x: f64) -> f64 {
    for _ in 0..8 {
        let step = (x * x * x - x - 1.0) / (3.0 * x * x - 1.0);
        let next = x - step;
        if next == x {
            break;
        }
        x = next;
    }
    x
}

pub fn real_embed(x: BetaInt) -> f64 {
    let e = embeddings();
    x.n0 as f64 + e.beta * (x.n1 as f64 + e.beta * x.n2 as f64)
}

/// The ⋆-map `x ↦ (Re σ(x), Im σ(x))` with σ: β ↦ α.
pub fn star_map(x: BetaInt) -> Point {
    let e = embeddings();
    let (n0, n1, n2) = (x.n0 as f64, x.n1 as f64, x.n2 as f64);
    [
        n0 + n1 * e.alpha_re + n2 * e.alpha2_re,
        n1 * e.alpha_im + n2 * e.alpha2_im,
    ]
}

/// Numerator of the Fourier-module generator `(5 − 6β + 4β²)/23`.
pub const MODULE_GENERATOR_NUMERATOR: BetaInt = BetaInt::new(5, -6, 4);
pub const MODULE_GENERATOR_DENOMINATOR: i64 = 23;

/// Integer Miller triple `(n0, n1, n2)` indexing a Bragg peak.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Miller(pub [i64; 3]);

impl Miller {
    pub const fn new(n0: i64, n1: i64, n2: i64) -> Self {
        Miller([n0, n1, n2])
    }

    pub fn as_beta_int(self) -> BetaInt {
        BetaInt::new(self.0[0], self.0[1], self.0[2])
    }

    pub fn is_zero(self) -> bool {
        self.0 == [0, 0, 0]
    }
}

impl std::ops::Neg for Miller {
    type Output = Miller;
    fn neg(self) -> Miller {
        Miller(self.0.map(|n| -n))
    }
}

impl fmt::Display for Miller {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

impl FromStr for Miller {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(AlgebraError::Parse(s.to_string()));
        }
        let mut out = [0i64; 3];
        for (slot, p) in out.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| AlgebraError::Parse(s.to_string()))?;
        }
        Ok(Miller(out))
    }
}

/// A Miller triple with its physical wave number and internal image.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WaveNumber {
    pub miller: Miller,
    pub k: f64,
    /// Closed-form ⋆-image of k, i.e. `(Re σ(k), Im σ(k))`.
    pub kstar: Point,
}

impl WaveNumber {
    /// Internal component of the dual-lattice vector over k.
    ///
    /// The Fourier module is dual to ℤ[β] under the trace form, so
    /// `k·x + ⟨κ, x⋆⟩ ∈ ℤ` holds for `κ = (2 Re σ(k), −2 Im σ(k))`. Window
    /// transforms enter the Bragg amplitude at κ.
    pub fn dual_internal(&self) -> Point {
        [2.0 * self.kstar[0], -2.0 * self.kstar[1]]
    }
}

/// Builds the wave number `k = (5 − 6β + 4β²)/23 · (n0 + n1β + n2β²)`.
pub fn wave_number(miller: Miller) -> WaveNumber {
    let e = embeddings();
    let [n0, n1, n2] = miller.0.map(|n| n as f64);
    let generator = e.eval(5.0, -6.0, 4.0) / 23.0;
    let k = generator * real_embed(miller.as_beta_int());
    let kstar = [
        ((18.0 * n0 - 4.0 * n1 + 6.0 * n2) + (6.0 * n0 - 9.0 * n1 + 2.0 * n2) * e.beta
            - (4.0 * n0 - 6.0 * n1 + 9.0 * n2) * e.beta_sq())
            / 46.0,
        (2.0 * n2 + (3.0 * n1 - 2.0 * n0) * e.beta - 3.0 * n2 * e.beta_sq()) / (2.0 * e.sqrt23),
    ];
    WaveNumber { miller, k, kstar }
}

/// Exact numerator `(5 − 6β + 4β²)·(n0 + n1β + n2β²)` of a wave number;
/// the wave number itself is this element divided by 23.
pub fn wave_number_numerator(miller: Miller) -> Result<BetaInt, AlgebraError> {
    MODULE_GENERATOR_NUMERATOR.checked_mul(miller.as_beta_int())
}

/// Basis matrix of the Minkowski lattice: column j is the embedding of βʲ.
pub fn basis_matrix() -> [[f64; 3]; 3] {
    let e = embeddings();
    [
        [1.0, e.beta, e.beta_sq()],
        [1.0, e.alpha_re, e.alpha2_re],
        [0.0, e.alpha_im, e.alpha2_im],
    ]
}

/// Basis matrix of the dual lattice, normalized so that `𝓑·(𝓑*)ᵀ = I`.
pub fn dual_basis_matrix() -> [[f64; 3]; 3] {
    let e = embeddings();
    let (b, b2, ia) = (e.beta, e.beta_sq(), e.alpha_im);
    let s = 2.0 / e.sqrt23;
    [
        [s * ia / b, s * ia * b, s * ia],
        [s * 2.0 * ia * b2, -s * ia * b, -s * ia],
        [s * b, s * (-1.0 + 1.5 * b2), -s * 1.5 * b],
    ]
}

/// Derived scalars of the plastic tiling.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constants {
    pub beta: f64,
    pub alpha_re: f64,
    pub alpha_im: f64,
    pub alpha2_re: f64,
    pub alpha2_im: f64,
    /// Mean distance between neighbouring control points, `4 + 2β − 3β²`.
    pub mean_spacing: f64,
    /// dens(Λ) = `(3 + β + 7β²)/23`.
    pub point_density: f64,
    /// dens(𝓛) = `2/√23`.
    pub lattice_density: f64,
    /// Window volumes `Im(α)·(β² − 1, β, 1)` for letters a, b, c.
    pub window_volumes: [f64; 3],
    /// `(5 − 6β + 4β²)/23`.
    pub module_generator: f64,
}

pub fn constants() -> Constants {
    let e = embeddings();
    let b = e.beta;
    let b2 = e.beta_sq();
    Constants {
        beta: b,
        alpha_re: e.alpha_re,
        alpha_im: e.alpha_im,
        alpha2_re: e.alpha2_re,
        alpha2_im: e.alpha2_im,
        mean_spacing: e.eval(4.0, 2.0, -3.0),
        point_density: e.eval(3.0, 1.0, 7.0) / 23.0,
        lattice_density: 2.0 / e.sqrt23,
        window_volumes: [e.alpha_im * (b2 - 1.0), e.alpha_im * b, e.alpha_im],
        module_generator: e.eval(5.0, -6.0, 4.0) / 23.0,
    }
}

/// dens(Λ), the density of all control points.
pub fn point_density() -> f64 {
    embeddings().eval(3.0, 1.0, 7.0) / 23.0
}

/// dens(𝓛) = 2/√23.
pub fn lattice_density() -> f64 {
    2.0 / embeddings().sqrt23
}
