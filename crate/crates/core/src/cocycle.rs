//! Internal Fourier matrix `B(y)`, its cocycle along the internal
//! contraction `R`, the limit `C(y) = lim β⁻ⁿ B⁽ⁿ⁾(y)` and the Bragg
//! amplitudes and intensities derived from `c(y) = C(y)·v`.
//!
//! The window transforms `f(y) = (dens Λ / dens 𝓛)·c(y)` satisfy
//! `f(y) = β⁻¹ B(y) f(R y)`. Iterating this relation `n` times leaves
//! `c(y) = β⁻ⁿ B⁽ⁿ⁾(y) · c(Rⁿ y)`, and since `Rⁿ y → 0` the trailing factor
//! is evaluated with a short Taylor polynomial of `c` around the origin
//! (see [`TailExpansion`]).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{embeddings, lattice_density, point_density, wave_number, Miller, Point};
use crate::error::{CocycleError, Error, Result};
use crate::inflation::{frequencies, SUBSTITUTION_MATRIX};

pub type CVec3 = [Complex64; 3];

/// Default convergence tolerance for `c(y)`.
pub const DEFAULT_TOL: f64 = 1e-12;
/// Minimum number of cocycle factors before convergence is accepted.
pub const MIN_STEPS: usize = 30;
/// Hard cap on the number of cocycle factors.
pub const MAX_STEPS: usize = 200;
/// Total degree of the Taylor polynomial used for the tail `c(Rⁿ y)`.
pub const TAIL_ORDER: u32 = 4;
/// Default bound on ‖k⋆‖ for peak enumeration.
pub const DEFAULT_KSTAR_MAX: f64 = 15.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 3×3 complex matrix; `B(y)` and its cocycle products.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FourierMatrix(pub [[Complex64; 3]; 3]);

impl FourierMatrix {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        FourierMatrix(m)
    }

    pub fn from_integer(m: [[i64; 3]; 3]) -> Self {
        FourierMatrix(m.map(|row| row.map(|x| Complex64::new(x as f64, 0.0))))
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn mul(&self, rhs: &FourierMatrix) -> FourierMatrix {
        let mut out = [[ZERO; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|l| self.0[i][l] * rhs.0[l][j]).sum();
            }
        }
        FourierMatrix(out)
    }

    pub fn apply(&self, v: &CVec3) -> CVec3 {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..3).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    pub fn scale(&self, s: f64) -> FourierMatrix {
        FourierMatrix(self.0.map(|row| row.map(|x| x * s)))
    }

    /// In-place right multiplication by `s·B(y)` where `phase = e^{2πi y₁}`.
    ///
    /// With `B = [[0,0,1],[1,0,phase],[0,1,0]]`, the new columns are
    /// `(col₁, col₂, col₀ + phase·col₁)` of the old matrix, scaled by `s`.
    fn right_mul_fourier(&mut self, phase: Complex64, s: f64) {
        for row in self.0.iter_mut() {
            let [c0, c1, c2] = *row;
            *row = [c1 * s, c2 * s, (c0 + phase * c1) * s];
        }
    }

    pub fn max_abs_diff(&self, other: &FourierMatrix) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Largest modulus over all nine 2×2 minors.
    pub fn max_minor(&self) -> f64 {
        let m = &self.0;
        let mut worst = 0.0f64;
        for (r0, r1) in [(0, 1), (0, 2), (1, 2)] {
            for (c0, c1) in [(0, 1), (0, 2), (1, 2)] {
                let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
                worst = worst.max(minor.norm());
            }
        }
        worst
    }
}

/// The internal contraction `R = Qᵀ`, where `Q` is multiplication by α.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InternalContraction {
    pub matrix: [[f64; 2]; 2],
}

impl InternalContraction {
    pub fn new() -> Self {
        let e = embeddings();
        InternalContraction { matrix: [[e.alpha_re, e.alpha_im], [-e.alpha_im, e.alpha_re]] }
    }

    pub fn apply(&self, y: Point) -> Point {
        let r = &self.matrix;
        [r[0][0] * y[0] + r[0][1] * y[1], r[1][0] * y[0] + r[1][1] * y[1]]
    }

    pub fn det(&self) -> f64 {
        let r = &self.matrix;
        r[0][0] * r[1][1] - r[0][1] * r[1][0]
    }

    /// |α| = β^(−1/2).
    pub fn spectral_radius(&self) -> f64 {
        self.matrix[0][0].hypot(self.matrix[0][1])
    }
}

impl Default for InternalContraction {
    fn default() -> Self {
        Self::new()
    }
}

fn unit_phase(y1: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * y1)
}

/// `B(y) = [[0,0,1],[1,0,e^{2πi y₁}],[0,1,0]]`.
pub fn fourier_matrix(y: Point) -> FourierMatrix {
    let mut m = FourierMatrix::from_integer(SUBSTITUTION_MATRIX);
    m.0[1][2] = unit_phase(y[0]);
    m
}

/// `B⁽ⁿ⁾(y) = B(y) B(Ry) ⋯ B(Rⁿ⁻¹y)`.
pub fn cocycle_product(y: Point, n: usize) -> Result<FourierMatrix, CocycleError> {
    if n == 0 {
        return Err(CocycleError::NoSteps);
    }
    let r = InternalContraction::new();
    let mut prod = FourierMatrix::identity();
    let mut z = y;
    for _ in 0..n {
        prod.right_mul_fourier(unit_phase(z[0]), 1.0);
        z = r.apply(z);
    }
    Ok(prod)
}

/// Taylor polynomial of `c` at the origin, in the variables ζ = y₁ + i y₂
/// and its conjugate.
///
/// `R` acts on ζ as multiplication by ᾱ, so the monomial `ζᵖ ζ̄^q` picks up
/// the factor `ᾱᵖ αᵠ`. Matching coefficients in `c(y) = β⁻¹ B(y) c(Ry)`
/// gives, for each `(p, q) ≠ (0, 0)`,
///
/// `(I − β⁻¹ ᾱᵖ αᵠ M) a_pq = β⁻¹ E Σ g_rs ᾱ^{p−r} α^{q−s} a_{p−r, q−s}`,
///
/// with `E` the unit matrix at entry (b, c) and `g_rs` the coefficients of
/// `e^{πi(ζ + ζ̄)} − 1`. The matrix on the left is invertible because its
/// eigenvalues have modulus `|α|^{p+q} < 1`, and `a_00 = v`.
#[derive(Clone, Debug)]
pub struct TailExpansion {
    order: u32,
    terms: Vec<(u32, u32, CVec3)>,
}

impl TailExpansion {
    pub fn new(order: u32) -> Self {
        let e = embeddings();
        let alpha = Complex64::new(e.alpha_re, e.alpha_im);
        let alpha_bar = alpha.conj();
        let inv_beta = 1.0 / e.beta;
        let v = frequencies().map(|x| Complex64::new(x, 0.0));
        let m = FourierMatrix::from_integer(SUBSTITUTION_MATRIX);
        let ipi = Complex64::new(0.0, PI);
        let factorial = |n: u32| (1..=n).map(f64::from).product::<f64>();
        let g = |r: u32, s: u32| ipi.powu(r + s) / (factorial(r) * factorial(s));

        let idx = |p: u32, q: u32| -> usize {
            let t = p + q;
            (t * (t + 1) / 2 + p) as usize
        };
        let mut coeffs: Vec<CVec3> = vec![[ZERO; 3]; idx(0, order + 1)];
        coeffs[0] = v;
        let mut terms = vec![(0, 0, v)];
        for total in 1..=order {
            for p in 0..=total {
                let q = total - p;
                let mut rhs = ZERO;
                for r in 0..=p {
                    for s in 0..=q {
                        if r == 0 && s == 0 {
                            continue;
                        }
                        let (pp, qq) = (p - r, q - s);
                        let lower = coeffs[idx(pp, qq)];
                        rhs += g(r, s) * alpha_bar.powu(pp) * alpha.powu(qq) * lower[2];
                    }
                }
                let lambda = alpha_bar.powu(p) * alpha.powu(q) * inv_beta;
                let mut system = [[ZERO; 3]; 3];
                for i in 0..3 {
                    for j in 0..3 {
                        let id = if i == j { ONE } else { ZERO };
                        system[i][j] = id - lambda * m.0[i][j];
                    }
                }
                let b = [ZERO, rhs * inv_beta, ZERO];
                let a = solve3(system, b);
                coeffs[idx(p, q)] = a;
                terms.push((p, q, a));
            }
        }
        TailExpansion { order, terms }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn eval(&self, z: Point) -> CVec3 {
        let zeta = Complex64::new(z[0], z[1]);
        let mut out = [ZERO; 3];
        for &(p, q, a) in &self.terms {
            let mono = zeta.powu(p) * zeta.conj().powu(q);
            for i in 0..3 {
                out[i] += a[i] * mono;
            }
        }
        out
    }
}

fn tail() -> &'static TailExpansion {
    static TAIL: OnceLock<TailExpansion> = OnceLock::new();
    TAIL.get_or_init(|| TailExpansion::new(TAIL_ORDER))
}

/// Gaussian elimination with partial pivoting on a 3×3 complex system.
fn solve3(mut a: [[Complex64; 3]; 3], mut b: CVec3) -> CVec3 {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                let sub = f * a[col][k];
                a[row][k] -= sub;
            }
            let sub = f * b[col];
            b[row] -= sub;
        }
    }
    let mut x = [ZERO; 3];
    for row in (0..3).rev() {
        let s: Complex64 = (row + 1..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn max_norm_diff(a: &CVec3, b: &CVec3) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).norm()).fold(0.0, f64::max)
}

/// Converged `c(y) = C(y)·v` together with the number of cocycle factors used.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CVector {
    pub values: CVec3,
    pub steps: usize,
}

/// Computes `c(y)` from the cocycle.
///
/// The n-th iterate is `β⁻ⁿ B⁽ⁿ⁾(y) · t(Rⁿ y)` where `t` is the Taylor tail.
/// Iteration stops once two successive iterates differ by less than `tol`
/// in max-norm and at least [`MIN_STEPS`] factors have been applied.
pub fn c_vector(y: Point, tol: f64) -> Result<CVector, CocycleError> {
    if !(tol > 0.0) {
        return Err(CocycleError::BadTolerance(tol));
    }
    let r = InternalContraction::new();
    let tail = tail();
    let inv_beta = 1.0 / embeddings().beta;
    let mut prod = FourierMatrix::identity();
    let mut z = y;
    let mut prev = tail.eval(z);
    let mut residual = f64::INFINITY;
    for step in 1..=MAX_STEPS {
        prod.right_mul_fourier(unit_phase(z[0]), inv_beta);
        z = r.apply(z);
        let current = prod.apply(&tail.eval(z));
        residual = max_norm_diff(&current, &prev);
        if step >= MIN_STEPS && residual < tol {
            return Ok(CVector { values: current, steps: step });
        }
        prev = current;
    }
    Err(CocycleError::NotConverged { steps: MAX_STEPS, residual, tol })
}

/// Plain truncation `β⁻ⁿ B⁽ⁿ⁾(y)·v`, accumulated from the innermost factor
/// outward with matrix–vector products only.
pub fn c_vector_truncated(y: Point, n: usize) -> CVec3 {
    let r = InternalContraction::new();
    let inv_beta = 1.0 / embeddings().beta;
    let mut points = Vec::with_capacity(n);
    let mut z = y;
    for _ in 0..n {
        points.push(z);
        z = r.apply(z);
    }
    let mut w = frequencies().map(|x| Complex64::new(x, 0.0));
    for z in points.iter().rev() {
        let phase = unit_phase(z[0]);
        w = [w[2] * inv_beta, (w[0] + phase * w[2]) * inv_beta, w[1] * inv_beta];
    }
    w
}

/// The full matrix `C(y)` by plain truncation of `β⁻ⁿ B⁽ⁿ⁾(y)`, with the
/// same stopping rule as [`c_vector`] applied to the matrix iterates.
pub fn c_matrix(y: Point, tol: f64) -> Result<(FourierMatrix, usize), CocycleError> {
    if !(tol > 0.0) {
        return Err(CocycleError::BadTolerance(tol));
    }
    let r = InternalContraction::new();
    let inv_beta = 1.0 / embeddings().beta;
    let mut prod = FourierMatrix::identity();
    let mut z = y;
    let mut residual = f64::INFINITY;
    for step in 1..=MAX_STEPS {
        let before = prod;
        prod.right_mul_fourier(unit_phase(z[0]), inv_beta);
        z = r.apply(z);
        residual = prod.max_abs_diff(&before);
        if step >= MIN_STEPS && residual < tol {
            return Ok((prod, step));
        }
    }
    Err(CocycleError::NotConverged { steps: MAX_STEPS, residual, tol })
}

/// The rank-one projector `P = C(0) = |v⟩⟨u|` in closed form.
pub fn projector() -> FourierMatrix {
    let e = embeddings();
    let (b, b2) = (e.beta, e.beta_sq());
    let s = point_density();
    let rows = [
        [2.0 - b2, b - 1.0, b2 - b],
        [b2 - b, 1.0 + b - b2, b2 - 1.0],
        [b - 1.0, b2 - b, 1.0 + b - b2],
    ];
    FourierMatrix(rows.map(|row| row.map(|x| Complex64::new(s * x, 0.0))))
}

/// Ratio dens(Λ)/dens(𝓛), which turns `c` into the window transforms.
pub fn window_scale() -> f64 {
    point_density() / lattice_density()
}

/// Inverse Fourier transforms `(f_a, f_b, f_c)(y)` of the three windows.
pub fn window_transforms(y: Point, tol: f64) -> Result<CVec3, CocycleError> {
    let c = c_vector(y, tol)?;
    let s = window_scale();
    Ok(c.values.map(|x| x * s))
}

/// Bragg amplitudes `A_i(k) = dens(Λ)·c_i(κ)` at the wave number of `miller`.
pub fn amplitudes(miller: Miller, tol: f64) -> Result<CVec3, CocycleError> {
    let w = wave_number(miller);
    let c = c_vector(w.dual_internal(), tol)?;
    let d = point_density();
    Ok(c.values.map(|x| x * d))
}

/// Complex scattering weights `(h_a, h_b, h_c)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights(pub CVec3);

impl Weights {
    pub fn uniform() -> Self {
        Weights([ONE; 3])
    }

    pub fn combine(&self, amps: &CVec3) -> Complex64 {
        (0..3).map(|i| self.0[i] * amps[i]).sum()
    }

    pub fn is_real(&self) -> bool {
        self.0.iter().all(|h| h.im == 0.0)
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights::uniform()
    }
}

impl fmt::Display for Weights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|h| format!("{},{}", h.re, h.im)).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses three real weights `1,1,1` or three re/im pairs `1,0,1,0,1,0`.
impl FromStr for Weights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let nums: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("weights {s:?}")))?;
        match nums.len() {
            3 => Ok(Weights([0, 1, 2].map(|i| Complex64::new(nums[i], 0.0)))),
            6 => Ok(Weights([0, 1, 2].map(|i| Complex64::new(nums[2 * i], nums[2 * i + 1])))),
            _ => Err(Error::InvalidArgument(format!(
                "weights need 3 reals or 3 re,im pairs, got {s:?}"
            ))),
        }
    }
}

/// `I(k) = |Σ h_i A_i(k)|²`.
pub fn intensity(miller: Miller, h: &Weights, tol: f64) -> Result<f64, CocycleError> {
    let amps = amplitudes(miller, tol)?;
    Ok(h.combine(&amps).norm_sqr())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeakRecord {
    pub miller: Miller,
    pub k: f64,
    pub amplitudes: CVec3,
    pub intensity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeakQuery {
    pub kmax: f64,
    pub kstar_max: f64,
    pub imin: f64,
    pub weights: Weights,
    pub tol: f64,
}

impl Default for PeakQuery {
    fn default() -> Self {
        PeakQuery {
            kmax: 2.5,
            kstar_max: DEFAULT_KSTAR_MAX,
            imin: 1e-6,
            weights: Weights::uniform(),
            tol: DEFAULT_TOL,
        }
    }
}

/// Inclusive integer ranges of Miller indices covering the region
/// `0 ≤ k ≤ kmax`, `‖k⋆‖ ≤ kstar_max`.
///
/// The map `n ↦ (k, k⋆)` is linear; its inverse maps the bounding box of the
/// region to a parallelepiped whose coordinate extents bound each `n_i`.
pub fn miller_box(kmax: f64, kstar_max: f64) -> [(i64, i64); 3] {
    let cols = [Miller::new(1, 0, 0), Miller::new(0, 1, 0), Miller::new(0, 0, 1)].map(wave_number);
    let forward = [
        cols.map(|w| w.k),
        cols.map(|w| w.kstar[0]),
        cols.map(|w| w.kstar[1]),
    ];
    let inverse = invert3(forward);
    let lo = [0.0, -kstar_max, -kstar_max];
    let hi = [kmax, kstar_max, kstar_max];
    let mut out = [(0i64, 0i64); 3];
    for (i, slot) in out.iter_mut().enumerate() {
        let (mut min, mut max) = (0.0, 0.0);
        for j in 0..3 {
            let a = inverse[i][j] * lo[j];
            let b = inverse[i][j] * hi[j];
            min += a.min(b);
            max += a.max(b);
        }
        *slot = ((min - 1e-9).floor() as i64, (max + 1e-9).ceil() as i64);
    }
    out
}

fn invert3(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
    let adj = [
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ];
    let det = m[0][0] * adj[0][0] + m[0][1] * adj[1][0] + m[0][2] * adj[2][0];
    adj.map(|row| row.map(|x| x / det))
}

/// All Miller triples in the region, in no particular order.
pub fn region_millers(kmax: f64, kstar_max: f64) -> Vec<Miller> {
    let [(a0, a1), (b0, b1), (c0, c1)] = miller_box(kmax, kstar_max);
    let mut out = Vec::new();
    for n0 in a0..=a1 {
        for n1 in b0..=b1 {
            for n2 in c0..=c1 {
                let miller = Miller::new(n0, n1, n2);
                let w = wave_number(miller);
                let in_region = if miller.is_zero() {
                    true
                } else {
                    w.k > 0.0 && w.k <= kmax && w.kstar[0].hypot(w.kstar[1]) <= kstar_max
                };
                if in_region {
                    out.push(miller);
                }
            }
        }
    }
    out
}

/// Bragg peaks with `0 ≤ k ≤ kmax`, `‖k⋆‖ ≤ kstar_max` and intensity at
/// least `imin`, sorted by k.
pub fn peak_list(query: &PeakQuery) -> Result<Vec<PeakRecord>> {
    if !(query.kmax >= 0.0) || !(query.kstar_max > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "kmax must be ≥ 0 and kstar_max > 0 (got {}, {})",
            query.kmax, query.kstar_max
        )));
    }
    let candidates = region_millers(query.kmax, query.kstar_max);
    let mut peaks = candidates
        .par_iter()
        .map(|&miller| -> Result<PeakRecord> {
            let amplitudes = amplitudes(miller, query.tol)?;
            let intensity = query.weights.combine(&amplitudes).norm_sqr();
            Ok(PeakRecord { miller, k: wave_number(miller).k, amplitudes, intensity })
        })
        .filter(|r| r.as_ref().map_or(true, |p| p.intensity >= query.imin))
        .collect::<Result<Vec<_>>>()?;
    peaks.sort_by(|a, b| a.k.total_cmp(&b.k).then(a.miller.cmp(&b.miller)));
    Ok(peaks)
}

pub const PEAK_COLUMNS: [&str; 11] =
    ["n0", "n1", "n2", "k", "ReA_a", "ImA_a", "ReA_b", "ImA_b", "ReA_c", "ImA_c", "intensity"];

pub fn write_peaks_csv<W: std::io::Write>(peaks: &[PeakRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PEAK_COLUMNS)?;
    for p in peaks {
        let mut row = vec![p.miller.0[0].to_string(), p.miller.0[1].to_string(), p.miller.0[2].to_string()];
        row.push(p.k.to_string());
        for a in &p.amplitudes {
            row.push(a.re.to_string());
            row.push(a.im.to_string());
        }
        row.push(p.intensity.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct PeakRow {
    n0: i64,
    n1: i64,
    n2: i64,
    k: f64,
    #[serde(rename = "ReA_a")]
    re_a: f64,
    #[serde(rename = "ImA_a")]
    im_a: f64,
    #[serde(rename = "ReA_b")]
    re_b: f64,
    #[serde(rename = "ImA_b")]
    im_b: f64,
    #[serde(rename = "ReA_c")]
    re_c: f64,
    #[serde(rename = "ImA_c")]
    im_c: f64,
    intensity: f64,
}

/// JSON array of objects with the same fields as the CSV columns.
pub fn write_peaks_json<W: std::io::Write>(peaks: &[PeakRecord], out: W) -> Result<()> {
    let rows: Vec<PeakRow> = peaks
        .iter()
        .map(|p| PeakRow {
            n0: p.miller.0[0],
            n1: p.miller.0[1],
            n2: p.miller.0[2],
            k: p.k,
            re_a: p.amplitudes[0].re,
            im_a: p.amplitudes[0].im,
            re_b: p.amplitudes[1].re,
            im_b: p.amplitudes[1].im,
            re_c: p.amplitudes[2].re,
            im_c: p.amplitudes[2].im,
            intensity: p.intensity,
        })
        .collect();
    serde_json::to_writer_pretty(out, &rows)?;
    Ok(())
}
