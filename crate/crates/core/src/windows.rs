//! Rauzy-fractal windows `W_a, W_b, W_c` in internal space.
//!
//! The windows are the unique fixed point of
//! `W_a = αW_c, W_b = αW_a ∪ (αW_c + 1), W_c = αW_b`.
//! Finite clouds are produced by iterating this system from `{0}`. Cloud
//! points are kept as exact elements of ℤ[β] (multiplication by α in
//! internal space is multiplication by β before the ⋆-map) and mapped to
//! ℝ² at the end.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{embeddings, star_map, BetaInt, Point};
use crate::cocycle::{c_vector, c_vector_truncated, window_scale, MAX_STEPS};
use crate::error::CocycleError;
use crate::error::{Error, Result};
use crate::inflation::Letter;

/// Largest total number of cloud points `iterate_ifs` will build.
pub const MAX_CLOUD_POINTS: u64 = 1 << 26;

#[derive(Clone, Debug, PartialEq)]
pub struct WindowCloud {
    pub letter: Letter,
    pub depth: u32,
    pub points: Vec<Point>,
}

impl WindowCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Point counts `(N_a, N_b, N_c)` after `depth` steps of the count
/// recursion `N_a′ = N_c, N_b′ = N_a + N_c, N_c′ = N_b` from `(1, 1, 1)`.
pub fn cloud_counts(depth: u32) -> [u64; 3] {
    let mut n = [1u64; 3];
    for _ in 0..depth {
        n = [n[2], n[0].saturating_add(n[2]), n[1]];
    }
    n
}

/// Treatment of coinciding points produced by the union in `W_b`.
///
/// Distinct branches of the IFS can land on the same point (the `{0}` seed
/// sits at the origin for every letter). Each branch carries its own share
/// of the self-similar measure, so the repeats are kept by default; removing
/// them makes counts fall below [`cloud_counts`] and biases the quadrature
/// in [`window_ft_oracle`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum Duplicates {
    /// Keep every branch; counts follow [`cloud_counts`] exactly.
    #[default]
    Keep,
    /// Drop points that are equal as elements of ℤ[β].
    Remove,
}

/// Exact ℤ[β] preimages of the cloud points, per letter.
pub fn iterate_ifs_exact(depth: u32, duplicates: Duplicates) -> Result<[Vec<BetaInt>; 3]> {
    let total: u64 = cloud_counts(depth).iter().fold(0u64, |a, &b| a.saturating_add(b));
    if total > MAX_CLOUD_POINTS {
        return Err(Error::ResourceExhausted(format!(
            "IFS depth {depth} needs {total} points (limit {MAX_CLOUD_POINTS})"
        )));
    }
    let mut clouds: [Vec<BetaInt>; 3] = [vec![BetaInt::ZERO], vec![BetaInt::ZERO], vec![BetaInt::ZERO]];
    for _ in 0..depth {
        let scale = |pts: &[BetaInt]| -> Result<Vec<BetaInt>> {
            pts.iter().map(|p| p.checked_mul_beta().map_err(Error::from)).collect()
        };
        let [wa, wb, wc] = &clouds;
        let next_a = scale(wc)?;
        let mut next_b = Vec::new();
        next_b
            .try_reserve_exact(wa.len() + wc.len())
            .map_err(|_| Error::ResourceExhausted("IFS cloud allocation failed".into()))?;
        next_b.extend(scale(wa)?);
        for p in scale(wc)? {
            next_b.push(p.checked_add(BetaInt::ONE)?);
        }
        if duplicates == Duplicates::Remove {
            next_b.sort_unstable();
            next_b.dedup();
        }
        let next_c = scale(wb)?;
        clouds = [next_a, next_b, next_c];
    }
    Ok(clouds)
}

/// Applies the window IFS `depth` times starting from `{0}` for each letter,
/// keeping points reached by more than one branch.
pub fn iterate_ifs(depth: u32) -> Result<[WindowCloud; 3]> {
    iterate_ifs_with(depth, Duplicates::Keep)
}

/// As [`iterate_ifs`]; with [`Duplicates::Remove`] points are deduplicated
/// on exact ℤ[β] equality, which is exact equality in internal space.
pub fn iterate_ifs_with(depth: u32, duplicates: Duplicates) -> Result<[WindowCloud; 3]> {
    let exact = iterate_ifs_exact(depth, duplicates)?;
    let mut out = Letter::ALL.map(|letter| WindowCloud { letter, depth, points: Vec::new() });
    for (cloud, pts) in out.iter_mut().zip(exact.iter()) {
        cloud.points = pts.iter().map(|&p| star_map(p)).collect();
    }
    Ok(out)
}

/// Exact window areas `Im(α)·(β² − 1, β, 1)`.
pub fn exact_volumes() -> [f64; 3] {
    let e = embeddings();
    let (b, b2) = (e.beta, e.beta_sq());
    [e.alpha_im * (b2 - 1.0), e.alpha_im * b, e.alpha_im]
}

/// The same areas from the polynomial closed form over `2√23`.
pub fn exact_volumes_polynomial() -> [f64; 3] {
    let e = embeddings();
    let d = 2.0 * e.sqrt23;
    [e.eval(5.0, -6.0, 4.0) / d, e.eval(-6.0, -2.0, 9.0) / d, e.eval(4.0, 9.0, -6.0) / d]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub cell: f64,
    pub volumes: [f64; 3],
    pub occupied_cells: [usize; 3],
    /// Mean number of cloud points per occupied cell.
    pub mean_occupancy: [f64; 3],
}

impl VolumeEstimate {
    /// True when some letter averages fewer than two points per cell.
    pub fn is_sparse(&self) -> bool {
        self.mean_occupancy.iter().any(|&m| m < 2.0)
    }
}

/// Box-counting area: number of occupied grid cells times `cell²`.
pub fn estimate_volumes(clouds: &[WindowCloud; 3], cell: f64) -> Result<VolumeEstimate> {
    if !(cell > 0.0) {
        return Err(Error::InvalidArgument(format!("cell size must be positive, got {cell}")));
    }
    let mut volumes = [0.0; 3];
    let mut occupied_cells = [0usize; 3];
    let mut mean_occupancy = [0.0; 3];
    for (i, cloud) in clouds.iter().enumerate() {
        let mut cells: Vec<(i64, i64)> = cloud
            .points
            .iter()
            .map(|p| ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64))
            .collect();
        cells.sort_unstable();
        cells.dedup();
        occupied_cells[i] = cells.len();
        volumes[i] = cells.len() as f64 * cell * cell;
        mean_occupancy[i] = if cells.is_empty() { 0.0 } else { cloud.len() as f64 / cells.len() as f64 };
    }
    let est = VolumeEstimate { cell, volumes, occupied_cells, mean_occupancy };
    if est.is_sparse() {
        log::warn!(
            "sparse box count at cell {cell}: mean occupancy {:?} points per cell; estimate unreliable",
            est.mean_occupancy
        );
    }
    Ok(est)
}

/// Quadrature of the inverse Fourier transform of `1_{W_i}` that treats
/// the cloud as equal-mass samples: `(vol/N) Σ_p e^{2πi⟨p, y⟩}`.
pub fn window_ft_oracle(cloud: &WindowCloud, y: Point) -> Complex64 {
    let vol = exact_volumes()[cloud.letter.index()];
    let sum: Complex64 = cloud
        .points
        .iter()
        .map(|p| Complex64::from_polar(1.0, 2.0 * PI * (p[0] * y[0] + p[1] * y[1])))
        .sum();
    sum * (vol / cloud.len() as f64)
}

/// Axis-aligned box in internal space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridBox {
    pub min: Point,
    pub max: Point,
}

impl GridBox {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if !(min[0] < max[0] && min[1] < max[1]) {
            return Err(Error::InvalidArgument(format!("malformed box {min:?}..{max:?}")));
        }
        Ok(GridBox { min, max })
    }

    pub fn square(half_width: f64) -> Result<Self> {
        GridBox::new([-half_width, -half_width], [half_width, half_width])
    }
}

/// Window transform sampled on a regular grid.
///
/// Nodes are stored row-major with the origin at the box's minimum corner:
/// index `j·samples + i` holds `y = (min₁ + i·h₁, min₂ + j·h₂)`.
#[derive(Clone, Debug)]
pub struct FtGrid {
    pub region: GridBox,
    pub samples: usize,
    pub letter: Letter,
    pub values: Vec<Complex64>,
    /// Indices of nodes whose cocycle iteration did not converge; their
    /// value is the last iterate.
    pub failed: Vec<usize>,
}

impl FtGrid {
    pub fn node(&self, i: usize, j: usize) -> Point {
        grid_node(&self.region, self.samples, i, j)
    }

    pub fn value(&self, i: usize, j: usize) -> Complex64 {
        self.values[j * self.samples + i]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn grid_node(region: &GridBox, samples: usize, i: usize, j: usize) -> Point {
    let step = |lo: f64, hi: f64, t: usize| {
        if t + 1 == samples {
            hi
        } else {
            lo + (hi - lo) * t as f64 / (samples - 1) as f64
        }
    };
    [step(region.min[0], region.max[0], i), step(region.min[1], region.max[1], j)]
}

/// Evaluates `f_letter` on a `samples × samples` grid via the cocycle.
pub fn ft_grid(region: GridBox, samples: usize, letter: Letter, tol: f64) -> Result<FtGrid> {
    if samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples per axis, got {samples}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let scale = window_scale();
    let idx = letter.index();
    let results: Vec<(Complex64, bool)> = (0..samples * samples)
        .into_par_iter()
        .map(|n| {
            let y = grid_node(&region, samples, n % samples, n / samples);
            match c_vector(y, tol) {
                Ok(c) => (c.values[idx] * scale, true),
                Err(CocycleError::NotConverged { .. }) => {
                    let c = c_vector_truncated(y, MAX_STEPS);
                    (c[idx] * scale, false)
                }
                Err(e) => panic!("unexpected cocycle error: {e}"),
            }
        })
        .collect();
    let failed = results.iter().enumerate().filter(|(_, r)| !r.1).map(|(n, _)| n).collect();
    Ok(FtGrid { region, samples, letter, values: results.into_iter().map(|r| r.0).collect(), failed })
}

pub fn write_cloud_csv<W: Write>(clouds: &[WindowCloud], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "letter"])?;
    for cloud in clouds {
        for p in &cloud.points {
            w.write_record([p[0].to_string(), p[1].to_string(), cloud.letter.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_grid_csv<W: Write>(grid: &FtGrid, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["yx", "yy", "re", "im", "abs", "arg"])?;
    for j in 0..grid.samples {
        for i in 0..grid.samples {
            let y = grid.node(i, j);
            let v = grid.value(i, j);
            w.write_record([
                y[0].to_string(),
                y[1].to_string(),
                v.re.to_string(),
                v.im.to_string(),
                v.norm().to_string(),
                v.arg().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes a binary 8-bit portable graymap (P5, maxval 255).
///
/// `pixel` maps each grid value to [0, 1]; rows are emitted in storage
/// order, so the first row is the minimum of the second coordinate.
pub fn write_pgm<W: Write, F: Fn(Complex64) -> f64>(grid: &FtGrid, mut out: W, pixel: F) -> Result<()> {
    write!(out, "P5\n{} {}\n255\n", grid.samples, grid.samples)?;
    let bytes: Vec<u8> = grid
        .values
        .iter()
        .map(|&v| (pixel(v).clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    out.write_all(&bytes)?;
    Ok(())
}

/// Magnitude layer scaled from `[0, vol(W_letter)]`.
pub fn write_magnitude_pgm<W: Write>(grid: &FtGrid, out: W) -> Result<()> {
    let vol = exact_volumes()[grid.letter.index()];
    write_pgm(grid, out, |v| v.norm() / vol)
}

/// Argument layer scaled from `[−π, π]`.
pub fn write_argument_pgm<W: Write>(grid: &FtGrid, out: W) -> Result<()> {
    write_pgm(grid, out, |v| (v.arg() + PI) / (2.0 * PI))
}
