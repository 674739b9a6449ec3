//! Frequency-domain denoising of kill matrices.
//!
//! A kill matrix on ordered axes is treated as a 2-D signal. [`refine`]
//! transforms it with a 2-D DFT, keeps the low-frequency band selected by
//! [`lowpass_mask`], transforms back and rescales the result into `[0, 1]`.
//! The DFT is computed with `rustfft` (row transforms, then column transforms
//! on the transposed buffer); the definitions are the direct sums
//!
//! ```text
//! F(u, v) = sum_x sum_y M(x, y) exp(-2*pi*i (u x / N + v y / M))
//! M(x, y) = 1/(N M) sum_u sum_v F(u, v) exp(+2*pi*i (u x / N + v y / M))
//! ```
//!
//! with 0-based indices over `N` rows and `M` columns.

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::enhance::{CellValue, KillMatrix};
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Largest imaginary residue tolerated after the inverse transform.
pub const IMAGINARY_TOLERANCE: f64 = 1e-6;

/// Cutoff that keeps every frequency bin: the largest normalized radius is
/// `sqrt(0.5^2 + 0.5^2) ~ 0.7071`.
pub const FULL_PASSBAND: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaskKind {
    /// Hard cutoff: 1 inside the radius, 0 outside.
    #[default]
    Ideal,
    /// `exp(-r^2 / (2 D0^2))`.
    Gaussian,
}

impl std::str::FromStr for MaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ideal" => Ok(MaskKind::Ideal),
            "gaussian" => Ok(MaskKind::Gaussian),
            other => Err(format!("unknown mask kind {other:?}")),
        }
    }
}

impl std::fmt::Display for MaskKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MaskKind::Ideal => "ideal",
            MaskKind::Gaussian => "gaussian",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DenoiseConfig {
    /// Cutoff radius in normalized frequency units, in `(0, 1]`.
    pub cutoff_d0: f64,
    pub mask_kind: MaskKind,
}

impl Default for DenoiseConfig {
    fn default() -> Self {
        Self {
            cutoff_d0: 0.3,
            mask_kind: MaskKind::Ideal,
        }
    }
}

impl DenoiseConfig {
    pub fn new(cutoff_d0: f64, mask_kind: MaskKind) -> Result<Self> {
        let config = Self {
            cutoff_d0,
            mask_kind,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff_d0 > 0.0 && self.cutoff_d0 <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cutoff must lie in (0, 1], got {}",
                self.cutoff_d0
            )));
        }
        Ok(())
    }
}

/// Complex 2-D spectrum, row-major, same shape as its source matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    rows: usize,
    cols: usize,
    coefficients: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(rows: usize, cols: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix);
        }
        if coefficients.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: (rows, cols),
                found: (coefficients.len(), 1),
            });
        }
        Ok(Self {
            rows,
            cols,
            coefficients,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, u: usize, v: usize) -> Complex64 {
        self.coefficients[u * self.cols + v]
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Multiplies every coefficient by the matching mask entry.
    pub fn apply_mask(&mut self, mask: &Matrix<f64>) -> Result<()> {
        if mask.shape() != (self.rows, self.cols) {
            return Err(Error::ShapeMismatch {
                expected: (self.rows, self.cols),
                found: mask.shape(),
            });
        }
        for (c, h) in self.coefficients.iter_mut().zip(mask.as_slice()) {
            *c *= *h;
        }
        Ok(())
    }
}

fn transpose(rows: usize, cols: usize, data: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

fn fft2_in_place(rows: usize, cols: usize, data: &mut Vec<Complex64>, direction: FftDirection) {
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft(cols, direction).process(data);
    let mut t = transpose(rows, cols, data);
    planner.plan_fft(rows, direction).process(&mut t);
    *data = transpose(cols, rows, &t);
}

pub fn dft2(matrix: &Matrix<f64>) -> Result<Spectrum> {
    let (rows, cols) = matrix.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyMatrix);
    }
    let mut data: Vec<Complex64> = matrix
        .as_slice()
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    fft2_in_place(rows, cols, &mut data, FftDirection::Forward);
    Ok(Spectrum {
        rows,
        cols,
        coefficients: data,
    })
}

/// Inverse 2-D DFT of `spectrum`, including the complex part.
pub fn idft2_complex(spectrum: &Spectrum) -> Vec<Complex64> {
    let mut data = spectrum.coefficients.clone();
    fft2_in_place(
        spectrum.rows,
        spectrum.cols,
        &mut data,
        FftDirection::Inverse,
    );
    let scale = 1.0 / (spectrum.rows * spectrum.cols) as f64;
    for c in &mut data {
        *c *= scale;
    }
    data
}

/// Inverse 2-D DFT, returning the real part.
///
/// The spectrum of a real signal is Hermitian-symmetric, and so is its product
/// with a symmetric mask; a larger imaginary residue means the spectrum was not
/// produced that way.
pub fn idft2(spectrum: &Spectrum) -> Result<Matrix<f64>> {
    let data = idft2_complex(spectrum);
    let max_imag = data.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if max_imag >= IMAGINARY_TOLERANCE {
        return Err(Error::NonNegligibleImaginary(max_imag));
    }
    Matrix::from_vec(
        spectrum.rows,
        spectrum.cols,
        data.into_iter().map(|c| c.re).collect(),
    )
}

/// Signed normalized frequency of bin `k` out of `n`: `k/n` up to the
/// Nyquist bin, `(k - n)/n` above it.
pub fn signed_frequency(k: usize, n: usize) -> f64 {
    if 2 * k <= n {
        k as f64 / n as f64
    } else {
        (k as f64 - n as f64) / n as f64
    }
}

pub fn lowpass_mask(n_rows: usize, n_cols: usize, config: &DenoiseConfig) -> Matrix<f64> {
    let d0 = config.cutoff_d0;
    Matrix::from_fn(n_rows, n_cols, |u, v| {
        let fu = signed_frequency(u, n_rows);
        let fv = signed_frequency(v, n_cols);
        let r2 = fu * fu + fv * fv;
        match config.mask_kind {
            MaskKind::Ideal => {
                if r2.sqrt() <= d0 {
                    1.0
                } else {
                    0.0
                }
            }
            MaskKind::Gaussian => (-r2 / (2.0 * d0 * d0)).exp(),
        }
    })
}

/// Max-min rescaling into `[0, 1]`. A constant matrix maps to all zeros.
pub fn minmax_normalize(matrix: &Matrix<f64>) -> Matrix<f64> {
    let (lo, hi) = matrix
        .as_slice()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let range = hi - lo;
    if range.is_nan() || range <= 0.0 {
        return matrix.map(|_| 0.0);
    }
    matrix.map(|&x| ((x - lo) / range).clamp(0.0, 1.0))
}

/// A kill matrix after refinement: fuzzy cells in `[0, 1]`.
pub type RefinedKillMatrix = KillMatrix<f64>;

/// Grid that refined cells are snapped to. Transform round-off (~1e-16) would
/// otherwise split exact ties, e.g. a boolean matrix passed through an
/// all-pass mask would no longer score like the boolean matrix itself.
pub const CELL_RESOLUTION: f64 = 1.0 / (1u64 << 40) as f64;

/// Relative spread below which a filtered matrix is treated as constant.
pub const FLAT_TOLERANCE: f64 = 1e-9;

/// Low-pass filters the real-valued `matrix` and rescales it into `[0, 1]`.
pub fn denoise(matrix: &Matrix<f64>, config: &DenoiseConfig) -> Result<Matrix<f64>> {
    config.validate()?;
    let mut spectrum = dft2(matrix)?;
    spectrum.apply_mask(&lowpass_mask(matrix.rows(), matrix.cols(), config))?;
    let filtered = idft2(&spectrum)?;
    // A spread this small relative to the input is transform round-off, so the
    // filtered matrix counts as constant.
    let scale = matrix
        .as_slice()
        .iter()
        .fold(0.0_f64, |a, x| a.max(x.abs()));
    let (lo, hi) = filtered
        .as_slice()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    if hi - lo <= FLAT_TOLERANCE * scale {
        return Ok(filtered.map(|_| 0.0));
    }
    let normalized = minmax_normalize(&filtered);
    Ok(normalized.map(|&x| (x / CELL_RESOLUTION).round() * CELL_RESOLUTION))
}

/// Runs the denoising stage on a kill matrix. Axes and the failing-test
/// vector carry through unchanged.
pub fn refine<T: CellValue>(
    matrix: &KillMatrix<T>,
    config: &DenoiseConfig,
) -> Result<RefinedKillMatrix> {
    let cells = denoise(&matrix.values(), config)?;
    Ok(matrix.with_cells(cells))
}
