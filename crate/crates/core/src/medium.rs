//! Dielectric descriptions: susceptibility models, coupling spectra and
//! Kramers-Kronig machinery.
//!
//! Everything is expressed in natural units `hbar = eps0 = mu0 = c = rho = 1`
//! with frequencies in units of the bare matter resonance (`omega0 = 1`). In
//! these units the fluctuation-dissipation link between the matter coupling
//! and the absorption spectrum reads `Im chi(omega) = pi |F(omega)|^2`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Fraction of grid samples (per side) treated as edge region where the
/// truncated principal-value transform is unreliable.
const EDGE_MARGIN_FRACTION: f64 = 0.05;

/// Frequency-dependent reservoir coupling `v(omega)` of the microscopic model.
#[derive(Debug, Clone, PartialEq)]
pub enum ReservoirCoupling {
    /// Constant coupling over the discretized reservoir band.
    Flat { value: f64 },
}

impl ReservoirCoupling {
    pub fn eval(&self, _omega: f64) -> f64 {
        match self {
            ReservoirCoupling::Flat { value } => *value,
        }
    }
}

/// A dielectric medium, either analytic, tabulated or microscopic.
#[derive(Debug, Clone, PartialEq)]
pub enum MediumModel {
    /// No matter at all: `chi = 0`.
    Vacuum,
    /// Instantaneous (memoryless) response with constant real `chi >= 0`.
    ConstantChi { chi: f64 },
    /// Single-resonance absorber:
    /// `chi(omega) = plasma^2 / (resonance^2 - omega^2 - i*damping*omega)`.
    LorentzAnalytic {
        plasma_strength: f64,
        resonance: f64,
        damping: f64,
    },
    /// Sampled complex susceptibility, linearly interpolated, no extrapolation.
    Tabulated(SusceptibilityGrid),
    /// Microscopic matter + reservoir parameters; the susceptibility follows
    /// from diagonalization (see the `hopfield` module), not from this enum.
    HopfieldMicroscopic {
        density: f64,
        coupling: f64,
        reservoir: ReservoirCoupling,
    },
}

impl MediumModel {
    /// Lorentz absorber with the resonance pinned at `omega0 = 1`.
    pub fn lorentz(plasma_strength: f64, damping: f64) -> Result<Self> {
        if plasma_strength < 0.0 || damping < 0.0 {
            return Err(Error::Invalid(format!(
                "lorentz parameters must be nonnegative (omega_p = {plasma_strength}, gamma = {damping})"
            )));
        }
        Ok(MediumModel::LorentzAnalytic {
            plasma_strength,
            resonance: 1.0,
            damping,
        })
    }

    pub fn constant_chi(chi: f64) -> Result<Self> {
        if chi < 0.0 {
            return Err(Error::Invalid(format!("constant chi must be >= 0, got {chi}")));
        }
        Ok(MediumModel::ConstantChi { chi })
    }

    /// Complex susceptibility at `omega > 0`.
    pub fn chi(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) {
            return Err(Error::Domain(format!("chi requires omega > 0, got {omega}")));
        }
        match self {
            MediumModel::Vacuum => Ok(Complex64::ZERO),
            MediumModel::ConstantChi { chi } => Ok(Complex64::new(*chi, 0.0)),
            MediumModel::LorentzAnalytic {
                plasma_strength,
                resonance,
                damping,
            } => {
                let den = Complex64::new(resonance * resonance - omega * omega, -damping * omega);
                Ok(plasma_strength * plasma_strength / den)
            }
            MediumModel::Tabulated(grid) => grid.chi_at(omega),
            MediumModel::HopfieldMicroscopic { .. } => Err(Error::Unsupported(
                "microscopic model: build a susceptibility grid through the fano pipeline first"
                    .into(),
            )),
        }
    }

    /// Relative permittivity `epsilon = 1 + chi`.
    pub fn epsilon(&self, omega: f64) -> Result<Complex64> {
        Ok(Complex64::ONE + self.chi(omega)?)
    }

    pub fn im_chi(&self, omega: f64) -> Result<f64> {
        Ok(self.chi(omega)?.im)
    }

    /// True when the model absorbs nowhere (`Im chi = 0` identically).
    pub fn is_lossless(&self) -> bool {
        match self {
            MediumModel::Vacuum | MediumModel::ConstantChi { .. } => true,
            MediumModel::LorentzAnalytic { damping, plasma_strength, .. } => {
                *damping == 0.0 || *plasma_strength == 0.0
            }
            MediumModel::Tabulated(grid) => grid.chi().iter().all(|c| c.im == 0.0),
            MediumModel::HopfieldMicroscopic { coupling, reservoir, .. } => {
                *coupling == 0.0
                    || matches!(reservoir, ReservoirCoupling::Flat { value } if *value == 0.0)
            }
        }
    }
}

/// Spacing rule for generated frequency/time grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// Concrete grid description: `count` points over `[min, max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(Error::Invalid(format!("grid needs min < max, got [{min}, {max}]")));
        }
        if count < 2 {
            return Err(Error::Invalid(format!("grid needs at least 2 points, got {count}")));
        }
        if spacing == Spacing::Log && min <= 0.0 {
            return Err(Error::Invalid("log spacing requires min > 0".into()));
        }
        Ok(GridSpec { min, max, count, spacing })
    }

    /// Default susceptibility grid: 4000 log-spaced samples over [1e-3, 50].
    pub fn default_susceptibility() -> Self {
        GridSpec { min: 1e-3, max: 50.0, count: 4000, spacing: Spacing::Log }
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.count;
        match self.spacing {
            Spacing::Linear => {
                let step = (self.max - self.min) / (n - 1) as f64;
                (0..n).map(|i| self.min + step * i as f64).collect()
            }
            Spacing::Log => {
                let ratio = (self.max / self.min).ln() / (n - 1) as f64;
                (0..n).map(|i| self.min * (ratio * i as f64).exp()).collect()
            }
        }
    }
}

/// Sampled complex susceptibility on an ascending positive frequency grid.
///
/// The absorption spectrum must have decayed at the cutoff: the constructor
/// checks `Im chi(omega_max) <= tail_tol`. The real part is carried (and may
/// be reconstructed through the Kramers-Kronig transform) but is not part of
/// the tail check, since every transform in this module consumes `Im chi`
/// only.
#[derive(Debug, Clone, PartialEq)]
pub struct SusceptibilityGrid {
    omega: Vec<f64>,
    chi: Vec<Complex64>,
    tail_tol: f64,
}

pub const DEFAULT_TAIL_TOL: f64 = 1e-4;

impl SusceptibilityGrid {
    pub fn new(omega: Vec<f64>, chi: Vec<Complex64>, tail_tol: f64) -> Result<Self> {
        if omega.len() != chi.len() {
            return Err(Error::Invalid(format!(
                "grid length mismatch: {} frequencies vs {} samples",
                omega.len(),
                chi.len()
            )));
        }
        if omega.len() < 2 {
            return Err(Error::Invalid("grid needs at least 2 samples".into()));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::Invalid(format!("tail tolerance must be positive, got {tail_tol}")));
        }
        if !omega[0].is_finite() || omega[0] <= 0.0 {
            return Err(Error::Invalid(format!("grid frequencies must be positive, first is {}", omega[0])));
        }
        for i in 1..omega.len() {
            if !(omega[i] > omega[i - 1]) {
                return Err(Error::Invalid(format!(
                    "grid frequencies must be strictly increasing at index {i} ({} then {})",
                    omega[i - 1],
                    omega[i]
                )));
            }
        }
        for (i, c) in chi.iter().enumerate() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::Invalid(format!("non-finite chi sample at index {i}")));
            }
            if c.im < 0.0 {
                return Err(Error::Passivity { omega: omega[i], im_chi: c.im });
            }
        }
        let tail = chi.last().unwrap().im.abs();
        if tail > tail_tol {
            return Err(Error::Invalid(format!(
                "Im chi has not decayed at the cutoff: |Im chi(omega_max)| = {tail:.3e} > {tail_tol:.3e}"
            )));
        }
        Ok(SusceptibilityGrid { omega, chi, tail_tol })
    }

    /// Grid with `Re chi = 0` placeholders, as produced by absorption-only data.
    pub fn from_im_chi(omega: Vec<f64>, im_chi: Vec<f64>, tail_tol: f64) -> Result<Self> {
        let chi = im_chi.iter().map(|&im| Complex64::new(0.0, im)).collect();
        Self::new(omega, chi, tail_tol)
    }

    /// Sample an analytic model on `spec`.
    pub fn sample_model(model: &MediumModel, spec: &GridSpec) -> Result<Self> {
        match model {
            MediumModel::Vacuum | MediumModel::LorentzAnalytic { .. } => {}
            MediumModel::ConstantChi { .. } => {
                return Err(Error::Unsupported(
                    "constant chi has no decaying tail; keep it analytic".into(),
                ))
            }
            MediumModel::Tabulated(_) => {
                return Err(Error::Unsupported("model is already tabulated".into()))
            }
            MediumModel::HopfieldMicroscopic { .. } => {
                return Err(Error::Unsupported(
                    "microscopic model: build a susceptibility grid through the fano pipeline"
                        .into(),
                ))
            }
        }
        let omega = spec.points();
        let chi = omega.iter().map(|&w| model.chi(w)).collect::<Result<Vec<_>>>()?;
        Self::new(omega, chi, DEFAULT_TAIL_TOL)
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn chi(&self) -> &[Complex64] {
        &self.chi
    }

    pub fn omega_min(&self) -> f64 {
        self.omega[0]
    }

    pub fn omega_max(&self) -> f64 {
        *self.omega.last().unwrap()
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    /// Linear interpolation; errors outside the sampled range.
    pub fn chi_at(&self, omega: f64) -> Result<Complex64> {
        let (i, frac) = self.locate(omega)?;
        Ok(self.chi[i] * (1.0 - frac) + self.chi[i + 1] * frac)
    }

    pub fn im_chi_at(&self, omega: f64) -> Result<f64> {
        let (i, frac) = self.locate(omega)?;
        Ok(self.chi[i].im * (1.0 - frac) + self.chi[i + 1].im * frac)
    }

    fn locate(&self, omega: f64) -> Result<(usize, f64)> {
        if !omega.is_finite() || omega < self.omega_min() || omega > self.omega_max() {
            return Err(Error::OutOfRange {
                omega,
                min: self.omega_min(),
                max: self.omega_max(),
            });
        }
        let i = match self.omega.partition_point(|&w| w <= omega) {
            0 => 0,
            p if p >= self.omega.len() => self.omega.len() - 2,
            p => p - 1,
        };
        let frac = (omega - self.omega[i]) / (self.omega[i + 1] - self.omega[i]);
        Ok((i, frac.clamp(0.0, 1.0)))
    }

    /// Number of samples per side excluded from principal-value evaluations.
    pub fn edge_margin(&self) -> usize {
        ((self.len() as f64 * EDGE_MARGIN_FRACTION).ceil() as usize).max(1)
    }

    /// Replace the stored real part with the Kramers-Kronig transform of the
    /// stored imaginary part (best effort at the edges, where the truncated
    /// transform is applied without the interior guard).
    pub fn with_kk_real(mut self) -> Self {
        let re: Vec<f64> = self
            .omega
            .par_iter()
            .map(|&w| kk_re_unchecked(&self.omega, &self.chi, w))
            .collect();
        for (c, r) in self.chi.iter_mut().zip(re) {
            *c = Complex64::new(r, c.im);
        }
        self
    }
}

/// Matter-field coupling samples `F(omega)`, optionally together with the
/// microscopic reservoir coupling `v(omega)` they derive from.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpectrum {
    omega: Vec<f64>,
    f: Vec<Complex64>,
    v: Option<Vec<f64>>,
}

impl CouplingSpectrum {
    pub fn new(omega: Vec<f64>, f: Vec<Complex64>, v: Option<Vec<f64>>) -> Result<Self> {
        if omega.len() != f.len() {
            return Err(Error::Invalid(format!(
                "coupling length mismatch: {} frequencies vs {} samples",
                omega.len(),
                f.len()
            )));
        }
        if omega.len() < 2 {
            return Err(Error::Invalid("coupling spectrum needs at least 2 samples".into()));
        }
        if let Some(v) = &v {
            if v.len() != omega.len() {
                return Err(Error::Invalid("reservoir coupling length mismatch".into()));
            }
        }
        if omega[0] <= 0.0 {
            return Err(Error::Invalid("coupling frequencies must be positive".into()));
        }
        for i in 1..omega.len() {
            if !(omega[i] > omega[i - 1]) {
                return Err(Error::Invalid(format!(
                    "coupling frequencies must be strictly increasing at index {i}"
                )));
            }
        }
        Ok(CouplingSpectrum { omega, f, v })
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn f(&self) -> &[Complex64] {
        &self.f
    }

    pub fn v(&self) -> Option<&[f64]> {
        self.v.as_deref()
    }

    pub fn omega_min(&self) -> f64 {
        self.omega[0]
    }

    pub fn omega_max(&self) -> f64 {
        *self.omega.last().unwrap()
    }
}

/// `F(omega) = sqrt(Im chi(omega) / pi)`, the real nonnegative branch of the
/// fluctuation-dissipation inversion.
pub fn coupling_from_im_chi(grid: &SusceptibilityGrid) -> Result<CouplingSpectrum> {
    let f = grid
        .omega()
        .iter()
        .zip(grid.chi())
        .map(|(&w, c)| {
            if c.im < 0.0 {
                Err(Error::Passivity { omega: w, im_chi: c.im })
            } else {
                Ok(Complex64::new((c.im / std::f64::consts::PI).sqrt(), 0.0))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    CouplingSpectrum::new(grid.omega().to_vec(), f, None)
}

/// `Im chi(omega) = pi |F(omega)|^2`; `|F|^2` is interpolated linearly so the
/// result is independent of the phase of `F`.
pub fn im_chi_from_coupling(coupling: &CouplingSpectrum, omega: f64) -> Result<f64> {
    let om = coupling.omega();
    if !omega.is_finite() || omega < coupling.omega_min() || omega > coupling.omega_max() {
        return Err(Error::OutOfRange {
            omega,
            min: coupling.omega_min(),
            max: coupling.omega_max(),
        });
    }
    let i = match om.partition_point(|&w| w <= omega) {
        0 => 0,
        p if p >= om.len() => om.len() - 2,
        p => p - 1,
    };
    let frac = ((omega - om[i]) / (om[i + 1] - om[i])).clamp(0.0, 1.0);
    let f2 = coupling.f()[i].norm_sqr() * (1.0 - frac) + coupling.f()[i + 1].norm_sqr() * frac;
    Ok(std::f64::consts::PI * f2)
}

/// Time-domain response `chi(t) = 2 * int_0^inf |F(omega)|^2 sin(omega t) domega`
/// by trapezoidal quadrature on the stored grid.
///
/// `chi(0) = 0` exactly. The grid must resolve the oscillation: the largest
/// grid interval times `t` has to stay below `pi/2`.
pub fn chi_time(coupling: &CouplingSpectrum, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("chi(t) requires t >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let om = coupling.omega();
    let max_spacing = om.windows(2).map(|w| w[1] - w[0]).fold(0.0f64, f64::max);
    let bound = std::f64::consts::FRAC_PI_2;
    if max_spacing * t > bound {
        return Err(Error::Resolution { t, max_spacing, bound: bound / t });
    }
    let f = coupling.f();
    let mut acc = 0.0;
    let mut prev = f[0].norm_sqr() * (om[0] * t).sin();
    for i in 1..om.len() {
        let cur = f[i].norm_sqr() * (om[i] * t).sin();
        acc += 0.5 * (prev + cur) * (om[i] - om[i - 1]);
        prev = cur;
    }
    Ok(2.0 * acc)
}

/// Truncated principal-value Kramers-Kronig transform on the stored grid,
/// without the interior-margin guard. The singularity is removed by
/// subtraction; the subtracted constant is integrated analytically, leaving a
/// log boundary term.
fn kk_re_unchecked(omega: &[f64], chi: &[Complex64], w: f64) -> f64 {
    let n = omega.len();
    // g(w') = w' * Im chi(w'), interpolated at the evaluation point
    let gw = {
        let i = match omega.partition_point(|&x| x <= w) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let frac = ((w - omega[i]) / (omega[i + 1] - omega[i])).clamp(0.0, 1.0);
        omega[i] * chi[i].im * (1.0 - frac) + omega[i + 1] * chi[i + 1].im * frac
    };
    let singular_tol = 1e-12 * (1.0 + w * w);
    let value_at = |j: usize| -> f64 {
        let g = omega[j] * chi[j].im;
        let den = omega[j] * omega[j] - w * w;
        if den.abs() > singular_tol {
            (g - gw) / den
        } else {
            // removable point: slope of g over the neighboring samples, over 2w
            let lo = j.saturating_sub(1);
            let hi = (j + 1).min(n - 1);
            let dg = (omega[hi] * chi[hi].im - omega[lo] * chi[lo].im) / (omega[hi] - omega[lo]);
            dg / (2.0 * w)
        }
    };
    let mut acc = 0.0;
    let mut prev = value_at(0);
    for j in 1..n {
        let cur = value_at(j);
        acc += 0.5 * (prev + cur) * (omega[j] - omega[j - 1]);
        prev = cur;
    }
    let (wmin, wmax) = (omega[0], omega[n - 1]);
    let log_term =
        ((wmax - w) / (wmax + w)).ln() - ((wmin - w).abs() / (wmin + w)).ln();
    (2.0 / std::f64::consts::PI) * (acc + gw * log_term / (2.0 * w))
}

/// Kramers-Kronig transform `Re chi(omega)` from the grid's `Im chi`.
///
/// The evaluation point must sit in the grid interior (an `edge_margin`-sized
/// band on each side is rejected, since the truncated transform degrades
/// there).
pub fn kk_real_from_imag(grid: &SusceptibilityGrid, omega: f64) -> Result<f64> {
    let margin = grid.edge_margin();
    let om = grid.omega();
    let n = om.len();
    if margin * 2 + 2 > n {
        return Err(Error::Invalid("grid too short for an interior region".into()));
    }
    if !omega.is_finite() || omega < om[margin] || omega > om[n - 1 - margin] {
        return Err(Error::EdgeTruncation { omega, margin });
    }
    Ok(kk_re_unchecked(om, grid.chi(), omega))
}

/// One interior sample in a causality report.
#[derive(Debug, Clone, PartialEq)]
pub struct KkRow {
    pub omega: f64,
    pub re_chi: f64,
    pub im_chi: f64,
    pub kk_re_chi: f64,
    pub abs_dev: f64,
}

/// Causality (Kramers-Kronig closure) report over the grid interior.
#[derive(Debug, Clone, PartialEq)]
pub struct KkReport {
    pub rows: Vec<KkRow>,
    pub max_abs_dev: f64,
    pub rms_dev: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Compare the stored `Re chi` against the Kramers-Kronig transform of the
/// stored `Im chi` at every interior sample.
pub fn validate_kk(grid: &SusceptibilityGrid, tol: f64) -> KkReport {
    let margin = grid.edge_margin();
    let n = grid.len();
    let om = grid.omega();
    let chi = grid.chi();
    let rows: Vec<KkRow> = (margin..n - margin)
        .into_par_iter()
        .map(|j| {
            let kk = kk_re_unchecked(om, chi, om[j]);
            KkRow {
                omega: om[j],
                re_chi: chi[j].re,
                im_chi: chi[j].im,
                kk_re_chi: kk,
                abs_dev: (chi[j].re - kk).abs(),
            }
        })
        .collect();
    let max_abs_dev = rows.iter().map(|r| r.abs_dev).fold(0.0f64, f64::max);
    let rms_dev = if rows.is_empty() {
        0.0
    } else {
        (rows.iter().map(|r| r.abs_dev * r.abs_dev).sum::<f64>() / rows.len() as f64).sqrt()
    };
    KkReport { rows, max_abs_dev, rms_dev, tol, pass: max_abs_dev <= tol }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn lorentz_chi(wp: f64, gamma: f64, w: f64) -> Complex64 {
        wp * wp / Complex64::new(1.0 - w * w, -gamma * w)
    }

    fn lorentz_grid() -> SusceptibilityGrid {
        let model = MediumModel::lorentz(0.5, 0.1).unwrap();
        SusceptibilityGrid::sample_model(&model, &GridSpec::default_susceptibility()).unwrap()
    }

    #[test]
    fn epsilon_of_vacuum_and_constant() {
        assert_eq!(MediumModel::Vacuum.epsilon(1.0).unwrap(), Complex64::ONE);
        let m = MediumModel::constant_chi(0.25).unwrap();
        assert_eq!(m.epsilon(3.0).unwrap(), Complex64::new(1.25, 0.0));
    }

    #[test]
    fn epsilon_of_lorentz_matches_closed_form() {
        // chi(0.5) = 0.25 / (0.75 - 0.05i), evaluated independently
        let m = MediumModel::lorentz(0.5, 0.1).unwrap();
        let eps = m.epsilon(0.5).unwrap();
        assert_abs_diff_eq!(eps.re, 1.0 + 0.331_858_407_079_646, epsilon = 1e-12);
        assert_abs_diff_eq!(eps.im, 0.022_123_893_805_309_7, epsilon = 1e-12);
        // passivity on the whole grid
        let grid = lorentz_grid();
        assert!(grid.chi().iter().all(|c| c.im >= 0.0));
    }

    #[test]
    fn tabulated_epsilon_interpolates_and_guards_range() {
        let grid = SusceptibilityGrid::new(
            vec![0.5, 1.0],
            vec![Complex64::new(0.1, 0.02), Complex64::new(0.2, 0.04)],
            0.1,
        )
        .unwrap();
        let m = MediumModel::Tabulated(grid);
        let c = m.chi(0.75).unwrap();
        assert_relative_eq!(c.re, 0.15, max_relative = 1e-12);
        assert_relative_eq!(c.im, 0.03, max_relative = 1e-12);
        assert!(matches!(m.chi(2.0), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn grid_constructor_rejects_bad_input() {
        let err = SusceptibilityGrid::new(
            vec![1.0, 0.5],
            vec![Complex64::ZERO, Complex64::ZERO],
            0.1,
        );
        assert!(matches!(err, Err(Error::Invalid(_))));
        let err = SusceptibilityGrid::new(
            vec![0.5, 1.0],
            vec![Complex64::new(0.0, -0.01), Complex64::ZERO],
            0.1,
        );
        assert!(matches!(err, Err(Error::Passivity { .. })));
    }

    #[test]
    fn coupling_round_trip_is_exact() {
        let grid = lorentz_grid();
        let coupling = coupling_from_im_chi(&grid).unwrap();
        for (&w, c) in grid.omega().iter().zip(grid.chi()).step_by(97) {
            let im = im_chi_from_coupling(&coupling, w).unwrap();
            if c.im > 0.0 {
                assert_relative_eq!(im, c.im, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn coupling_spot_values() {
        // F = 0 -> Im chi = 0; F(1) = 1 -> Im chi = pi
        let c = CouplingSpectrum::new(
            vec![0.5, 1.0, 2.0],
            vec![Complex64::ZERO, Complex64::ONE, Complex64::ZERO],
            None,
        )
        .unwrap();
        assert_eq!(im_chi_from_coupling(&c, 0.5).unwrap(), 0.0);
        assert_relative_eq!(
            im_chi_from_coupling(&c, 1.0).unwrap(),
            std::f64::consts::PI,
            max_relative = 1e-15
        );
        assert!(matches!(
            im_chi_from_coupling(&c, 3.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn chi_time_zero_cases() {
        let grid = lorentz_grid();
        let coupling = coupling_from_im_chi(&grid).unwrap();
        assert_eq!(chi_time(&coupling, 0.0).unwrap(), 0.0);
        let zero = CouplingSpectrum::new(
            vec![0.5, 1.0],
            vec![Complex64::ZERO, Complex64::ZERO],
            None,
        )
        .unwrap();
        assert_eq!(chi_time(&zero, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn chi_time_matches_fine_quadrature_oracle() {
        // coupling sampled from the analytic Lorentz absorption on a uniform
        // grid; oracle = same sine transform at 10x resolution, straight from
        // the analytic Im chi
        let n = 20_000;
        let spec = GridSpec::new(1e-3, 50.0, n, Spacing::Linear).unwrap();
        let omega = spec.points();
        let im: Vec<f64> = omega.iter().map(|&w| lorentz_chi(0.5, 0.1, w).im).collect();
        let grid = SusceptibilityGrid::from_im_chi(omega, im, 1e-4).unwrap();
        let coupling = coupling_from_im_chi(&grid).unwrap();
        let t = 2.0;
        let got = chi_time(&coupling, t).unwrap();

        let fine = GridSpec::new(1e-3, 50.0, 10 * n, Spacing::Linear).unwrap().points();
        let mut oracle = 0.0;
        let f2 = |w: f64| lorentz_chi(0.5, 0.1, w).im / std::f64::consts::PI;
        let mut prev = f2(fine[0]) * (fine[0] * t).sin();
        for i in 1..fine.len() {
            let cur = f2(fine[i]) * (fine[i] * t).sin();
            oracle += 0.5 * (prev + cur) * (fine[i] - fine[i - 1]);
            prev = cur;
        }
        oracle *= 2.0;
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-6);
    }

    #[test]
    fn chi_time_rejects_unresolvable_t() {
        let grid = lorentz_grid(); // log grid, coarse near the cutoff
        let coupling = coupling_from_im_chi(&grid).unwrap();
        assert!(matches!(
            chi_time(&coupling, 500.0),
            Err(Error::Resolution { .. })
        ));
    }

    #[test]
    fn kk_reproduces_lorentz_real_part() {
        let grid = lorentz_grid();
        // below resonance
        let got = kk_real_from_imag(&grid, 0.5).unwrap();
        let want = lorentz_chi(0.5, 0.1, 0.5).re; // 0.331858...
        assert_relative_eq!(got, want, max_relative = 1e-3);
        // above resonance
        let got = kk_real_from_imag(&grid, 2.0).unwrap();
        let want = lorentz_chi(0.5, 0.1, 2.0).re; // -0.0829646...
        assert_relative_eq!(got, want, max_relative = 1e-3);
    }

    #[test]
    fn kk_zero_absorption_gives_zero() {
        let spec = GridSpec::new(0.1, 10.0, 200, Spacing::Linear).unwrap();
        let omega = spec.points();
        let grid = SusceptibilityGrid::from_im_chi(omega, vec![0.0; 200], 1e-4).unwrap();
        assert_eq!(kk_real_from_imag(&grid, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn kk_guards_grid_edges() {
        let grid = lorentz_grid();
        assert!(matches!(
            kk_real_from_imag(&grid, 1.1e-3),
            Err(Error::EdgeTruncation { .. })
        ));
        assert!(matches!(
            kk_real_from_imag(&grid, 49.0),
            Err(Error::EdgeTruncation { .. })
        ));
    }

    #[test]
    fn validate_kk_passes_analytic_lorentz() {
        let report = validate_kk(&lorentz_grid(), 5e-3);
        assert!(report.pass, "max abs dev {}", report.max_abs_dev);
        assert!(report.rms_dev <= report.max_abs_dev);
    }

    #[test]
    fn validate_kk_passes_vacuum() {
        let grid =
            SusceptibilityGrid::sample_model(&MediumModel::Vacuum, &GridSpec::default_susceptibility())
                .unwrap();
        let report = validate_kk(&grid, 1e-12);
        assert!(report.pass);
        assert_eq!(report.max_abs_dev, 0.0);
    }

    #[test]
    fn validate_kk_flags_negated_real_part() {
        let grid = lorentz_grid();
        let flipped = SusceptibilityGrid::new(
            grid.omega().to_vec(),
            grid.chi().iter().map(|c| Complex64::new(-c.re, c.im)).collect(),
            grid.tail_tol(),
        )
        .unwrap();
        let report = validate_kk(&flipped, 5e-3);
        assert!(!report.pass);
        // worst deviation sits near the resonance and doubles |Re chi| there
        let worst = report
            .rows
            .iter()
            .max_by(|a, b| a.abs_dev.total_cmp(&b.abs_dev))
            .unwrap();
        assert_relative_eq!(worst.abs_dev, 2.0 * worst.re_chi.abs(), max_relative = 2e-3);
    }

    #[test]
    fn with_kk_real_fills_real_part() {
        let grid = lorentz_grid();
        let im_only =
            SusceptibilityGrid::from_im_chi(grid.omega().to_vec(), grid.chi().iter().map(|c| c.im).collect(), 1e-4)
                .unwrap()
                .with_kk_real();
        let margin = im_only.edge_margin();
        for j in (margin..im_only.len() - margin).step_by(211) {
            let w = im_only.omega()[j];
            assert_relative_eq!(
                im_only.chi()[j].re,
                lorentz_chi(0.5, 0.1, w).re,
                max_relative = 1e-2,
                epsilon = 1e-4
            );
        }
    }
}
