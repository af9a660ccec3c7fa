//! Truncated-Fock-space value types and elementary mode operations.
//!
//! A single mode is an amplitude vector over `|0⟩..|D-1⟩`; a two-mode state
//! is a `D×D` grid indexed `(n_a, n_b)`. The 50:50 beam splitter conserves
//! total photon number, so the anti-diagonals `{(n, T-n)}` of the grid are
//! the natural unit of work; `TwoModeState` exposes them as blocks.
//!
//! All moments are computed by ladder-operator index shifts on the amplitude
//! vector (`a|n⟩ = √n |n-1⟩`), which gives the exact infinite-space
//! expectation values of the embedded state.

use num_complex::Complex64;

use crate::error::{CoreError, Result};

/// Normalization slack accepted without renormalizing.
pub const NORM_TOL: f64 = 1e-12;

/// Default acceptability bound for truncation tails.
pub const EPS_TAIL: f64 = 1e-10;

/// One bosonic mode over the truncated number basis `|0⟩..|cutoff-1⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    amps: Vec<Complex64>,
    /// Probability mass discarded when the state was truncated at
    /// construction time. Zero for states built exactly.
    truncation_tail: f64,
}

impl SingleModeState {
    /// Normalizing constructor. Rejects the zero vector.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        Self::with_tail(amps, 0.0)
    }

    /// Normalizing constructor that records the mass a factory discarded.
    pub fn with_tail(mut amps: Vec<Complex64>, truncation_tail: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(CoreError::ZeroNorm);
        }
        let norm_sq: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(CoreError::ZeroNorm);
        }
        if (norm_sq - 1.0).abs() > NORM_TOL {
            let inv = 1.0 / norm_sq.sqrt();
            for c in &mut amps {
                *c *= inv;
            }
        }
        Ok(Self {
            amps,
            truncation_tail,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, n: usize) -> Complex64 {
        self.amps[n]
    }

    pub fn truncation_tail(&self) -> f64 {
        self.truncation_tail
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Probability mass at indices `n >= k`; nonincreasing in `k`.
    pub fn tail_mass(&self, k: usize) -> f64 {
        self.amps.iter().skip(k).map(|c| c.norm_sqr()).sum()
    }

    /// Gauge fix: rotate the global phase so the first nonzero amplitude
    /// is real and positive. Makes state equality checks phase-free.
    pub fn phase_normalized(mut self) -> Self {
        if let Some(first) = self.amps.iter().find(|c| c.norm_sqr() > 0.0) {
            let phase = first / first.norm();
            let correction = phase.conj();
            for c in &mut self.amps {
                *c *= correction;
            }
        }
        self
    }

    /// Zero-pad to a larger cutoff.
    pub fn embed(&self, cutoff: usize) -> Self {
        assert!(cutoff >= self.cutoff());
        let mut amps = self.amps.clone();
        amps.resize(cutoff, Complex64::ZERO);
        Self {
            amps,
            truncation_tail: self.truncation_tail,
        }
    }

    /// Rescale amplitudes by `s^n` and renormalize. Raising `s` shifts
    /// probability mass toward higher photon numbers; used to project a
    /// state onto a prescribed mean photon number.
    pub fn geometric_rescale(&self, s: f64) -> Result<Self> {
        let mut amps = self.amps.clone();
        let mut w = 1.0;
        for (n, c) in amps.iter_mut().enumerate() {
            if n > 0 {
                w *= s;
            }
            *c *= w;
        }
        Self::with_tail(amps, self.truncation_tail)
    }
}

/// Two modes over the truncated basis, amplitudes indexed `(n_a, n_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    cutoff: usize,
    /// Row-major `cutoff × cutoff`: `amps[n_a * cutoff + n_b]`.
    amps: Vec<Complex64>,
    truncation_tail: f64,
}

impl TwoModeState {
    pub fn new(amps: Vec<Complex64>, cutoff: usize) -> Result<Self> {
        Self::with_tail(amps, cutoff, 0.0)
    }

    pub fn with_tail(mut amps: Vec<Complex64>, cutoff: usize, truncation_tail: f64) -> Result<Self> {
        assert_eq!(amps.len(), cutoff * cutoff, "grid shape mismatch");
        let norm_sq: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(CoreError::ZeroNorm);
        }
        if (norm_sq - 1.0).abs() > NORM_TOL {
            let inv = 1.0 / norm_sq.sqrt();
            for c in &mut amps {
                *c *= inv;
            }
        }
        Ok(Self {
            cutoff,
            amps,
            truncation_tail,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, n_a: usize, n_b: usize) -> Complex64 {
        self.amps[n_a * self.cutoff + n_b]
    }

    pub fn truncation_tail(&self) -> f64 {
        self.truncation_tail
    }

    pub fn norm_sq(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Range of mode-a occupation numbers present in the total-photon-number
    /// block `T` (the anti-diagonal `{(n, T-n)}` clipped to the grid).
    pub fn block_range(&self, total: usize) -> std::ops::RangeInclusive<usize> {
        let lo = total.saturating_sub(self.cutoff - 1);
        let hi = total.min(self.cutoff - 1);
        lo..=hi
    }

    /// Probability mass in blocks with total photon number `> t_max`.
    pub fn block_mass_above(&self, t_max: usize) -> f64 {
        let mut mass = 0.0;
        for n_a in 0..self.cutoff {
            for n_b in 0..self.cutoff {
                if n_a + n_b > t_max {
                    mass += self.amp(n_a, n_b).norm_sqr();
                }
            }
        }
        mass
    }

    /// Zero-pad the grid to a larger cutoff.
    pub fn embed(&self, cutoff: usize) -> Self {
        assert!(cutoff >= self.cutoff);
        let mut amps = vec![Complex64::ZERO; cutoff * cutoff];
        for n_a in 0..self.cutoff {
            for n_b in 0..self.cutoff {
                amps[n_a * cutoff + n_b] = self.amp(n_a, n_b);
            }
        }
        Self {
            cutoff,
            amps,
            truncation_tail: self.truncation_tail,
        }
    }

    /// `‖self - other‖` after embedding both into a common cutoff.
    pub fn distance(&self, other: &Self) -> f64 {
        let d = self.cutoff.max(other.cutoff);
        let a = if self.cutoff == d {
            self.clone()
        } else {
            self.embed(d)
        };
        let b = if other.cutoff == d {
            other.clone()
        } else {
            other.embed(d)
        };
        a.amps
            .iter()
            .zip(&b.amps)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `|ξ⟩ ⊗ |χ⟩` on the shared-cutoff grid.
pub fn tensor(a_state: &SingleModeState, b_state: &SingleModeState) -> Result<TwoModeState> {
    if a_state.cutoff() != b_state.cutoff() {
        return Err(CoreError::CutoffMismatch {
            left: a_state.cutoff(),
            right: b_state.cutoff(),
        });
    }
    let d = a_state.cutoff();
    let mut amps = vec![Complex64::ZERO; d * d];
    for (n_a, ca) in a_state.amps().iter().enumerate() {
        for (n_b, cb) in b_state.amps().iter().enumerate() {
            amps[n_a * d + n_b] = ca * cb;
        }
    }
    TwoModeState::with_tail(
        amps,
        d,
        a_state.truncation_tail() + b_state.truncation_tail(),
    )
}

/// The six single-mode moments consumed by the product-form Fisher
/// information, plus the quadrature second moments derived from them.
///
/// Quadrature convention: `x = (a + a†)/√2`, `p = (a - a†)/(i√2)` (ħ = 1,
/// vacuum variance 1/2), so `⟨x²⟩ + ⟨p²⟩ = 2N + 1` holds identically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMoments {
    /// ⟨a⟩
    pub mean: Complex64,
    /// ⟨aa⟩
    pub pair: Complex64,
    /// ⟨a†a†⟩ = conj(⟨aa⟩)
    pub pair_dag: Complex64,
    /// N = ⟨a†a⟩
    pub number: f64,
    /// ⟨(a†a)²⟩
    pub number_sq: f64,
    /// ⟨x²⟩
    pub quad_x2: f64,
    /// ⟨p²⟩
    pub quad_p2: f64,
}

/// Exact moments of a normalized single-mode state via ladder index shifts.
pub fn moments(state: &SingleModeState) -> ModeMoments {
    let c = state.amps();
    let d = c.len();
    let mut mean = Complex64::ZERO;
    let mut pair = Complex64::ZERO;
    let mut number = 0.0;
    let mut number_sq = 0.0;
    for n in 0..d {
        let p = c[n].norm_sqr();
        number += n as f64 * p;
        number_sq += (n * n) as f64 * p;
        if n + 1 < d {
            mean += ((n + 1) as f64).sqrt() * c[n].conj() * c[n + 1];
        }
        if n + 2 < d {
            pair += (((n + 1) * (n + 2)) as f64).sqrt() * c[n].conj() * c[n + 2];
        }
    }
    let re_pair = pair.re;
    ModeMoments {
        mean,
        pair,
        pair_dag: pair.conj(),
        number,
        number_sq,
        quad_x2: number + 0.5 + re_pair,
        quad_p2: number + 0.5 - re_pair,
    }
}

/// Mean and second moment of the differenced photon number
/// `N_d = a†a - b†b` in the given state.
///
/// The sign convention `a†a - b†b` is the one that reproduces the usual
/// expansion of the Fisher information through `B†N_dB = i(b†a - a†b)`.
/// The variance is sign-invariant, the mean is not.
pub fn differenced_number_moments(state: &TwoModeState) -> (f64, f64) {
    let d = state.cutoff();
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for n_a in 0..d {
        for n_b in 0..d {
            let p = state.amp(n_a, n_b).norm_sqr();
            if p == 0.0 {
                continue;
            }
            let nd = n_a as f64 - n_b as f64;
            m1 += nd * p;
            m2 += nd * nd * p;
        }
    }
    (m1, m2)
}
