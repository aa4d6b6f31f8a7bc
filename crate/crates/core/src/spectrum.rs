//! Spectrum of the linearized operator `L = ωM + ω − 1 − φ`, the spectral
//! hypothesis, constrained positivity and the PF(2) screen.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::config;
use crate::error::{Result, WaveError};
use crate::models::WaveSolution;
use crate::spectral::{apply_symbol, symbol_values, PeriodicField, PeriodicGrid};

/// `L` in the exponential basis `n = −N/2+1 ..= N/2` (row/column `i` ↔ mode `modes[i]`).
///
/// The multiplication part is the Toeplitz matrix of `φ̂(j − k)`, with the Nyquist
/// coefficient split as `φ̂(±N/2) = c_{N/2}/2` and modes beyond `±N/2` dropped.
#[derive(Debug, Clone)]
pub struct LinearizedMatrix {
    pub grid: PeriodicGrid,
    pub modes: Vec<i64>,
    pub matrix: DMatrix<f64>,
    /// Largest `|L − Lᵀ|` entry before symmetrization.
    pub asymmetry: f64,
}

impl LinearizedMatrix {
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    /// Row index of mode `n`.
    pub fn index_of(&self, n: i64) -> usize {
        (n + self.grid.nyquist() as i64 - 1) as usize
    }

    /// Real basis vector of the (even, real) field `f`: entries `Re c_n`.
    pub fn even_vector(&self, f: &PeriodicField) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.modes.iter().map(|&n| f.coeff(n).re))
    }

    /// Real basis vector of the odd real field `f`, i.e. the entries `Im c_n`
    /// (`f` has coefficients `i·v_n`).
    pub fn odd_vector(&self, f: &PeriodicField) -> DVector<f64> {
        DVector::from_iterator(self.dim(), self.modes.iter().map(|&n| f.coeff(n).im))
    }

    /// `⟨Lv, v⟩` for a real coefficient vector (Euclidean; multiply by `L0` for `∫`).
    pub fn rayleigh(&self, v: &DVector<f64>) -> f64 {
        v.dot(&(&self.matrix * v)) / v.dot(v)
    }
}

/// Assembles `L` for the wave `w`.
pub fn assemble_l(w: &WaveSolution) -> Result<LinearizedMatrix> {
    let phi = &w.field;
    let grid = *phi.grid();
    let h = grid.nyquist() as i64;
    let modes: Vec<i64> = (-h + 1..=h).collect();
    let theta = symbol_values(phi, w.model.symbol())?;
    let phit = |m: i64| -> f64 {
        if m.abs() < h {
            phi.coeff(m).re
        } else if m.abs() == h {
            0.5 * phi.coeff(h).re
        } else {
            0.0
        }
    };
    let n = modes.len();
    let raw = DMatrix::from_fn(n, n, |r, c| {
        let (j, k) = (modes[r], modes[c]);
        let diag = if r == c {
            let slot = grid.slot_of(j).expect("represented mode");
            w.omega * theta[slot] + w.omega - 1.0
        } else {
            0.0
        };
        diag - phit(j - k)
    });
    let asymmetry = (&raw - raw.transpose()).amax();
    let matrix = (&raw + raw.transpose()) * 0.5;
    Ok(LinearizedMatrix { grid, modes, matrix, asymmetry })
}

/// `1e−6·(|ω − 1| + max|φ| + 1)`: the size of the bounded part of `L`.
pub fn default_tol_zero(w: &WaveSolution) -> f64 {
    config::TOL_ZERO_FACTOR * spectral_scale(w)
}

/// `|ω − 1| + max|φ| + 1`.
pub fn spectral_scale(w: &WaveSolution) -> f64 {
    (w.omega - 1.0).abs() + w.field.max_abs() + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum HypothesisVerdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    /// Ascending, each refined by its Rayleigh quotient.
    pub eigenvalues: Vec<f64>,
    pub tol_zero: f64,
    pub n_negative: usize,
    pub zero_candidates: Vec<f64>,
    pub n_positive: usize,
    /// `|⟨v₀, φ′⟩|/(‖v₀‖‖φ′‖)` for the eigenvector nearest zero.
    pub kernel_alignment: f64,
    /// Negative eigenvalue and kernel are both separated by more than `10·tol_zero`.
    pub simple_flags: SimpleFlags,
    /// Smallest eigenvalue of `L` on the complement of `span{Q′(φ), φ′}` (when computed).
    pub projected_min: Option<f64>,
    pub verdict: HypothesisVerdict,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SimpleFlags {
    pub negative_simple: bool,
    pub zero_simple: bool,
}

/// Eigen-decomposition with refined eigenvalues, ascending.
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

pub fn eigensystem(l: &LinearizedMatrix) -> Eigensystem {
    let eig = l.matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    let refined: Vec<f64> = (0..eig.eigenvalues.len())
        .map(|i| l.rayleigh(&eig.eigenvectors.column(i).into_owned()))
        .collect();
    order.sort_by(|&a, &b| refined[a].total_cmp(&refined[b]));
    let values = order.iter().map(|&i| refined[i]).collect();
    let vectors = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    Eigensystem { values, vectors }
}

/// Numerically checks: one simple negative eigenvalue and a simple zero eigenvalue spanned by `φ′`.
pub fn check_hypothesis_h(w: &WaveSolution, tol_zero: Option<f64>) -> Result<SpectralReport> {
    let l = assemble_l(w)?;
    let tol = tol_zero.unwrap_or_else(|| default_tol_zero(w));
    let es = eigensystem(&l);
    let ev = &es.values;

    let n_negative = ev.iter().filter(|&&v| v < -tol).count();
    let zero_idx: Vec<usize> = (0..ev.len()).filter(|&i| ev[i].abs() <= tol).collect();
    let zero_candidates: Vec<f64> = zero_idx.iter().map(|&i| ev[i]).collect();
    let n_positive = ev.len() - n_negative - zero_candidates.len();

    let dphi = l.odd_vector(&w.field.derivative());
    let nearest = (0..ev.len())
        .min_by(|&a, &b| ev[a].abs().total_cmp(&ev[b].abs()))
        .expect("non-empty spectrum");
    let v0 = es.vectors.column(nearest);
    let kernel_alignment = if dphi.norm() > 0.0 { v0.dot(&dphi).abs() / (v0.norm() * dphi.norm()) } else { 0.0 };

    let negative_simple = n_negative >= 1 && ev.len() > 1 && (ev[1] - ev[0]) > 10.0 * tol;
    let zero_simple = zero_idx.len() == 1 && {
        let i = zero_idx[0];
        let left = if i > 0 { ev[i] - ev[i - 1] } else { f64::INFINITY };
        let right = if i + 1 < ev.len() { ev[i + 1] - ev[i] } else { f64::INFINITY };
        left > 10.0 * tol && right > 10.0 * tol
    };

    let aligned = kernel_alignment > 1.0 - config::KERNEL_ALIGNMENT_TOL;
    let (verdict, reason) = if zero_candidates.len() > 1 {
        (
            HypothesisVerdict::Inconclusive,
            format!("cluster of {} eigenvalues within tol_zero: {:?}", zero_candidates.len(), zero_candidates),
        )
    } else if n_negative == 1 && zero_candidates.len() == 1 && aligned {
        if negative_simple && zero_simple {
            (HypothesisVerdict::Pass, "one negative eigenvalue, simple kernel spanned by phi'".to_string())
        } else {
            (HypothesisVerdict::Inconclusive, format!("spectral gaps below 10*tol_zero = {:.3e}", 10.0 * tol))
        }
    } else {
        let mut why = Vec::new();
        if n_negative != 1 {
            why.push(format!("{n_negative} negative eigenvalues"));
        }
        if zero_candidates.is_empty() {
            why.push("no zero eigenvalue".to_string());
        } else if !aligned {
            why.push(format!("kernel not aligned with phi' (alignment {kernel_alignment:.3e})"));
        }
        (HypothesisVerdict::Fail, why.join("; "))
    };

    Ok(SpectralReport {
        eigenvalues: ev.clone(),
        tol_zero: tol,
        n_negative,
        zero_candidates,
        n_positive,
        kernel_alignment,
        simple_flags: SimpleFlags { negative_simple, zero_simple },
        projected_min: None,
        verdict,
        reason,
    })
}

/// Smallest eigenvalue of `L` restricted to the orthogonal complement of
/// `span{Q′(φ), φ′}` with `Q′(φ) = x₀(Mφ + φ) + y₀`.
pub fn projected_positivity(w: &WaveSolution, x0: f64, y0: f64) -> Result<f64> {
    let l = assemble_l(w)?;
    let m_phi = apply_symbol(&w.field, w.model.symbol())?;
    let q = m_phi.lin_comb(x0, &w.field, x0).add_constant(y0);
    let qv = l.even_vector(&q);
    let dphi = l.odd_vector(&w.field.derivative());
    projected_min_eigenvalue(&l.matrix, &[qv, dphi])
}

/// Smallest eigenvalue of `Cᵀ A C` where the columns of `C` are an orthonormal
/// basis of the complement of `span(constraints)`, built from Householder reflections.
pub fn projected_min_eigenvalue(a: &DMatrix<f64>, constraints: &[DVector<f64>]) -> Result<f64> {
    let n = a.nrows();
    let k = constraints.len();
    if k >= n {
        return Err(WaveError::DegenerateConstraint("as many constraints as dimensions".into()));
    }
    let mut u = DMatrix::from_columns(constraints);
    let scale = constraints.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    if !(scale > 1e-12) {
        return Err(WaveError::DegenerateConstraint(format!("constraint norm {scale:.3e} below 1e-12")));
    }
    let mut reflectors: Vec<DVector<f64>> = Vec::with_capacity(k);
    for i in 0..k {
        let x = u.view((i, i), (n - i, 1)).into_owned();
        let norm = x.norm();
        if norm < 1e-12 * scale {
            return Err(WaveError::DegenerateConstraint(format!(
                "constraint {i} lies in the span of the previous ones (residual {norm:.3e})"
            )));
        }
        let mut v = x.clone();
        let alpha = if x[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let vn = v.norm();
        v /= vn;
        // apply H = I − 2vvᵀ to rows i.. of the remaining columns
        for c in i..k {
            let mut col = u.view_mut((i, c), (n - i, 1));
            let d = 2.0 * v.dot(&col);
            col -= &v * d;
        }
        let mut full = DVector::zeros(n);
        full.rows_mut(i, n - i).copy_from(&v);
        reflectors.push(full);
    }
    // C = H₁⋯H_k [e_{k+1} … e_n]
    let mut c = DMatrix::zeros(n, n - k);
    for j in 0..(n - k) {
        c[(k + j, j)] = 1.0;
    }
    for v in reflectors.iter().rev() {
        let vt_c = v.transpose() * &c;
        c -= v * vt_c * 2.0;
    }
    let b = c.transpose() * a * &c;
    let b = (&b + b.transpose()) * 0.5;
    let ev = b.symmetric_eigen().eigenvalues;
    Ok(ev.iter().copied().fold(f64::INFINITY, f64::min))
}

// ---------------------------------------------------------------------------
// PF(2) screen

#[derive(Debug, Clone, Serialize)]
pub struct Pf2Report {
    pub pass: bool,
    pub window: (usize, usize),
    /// Index of the first non-positive entry, if any.
    pub nonpositive_at: Option<usize>,
    /// Number of 2×2 minors that are not strictly positive.
    pub violations: usize,
    /// Smallest `log(α_{i+p}α_{i+q}) − log(α_iα_{i+p+q})` over the window.
    pub min_log_minor: f64,
    /// `(n, log α_{n+1} − 2log α_n + log α_{n−1})` for interior window indices.
    pub log_second_differences: Vec<(usize, f64)>,
}

/// Checks positivity and `α_{i+p}α_{i+q} > α_iα_{i+p+q}` (`p, q ≥ 1`) for all
/// indices inside `window = (lo, hi)` (inclusive).
pub fn pf2_logconcavity_check(seq: &[f64], window: (usize, usize)) -> Result<Pf2Report> {
    let (lo, hi) = window;
    if lo >= hi || hi >= seq.len() {
        return Err(WaveError::InvalidConfig(format!(
            "window ({lo}, {hi}) invalid for a sequence of length {}",
            seq.len()
        )));
    }
    let empty = |at: Option<usize>| Pf2Report {
        pass: false,
        window,
        nonpositive_at: at,
        violations: 0,
        min_log_minor: f64::NAN,
        log_second_differences: Vec::new(),
    };
    if let Some(i) = (lo..=hi).find(|&i| !(seq[i] > 0.0)) {
        return Ok(empty(Some(i)));
    }
    let lg: Vec<f64> = seq.iter().map(|v| if *v > 0.0 { v.ln() } else { f64::NAN }).collect();
    let mut violations = 0;
    let mut min_log_minor = f64::INFINITY;
    for i in lo..=hi {
        for p in 1..=(hi - i) {
            for q in 1..=(hi - i) {
                if i + p + q > hi {
                    break;
                }
                let m = lg[i + p] + lg[i + q] - lg[i] - lg[i + p + q];
                min_log_minor = min_log_minor.min(m);
                if !(m > 0.0) {
                    violations += 1;
                }
            }
        }
    }
    let log_second_differences = ((lo + 1)..hi).map(|n| (n, lg[n + 1] - 2.0 * lg[n] + lg[n - 1])).collect();
    Ok(Pf2Report {
        pass: violations == 0,
        window,
        nonpositive_at: None,
        violations,
        min_log_minor,
        log_second_differences,
    })
}

/// Shift `μ = 1 + max(0, −min φ)` making `μ + φ` positive with margin 1.
pub fn pf2_shift(phi: &PeriodicField) -> f64 {
    1.0 + (-phi.min()).max(0.0)
}

/// `∂²ₓ log(μ + φ)` sampled on the grid (spectral differentiation).
pub fn log_second_derivative(phi: &PeriodicField, mu: f64) -> Result<PeriodicField> {
    let g = phi.add_constant(mu);
    if g.min() <= 0.0 {
        return Err(WaveError::Domain(format!("mu + phi must be positive (min {})", g.min())));
    }
    let lg = PeriodicField::from_values(*g.grid(), g.values().iter().map(|v| v.ln()).collect())?;
    Ok(lg.derivative().derivative())
}
