//! Reproducing kernels: the Fock kernel on ℂⁿ and the weighted Bergman kernel of
//! the Fock–Bargmann–Hartogs domain, with the monomial norms they are built from.
//!
//! The domain kernel is evaluated as
//!
//! ```text
//! K((x,y),(s,t)) = μⁿ/π^{n+m} · e^{μ(α+m)⟨x,s⟩} · Σ_k c_k u^k,   u = e^{μ⟨x,s⟩}⟨y,t⟩,
//! c_k = Γ(α+m+k+1)(α+m+k)ⁿ / (Γ(α+1) k!)
//! ```
//!
//! with the coefficient ratio `c_{k+1}/c_k = (α+m+k+1)/(k+1) · ((α+m+k+1)/(α+m+k))ⁿ`.
//! That ratio decreases strictly in `k`, so once `|u|·c_{K+1}/c_K < 1` the geometric
//! majorant `|term_K|·r/(1−r)` bounds the whole tail.

use std::f64::consts::PI;

use crate::domain::{require_interior, DomainParams, PointPair};
use crate::error::{domain, Error, Result};
use crate::math::{log_gamma_unchecked, pairing_unchecked, ComplexSum, MultiIndex, C64};

/// Gaussian weight `η_β(z) = exp(−β‖z‖²)` on ℂⁿ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockWeight {
    beta: f64,
}

impl FockWeight {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(domain(format!(
                "Fock weight parameter must be positive, got {beta}"
            )));
        }
        Ok(FockWeight { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The reduced base weight `η_{μ(α+m)}` attached to a domain.
    pub fn reduced(params: &DomainParams) -> Self {
        FockWeight {
            beta: params.base_beta(),
        }
    }
}

/// Truncation control for the kernel series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    rel_tol: f64,
    max_terms: usize,
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(domain(format!("rel_tol must lie in (0, 1), got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(domain("max_terms must be at least 1"));
        }
        Ok(SeriesControl { rel_tol, max_terms })
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-14,
            max_terms: 100_000,
        }
    }
}

/// `∫_{simplex} (1 − Σx_i)^α ∏ x_i^{q_i} dx = ∏Γ(q_i+1) Γ(α+1) / Γ(α + |q| + m + 1)`
/// where `m = q.len()`. Real exponents `q_i > −1` are accepted.
pub fn dirichlet_simplex_integral(q: &[f64], alpha: f64) -> Result<f64> {
    if q.is_empty() {
        return Err(domain("simplex dimension must be positive"));
    }
    if let Some(bad) = q.iter().find(|&&qi| !(qi > -1.0) || !qi.is_finite()) {
        return Err(domain(format!(
            "simplex exponents must exceed -1, got {bad}"
        )));
    }
    if !(alpha > -1.0) || !alpha.is_finite() {
        return Err(domain(format!("alpha must exceed -1, got {alpha}")));
    }
    let m = q.len() as f64;
    let total: f64 = q.iter().sum();
    let log_num: f64 = q
        .iter()
        .map(|&qi| log_gamma_unchecked(qi + 1.0))
        .sum::<f64>()
        + log_gamma_unchecked(alpha + 1.0);
    Ok((log_num - log_gamma_unchecked(alpha + total + m + 1.0)).exp())
}

/// `ln ‖z^p w^q‖²` in `L²(D, (−ρ)^α)`.
pub fn log_monomial_norm_sq(p: &MultiIndex, q: &MultiIndex, params: &DomainParams) -> Result<f64> {
    if p.len() != params.n() {
        return Err(Error::LengthMismatch {
            expected: params.n(),
            actual: p.len(),
        });
    }
    if q.len() != params.m() {
        return Err(Error::LengthMismatch {
            expected: params.m(),
            actual: q.len(),
        });
    }
    let n = params.n() as f64;
    let m = params.m() as f64;
    let alpha = params.alpha();
    let qo = q.order() as f64;
    let po = p.order() as f64;
    Ok((n + m) * PI.ln()
        + p.log_factorial_product()
        + q.log_factorial_product()
        + log_gamma_unchecked(alpha + 1.0)
        - log_gamma_unchecked(alpha + m + 1.0 + qo)
        - (po + n) * (params.mu() * (alpha + m + qo)).ln())
}

/// `‖z^p w^q‖²` in `L²(D, (−ρ)^α)`, assembled in log-space.
pub fn monomial_norm_sq(p: &MultiIndex, q: &MultiIndex, params: &DomainParams) -> Result<f64> {
    log_monomial_norm_sq(p, q, params).map(f64::exp)
}

/// Fock kernel `(β/π)ⁿ exp(β⟨x,y⟩)`.
pub fn fock_kernel(x: &[C64], y: &[C64], weight: &FockWeight) -> Result<C64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    let beta = weight.beta();
    let scale = (beta / PI).powi(x.len() as i32);
    Ok((pairing_unchecked(x, y) * beta).exp() * scale)
}

/// A kernel value together with its truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: C64,
    /// Number of series terms summed.
    pub terms: usize,
    /// Certified bound on the discarded tail, in the same units as `value`.
    pub tail_bound: f64,
}

/// Prepared evaluator for the weighted Bergman kernel of `D`.
///
/// Holds the log of the constant prefactor so repeated evaluations (quadrature)
/// avoid Gamma calls.
#[derive(Debug, Clone, Copy)]
pub struct FbhKernel {
    params: DomainParams,
    ctl: SeriesControl,
    log_const: f64,
    am: f64,
}

impl FbhKernel {
    pub fn new(params: &DomainParams, ctl: &SeriesControl) -> Self {
        let n = params.n() as f64;
        let m = params.m() as f64;
        let alpha = params.alpha();
        let am = alpha + m;
        let log_const =
            n * params.mu().ln() - (n + m) * PI.ln() + log_gamma_unchecked(am + 1.0) + n * am.ln()
                - log_gamma_unchecked(alpha + 1.0);
        FbhKernel {
            params: *params,
            ctl: *ctl,
            log_const,
            am,
        }
    }

    pub fn params(&self) -> &DomainParams {
        &self.params
    }

    /// Evaluates with full validation: dimensions and strict interior membership.
    pub fn evaluate(&self, a: &PointPair, b: &PointPair) -> Result<KernelValue> {
        require_interior(a, &self.params)?;
        require_interior(b, &self.params)?;
        let xs = pairing_unchecked(&a.z, &b.z);
        let yt = pairing_unchecked(&a.w, &b.w);
        self.eval_pairings(xs, yt)
    }

    /// Evaluates from the two pairings `⟨x,s⟩` and `⟨y,t⟩`, which determine the kernel.
    /// No membership check; `|u| ≥ 1` surfaces as [`Error::NonConvergence`].
    pub fn eval_pairings(&self, xs: C64, yt: C64) -> Result<KernelValue> {
        let mu = self.params.mu();
        let n = self.params.n() as i32;
        let log_prefactor = xs * (mu * self.am) + self.log_const;
        let u = if yt == C64::new(0.0, 0.0) {
            C64::new(0.0, 0.0)
        } else {
            (xs * mu + yt.ln()).exp()
        };
        let u_abs = u.norm();

        let mut sum = ComplexSum::default();
        let mut term = C64::new(1.0, 0.0);
        let mut abs_sum = 1.0;
        sum.add(term);
        let mut k = 0usize;
        loop {
            let kf = k as f64;
            let ratio =
                (self.am + kf + 1.0) / (kf + 1.0) * ((self.am + kf + 1.0) / (self.am + kf)).powi(n);
            let r = u_abs * ratio;
            if r < 1.0 {
                let tail = term.norm() * r / (1.0 - r);
                let s_abs = sum.value().norm();
                if tail <= self.ctl.rel_tol() * s_abs || tail <= f64::EPSILON * abs_sum {
                    let prefactor = log_prefactor.exp();
                    return Ok(KernelValue {
                        value: prefactor * sum.value(),
                        terms: k + 1,
                        tail_bound: prefactor.norm() * tail,
                    });
                }
            }
            if k + 1 >= self.ctl.max_terms() {
                return Err(Error::NonConvergence {
                    terms: k + 1,
                    u_abs,
                    ratio: r,
                });
            }
            term *= u * ratio;
            k += 1;
            sum.add(term);
            abs_sum += term.norm();
        }
    }
}

impl FbhKernel {
    /// `e^{μ(α+m)⟨x,s⟩}·const · Σ_{k<modes.len()} c_k v^k modes[k]`.
    ///
    /// With `v = e^{μ⟨x,s⟩} y r` and `modes[k]` the `e^{ikφ}` Fourier coefficient of
    /// `φ ↦ F(s, r e^{iφ})`, this is the circle average of `K((x,y),(s,·))·F(s,·)`
    /// for `m = 1`, exact for `F` band-limited to the supplied modes.
    pub fn fiber_mode_sum(&self, xs: C64, v: C64, modes: &[C64]) -> C64 {
        let n = self.params.n() as i32;
        let mut sum = ComplexSum::default();
        let mut coeff = C64::new(1.0, 0.0);
        for (k, mode) in modes.iter().enumerate() {
            if k > 0 {
                let kf = (k - 1) as f64;
                let ratio = (self.am + kf + 1.0) / (kf + 1.0)
                    * ((self.am + kf + 1.0) / (self.am + kf)).powi(n);
                coeff *= v * ratio;
            }
            sum.add(coeff * mode);
        }
        (xs * (self.params.mu() * self.am) + self.log_const).exp() * sum.value()
    }
}

/// Weighted Bergman kernel of `D` by the certified series.
pub fn fbh_kernel_series(
    a: &PointPair,
    b: &PointPair,
    params: &DomainParams,
    ctl: &SeriesControl,
) -> Result<KernelValue> {
    FbhKernel::new(params, ctl).evaluate(a, b)
}

/// Default degree cap for [`fbh_kernel_basis_oracle`].
pub const ORACLE_DEGREE_CAP: u32 = 60;

/// Independent evaluation of the kernel as the orthonormal-basis double sum
/// `Σ_{|p|≤cap, |q|≤cap} x^p y^q conj(s^p t^q) / ‖z^p w^q‖²`.
///
/// Terms are formed in log-magnitude/phase form from [`monomial_norm_sq`] and never
/// touch the series code path. Accurate when coordinates have modulus ≤ 1 and
/// `|⟨y,t⟩| e^{μ|⟨x,s⟩|}` is well below 1.
pub fn fbh_kernel_basis_oracle(
    a: &PointPair,
    b: &PointPair,
    params: &DomainParams,
    degree_cap: u32,
) -> Result<C64> {
    require_interior(a, params)?;
    require_interior(b, params)?;
    let base_pairs: Vec<(f64, f64)> =
        a.z.iter()
            .zip(&b.z)
            .map(|(x, s)| ((x.norm() * s.norm()).ln(), x.arg() - s.arg()))
            .collect();
    let fiber_pairs: Vec<(f64, f64)> =
        a.w.iter()
            .zip(&b.w)
            .map(|(y, t)| ((y.norm() * t.norm()).ln(), y.arg() - t.arg()))
            .collect();
    let ps = MultiIndex::all_up_to(params.n(), degree_cap);
    let qs = MultiIndex::all_up_to(params.m(), degree_cap);

    let mut sum = ComplexSum::default();
    for q in &qs {
        let Some((lq, phq)) = log_monomial_pair(q, &fiber_pairs) else {
            continue;
        };
        for p in &ps {
            let Some((lp, php)) = log_monomial_pair(p, &base_pairs) else {
                continue;
            };
            let log_norm = log_monomial_norm_sq(p, q, params)?;
            sum.add(C64::from_polar((lp + lq - log_norm).exp(), php + phq));
        }
    }
    Ok(sum.value())
}

/// `(ln |x^p s̄^p|, arg(x^p s̄^p))`, or `None` when the product vanishes.
fn log_monomial_pair(idx: &MultiIndex, pairs: &[(f64, f64)]) -> Option<(f64, f64)> {
    let mut log_mag = 0.0;
    let mut phase = 0.0;
    for (&e, &(lm, ph)) in idx.entries().iter().zip(pairs) {
        if e == 0 {
            continue;
        }
        if lm == f64::NEG_INFINITY {
            return None;
        }
        log_mag += f64::from(e) * lm;
        phase += f64::from(e) * ph;
    }
    Some((log_mag, phase))
}

/// Both sides of the base-slice restriction identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictionCheck {
    /// Domain kernel at `((x,0),(s,0))`.
    pub lhs: C64,
    /// `Γ(α+m+1)/(π^m Γ(α+1))` times the Fock kernel with `β = μ(α+m)`.
    pub rhs: C64,
    pub rel_diff: f64,
}

/// Compares the domain kernel on the base slice `w = 0` with the scaled Fock kernel.
pub fn restriction_identity_check(
    x: &[C64],
    s: &[C64],
    params: &DomainParams,
    ctl: &SeriesControl,
) -> Result<RestrictionCheck> {
    let zero = vec![C64::new(0.0, 0.0); params.m()];
    let a = PointPair::new(x.to_vec(), zero.clone());
    let b = PointPair::new(s.to_vec(), zero);
    let lhs = fbh_kernel_series(&a, &b, params, ctl)?.value;
    let m = params.m() as f64;
    let alpha = params.alpha();
    let factor =
        (log_gamma_unchecked(alpha + m + 1.0) - m * PI.ln() - log_gamma_unchecked(alpha + 1.0))
            .exp();
    let rhs = fock_kernel(x, s, &FockWeight::reduced(params))? * factor;
    Ok(RestrictionCheck {
        lhs,
        rhs,
        rel_diff: (lhs - rhs).norm() / rhs.norm(),
    })
}
