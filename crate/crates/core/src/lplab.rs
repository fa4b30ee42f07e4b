//! Gaussian test families with closed-form projections and norms, L^p ratio
//! reports, witness tuning, and the ratio experiment on `D`.
//!
//! For `f(y) = exp(−γ‖y − a‖²)` and the weight `η_β`,
//!
//! ```text
//! P f(x) = A e^{λ·x + κ},  A = (β/(γ+β))ⁿ,  λ = βγ conj(a)/(γ+β),  κ = −βγ‖a‖²/(γ+β)
//! ‖A e^{λ·x+κ}‖^p = A^p e^{pκ} (π/β)ⁿ e^{p²‖λ‖²/(4β)}
//! ‖f‖^p           = (π/(pγ+β))ⁿ e^{−pγβ‖a‖²/(pγ+β)}
//! ```
//!
//! so `ln(‖Pf‖^p/‖f‖^p)` is affine in `‖a‖²` with slope
//! `β[p²γ²/(4(γ+β)²) − pγ/(γ+β)] + pγβ/(pγ+β)`.

use std::f64::consts::PI;

use crate::domain::DomainParams;
use crate::error::{domain, Result};
use crate::kernels::FockWeight;
use crate::math::{norm_sq, C64};
use crate::projection::{
    check_exponent, fbh_project, fock_project, function_norm_proposal, projected_lp_norm_pow_fbh,
    projected_lp_norm_pow_fock, NestedSpec, TestFunction,
};
use crate::quadrature::{integrate_fbh_with, integrate_fock_with, McEstimate};

/// `exp(−γ‖y − a‖²)` on ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBump {
    gamma: f64,
    center: Vec<C64>,
}

impl GaussianBump {
    pub fn new(gamma: f64, center: Vec<C64>) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(domain(format!("bump width must be positive, got {gamma}")));
        }
        if center.is_empty() {
            return Err(domain("bump center must be nonempty"));
        }
        if center
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(domain("bump center must be finite"));
        }
        Ok(GaussianBump { gamma, center })
    }

    /// Bump centered at `(|a|, 0, …, 0)`.
    pub fn on_axis(gamma: f64, center_norm: f64, n: usize) -> Result<Self> {
        let mut center = vec![C64::new(0.0, 0.0); n];
        if let Some(c) = center.first_mut() {
            *c = C64::new(center_norm, 0.0);
        }
        GaussianBump::new(gamma, center)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn center(&self) -> &[C64] {
        &self.center
    }

    pub fn n(&self) -> usize {
        self.center.len()
    }

    pub fn eval(&self, y: &[C64]) -> f64 {
        let d: f64 = y
            .iter()
            .zip(&self.center)
            .map(|(y, a)| (y - a).norm_sqr())
            .sum();
        (-self.gamma * d).exp()
    }

    pub fn to_test_function(&self) -> TestFunction {
        let bump = self.clone();
        let id = format!(
            "bump(gamma={}, |a|={})",
            self.gamma,
            norm_sq(&self.center).sqrt()
        );
        TestFunction::base(id, move |y| C64::new(bump.eval(y), 0.0))
            .with_envelope(self.gamma, self.center.clone())
            .expect("validated bump parameters")
    }
}

/// `A exp(λ·x + κ)` with `λ·x = Σ λ_i x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpLinear {
    pub amplitude: f64,
    pub lambda: Vec<C64>,
    pub kappa: f64,
}

impl ExpLinear {
    pub fn eval(&self, x: &[C64]) -> C64 {
        let lin: C64 = self.lambda.iter().zip(x).map(|(l, x)| l * x).sum();
        (lin + self.kappa).exp() * self.amplitude
    }
}

/// Either closed-form family member.
#[derive(Debug, Clone, PartialEq)]
pub enum GaussianForm {
    Bump(GaussianBump),
    ExpLinear(ExpLinear),
}

/// Closed-form `P_{ℂⁿ,η_β}` of a bump.
pub fn gaussian_calculus_project(bump: &GaussianBump, weight: &FockWeight) -> ExpLinear {
    let beta = weight.beta();
    let g = bump.gamma;
    let s = beta * g / (g + beta);
    ExpLinear {
        amplitude: (beta / (g + beta)).powi(bump.n() as i32),
        lambda: bump.center.iter().map(|a| a.conj() * s).collect(),
        kappa: -s * norm_sq(&bump.center),
    }
}

/// `ln ‖·‖^p_{p,η_β}` of a closed-form family member.
pub fn log_lp_norm_pow(form: &GaussianForm, p: f64, weight: &FockWeight) -> Result<f64> {
    check_exponent(p)?;
    let beta = weight.beta();
    match form {
        GaussianForm::Bump(b) => {
            let n = b.n() as f64;
            let t = p * b.gamma + beta;
            Ok(n * (PI / t).ln() - p * b.gamma * beta * norm_sq(&b.center) / t)
        }
        GaussianForm::ExpLinear(e) => {
            if !(e.amplitude.abs() > 0.0) || !e.amplitude.is_finite() || !e.kappa.is_finite() {
                return Err(domain(format!(
                    "exponential form with amplitude {} and constant {} has no finite positive norm",
                    e.amplitude, e.kappa
                )));
            }
            let n = e.lambda.len() as f64;
            Ok(p * e.amplitude.abs().ln()
                + p * e.kappa
                + n * (PI / beta).ln()
                + p * p * norm_sq(&e.lambda) / (4.0 * beta))
        }
    }
}

/// `‖·‖_{p,η_β}` of a closed-form family member.
pub fn lp_norm_gaussian_exponential(
    form: &GaussianForm,
    p: f64,
    weight: &FockWeight,
) -> Result<f64> {
    Ok((log_lp_norm_pow(form, p, weight)? / p).exp())
}

/// `d ln(‖Pf‖^p/‖f‖^p) / d‖a‖²` for the bump family.
pub fn exponent_rate(p: f64, gamma: f64, beta: f64) -> f64 {
    let s = gamma + beta;
    beta * (p * p * gamma * gamma / (4.0 * s * s) - p * gamma / s)
        + p * gamma * beta / (p * gamma + beta)
}

/// The bump family member behind a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyDescriptor {
    pub gamma: f64,
    pub center_norm: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioReport {
    pub p: f64,
    pub family: FamilyDescriptor,
    /// `‖Pf‖_p/‖f‖_p` on ℂⁿ from the closed forms.
    pub ratio_analytic: f64,
    /// Quadrature ratio (on ℂⁿ for [`lp_ratio_quadrature`], on `D` for [`fbh_lp_experiment`]).
    pub ratio_quadrature: Option<f64>,
    pub std_error: Option<f64>,
    pub exponent_rate: f64,
    /// `‖F‖^p_D / ‖f‖^p_{η_{μ(α+m)}}` by quadrature, experiment rows only.
    pub lift_constant: Option<f64>,
    /// Set when `std_error` exceeds 10% of the quadrature ratio.
    pub flagged: bool,
}

impl RatioReport {
    fn analytic(bump: &GaussianBump, p: f64, weight: &FockWeight) -> Result<Self> {
        let pf = gaussian_calculus_project(bump, weight);
        let log_ratio_p = log_lp_norm_pow(&GaussianForm::ExpLinear(pf), p, weight)?
            - log_lp_norm_pow(&GaussianForm::Bump(bump.clone()), p, weight)?;
        Ok(RatioReport {
            p,
            family: FamilyDescriptor {
                gamma: bump.gamma,
                center_norm: norm_sq(&bump.center).sqrt(),
                beta: weight.beta(),
            },
            ratio_analytic: (log_ratio_p / p).exp(),
            ratio_quadrature: None,
            std_error: None,
            exponent_rate: exponent_rate(p, bump.gamma, weight.beta()),
            lift_constant: None,
            flagged: false,
        })
    }

    fn with_quadrature(mut self, ratio: f64, std_error: f64) -> Self {
        self.ratio_quadrature = Some(ratio);
        self.std_error = Some(std_error);
        self.flagged = !(std_error <= 0.1 * ratio.abs());
        self
    }
}

/// Closed-form ratio report for a bump.
pub fn lp_ratio(bump: &GaussianBump, p: f64, weight: &FockWeight) -> Result<RatioReport> {
    RatioReport::analytic(bump, p, weight)
}

/// [`lp_ratio`] plus the quadrature ratio on ℂⁿ: `Pf` by [`fock_project`] with
/// `spec.inner`, both norms with `spec.outer`.
pub fn lp_ratio_quadrature(
    bump: &GaussianBump,
    p: f64,
    weight: &FockWeight,
    spec: &NestedSpec,
) -> Result<RatioReport> {
    let report = RatioReport::analytic(bump, p, weight)?;
    let f = bump.to_test_function();
    let n = bump.n();
    let beta = weight.beta();
    let proj = fock_project(&f, weight, &spec.inner)?;
    let num_prop = crate::projection::projected_norm_proposal(f.envelope(), n, p, beta)?;
    let num = projected_lp_norm_pow_fock(&proj, p, weight, &spec.outer, &num_prop)?;
    let den_prop = function_norm_proposal(f.envelope(), n, p, beta)?;
    let den = integrate_fock_with(
        |y| Ok(C64::new(bump.eval(y).powf(p), 0.0)),
        weight,
        &spec.outer,
        &den_prop,
    )?;
    let (ratio, err) = ratio_of_powers(num, den, p);
    Ok(report.with_quadrature(ratio, err))
}

/// `(num/den)^{1/p}` with first-order error propagation.
fn ratio_of_powers(num: McEstimate, den: McEstimate, p: f64) -> (f64, f64) {
    let (a, b) = (num.value.re, den.value.re);
    let ratio = (a / b).powf(1.0 / p);
    let rel = (num.std_error / a).hypot(den.std_error / b) / p;
    (ratio, ratio * rel)
}

/// Outcome of the witness search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessTuning {
    pub gamma_star: f64,
    pub rate: f64,
    /// Whether a positive rate was found; `false` is the expected outcome at `p = 2`.
    pub found: bool,
}

pub const GAMMA_MIN: f64 = 1e-3;
pub const GAMMA_MAX: f64 = 1e4;
const GRID_POINTS: usize = 701;

/// Maximizes [`exponent_rate`] over `γ ∈ [1e-3, 1e4]`: log-spaced grid, then
/// golden-section search in `ln γ` around the best grid point.
pub fn tune_witness(p: f64, weight: &FockWeight) -> Result<WitnessTuning> {
    check_exponent(p)?;
    let beta = weight.beta();
    let (lo, hi) = (GAMMA_MIN.ln(), GAMMA_MAX.ln());
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let rate_at = |t: f64| exponent_rate(p, t.exp(), beta);
    let (best, _) = (0..GRID_POINTS)
        .map(|i| (i, rate_at(lo + step * i as f64)))
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, r)| if r > acc.1 { (i, r) } else { acc },
        );
    let mut a = lo + step * best.saturating_sub(1) as f64;
    let mut b = (lo + step * (best + 1) as f64).min(hi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    for _ in 0..100 {
        if rate_at(c) > rate_at(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - g * (b - a);
        d = a + g * (b - a);
    }
    let t = [lo + step * best as f64, (a + b) / 2.0]
        .into_iter()
        .max_by(|x, y| rate_at(*x).total_cmp(&rate_at(*y)))
        .expect("two candidates");
    let rate = rate_at(t);
    Ok(WitnessTuning {
        gamma_star: t.exp(),
        rate,
        found: rate > 0.0,
    })
}

/// Options for [`fbh_lp_experiment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentSpec {
    pub quadrature: NestedSpec,
    /// Quadrature on `D` is run for centers up to this norm.
    pub max_quadrature_center: f64,
}

/// Ratio table for the tuned bump family lifted to `D` as cylinder functions.
///
/// The Fock side uses `β = μ(α+m)`. `γ` comes from [`tune_witness`]; when no
/// positive rate exists (the `p = 2` control) the maximizing `γ` is used anyway.
pub fn fbh_lp_experiment(
    p: f64,
    params: &DomainParams,
    spec: &ExperimentSpec,
    centers: &[f64],
) -> Result<Vec<RatioReport>> {
    check_exponent(p)?;
    let weight = FockWeight::reduced(params);
    let tuning = tune_witness(p, &weight)?;
    let n = params.n();
    let beta = weight.beta();
    let mut rows = Vec::with_capacity(centers.len());
    for &center in centers {
        if !(center >= 0.0) || !center.is_finite() {
            return Err(domain(format!(
                "center norms must be finite and nonnegative, got {center}"
            )));
        }
        let bump = GaussianBump::on_axis(tuning.gamma_star, center, n)?;
        let mut row = RatioReport::analytic(&bump, p, &weight)?;
        row.exponent_rate = tuning.rate;
        if center <= spec.max_quadrature_center {
            let f = bump.to_test_function();
            let q = &spec.quadrature;
            let proj = fbh_project(&f, params, &q.inner)?;
            let num_prop = crate::projection::projected_norm_proposal(f.envelope(), n, p, beta)?;
            let num = projected_lp_norm_pow_fbh(&proj, p, params, &q.outer, &num_prop)?;
            let den_prop = function_norm_proposal(f.envelope(), n, p, beta)?;
            let den = integrate_fbh_with(
                |z, _| Ok(C64::new(bump.eval(z).powf(p), 0.0)),
                params,
                &q.outer,
                &den_prop,
            )?;
            let (ratio, err) = ratio_of_powers(num, den, p);
            let base = log_lp_norm_pow(&GaussianForm::Bump(bump.clone()), p, &weight)?.exp();
            row = row.with_quadrature(ratio, err);
            row.lift_constant = Some(den.value.re / base);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Verdict for one exponent in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Blowup,
    BoundedControl,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Blowup => "BLOWUP",
            Verdict::BoundedControl => "BOUNDED-CONTROL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

/// Blowup: analytic ratios strictly increasing with last/first ≥ 10.
/// Bounded control: no positive rate and every ratio (analytic and quadrature) ≤ 1 + tol.
pub fn classify_sweep(rows: &[RatioReport], tuning: &WitnessTuning, tol: f64) -> Verdict {
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio_analytic).collect();
    let increasing = ratios.windows(2).all(|w| w[1] > w[0]);
    if tuning.found
        && ratios.len() >= 2
        && increasing
        && ratios[ratios.len() - 1] >= 10.0 * ratios[0]
    {
        return Verdict::Blowup;
    }
    let bounded = rows.iter().all(|r| {
        r.ratio_analytic <= 1.0 + tol && r.ratio_quadrature.is_none_or(|q| q <= 1.0 + tol)
    });
    if !tuning.found && bounded {
        Verdict::BoundedControl
    } else {
        Verdict::Inconclusive
    }
}
