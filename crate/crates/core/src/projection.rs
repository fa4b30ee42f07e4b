//! Weighted Bergman projections on ℂⁿ and on `D` realized by quadrature, and the
//! identities relating the projection of a cylinder function `F(z, w) = f(z)` on
//! `D` to the Fock projection of `f` under `η_{μ(α+m)}`.
//!
//! Projections are evaluated lazily, one quadrature per query point. The base
//! proposal for a query `x` is the Gaussian matching `|K(x, ·)| η_β`, narrowed by
//! the function's [`Envelope`] when one is declared.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::domain::{require_fiber_interior, DomainParams, PointPair};
use crate::error::{domain, Error, Result};
use crate::kernels::{FbhKernel, FockWeight, SeriesControl};
use crate::math::{pairing_unchecked, C64};
use crate::quadrature::{
    integrate_fbh_multi, integrate_fbh_with, integrate_fock_multi, integrate_fock_with,
    tensor_fbh_circles, trapezoid, Engine, McEstimate, Proposal, QuadratureSpec,
};

/// Integrability declared by the caller; never verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Integrability {
    pub l2: bool,
    pub lp: bool,
}

impl Default for Integrability {
    fn default() -> Self {
        Integrability { l2: true, lp: true }
    }
}

/// A Gaussian `exp(−γ‖y − a‖²)` dominating the modulus of a function up to slow factors.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    gamma: f64,
    center: Vec<C64>,
}

impl Envelope {
    pub fn new(gamma: f64, center: Vec<C64>) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(domain(format!(
                "envelope width must be nonnegative, got {gamma}"
            )));
        }
        if center
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(domain("envelope center must be finite"));
        }
        Ok(Envelope { gamma, center })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn center(&self) -> &[C64] {
        &self.center
    }

    fn parts(env: Option<&Envelope>, n: usize) -> (f64, Vec<C64>) {
        match env {
            Some(e) if e.center.len() == n => (e.gamma, e.center.clone()),
            _ => (0.0, vec![C64::new(0.0, 0.0); n]),
        }
    }
}

/// Proposal for `y ↦ K(x, y) f(y) η_β(y)`: center `(βx/2 + γa)/(β+γ)`, precision `β+γ`.
pub fn kernel_proposal(env: Option<&Envelope>, x: &[C64], beta: f64) -> Result<Proposal> {
    let (gamma, a) = Envelope::parts(env, x.len());
    let tau = beta + gamma;
    let center = x
        .iter()
        .zip(&a)
        .map(|(xi, ai)| (xi * (beta / 2.0) + ai * gamma) / tau)
        .collect();
    Proposal::new(center, tau)
}

/// Proposal for `|f|^p η_β`: center `pγa/(pγ+β)`, precision `pγ+β`.
pub fn function_norm_proposal(
    env: Option<&Envelope>,
    n: usize,
    p: f64,
    beta: f64,
) -> Result<Proposal> {
    let (gamma, a) = Envelope::parts(env, n);
    let tau = p * gamma + beta;
    Proposal::new(a.iter().map(|ai| ai * (p * gamma / tau)).collect(), tau)
}

/// Proposal for `|Pf|^p η_β` when `Pf ≈ A e^{λ·x}` with `λ` read off the envelope:
/// center `pγa/(2(γ+β))`, precision `β`.
pub fn projected_norm_proposal(
    env: Option<&Envelope>,
    n: usize,
    p: f64,
    beta: f64,
) -> Result<Proposal> {
    let (gamma, a) = Envelope::parts(env, n);
    let s = p * gamma / (2.0 * (gamma + beta));
    Proposal::new(a.iter().map(|ai| ai * s).collect(), beta)
}

type Evaluator = dyn Fn(&[C64], &[C64]) -> C64 + Send + Sync;

/// A black-box function on ℂⁿ or on `D` with an identifier, declared
/// integrability, and an optional Gaussian envelope.
///
/// Functions built with [`TestFunction::base`] depend on the base variable only;
/// on `D` they act as cylinder functions.
#[derive(Clone)]
pub struct TestFunction {
    id: String,
    eval: Arc<Evaluator>,
    cylinder: bool,
    integrability: Integrability,
    envelope: Option<Envelope>,
}

impl TestFunction {
    pub fn base(id: impl Into<String>, f: impl Fn(&[C64]) -> C64 + Send + Sync + 'static) -> Self {
        TestFunction {
            id: id.into(),
            eval: Arc::new(move |z, _| f(z)),
            cylinder: true,
            integrability: Integrability::default(),
            envelope: None,
        }
    }

    pub fn on_domain(
        id: impl Into<String>,
        f: impl Fn(&[C64], &[C64]) -> C64 + Send + Sync + 'static,
    ) -> Self {
        TestFunction {
            id: id.into(),
            eval: Arc::new(f),
            cylinder: false,
            integrability: Integrability::default(),
            envelope: None,
        }
    }

    pub fn with_envelope(mut self, gamma: f64, center: Vec<C64>) -> Result<Self> {
        self.envelope = Some(Envelope::new(gamma, center)?);
        Ok(self)
    }

    pub fn with_integrability(mut self, integrability: Integrability) -> Self {
        self.integrability = integrability;
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_cylinder(&self) -> bool {
        self.cylinder
    }

    pub fn integrability(&self) -> Integrability {
        self.integrability
    }

    pub fn envelope(&self) -> Option<&Envelope> {
        self.envelope.as_ref()
    }

    #[inline]
    pub fn eval(&self, z: &[C64], w: &[C64]) -> C64 {
        (self.eval)(z, w)
    }
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("id", &self.id)
            .field("cylinder", &self.cylinder)
            .field("integrability", &self.integrability)
            .field("envelope", &self.envelope)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectionTarget {
    Fock(FockWeight),
    Domain(DomainParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub source_id: String,
    pub target: ProjectionTarget,
    pub spec: QuadratureSpec,
}

/// `P f`, evaluated on demand at query points.
#[derive(Debug, Clone)]
pub struct ProjectedFunction {
    source: TestFunction,
    provenance: Provenance,
    kernel: Option<FbhKernel>,
}

impl ProjectedFunction {
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn source(&self) -> &TestFunction {
        &self.source
    }

    /// Value at `x` for a Fock projection.
    pub fn at(&self, x: &[C64]) -> Result<McEstimate> {
        self.evaluate(x, &[])
    }

    /// Value at `(z, w)`; `w` must be empty for Fock projections.
    pub fn evaluate(&self, z: &[C64], w: &[C64]) -> Result<McEstimate> {
        let spec = &self.provenance.spec;
        let f = &self.source;
        match (&self.provenance.target, &self.kernel) {
            (ProjectionTarget::Fock(weight), _) => {
                if !w.is_empty() {
                    return Err(Error::Unsupported(
                        "Fock projections take base points only".into(),
                    ));
                }
                if z.is_empty() {
                    return Err(domain("query point must be nonempty"));
                }
                let beta = weight.beta();
                let scale = (beta / std::f64::consts::PI).powi(z.len() as i32);
                let proposal = kernel_proposal(f.envelope(), z, beta)?;
                integrate_fock_with(
                    |y| {
                        if y.len() != z.len() {
                            return Err(Error::LengthMismatch {
                                expected: z.len(),
                                actual: y.len(),
                            });
                        }
                        Ok((pairing_unchecked(z, y) * beta).exp() * scale * f.eval(y, &[]))
                    },
                    weight,
                    spec,
                    &proposal,
                )
            }
            (ProjectionTarget::Domain(params), Some(kernel)) => {
                require_fiber_interior(&PointPair::new(z.to_vec(), w.to_vec()), params)?;
                let proposal = kernel_proposal(f.envelope(), z, params.base_beta())?;
                if spec.engine == Engine::TensorGauss && params.m() == 1 {
                    let [e] = tensor_fbh_circles(
                        |s, r, nphi| Ok([circle_mode_integral(kernel, f, z, w[0], s, r, nphi)?]),
                        params,
                        spec,
                        &proposal,
                    )?;
                    return Ok(e);
                }
                integrate_fbh_with(
                    |s, t| {
                        let k = kernel
                            .eval_pairings(pairing_unchecked(z, s), pairing_unchecked(w, t))?;
                        Ok(k.value * f.eval(s, t))
                    },
                    params,
                    spec,
                    &proposal,
                )
            }
            (ProjectionTarget::Domain(_), None) => {
                unreachable!("domain projections carry a kernel")
            }
        }
    }

    /// Evaluates at several points in parallel; results keep the input order.
    pub fn evaluate_many(&self, points: &[PointPair]) -> Result<Vec<McEstimate>> {
        points
            .par_iter()
            .map(|pt| self.evaluate(&pt.z, &pt.w))
            .collect()
    }
}

/// Circle average of `t ↦ K((z,w),(s,t)) F(s,t)` over `|t| = r` (m = 1).
///
/// `F` is sampled at `n_φ` equispaced phases and resolved into the Fourier modes
/// `e^{ikφ}`, `0 ≤ k < n_φ/2`; each mode is paired with the matching kernel term, so
/// kernel modes never alias however close `(z, w)` lies to the boundary.
fn circle_mode_integral(
    kernel: &FbhKernel,
    f: &TestFunction,
    z: &[C64],
    w: C64,
    s: &[C64],
    r: f64,
    nphi: usize,
) -> Result<C64> {
    let phase = trapezoid(nphi)?;
    let mut t = [C64::new(0.0, 0.0)];
    let samples: Vec<C64> = phase
        .nodes
        .iter()
        .map(|&phi| {
            t[0] = C64::from_polar(r, phi);
            f.eval(s, &t)
        })
        .collect();
    let roots: Vec<C64> = phase
        .nodes
        .iter()
        .map(|&phi| C64::from_polar(1.0, -phi))
        .collect();
    let modes: Vec<C64> = (0..nphi.div_ceil(2))
        .map(|k| {
            samples
                .iter()
                .enumerate()
                .map(|(l, v)| v * roots[(k * l) % nphi])
                .sum::<C64>()
                / nphi as f64
        })
        .collect();
    let xs = pairing_unchecked(z, s);
    let v = (xs * kernel.params().mu()).exp() * w * r;
    Ok(kernel.fiber_mode_sum(xs, v, &modes))
}

/// `P_{ℂⁿ,η_β} f`.
pub fn fock_project(
    f: &TestFunction,
    weight: &FockWeight,
    spec: &QuadratureSpec,
) -> Result<ProjectedFunction> {
    spec.validate()?;
    Ok(ProjectedFunction {
        source: f.clone(),
        provenance: Provenance {
            source_id: f.id().to_string(),
            target: ProjectionTarget::Fock(*weight),
            spec: *spec,
        },
        kernel: None,
    })
}

/// `P_{D,(−ρ)^α} F` with the default series control.
pub fn fbh_project(
    f: &TestFunction,
    params: &DomainParams,
    spec: &QuadratureSpec,
) -> Result<ProjectedFunction> {
    fbh_project_with_control(f, params, spec, &SeriesControl::default())
}

pub fn fbh_project_with_control(
    f: &TestFunction,
    params: &DomainParams,
    spec: &QuadratureSpec,
    ctl: &SeriesControl,
) -> Result<ProjectedFunction> {
    spec.validate()?;
    Ok(ProjectedFunction {
        source: f.clone(),
        provenance: Provenance {
            source_id: f.id().to_string(),
            target: ProjectionTarget::Domain(*params),
            spec: *spec,
        },
        kernel: Some(FbhKernel::new(params, ctl)),
    })
}

/// Separate rules for an outer integral whose integrand is itself a projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedSpec {
    pub inner: QuadratureSpec,
    pub outer: QuadratureSpec,
}

fn require_cylinder(f: &TestFunction) -> Result<()> {
    if f.is_cylinder() {
        Ok(())
    } else {
        Err(domain(format!("'{}' is not a cylinder function", f.id())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormIdentity {
    /// `‖F‖^p` over `D`.
    pub lhs: McEstimate,
    /// `C_fiber · ‖f‖^p` under `η_{μ(α+m)}`.
    pub rhs: McEstimate,
    pub rel_diff: f64,
    /// Combined relative standard error of `lhs − rhs`.
    pub rel_error: f64,
}

/// Compares `‖F‖^p_{p,(−ρ)^α}` with `C_fiber(m,α)·‖f‖^p_{p,η_{μ(α+m)}}`.
pub fn cylinder_norm_identity(
    f: &TestFunction,
    p: f64,
    params: &DomainParams,
    spec: &QuadratureSpec,
) -> Result<NormIdentity> {
    require_cylinder(f)?;
    check_exponent(p)?;
    let n = params.n();
    let weight = FockWeight::reduced(params);
    let proposal = function_norm_proposal(f.envelope(), n, p, weight.beta())?;
    let lhs = integrate_fbh_with(
        |z, w| Ok(C64::new(f.eval(z, w).norm().powf(p), 0.0)),
        params,
        spec,
        &proposal,
    )?;
    let base = integrate_fock_with(
        |z| Ok(C64::new(f.eval(z, &[]).norm().powf(p), 0.0)),
        &weight,
        spec,
        &proposal,
    )?;
    let c = params.fiber_constant();
    let rhs = McEstimate {
        value: base.value * c,
        std_error: base.std_error * c,
        samples: base.samples,
    };
    let scale = rhs.value.norm();
    Ok(NormIdentity {
        lhs,
        rhs,
        rel_diff: (lhs.value - rhs.value).norm() / scale,
        rel_error: lhs.std_error.hypot(rhs.std_error) / scale,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionIdentity {
    /// `P_D F` at `(x, 0)`.
    pub lhs: Vec<McEstimate>,
    /// `P_{ℂⁿ,η_{μ(α+m)}} f` at `x`.
    pub rhs: Vec<McEstimate>,
    /// Least-squares scalar with `lhs ≈ c_eff · rhs`.
    pub c_eff: f64,
    /// First-order propagation of the quadrature errors into `c_eff`.
    pub c_eff_error: f64,
}

/// Measures the constant relating `P_D F(·, 0)` to the Fock projection of `f`.
pub fn cylinder_projection_identity(
    f: &TestFunction,
    params: &DomainParams,
    spec: &QuadratureSpec,
    queries: &[Vec<C64>],
) -> Result<ProjectionIdentity> {
    require_cylinder(f)?;
    if queries.is_empty() {
        return Err(domain("at least one query point is required"));
    }
    let on_d = fbh_project(f, params, spec)?;
    let on_base = fock_project(f, &FockWeight::reduced(params), spec)?;
    let slice: Vec<PointPair> = queries
        .iter()
        .map(|x| PointPair::new(x.clone(), vec![C64::new(0.0, 0.0); params.m()]))
        .collect();
    let base: Vec<PointPair> = queries
        .iter()
        .map(|x| PointPair::new(x.clone(), Vec::new()))
        .collect();
    let lhs = on_d.evaluate_many(&slice)?;
    let rhs = on_base.evaluate_many(&base)?;
    let mut num = 0.0;
    let mut den = 0.0;
    for (l, r) in lhs.iter().zip(&rhs) {
        num += (r.value.conj() * l.value).re;
        den += r.value.norm_sqr();
    }
    if !(den > 0.0) {
        return Err(domain("projection vanishes at every query point"));
    }
    let c_eff = num / den;
    let c_eff_error = lhs
        .iter()
        .zip(&rhs)
        .map(|(l, r)| r.value.norm() * (l.std_error + c_eff.abs() * r.std_error))
        .sum::<f64>()
        / den;
    Ok(ProjectionIdentity {
        lhs,
        rhs,
        c_eff,
        c_eff_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubmeanCheck {
    /// `‖P_D F‖^p` over `D`.
    pub full_norm_p: f64,
    /// `C_fiber · ∫|P_D F(z,0)|^p η_{μ(α+m)}(z) dV(z)`.
    pub slice_bound_p: f64,
    pub full_error: f64,
    pub slice_error: f64,
    /// `full_norm_p ≥ slice_bound_p · (1 − 3·rel_error)`.
    pub ok: bool,
}

impl SubmeanCheck {
    pub fn rel_error(&self) -> f64 {
        self.full_error.hypot(self.slice_error) / self.slice_bound_p.abs()
    }
}

/// Checks the sub-mean-value lower bound for `P_D F`, `F` a cylinder function.
///
/// Both integrals share outer nodes (or samples); each outer node evaluates the
/// projection at `(z, w)` and at `(z, 0)` with the inner rule. Inner errors are
/// propagated to first order.
pub fn submean_lower_bound_check(
    f: &TestFunction,
    p: f64,
    params: &DomainParams,
    spec: &NestedSpec,
) -> Result<SubmeanCheck> {
    require_cylinder(f)?;
    check_exponent(p)?;
    let proj = fbh_project(f, params, &spec.inner)?;
    let zero = vec![C64::new(0.0, 0.0); params.m()];
    let proposal = projected_norm_proposal(f.envelope(), params.n(), p, params.base_beta())?;
    let [full, slice, full_prop, slice_prop] = integrate_fbh_multi(
        |z, w| {
            let a = proj.evaluate(z, w)?;
            let b = proj.evaluate(z, &zero)?;
            let (va, ea) = power_with_error(a, p);
            let (vb, eb) = power_with_error(b, p);
            Ok([va, vb, ea, eb].map(|x| C64::new(x, 0.0)))
        },
        params,
        &spec.outer,
        &proposal,
    )?;
    let full_error = full.std_error + full_prop.value.re.abs();
    let slice_error = slice.std_error + slice_prop.value.re.abs();
    let mut out = SubmeanCheck {
        full_norm_p: full.value.re,
        slice_bound_p: slice.value.re,
        full_error,
        slice_error,
        ok: false,
    };
    out.ok = out.full_norm_p >= out.slice_bound_p * (1.0 - 3.0 * out.rel_error());
    Ok(out)
}

/// `(|v|^p, p|v|^{p−1}·err)` for an estimate `v ± err`.
pub(crate) fn power_with_error(e: McEstimate, p: f64) -> (f64, f64) {
    let a = e.value.norm();
    (a.powf(p), p * a.powf(p - 1.0) * e.std_error)
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(domain(format!(
            "exponent p must be finite and at least 1, got {p}"
        )));
    }
    Ok(())
}

/// `∫ |P f|^p η_β` on ℂⁿ with the inner projection error propagated.
pub fn projected_lp_norm_pow_fock(
    proj: &ProjectedFunction,
    p: f64,
    weight: &FockWeight,
    spec: &QuadratureSpec,
    proposal: &Proposal,
) -> Result<McEstimate> {
    check_exponent(p)?;
    let [v, prop] = integrate_fock_multi(
        |x| {
            let (v, e) = power_with_error(proj.at(x)?, p);
            Ok([C64::new(v, 0.0), C64::new(e, 0.0)])
        },
        weight,
        spec,
        proposal,
    )?;
    Ok(McEstimate {
        value: v.value,
        std_error: v.std_error + prop.value.re.abs(),
        samples: v.samples,
    })
}

/// `∫_D |P F|^p (−ρ)^α` with the inner projection error propagated.
pub fn projected_lp_norm_pow_fbh(
    proj: &ProjectedFunction,
    p: f64,
    params: &DomainParams,
    spec: &QuadratureSpec,
    proposal: &Proposal,
) -> Result<McEstimate> {
    check_exponent(p)?;
    let [v, prop] = integrate_fbh_multi(
        |z, w| {
            let (v, e) = power_with_error(proj.evaluate(z, w)?, p);
            Ok([C64::new(v, 0.0), C64::new(e, 0.0)])
        },
        params,
        spec,
        proposal,
    )?;
    Ok(McEstimate {
        value: v.value,
        std_error: v.std_error + prop.value.re.abs(),
        samples: v.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_fock;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    fn light() -> QuadratureSpec {
        QuadratureSpec::tensor()
            .with_base_nodes(32, 24)
            .with_fiber_nodes(6, 16)
    }

    #[test]
    fn fock_projection_reproduces_monomials() {
        let w = FockWeight::new(1.0).unwrap();
        for k in 0..4 {
            let f = TestFunction::base(format!("y^{k}"), move |y| y[0].powu(k));
            let pf = fock_project(&f, &w, &QuadratureSpec::tensor()).unwrap();
            for x in [c(0.3, -0.2), c(-1.0, 0.5), c(1.5, 1.0)] {
                let v = pf.at(&[x]).unwrap();
                assert!(
                    (v.value - x.powu(k)).norm() < 1e-10 * (1.0 + x.norm().powi(k as i32)),
                    "k={k} x={x}"
                );
            }
        }
    }

    #[test]
    fn fock_projection_kills_conjugate() {
        let w = FockWeight::new(1.0).unwrap();
        let f = TestFunction::base("conj", |y| y[0].conj());
        let pf = fock_project(&f, &w, &QuadratureSpec::tensor()).unwrap();
        for x in [c(0.5, 0.0), c(-1.0, 2.0)] {
            assert!(pf.at(&[x]).unwrap().value.norm() < 1e-12);
        }
    }

    /// Brute-force polar quadrature of ∫ e^{βxȳ}(β/π) f(y) e^{-β|y|²} dA by
    /// composite midpoint in (r, θ) on a truncated disk.
    fn brute_projection(x: C64, beta: f64, f: impl Fn(C64) -> C64, r_max: f64) -> C64 {
        let (nr, nt) = (3000, 512);
        let dr = r_max / nr as f64;
        let dt = 2.0 * PI / nt as f64;
        let mut s = c(0.0, 0.0);
        for i in 0..nr {
            let r = (i as f64 + 0.5) * dr;
            for j in 0..nt {
                let y = C64::from_polar(r, (j as f64 + 0.5) * dt);
                s += (x * y.conj() * beta).exp() * f(y) * (-beta * r * r).exp() * r;
            }
        }
        s * dr * dt * beta / PI
    }

    #[test]
    fn fock_projection_of_bump_matches_brute_force() {
        let beta: f64 = 1.0;
        let (gamma, a) = (1.0, c(2.0, 0.0));
        let f = TestFunction::base("bump", move |y| {
            c((-gamma * (y[0] - a).norm_sqr()).exp(), 0.0)
        })
        .with_envelope(gamma, vec![a])
        .unwrap();
        let pf = fock_project(
            &f,
            &FockWeight::new(beta).unwrap(),
            &QuadratureSpec::tensor(),
        )
        .unwrap();
        for x in [c(0.0, 0.0), c(1.0, -0.5)] {
            let brute = brute_projection(
                x,
                beta,
                |y| c((-gamma * (y - a).norm_sqr()).exp(), 0.0),
                8.0,
            );
            let v = pf.at(&[x]).unwrap();
            assert!(rel(v.value, brute) < 1e-6, "{} vs {brute}", v.value);
            // A e^{λx+κ} with A = 1/2, λ = 1, κ = -2
            let closed = (x - 2.0).exp() * 0.5;
            assert!(rel(v.value, closed) < 1e-12);
        }
    }

    #[test]
    fn fock_projection_mc_agrees_within_errors() {
        let w = FockWeight::new(1.0).unwrap();
        let a = c(1.0, 1.0);
        let f = TestFunction::base("bump", move |y| c((-(y[0] - a).norm_sqr()).exp(), 0.0))
            .with_envelope(1.0, vec![a])
            .unwrap();
        let pf = fock_project(&f, &w, &QuadratureSpec::monte_carlo(50_000, 7)).unwrap();
        let x = c(0.5, 0.2);
        let v = pf.at(&[x]).unwrap();
        let closed = (x * a.conj() * 0.5 - a.norm_sqr() * 0.5).exp() * 0.5;
        assert!(v.z_score(closed) < 4.0);
    }

    #[test]
    fn fbh_projection_reproduces_low_monomials() {
        let params = DomainParams::new(1, 1, 1.0, 0.5).unwrap();
        let spec = light();
        let queries = [
            PointPair::new(vec![c(0.3, 0.1)], vec![c(0.2, -0.3)]),
            PointPair::new(vec![c(-0.8, 0.4)], vec![c(0.1, 0.25)]),
        ];
        for (p, q) in [(0u32, 0u32), (1, 0), (0, 1), (2, 1), (1, 2)] {
            let f = TestFunction::on_domain(format!("z^{p}w^{q}"), move |z, w| {
                z[0].powu(p) * w[0].powu(q)
            });
            let pf = fbh_project(&f, &params, &spec).unwrap();
            for (pt, v) in queries.iter().zip(pf.evaluate_many(&queries).unwrap()) {
                let exact = pt.z[0].powu(p) * pt.w[0].powu(q);
                assert!(
                    (v.value - exact).norm() <= 1e-6 * exact.norm().max(1e-3),
                    "p={p} q={q} {v:?} {exact}"
                );
            }
        }
    }

    #[test]
    fn fbh_projection_kills_fiber_conjugate() {
        let params = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        let f = TestFunction::on_domain("conj w", |_, w| w[0].conj());
        let pf = fbh_project(&f, &params, &light()).unwrap();
        let v = pf.evaluate(&[c(0.2, 0.1)], &[c(0.3, 0.3)]).unwrap();
        assert!(v.value.norm() < 1e-12, "{v:?}");
    }

    #[test]
    fn fbh_projection_rejects_exterior_queries() {
        let params = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        let f = TestFunction::base("one", |_| c(1.0, 0.0));
        let pf = fbh_project(&f, &params, &light()).unwrap();
        assert!(matches!(
            pf.evaluate(&[c(1.0, 0.0)], &[c(0.9, 0.0)]),
            Err(Error::OutsideDomain { .. })
        ));
        let fock = fock_project(&f, &FockWeight::new(1.0).unwrap(), &light()).unwrap();
        assert!(fock.evaluate(&[c(1.0, 0.0)], &[c(0.1, 0.0)]).is_err());
    }

    #[test]
    fn projected_function_is_holomorphic() {
        let params = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        let a = c(1.0, 0.0);
        let f = TestFunction::base("bump", move |z| c((-(z[0] - a).norm_sqr()).exp(), 0.0))
            .with_envelope(1.0, vec![a])
            .unwrap();
        let pf = fbh_project(&f, &params, &light()).unwrap();
        let h = 1e-4;
        let (z0, w0) = (c(0.2, 0.3), c(0.1, -0.2));
        let at = |dz: C64| pf.evaluate(&[z0 + dz], &[w0]).unwrap();
        let (fx, fy) = (at(c(h, 0.0)), at(c(0.0, h)));
        let (bx, by) = (at(c(-h, 0.0)), at(c(0.0, -h)));
        // ∂/∂z̄ = (∂x + i∂y)/2
        let dbar = ((fx.value - bx.value) + (fy.value - by.value) * c(0.0, 1.0)) / (4.0 * h);
        let scale = [fx, fy, bx, by]
            .iter()
            .map(|e| e.std_error)
            .fold(0.0, f64::max)
            / h;
        assert!(dbar.norm() <= scale.max(1e-9), "{dbar}");
    }

    #[test]
    fn cylinder_norm_identity_examples() {
        let params = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        let one = TestFunction::base("one", |_| c(1.0, 0.0));
        let r = cylinder_norm_identity(&one, 2.0, &params, &QuadratureSpec::tensor()).unwrap();
        assert!((r.lhs.value.re - PI * PI).abs() < 1e-12);
        assert!((r.rhs.value.re - PI * PI).abs() < 1e-12);

        let z = TestFunction::base("z", |z| z[0]);
        let r = cylinder_norm_identity(&z, 2.0, &params, &QuadratureSpec::monte_carlo(200_000, 11))
            .unwrap();
        assert!(r.rel_diff < 3.0 * r.rel_error, "{r:?}");
        // ‖z‖² = C_fiber·π/β'² = π²
        assert!((r.rhs.value.re - PI * PI).abs() < 4.0 * r.rhs.std_error);

        let g = TestFunction::base("gauss", |z| c((-z[0].norm_sqr()).exp(), 0.0))
            .with_envelope(1.0, vec![c(0.0, 0.0)])
            .unwrap();
        let r = cylinder_norm_identity(&g, 1.0, &params, &QuadratureSpec::monte_carlo(200_000, 12))
            .unwrap();
        assert!(r.rel_diff < 3.0 * r.rel_error + 1e-12, "{r:?}");
        let t = cylinder_norm_identity(&g, 1.0, &params, &QuadratureSpec::tensor()).unwrap();
        assert!((t.lhs.value.re - PI * PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn cylinder_identity_rejects_non_cylinder() {
        let params = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        let f = TestFunction::on_domain("w", |_, w| w[0]);
        assert!(cylinder_norm_identity(&f, 2.0, &params, &light()).is_err());
    }

    #[test]
    fn c_eff_is_one_for_trivial_and_gaussian_inputs() {
        let params = DomainParams::new(1, 1, 1.0, 0.5).unwrap();
        let xs = vec![vec![c(0.0, 0.0)], vec![c(0.5, -0.3)], vec![c(1.2, 0.4)]];
        let one = TestFunction::base("one", |_| c(1.0, 0.0));
        let r = cylinder_projection_identity(&one, &params, &light(), &xs).unwrap();
        assert!((r.c_eff - 1.0).abs() < 1e-12);
        let a = c(2.0, 0.0);
        let g = TestFunction::base("bump", move |z| c((-(z[0] - a).norm_sqr()).exp(), 0.0))
            .with_envelope(1.0, vec![a])
            .unwrap();
        let r = cylinder_projection_identity(&g, &params, &QuadratureSpec::tensor(), &xs).unwrap();
        assert!((r.c_eff - 1.0).abs() < 1e-3, "{r:?}");
        // rhs against closed form with β' = 1.5: A = 0.6, λ = 1.2, κ = -2.4
        for (x, v) in xs.iter().zip(&r.rhs) {
            let closed = (x[0] * 1.2 - 2.4).exp() * 0.6;
            assert!(rel(v.value, closed) < 1e-10);
        }
    }

    #[test]
    fn submean_bound_holds_with_equality_for_constants() {
        let params = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        let spec = NestedSpec {
            inner: light(),
            outer: QuadratureSpec::monte_carlo(64, 3),
        };
        let one = TestFunction::base("one", |_| c(1.0, 0.0));
        let r = submean_lower_bound_check(&one, 2.0, &params, &spec).unwrap();
        assert!(r.ok);
        assert!(
            (r.full_norm_p - r.slice_bound_p).abs() < 1e-10 * r.slice_bound_p,
            "{r:?}"
        );
        assert!((r.full_norm_p - PI * PI).abs() < 1e-9);
        let z = TestFunction::base("z", |z| z[0]);
        let r = submean_lower_bound_check(&z, 2.0, &params, &spec).unwrap();
        assert!(r.ok);
        assert!((r.full_norm_p - r.slice_bound_p).abs() <= 3.0 * r.full_error.hypot(r.slice_error));
    }

    #[test]
    fn analytic_l2_contraction_of_bump() {
        // ‖Pf‖₂² = A² e^{2κ} π/β e^{|λ|²/β}, ‖f‖₂² = π/(2γ+β) e^{-2γβ|a|²/(2γ+β)}
        let beta: f64 = 1.0;
        for gamma in [0.1f64, 1.0, 10.0] {
            for a in [0.0f64, 1.0, 3.0] {
                let big_a = beta / (gamma + beta);
                let lam = beta * gamma * a / (gamma + beta);
                let kappa = -beta * gamma * a * a / (gamma + beta);
                let pf = big_a * big_a * (2.0 * kappa).exp() * PI / beta * (lam * lam / beta).exp();
                let f = PI / (2.0 * gamma + beta)
                    * (-2.0 * gamma * beta * a * a / (2.0 * gamma + beta)).exp();
                assert!(pf <= f * (1.0 + 1e-12));
            }
        }
        // and the quadrature norm of P f agrees
        let w = FockWeight::new(beta).unwrap();
        let a = c(1.0, 0.0);
        let f = TestFunction::base("bump", move |y| c((-(y[0] - a).norm_sqr()).exp(), 0.0))
            .with_envelope(1.0, vec![a])
            .unwrap();
        let pf = fock_project(&f, &w, &QuadratureSpec::tensor()).unwrap();
        let prop = projected_norm_proposal(f.envelope(), 1, 2.0, beta).unwrap();
        let num =
            projected_lp_norm_pow_fock(&pf, 2.0, &w, &QuadratureSpec::tensor(), &prop).unwrap();
        let den = integrate_fock(
            |y| Ok(c((-2.0 * (y[0] - a).norm_sqr()).exp(), 0.0)),
            &w,
            1,
            &QuadratureSpec::tensor(),
        )
        .unwrap();
        assert!(num.value.re <= den.value.re * (1.0 + 1e-6));
        let closed = 0.25 * (-1.0f64).exp() * PI * (0.25f64).exp();
        assert!((num.value.re - closed).abs() < 1e-10 * closed);
        assert_eq!(
            num.samples,
            QuadratureSpec::tensor().radial_nodes * QuadratureSpec::tensor().angular_nodes
        );
    }

    #[test]
    fn idempotence_on_projected_gaussian() {
        let w = FockWeight::new(1.0).unwrap();
        // P(e^{-|y-2|²}) = ½ e^{x-2}
        let pf = TestFunction::base("projected bump", |y| (y[0] - 2.0).exp() * 0.5);
        let again = fock_project(&pf, &w, &QuadratureSpec::tensor()).unwrap();
        for x in [c(0.0, 0.0), c(0.5, 0.5), c(-1.0, 0.3)] {
            let v = again.at(&[x]).unwrap();
            let orig = (x - 2.0).exp() * 0.5;
            assert!((v.value - orig).norm() <= 5.0 * v.std_error.max(1e-14 * orig.norm()));
        }
    }

    #[test]
    fn provenance_is_recorded() {
        let params = DomainParams::new(1, 1, 1.0, 0.0).unwrap();
        let f = TestFunction::base("one", |_| c(1.0, 0.0));
        let pf = fbh_project(&f, &params, &light()).unwrap();
        assert_eq!(pf.provenance().source_id, "one");
        assert_eq!(pf.provenance().target, ProjectionTarget::Domain(params));
        assert_eq!(pf.provenance().spec.engine, Engine::TensorGauss);
    }
}
