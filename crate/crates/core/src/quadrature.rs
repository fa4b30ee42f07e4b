//! Integration over ℂⁿ against `η_β` and over `D` against `(−ρ)^α`.
//!
//! Two engines:
//!
//! * `TensorGauss` (n = 1 for ℂⁿ, n = m = 1 for `D`): polar coordinates on the
//!   base with Gauss–Laguerre in `σ = τ|u|²` and the periodic trapezoid in the
//!   angle; on the fiber, Gauss–Jacobi in the normalized radius
//!   `x = e^{μ|z|²}|w|²` with weight `(1−x)^α` and the trapezoid in the phase.
//!   The reported error is the difference to a rule with three quarters of the
//!   nodes in every direction, floored at the rounding level.
//! * `MonteCarlo`: the base variable is drawn from a complex Gaussian (the
//!   proposal), the fiber exactly from the normalized weight, which is a
//!   uniform direction times `R·√X` with `X ~ Beta(m, α+1)`.
//!
//! Both engines accept a Gaussian [`Proposal`] for the base variable; the default
//! is centered at the origin with the precision of the weight itself, which makes
//! `f ≡ 1` exact. Monte-Carlo runs are split into fixed chunks of
//! [`MC_CHUNK`] samples; chunk `c` draws from ChaCha8 stream `c` keyed by the seed,
//! and chunk statistics are merged in chunk order, so results depend only on
//! `(seed, mc_samples)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution, StandardNormal};
use rayon::prelude::*;

use crate::domain::{classify, DomainParams, Membership, PointPair};
use crate::error::{domain, Error, Result};
use crate::kernels::FockWeight;
use crate::math::{norm_sq, ComplexSum, C64};
use crate::rules::{gauss_jacobi_unit, gauss_laguerre, periodic_trapezoid, Rule};

/// Samples per Monte-Carlo chunk.
pub const MC_CHUNK: usize = 4096;

/// Default seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5eed_f0c5_b4a6_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    TensorGauss,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub engine: Engine,
    pub mc_samples: usize,
    pub seed: u64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub jacobi_nodes: usize,
    pub phase_nodes: usize,
}

impl QuadratureSpec {
    pub fn tensor() -> Self {
        QuadratureSpec {
            engine: Engine::TensorGauss,
            ..Self::default()
        }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        QuadratureSpec {
            engine: Engine::MonteCarlo,
            mc_samples: samples,
            seed,
            ..Self::default()
        }
    }

    pub fn with_base_nodes(mut self, radial: usize, angular: usize) -> Self {
        self.radial_nodes = radial;
        self.angular_nodes = angular;
        self
    }

    pub fn with_fiber_nodes(mut self, jacobi: usize, phase: usize) -> Self {
        self.jacobi_nodes = jacobi;
        self.phase_nodes = phase;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.mc_samples == 0 {
            return Err(domain("mc_samples must be at least 1"));
        }
        if [
            self.radial_nodes,
            self.angular_nodes,
            self.jacobi_nodes,
            self.phase_nodes,
        ]
        .iter()
        .any(|&k| k < 2)
        {
            return Err(domain("node counts must be at least 2"));
        }
        Ok(())
    }

    fn coarse(&self) -> Self {
        let shrink = |k: usize| ((3 * k).div_ceil(4)).max(2);
        QuadratureSpec {
            radial_nodes: shrink(self.radial_nodes),
            angular_nodes: shrink(self.angular_nodes),
            jacobi_nodes: shrink(self.jacobi_nodes),
            phase_nodes: shrink(self.phase_nodes),
            ..*self
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            engine: Engine::MonteCarlo,
            mc_samples: 100_000,
            seed: DEFAULT_SEED,
            radial_nodes: 64,
            angular_nodes: 32,
            jacobi_nodes: 48,
            phase_nodes: 32,
        }
    }
}

/// Result of a numerical integration.
///
/// For Monte-Carlo, `std_error` is the sample standard deviation of the
/// per-sample contributions over `√samples` (real and imaginary variances
/// summed); for the tensor engine it is the embedded error estimate and
/// `samples` is the number of nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: C64,
    pub std_error: f64,
    pub samples: usize,
}

impl McEstimate {
    /// `|value − expected| / std_error`.
    pub fn z_score(&self, expected: C64) -> f64 {
        (self.value - expected).norm() / self.std_error
    }

    pub fn rel_error(&self) -> f64 {
        self.std_error / self.value.norm()
    }
}

/// Gaussian importance density `(τ/π)ⁿ exp(−τ‖z − c‖²)` for the base variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    center: Vec<C64>,
    precision: f64,
}

impl Proposal {
    pub fn new(center: Vec<C64>, precision: f64) -> Result<Self> {
        if !(precision > 0.0) || !precision.is_finite() {
            return Err(domain(format!(
                "proposal precision must be positive, got {precision}"
            )));
        }
        if center
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(domain("proposal center must be finite"));
        }
        Ok(Proposal { center, precision })
    }

    pub fn center(&self) -> &[C64] {
        &self.center
    }

    pub fn precision(&self) -> f64 {
        self.precision
    }

    /// The proposal that coincides with `η_β` itself.
    pub fn standard(n: usize, beta: f64) -> Self {
        Proposal {
            center: vec![C64::new(0.0, 0.0); n],
            precision: beta,
        }
    }

    fn is_standard_for(&self, beta: f64) -> bool {
        self.precision == beta && self.center.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// `ln[(π/τ)ⁿ · η_β(z) / exp(−τ‖z−c‖²)]` for a base point `z = c + u`.
    #[inline]
    fn log_weight_ratio(&self, beta: f64, z: &[C64], u_norm_sq: f64, standard: bool) -> f64 {
        let n = z.len() as f64;
        let scale = n * (PI / self.precision).ln();
        if standard {
            scale
        } else {
            scale - beta * norm_sq(z) + self.precision * u_norm_sq
        }
    }
}

// ---------------------------------------------------------------------------
// Rule cache

#[derive(Hash, PartialEq, Eq, Clone, Copy)]
enum RuleKey {
    Laguerre(usize),
    Jacobi(usize, u64, u64),
    Trapezoid(usize),
}

fn cached_rule(key: RuleKey) -> Result<Arc<Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<Rule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&key) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(match key {
        RuleKey::Laguerre(n) => gauss_laguerre(n, 0.0)?,
        RuleKey::Jacobi(n, a, b) => gauss_jacobi_unit(n, f64::from_bits(a), f64::from_bits(b))?,
        RuleKey::Trapezoid(n) => periodic_trapezoid(n)?,
    });
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(key, rule.clone());
    Ok(rule)
}

/// Shared periodic trapezoid rule with `n` nodes.
pub(crate) fn trapezoid(n: usize) -> Result<Arc<Rule>> {
    cached_rule(RuleKey::Trapezoid(n))
}

// ---------------------------------------------------------------------------
// Public entry points

/// `∫_{ℂⁿ} f(z) η_β(z) dV(z)`.
pub fn integrate_fock<F>(
    f: F,
    weight: &FockWeight,
    n: usize,
    spec: &QuadratureSpec,
) -> Result<McEstimate>
where
    F: Fn(&[C64]) -> Result<C64> + Sync,
{
    let proposal = Proposal::standard(n, weight.beta());
    integrate_fock_with(f, weight, spec, &proposal)
}

/// [`integrate_fock`] with an explicit base proposal; `n` is the proposal's dimension.
pub fn integrate_fock_with<F>(
    f: F,
    weight: &FockWeight,
    spec: &QuadratureSpec,
    proposal: &Proposal,
) -> Result<McEstimate>
where
    F: Fn(&[C64]) -> Result<C64> + Sync,
{
    let [e] = integrate_fock_multi(|z| Ok([f(z)?]), weight, spec, proposal)?;
    Ok(e)
}

/// Vector-valued version: all components share the same nodes or samples.
pub fn integrate_fock_multi<const K: usize, F>(
    f: F,
    weight: &FockWeight,
    spec: &QuadratureSpec,
    proposal: &Proposal,
) -> Result<[McEstimate; K]>
where
    F: Fn(&[C64]) -> Result<[C64; K]> + Sync,
{
    spec.validate()?;
    let n = proposal.center.len();
    if n == 0 {
        return Err(domain("base dimension must be positive"));
    }
    let beta = weight.beta();
    match spec.engine {
        Engine::MonteCarlo => mc_run(spec, |rng| {
            let (z, u2) = draw_base(rng, proposal);
            let lw = proposal.log_weight_ratio(beta, &z, u2, proposal.is_standard_for(beta));
            let vals = f(&z)?;
            Ok(vals.map(|v| v * lw.exp()))
        }),
        Engine::TensorGauss => {
            if n != 1 {
                return Err(Error::Unsupported(format!(
                    "tensor engine on the base requires n = 1, got n = {n}"
                )));
            }
            tensor_with_estimate(spec, |s| tensor_base(s, beta, proposal, &f))
        }
    }
}

/// One weighted draw from `D`: base from the standard proposal, fiber exact.
#[derive(Debug, Clone, PartialEq)]
pub struct FbhSample {
    pub point: PointPair,
    /// Normalized fiber radius `‖w‖²/R(z)²`.
    pub fiber_fraction: f64,
}

/// Draws `(z, w)` with density proportional to `(−ρ)^α` on `D`.
///
/// `z` is complex Gaussian with parameter `μ(α+m)`; `w` is a uniform direction
/// times `R(z)√X`, `X ~ Beta(m, α+1)`. Averages of `f` over draws times
/// [`fbh_normalization`] estimate `∫_D f (−ρ)^α dV`. Boundary draws are rejected.
pub fn sample_fbh_weighted<R: Rng + ?Sized>(params: &DomainParams, rng: &mut R) -> FbhSample {
    let proposal = Proposal::standard(params.n(), params.base_beta());
    let beta_law = fiber_law(params);
    let (z, _) = draw_base(rng, &proposal);
    let (w, x) = draw_fiber(rng, params, &z, &beta_law);
    FbhSample {
        point: PointPair::new(z, w),
        fiber_fraction: x,
    }
}

/// `(π/(μ(α+m)))ⁿ · C_fiber(m, α)`: the weighted volume of `D`.
pub fn fbh_normalization(params: &DomainParams) -> f64 {
    (PI / params.base_beta()).powi(params.n() as i32) * params.fiber_constant()
}

/// `∫_D f(z, w) (−ρ(z, w))^α dV(z, w)`.
pub fn integrate_fbh<F>(f: F, params: &DomainParams, spec: &QuadratureSpec) -> Result<McEstimate>
where
    F: Fn(&[C64], &[C64]) -> Result<C64> + Sync,
{
    let proposal = Proposal::standard(params.n(), params.base_beta());
    integrate_fbh_with(f, params, spec, &proposal)
}

/// [`integrate_fbh`] with an explicit proposal for the base variable.
pub fn integrate_fbh_with<F>(
    f: F,
    params: &DomainParams,
    spec: &QuadratureSpec,
    proposal: &Proposal,
) -> Result<McEstimate>
where
    F: Fn(&[C64], &[C64]) -> Result<C64> + Sync,
{
    let [e] = integrate_fbh_multi(|z, w| Ok([f(z, w)?]), params, spec, proposal)?;
    Ok(e)
}

/// Vector-valued version of [`integrate_fbh_with`].
pub fn integrate_fbh_multi<const K: usize, F>(
    f: F,
    params: &DomainParams,
    spec: &QuadratureSpec,
    proposal: &Proposal,
) -> Result<[McEstimate; K]>
where
    F: Fn(&[C64], &[C64]) -> Result<[C64; K]> + Sync,
{
    spec.validate()?;
    if proposal.center.len() != params.n() {
        return Err(Error::LengthMismatch {
            expected: params.n(),
            actual: proposal.center.len(),
        });
    }
    let beta = params.base_beta();
    let c_fiber = params.fiber_constant();
    let standard = proposal.is_standard_for(beta);
    match spec.engine {
        Engine::MonteCarlo => {
            let law = fiber_law(params);
            mc_run(spec, |rng| {
                let (z, u2) = draw_base(rng, proposal);
                let (w, _) = draw_fiber(rng, params, &z, &law);
                let scale = c_fiber * proposal.log_weight_ratio(beta, &z, u2, standard).exp();
                Ok(f(&z, &w)?.map(|v| v * scale))
            })
        }
        Engine::TensorGauss => tensor_fbh_circles(
            |z, radius, nphi| {
                let phase = cached_rule(RuleKey::Trapezoid(nphi))?;
                let mut acc = [ComplexSum::default(); K];
                let mut w = [C64::new(0.0, 0.0)];
                for &phi in &phase.nodes {
                    w[0] = C64::from_polar(radius, phi);
                    for (a, v) in acc.iter_mut().zip(f(z, &w)?) {
                        a.add(v);
                    }
                }
                Ok(acc.map(|a| a.value() / nphi as f64))
            },
            params,
            spec,
            proposal,
        ),
    }
}

/// Tensor rule on `D` (n = m = 1) for integrands supplied as circle averages.
///
/// `g(z, r, n_φ)` must return `(1/2π)∫ h(z, r e^{iφ}) dφ`, resolved with `n_φ`
/// phase samples; the driver handles the base rule and the Gauss–Jacobi rule in
/// `x = r²/R(z)²`, and halves `n_φ` with the other counts for the error estimate.
pub fn tensor_fbh_circles<const K: usize, G>(
    g: G,
    params: &DomainParams,
    spec: &QuadratureSpec,
    proposal: &Proposal,
) -> Result<[McEstimate; K]>
where
    G: Fn(&[C64], f64, usize) -> Result<[C64; K]> + Sync,
{
    spec.validate()?;
    if params.n() != 1 || params.m() != 1 {
        return Err(Error::Unsupported(format!(
            "tensor engine on D requires n = m = 1, got n = {}, m = {}",
            params.n(),
            params.m()
        )));
    }
    if proposal.center.len() != 1 {
        return Err(Error::LengthMismatch {
            expected: 1,
            actual: proposal.center.len(),
        });
    }
    let beta = params.base_beta();
    tensor_with_estimate(spec, |s| {
        let jac = cached_rule(RuleKey::Jacobi(
            s.jacobi_nodes,
            params.alpha().to_bits(),
            0f64.to_bits(),
        ))?;
        tensor_base(s, beta, proposal, |z| {
            // C_fiber · E[f(z, ·)] = π Σ w_x ⟨f⟩_{circle of radius R√x}
            let radius = (-0.5 * params.mu() * norm_sq(z)).exp();
            let mut acc = [ComplexSum::default(); K];
            for (&x, &wx) in jac.nodes.iter().zip(&jac.weights) {
                for (a, v) in acc.iter_mut().zip(g(z, radius * x.sqrt(), s.phase_nodes)?) {
                    a.add(v * (PI * wx));
                }
            }
            Ok(acc.map(|a| a.value()))
        })
    })
}

// ---------------------------------------------------------------------------
// Monte-Carlo machinery

/// RNG for chunk `chunk` of a run keyed by `seed`.
pub fn stream_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Running mean/M2 for one real component.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let d = x - self.mean;
        self.mean += d / self.count;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let d = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + d * other.count / count,
            m2: self.m2 + other.m2 + d * d * self.count * other.count / count,
        }
    }
}

fn mc_run<const K: usize, S>(spec: &QuadratureSpec, sample: S) -> Result<[McEstimate; K]>
where
    S: Fn(&mut ChaCha8Rng) -> Result<[C64; K]> + Sync,
{
    let total = spec.mc_samples;
    let chunks = total.div_ceil(MC_CHUNK);
    let per_chunk: Vec<Result<[(Moments, Moments); K]>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(spec.seed, c as u64);
            let start = c * MC_CHUNK;
            let end = (start + MC_CHUNK).min(total);
            let mut acc = [(Moments::default(), Moments::default()); K];
            for index in start..end {
                let vals = sample(&mut rng)?;
                for (a, v) in acc.iter_mut().zip(vals) {
                    if !v.re.is_finite() || !v.im.is_finite() {
                        return Err(Error::Evaluation {
                            index,
                            reason: format!("non-finite contribution {v}"),
                        });
                    }
                    a.0.push(v.re);
                    a.1.push(v.im);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut merged = [(Moments::default(), Moments::default()); K];
    for chunk in per_chunk {
        for (m, c) in merged.iter_mut().zip(chunk?) {
            m.0 = m.0.merge(c.0);
            m.1 = m.1.merge(c.1);
        }
    }
    Ok(merged.map(|(re, im)| {
        let n = re.count;
        let std_error = if n > 1.0 {
            ((re.m2 + im.m2) / (n - 1.0)).sqrt() / n.sqrt()
        } else {
            f64::INFINITY
        };
        McEstimate {
            value: C64::new(re.mean, im.mean),
            std_error,
            samples: total,
        }
    }))
}

/// Draws `z = c + u` from the proposal; returns `(z, ‖u‖²)`.
fn draw_base<R: Rng + ?Sized>(rng: &mut R, proposal: &Proposal) -> (Vec<C64>, f64) {
    let sd = (0.5 / proposal.precision).sqrt();
    let mut u2 = 0.0;
    let z = proposal
        .center
        .iter()
        .map(|c| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let u = C64::new(re * sd, im * sd);
            u2 += u.norm_sqr();
            c + u
        })
        .collect();
    (z, u2)
}

fn fiber_law(params: &DomainParams) -> Beta<f64> {
    Beta::new(params.m() as f64, params.alpha() + 1.0).expect("validated shape parameters")
}

/// Exact draw from the normalized fiber weight; returns `(w, ‖w‖²/R²)`.
fn draw_fiber<R: Rng + ?Sized>(
    rng: &mut R,
    params: &DomainParams,
    z: &[C64],
    law: &Beta<f64>,
) -> (Vec<C64>, f64) {
    let r2 = (-params.mu() * norm_sq(z)).exp();
    loop {
        let x = law.sample(rng);
        let mut dir: Vec<C64> = (0..params.m())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let len = norm_sq(&dir).sqrt();
        if !(len > 0.0) {
            continue;
        }
        let scale = (r2 * x).sqrt() / len;
        for d in dir.iter_mut() {
            *d *= scale;
        }
        let rho = norm_sq(&dir) - r2;
        if classify(rho, norm_sq(&dir)) == Membership::Interior {
            return (dir, x);
        }
    }
}

// ---------------------------------------------------------------------------
// Tensor machinery

fn tensor_with_estimate<const K: usize, T>(spec: &QuadratureSpec, run: T) -> Result<[McEstimate; K]>
where
    T: Fn(&QuadratureSpec) -> Result<([C64; K], [f64; K], usize)>,
{
    let (fine, magnitude, nodes) = run(spec)?;
    let (coarse, _, _) = run(&spec.coarse())?;
    let mut out = [McEstimate {
        value: C64::new(0.0, 0.0),
        std_error: 0.0,
        samples: nodes,
    }; K];
    for k in 0..K {
        let floor = 50.0 * f64::EPSILON * magnitude[k];
        out[k] = McEstimate {
            value: fine[k],
            std_error: (fine[k] - coarse[k]).norm().max(floor),
            samples: nodes,
        };
    }
    Ok(out)
}

/// Polar tensor rule on ℂ¹ for `∫ g(z) η_β(z) dA(z)` with proposal `(c, τ)`.
/// Returns the K sums, the sums of absolute contributions, and the node count
/// (counting one per base node).
fn tensor_base<const K: usize, G>(
    spec: &QuadratureSpec,
    beta: f64,
    proposal: &Proposal,
    g: G,
) -> Result<([C64; K], [f64; K], usize)>
where
    G: Fn(&[C64]) -> Result<[C64; K]> + Sync,
{
    let lag = cached_rule(RuleKey::Laguerre(spec.radial_nodes))?;
    let ang = cached_rule(RuleKey::Trapezoid(spec.angular_nodes))?;
    let tau = proposal.precision;
    let center = proposal.center[0];
    let standard = proposal.is_standard_for(beta);
    let rows: Vec<Result<([ComplexSum; K], [f64; K])>> = lag
        .nodes
        .par_iter()
        .zip(lag.weights.par_iter())
        .map(|(&sigma, &ws)| {
            let mut acc = [ComplexSum::default(); K];
            let mut mag = [0.0; K];
            let radius = (sigma / tau).sqrt();
            let mut z = [C64::new(0.0, 0.0)];
            for (&theta, &wt) in ang.nodes.iter().zip(&ang.weights) {
                let u = C64::from_polar(radius, theta);
                z[0] = center + u;
                let log_ratio = if standard {
                    0.0
                } else {
                    -beta * z[0].norm_sqr() + tau * u.norm_sqr()
                };
                let weight = ws * wt / (2.0 * tau) * log_ratio.exp();
                let vals = g(&z)?;
                for k in 0..K {
                    let v = vals[k] * weight;
                    if !v.re.is_finite() || !v.im.is_finite() {
                        return Err(Error::Evaluation {
                            index: 0,
                            reason: format!("non-finite tensor contribution at z = {}", z[0]),
                        });
                    }
                    acc[k].add(v);
                    mag[k] += v.norm();
                }
            }
            Ok((acc, mag))
        })
        .collect();
    let mut total = [ComplexSum::default(); K];
    let mut magnitude = [0.0; K];
    for row in rows {
        let (acc, mag) = row?;
        for k in 0..K {
            total[k].add(acc[k].value());
            magnitude[k] += mag[k];
        }
    }
    Ok((
        total.map(|t| t.value()),
        magnitude,
        spec.radial_nodes * spec.angular_nodes,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::fiber_weight_integral;
    use crate::kernels::monomial_norm_sq;
    use crate::math::MultiIndex;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn params(mu: f64, alpha: f64) -> DomainParams {
        DomainParams::new(1, 1, mu, alpha).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        assert!(QuadratureSpec::monte_carlo(0, 1).validate().is_err());
        assert!(QuadratureSpec::tensor()
            .with_base_nodes(1, 4)
            .validate()
            .is_err());
    }

    #[test]
    fn fock_constant_and_radial() {
        let w = FockWeight::new(1.0).unwrap();
        for spec in [
            QuadratureSpec::tensor(),
            QuadratureSpec::monte_carlo(20_000, 3),
        ] {
            let one = integrate_fock(|_| Ok(c(1.0, 0.0)), &w, 1, &spec).unwrap();
            assert!((one.value - c(PI, 0.0)).norm() < 1e-12);
            let r2 = integrate_fock(|z| Ok(c(z[0].norm_sqr(), 0.0)), &w, 1, &spec).unwrap();
            assert!(
                (r2.value.re - PI).abs() <= 4.0 * r2.std_error.max(1e-13),
                "{r2:?}"
            );
        }
    }

    #[test]
    fn fock_odd_integrand_vanishes() {
        for beta in [0.5, 2.0] {
            let w = FockWeight::new(beta).unwrap();
            let e = integrate_fock(|z| Ok(z[0]), &w, 1, &QuadratureSpec::monte_carlo(50_000, 9))
                .unwrap();
            assert!(e.value.norm() <= 3.0 * e.std_error);
            let t = integrate_fock(|z| Ok(z[0]), &w, 1, &QuadratureSpec::tensor()).unwrap();
            assert!(t.value.norm() < 1e-14);
        }
    }

    #[test]
    fn tensor_exact_degree_on_gaussian() {
        // ∫|z|^{2j} e^{-β|z|²} dA = π j!/β^{j+1}
        let beta = 1.3;
        let w = FockWeight::new(beta).unwrap();
        for k in [4usize, 8, 16] {
            let spec = QuadratureSpec::tensor().with_base_nodes(k, 4);
            for j in 0..(2 * k as i32) {
                let e =
                    integrate_fock(|z| Ok(c(z[0].norm_sqr().powi(j), 0.0)), &w, 1, &spec).unwrap();
                let log_fact: f64 = (2..=j).map(|i| f64::from(i).ln()).sum();
                let exact = (PI.ln() + log_fact - f64::from(j + 1) * beta.ln()).exp();
                assert!((e.value.re - exact).abs() <= 1e-12 * exact, "k={k} j={j}");
            }
        }
    }

    #[test]
    fn shifted_proposal_is_unbiased() {
        let w = FockWeight::new(1.0).unwrap();
        let a = c(3.0, -1.0);
        let f = |z: &[C64]| Ok(c((-(z[0] - a).norm_sqr()).exp(), 0.0));
        // ∫ e^{-|z-a|²} e^{-|z|²} = (π/2) e^{-|a|²/2}
        let exact = PI / 2.0 * (-a.norm_sqr() / 2.0).exp();
        let prop = Proposal::new(vec![a / 2.0], 2.0).unwrap();
        let t = integrate_fock_with(f, &w, &QuadratureSpec::tensor(), &prop).unwrap();
        assert!((t.value.re - exact).abs() < 1e-13 * exact);
        let m = integrate_fock_with(f, &w, &QuadratureSpec::monte_carlo(1000, 1), &prop).unwrap();
        assert!((m.value.re - exact).abs() < 1e-12 * exact);
        let plain = integrate_fock(f, &w, 1, &QuadratureSpec::monte_carlo(200_000, 1)).unwrap();
        assert!((plain.value.re - exact).abs() < 4.0 * plain.std_error);
    }

    #[test]
    fn tensor_requires_low_dimension() {
        let w = FockWeight::new(1.0).unwrap();
        let err =
            integrate_fock(|_| Ok(c(1.0, 0.0)), &w, 2, &QuadratureSpec::tensor()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
        let p = DomainParams::new(1, 2, 1.0, 0.0).unwrap();
        let err = integrate_fbh(|_, _| Ok(c(1.0, 0.0)), &p, &QuadratureSpec::tensor()).unwrap_err();
        assert!(matches!(err, Error::Unsupported(_)));
    }

    #[test]
    fn fbh_volume_and_moments() {
        let p = params(1.0, 0.0);
        for spec in [
            QuadratureSpec::tensor(),
            QuadratureSpec::monte_carlo(100_000, 5),
        ] {
            let vol = integrate_fbh(|_, _| Ok(c(1.0, 0.0)), &p, &spec).unwrap();
            assert!((vol.value.re - PI * PI).abs() < 1e-12);
            let z2 = integrate_fbh(|z, _| Ok(c(z[0].norm_sqr(), 0.0)), &p, &spec).unwrap();
            assert!((z2.value.re - PI * PI).abs() <= 4.0 * z2.std_error.max(1e-13));
            let w2 = integrate_fbh(|_, w| Ok(c(w[0].norm_sqr(), 0.0)), &p, &spec).unwrap();
            assert!((w2.value.re - PI * PI / 4.0).abs() <= 4.0 * w2.std_error.max(1e-13));
            let zw = integrate_fbh(|z, w| Ok(z[0] * w[0]), &p, &spec).unwrap();
            assert!(zw.value.norm() <= 3.0 * zw.std_error.max(1e-14));
        }
    }

    #[test]
    fn fbh_volume_general_dimensions() {
        for (n, m, mu, alpha) in [(2, 1, 1.0, 0.5), (1, 3, 0.5, 2.0), (2, 2, 1.5, -0.5)] {
            let p = DomainParams::new(n, m, mu, alpha).unwrap();
            let e = integrate_fbh(
                |_, _| Ok(c(1.0, 0.0)),
                &p,
                &QuadratureSpec::monte_carlo(100, 2),
            )
            .unwrap();
            let exact = monomial_norm_sq(&MultiIndex::zeros(n), &MultiIndex::zeros(m), &p).unwrap();
            assert!((e.value.re - exact).abs() < 1e-12 * exact);
            assert!((fbh_normalization(&p) - exact).abs() < 1e-12 * exact);
        }
    }

    #[test]
    fn samples_stay_inside() {
        let p = DomainParams::new(2, 2, 1.0, -0.9).unwrap();
        let mut rng = stream_rng(1, 0);
        for _ in 0..20_000 {
            let s = sample_fbh_weighted(&p, &mut rng);
            assert!(crate::domain::rho(&s.point, &p).unwrap() < 0.0);
        }
    }

    fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn fiber_radius_law_is_beta() {
        // Closed-form CDFs of Beta(m, α+1) for the tested shapes.
        type Case = (usize, f64, Box<dyn Fn(f64) -> f64>);
        let cases: Vec<Case> = vec![
            (1, 0.0, Box::new(|x: f64| x)),
            (1, 1.5, Box::new(|x: f64| 1.0 - (1.0 - x).powf(2.5))),
            (1, -0.5, Box::new(|x: f64| 1.0 - (1.0 - x).sqrt())),
            (2, 0.0, Box::new(|x: f64| x * x)),
            (2, 1.0, Box::new(|x: f64| 3.0 * x * x - 2.0 * x * x * x)),
        ];
        let n = 100_000;
        let critical = 1.628 / (n as f64).sqrt();
        for (i, (m, alpha, cdf)) in cases.into_iter().enumerate() {
            let p = DomainParams::new(1, m, 0.7, alpha).unwrap();
            let mut rng = stream_rng(42, i as u64);
            let xs: Vec<f64> = (0..n)
                .map(|_| {
                    let s = sample_fbh_weighted(&p, &mut rng);
                    let r2 = (-p.mu() * norm_sq(&s.point.z)).exp();
                    norm_sq(&s.point.w) / r2
                })
                .collect();
            let d = ks_statistic(xs, cdf);
            assert!(d < critical, "m={m} alpha={alpha}: D={d} >= {critical}");
        }
    }

    #[test]
    fn fiber_integral_by_gauss_jacobi() {
        // ∫_{|w|<R} (R² − |w|²)^α dA(w) via the radial Jacobi rule.
        let p = params(1.0, 0.7);
        let jac = gauss_jacobi_unit(12, p.alpha(), 0.0).unwrap();
        for zr in [0.0, 0.3, 1.1, 2.0] {
            let r2 = (-p.mu() * zr * zr).exp();
            // w = R√x e^{iφ}: dA = R²/2 dx dφ, weight R^{2α}(1−x)^α
            let q = PI * r2.powf(p.alpha() + 1.0) * jac.integrate(|_| 1.0);
            let exact =
                fiber_weight_integral(1, p.alpha()).unwrap() * (-p.base_beta() * zr * zr).exp();
            assert!((q - exact).abs() < 1e-8 * exact);
        }
    }

    #[test]
    fn mc_is_deterministic_across_thread_counts() {
        let p = params(1.0, 0.5);
        let spec = QuadratureSpec::monte_carlo(3 * MC_CHUNK + 17, 99);
        let f = |z: &[C64], w: &[C64]| Ok(z[0].conj() * w[0] + c(z[0].norm_sqr(), 0.0));
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| integrate_fbh(f, &p, &spec)).unwrap();
        let b = four.install(|| integrate_fbh(f, &p, &spec)).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn evaluation_failures_carry_sample_index() {
        let w = FockWeight::new(1.0).unwrap();
        let err = integrate_fock(
            |_| Ok(c(f64::NAN, 0.0)),
            &w,
            1,
            &QuadratureSpec::monte_carlo(10, 1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Evaluation { index: 0, .. }));
        let err = integrate_fock(
            |_| Err(Error::Domain("boom".into())),
            &w,
            1,
            &QuadratureSpec::monte_carlo(10, 1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }
}
