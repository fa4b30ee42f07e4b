//! Run configuration: TOML sections per subcommand, overridden by flags.

use std::path::Path;

use fbh_core::domain::{require_interior, DomainParams, PointPair};
use fbh_core::kernels::SeriesControl;
use fbh_core::quadrature::QuadratureSpec;
use fbh_core::C64;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Default seed for every subcommand.
pub const DEFAULT_SEED: u64 = fbh_core::quadrature::DEFAULT_SEED;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub kernel: Option<KernelConfig>,
    pub norms: Option<NormsConfig>,
    pub identities: Option<IdentitiesConfig>,
    #[serde(rename = "lp-sweep", alias = "lp_sweep")]
    pub lp_sweep: Option<LpSweepConfig>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

/// Node counts for a tensor-engine rule: `base = [radial, angular]`,
/// `fiber = [jacobi, phase]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorNodes {
    pub base: [usize; 2],
    pub fiber: [usize; 2],
}

impl TensorNodes {
    pub fn spec(&self) -> Result<QuadratureSpec, CliError> {
        let spec = QuadratureSpec::tensor()
            .with_base_nodes(self.base[0], self.base[1])
            .with_fiber_nodes(self.fiber[0], self.fiber[1]);
        spec.validate()
            .map_err(|e| CliError::config(e.to_string()))?;
        Ok(spec)
    }
}

/// A complex number written as `[re, im]`.
pub type Pair = [f64; 2];

pub fn to_complex(v: &[Pair]) -> Vec<C64> {
    v.iter().map(|[re, im]| C64::new(*re, *im)).collect()
}

pub fn domain_params(n: usize, m: usize, mu: f64, alpha: f64) -> Result<DomainParams, CliError> {
    DomainParams::new(n, m, mu, alpha).map_err(|e| CliError::config(e.to_string()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointPairSpec {
    pub x: Vec<Pair>,
    pub y: Vec<Pair>,
    pub s: Vec<Pair>,
    pub t: Vec<Pair>,
}

impl Default for PointPairSpec {
    fn default() -> Self {
        PointPairSpec {
            x: vec![[0.0, 0.0]],
            y: vec![[0.0, 0.0]],
            s: vec![[0.0, 0.0]],
            t: vec![[0.0, 0.0]],
        }
    }
}

/// Validated kernel parameters, series control and point pairs.
pub type KernelInputs = (DomainParams, SeriesControl, Vec<(PointPair, PointPair)>);

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelConfig {
    pub n: usize,
    pub m: usize,
    pub mu: f64,
    pub alpha: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
    pub oracle: bool,
    pub oracle_cap: u32,
    pub oracle_tol: f64,
    pub pairs: Vec<PointPairSpec>,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            n: 1,
            m: 1,
            mu: 1.0,
            alpha: 0.0,
            rel_tol: 1e-14,
            max_terms: 100_000,
            oracle: false,
            oracle_cap: fbh_core::kernels::ORACLE_DEGREE_CAP,
            oracle_tol: 1e-8,
            pairs: vec![
                PointPairSpec::default(),
                PointPairSpec {
                    x: vec![[0.3, 0.2]],
                    y: vec![[0.1, -0.2]],
                    s: vec![[-0.5, 0.1]],
                    t: vec![[0.2, 0.3]],
                },
                PointPairSpec {
                    x: vec![[1.0, 0.0]],
                    y: vec![[0.0, 0.3]],
                    s: vec![[0.5, -0.5]],
                    t: vec![[-0.2, 0.0]],
                },
            ],
        }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<KernelInputs, CliError> {
        let params = domain_params(self.n, self.m, self.mu, self.alpha)?;
        let ctl = SeriesControl::new(self.rel_tol, self.max_terms)
            .map_err(|e| CliError::config(e.to_string()))?;
        if !(self.oracle_tol > 0.0) {
            return Err(CliError::config("oracle_tol must be positive"));
        }
        if self.pairs.is_empty() {
            return Err(CliError::config(
                "kernel: at least one point pair is required",
            ));
        }
        let mut pairs = Vec::with_capacity(self.pairs.len());
        for (i, p) in self.pairs.iter().enumerate() {
            let a = PointPair::new(to_complex(&p.x), to_complex(&p.y));
            let b = PointPair::new(to_complex(&p.s), to_complex(&p.t));
            for (name, pt) in [("(x, y)", &a), ("(s, t)", &b)] {
                require_interior(pt, &params)
                    .map_err(|e| CliError::config(format!("kernel pair {i}: {name}: {e}")))?;
            }
            pairs.push((a, b));
        }
        Ok((params, ctl, pairs))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsConfig {
    pub n: usize,
    pub m: usize,
    pub mus: Vec<f64>,
    pub alphas: Vec<f64>,
    pub max_degree: u32,
    pub samples: usize,
    pub seed: u64,
    pub tensor: bool,
    pub tensor_tol: f64,
    pub max_abs_z: f64,
}

impl Default for NormsConfig {
    fn default() -> Self {
        NormsConfig {
            n: 1,
            m: 1,
            mus: vec![0.5, 1.0],
            alphas: vec![0.0, 1.0, 2.5],
            max_degree: 3,
            samples: 1_000_000,
            seed: DEFAULT_SEED,
            tensor: true,
            tensor_tol: 1e-9,
            max_abs_z: 4.0,
        }
    }
}

impl NormsConfig {
    pub fn validate(&self) -> Result<Vec<DomainParams>, CliError> {
        if self.samples < 2 {
            return Err(CliError::config("norms: samples must be at least 2"));
        }
        if self.mus.is_empty() || self.alphas.is_empty() {
            return Err(CliError::config("norms: mus and alphas must be nonempty"));
        }
        let mut out = Vec::new();
        for &mu in &self.mus {
            for &alpha in &self.alphas {
                out.push(domain_params(self.n, self.m, mu, alpha)?);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentitiesConfig {
    pub seed: u64,
    pub samples: usize,
    pub restriction_points: usize,
    pub restriction_dims: Vec<[usize; 2]>,
    pub restriction_alphas: Vec<f64>,
    pub restriction_radius: f64,
    pub restriction_tol: f64,
    pub mu: f64,
    pub alpha: f64,
    pub norm_exponents: Vec<f64>,
    pub submean_exponents: Vec<f64>,
    pub submean_samples: usize,
    pub inner: TensorNodes,
    pub c_eff_golden: f64,
    pub c_eff_tol: f64,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        IdentitiesConfig {
            seed: DEFAULT_SEED,
            samples: 200_000,
            restriction_points: 50,
            restriction_dims: vec![[1, 1], [1, 2], [2, 1]],
            restriction_alphas: vec![0.0, 0.5],
            restriction_radius: 2.0,
            restriction_tol: 1e-10,
            mu: 1.0,
            alpha: 0.5,
            norm_exponents: vec![1.0, 2.0],
            submean_exponents: vec![1.0, 2.0, 4.0],
            submean_samples: 64,
            inner: TensorNodes {
                base: [32, 24],
                fiber: [6, 16],
            },
            c_eff_golden: 1.0,
            c_eff_tol: 1e-3,
        }
    }
}

impl IdentitiesConfig {
    pub fn validate(&self) -> Result<DomainParams, CliError> {
        for &[n, m] in &self.restriction_dims {
            for &alpha in &self.restriction_alphas {
                domain_params(n, m, self.mu, alpha)?;
            }
        }
        if self.samples < 2 || self.submean_samples < 2 {
            return Err(CliError::config(
                "identities: sample counts must be at least 2",
            ));
        }
        if !(self.restriction_radius > 0.0) {
            return Err(CliError::config(
                "identities: restriction_radius must be positive",
            ));
        }
        if self
            .norm_exponents
            .iter()
            .chain(&self.submean_exponents)
            .any(|&p| !(p >= 1.0) || !p.is_finite())
        {
            return Err(CliError::config(
                "identities: exponents must be finite and at least 1",
            ));
        }
        self.inner.spec()?;
        domain_params(1, 1, self.mu, self.alpha)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LpSweepConfig {
    pub mu: f64,
    pub alpha: f64,
    pub ps: Vec<f64>,
    pub centers: Vec<f64>,
    pub fock_quadrature_max_center: f64,
    pub domain_quadrature_max_center: f64,
    pub inner: TensorNodes,
    pub outer: TensorNodes,
    pub tolerance: f64,
}

impl Default for LpSweepConfig {
    fn default() -> Self {
        LpSweepConfig {
            mu: 1.0,
            alpha: 0.0,
            ps: vec![1.0, 1.5, 2.0, 3.0, 4.0],
            centers: vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0],
            fock_quadrature_max_center: 4.0,
            domain_quadrature_max_center: 2.0,
            inner: TensorNodes {
                base: [24, 16],
                fiber: [4, 8],
            },
            outer: TensorNodes {
                base: [32, 24],
                fiber: [2, 4],
            },
            tolerance: 1e-6,
        }
    }
}

impl LpSweepConfig {
    pub fn validate(&self) -> Result<DomainParams, CliError> {
        if self.ps.is_empty() || self.centers.is_empty() {
            return Err(CliError::config(
                "lp-sweep: ps and centers must be nonempty",
            ));
        }
        if self.ps.iter().any(|&p| !(p >= 1.0) || !p.is_finite()) {
            return Err(CliError::config(
                "lp-sweep: every p must be finite and at least 1",
            ));
        }
        if self.centers.iter().any(|&c| !(c >= 0.0) || !c.is_finite()) {
            return Err(CliError::config(
                "lp-sweep: centers must be finite and nonnegative",
            ));
        }
        self.inner.spec()?;
        self.outer.spec()?;
        domain_params(1, 1, self.mu, self.alpha)
    }
}
