//! ADMM solvers for tensor nuclear norm minimization.
//!
//! * [`solve_gaussian`]: `min ||X||_*  s.t.  y = A vec(X)`, split as
//!   `X = Z` with `y = A vec(Z)`.
//! * [`solve_completion`]: `min ||X||_*  s.t.  P_Omega(X) = P_Omega(M)`,
//!   split as `X + E = M` with `P_Omega(E) = 0`.
//!
//! Both use the geometric penalty schedule `mu_k = min(mu0 rho^k, mu_max)`
//! and stop once every sup-norm residual is at most `eps`.

use std::time::{Duration, Instant};

use faer::linalg::solvers::{Llt, Solve};
use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::sensing::{GaussianMap, SampleMask};
use crate::tensor::Tensor3;
use crate::tsvd::svt_with_tnn;

/// How the `Z` step solves `(A^T A + I) z = r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LinearStrategy {
    /// Woodbury when `m < n1 n2 n3`, direct otherwise.
    #[default]
    Auto,
    /// Cholesky of the `d x d` matrix `A^T A + I`.
    Direct,
    /// Cholesky of the `m x m` matrix `I + A A^T` and
    /// `(A^T A + I)^-1 = I - A^T (I + A A^T)^-1 A`.
    Woodbury,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmmConfig {
    /// Penalty growth factor, `> 1`.
    pub rho: f64,
    pub mu0: f64,
    pub mu_max: f64,
    /// Tolerance on every sup-norm residual.
    pub eps: f64,
    pub max_iter: usize,
    pub record_history: bool,
    pub linear: LinearStrategy,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        AdmmConfig {
            rho: 1.1,
            mu0: 1e-4,
            mu_max: 1e10,
            eps: 1e-8,
            max_iter: 500,
            record_history: false,
            linear: LinearStrategy::Auto,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.rho > 1.0) || !self.rho.is_finite() {
            return bad("rho must be a finite value above 1");
        }
        if !(self.mu0 > 0.0 && self.mu0 <= self.mu_max) || !self.mu_max.is_finite() {
            return bad("need 0 < mu0 <= mu_max < inf");
        }
        if !(self.eps > 0.0) {
            return bad("eps must be positive");
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1");
        }
        Ok(())
    }

    /// Penalty used at (0-based) iteration `k`: `min(mu0 rho^k, mu_max)`.
    pub fn mu_at(&self, k: usize) -> f64 {
        let k = i32::try_from(k).unwrap_or(i32::MAX);
        (self.mu0 * self.rho.powi(k)).min(self.mu_max)
    }
}

/// Sup-norm stopping quantities of one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `||X_{k+1} - X_k||_inf`.
    pub delta_x: f64,
    /// `||Z_{k+1} - Z_k||_inf` (Gaussian) or `||E_{k+1} - E_k||_inf`
    /// (completion).
    pub delta_z: f64,
    /// `||A vec(Z_{k+1}) - y||_inf` or `||M - X_{k+1} - E_{k+1}||_inf`.
    pub feasibility: f64,
    /// `||X_{k+1} - Z_{k+1}||_inf`; absent for completion.
    pub gap: Option<f64>,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.delta_x
            .max(self.delta_z)
            .max(self.feasibility)
            .max(self.gap.unwrap_or(0.0))
    }

    pub fn all_below(&self, eps: f64) -> bool {
        self.max() <= eps
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterRecord {
    /// 1-based iteration number.
    pub iter: usize,
    /// TNN of `X_{k+1}`.
    pub objective: f64,
    pub residuals: Residuals,
    /// Penalty used in this iteration.
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct SolverReport {
    pub iterations: usize,
    pub converged: bool,
    pub residuals: Residuals,
    /// Penalty used in the last iteration.
    pub mu_final: f64,
    /// TNN of the returned iterate.
    pub objective: f64,
    pub history: Vec<IterRecord>,
    pub wall_time: Duration,
}

/// Final iterate plus diagnostics.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Tensor3,
    pub report: SolverReport,
}

impl Solution {
    fn finish(self) -> Result<Solution> {
        if self.report.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged(Box::new(self)))
        }
    }
}

/// Factorization behind the `Z` step.
enum NormalSolver {
    Direct(Llt<f64>),
    Woodbury(Llt<f64>),
}

impl NormalSolver {
    fn new(a: MatRef<'_, f64>, strategy: LinearStrategy) -> Result<Self> {
        let (m, d) = (a.nrows(), a.ncols());
        let woodbury = match strategy {
            LinearStrategy::Auto => m < d,
            LinearStrategy::Direct => false,
            LinearStrategy::Woodbury => true,
        };
        let factor = |mut g: Mat<f64>| {
            for i in 0..g.nrows() {
                g[(i, i)] += 1.0;
            }
            g.llt(Side::Lower)
                .map_err(|e| Error::Numerical(format!("Cholesky of Gram matrix failed: {e:?}")))
        };
        Ok(if woodbury {
            NormalSolver::Woodbury(factor(a * a.transpose())?)
        } else {
            NormalSolver::Direct(factor(a.transpose() * a)?)
        })
    }

    fn solve(&self, a: MatRef<'_, f64>, rhs: Vec<f64>) -> Vec<f64> {
        let column = |v: &[f64]| Mat::from_fn(v.len(), 1, |i, _| v[i]);
        match self {
            NormalSolver::Direct(llt) => {
                let mut b = column(&rhs);
                llt.solve_in_place(b.as_mut());
                (0..b.nrows()).map(|i| b[(i, 0)]).collect()
            }
            NormalSolver::Woodbury(llt) => {
                let r = column(&rhs);
                let mut t = a * &r;
                llt.solve_in_place(t.as_mut());
                let back = a.transpose() * &t;
                rhs.iter().enumerate().map(|(i, v)| v - back[(i, 0)]).collect()
            }
        }
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// State of the Gaussian-measurement ADMM, advanced one iteration at a time
/// by [`GaussianAdmm::step`].
pub struct GaussianAdmm<'a> {
    map: &'a GaussianMap,
    y: Vec<f64>,
    cfg: AdmmConfig,
    normal: NormalSolver,
    x: Tensor3,
    z: Tensor3,
    lambda1: Vec<f64>,
    lambda2: Tensor3,
    iter: usize,
    objective: f64,
}

impl<'a> GaussianAdmm<'a> {
    /// Validates inputs and factors the `Z`-step system. All iterates start
    /// at zero.
    pub fn new(map: &'a GaussianMap, y: &[f64], cfg: &AdmmConfig) -> Result<Self> {
        cfg.validate()?;
        if y.len() != map.m() {
            return Err(Error::DimMismatch(format!(
                "{} measurements for a map with m = {}",
                y.len(),
                map.m()
            )));
        }
        if let Some(pos) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        let dims = map.dims();
        Ok(GaussianAdmm {
            map,
            y: y.to_vec(),
            cfg: cfg.clone(),
            normal: NormalSolver::new(map.view(), cfg.linear)?,
            x: Tensor3::zeros(dims),
            z: Tensor3::zeros(dims),
            lambda1: vec![0.0; map.m()],
            lambda2: Tensor3::zeros(dims),
            iter: 0,
            objective: 0.0,
        })
    }

    /// One ADMM iteration; returns its residuals.
    pub fn step(&mut self) -> Residuals {
        let mu = self.cfg.mu_at(self.iter);
        let inv_mu = 1.0 / mu;

        // X step: proximal map of ||.||_* / mu at Z - lambda2 / mu.
        let mut target = self.z.clone();
        target.axpy(-inv_mu, &self.lambda2);
        let (x_new, objective) = svt_with_tnn(&target, inv_mu);

        // Z step: (A^T A + I) z = A^T (y - lambda1 / mu) + vec(lambda2) / mu + vec(X).
        let w: Vec<f64> = self
            .y
            .iter()
            .zip(&self.lambda1)
            .map(|(y, l)| y - inv_mu * l)
            .collect();
        let mut rhs = self.map.adjoint_raw(&w);
        for ((r, l2), x) in rhs
            .iter_mut()
            .zip(self.lambda2.as_slice())
            .zip(x_new.as_slice())
        {
            *r += inv_mu * l2 + x;
        }
        let z_new = Tensor3::from_raw(self.map.dims(), self.normal.solve(self.map.view(), rhs));

        // Dual ascent.
        let az = self.map.apply_raw(z_new.as_slice());
        for ((l, a), y) in self.lambda1.iter_mut().zip(&az).zip(&self.y) {
            *l += mu * (a - y);
        }
        for ((l, x), z) in self
            .lambda2
            .as_mut_slice()
            .iter_mut()
            .zip(x_new.as_slice())
            .zip(z_new.as_slice())
        {
            *l += mu * (x - z);
        }

        let residuals = Residuals {
            delta_x: x_new.max_abs_diff(&self.x),
            delta_z: z_new.max_abs_diff(&self.z),
            feasibility: sup_diff(&az, &self.y),
            gap: Some(x_new.max_abs_diff(&z_new)),
        };
        self.x = x_new;
        self.z = z_new;
        self.objective = objective;
        self.iter += 1;
        residuals
    }

    pub fn x(&self) -> &Tensor3 {
        &self.x
    }

    pub fn z(&self) -> &Tensor3 {
        &self.z
    }

    pub fn lambda1(&self) -> &[f64] {
        &self.lambda1
    }

    pub fn lambda2(&self) -> &Tensor3 {
        &self.lambda2
    }

    /// Penalty the next call to [`step`](Self::step) will use.
    pub fn mu(&self) -> f64 {
        self.cfg.mu_at(self.iter)
    }

    /// Completed iterations.
    pub fn iterations(&self) -> usize {
        self.iter
    }
}

/// State of the tensor-completion ADMM.
pub struct CompletionAdmm<'a> {
    mask: &'a SampleMask,
    m_obs: Tensor3,
    cfg: AdmmConfig,
    x: Tensor3,
    e: Tensor3,
    y: Tensor3,
    iter: usize,
    objective: f64,
}

impl<'a> CompletionAdmm<'a> {
    /// Unobserved entries of `m_obs` are ignored (treated as zero).
    pub fn new(mask: &'a SampleMask, m_obs: &Tensor3, cfg: &AdmmConfig) -> Result<Self> {
        cfg.validate()?;
        let m_obs = mask.proj_omega(m_obs)?;
        let dims = m_obs.dims();
        Ok(CompletionAdmm {
            mask,
            m_obs,
            cfg: cfg.clone(),
            x: Tensor3::zeros(dims),
            e: Tensor3::zeros(dims),
            y: Tensor3::zeros(dims),
            iter: 0,
            objective: 0.0,
        })
    }

    pub fn step(&mut self) -> Residuals {
        let mu = self.cfg.mu_at(self.iter);
        let inv_mu = 1.0 / mu;

        // X step at M - E + Y / mu.
        let mut target = &self.m_obs - &self.e;
        target.axpy(inv_mu, &self.y);
        let (x_new, objective) = svt_with_tnn(&target, inv_mu);

        // E step: the unobserved part of M - X + Y / mu.
        let mut e_new = &self.m_obs - &x_new;
        e_new.axpy(inv_mu, &self.y);
        for (v, &obs) in e_new.as_mut_slice().iter_mut().zip(self.mask.flags()) {
            if obs {
                *v = 0.0;
            }
        }

        // Dual ascent on M - X - E.
        let mut gap = &self.m_obs - &x_new;
        gap.axpy(-1.0, &e_new);
        self.y.axpy(mu, &gap);

        let residuals = Residuals {
            delta_x: x_new.max_abs_diff(&self.x),
            delta_z: e_new.max_abs_diff(&self.e),
            feasibility: gap.max_abs(),
            gap: None,
        };
        self.x = x_new;
        self.e = e_new;
        self.objective = objective;
        self.iter += 1;
        residuals
    }

    pub fn x(&self) -> &Tensor3 {
        &self.x
    }

    pub fn e(&self) -> &Tensor3 {
        &self.e
    }

    pub fn dual(&self) -> &Tensor3 {
        &self.y
    }

    pub fn mu(&self) -> f64 {
        self.cfg.mu_at(self.iter)
    }

    pub fn iterations(&self) -> usize {
        self.iter
    }
}

/// Shared driver: steps until every residual is below `eps` or the
/// iteration cap is hit.
fn drive(
    cfg: &AdmmConfig,
    started: Instant,
    mut step: impl FnMut() -> (Residuals, f64, f64),
) -> (SolverReport, bool) {
    let mut history = Vec::new();
    let mut last = None;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iter {
        let (residuals, objective, mu) = step();
        iterations += 1;
        if cfg.record_history {
            history.push(IterRecord {
                iter: iterations,
                objective,
                residuals,
                mu,
            });
        }
        last = Some((residuals, objective, mu));
        if residuals.all_below(cfg.eps) {
            converged = true;
            break;
        }
    }
    let (residuals, objective, mu_final) = last.expect("max_iter >= 1");
    let report = SolverReport {
        iterations,
        converged,
        residuals,
        mu_final,
        objective,
        history,
        wall_time: started.elapsed(),
    };
    (report, converged)
}

/// Recovers `X` from `y = A vec(X)` by TNN minimization.
///
/// Returns [`Error::NotConverged`] carrying the last iterate when the
/// iteration cap is reached first.
pub fn solve_gaussian(map: &GaussianMap, y: &[f64], cfg: &AdmmConfig) -> Result<Solution> {
    let started = Instant::now();
    let mut admm = GaussianAdmm::new(map, y, cfg)?;
    let (report, _) = drive(cfg, started, || {
        let mu = admm.mu();
        let r = admm.step();
        (r, admm.objective, mu)
    });
    Solution {
        x: admm.x,
        report,
    }
    .finish()
}

/// Completes `M` from its entries on `Omega` by TNN minimization.
///
/// Returns [`Error::NotConverged`] carrying the last iterate when the
/// iteration cap is reached first.
pub fn solve_completion(mask: &SampleMask, m_obs: &Tensor3, cfg: &AdmmConfig) -> Result<Solution> {
    let started = Instant::now();
    let mut admm = CompletionAdmm::new(mask, m_obs, cfg)?;
    let (report, _) = drive(cfg, started, || {
        let mu = admm.mu();
        let r = admm.step();
        (r, admm.objective, mu)
    });
    Solution {
        x: admm.x,
        report,
    }
    .finish()
}
