//! Derivative-free optimizers driven one iteration at a time.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::SeedStream;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerMethod {
    /// Simultaneous-perturbation stochastic approximation with gains
    /// `a_k = a/(k + 1 + stability)^alpha`, `c_k = c/(k + 1)^gamma`.
    Spsa {
        a: f64,
        c: f64,
        alpha: f64,
        gamma: f64,
        stability: f64,
    },
    /// Nelder-Mead with dimension-adapted coefficients. The simplex is
    /// rebuilt around the best vertex once its size drops below `restart_size`.
    NelderMead { initial_step: f64, restart_size: f64 },
}

impl OptimizerMethod {
    pub fn spsa() -> Self {
        OptimizerMethod::Spsa {
            a: 0.2,
            c: 0.1,
            alpha: 0.602,
            gamma: 0.101,
            stability: 10.0,
        }
    }

    pub fn nelder_mead() -> Self {
        OptimizerMethod::NelderMead {
            initial_step: 0.5,
            restart_size: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    pub method: OptimizerMethod,
    pub max_iterations: usize,
    pub seed: u64,
    pub target_overlap: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: OptimizerMethod::nelder_mead(),
            max_iterations: 500,
            seed: 0,
            target_overlap: 0.99,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::BadSpec("max_iterations must be at least 1".into()));
        }
        if !(self.target_overlap > 0.0 && self.target_overlap <= 1.0) {
            return Err(Error::BadSpec(format!("target_overlap = {} must lie in (0, 1]", self.target_overlap)));
        }
        match self.method {
            OptimizerMethod::Spsa { a, c, .. } if !(a > 0.0 && c > 0.0) => {
                Err(Error::BadSpec("SPSA gains must be positive".into()))
            }
            OptimizerMethod::NelderMead { initial_step, .. } if !(initial_step > 0.0) => {
                Err(Error::BadSpec("Nelder-Mead initial_step must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Iterate produced by one optimizer step.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub params: Vec<f64>,
    pub value: f64,
}

pub(crate) enum Optimizer {
    Spsa(SpsaState),
    NelderMead(NelderMeadState),
}

impl Optimizer {
    pub(crate) fn new(
        method: OptimizerMethod,
        x0: Vec<f64>,
        rng: SeedStream,
        f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    ) -> Result<Self> {
        Ok(match method {
            OptimizerMethod::Spsa {
                a,
                c,
                alpha,
                gamma,
                stability,
            } => Optimizer::Spsa(SpsaState {
                theta: x0,
                k: 0,
                a,
                c,
                alpha,
                gamma,
                stability,
                rng,
            }),
            OptimizerMethod::NelderMead {
                initial_step,
                restart_size,
            } => {
                let f0 = f(&x0)?;
                let mut nm = NelderMeadState {
                    simplex: Vec::new(),
                    step: initial_step,
                    restart_size,
                };
                nm.rebuild(x0, f0, f)?;
                Optimizer::NelderMead(nm)
            }
        })
    }

    pub(crate) fn step(&mut self, f: &mut dyn FnMut(&[f64]) -> Result<f64>) -> Result<Step> {
        match self {
            Optimizer::Spsa(s) => s.step(f),
            Optimizer::NelderMead(s) => s.step(f),
        }
    }
}

pub(crate) struct SpsaState {
    theta: Vec<f64>,
    k: usize,
    a: f64,
    c: f64,
    alpha: f64,
    gamma: f64,
    stability: f64,
    rng: SeedStream,
}

impl SpsaState {
    fn step(&mut self, f: &mut dyn FnMut(&[f64]) -> Result<f64>) -> Result<Step> {
        let k = self.k as f64;
        let ak = self.a / (k + 1.0 + self.stability).powf(self.alpha);
        let ck = self.c / (k + 1.0).powf(self.gamma);
        let delta: Vec<f64> = (0..self.theta.len())
            .map(|_| if self.rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let plus: Vec<f64> = self.theta.iter().zip(&delta).map(|(t, d)| t + ck * d).collect();
        let minus: Vec<f64> = self.theta.iter().zip(&delta).map(|(t, d)| t - ck * d).collect();
        let diff = f(&plus)? - f(&minus)?;
        for (t, d) in self.theta.iter_mut().zip(&delta) {
            // Δ_i = ±1 so 1/Δ_i = Δ_i
            *t -= ak * diff / (2.0 * ck) * d;
        }
        self.k += 1;
        let value = f(&self.theta)?;
        Ok(Step {
            params: self.theta.clone(),
            value,
        })
    }
}

pub(crate) struct NelderMeadState {
    /// Sorted by value, best first.
    simplex: Vec<(Vec<f64>, f64)>,
    step: f64,
    restart_size: f64,
}

impl NelderMeadState {
    fn rebuild(&mut self, x0: Vec<f64>, f0: f64, f: &mut dyn FnMut(&[f64]) -> Result<f64>) -> Result<()> {
        let n = x0.len();
        let mut simplex = Vec::with_capacity(n + 1);
        for i in 0..n {
            let mut x = x0.clone();
            x[i] += self.step;
            let v = f(&x)?;
            simplex.push((x, v));
        }
        simplex.push((x0, f0));
        self.simplex = simplex;
        self.sort();
        Ok(())
    }

    fn sort(&mut self) {
        self.simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    }

    fn size(&self) -> f64 {
        let best = &self.simplex[0].0;
        self.simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(best).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    fn step(&mut self, f: &mut dyn FnMut(&[f64]) -> Result<f64>) -> Result<Step> {
        let n = self.simplex.len() - 1;
        if n == 0 {
            let (x, v) = self.simplex[0].clone();
            return Ok(Step { params: x, value: v });
        }
        if self.size() < self.restart_size {
            let (x, v) = self.simplex[0].clone();
            self.rebuild(x, v, f)?;
        }
        let nf = n as f64;
        let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);
        let centroid: Vec<f64> = (0..n)
            .map(|i| self.simplex[..n].iter().map(|(x, _)| x[i]).sum::<f64>() / nf)
            .collect();
        let worst = self.simplex[n].clone();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect() };

        let xr = along(alpha);
        let fr = f(&xr)?;
        let best = self.simplex[0].1;
        let second_worst = self.simplex[n - 1].1;
        if fr < best {
            let xe = along(alpha * beta);
            let fe = f(&xe)?;
            self.simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < second_worst {
            self.simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(alpha * gamma);
                let fc = f(&xc)?;
                (xc, fc)
            } else {
                let xc = along(-gamma);
                let fc = f(&xc)?;
                (xc, fc)
            };
            if fc < fr.min(worst.1) {
                self.simplex[n] = (xc, fc);
            } else {
                let x0 = self.simplex[0].0.clone();
                for v in self.simplex[1..].iter_mut() {
                    let x: Vec<f64> = x0.iter().zip(&v.0).map(|(b, xi)| b + delta * (xi - b)).collect();
                    let fx = f(&x)?;
                    *v = (x, fx);
                }
            }
        }
        self.sort();
        let (x, v) = self.simplex[0].clone();
        Ok(Step { params: x, value: v })
    }
}
