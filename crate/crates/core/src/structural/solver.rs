use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};

use super::energy::energy_and_gradient;
use super::model::BarHingeModel;
use super::StructuralError;
use crate::Vec3;

/// Prescribed position of some coordinates of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub node: usize,
    /// Target position; only the `fixed` components are enforced.
    pub position: Vec3,
    pub fixed: [bool; 3],
}

impl Support {
    pub fn pinned(node: usize, position: Vec3) -> Self {
        Self { node, position, fixed: [true; 3] }
    }

    /// Holds coordinate `axis` at `value`; the other two are free.
    pub fn roller(node: usize, axis: usize, value: f64) -> Self {
        let mut position = Vec3::zeros();
        position[axis] = value;
        let mut fixed = [false; 3];
        fixed[axis] = true;
        Self { node, position, fixed }
    }

    pub fn is_pinned(&self) -> bool {
        self.fixed.iter().all(|&f| f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Euclidean norm of the free-coordinate gradient, N.
    pub gradient_tol: f64,
    pub max_iterations: usize,
    /// L-BFGS history length.
    pub memory: usize,
    /// Newton steps allowed once L-BFGS stalls.
    pub newton_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { gradient_tol: 1e-8, max_iterations: 100_000, memory: 12, newton_iterations: 60 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub positions: Vec<Vec3>,
    /// N·mm.
    pub energy: f64,
    /// Energy of the starting configuration after applying the supports.
    pub start_energy: f64,
    /// Force each support exerts on the structure (the energy gradient at
    /// that node), N. Free components are zero.
    pub reactions: Vec<(usize, Vec3)>,
    pub iterations: usize,
    /// Free-coordinate gradient norm at exit, N.
    pub gradient_norm: f64,
}

impl Equilibrium {
    pub fn total_reaction(&self) -> Vec3 {
        self.reactions.iter().map(|r| r.1).sum()
    }
}

pub fn minimize_energy(model: &BarHingeModel, supports: &[Support]) -> Result<Equilibrium, StructuralError> {
    minimize_energy_from(model, supports, &model.nodes, &SolverOptions::default())
}

fn check_supports(model: &BarHingeModel, supports: &[Support]) -> Result<(), StructuralError> {
    let n = model.nodes.len();
    let mut seen = vec![false; n];
    for s in supports {
        if s.node >= n {
            return Err(StructuralError::InvalidParameter(format!("support on missing node {}", s.node)));
        }
        if std::mem::replace(&mut seen[s.node], true) {
            return Err(StructuralError::InvalidParameter(format!("node {} supported twice", s.node)));
        }
        if !s.position.iter().all(|v| v.is_finite()) {
            return Err(StructuralError::InvalidParameter(format!("non-finite target for node {}", s.node)));
        }
    }
    let pinned: Vec<Vec3> = supports.iter().filter(|s| s.is_pinned()).map(|s| s.position).collect();
    let scale = model.nodes.iter().map(|p| (p - model.nodes[0]).norm()).fold(1.0, f64::max);
    let rank_ok = pinned.first().is_some_and(|&a| {
        let far = pinned.iter().copied().max_by(|p, q| (p - a).norm().total_cmp(&(q - a).norm())).unwrap();
        let span = pinned.iter().map(|p| (far - a).cross(&(p - a)).norm()).fold(0.0, f64::max);
        span > 1e-9 * scale * scale
    });
    if !rank_ok {
        return Err(StructuralError::UnderConstrained(format!(
            "need at least 3 non-collinear pinned nodes, have {}",
            pinned.len()
        )));
    }
    Ok(())
}

struct Problem<'a> {
    model: &'a BarHingeModel,
    free: Vec<(usize, usize)>,
    x: Vec<Vec3>,
    evaluations: usize,
}

impl Problem<'_> {
    fn set(&mut self, v: &DVector<f64>) {
        for (k, &(i, a)) in self.free.iter().enumerate() {
            self.x[i][a] = v[k];
        }
    }

    fn get(&self) -> DVector<f64> {
        DVector::from_iterator(self.free.len(), self.free.iter().map(|&(i, a)| self.x[i][a]))
    }

    fn eval(&mut self, v: &DVector<f64>) -> (f64, DVector<f64>) {
        self.set(v);
        self.evaluations += 1;
        let (e, g) = energy_and_gradient(self.model, &self.x);
        let gv = DVector::from_iterator(self.free.len(), self.free.iter().map(|&(i, a)| g[i][a]));
        (e, gv)
    }

    /// Central differences of the analytic gradient.
    fn hessian(&mut self, v: &DVector<f64>, step: f64) -> DMatrix<f64> {
        let n = v.len();
        let mut h = DMatrix::zeros(n, n);
        let mut w = v.clone();
        for j in 0..n {
            w[j] = v[j] + step;
            let (_, gp) = self.eval(&w);
            w[j] = v[j] - step;
            let (_, gm) = self.eval(&w);
            w[j] = v[j];
            h.set_column(j, &((gp - gm) / (2.0 * step)));
        }
        self.set(v);
        0.5 * (&h + h.transpose())
    }
}

/// Minimizes the energy with the `supports` enforced, starting from `start`.
pub fn minimize_energy_from(
    model: &BarHingeModel,
    supports: &[Support],
    start: &[Vec3],
    options: &SolverOptions,
) -> Result<Equilibrium, StructuralError> {
    if start.len() != model.nodes.len() {
        return Err(StructuralError::InvalidParameter(format!(
            "{} start positions for {} nodes",
            start.len(),
            model.nodes.len()
        )));
    }
    check_supports(model, supports)?;
    let mut x = start.to_vec();
    let mut fixed = vec![[false; 3]; x.len()];
    for s in supports {
        for a in 0..3 {
            if s.fixed[a] {
                x[s.node][a] = s.position[a];
                fixed[s.node][a] = true;
            }
        }
    }
    let free: Vec<(usize, usize)> =
        (0..x.len()).flat_map(|i| (0..3).map(move |a| (i, a))).filter(|&(i, a)| !fixed[i][a]).collect();
    let mut p = Problem { model, free, x, evaluations: 0 };
    let mut v = p.get();
    let (mut f, mut g) = p.eval(&v);
    let start_energy = f;
    let tol = options.gradient_tol;
    let mut iterations = 0;

    // L-BFGS with backtracking Armijo search
    let mut history: VecDeque<(DVector<f64>, DVector<f64>, f64)> = VecDeque::new();
    let mut flat_steps = 0;
    while g.norm() >= tol && iterations < options.max_iterations {
        iterations += 1;
        let mut d = -two_loop(&history, &g);
        let mut slope = g.dot(&d);
        if !(slope < 0.0) {
            history.clear();
            d = -g.clone();
            slope = g.dot(&d);
        }
        let mut step = if history.is_empty() { (1.0 / g.norm()).min(1.0) } else { 1.0 };
        let mut accepted = None;
        for _ in 0..60 {
            let trial = &v + step * &d;
            let (ft, gt) = p.eval(&trial);
            if ft <= f + 1e-4 * step * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            step *= 0.5;
        }
        let Some((nv, nf, ng)) = accepted else { break };
        let s = &nv - &v;
        let y = &ng - &g;
        let sy = s.dot(&y);
        if sy > 1e-14 * s.norm() * y.norm() {
            if history.len() == options.memory {
                history.pop_front();
            }
            history.push_back((s, y, 1.0 / sy));
        }
        flat_steps = if f - nf <= 8.0 * f64::EPSILON * f.abs() { flat_steps + 1 } else { 0 };
        v = nv;
        f = nf;
        g = ng;
        if flat_steps >= 5 {
            break;
        }
    }

    // Newton polish for the last digits the line search cannot resolve
    let mut damping = 0.0;
    let mut newton = 0;
    while g.norm() >= tol && newton < options.newton_iterations && iterations < options.max_iterations {
        newton += 1;
        iterations += 1;
        let h = p.hessian(&v, 1e-5);
        let diag_scale = (0..h.nrows()).map(|i| h[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        let mut improved = false;
        for _ in 0..30 {
            let mut hd = h.clone();
            for i in 0..hd.nrows() {
                hd[(i, i)] += damping * diag_scale;
            }
            let Some(chol) = hd.cholesky() else {
                damping = (damping * 10.0).max(1e-12);
                continue;
            };
            let trial = &v - chol.solve(&g);
            let (ft, gt) = p.eval(&trial);
            let roundoff = 16.0 * f64::EPSILON * f.abs().max(1e-300);
            if ft <= f || (ft - f <= roundoff && gt.norm() < g.norm()) {
                v = trial;
                f = ft;
                g = gt;
                damping *= 0.1;
                improved = true;
                break;
            }
            damping = (damping * 10.0).max(1e-12);
        }
        if !improved {
            break;
        }
    }
    log::debug!(
        "minimize: {iterations} iterations ({newton} Newton), {} evaluations, |g| = {:.3e}",
        p.evaluations,
        g.norm()
    );
    let gradient_norm = g.norm();
    if gradient_norm >= tol {
        return Err(StructuralError::NoConvergence { iterations, gradient_norm });
    }
    p.set(&v);
    let (energy, full_grad) = energy_and_gradient(model, &p.x);
    let reactions = supports
        .iter()
        .map(|s| {
            let mut r = full_grad[s.node];
            for a in 0..3 {
                if !s.fixed[a] {
                    r[a] = 0.0;
                }
            }
            (s.node, r)
        })
        .collect();
    Ok(Equilibrium { positions: p.x, energy, start_energy, reactions, iterations, gradient_norm })
}

fn two_loop(history: &VecDeque<(DVector<f64>, DVector<f64>, f64)>, g: &DVector<f64>) -> DVector<f64> {
    let mut q = g.clone();
    let mut alphas = Vec::with_capacity(history.len());
    for (s, y, rho) in history.iter().rev() {
        let a = rho * s.dot(&q);
        q.axpy(-a, y, 1.0);
        alphas.push(a);
    }
    if let Some((s, y, _)) = history.back() {
        q *= s.dot(y) / y.dot(y);
    }
    for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
        let b = rho * y.dot(&q);
        q.axpy(a - b, s, 1.0);
    }
    q
}
