//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use mlip_uq_core::gpr::{GprModel, Hyperparameters, KernelParams};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// `σ_f² exp(-½ Σ (Δ_d / l_d)²)` written out directly.
pub fn se(x: &[f64], y: &[f64], output_scale: f64, ls: &[f64]) -> f64 {
    let mut s = 0.0;
    for d in 0..x.len() {
        let t = (x[d] - y[d]) / ls[d];
        s += t * t;
    }
    output_scale * (-0.5 * s).exp()
}

pub struct Problem {
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub hyper: Hyperparameters,
}

/// Random regression problem with a smooth target plus noise and ARD
/// hyperparameters of moderate size.
pub fn random_problem(seed: u64, n: usize, d: usize) -> Problem {
    let mut r = rng(seed);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| r.random_range(-2.0..2.0)).collect()).collect();
    let w: Vec<f64> = (0..d).map(|_| r.random_range(-1.0..1.0)).collect();
    let y = x
        .iter()
        .map(|xi| xi.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().sin() + 0.1 * r.random_range(-1.0..1.0) + 3.0)
        .collect();
    let ls = (0..d).map(|_| r.random_range(0.5..3.0)).collect();
    let kernel = KernelParams::new(r.random_range(0.5..2.0), ls).unwrap();
    let hyper = Hyperparameters::new(kernel, r.random_range(1e-3..1e-1)).unwrap();
    Problem { x, y, hyper }
}

pub struct DenseGp {
    x: Vec<Vec<f64>>,
    ybar: f64,
    yc: DVector<f64>,
    a_inv: DMatrix<f64>,
    a: DMatrix<f64>,
    sf: f64,
    ls: Vec<f64>,
}

impl DenseGp {
    pub fn new(p: &Problem) -> Self {
        let n = p.x.len();
        let sf = p.hyper.kernel.output_scale();
        let ls = p.hyper.kernel.lengthscales().to_vec();
        let a = DMatrix::from_fn(n, n, |i, j| {
            se(&p.x[i], &p.x[j], sf, &ls) + if i == j { p.hyper.noise } else { 0.0 }
        });
        let a_inv = a.clone().try_inverse().expect("invertible");
        let ybar = p.y.iter().sum::<f64>() / n as f64;
        let yc = DVector::from_iterator(n, p.y.iter().map(|v| v - ybar));
        Self {
            x: p.x.clone(),
            ybar,
            yc,
            a_inv,
            a,
            sf,
            ls,
        }
    }

    fn k_row(&self, q: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.x.len(), self.x.iter().map(|xi| se(q, xi, self.sf, &self.ls)))
    }

    pub fn weights(&self) -> DVector<f64> {
        &self.a_inv * &self.yc
    }

    pub fn mean(&self, q: &[f64]) -> f64 {
        self.k_row(q).dot(&self.weights()) + self.ybar
    }

    pub fn std(&self, q: &[f64]) -> f64 {
        let k = self.k_row(q);
        (self.sf - k.dot(&(&self.a_inv * &k))).max(0.0).sqrt()
    }

    pub fn mll(&self) -> f64 {
        let n = self.x.len() as f64;
        let det = self.a.determinant();
        -0.5 * self.yc.dot(&(&self.a_inv * &self.yc)) - 0.5 * det.ln() - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
    }
}

pub fn fit(p: &Problem) -> GprModel<Vec<f64>> {
    GprModel::fit(p.x.clone(), &p.y, &p.hyper).unwrap()
}

/// Uniformly distributed rotation from a normalised random quaternion.
pub fn random_rotation(r: &mut impl Rng) -> [[f64; 3]; 3] {
    let mut q = [0.0f64; 4];
    loop {
        for v in &mut q {
            *v = r.random_range(-1.0..1.0);
        }
        let n2: f64 = q.iter().map(|v| v * v).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            q.iter_mut().for_each(|v| *v /= n);
            break;
        }
    }
    let [w, x, y, z] = q;
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// Small random molecule with atoms at least 0.8 Å apart.
pub fn random_molecule(r: &mut impl Rng, species: &[u32], n_atoms: usize) -> mlip_uq_core::repcore::Structure {
    let mut pos: Vec<[f64; 3]> = Vec::new();
    while pos.len() < n_atoms {
        let p = [r.random_range(-2.0..2.0), r.random_range(-2.0..2.0), r.random_range(-2.0..2.0)];
        if pos.iter().all(|q| {
            let d: f64 = (0..3).map(|k| (p[k] - q[k]).powi(2)).sum();
            d.sqrt() > 0.8
        }) {
            pos.push(p);
        }
    }
    let z = (0..n_atoms).map(|i| species[i % species.len()]).collect();
    mlip_uq_core::repcore::Structure::new(z, pos, None).unwrap()
}
