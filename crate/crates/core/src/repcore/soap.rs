//! Smooth overlap of atomic positions: per-atom partial power spectra.
//!
//! Each neighbour (the central atom included) within `r_cut` contributes a
//! Gaussian of width `sigma_atom` to its species' density, damped by
//! `½(cos(π r / r_cut) + 1)`. The densities are projected onto an orthonormal
//! radial basis times real spherical harmonics; the angular integral is done
//! analytically through modified spherical Bessel functions and the radial one
//! by Gauss–Legendre quadrature on `[0, r_cut]`.
//!
//! The radial basis starts from Gaussians `exp(-α_n r²)` that fall to 1e-3 at
//! radii `n·r_cut/n_max`, symmetrically (Löwdin) orthonormalised on `[0, r_cut]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // float math is inherent once std is linked (tests)
use num_traits::Float;

use super::coulomb::distance;
use super::special::{gauss_legendre, real_spherical_harmonics, scaled_bessel_i};
use super::{AtomisticFeatureSet, Structure};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::{Error, Result};

const QUADRATURE_POINTS: usize = 80;
const BASIS_DECAY: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct SoapConfig {
    pub r_cut: f64,
    pub n_max: usize,
    pub l_max: usize,
    pub sigma_atom: f64,
    pub species: Vec<u32>,
}

impl SoapConfig {
    /// `r_cut = 5 Å`, `n_max = 3`, `l_max = 1`, `sigma_atom = 1 Å`.
    pub fn new(mut species: Vec<u32>) -> Self {
        species.sort_unstable();
        species.dedup();
        Self {
            r_cut: 5.0,
            n_max: 3,
            l_max: 1,
            sigma_atom: 1.0,
            species,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_cut > 0.0 && self.r_cut.is_finite()) {
            return Err(Error::Config(format!("r_cut must be positive, got {}", self.r_cut)));
        }
        if self.n_max < 1 {
            return Err(Error::Config("n_max must be at least 1".into()));
        }
        if !(self.sigma_atom > 0.0 && self.sigma_atom.is_finite()) {
            return Err(Error::Config(format!(
                "sigma_atom must be positive, got {}",
                self.sigma_atom
            )));
        }
        if self.species.is_empty() {
            return Err(Error::Config("species list is empty".into()));
        }
        if self.species.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("species must be strictly increasing".into()));
        }
        if self.species[0] == 0 {
            return Err(Error::Config("atomic number 0 in species".into()));
        }
        Ok(())
    }

    pub fn n_species_pairs(&self) -> usize {
        let s = self.species.len();
        s * (s + 1) / 2
    }

    /// Length of each per-atom vector.
    pub fn feature_dim(&self) -> usize {
        (self.l_max + 1) * self.n_max * (self.n_max + 1) / 2 * self.n_species_pairs()
    }
}

/// Precomputed radial basis and quadrature for one [`SoapConfig`].
#[derive(Debug, Clone)]
pub struct SoapCalculator {
    cfg: SoapConfig,
    nodes: Vec<f64>,
    /// `w_q r_q² φ_n(r_q)`, indexed `[n * Q + q]`.
    weighted_basis: Vec<f64>,
}

impl SoapCalculator {
    pub fn new(cfg: SoapConfig) -> Result<Self> {
        cfg.validate()?;
        let n_max = cfg.n_max;
        let alphas: Vec<f64> = (1..=n_max)
            .map(|n| {
                let r = cfg.r_cut * n as f64 / n_max as f64;
                -BASIS_DECAY.ln() / (r * r)
            })
            .collect();
        let overlap = Matrix::from_fn(n_max, |i, j| gaussian_moment(alphas[i] + alphas[j], cfg.r_cut));
        let (vals, vecs) = symmetric_eigen(&overlap);
        if vals.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Config("radial basis overlap is not positive definite".into()));
        }
        // Löwdin: W = V Λ^{-1/2} Vᵀ, φ_n = Σ_k W_nk g_k.
        let lowdin = Matrix::from_fn(n_max, |i, j| {
            (0..n_max).map(|k| vecs.get(i, k) * vecs.get(j, k) / vals[k].sqrt()).sum()
        });
        let (nodes, weights) = gauss_legendre(QUADRATURE_POINTS, 0.0, cfg.r_cut);
        let q = nodes.len();
        let mut weighted_basis = vec![0.0; n_max * q];
        for (iq, (&r, &w)) in nodes.iter().zip(&weights).enumerate() {
            let prim: Vec<f64> = alphas.iter().map(|a| (-a * r * r).exp()).collect();
            for n in 0..n_max {
                let phi: f64 = (0..n_max).map(|k| lowdin.get(n, k) * prim[k]).sum();
                weighted_basis[n * q + iq] = w * r * r * phi;
            }
        }
        Ok(Self {
            cfg,
            nodes,
            weighted_basis,
        })
    }

    pub fn config(&self) -> &SoapConfig {
        &self.cfg
    }

    pub fn feature_dim(&self) -> usize {
        self.cfg.feature_dim()
    }

    /// Values of the orthonormal radial basis function `n` at `r`.
    #[cfg(test)]
    pub(crate) fn radial_basis_quadrature(&self) -> (&[f64], &[f64]) {
        (&self.nodes, &self.weighted_basis)
    }

    pub fn compute(&self, s: &Structure) -> Result<AtomisticFeatureSet> {
        let cfg = &self.cfg;
        let species_index: Vec<usize> = s
            .atomic_numbers()
            .iter()
            .map(|z| {
                cfg.species.binary_search(z).map_err(|_| {
                    Error::Config(format!("atomic number {z} not in SOAP species list"))
                })
            })
            .collect::<Result<_>>()?;

        let n_species = cfg.species.len();
        let n_max = cfg.n_max;
        let n_lm = (cfg.l_max + 1) * (cfg.l_max + 1);
        let block = n_max * n_lm;
        let q = self.nodes.len();
        let inv_two_sigma2 = 0.5 / (cfg.sigma_atom * cfg.sigma_atom);
        let inv_sigma2 = 2.0 * inv_two_sigma2;

        let mut ylm = vec![0.0; n_lm];
        let mut bessel = vec![0.0; cfg.l_max + 1];
        // radial[l * Q + q]
        let mut radial = vec![0.0; (cfg.l_max + 1) * q];
        let mut coeffs = vec![0.0; n_species * block];
        let mut out = Vec::with_capacity(s.n_atoms() * cfg.feature_dim());

        let pos = s.positions();
        for (i, ri) in pos.iter().enumerate() {
            coeffs.iter_mut().for_each(|c| *c = 0.0);
            for (j, rj) in pos.iter().enumerate() {
                let (d, dir) = if i == j {
                    (0.0, [0.0, 0.0, 1.0])
                } else {
                    let d = distance(ri, rj);
                    (d, [rj[0] - ri[0], rj[1] - ri[1], rj[2] - ri[2]])
                };
                if d >= cfg.r_cut {
                    continue;
                }
                if i != j && d < super::MIN_SEPARATION {
                    return Err(Error::DegenerateGeometry {
                        first: i.min(j),
                        second: i.max(j),
                        distance: d,
                    });
                }
                let fcut = 0.5 * ((PI * d / cfg.r_cut).cos() + 1.0);
                real_spherical_harmonics(cfg.l_max, dir, &mut ylm);
                for (iq, &r) in self.nodes.iter().enumerate() {
                    let gauss = (-(r - d) * (r - d) * inv_two_sigma2).exp();
                    scaled_bessel_i(cfg.l_max, r * d * inv_sigma2, &mut bessel);
                    for (l, b) in bessel.iter().enumerate() {
                        radial[l * q + iq] = gauss * b;
                    }
                }
                let c = &mut coeffs[species_index[j] * block..(species_index[j] + 1) * block];
                for n in 0..n_max {
                    let basis = &self.weighted_basis[n * q..(n + 1) * q];
                    for l in 0..=cfg.l_max {
                        let integral: f64 =
                            basis.iter().zip(&radial[l * q..(l + 1) * q]).map(|(a, b)| a * b).sum();
                        let amp = 4.0 * PI * fcut * integral;
                        for m in (l * l)..((l + 1) * (l + 1)) {
                            c[n * n_lm + m] += amp * ylm[m];
                        }
                    }
                }
            }
            // p^{ab}_{n n' l} = Σ_m c^a_{nlm} c^b_{n'lm}, a ≤ b, n ≤ n'.
            for a in 0..n_species {
                for b in a..n_species {
                    let ca = &coeffs[a * block..(a + 1) * block];
                    let cb = &coeffs[b * block..(b + 1) * block];
                    for l in 0..=cfg.l_max {
                        let ms = (l * l)..((l + 1) * (l + 1));
                        for n in 0..n_max {
                            for np in n..n_max {
                                let p: f64 = ms
                                    .clone()
                                    .map(|m| ca[n * n_lm + m] * cb[np * n_lm + m])
                                    .sum();
                                out.push(p);
                            }
                        }
                    }
                }
            }
        }
        AtomisticFeatureSet::from_flat(cfg.feature_dim(), out)
    }
}

/// `∫_0^R r² exp(-a r²) dr`.
fn gaussian_moment(a: f64, r: f64) -> f64 {
    let sa = a.sqrt();
    PI.sqrt() / (4.0 * a * sa) * libm::erf(sa * r) - r * (-a * r * r).exp() / (2.0 * a)
}

/// One-shot convenience wrapper around [`SoapCalculator`].
pub fn soap_features(s: &Structure, cfg: &SoapConfig) -> Result<AtomisticFeatureSet> {
    SoapCalculator::new(cfg.clone())?.compute(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn water() -> Structure {
        Structure::new(
            vec![8, 1, 1],
            vec![[0.0, 0.0, 0.117], [0.0, 0.757, -0.469], [0.0, -0.757, -0.469]],
            None,
        )
        .unwrap()
    }

    #[test]
    fn dimension_formula() {
        let cfg = SoapConfig::new(vec![1, 8]);
        assert_eq!(cfg.feature_dim(), 2 * 6 * 3);
        let f = soap_features(&water(), &cfg).unwrap();
        assert_eq!(f.n_atoms(), 3);
        assert_eq!(f.dim(), 36);
    }

    #[test]
    fn radial_basis_is_orthonormal() {
        let calc = SoapCalculator::new(SoapConfig::new(vec![1])).unwrap();
        let (nodes, wb) = calc.radial_basis_quadrature();
        let q = nodes.len();
        // Recover φ_n from w r² φ_n and the quadrature weights.
        let (_, w) = gauss_legendre(QUADRATURE_POINTS, 0.0, 5.0);
        for n in 0..3 {
            for m in 0..3 {
                let s: f64 = (0..q)
                    .map(|i| wb[n * q + i] * wb[m * q + i] / (w[i] * nodes[i] * nodes[i]))
                    .sum();
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!((s - expect).abs() < 1e-8, "<{n}|{m}> = {s}");
            }
        }
    }

    #[test]
    fn unknown_species_is_rejected() {
        let cfg = SoapConfig::new(vec![1]);
        assert!(matches!(soap_features(&water(), &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = SoapConfig::new(vec![1]);
        cfg.r_cut = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = SoapConfig::new(vec![1]);
        cfg.n_max = 0;
        assert!(cfg.validate().is_err());
        let cfg = SoapConfig {
            species: vec![8, 1],
            ..SoapConfig::new(vec![1])
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn deterministic() {
        let cfg = SoapConfig::new(vec![1, 8]);
        let a = soap_features(&water(), &cfg).unwrap();
        let b = soap_features(&water(), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn neighbour_beyond_cutoff_is_invisible() {
        let cfg = SoapConfig::new(vec![1, 6]);
        let lone = Structure::new(vec![6], vec![[0.0; 3]], None).unwrap();
        let pair = Structure::new(vec![6, 1], vec![[0.0; 3], [10.0, 0.0, 0.0]], None).unwrap();
        let a = soap_features(&lone, &cfg).unwrap();
        let b = soap_features(&pair, &cfg).unwrap();
        assert_eq!(a.atom(0), b.atom(0));
    }

    #[test]
    fn permutation_permutes_rows() {
        let cfg = SoapConfig::new(vec![1, 8]);
        let s = water();
        let order = [2, 0, 1];
        let a = soap_features(&s, &cfg).unwrap();
        let b = soap_features(&s.permuted(&order), &cfg).unwrap();
        for (k, &src) in order.iter().enumerate() {
            for (x, y) in b.atom(k).iter().zip(a.atom(src)) {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }
    }
}
