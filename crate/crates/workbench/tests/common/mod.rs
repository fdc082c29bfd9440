#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

/// xorshift64*, enough to jitter geometries.
pub struct Jitter(u64);

impl Jitter {
    pub fn new(seed: u64) -> Self {
        Self(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn uniform(&mut self) -> f64 {
        self.0 ^= self.0 >> 12;
        self.0 ^= self.0 << 25;
        self.0 ^= self.0 >> 27;
        (self.0.wrapping_mul(0x2545_F491_4F6C_DD1D) >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// Distorted water molecules with a harmonic bond/angle energy in kcal/mol
/// when `kcal` is set, eV otherwise.
pub fn water_xyz(n: usize, seed: u64, kcal: bool) -> String {
    let mut r = Jitter::new(seed);
    let mut s = String::new();
    for i in 0..n {
        let d1 = 0.96 + 0.08 * (r.uniform() - 0.5);
        let d2 = 0.96 + 0.08 * (r.uniform() - 0.5);
        let a = 104.5f64.to_radians() + 0.3 * (r.uniform() - 0.5);
        let e_ev = 20.0 * ((d1 - 0.96f64).powi(2) + (d2 - 0.96f64).powi(2)) + 1.5 * (a - 104.5f64.to_radians()).powi(2) - 2080.0;
        let e = if kcal { e_ev / 0.0433641 } else { e_ev };
        writeln!(s, "3").unwrap();
        writeln!(s, "frame={i} energy={e:.12}").unwrap();
        writeln!(s, "O 0.0 0.0 0.0").unwrap();
        writeln!(s, "H {d1:.12} 0.0 0.0").unwrap();
        writeln!(s, "h {:.12} {:.12} 0.0", d2 * a.cos(), d2 * a.sin()).unwrap();
    }
    s
}

pub fn write_dataset(dir: &Path, n: usize, seed: u64) -> PathBuf {
    let p = dir.join("water.xyz");
    std::fs::write(&p, water_xyz(n, seed, false)).unwrap();
    p
}

pub fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlip-uq")).args(args).output().unwrap()
}

pub fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", p.as_ref().display()))
}

pub fn csv_rows(p: impl AsRef<Path>) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(p.as_ref()).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

pub fn summary_value(dir: &Path, key: &str) -> String {
    read(dir.join("summary.txt"))
        .lines()
        .find_map(|l| {
            let (k, v) = l.split_once('=')?;
            (k.trim() == key).then(|| v.trim().to_string())
        })
        .unwrap_or_else(|| panic!("no {key} in summary"))
}
