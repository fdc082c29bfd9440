mod common;

use common::water_xyz;
use mlip_uq::xyz::{parse_xyz_str, write_xyz};
use mlip_uq_core::data::EnergyUnit;

#[test]
fn xyz_round_trip() {
    let ds = parse_xyz_str(&water_xyz(25, 4, false), "w", EnergyUnit::ElectronVolt).unwrap();
    let back = parse_xyz_str(&write_xyz(&ds), "w", EnergyUnit::ElectronVolt).unwrap();
    assert_eq!(ds.len(), back.len());
    for (a, b) in ds.structures().iter().zip(back.structures()) {
        assert_eq!(a.atomic_numbers(), b.atomic_numbers());
        assert!((a.energy().unwrap() - b.energy().unwrap()).abs() < 1e-10);
        for (p, q) in a.positions().iter().zip(b.positions()) {
            for k in 0..3 {
                assert!((p[k] - q[k]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn kcal_input_is_converted() {
    let ev = parse_xyz_str(&water_xyz(5, 9, false), "w", EnergyUnit::ElectronVolt).unwrap();
    let kc = parse_xyz_str(&water_xyz(5, 9, true), "w", EnergyUnit::KcalPerMol).unwrap();
    for (a, b) in ev.energies().iter().zip(kc.energies()) {
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }
}
