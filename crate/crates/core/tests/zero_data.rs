use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use prlb::residue::CharacterTable;
use prlb::zeros::{l_value, load_zero_file, scan_sign_changes, validate_zeros, ZeroArchive, ZeroSet};
use prlb::Error;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/zeros")
}

fn archive() -> ZeroArchive {
    ZeroArchive::open(&data_dir()).expect("shipped zero archive")
}

#[test]
fn shipped_archive_covers_the_test_moduli() {
    let arch = archive();
    assert!(arch.manifest.is_some());
    for k in [3u64, 4, 5, 8, 12] {
        let table = CharacterTable::new(k).unwrap();
        let found = arch.require(&table).unwrap();
        assert_eq!(found.len(), table.len() - 1);
        for (_, z) in found {
            assert!(z.len() >= 100, "k = {k}: {} zeros", z.len());
        }
    }
    // k = 7 ships nothing
    let t7 = CharacterTable::new(7).unwrap();
    match arch.require(&t7) {
        Err(Error::MissingZeroData { modulus: 7, characters }) => assert_eq!(characters.len(), 5),
        other => panic!("expected missing data, got {other:?}"),
    }
}

#[test]
fn first_zero_mod_4() {
    let arch = archive();
    let t4 = CharacterTable::new(4).unwrap();
    let z = arch.zeros_for(&t4, 1).unwrap();
    assert!((z.gammas[0] - 6.020_948_904_697_597).abs() < 1e-12);
    assert!(z.raw[0].starts_with("6.02094890469759665"));
}

#[test]
fn tampered_file_fails_checksum() {
    let dir = tempfile::tempdir().unwrap();
    for e in fs::read_dir(data_dir()).unwrap() {
        let p = e.unwrap().path();
        fs::copy(&p, dir.path().join(p.file_name().unwrap())).unwrap();
    }
    ZeroArchive::open(dir.path()).unwrap();
    let victim = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().contains("k4_"))
        .unwrap();
    let text = fs::read_to_string(&victim).unwrap().replacen("6.02094", "6.02095", 1);
    fs::write(&victim, text).unwrap();
    assert!(matches!(ZeroArchive::open(dir.path()), Err(Error::ZeroFormat { .. })));
}

#[test]
fn loaded_files_reject_bad_order() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    fs::write(&p, "# modulus: 4\n# character: 0,0/1,0,1/2\n# source: test\n3.0\n2.0\n").unwrap();
    assert!(matches!(load_zero_file(&p), Err(Error::ZeroFormat { .. })));
}

#[test]
fn zeros_up_to_height_100_validate() {
    let arch = archive();
    for z in arch.sets() {
        let low = z.truncated(z.count_below(100.0));
        let rep = validate_zeros(&low, 10_000).unwrap();
        assert!(rep.all_ok, "k = {} chi = {}: {:?}", z.modulus, z.character, rep.residuals.iter().map(|r| r.residual).fold(0.0, f64::max));
        let shifted: Vec<f64> = low.gammas.iter().take(5).map(|g| g + 1e-2).collect();
        let table = CharacterTable::new(z.modulus).unwrap();
        let bad = ZeroSet::new(&table, z.character, shifted, "shifted").unwrap();
        let rep = validate_zeros(&bad, 10_000).unwrap();
        assert!(rep.residuals.iter().all(|r| !r.ok));
    }
}

#[test]
fn scan_count_matches_loaded_count_mod_4() {
    let arch = archive();
    let t4 = CharacterTable::new(4).unwrap();
    let z = arch.zeros_for(&t4, 1).unwrap();
    let scanned = scan_sign_changes(&t4.primitive_values(1), 50.0, 0.01);
    assert_eq!(scanned.len(), z.count_below(50.0));
    for (s, g) in scanned.iter().zip(&z.gammas) {
        assert!((s - g).abs() < 0.01);
    }
}

#[test]
fn zero_counts_grow_superlinearly() {
    let arch = archive();
    for z in arch.sets() {
        let rate = |h: f64| z.count_below(h) as f64 / h;
        assert!(rate(50.0) < rate(100.0) && rate(100.0) < rate(200.0), "k = {} chi = {}", z.modulus, z.character);
    }
}

#[test]
fn conjugate_characters_mirror_zeros() {
    let arch = archive();
    let t5 = CharacterTable::new(5).unwrap();
    for chi in t5.non_principal().filter(|c| !c.is_real) {
        let conj = t5.conjugate(chi.index);
        let zs = arch.zeros_for(&t5, conj).unwrap();
        let values = t5.primitive_values(chi.index);
        for &g in zs.gammas.iter().take(10) {
            let v = l_value(&values, Complex64::new(0.5, -g), 10_000);
            assert!(v.norm() < 1e-6, "gamma = {g}");
        }
        let own = arch.zeros_for(&t5, chi.index).unwrap();
        assert_ne!(own.gammas[0], zs.gammas[0]);
    }
}

#[test]
fn imprimitive_characters_fall_back_to_their_primitive_zeros() {
    let arch = archive();
    let t12 = CharacterTable::new(12).unwrap();
    let t3 = CharacterTable::new(3).unwrap();
    let chi = t12.find_induced_from(&t3, 1).unwrap();
    let z = arch.zeros_for(&t12, chi).unwrap();
    assert_eq!(z.conductor, 3);
    assert_eq!(z.gammas, arch.zeros_for(&t3, 1).unwrap().gammas);
}
