//! Critical-line zero ordinates of Dirichlet L-functions: parsing, archive
//! lookup by character values, and numerical checks.
//!
//! File format: header lines `# modulus: K`, `# character: v0,v1,...`
//! (the value of the character at `a = 0..K-1`, as `n/d` turn fractions
//! with `0` off the units) and `# source: ...`, then one positive ordinate
//! per line in strictly ascending order.

mod lfunction;

pub use lfunction::{hurwitz_zeta, l_value, ln_gamma, RealRotation};

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::residue::{Angle, CharacterTable};

/// Zeros `1/2 + i gamma`, `gamma > 0`, of one `L(s, chi)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub modulus: u64,
    /// Index in the canonical character table of `modulus`.
    pub character: usize,
    pub conductor: u64,
    pub fingerprint: String,
    pub gammas: Vec<f64>,
    /// Ordinates exactly as written in the source.
    pub raw: Vec<String>,
    pub source: String,
    pub max_height: f64,
    pub path: Option<PathBuf>,
    /// Values of the inducing primitive character modulo `conductor`.
    pub primitive: Vec<Option<Angle>>,
}

impl ZeroSet {
    /// Builds a set from ordinates, checking order and positivity.
    pub fn new(table: &CharacterTable, character: usize, gammas: Vec<f64>, source: &str) -> Result<Self> {
        let raw = gammas.iter().map(|g| format!("{g:?}")).collect();
        Self::assemble(table, character, gammas, raw, source.to_string(), None)
    }

    fn assemble(
        table: &CharacterTable,
        character: usize,
        gammas: Vec<f64>,
        raw: Vec<String>,
        source: String,
        path: Option<PathBuf>,
    ) -> Result<Self> {
        let fail = |reason: String| Error::ZeroFormat {
            path: path.clone().unwrap_or_default(),
            reason,
        };
        for (i, &g) in gammas.iter().enumerate() {
            if !(g > 0.0) || !g.is_finite() {
                return Err(fail(format!("ordinate {g} at position {} is not positive", i + 1)));
            }
            if i > 0 && g <= gammas[i - 1] {
                return Err(fail(format!(
                    "ordinates not strictly ascending at position {} ({} after {})",
                    i + 1,
                    g,
                    gammas[i - 1]
                )));
            }
        }
        let chi = table.character(character);
        Ok(Self {
            modulus: table.modulus(),
            character,
            conductor: chi.conductor,
            fingerprint: table.fingerprint(character),
            max_height: gammas.last().copied().unwrap_or(0.0),
            gammas,
            raw,
            source,
            path,
            primitive: table.primitive_values(character),
        })
    }

    /// At least one zero is needed for a Bessel product.
    pub fn is_usable(&self) -> bool {
        !self.gammas.is_empty()
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn count_below(&self, height: f64) -> usize {
        self.gammas.partition_point(|&g| g <= height)
    }

    /// The first `n` zeros.
    pub fn truncated(&self, n: usize) -> ZeroSet {
        let n = n.min(self.gammas.len());
        let mut z = self.clone();
        z.gammas.truncate(n);
        z.raw.truncate(n);
        z.max_height = z.gammas.last().copied().unwrap_or(0.0);
        z
    }
}

/// Parses the text of a zero file.
pub fn parse_zero_text(text: &str, path: &Path) -> Result<ZeroSet> {
    let fail = |reason: String| Error::ZeroFormat {
        path: path.to_path_buf(),
        reason,
    };
    let mut modulus = None;
    let mut fingerprint = None;
    let mut source = String::new();
    let mut gammas = Vec::new();
    let mut raw = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            if let Some((key, value)) = h.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "modulus" => {
                        modulus = Some(
                            value
                                .parse::<u64>()
                                .map_err(|_| fail(format!("bad modulus {value:?}")))?,
                        )
                    }
                    "character" => fingerprint = Some(value.to_string()),
                    "source" => source = value.to_string(),
                    _ => {}
                }
            }
            continue;
        }
        let g: f64 = line
            .parse()
            .map_err(|_| fail(format!("line {}: cannot parse {line:?}", lineno + 1)))?;
        gammas.push(g);
        raw.push(line.to_string());
    }
    let modulus = modulus.ok_or_else(|| fail("missing '# modulus:' header".into()))?;
    let fingerprint = fingerprint.ok_or_else(|| fail("missing '# character:' header".into()))?;
    let table = CharacterTable::new(modulus).map_err(|e| fail(e.to_string()))?;
    let character = table
        .find_fingerprint(&fingerprint)
        .ok_or_else(|| fail(format!("no character modulo {modulus} has values {fingerprint}")))?;
    ZeroSet::assemble(&table, character, gammas, raw, source, Some(path.to_path_buf()))
}

pub fn load_zero_file(path: &Path) -> Result<ZeroSet> {
    let text = fs::read_to_string(path)?;
    parse_zero_text(&text, path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub modulus: u64,
    #[serde(default)]
    pub conductor: Option<u64>,
    pub character: String,
    pub sha256: String,
    #[serde(default)]
    pub zeros: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub generator: Option<String>,
    pub files: Vec<ManifestEntry>,
}

/// All zero files in a directory, with manifest checksums enforced.
#[derive(Debug, Clone)]
pub struct ZeroArchive {
    pub root: PathBuf,
    pub manifest: Option<Manifest>,
    sets: Vec<ZeroSet>,
}

/// Coverage of a modulus by an archive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Coverage {
    pub modulus: u64,
    pub complete: bool,
    pub missing: Vec<usize>,
}

impl ZeroArchive {
    pub fn open(root: &Path) -> Result<Self> {
        if !root.is_dir() {
            return Err(Error::Io(std::io::Error::new(
                std::io::ErrorKind::NotFound,
                format!("zero directory {} not found", root.display()),
            )));
        }
        let manifest_path = root.join("manifest.json");
        let manifest: Option<Manifest> = if manifest_path.exists() {
            Some(serde_json::from_str(&fs::read_to_string(&manifest_path)?)?)
        } else {
            None
        };
        let mut names: Vec<PathBuf> = fs::read_dir(root)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "txt"))
            .collect();
        names.sort();
        let mut sets = Vec::with_capacity(names.len());
        for path in names {
            let bytes = fs::read(&path)?;
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
            if let Some(m) = &manifest {
                if let Some(entry) = m.files.iter().find(|e| e.file == name) {
                    let digest = hex::encode(Sha256::digest(&bytes));
                    if digest != entry.sha256 {
                        return Err(Error::ZeroFormat {
                            path: path.clone(),
                            reason: "checksum differs from manifest".into(),
                        });
                    }
                }
            }
            let text = String::from_utf8(bytes).map_err(|_| Error::ZeroFormat {
                path: path.clone(),
                reason: "not UTF-8".into(),
            })?;
            sets.push(parse_zero_text(&text, &path)?);
        }
        Ok(Self {
            root: root.to_path_buf(),
            manifest,
            sets,
        })
    }

    pub fn from_sets(sets: Vec<ZeroSet>) -> Self {
        Self {
            root: PathBuf::new(),
            manifest: None,
            sets,
        }
    }

    pub fn sets(&self) -> &[ZeroSet] {
        &self.sets
    }

    /// Zeros for character `chi` of `table`: a file for that exact
    /// character, else any file whose character is induced by the same
    /// primitive character (zeros on the critical line coincide).
    pub fn zeros_for(&self, table: &CharacterTable, chi: usize) -> Option<&ZeroSet> {
        let k = table.modulus();
        if let Some(z) = self.sets.iter().find(|z| z.modulus == k && z.character == chi) {
            return Some(z);
        }
        let f = table.character(chi).conductor;
        let target = table.primitive_values(chi);
        self.sets
            .iter()
            .filter(|z| z.conductor == f && z.primitive == target)
            .min_by(|a, b| b.len().cmp(&a.len()).then(a.modulus.cmp(&b.modulus)))
    }

    /// Zero sets for every non-principal character, or the list of gaps.
    pub fn require(&self, table: &CharacterTable) -> Result<Vec<(usize, &ZeroSet)>> {
        let mut found = Vec::new();
        let mut missing = Vec::new();
        for chi in table.non_principal() {
            match self.zeros_for(table, chi.index) {
                Some(z) if z.is_usable() => found.push((chi.index, z)),
                _ => missing.push(chi.index),
            }
        }
        if missing.is_empty() {
            Ok(found)
        } else {
            Err(Error::MissingZeroData {
                modulus: table.modulus(),
                characters: missing,
            })
        }
    }

    pub fn coverage(&self, table: &CharacterTable) -> Coverage {
        let missing = match self.require(table) {
            Ok(_) => Vec::new(),
            Err(Error::MissingZeroData { characters, .. }) => characters,
            Err(_) => Vec::new(),
        };
        Coverage {
            modulus: table.modulus(),
            complete: missing.is_empty(),
            missing,
        }
    }

    /// Moduli that have at least one file, with file counts.
    pub fn moduli(&self) -> BTreeMap<u64, usize> {
        let mut m = BTreeMap::new();
        for z in &self.sets {
            *m.entry(z.modulus).or_insert(0) += 1;
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZeroResidual {
    pub gamma: f64,
    pub residual: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub modulus: u64,
    pub character: usize,
    pub terms: usize,
    pub tolerance: f64,
    pub residuals: Vec<ZeroResidual>,
    pub all_ok: bool,
}

/// Residual tolerance for `|L(1/2 + i gamma)|`, calibrated on the first
/// zeros modulo 4, where true ordinates give residuals near `1e-13`.
pub const VALIDATION_TOLERANCE: f64 = 1e-6;

/// `|L(1/2 + i gamma, chi)|` for every ordinate, using the primitive
/// character (same critical-line zeros).
pub fn validate_zeros(zs: &ZeroSet, terms: usize) -> Result<ValidationReport> {
    if zs.conductor == 1 {
        return Err(Error::Unsupported(
            "validation needs a non-principal character".into(),
        ));
    }
    let residuals: Vec<ZeroResidual> = zs
        .gammas
        .iter()
        .map(|&g| {
            let r = l_value(&zs.primitive, Complex64::new(0.5, g), terms).norm();
            ZeroResidual {
                gamma: g,
                residual: r,
                ok: r < VALIDATION_TOLERANCE,
            }
        })
        .collect();
    Ok(ValidationReport {
        modulus: zs.modulus,
        character: zs.character,
        terms,
        tolerance: VALIDATION_TOLERANCE,
        all_ok: residuals.iter().all(|r| r.ok),
        residuals,
    })
}

/// Sign changes of the real rotation `Z(t)` on the grid `step, 2 step, ..`
/// up to `height`; each is a zero of `L(1/2 + it, chi)`.
pub fn scan_sign_changes(primitive: &[Option<Angle>], height: f64, step: f64) -> Vec<f64> {
    let rot = RealRotation::new(primitive.to_vec());
    let mut out = Vec::new();
    let mut prev_t = step;
    let mut prev = rot.z(prev_t, 0);
    let mut i = 2u64;
    loop {
        let t = step * i as f64;
        if t > height {
            break;
        }
        let v = rot.z(t, 0);
        if v != 0.0 && prev != 0.0 && v.signum() != prev.signum() {
            out.push(0.5 * (prev_t + t));
        }
        if v != 0.0 {
            prev = v;
            prev_t = t;
        }
        i += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mod4_text(body: &str) -> String {
        format!("# modulus: 4\n# character: 0,0/1,0,1/2\n# source: test\n{body}")
    }

    #[test]
    fn parses_and_matches_character() {
        let z = parse_zero_text(&mod4_text("6.0209489046975966549\n10.243770304166554552\n"), Path::new("t")).unwrap();
        assert_eq!(z.modulus, 4);
        assert_eq!(z.character, 1);
        assert_eq!(z.conductor, 4);
        assert_eq!(z.raw[0], "6.0209489046975966549");
        assert_eq!(z.max_height, 10.243770304166554552);
    }

    #[test]
    fn rejects_bad_order_and_sign() {
        let e = parse_zero_text(&mod4_text("3.0\n2.0\n"), Path::new("t")).unwrap_err();
        assert!(matches!(e, Error::ZeroFormat { ref reason, .. } if reason.contains("ascending")));
        assert!(parse_zero_text(&mod4_text("3.0\n3.0\n"), Path::new("t")).is_err());
        assert!(parse_zero_text(&mod4_text("-1.0\n"), Path::new("t")).is_err());
        assert!(parse_zero_text(&mod4_text("0\n"), Path::new("t")).is_err());
        let wrong = "# modulus: 4\n# character: 0,1/2,0,1/2\n1.0\n";
        assert!(parse_zero_text(wrong, Path::new("t")).is_err());
    }

    #[test]
    fn empty_list_is_loaded_but_unusable() {
        let z = parse_zero_text(&mod4_text(""), Path::new("t")).unwrap();
        assert!(!z.is_usable());
    }

    #[test]
    fn validation_separates_true_and_shifted() {
        let table = CharacterTable::new(4).unwrap();
        let g = 6.020_948_904_697_597;
        let z = ZeroSet::new(&table, 1, vec![g, g + 1e-2], "test").unwrap();
        let rep = validate_zeros(&z, 10_000).unwrap();
        assert!(rep.residuals[0].residual < 1e-10);
        assert!(!rep.residuals[1].ok);
        let p = ZeroSet::new(&table, 0, vec![14.1], "test").unwrap();
        assert!(matches!(validate_zeros(&p, 100), Err(Error::Unsupported(_))));
    }

    #[test]
    fn scan_finds_first_zeros_mod_4() {
        let table = CharacterTable::new(4).unwrap();
        let zs = scan_sign_changes(&table.primitive_values(1), 13.5, 0.01);
        assert_eq!(zs.len(), 3);
        assert!((zs[0] - 6.0209).abs() < 0.01);
    }
}
