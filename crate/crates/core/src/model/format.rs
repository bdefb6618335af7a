//! Canonical complex files.
//!
//! A complex file is a UTF-8 JSON object with `name`, `generators`
//! (`{id, maslov, alexander}`) and `arrows` (`{from, to, u, v}`). Unknown
//! fields are ignored on read. Bundles hold one such object per line
//! (`.jsonl`, optionally gzip-compressed as `.jsonl.gz`). A manifest is a
//! JSON object with a `knots` array of `{name, file}` entries, paths relative
//! to the manifest.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{DiffEntry, FullComplex, Generator, HvArrow, QuotientComplex};
use crate::error::{Error, Result};

pub fn parse_complex(text: &str) -> Result<QuotientComplex> {
    serde_json::from_str(text).map_err(|source| Error::Parse {
        context: "complex".into(),
        source,
    })
}

/// Parses a JSON Lines bundle. Blank lines are skipped; a malformed line
/// yields an error entry instead of aborting the bundle.
pub fn parse_bundle(text: &str) -> Vec<Result<QuotientComplex>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|source| Error::Parse {
                context: format!("line {}", i + 1),
                source,
            })
        })
        .collect()
}

/// File bytes as text, gunzipping first when `gzip` is set.
pub fn decode_text(bytes: &[u8], gzip: bool) -> std::io::Result<String> {
    if gzip {
        let mut s = String::new();
        flate2::read::GzDecoder::new(bytes).read_to_string(&mut s)?;
        Ok(s)
    } else {
        String::from_utf8(bytes.to_vec()).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}

fn read_text(path: &Path) -> Result<String> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let bytes = fs::read(path).map_err(io)?;
    decode_text(&bytes, path.extension().is_some_and(|e| e == "gz")).map_err(io)
}

pub fn load_complex(path: &Path) -> Result<QuotientComplex> {
    let text = read_text(path)?;
    parse_complex(&text).map_err(|e| match e {
        Error::Parse { source, .. } => Error::Parse {
            context: path.display().to_string(),
            source,
        },
        e => e,
    })
}

pub fn load_bundle(path: &Path) -> Result<Vec<Result<QuotientComplex>>> {
    Ok(parse_bundle(&read_text(path)?))
}

/// Manifest entries as `(name, file)`, or `None` if the text is not a
/// manifest. A missing file marks a knot the exporter skipped.
pub fn parse_manifest(text: &str) -> Option<Vec<(String, Option<PathBuf>)>> {
    let m: Manifest = serde_json::from_str(text).ok()?;
    Some(m.knots.into_iter().map(|e| (e.name, e.file)).collect())
}

#[derive(Deserialize)]
struct Manifest {
    knots: Vec<ManifestEntry>,
}

#[derive(Deserialize)]
struct ManifestEntry {
    name: String,
    file: Option<PathBuf>,
}

fn is_bundle(path: &Path) -> bool {
    let s = path.to_string_lossy();
    s.ends_with(".jsonl") || s.ends_with(".jsonl.gz")
}

/// Collects every complex reachable from `path`: a directory (all complex
/// files and bundles inside, sorted by file name), a bundle, a manifest, or
/// a single complex file. Entries are labelled for error reporting.
pub fn load_inputs(path: &Path) -> Result<Vec<(String, Result<QuotientComplex>)>> {
    let mut out = Vec::new();
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|source| Error::Io {
                path: path.to_path_buf(),
                source,
            })?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && (is_bundle(p) || p.extension().is_some_and(|e| e == "json")))
            .collect();
        files.sort();
        for f in files {
            out.extend(load_inputs(&f)?);
        }
        return Ok(out);
    }
    let label = path.display().to_string();
    if is_bundle(path) {
        for (i, r) in load_bundle(path)?.into_iter().enumerate() {
            let l = match &r {
                Ok(qc) => qc.name.clone(),
                Err(_) => format!("{label}#{}", i + 1),
            };
            out.push((l, r));
        }
        return Ok(out);
    }
    let text = read_text(path)?;
    if let Some(entries) = parse_manifest(&text) {
        let base = path.parent().unwrap_or(Path::new("."));
        for (name, file) in entries {
            match file {
                Some(f) => out.push((name, load_complex(&base.join(f)))),
                None => out.push((name.clone(), Err(Error::Invalid(format!("{name}: skipped by exporter"))))),
            }
        }
        return Ok(out);
    }
    let r = parse_complex(&text).map_err(|e| match e {
        Error::Parse { source, .. } => Error::Parse { context: label.clone(), source },
        e => e,
    });
    let l = r.as_ref().map(|qc| qc.name.clone()).unwrap_or(label);
    out.push((l, r));
    Ok(out)
}

impl QuotientComplex {
    /// Canonical JSON text: generators sorted by (A, M, id), arrows by
    /// endpoints, one array element per line.
    pub fn to_canonical_json(&self) -> String {
        LiftedFile::from_quotient(self).to_json()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_canonical_json()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// On-disk form of a complex, with the diagonal arrows of a lift.
///
/// Diagonal arrows reuse the arrow schema with both powers positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedFile {
    pub name: String,
    pub generators: Vec<Generator>,
    pub arrows: Vec<HvArrow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonals: Option<Vec<HvArrow>>,
}

impl LiftedFile {
    pub fn from_quotient(qc: &QuotientComplex) -> Self {
        let c = qc.canonical();
        LiftedFile {
            name: c.name,
            generators: c.generators,
            arrows: c.arrows,
            diagonals: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Parse {
            context: "lifted complex".into(),
            source,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = String::new();
        s.push_str("{\n  \"name\": ");
        s.push_str(&serde_json::to_string(&self.name).expect("string serializes"));
        s.push_str(",\n  \"generators\": [");
        push_items(&mut s, &self.generators);
        s.push_str("],\n  \"arrows\": [");
        push_items(&mut s, &self.arrows);
        s.push(']');
        if let Some(d) = &self.diagonals {
            s.push_str(",\n  \"diagonals\": [");
            push_items(&mut s, d);
            s.push(']');
        }
        s.push_str("\n}\n");
        s
    }

    pub fn quotient(&self) -> QuotientComplex {
        QuotientComplex::new(self.name.clone(), self.generators.clone(), self.arrows.clone())
    }

    /// The full complex, after validating the quotient part and the grading
    /// laws of every diagonal. Does not check `d^2 = 0`.
    pub fn full_complex(&self) -> Result<FullComplex> {
        let qc = self.quotient();
        qc.ensure_valid()?;
        let gr = qc.gradings();
        let mut entries: Vec<DiffEntry> = self.arrows.iter().map(|a| entry(a.source, a.target, a.u_power)).collect();
        for (i, d) in self.diagonals.iter().flatten().enumerate() {
            let bad = |reason: &str| Error::ArrowExponent {
                index: i,
                from: d.source,
                to: d.target,
                reason: reason.to_string(),
            };
            if d.source >= gr.len() || d.target >= gr.len() {
                return Err(bad("unknown endpoint"));
            }
            if d.u_power < 1 || d.v_power < 1 {
                return Err(bad("diagonal powers must both be positive"));
            }
            if gr.maslov[d.target] != gr.maslov[d.source] - 1 + 2 * d.u_power
                || gr.alexander[d.target] != gr.alexander[d.source] + d.u_power - d.v_power
            {
                return Err(bad("gradings do not match the powers"));
            }
            entries.push(entry(d.source, d.target, d.u_power));
        }
        Ok(FullComplex::new(self.name.clone(), self.generators.clone(), entries))
    }
}

fn entry(source: usize, target: usize, u: i64) -> DiffEntry {
    DiffEntry {
        target,
        source,
        u_exponent: u as u32,
    }
}

pub fn load_lifted(path: &Path) -> Result<LiftedFile> {
    LiftedFile::parse(&read_text(path)?).map_err(|e| match e {
        Error::Parse { source, .. } => Error::Parse {
            context: path.display().to_string(),
            source,
        },
        e => e,
    })
}

fn push_items<T: Serialize>(s: &mut String, items: &[T]) {
    for (i, item) in items.iter().enumerate() {
        s.push_str(if i == 0 { "\n    " } else { ",\n    " });
        s.push_str(&serde_json::to_string(item).expect("plain structs serialize"));
    }
    if !items.is_empty() {
        s.push_str("\n  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TREFOIL: &str = r#"{"name":"3a1","generators":[{"id":0,"maslov":-1,"alexander":0},
        {"id":1,"maslov":0,"alexander":1},{"id":2,"maslov":-2,"alexander":-1}],
        "arrows":[{"from":0,"to":1,"u":1,"v":0},{"from":0,"to":2,"u":0,"v":1}],
        "extra":{"ignored":true}}"#;

    #[test]
    fn parses_and_ignores_unknown_fields() {
        let qc = parse_complex(TREFOIL).unwrap();
        assert_eq!(qc.name, "3a1");
        assert_eq!(qc.len(), 3);
        assert_eq!(qc.arrows[1], HvArrow { source: 0, target: 2, u_power: 0, v_power: 1 });
        assert!(qc.validate().is_empty());
    }

    #[test]
    fn canonical_output_is_sorted_and_rereadable() {
        let qc = parse_complex(TREFOIL).unwrap();
        let text = qc.to_canonical_json();
        assert!(!text.contains("extra"));
        let back = parse_complex(&text).unwrap();
        let alex: Vec<i64> = back.generators.iter().map(|g| g.alexander).collect();
        assert_eq!(alex, vec![-1, 0, 1]);
        assert_eq!(back.canonical(), qc.canonical());
    }

    #[test]
    fn malformed_input_is_an_error() {
        assert!(parse_complex("").is_err());
        assert!(parse_complex("{\"name\": 3}").is_err());
        assert!(parse_complex("[1,2]").is_err());
    }

    #[test]
    fn bundle_keeps_going_after_bad_line() {
        let text = format!("{}\nnot json\n\n{}\n", TREFOIL.replace('\n', ""), TREFOIL.replace('\n', ""));
        let items = parse_bundle(&text);
        assert_eq!(items.len(), 3);
        assert!(items[0].is_ok());
        assert!(items[1].is_err());
        assert!(items[2].is_ok());
    }

    #[test]
    fn directory_and_manifest_inputs() {
        let dir = std::env::temp_dir().join(format!("hfklift-fmt-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("a.json"), TREFOIL).unwrap();
        fs::write(dir.join("manifest.json"), r#"{"knots":[{"name":"3a1","file":"a.json"},{"name":"9n9"}]}"#).unwrap();
        let inputs = load_inputs(&dir.join("manifest.json")).unwrap();
        assert_eq!(inputs.len(), 2);
        assert!(inputs[0].1.is_ok());
        assert!(inputs[1].1.is_err());
        // directory: a.json plus the manifest (which expands to two entries)
        let all = load_inputs(&dir).unwrap();
        assert_eq!(all.len(), 3);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn lifted_file_round_trip() {
        let text = r#"{"name":"c","generators":[{"id":0,"maslov":4,"alexander":2},{"id":1,"maslov":3,"alexander":1},
            {"id":2,"maslov":2,"alexander":1}],"arrows":[{"from":0,"to":1,"u":0,"v":1}],
            "diagonals":[{"from":2,"to":1,"u":1,"v":1}]}"#;
        let f = LiftedFile::parse(text).unwrap();
        let fc = f.full_complex().unwrap();
        assert_eq!(fc.diagonals().len(), 1);
        assert_eq!(LiftedFile::parse(&fc.to_file().to_json()).unwrap(), f.full_complex().unwrap().to_file());
        let bad = text.replace(r#""to":1,"u":1,"v":1"#, r#""to":1,"u":1,"v":2"#);
        assert!(LiftedFile::parse(&bad).unwrap().full_complex().is_err());
    }

    #[test]
    fn gzip_text_decodes() {
        use std::io::Write;
        let mut enc = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
        enc.write_all(b"{}\n").unwrap();
        let gz = enc.finish().unwrap();
        assert_eq!(decode_text(&gz, true).unwrap(), "{}\n");
        assert!(decode_text(&gz, false).is_err());
        assert!(decode_text(b"plain", true).is_err());
    }

    proptest! {
        #[test]
        fn parser_never_panics(s in "\\PC*") {
            let _ = parse_complex(&s);
            let _ = parse_bundle(&s);
            if let Ok(f) = LiftedFile::parse(&s) {
                let _ = f.full_complex();
            }
            let _ = parse_manifest(&s);
        }

        #[test]
        fn decoder_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..256)) {
            let _ = decode_text(&bytes, true);
            let _ = decode_text(&bytes, false);
        }

        #[test]
        fn canonical_text_round_trips(qc in crate::model::tests::arb_valid_complex()) {
            let back = parse_complex(&qc.to_canonical_json()).unwrap();
            prop_assert_eq!(back, qc.canonical());
        }
    }
}
