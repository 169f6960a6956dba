use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, CliResult};

/// A file rendered in memory, written only after every computation succeeded.
#[derive(Debug)]
pub struct Artifact {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

/// `<prefix><suffix>`, e.g. `run` + `_t0.csv`.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Shortest representation that parses back to the same `f64`.
pub fn number(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn csv_table(path: PathBuf, header: &[&str], columns: &[&[f64]]) -> CliResult<Artifact> {
    let rows = columns.first().map_or(0, |c| c.len());
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let map_err = |e: csv::Error| CliError::Invariant(format!("csv encoding: {e}"));
    w.write_record(header).map_err(map_err)?;
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| number(c[i]))).map_err(map_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Invariant(format!("csv encoding: {e}")))?;
    Ok(Artifact { path, bytes })
}

pub fn json_document<T: Serialize>(path: PathBuf, value: &T) -> CliResult<Artifact> {
    let mut bytes = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Invariant(format!("json encoding: {e}")))?;
    bytes.push(b'\n');
    Ok(Artifact { path, bytes })
}

/// Writes every artifact through a temporary sibling and a rename. On failure
/// the files already renamed are removed again, so a failed run leaves
/// nothing behind.
pub fn write_all(artifacts: &[Artifact]) -> CliResult<()> {
    let mut done: Vec<&Path> = Vec::new();
    for a in artifacts {
        let tmp = with_suffix(&a.path, ".partial");
        let result = fs::write(&tmp, &a.bytes).and_then(|_| fs::rename(&tmp, &a.path));
        if let Err(source) = result {
            let _ = fs::remove_file(&tmp);
            for p in done {
                let _ = fs::remove_file(p);
            }
            return Err(CliError::Io {
                path: a.path.clone(),
                source,
            });
        }
        done.push(&a.path);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.0, -2.5, 1.0 / 54.0, 12.337005501361698, 3.2e-17, 1e300, 6.02e23, f64::MIN_POSITIVE] {
            let s = number(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(number(0.25), "0.25");
        assert_eq!(number(1e-12), "1e-12");
    }

    #[test]
    fn csv_uses_lf_and_one_header() {
        let a = csv_table(PathBuf::from("x.csv"), &["a", "b"], &[&[1.0, 2.0], &[0.5, 1e-9]]).unwrap();
        assert_eq!(String::from_utf8(a.bytes).unwrap(), "a,b\n1,0.5\n2,1e-9\n");
    }

    #[test]
    fn suffix_appends_to_prefix() {
        assert_eq!(with_suffix(Path::new("out/run"), "_t2.csv"), PathBuf::from("out/run_t2.csv"));
    }
}
