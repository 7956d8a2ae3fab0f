use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// Writes `contents` to `path` via a sibling temporary file and a rename,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::io(format!("{}: not a file path", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(contents.as_bytes())?;
            f.sync_all()
        })
        .and_then(|_| fs::rename(&tmp, path));
    result.map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(format!("{}: {e}", path.display()))
    })
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))
}

/// A vector file: a JSON array of numbers.
pub fn read_vector(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::parse(format!(
            "{}: expected a JSON array of numbers: {e}",
            path.display()
        ))
    })
}

pub fn vector_json(v: &[f64]) -> String {
    let mut s = serde_json::to_string(v).expect("finite vectors serialize");
    s.push('\n');
    s
}

pub fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Parses `4x6,3x13` or `4,4,3` into a flat list.
pub fn parse_repeated(spec: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (value, count) = match item.split_once(['x', '^']) {
            Some((v, c)) => (
                v,
                c.parse::<usize>()
                    .map_err(|_| format!("bad repeat count in {item:?}"))?,
            ),
            None => (item, 1),
        };
        let value = value
            .parse::<usize>()
            .map_err(|_| format!("bad value in {item:?}"))?;
        out.extend(std::iter::repeat_n(value, count));
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}
