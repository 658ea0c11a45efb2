//! Input parsing and output plumbing shared by the subcommands.

use std::fs;
use std::io::Write;
use std::path::Path;

use dyck_entropy::matching::Instance;
use dyck_entropy::SignPath;
use num_bigint::BigUint;
use serde_json::Value;
use tempfile::NamedTempFile;

use crate::CliError;

/// A color ordering, with the coordinates when they were given.
pub struct PathInput {
    pub path: SignPath,
    pub instance: Option<Instance>,
}

/// Reads a `color,coordinate` CSV. Colors are `w`/`white` or `b`/`black`;
/// a header line and blank lines are skipped.
pub fn read_instance_csv(file: &Path) -> Result<Instance, CliError> {
    let text = fs::read_to_string(file)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", file.display())))?;
    let (mut whites, mut blacks) = (Vec::new(), Vec::new());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |what: &str| CliError::Validation(format!("{}:{}: {what}", file.display(), lineno + 1));
        let mut fields = line.split(',').map(str::trim);
        let (color, coord) = match (fields.next(), fields.next(), fields.next()) {
            (Some(c), Some(x), None) => (c, x),
            _ => return Err(bad("expected two fields: color,coordinate")),
        };
        let value: f64 = match coord.parse() {
            Ok(v) => v,
            Err(_) if lineno == 0 => continue,
            Err(_) => return Err(bad("coordinate is not a number")),
        };
        match color.to_ascii_lowercase().as_str() {
            "w" | "white" => whites.push(value),
            "b" | "black" => blacks.push(value),
            _ => return Err(bad("color must be w/white or b/black")),
        }
    }
    Ok(Instance::new(whites, blacks)?)
}

pub fn read_path(path: Option<&str>, instance: Option<&Path>) -> Result<PathInput, CliError> {
    match (path, instance) {
        (Some(text), None) => Ok(PathInput {
            path: text.parse()?,
            instance: None,
        }),
        (None, Some(file)) => {
            let inst = read_instance_csv(file)?;
            Ok(PathInput {
                path: dyck_entropy::paths::from_instance(&inst),
                instance: Some(inst),
            })
        }
        _ => Err(CliError::Validation("give exactly one of --path or --instance".into())),
    }
}

/// Big counts as JSON numbers when they fit in a `u64`, else as strings.
pub fn count_json(z: &BigUint) -> Value {
    match u64::try_from(z) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(z.to_string()),
    }
}

/// Floats for CSV output: 17 significant digits, '.' decimal.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Parses `10`, `2,4,8`, `10..50` (inclusive) and `10..50:10`, mixed with
/// commas.
pub fn parse_sizes(spec: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Validation(format!("invalid size list '{spec}'"));
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((lo, rest)) = item.split_once("..") {
            let (hi, step) = match rest.split_once(':') {
                Some((h, s)) => (h, s.parse::<usize>().map_err(|_| bad())?),
                None => (rest, 1),
            };
            let lo: usize = lo.parse().map_err(|_| bad())?;
            let hi: usize = hi.parse().map_err(|_| bad())?;
            if step == 0 || lo > hi {
                return Err(bad());
            }
            out.extend((lo..=hi).step_by(step));
        } else {
            out.push(item.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Writes `contents` to `out` through a temporary file in the same
/// directory, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents.as_bytes())
                .map_err(|e| CliError::Internal(format!("stdout: {e}")))
        }
        Some(file) => write_atomic(file, contents.as_bytes()),
    }
}

pub fn write_atomic(file: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match file.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| CliError::Validation(format!("cannot write {}: {e}", file.display()));
    let mut tmp = NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(file).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_lists() {
        assert_eq!(parse_sizes("5").unwrap(), vec![5]);
        assert_eq!(parse_sizes("1,3, 7").unwrap(), vec![1, 3, 7]);
        assert_eq!(parse_sizes("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_sizes("10..40:10,100").unwrap(), vec![10, 20, 30, 40, 100]);
        assert!(parse_sizes("5..2").is_err());
        assert!(parse_sizes("a").is_err());
        assert!(parse_sizes("").is_err());
        assert!(parse_sizes("1..4:0").is_err());
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1f64, std::f64::consts::LN_2, -1.2886078324507664, 1e-300, 12345.678] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_opt(None), "");
    }

    #[test]
    fn big_counts() {
        assert_eq!(count_json(&BigUint::from(7u32)), Value::from(7u64));
        let big = BigUint::from(u64::MAX) * 3u32;
        assert_eq!(count_json(&big), Value::from(big.to_string()));
    }
}
