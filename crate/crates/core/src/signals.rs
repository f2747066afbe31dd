//! Signal generation and ingestion.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Where a test signal comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalSource {
    /// `cos(2 pi x^2)` sampled on the experiment grid.
    Chirp,
    /// Single-column plain-text or CSV file of samples, mapped uniformly
    /// onto the interval and linearly resampled onto the experiment grid.
    File(PathBuf),
}

impl SignalSource {
    pub fn label(&self) -> String {
        match self {
            SignalSource::Chirp => "chirp".to_string(),
            SignalSource::File(p) => p.display().to_string(),
        }
    }
}

/// Samples `cos(2 pi x^2)` on the closed uniform grid over `[c, d]`.
pub fn gen_chirp(c: i64, d: i64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 {
        return Err(Error::arg("chirp needs at least 2 samples"));
    }
    if d <= c {
        return Err(Error::arg(format!("empty interval [{c}, {d}]")));
    }
    let step = (d - c) as f64 / (samples - 1) as f64;
    Ok((0..samples)
        .map(|i| {
            let x = c as f64 + i as f64 * step;
            (2.0 * std::f64::consts::PI * x * x).cos()
        })
        .collect())
}

/// Loads a single-column signal file and linearly resamples it onto a
/// `target_len`-point uniform grid. The file's samples are taken as uniform
/// over the experiment interval. Returns the resampled signal and the
/// original sample count. When the counts already agree (or the file holds
/// an exact odd refinement like `2S - 1` points), grid values pass through
/// bit-exactly.
pub fn load_signal(path: &Path, target_len: usize) -> Result<(Vec<f64>, usize)> {
    if target_len < 2 {
        return Err(Error::arg("target grid needs at least 2 samples"));
    }
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let cleaned = line.trim().trim_end_matches(',');
        if cleaned.is_empty() {
            continue;
        }
        let value: f64 = cleaned.parse().map_err(|_| Error::SignalInput {
            line: Some(lineno + 1),
            message: format!("not a number: {cleaned:?}"),
        })?;
        if !value.is_finite() {
            return Err(Error::SignalInput {
                line: Some(lineno + 1),
                message: "non-finite sample".to_string(),
            });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::SignalInput {
            line: None,
            message: format!("no samples in {}", path.display()),
        });
    }
    if values.len() < 2 {
        return Err(Error::SignalInput {
            line: None,
            message: "need at least 2 samples to resample".to_string(),
        });
    }
    let original = values.len();
    Ok((resample_linear(&values, target_len), original))
}

/// Linear interpolation from one closed uniform grid to another. Exact at
/// shared grid points (the interpolation weight is computed from integer
/// arithmetic, so coincident nodes pass values through unchanged).
fn resample_linear(values: &[f64], target_len: usize) -> Vec<f64> {
    let m = values.len();
    if m == target_len {
        return values.to_vec();
    }
    let den = (target_len - 1) as u64;
    (0..target_len)
        .map(|j| {
            let num = j as u64 * (m as u64 - 1);
            let idx = (num / den) as usize;
            let rem = num % den;
            if rem == 0 {
                values[idx]
            } else {
                let frac = rem as f64 / den as f64;
                values[idx] * (1.0 - frac) + values[idx + 1] * frac
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn chirp_known_values() {
        // Grid [0, 8] with 1025 samples: x = 0, 0.5, 1.0 land on indices
        // 0, 64, 128.
        let f = gen_chirp(0, 8, 1025).unwrap();
        assert!((f[0] - 1.0).abs() < 1e-15);
        assert!(f[64].abs() < 1e-12); // cos(pi/2)
        assert!((f[128] - 1.0).abs() < 1e-12); // cos(2 pi)
    }

    #[test]
    fn chirp_validates_arguments() {
        assert!(gen_chirp(0, 8, 1).is_err());
        assert!(gen_chirp(3, 3, 10).is_err());
    }

    #[test]
    fn identity_load_passes_samples_through() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        let values: Vec<f64> = (0..9).map(|i| (i as f64) * 0.25 - 1.0).collect();
        for v in &values {
            writeln!(file, "{v}").unwrap();
        }
        let (loaded, original) = load_signal(file.path(), 9).unwrap();
        assert_eq!(original, 9);
        assert_eq!(loaded, values);
    }

    #[test]
    fn odd_refinement_decimates_exactly() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        let fine: Vec<f64> = (0..17).map(|i| (i as f64).sin()).collect();
        for v in &fine {
            writeln!(file, "{v}").unwrap();
        }
        let (loaded, _) = load_signal(file.path(), 9).unwrap();
        let expected: Vec<f64> = (0..9).map(|i| fine[2 * i]).collect();
        assert_eq!(loaded, expected);
    }

    #[test]
    fn empty_file_is_an_error() {
        let file = tempfile::NamedTempFile::new().unwrap();
        assert!(load_signal(file.path(), 9).is_err());
    }

    #[test]
    fn bad_line_is_reported_with_its_number() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "1.0\n2.0\noops\n4.0").unwrap();
        let err = load_signal(file.path(), 9).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn upsampling_interpolates_between_nodes() {
        let values = [0.0, 1.0];
        let up = resample_linear(&values, 5);
        assert_eq!(up, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }
}
