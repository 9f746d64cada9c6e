//! Spectral maps over a `(k, omega)` grid and their on-disk formats.
//!
//! CSV: a header row `k\omega,w_0,w_1,...` followed by one row per `k`,
//! each value written as `re+imi` with nine significant digits.
//!
//! Binary: the magic `USCPOLv1`, then `n_k` and `n_omega` as little-endian
//! `u32`, the `k` values, the `omega` values, and the entries as
//! `(re, im)` pairs, all little-endian `f64`, row-major with `k` slow.

use std::io::{BufRead, Read, Write};

use num_complex::Complex64;
use rayon::prelude::*;

use super::transmission;
use crate::params::{CavityDispersion, SystemParams};
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"USCPOLv1";

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMap {
    pub k: Vec<f64>,
    pub omega: Vec<f64>,
    /// Row-major, `values[i * omega.len() + j]` at `(k[i], omega[j])`.
    pub values: Vec<Complex64>,
}

impl SpectralMap {
    pub fn new(k: Vec<f64>, omega: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::Empty("k grid"));
        }
        if omega.is_empty() {
            return Err(Error::Empty("omega grid"));
        }
        if values.len() != k.len() * omega.len() {
            return Err(Error::Format(format!(
                "{} values for a {}x{} grid",
                values.len(),
                k.len(),
                omega.len()
            )));
        }
        Ok(Self { k, omega, values })
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        let n = self.omega.len();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.omega.len() + j]
    }

    /// `|T|^2` along one `omega` column.
    pub fn intensity_column(&self, j: usize) -> Vec<f64> {
        (0..self.k.len()).map(|i| self.get(i, j).norm_sqr()).collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Format(e.to_string());
        write!(w, "k\\omega").map_err(io)?;
        for om in &self.omega {
            write!(w, ",{om:.8e}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
        for (i, k) in self.k.iter().enumerate() {
            write!(w, "{k:.8e}").map_err(io)?;
            for z in self.row(i) {
                write!(w, ",{:.8e}{:+.8e}i", z.re, z.im).map_err(io)?;
            }
            writeln!(w).map_err(io)?;
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate();
        let bad = |line: usize, msg: String| Error::Format(format!("line {}: {msg}", line + 1));
        let (_, header) = lines.next().ok_or(Error::Empty("spectral map"))?;
        let header = header.map_err(|e| Error::Format(e.to_string()))?;
        let omega = header
            .split(',')
            .skip(1)
            .map(|s| s.trim().parse::<f64>().map_err(|e| bad(0, format!("`{s}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let (mut k, mut values) = (Vec::new(), Vec::new());
        for (n, line) in lines {
            let line = line.map_err(|e| Error::Format(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut cells = line.split(',');
            let first = cells.next().unwrap_or_default();
            k.push(first.trim().parse::<f64>().map_err(|e| bad(n, format!("`{first}`: {e}")))?);
            let before = values.len();
            for cell in cells {
                values.push(parse_complex(cell.trim()).ok_or_else(|| bad(n, format!("bad complex `{cell}`")))?);
            }
            if values.len() - before != omega.len() {
                return Err(bad(n, format!("expected {} values", omega.len())));
            }
        }
        Self::new(k, omega, values)
    }

    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        let len = |n: usize| u32::try_from(n).map_err(|_| Error::Format(format!("grid of {n} points too large")));
        let mut buf = Vec::with_capacity(16 + 8 * (self.k.len() + self.omega.len() + 2 * self.values.len()));
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&len(self.k.len())?.to_le_bytes());
        buf.extend_from_slice(&len(self.omega.len())?.to_le_bytes());
        for x in self.k.iter().chain(&self.omega) {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        for z in &self.values {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        w.write_all(&buf).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(|e| Error::Format(e.to_string()))?;
        if bytes.len() < 16 || &bytes[..8] != MAGIC {
            return Err(Error::Format("missing USCPOLv1 header".into()));
        }
        let nk = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
        let nw = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let floats = nk + nw + 2 * nk * nw;
        if bytes.len() != 16 + 8 * floats {
            return Err(Error::Format(format!(
                "expected {} bytes for a {nk}x{nw} map, found {}",
                16 + 8 * floats,
                bytes.len()
            )));
        }
        let data: Vec<f64> = bytes[16..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let k = data[..nk].to_vec();
        let omega = data[nk..nk + nw].to_vec();
        let values = data[nk + nw..].chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
        Self::new(k, omega, values)
    }
}

// `re+imi` / `re-imi`, where the split is the last sign not part of an exponent.
fn parse_complex(s: &str) -> Option<Complex64> {
    let body = s.strip_suffix('i')?;
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))?;
    Some(Complex64::new(body[..split].parse().ok()?, body[split..].parse().ok()?))
}

/// Transmission over the grid, rows evaluated in parallel.
pub fn transmission_map(
    p: &SystemParams,
    dispersion: &CavityDispersion,
    k_grid: &[f64],
    omega_grid: &[f64],
) -> Result<SpectralMap> {
    let rows = k_grid
        .par_iter()
        .map(|&k| {
            let wk = dispersion.omega(k);
            omega_grid.iter().map(|&w| transmission(p, wk, w)).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    SpectralMap::new(k_grid.to_vec(), omega_grid.to_vec(), rows.concat())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SpectralMap {
        let p = SystemParams::new(1.0, 0.5, 0.1).unwrap();
        transmission_map(&p, &CavityDispersion::default(), &[0.1, 0.5, 1.5], &[0.2, 0.9, 1.3, 2.0]).unwrap()
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let m = sample();
        let mut buf = Vec::new();
        m.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], MAGIC);
        assert_eq!(SpectralMap::read_binary(&buf[..]).unwrap(), m);
        assert!(SpectralMap::read_binary(&buf[..buf.len() - 1]).is_err());
        assert!(SpectralMap::read_binary(&b"USCPOLv2"[..]).is_err());
    }

    #[test]
    fn csv_round_trip_to_nine_digits() {
        let m = sample();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k\\omega,2.00000000e-1,"));
        let back = SpectralMap::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.k.len(), 3);
        for (a, b) in m.values.iter().zip(&back.values) {
            assert!((a - b).norm() <= 1e-8 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn complex_cells() {
        assert_eq!(parse_complex("1.5e-3-2e+1i"), Some(Complex64::new(1.5e-3, -20.0)));
        assert_eq!(parse_complex("-1+0i"), Some(Complex64::new(-1.0, 0.0)));
        assert_eq!(parse_complex("1.0"), None);
    }
}
