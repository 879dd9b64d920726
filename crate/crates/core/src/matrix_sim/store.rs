//! Binary path store.
//!
//! Layout, little endian: magic `LIBLAB1`, `N: u64`, `n: u64`, grid length
//! `u64` and grid ticks `i64`, seed `u64`, config hash (64 ASCII hex bytes),
//! sample count `u64`, config JSON length `u32` and bytes. Then for every
//! `(sample, i, t_k)` a presence byte followed, when 1, by `N²` row-major
//! `(re, im)` pairs of `f64`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use faer::Mat;
use num_complex::Complex64 as C64;

use super::config::SimConfig;
use super::ensemble::UnitaryPathEnsemble;
use super::path::PathSample;
use super::xmats::XMatrices;
use crate::error::{LabError, Result};
use crate::nc_algebra::Time;

pub const MAGIC: &[u8; 7] = b"LIBLAB1";

fn put_u64(w: &mut impl Write, v: u64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn get_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_f64(r: &mut impl Read) -> Result<f64> {
    Ok(f64::from_bits(get_u64(r)?))
}

pub fn write_paths(path: &Path, ens: &UnitaryPathEnsemble) -> Result<()> {
    let cfg = &ens.config;
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    put_u64(&mut w, cfg.size as u64)?;
    put_u64(&mut w, cfg.components as u64)?;
    put_u64(&mut w, cfg.snapshot_times.len() as u64)?;
    for t in &cfg.snapshot_times {
        w.write_all(&t.ticks().to_le_bytes())?;
    }
    put_u64(&mut w, cfg.seed)?;
    let hash = ens.config_hash.as_bytes();
    if hash.len() != 64 {
        return Err(LabError::Store(format!("config hash has {} bytes", hash.len())));
    }
    w.write_all(hash)?;
    put_u64(&mut w, ens.samples.len() as u64)?;
    let json = serde_json::to_vec(cfg).map_err(|e| LabError::Store(e.to_string()))?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    for s in &ens.samples {
        for comp in &s.u {
            for t in &cfg.snapshot_times {
                match comp.get(t) {
                    None => w.write_all(&[0])?,
                    Some(m) => {
                        w.write_all(&[1])?;
                        for r in 0..cfg.size {
                            for c in 0..cfg.size {
                                let z = m[(r, c)];
                                w.write_all(&z.re.to_le_bytes())?;
                                w.write_all(&z.im.to_le_bytes())?;
                            }
                        }
                    }
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a path store; `X` matrices are rebuilt from the embedded config.
pub fn read_paths(path: &Path) -> Result<UnitaryPathEnsemble> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 7];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(LabError::Store("bad magic".into()));
    }
    let size = get_u64(&mut r)? as usize;
    let comps = get_u64(&mut r)? as usize;
    let grid_len = get_u64(&mut r)? as usize;
    let mut grid = Vec::with_capacity(grid_len);
    for _ in 0..grid_len {
        grid.push(Time::from_ticks(get_u64(&mut r)? as i64));
    }
    let seed = get_u64(&mut r)?;
    let mut hash = [0u8; 64];
    r.read_exact(&mut hash)?;
    let samples = get_u64(&mut r)? as usize;
    let mut len = [0u8; 4];
    r.read_exact(&mut len)?;
    let mut json = vec![0u8; u32::from_le_bytes(len) as usize];
    r.read_exact(&mut json)?;
    let config: SimConfig = serde_json::from_slice(&json).map_err(|e| LabError::Store(e.to_string()))?;
    if config.size != size || config.components as usize != comps || config.seed != seed || config.snapshot_times != grid {
        return Err(LabError::Store("header disagrees with embedded config".into()));
    }
    let mut out = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut s = PathSample { u: vec![BTreeMap::new(); comps], b: vec![BTreeMap::new(); comps] };
        for comp in s.u.iter_mut() {
            for &t in &grid {
                let mut flag = [0u8; 1];
                r.read_exact(&mut flag)?;
                if flag[0] == 1 {
                    let mut m = Mat::zeros(size, size);
                    for row in 0..size {
                        for col in 0..size {
                            let re = get_f64(&mut r)?;
                            let im = get_f64(&mut r)?;
                            m[(row, col)] = C64::new(re, im);
                        }
                    }
                    comp.insert(t, m);
                }
            }
        }
        out.push(s);
    }
    let x = XMatrices::build(&config)?;
    let config_hash = String::from_utf8(hash.to_vec()).map_err(|e| LabError::Store(e.to_string()))?;
    Ok(UnitaryPathEnsemble { config, config_hash, x, samples: out })
}
