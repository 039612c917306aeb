#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A synthetic flow panel: `n` countries, the given years and layer codes,
/// directed flows with a heavy tail. Returns the CSV path.
pub fn write_panel(dir: &Path, seed: u64, n: usize, years: &[i32], layers: &[&str]) -> PathBuf {
    let mut r = rng(seed);
    let mut text = String::from("year,layer,source,target,value\n");
    for &year in years {
        for layer in layers {
            for i in 0..n {
                for j in 0..n {
                    if i == j || uniform(&mut r) > 0.45 {
                        continue;
                    }
                    let v = 1000.0 * (1.0 - uniform(&mut r)).powf(-0.8);
                    let _ = writeln!(text, "{year},{layer},C{i:02},C{j:02},{v:.3}");
                }
            }
        }
    }
    let path = dir.join("flows.csv");
    std::fs::write(&path, text).unwrap();
    path
}

/// Every file below `root`, as sorted (relative path, bytes) pairs.
pub fn snapshot(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.push((path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out.sort();
    out
}
