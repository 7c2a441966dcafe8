#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command as Process;

use tubal::{tprod, Dims, Tensor3};
use tubal_cli::pnm::{write_image, Image};

#[path = "../../../core/tests/common/mod.rs"]
pub mod common;

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_tubal")
}

/// Runs the binary and returns (exit code, stdout, stderr).
pub fn tubal(args: &[&str]) -> (i32, String, String) {
    let out = Process::new(bin()).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Nonnegative `P * Q` scaled to a peak of 1, shape `h x c x w`.
pub fn low_rank_unit(h: usize, c: usize, w: usize, r: usize, seed: u64) -> Tensor3 {
    let mut rng = common::TestRng::new(seed);
    let p = Tensor3::from_fn(Dims::new(h, r, w).unwrap(), |_, _, _| rng.sym().abs());
    let q = Tensor3::from_fn(Dims::new(r, c, w).unwrap(), |_, _, _| rng.sym().abs());
    let x = tprod(&p, &q).unwrap();
    let peak = x.max_abs();
    x.scaled(1.0 / peak)
}

/// Synthetic RGB or gray image whose tensor has low tubal rank before
/// 8-bit quantization.
pub fn synthetic_image(h: usize, w: usize, channels: usize, r: usize, seed: u64) -> Image {
    Image::from_tensor(&low_rank_unit(h, channels, w, r, seed))
}

pub fn save(dir: &Path, name: &str, img: &Image) -> PathBuf {
    let path = dir.join(name);
    write_image(&path, img).unwrap();
    path
}

pub fn read_csv(path: &Path) -> Vec<std::collections::HashMap<String, String>> {
    let mut rd = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
    rd.records()
        .map(|r| {
            let r = r.unwrap();
            header.iter().cloned().zip(r.iter().map(String::from)).collect()
        })
        .collect()
}

/// Every file under `a` exists under `b` with identical bytes, and vice versa.
pub fn same_tree(a: &Path, b: &Path) -> Result<usize, String> {
    fn files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                files(root, &p, out);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let (mut fa, mut fb) = (Vec::new(), Vec::new());
    files(a, a, &mut fa);
    files(b, b, &mut fb);
    fa.sort();
    fb.sort();
    if fa != fb {
        return Err(format!("file lists differ: {fa:?} vs {fb:?}"));
    }
    for f in &fa {
        if std::fs::read(a.join(f)).unwrap() != std::fs::read(b.join(f)).unwrap() {
            return Err(format!("{} differs", f.display()));
        }
    }
    Ok(fa.len())
}
