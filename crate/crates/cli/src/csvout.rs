//! Matrix CSV encoding: header `i,j,re,im`, zero-based indices, row-major,
//! numbers at 17 significant digits so the round-trip is lossless.

use calderon_core::linalg::{C64, CMat};

use crate::report::fmt_g17;

pub fn matrix_to_csv(m: &CMat) -> String {
    let mut out = String::from("i,j,re,im\n");
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push_str(&format!("{i},{j},{},{}\n", fmt_g17(z.re), fmt_g17(z.im)));
        }
    }
    out
}

#[allow(dead_code)] // decoding half of the format, used by tests and downstream tooling
pub fn matrix_from_csv(text: &str) -> Result<CMat, String> {
    let mut entries: Vec<(usize, usize, C64)> = Vec::new();
    let mut nrows = 0;
    let mut ncols = 0;
    for (k, line) in text.lines().enumerate() {
        if k == 0 {
            if line != "i,j,re,im" {
                return Err(format!("bad header `{line}`"));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(format!("line {}: expected 4 fields", k + 1));
        }
        let i: usize = f[0].parse().map_err(|_| format!("line {}: bad row index", k + 1))?;
        let j: usize = f[1].parse().map_err(|_| format!("line {}: bad col index", k + 1))?;
        let re: f64 = f[2].parse().map_err(|_| format!("line {}: bad re", k + 1))?;
        let im: f64 = f[3].parse().map_err(|_| format!("line {}: bad im", k + 1))?;
        nrows = nrows.max(i + 1);
        ncols = ncols.max(j + 1);
        entries.push((i, j, C64::new(re, im)));
    }
    let mut m = CMat::zeros(nrows, ncols);
    for (i, j, z) in entries {
        m[(i, j)] = z;
    }
    Ok(m)
}
