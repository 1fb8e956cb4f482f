#![allow(dead_code)]

use std::path::PathBuf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use sqzlift_core::instance::Instance;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Every fixture, sorted by file name.
pub fn fixtures() -> Vec<Instance> {
    let mut paths: Vec<_> = std::fs::read_dir(fixture_dir()).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths.iter().filter(|p| p.extension().is_some_and(|e| e == "toml")).map(|p| Instance::from_path(p).unwrap()).collect()
}

pub fn fixture(name: &str) -> Instance {
    Instance::from_path(&fixture_dir().join(format!("{name}.toml"))).unwrap()
}

/// Laplace expansion along the first row; independent of the library's Bareiss routine.
fn det(m: &[Vec<BigInt>]) -> BigInt {
    match m.len() {
        0 => BigInt::one(),
        1 => m[0][0].clone(),
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<BigInt>> =
                    m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect()).collect();
                let term = &m[0][j] * det(&minor);
                if j % 2 == 0 { term } else { -term }
            })
            .sum(),
    }
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (k - 1..n).flat_map(|last| subsets(last, k - 1).into_iter().map(move |mut s| {
        s.push(last);
        s
    })).collect()
}

/// `d₁⋯d_k` is the gcd of all `k×k` minors.
pub fn minor_gcds(rows: &[Vec<i64>]) -> Vec<BigInt> {
    let (r, c) = (rows.len(), rows[0].len());
    (1..=r.min(c))
        .map(|k| {
            let mut g = BigInt::zero();
            for rs in subsets(r, k) {
                for cs in subsets(c, k) {
                    let sub: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| BigInt::from(rows[i][j])).collect()).collect();
                    g = g.gcd(&det(&sub));
                }
            }
            g
        })
        .collect()
}
