use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{Int, IntMatrix, LinError};

/// `U·A·V = D` over `Z/modulus` (over `Z` when the modulus is zero).
///
/// `D` carries the invariant factors `d₁ | d₂ | …` on its leading diagonal followed by zeros.
/// Over `Z/n` every nonzero diagonal entry is normalised to a divisor of `n`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    pub modulus: Int,
}

impl SmithForm {
    pub fn diagonal(&self) -> Vec<Int> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d.get(i, i).clone()).collect()
    }

    /// Nonzero diagonal entries; these are the invariant factors of the column span.
    pub fn invariant_factors(&self) -> Vec<Int> {
        self.diagonal().into_iter().filter(|d| !d.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn reduce(x: &Int, n: &Int) -> Int {
    if n.is_zero() {
        x.clone()
    } else {
        x.mod_floor(n)
    }
}

fn pivot_key(x: &Int) -> Int {
    x.abs()
}

/// Smith normal form over the integers.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    smith_normal_form_mod(a, &Int::zero())
}

/// Smith normal form over `Z/n`; `n = 0` means the integers.
///
/// Pivoting picks the entry of smallest absolute value (smallest residue mod `n`).
pub fn smith_normal_form_mod(a: &IntMatrix, n: &Int) -> SmithForm {
    assert!(!n.is_negative(), "negative modulus");
    let (r, c) = a.shape();
    let mut m = a.clone();
    m.reduce_mod(n);
    let mut u = IntMatrix::identity(r);
    let mut u_inv = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);

    // Elementary row op  row_i += k row_t  corresponds to  U ← E U,  U⁻¹ ← U⁻¹ E⁻¹.
    let row_add = |m: &mut IntMatrix, u: &mut IntMatrix, u_inv: &mut IntMatrix, dst: usize, src: usize, k: &Int| {
        m.add_row_multiple(dst, src, k);
        m.reduce_row_mod(dst, n);
        u.add_row_multiple(dst, src, k);
        u.reduce_row_mod(dst, n);
        u_inv.add_col_multiple(src, dst, &-k);
        u_inv.reduce_col_mod(src, n);
    };
    let col_add = |m: &mut IntMatrix, v: &mut IntMatrix, v_inv: &mut IntMatrix, dst: usize, src: usize, k: &Int| {
        m.add_col_multiple(dst, src, k);
        m.reduce_col_mod(dst, n);
        v.add_col_multiple(dst, src, k);
        v.reduce_col_mod(dst, n);
        v_inv.add_row_multiple(src, dst, &-k);
        v_inv.reduce_row_mod(src, n);
    };

    let steps = r.min(c);
    'outer: for t in 0..steps {
        loop {
            // Pivot: smallest nonzero |entry| in the trailing submatrix.
            let mut best: Option<(usize, usize, Int)> = None;
            for i in t..r {
                for j in t..c {
                    let x = m.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    let key = pivot_key(x);
                    if best.as_ref().is_none_or(|b| key < b.2) {
                        best = Some((i, j, key));
                    }
                }
            }
            let Some((pi, pj, _)) = best else { break 'outer };
            m.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            m.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = m.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                let x = m.get(i, t).clone();
                if x.is_zero() {
                    continue;
                }
                let q = x.div_floor(&p);
                row_add(&mut m, &mut u, &mut u_inv, i, t, &-q);
                if !m.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                let x = m.get(t, j).clone();
                if x.is_zero() {
                    continue;
                }
                let q = x.div_floor(&p);
                col_add(&mut m, &mut v, &mut v_inv, j, t, &-q);
                if !m.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold an offending row into the pivot row and retry.
            let mut offending = None;
            'scan: for i in t + 1..r {
                for j in t + 1..c {
                    if !m.get(i, j).mod_floor(&p).is_zero() {
                        offending = Some(i);
                        break 'scan;
                    }
                }
            }
            match offending {
                Some(i) => row_add(&mut m, &mut u, &mut u_inv, t, i, &Int::one()),
                None => break,
            }
        }
    }

    // Normalise signs (over Z) or pick the canonical divisor of n (over Z/n).
    for t in 0..steps {
        let d = m.get(t, t).clone();
        if d.is_zero() {
            continue;
        }
        if n.is_zero() {
            if d.is_negative() {
                let neg = -Int::one();
                m.scale_row(t, &neg);
                u.scale_row(t, &neg);
                u_inv.scale_col(t, &neg);
            }
        } else {
            let g = d.gcd(n);
            if g != d {
                let w = unit_cofactor(&d, &g, n);
                let w_inv = mod_inverse(&w, n).expect("cofactor is a unit");
                m.scale_row(t, &w_inv);
                m.reduce_row_mod(t, n);
                u.scale_row(t, &w_inv);
                u.reduce_row_mod(t, n);
                u_inv.scale_col(t, &w);
                u_inv.reduce_col_mod(t, n);
            }
        }
    }

    SmithForm { d: m, u, u_inv, v, v_inv, modulus: n.clone() }
}

/// A unit `w` mod `n` with `d ≡ g·w (mod n)`, where `g = gcd(d, n)`.
fn unit_cofactor(d: &Int, g: &Int, n: &Int) -> Int {
    let step = n / g;
    let mut w = (d / g).mod_floor(&step);
    if step.is_one() {
        w = Int::one();
    }
    while !w.gcd(n).is_one() {
        w += &step;
    }
    w
}

/// Inverse of `a` modulo `n`, if it exists.
pub fn mod_inverse(a: &Int, n: &Int) -> Option<Int> {
    if n.is_one() {
        return Some(Int::zero());
    }
    let e = a.mod_floor(n).extended_gcd(n);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(n))
    } else {
        None
    }
}

/// Generators of `{x : A·x ≡ 0 (mod n)}` as the columns of the returned matrix.
pub fn kernel_mod(a: &IntMatrix, n: &Int) -> IntMatrix {
    let snf = smith_normal_form_mod(a, n);
    kernel_from_snf(&snf, a.cols())
}

pub(crate) fn kernel_from_snf(snf: &SmithForm, cols: usize) -> IntMatrix {
    let n = &snf.modulus;
    let diag = snf.diagonal();
    let mut gens = Vec::new();
    for j in 0..cols {
        // y_j must satisfy d_j y_j ≡ 0 (mod n).
        let mult = match diag.get(j) {
            None => Int::one(),
            Some(d) if d.is_zero() => Int::one(),
            Some(d) => {
                if n.is_zero() {
                    continue;
                }
                n / d.gcd(n)
            }
        };
        if !n.is_zero() && (&mult % n).is_zero() {
            continue;
        }
        let mut col = snf.v.col(j);
        for x in &mut col {
            *x = reduce(&(&*x * &mult), n);
        }
        if col.iter().any(|x| !x.is_zero()) {
            gens.push(col);
        }
    }
    IntMatrix::from_columns(&gens, cols)
}

/// Solves `A·x ≡ b (mod n)`. `Ok(None)` certifies that no solution exists.
pub fn solve_mod(a: &IntMatrix, b: &[Int], n: &Int) -> Result<Option<Vec<Int>>, LinError> {
    if b.len() != a.rows() {
        return Err(LinError::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let snf = smith_normal_form_mod(a, n);
    Ok(solve_with_snf(&snf, b))
}

pub(crate) fn solve_with_snf(snf: &SmithForm, b: &[Int]) -> Option<Vec<Int>> {
    let n = &snf.modulus;
    let (r, c) = snf.d.shape();
    let ub: Vec<Int> = snf.u.mul_vec(b).iter().map(|x| reduce(x, n)).collect();
    let diag = snf.diagonal();
    let mut y = vec![Int::zero(); c];
    for i in 0..r {
        let rhs = &ub[i];
        let d = diag.get(i).cloned().unwrap_or_else(Int::zero);
        if d.is_zero() {
            if !rhs.is_zero() {
                return None;
            }
            continue;
        }
        if n.is_zero() {
            let (q, rem) = rhs.div_rem(&d);
            if !rem.is_zero() {
                return None;
            }
            y[i] = q;
        } else {
            let g = d.gcd(n);
            if !rhs.mod_floor(&g).is_zero() {
                return None;
            }
            let step = n / &g;
            let inv = mod_inverse(&(&d / &g), &step).expect("coprime after dividing by gcd");
            y[i] = ((rhs / &g) * inv).mod_floor(&step);
        }
    }
    let x = snf.v.mul_vec(&y);
    Some(x.iter().map(|v| reduce(v, n)).collect())
}
